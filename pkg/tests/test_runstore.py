import json

import pytest

from perflaw.errors import DataFormatError, DataIOError, ValidationError
from perflaw.fitting import RunRecord
from perflaw.laws import MetricKind
from perflaw.runstore import RunArchive, append_runs, load_runs

LOSS = MetricKind("loss")
HR = MetricKind("hr", 10)

RUNS = [
    RunRecord("ml", 1, 64, LOSS, 2.5, 1e6),
    RunRecord("ml", 2, 64, HR, 0.31, 1e6),
    RunRecord("kr", 1, 64, LOSS, 3.1, 2e6),
]


@pytest.fixture
def archive(tmp_path):
    return RunArchive.create(tmp_path / "arch")


class TestArchiveLifecycle:
    def test_create_layout(self, archive):
        assert archive.runs_path.exists()
        assert archive.fits_dir.is_dir()
        manifest = archive.manifest()
        assert {"created_at", "tool_version", "datasets"} <= set(manifest)

    def test_open_requires_manifest(self, tmp_path):
        (tmp_path / "plain").mkdir()
        with pytest.raises(DataIOError, match="not a run archive"):
            RunArchive.open(tmp_path / "plain")
        created = RunArchive.create(tmp_path / "real")
        assert RunArchive.open(created.path).path == created.path


class TestAppendAndLoad:
    def test_round_trip_identity(self, archive):
        append_runs(archive, RUNS)
        assert load_runs(archive) == RUNS

    def test_insertion_order_stable(self, archive):
        append_runs(archive, RUNS[:2])
        append_runs(archive, RUNS[2:])
        assert load_runs(archive) == RUNS

    def test_filters(self, archive):
        append_runs(archive, RUNS)
        assert load_runs(archive, metric="hr") == [RUNS[1]]
        assert load_runs(archive, dataset_id="kr") == [RUNS[2]]
        assert load_runs(archive, dataset_id="ml", metric="loss") == [RUNS[0]]
        assert load_runs(archive) == RUNS  # empty filter: everything

    def test_duplicate_rejected_with_key(self, archive):
        append_runs(archive, RUNS)
        dup = RunRecord("ml", 1, 64, LOSS, 9.9, 1e6)
        with pytest.raises(ValidationError, match="dataset_id='ml'.*n_layers=1"):
            append_runs(archive, [dup])
        assert load_runs(archive) == RUNS  # nothing written

    def test_duplicate_replace_in_place(self, archive):
        append_runs(archive, RUNS)
        replacement = RunRecord("ml", 1, 64, LOSS, 9.9, 1e6)
        append_runs(archive, [replacement], on_duplicate="replace")
        loaded = load_runs(archive)
        assert loaded[0] == replacement
        assert len(loaded) == len(RUNS)

    def test_duplicate_keep_both_appends_only(self, archive):
        append_runs(archive, RUNS)
        before = archive.runs_path.read_bytes()
        dup = RunRecord("ml", 1, 64, LOSS, 9.9, 1e6)
        append_runs(archive, [dup], on_duplicate="keep-both")
        after = archive.runs_path.read_bytes()
        assert after.startswith(before)  # prior bytes never rewritten
        assert len(load_runs(archive)) == len(RUNS) + 1

    def test_unknown_policy(self, archive):
        with pytest.raises(ValidationError):
            append_runs(archive, RUNS, on_duplicate="merge")

    def test_out_of_range_metric_on_load(self, archive):
        bad = dict(RUNS[1].to_dict(), value=1.2)
        with open(archive.runs_path, "a") as fh:
            fh.write(json.dumps(bad) + "\n")
        with pytest.raises(DataFormatError, match="line 1"):
            load_runs(archive)

    def test_corrupt_final_line_reports_number(self, archive):
        append_runs(archive, RUNS)
        with open(archive.runs_path, "a") as fh:
            fh.write('{"dataset_id": "ml", "n_layers":')  # truncated write
        with pytest.raises(DataFormatError, match="line 4"):
            load_runs(archive)


class TestManifestDigests:
    def test_record_and_verify(self, archive, tmp_path):
        data = tmp_path / "corpus.csv"
        data.write_text("user_id,items\nu1,1 2 3\n")
        digest = archive.record_dataset(data)
        assert len(digest) == 64
        assert archive.verify_datasets() == {"corpus.csv": True}
        data.write_text("user_id,items\nu1,9 9 9\n")
        assert archive.verify_datasets() == {"corpus.csv": False}

    def test_record_missing_file(self, archive, tmp_path):
        with pytest.raises(DataIOError):
            archive.record_dataset(tmp_path / "gone.csv")


class TestFitDocuments:
    def test_save_and_load(self, archive):
        doc = {"law": "perf", "w1": 0.5, "rss": 0.01}
        path = archive.save_fit("demo", doc)
        assert path.name == "demo.json"
        assert archive.load_fit("demo") == doc

    def test_missing_fit(self, archive):
        with pytest.raises(DataIOError, match="no such fit"):
            archive.load_fit("ghost")

    def test_invalid_name(self, archive):
        with pytest.raises(ValidationError):
            archive.save_fit("a/b", {})


class TestAdvisoryLock:
    def test_held_lock_blocks_writer(self, archive):
        (archive.path / ".lock").touch()
        with pytest.raises(DataIOError, match="locked"):
            append_runs(archive, RUNS)
        (archive.path / ".lock").unlink()
        append_runs(archive, RUNS)  # released: writes proceed

    def test_lock_released_after_write(self, archive):
        append_runs(archive, RUNS[:1])
        assert not (archive.path / ".lock").exists()

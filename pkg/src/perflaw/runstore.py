"""Append-only archive of run records and fit documents.

Layout under the archive directory::

    runs.jsonl       one RunRecord per line, insertion order preserved
    fits/<name>.json named fit documents
    manifest.json    creation time, tool version, dataset file digests

Volumes are desk scale, so plain JSONL keeps everything diff-able and
auditable. Writers take an advisory lock file; concurrent writers are out
of contract.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from contextlib import contextmanager
from pathlib import Path

from .errors import DataFormatError, DataIOError, ValidationError
from .fitting import RunRecord

__all__ = ["RunArchive", "append_runs", "load_runs", "DUPLICATE_POLICIES"]

DUPLICATE_POLICIES = ("reject", "replace", "keep-both")

_MANIFEST = "manifest.json"
_RUNS = "runs.jsonl"
_FITS = "fits"
_LOCK = ".lock"


def _run_key(run: RunRecord):
    return (run.dataset_id, run.n_layers, run.d_emb, run.metric.kind, run.metric.k)


class RunArchive:
    """Handle on an archive directory; create() initializes, open() attaches."""

    def __init__(self, path):
        self.path = Path(path)

    @property
    def runs_path(self) -> Path:
        return self.path / _RUNS

    @property
    def fits_dir(self) -> Path:
        return self.path / _FITS

    @property
    def manifest_path(self) -> Path:
        return self.path / _MANIFEST

    @classmethod
    def create(cls, path) -> "RunArchive":
        archive = cls(path)
        archive.path.mkdir(parents=True, exist_ok=True)
        archive.fits_dir.mkdir(exist_ok=True)
        if not archive.manifest_path.exists():
            from . import __version__

            manifest = {
                "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                "tool_version": __version__,
                "datasets": {},
            }
            archive.manifest_path.write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n"
            )
        archive.runs_path.touch()
        return archive

    @classmethod
    def open(cls, path) -> "RunArchive":
        archive = cls(path)
        if not archive.path.is_dir() or not archive.manifest_path.is_file():
            raise DataIOError(f"not a run archive: {path}")
        return archive

    def manifest(self) -> dict:
        return json.loads(self.manifest_path.read_text())

    def record_dataset(self, dataset_path, name: str | None = None) -> str:
        """Store the SHA-256 of a dataset file in the manifest; returns the digest."""
        dataset_path = Path(dataset_path)
        if not dataset_path.is_file():
            raise DataIOError(f"no such file: {dataset_path}")
        digest = hashlib.sha256(dataset_path.read_bytes()).hexdigest()
        with self._locked():
            manifest = self.manifest()
            manifest["datasets"][name or dataset_path.name] = {
                "path": str(dataset_path),
                "sha256": digest,
            }
            self._write_atomic(self.manifest_path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return digest

    def verify_datasets(self) -> dict[str, bool]:
        """Check every recorded digest against the file bytes on disk."""
        out = {}
        for name, entry in self.manifest()["datasets"].items():
            p = Path(entry["path"])
            out[name] = (
                p.is_file()
                and hashlib.sha256(p.read_bytes()).hexdigest() == entry["sha256"]
            )
        return out

    def save_fit(self, name: str, doc: dict) -> Path:
        if not name or "/" in name:
            raise ValidationError(f"invalid fit name {name!r}")
        self.fits_dir.mkdir(exist_ok=True)
        target = self.fits_dir / f"{name}.json"
        with self._locked():
            self._write_atomic(target, json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return target

    def load_fit(self, name: str) -> dict:
        target = self.fits_dir / f"{name}.json"
        if not target.is_file():
            raise DataIOError(f"no such fit: {name} ({target})")
        return json.loads(target.read_text())

    @contextmanager
    def _locked(self):
        lock = self.path / _LOCK
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise DataIOError(
                f"archive is locked by another writer (remove {lock} if stale)"
            )
        try:
            os.close(fd)
            yield
        finally:
            lock.unlink(missing_ok=True)

    @staticmethod
    def _write_atomic(path: Path, text: str):
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text)
        tmp.replace(path)


def _read_raw(archive: RunArchive) -> list[tuple[int, RunRecord]]:
    if not archive.runs_path.is_file():
        raise DataIOError(f"missing {archive.runs_path}")
    out = []
    with open(archive.runs_path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out.append((line_no, RunRecord.from_dict(obj)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataFormatError(f"corrupt run record ({exc})", line_no)
            except ValidationError as exc:
                raise DataFormatError(str(exc), line_no)
    return out


def append_runs(
    archive: RunArchive, runs: list[RunRecord], on_duplicate: str = "reject"
) -> RunArchive:
    """Append validated runs; duplicates handled per the chosen policy.

    reject    raise, naming the duplicate key
    replace   the new record supersedes the stored one in place
    keep-both append regardless; prior bytes are never rewritten
    """
    if on_duplicate not in DUPLICATE_POLICIES:
        raise ValidationError(
            f"on_duplicate must be one of {DUPLICATE_POLICIES}, got {on_duplicate!r}"
        )
    existing = _read_raw(archive)
    by_key = {_run_key(r): i for i, (_ln, r) in enumerate(existing)}
    records = [r for _ln, r in existing]
    appended: list[RunRecord] = []
    replaced = False
    for idx, run in enumerate(runs):
        key = _run_key(run)
        if key in by_key and on_duplicate == "reject":
            raise ValidationError(
                f"record {idx}: duplicate key (dataset_id={key[0]!r}, "
                f"n_layers={key[1]}, d_emb={key[2]}, metric={key[3]}, k={key[4]})"
            )
        if key in by_key and on_duplicate == "replace":
            records[by_key[key]] = run
            replaced = True
        else:
            by_key.setdefault(key, len(records))
            records.append(run)
            appended.append(run)

    with archive._locked():
        if replaced:
            text = "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in records)
            archive._write_atomic(archive.runs_path, text)
        else:
            with open(archive.runs_path, "a") as fh:
                for run in appended:
                    fh.write(json.dumps(run.to_dict(), sort_keys=True) + "\n")
    return archive


def load_runs(
    archive: RunArchive,
    dataset_id: str | None = None,
    metric: str | None = None,
) -> list[RunRecord]:
    """Read runs in insertion order, optionally filtered by dataset or metric kind."""
    records = [r for _ln, r in _read_raw(archive)]
    if dataset_id is not None:
        records = [r for r in records if r.dataset_id == dataset_id]
    if metric is not None:
        records = [r for r in records if r.metric.kind == metric]
    return records

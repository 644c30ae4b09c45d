"""Command-line interface wiring the toolkit into reproducible pipelines.

Commands: stats, apen, fit loss|perf, optimize, synth markov|runs,
verify-bound, potential. Every command takes ``--output json|text`` and the
seeded commands are bit-deterministic. Exit codes: 0 ok, 1 usage, 2 I/O,
3 validation, 4 numeric.

A ``--config file.toml`` document (flat key = value, keys matching the long
flag names with underscores) supplies defaults; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import __version__
from .apen import (
    ApEnConfig,
    MarkovChain,
    apen_prime,
    compute_apen,
    data_parameter,
    generate_markov,
    markov_apen,
    verify_encoding_bound,
)
from .dataset import compute_stats, load_sequences, truncate
from .errors import (
    DataIOError,
    NumericError,
    PerflawError,
    ValidationError,
)
from .fitting import RunRecord, fit_loss_law, fit_perf_law
from .laws import (
    LossLawParams,
    MetricKind,
    PerfLawParams,
    eval_loss_law,
    eval_perf_law,
)
from .optimize import (
    SearchSpace,
    constrained_optimum,
    global_optimum,
    scaling_potential,
)
from .runstore import RunArchive, load_runs

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4

_PERF_METRICS = ("hr", "ndcg", "mrr")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with code 2
        raise _UsageError(message)


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("PERFLAW_THREADS", "1")))
    except ValueError:
        return 1


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated integers, got {text!r}")


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}")


def _parse_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValidationError(f"expected lo:hi, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ValidationError(f"expected integer lo:hi, got {text!r}")


def _parse_mask(text: str | None) -> dict[str, float] | None:
    if text is None:
        return None
    if text.strip() == "":
        return {}
    mask = {}
    for item in text.split(","):
        if "=" not in item:
            raise ValidationError(f"mask entries must be name=value, got {item!r}")
        name, value = item.split("=", 1)
        try:
            mask[name.strip()] = float(value)
        except ValueError:
            raise ValidationError(f"mask value for {name!r} is not a number")
    return mask


def _read_json(path) -> dict | list:
    path = Path(path)
    if not path.is_file():
        raise DataIOError(f"no such file: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg})")


def _load_corpus(args):
    seqs = load_sequences(args.data, args.format)
    if getattr(args, "truncate", None):
        seqs = truncate(seqs, args.truncate)
    return seqs


def _write_sequences(seqs, path: Path, format: str) -> None:
    if format == "jsonl":
        with open(path, "w") as fh:
            for s in seqs:
                obj = {"user_id": s.user_id, "items": list(s.items)}
                if s.ratings is not None:
                    obj["ratings"] = list(s.ratings)
                fh.write(json.dumps(obj) + "\n")
    else:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["user_id", "items"])
            for s in seqs:
                writer.writerow([s.user_id, " ".join(str(i) for i in s.items)])


def _read_runs_jsonl(path) -> list[RunRecord]:
    path = Path(path)
    if not path.is_file():
        raise DataIOError(f"no such file: {path}")
    runs = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                runs.append(RunRecord.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValidationError(f"{path} line {line_no}: corrupt run ({exc})")
    return runs


def _gather_runs(args, kinds: tuple[str, ...]) -> list[RunRecord]:
    if args.runs:
        runs = _read_runs_jsonl(args.runs)
    elif args.archive:
        runs = load_runs(RunArchive.open(args.archive))
    else:
        raise ValidationError("pass --runs FILE or --archive DIR")
    runs = [r for r in runs if r.metric.kind in kinds]
    if getattr(args, "dataset", None):
        runs = [r for r in runs if r.dataset_id == args.dataset]
    return runs


# ---------------------------------------------------------------------------
# command handlers


def cmd_stats(args) -> int:
    seqs = _load_corpus(args)
    stats = compute_stats(seqs)
    payload = stats.to_dict()
    text = [
        f"users   {stats.num_users}",
        f"s_max   {stats.s_max}",
        f"s_mean  {stats.s_mean:.4f}",
        f"tokens  {stats.tokens}",
        f"vocab   {stats.vocab}",
    ]
    _emit(args, payload, text)
    return EXIT_OK


def cmd_apen(args) -> int:
    seqs = _load_corpus(args)
    stats = compute_stats(seqs)
    cfg = ApEnConfig(m=args.m, r=0.0, pooling=args.pooling)
    res = compute_apen(seqs, cfg)
    prime = apen_prime(res.apen, args.epsilon)
    d_prime = data_parameter(stats.tokens, res.apen, args.epsilon)
    payload = {
        "apen": res.apen,
        "apen_prime": prime,
        "d_prime": d_prime,
        "m": args.m,
        "pooling": args.pooling,
        "tokens": stats.tokens,
        "windows_m": res.windows_m,
        "windows_m1": res.windows_m1,
    }
    text = [
        f"apen       {res.apen:.6f}",
        f"apen_prime {prime:.6f}",
        f"d_prime    {d_prime:.6f}",
        f"tokens     {stats.tokens}",
        f"m={args.m} pooling={args.pooling}",
    ]
    _emit(args, payload, text)
    return EXIT_OK


def _write_points_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def cmd_fit_loss(args) -> int:
    runs = _gather_runs(args, ("loss",))
    mask = _parse_mask(args.mask)
    fit = fit_loss_law(
        runs,
        form=args.form,
        size=args.size,
        fit_data_param=args.fit_data_param,
        mask=mask,
        n_starts=args.starts,
        seed=args.seed,
        threads=args.threads,
    )
    doc = fit.to_doc()
    out = Path(args.out)
    fits_dir = out / "fits"
    fits_dir.mkdir(parents=True, exist_ok=True)
    fit_path = fits_dir / f"{args.name}.json"
    fit_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    rows = []
    for r in runs:
        n = r.n_layers if args.size == "n_layers" else r.n_layers * r.d_emb**2
        d = (
            fit.data_params[r.dataset_id]
            if args.fit_data_param
            else r.d_prime
        )
        pred = eval_loss_law(fit.params, n, d)
        rows.append(
            {
                "dataset_id": r.dataset_id,
                "n_layers": r.n_layers,
                "d_emb": r.d_emb,
                "size": n,
                "data_scale": d,
                "observed": r.value,
                "predicted": pred,
                "residual": pred - r.value,
            }
        )
    points_path = fits_dir / f"{args.name}.csv"
    _write_points_csv(points_path, rows)

    payload = {**doc, "fit_path": str(fit_path), "points_path": str(points_path)}
    text = [
        f"fit written to {fit_path}",
        f"points written to {points_path}",
        f"r_squared  {doc['r_squared']:.6f}",
        f"rss        {doc['rss']:.6e}",
        f"converged  {doc['converged']}",
    ]
    _emit(args, payload, text)
    return EXIT_OK


def cmd_fit_perf(args) -> int:
    runs = _gather_runs(args, _PERF_METRICS)
    mask = _parse_mask(args.mask)
    fit = fit_perf_law(
        runs,
        mask=mask,
        n_starts=args.starts,
        seed=args.seed,
        threads=args.threads,
    )
    doc = fit.to_doc()
    out = Path(args.out)
    fits_dir = out / "fits"
    fits_dir.mkdir(parents=True, exist_ok=True)
    fit_path = fits_dir / f"{args.name}.json"
    fit_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")

    rows = []
    for r in runs:
        pred = eval_perf_law(fit.params, r.n_layers, r.d_emb, r.d_prime)
        rows.append(
            {
                "dataset_id": r.dataset_id,
                "n_layers": r.n_layers,
                "d_emb": r.d_emb,
                "d_prime": r.d_prime,
                "observed": r.value,
                "predicted": pred,
                "residual": pred - r.value,
            }
        )
    points_path = fits_dir / f"{args.name}.csv"
    _write_points_csv(points_path, rows)

    payload = {**doc, "fit_path": str(fit_path), "points_path": str(points_path)}
    text = [
        f"fit written to {fit_path}",
        f"points written to {points_path}",
        f"r_squared  {doc['r_squared']:.6f}",
        f"rss        {doc['rss']:.6e}",
        f"converged  {doc['converged']}",
    ]
    _emit(args, payload, text)
    return EXIT_OK


def cmd_optimize(args) -> int:
    doc = _read_json(args.fit)
    if not isinstance(doc, dict) or doc.get("law") != "perf":
        raise ValidationError(f"{args.fit} is not a performance-law fit document")
    params = PerfLawParams.from_dict(doc)
    budget = None
    if args.budget:
        parts = args.budget.split(":")
        if len(parts) != 2:
            raise ValidationError(f"expected functional:limit, got {args.budget!r}")
        budget = (parts[0], float(parts[1]))
    space = SearchSpace(
        n_range=_parse_range(args.n_range),
        d_range=_parse_range(args.d_range),
        budget=budget,
    )
    refine = {"auto": None, "on": True, "off": False}[args.refine]
    if budget is None:
        result = global_optimum(params, args.d_prime, space, refine=refine)
    else:
        result = constrained_optimum(params, args.d_prime, space)
    payload = {
        **result.to_dict(),
        "budget": None if budget is None else {"functional": budget[0], "limit": budget[1]},
        "d_prime": args.d_prime,
    }
    text = [
        f"argmax n={result.argmax_n} d={result.argmax_d}",
        f"predicted {result.predicted:.6f}",
        f"points evaluated {result.evaluated_points}",
    ]
    if result.frontier:
        text.append(f"frontier ({len(result.frontier)} points):")
        for n, d, v in result.frontier:
            text.append(f"  n={n:<5d} d={d:<5d} predicted={v:.6f}")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_synth_markov(args) -> int:
    p = np.array(_parse_float_list(args.p), dtype=float)
    if p.size != args.states**2:
        raise ValidationError(
            f"--p needs {args.states ** 2} entries for {args.states} states, got {p.size}"
        )
    chain = MarkovChain(p.reshape(args.states, args.states))
    analytic = markov_apen(chain)
    per_user = args.len // args.users
    if per_user < 1:
        raise ValidationError("--len must allow at least 1 token per user")
    seqs = [
        generate_markov(chain, per_user, args.seed + i) for i in range(args.users)
    ]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _write_sequences(seqs, out, args.format)
    payload = {
        "path": str(out),
        "format": args.format,
        "states": args.states,
        "length": per_user * args.users,
        "users": args.users,
        "seed": args.seed,
        "analytic_apen": analytic,
    }
    text = [
        f"wrote {per_user * args.users} tokens over {args.users} user(s) to {out}",
        f"analytic_apen {analytic:.6f}",
    ]
    _emit(args, payload, text)
    return EXIT_OK


def cmd_synth_runs(args) -> int:
    doc = _read_json(args.params)
    if not isinstance(doc, dict):
        raise ValidationError(f"{args.params}: expected a parameter map")
    n_grid = _parse_int_list(args.n_grid)
    d_grid = _parse_int_list(args.d_grid)
    d_primes = _parse_float_list(args.d_prime)
    if not n_grid or not d_grid or not d_primes:
        raise ValidationError("--n-grid, --d-grid, and --d-prime must be non-empty")
    rng = np.random.default_rng(args.seed)
    runs = []
    if args.law == "perf":
        params = PerfLawParams.from_dict(doc)
        metric = MetricKind(args.metric, args.k if args.metric in ("hr", "ndcg") else None)
        for dp in d_primes:
            for n in n_grid:
                for d in d_grid:
                    value = eval_perf_law(params, n, d, dp) + rng.normal(0.0, args.sigma)
                    runs.append(
                        RunRecord(args.dataset_id, n, d, metric, float(value), dp)
                    )
    else:
        params = LossLawParams.from_dict(doc)
        metric = MetricKind("loss")
        for dp in d_primes:
            for n in n_grid:
                for d in d_grid:
                    value = eval_loss_law(params, n, dp) + rng.normal(0.0, args.sigma)
                    runs.append(
                        RunRecord(args.dataset_id, n, d, metric, float(value), dp)
                    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as fh:
        for r in runs:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")
    payload = {
        "path": str(out),
        "law": args.law,
        "count": len(runs),
        "sigma": args.sigma,
        "seed": args.seed,
    }
    _emit(args, payload, [f"wrote {len(runs)} runs to {out}"])
    return EXIT_OK


def cmd_verify_bound(args) -> int:
    seqs = _load_corpus(args)
    cfg = ApEnConfig(m=args.m, r=0.0, pooling=args.pooling)
    report = verify_encoding_bound(seqs, cfg, epsilon=args.epsilon)
    payload = report.to_dict()
    text = [
        f"lhs (|U| * H)        {report.lhs:.6f}",
        "rhs (tokens * ApEn') "
        + ("undefined (degenerate)" if report.rhs is None else f"{report.rhs:.6f}"),
        f"holds                {report.holds}",
        f"degenerate           {report.degenerate}",
        f"users_exceed_smax    {report.users_exceed_smax}",
    ]
    _emit(args, payload, text)
    return EXIT_OK


def _potential_entries_from_file(path) -> list[tuple[str, PerfLawParams, float | None]]:
    doc = _read_json(path)
    if isinstance(doc, list):
        out = []
        for i, entry in enumerate(doc):
            if "label" not in entry or "params" not in entry:
                raise ValidationError(
                    f"{path}: entry {i} needs 'label' and 'params' fields"
                )
            out.append(
                (
                    str(entry["label"]),
                    PerfLawParams.from_dict(entry["params"]),
                    None if entry.get("observed") is None else float(entry["observed"]),
                )
            )
        return out
    if isinstance(doc, dict) and doc.get("law") == "perf":
        label = Path(path).stem
        return [(label, PerfLawParams.from_dict(doc), None)]
    raise ValidationError(f"{path}: expected a fit document or a list of entries")


def cmd_potential(args) -> int:
    entries: list[tuple[str, PerfLawParams, float | None]] = []
    for path in args.fits:
        entries.extend(_potential_entries_from_file(path))
    if args.observed:
        observed = _parse_float_list(args.observed)
        if len(observed) != len(entries):
            raise ValidationError(
                f"--observed has {len(observed)} values for {len(entries)} entries"
            )
        entries = [(lbl, p, obs) for (lbl, p, _), obs in zip(entries, observed)]
    report = scaling_potential(entries)
    _emit(args, report.to_dict(), report.to_text().splitlines())
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(sp, *, seeded: bool = False):
    sp.add_argument("--output", choices=("json", "text"), default="text")
    sp.add_argument("--config", default=None, help="TOML defaults file")
    if seeded:
        sp.add_argument("--seed", type=int, default=0)


def _add_corpus_args(sp):
    sp.add_argument("--data", required=True, help="sequence file")
    sp.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    sp.add_argument("--truncate", type=int, default=None, help="keep last N items")


def build_parser() -> tuple[_Parser, list[_Parser]]:
    parser = _Parser(prog="perflaw", description=__doc__)
    parser.add_argument("--version", action="version", version=f"perflaw {__version__}")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    registered: list[_Parser] = []

    def register(name, **kwargs) -> _Parser:
        sp = subs.add_parser(name, **kwargs)
        registered.append(sp)
        return sp

    sp = register("stats", help="corpus statistics")
    _add_corpus_args(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_stats)

    sp = register("apen", help="approximate entropy, ApEn', and D'")
    _add_corpus_args(sp)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument(
        "--pooling", choices=("pooled", "per_sequence_weighted"), default="pooled"
    )
    sp.add_argument("--epsilon", type=float, default=1e-9)
    _add_common(sp)
    sp.set_defaults(func=cmd_apen)

    fit = register("fit", help="fit a law to run records")
    fit_subs = fit.add_subparsers(dest="law_command", parser_class=_Parser)

    def add_fit_common(fp):
        registered.append(fp)
        fp.add_argument("--runs", default=None, help="JSONL run-record file")
        fp.add_argument("--archive", default=None, help="run archive directory")
        fp.add_argument("--dataset", default=None, help="filter by dataset_id")
        fp.add_argument("--name", default=None, help="fit name (output file stem)")
        fp.add_argument("--out", default=".", help="output directory (fits/ created)")
        fp.add_argument("--mask", default=None, help="frozen params, e.g. w6=1,C=0")
        fp.add_argument("--starts", type=int, default=64)
        fp.add_argument("--threads", type=int, default=_default_threads())
        _add_common(fp, seeded=True)

    fp = fit_subs.add_parser("loss")
    add_fit_common(fp)
    fp.add_argument("--form", choices=("simplified", "full"), default="simplified")
    fp.add_argument("--size", choices=("n_layers", "params_proxy"), default="n_layers")
    fp.add_argument("--fit-data-param", action="store_true")
    fp.set_defaults(func=cmd_fit_loss, name_default="loss")

    fp = fit_subs.add_parser("perf")
    add_fit_common(fp)
    fp.set_defaults(func=cmd_fit_perf, name_default="perf")

    sp = register("optimize", help="search (n, d) under a fitted performance law")
    sp.add_argument("--fit", required=True, help="performance-law fit JSON")
    sp.add_argument("--d-prime", type=float, required=True)
    sp.add_argument("--n-range", required=True, help="lo:hi")
    sp.add_argument("--d-range", required=True, help="lo:hi")
    sp.add_argument("--budget", default=None, help="functional:limit, e.g. n_times_d:512")
    sp.add_argument("--refine", choices=("auto", "on", "off"), default="auto")
    _add_common(sp)
    sp.set_defaults(func=cmd_optimize)

    synth = register("synth", help="generate synthetic fixtures")
    synth_subs = synth.add_subparsers(dest="synth_command", parser_class=_Parser)

    fp = synth_subs.add_parser("markov")
    registered.append(fp)
    fp.add_argument("--states", type=int, required=True)
    fp.add_argument("--p", required=True, help="row-major transition probabilities")
    fp.add_argument("--len", type=int, required=True)
    fp.add_argument("--users", type=int, default=1)
    fp.add_argument("--out", required=True)
    fp.add_argument("--format", choices=("csv", "jsonl"), default="jsonl")
    _add_common(fp, seeded=True)
    fp.set_defaults(func=cmd_synth_markov)

    fp = synth_subs.add_parser("runs")
    registered.append(fp)
    fp.add_argument("--law", choices=("perf", "loss"), required=True)
    fp.add_argument("--params", required=True, help="JSON parameter map")
    fp.add_argument("--n-grid", required=True, help="comma-separated layer counts")
    fp.add_argument("--d-grid", required=True, help="comma-separated widths")
    fp.add_argument("--d-prime", required=True, help="comma-separated data parameters")
    fp.add_argument("--sigma", type=float, default=0.0)
    fp.add_argument("--metric", choices=("hr", "ndcg", "mrr", "loss"), default="hr")
    fp.add_argument("--k", type=int, default=10)
    fp.add_argument("--dataset-id", default="synth")
    fp.add_argument("--out", required=True)
    _add_common(fp, seeded=True)
    fp.set_defaults(func=cmd_synth_runs)

    sp = register("verify-bound", help="encoding-length diagnostic")
    _add_corpus_args(sp)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument(
        "--pooling", choices=("pooled", "per_sequence_weighted"), default="pooled"
    )
    sp.add_argument("--epsilon", type=float, default=1e-9)
    _add_common(sp)
    sp.set_defaults(func=cmd_verify_bound)

    sp = register("potential", help="compare scaling headroom across fits")
    sp.add_argument("fits", nargs="+", help="fit documents or an entries file")
    sp.add_argument("--observed", default=None, help="comma-separated observed metrics")
    _add_common(sp)
    sp.set_defaults(func=cmd_potential)

    return parser, registered


def _load_config(argv: list[str]) -> dict:
    if "--config" not in argv:
        return {}
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise _UsageError("--config requires a path")
    path = Path(argv[idx + 1])
    if not path.is_file():
        raise DataIOError(f"no such config file: {path}")
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"{path}: invalid TOML ({exc})")
    return {key.replace("-", "_"): value for key, value in cfg.items()}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registered = build_parser()
    try:
        cfg = _load_config(argv)
        if cfg:
            parser.set_defaults(**cfg)
            for sp in registered:
                sp.set_defaults(**cfg)
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        if getattr(args, "name", None) is None and hasattr(args, "name_default"):
            args.name = args.name_default
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataIOError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PerflawError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    raise SystemExit(main())

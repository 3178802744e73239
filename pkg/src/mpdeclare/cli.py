"""Command-line interface: ``mpdc check | gen | bench | oracle-check``."""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field

from .bench import GRIDS, render_timings_csv, run_grid, timing_row
from .crossval import compare, random_cases
from .engine import check_log_conformance, check_trace_conformance, default_workers
from .eventlog import LogParseError, LogValidationError, read_log, write_json_log
from .loggen import bench_spec, generate, write_xes
from .model import ModelParseError, read_model, validate_model
from .report import build_report, render_csv, render_json, summary_table

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
INPUT_ERRORS = (OSError, LogParseError, LogValidationError, ModelParseError, UnicodeDecodeError)


@dataclass
class RunConfig:
    subcommand: str
    log: str | None = None
    model: str | None = None
    out: str | None = None
    format: str = "json"
    workers: int = 1
    sort_on_load: bool = False
    fail_on_violation: bool = False
    seed: int = 0
    extra: dict = field(default_factory=dict)


def _write(path: str | None, data: bytes) -> None:
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def run_check(cfg: RunConfig) -> int:
    try:
        log = read_log(cfg.log, sort_on_load=cfg.sort_on_load)
        model = read_model(cfg.model)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    for w in validate_model(model, log):
        print(f"warning: {w}", file=sys.stderr)
    t0 = time.perf_counter()
    results = check_log_conformance(log, model, workers=cfg.workers)
    duration = (time.perf_counter() - t0) * 1000.0
    report = build_report(log, model, results, round(duration))

    data = render_csv(report) if cfg.format == "csv" else render_json(report)
    try:
        _write(cfg.out, data)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    summary_stream = sys.stderr if cfg.out in (None, "-") else sys.stdout
    print(summary_table(report), file=summary_stream)
    if cfg.fail_on_violation and report.total_violations > 0:
        return EXIT_VIOLATION
    return EXIT_OK


def run_gen(cfg: RunConfig) -> int:
    spec = bench_spec(cfg.extra["traces"], cfg.extra["events"], cfg.seed)
    log = generate(spec)
    try:
        with open(cfg.out, "wb") as fh:
            if cfg.out.lower().endswith(".json"):
                write_json_log(log, fh)
            else:
                write_xes(log, fh)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"wrote {len(log)} traces, {log.num_events} events to {cfg.out}")
    return EXIT_OK


def run_bench(cfg: RunConfig) -> int:
    traces, events, sizes = GRIDS[cfg.extra["grid"]]
    traces = cfg.extra.get("traces") or traces
    events = cfg.extra.get("events") or events
    sizes = cfg.extra.get("constraints") or sizes

    def progress(t):
        print(",".join(timing_row(t)), file=sys.stderr, flush=True)

    timings = run_grid(traces, events, sizes, cfg.extra["families"], cfg.extra["reps"], cfg.seed,
                       cfg.workers, progress)
    _write(cfg.out, render_timings_csv(timings))
    return EXIT_OK


def run_oracle_check(cfg: RunConfig, engine_check=check_trace_conformance) -> int:
    if cfg.extra.get("random"):
        inputs = random_cases(cfg.extra["cases"], cfg.seed)
    else:
        try:
            inputs = [(read_log(cfg.log, sort_on_load=cfg.sort_on_load), read_model(cfg.model))]
        except INPUT_ERRORS as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT

    first = None
    count = checked = 0
    for log, model in inputs:
        checked += len(log) * len(model)
        for d in compare(log, model, engine_check):
            count += 1
            first = first or d
    if first is None:
        print(f"ok: engine and oracle agree on {checked} trace/constraint pairs")
        return EXIT_OK
    print(f"{count} disagreement(s) in {checked} trace/constraint pairs; first reproduction:")
    print(first.dump())
    return EXIT_VIOLATION


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpdc", description="MP-Declare conformance checking")
    sub = p.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("check", help="check a log against a model")
    c.add_argument("--log", required=True)
    c.add_argument("--model", required=True)
    c.add_argument("--out", default="-")
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--sort-on-load", action="store_true")
    c.add_argument("--fail-on-violation", action="store_true")

    g = sub.add_parser("gen", help="generate a synthetic log")
    g.add_argument("--traces", type=int, required=True)
    g.add_argument("--events", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help=".xes or .json")

    b = sub.add_parser("bench", help="time checks over a generated grid")
    b.add_argument("--grid", choices=sorted(GRIDS), default="default")
    b.add_argument("--out", default="-")
    b.add_argument("--reps", type=int, default=5)
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--families", default="cf,mp")
    b.add_argument("--traces", type=_int_list, default=None, help="override, e.g. 25000,50000")
    b.add_argument("--events", type=_int_list, default=None)
    b.add_argument("--constraints", type=_int_list, default=None)

    o = sub.add_parser("oracle-check", help="cross-validate the engine against the reference semantics")
    o.add_argument("--log")
    o.add_argument("--model")
    o.add_argument("--sort-on-load", action="store_true")
    o.add_argument("--random", action="store_true")
    o.add_argument("--cases", type=int, default=100)
    o.add_argument("--seed", type=int, default=0)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    workers = getattr(ns, "workers", None)
    cfg = RunConfig(
        subcommand=ns.subcommand,
        log=getattr(ns, "log", None),
        model=getattr(ns, "model", None),
        out=getattr(ns, "out", None),
        format=getattr(ns, "format", "json"),
        workers=default_workers() if workers is None else max(1, workers),
        sort_on_load=getattr(ns, "sort_on_load", False),
        fail_on_violation=getattr(ns, "fail_on_violation", False),
        seed=getattr(ns, "seed", 0),
    )
    if ns.subcommand == "gen":
        cfg.extra = {"traces": ns.traces, "events": ns.events}
    elif ns.subcommand == "bench":
        cfg.extra = {"grid": ns.grid, "reps": ns.reps, "families": ns.families.split(","),
                     "traces": ns.traces, "events": ns.events, "constraints": ns.constraints}
    elif ns.subcommand == "oracle-check":
        cfg.extra = {"random": ns.random, "cases": ns.cases}
    return cfg


COMMANDS = {"check": run_check, "gen": run_gen, "bench": run_bench, "oracle-check": run_oracle_check}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.subcommand == "oracle-check" and not ns.random and not (ns.log and ns.model):
        parser.error("oracle-check needs --log and --model, or --random")
    return COMMANDS[ns.subcommand](config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())

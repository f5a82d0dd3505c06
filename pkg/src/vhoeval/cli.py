"""Command-line interface: simulate, evaluate, reproduce, emit-defaults."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from vhoeval import __version__
from vhoeval.ahp import ahp_weights
from vhoeval.config import (
    FORMATS,
    TRAFFIC_CLASSES,
    ConfigError,
    RunConfig,
    _judgments,
    _Reader,
    default_config,
    default_parameter_judgments,
    dump_config,
    load_config,
    with_traffic_class,
)
from vhoeval.criticality import DEFAULT_PARAMETERS, EvaluationMatrix, evaluate
from vhoeval.errors import VhoevalError
from vhoeval.fixtures import bundled_fixture_paths, check_fixture, load_fixture
from vhoeval.report import criticality_artifact, render, reproduction_artifact, simulation_artifact
from vhoeval.simulator import ABNORMALITY_MODES, ScenarioSpec, run_seeds, summarize_metrics

log = logging.getLogger("vhoeval")

EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


def _resolve_config(args) -> RunConfig:
    if args.config:
        cfg = load_config(args.config)
        if args.traffic_class and args.traffic_class != cfg.traffic_class:
            cfg = with_traffic_class(cfg, args.traffic_class)
    else:
        cfg = default_config(args.traffic_class or "background")
    return cfg


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        cfg = replace(cfg, scenario=cfg.scenario.with_seed(args.seed))
    if args.runs is not None:
        cfg = replace(cfg, runs=args.runs)
    if args.epochs is not None:
        cfg = replace(cfg, scenario=ScenarioSpec(cfg.scenario.networks, args.epochs, cfg.scenario.seed))
    if args.abnormality:
        cfg = replace(cfg, abnormality=args.abnormality)
    w = ahp_weights(cfg.attribute_judgments.reorder(cfg.scenario.attribute_names))
    log.info("simulating %s runs x %s epochs, seed %s", cfg.runs, cfg.scenario.epochs, cfg.scenario.seed)
    runs = run_seeds(cfg.scenario, cfg.methods, w, cfg.runs, cfg.abnormality)
    art = simulation_artifact(cfg, runs, summarize_metrics(runs))
    _emit(render(art, args.format or cfg.output.format), args.out or cfg.output.path)
    return EXIT_OK


def _metrics_matrix(rows: list[tuple[str, float, float]], source: str) -> EvaluationMatrix:
    if not rows:
        raise ConfigError(f"{source}: no per-method mean rows")
    return EvaluationMatrix(
        tuple(r[0] for r in rows), DEFAULT_PARAMETERS, np.array([[r[1], r[2]] for r in rows])
    )


def _read_simulation_json(path: Path):
    try:
        art = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: malformed JSON: {exc.msg}") from exc
    if not isinstance(art, dict) or art.get("artifact") != "simulate":
        raise ConfigError(f"{path}: not a simulate artifact")
    try:
        rows = [(s["method"], float(s["abnormality_pct"]), float(s["handoff_pct"]))
                for s in art["summary"]]
        judg = _judgments(_Reader(str(path)), art["parameter_judgments"], "parameter_judgments")
        meta = dict(traffic_class=art["traffic_class"], config_hash=art["config_hash"], seed=art["seed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: malformed simulate artifact: {exc}") from exc
    return _metrics_matrix(rows, str(path)), judg, meta


def _read_simulation_csv(path: Path):
    with path.open(newline="", encoding="utf-8") as fh:
        records = list(csv.DictReader(fh))
    need = {"kind", "method", "abnormality_pct", "handoff_pct", "traffic_class", "seed", "config_hash"}
    if not records or not need <= set(records[0]):
        raise ConfigError(f"{path}: not a simulate CSV (need columns {sorted(need)})")
    rows, meta = [], {}
    for lineno, rec in enumerate(records, start=2):
        if rec["kind"] != "mean":
            continue
        try:
            rows.append((rec["method"], float(rec["abnormality_pct"]), float(rec["handoff_pct"])))
        except ValueError as exc:
            raise ConfigError(f"{path}: line {lineno}: {exc}") from exc
        meta = dict(traffic_class=rec["traffic_class"], config_hash=rec["config_hash"], seed=int(rec["seed"]))
    tc = meta.get("traffic_class")
    if tc not in TRAFFIC_CLASSES:
        raise ConfigError(f"{path}: unknown traffic class {tc!r}")
    return _metrics_matrix(rows, str(path)), default_parameter_judgments(tc), meta


def cmd_evaluate(args) -> int:
    path = Path(args.input)
    if not path.exists():
        raise ConfigError(f"{path}: no such file")
    if path.suffix == ".json":
        em, judg, meta = _read_simulation_json(path)
    elif path.suffix == ".csv":
        em, judg, meta = _read_simulation_csv(path)
    else:
        fx = load_fixture(path)
        em, judg = fx.matrix, fx.judgments
        meta = dict(traffic_class=fx.traffic_class, config_hash=None, seed=None)
    if args.config:
        cfg = _resolve_config(args)
        judg, meta["traffic_class"] = cfg.parameter_judgments, cfg.traffic_class
    elif args.traffic_class:
        judg, meta["traffic_class"] = default_parameter_judgments(args.traffic_class), args.traffic_class
    report = evaluate(em, judg, strict_eq3=args.strict_eq3)
    art = criticality_artifact(report, source=path.name, **meta)
    _emit(render(art, args.format or "table"), args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    paths = args.fixture or bundled_fixture_paths()
    checks = [check_fixture(load_fixture(p), strict_eq3=args.strict_eq3) for p in paths]
    art = reproduction_artifact(checks)
    _emit(render(art, args.format or "table"), args.out)
    for c in checks:
        for m in c.mismatches:
            print(f"mismatch: {m}", file=sys.stderr)
    return EXIT_OK if art["pass"] else EXIT_MISMATCH


def cmd_emit_defaults(args) -> int:
    _emit(dump_config(default_config(args.traffic_class or "background")), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vhoeval",
        description="Rank candidate networks, simulate handover decisions and "
        "score decision methods by criticality index.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", metavar="PATH", help="YAML run configuration")
        p.add_argument("--traffic-class", choices=TRAFFIC_CLASSES)
        p.add_argument("--format", choices=FORMATS)
        p.add_argument("--out", metavar="PATH", help="write here instead of stdout")

    p = sub.add_parser("simulate", help="run handover episodes for each method")
    common(p)
    p.add_argument("--seed", type=int, help="base seed (unsigned 64-bit), overrides config")
    p.add_argument("--runs", type=int, help="episodes per method, overrides config")
    p.add_argument("--epochs", type=int, help="decision epochs per episode, overrides config")
    p.add_argument("--abnormality", choices=ABNORMALITY_MODES,
                   help="'order': any survivor reorder counts; 'top': only a new top choice")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="criticality report from metrics or a fixture")
    p.add_argument("input", help="simulate artifact (.json/.csv) or fixture (.yaml)")
    common(p)
    p.add_argument("--strict-eq3", action="store_true",
                   help="normalise cost parameters as min/value")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("reproduce", help="check the bundled reference tables")
    p.add_argument("--fixture", action="append", metavar="PATH",
                   help="fixture file to check instead of the bundled set (repeatable)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--strict-eq3", action="store_true")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("emit-defaults", help="print the default configuration")
    p.add_argument("--traffic-class", choices=TRAFFIC_CLASSES)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_emit_defaults)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    logging.captureWarnings(True)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except (VhoevalError, ValueError, OSError) as exc:
        print(f"vhoeval: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

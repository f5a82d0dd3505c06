"""Artifact builders and table / CSV / JSON emitters.

Every artifact is first built as a plain dict (the JSON form, full float
precision).  The CSV and table emitters are views of that dict: CSV keeps
full precision via ``repr``, tables round indices to two decimals.
"""

from __future__ import annotations

import csv
import io
import json

from vhoeval import __version__
from vhoeval.config import RunConfig, config_hash, judgments_to_dict
from vhoeval.criticality import CriticalityReport
from vhoeval.fixtures import Check
from vhoeval.simulator import EpisodeMetrics, MethodSummary

SCHEMA_VERSION = 1
TOOL = "vhoeval"


def _meta(kind: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "artifact": kind, "tool": TOOL, "version": __version__}


def simulation_artifact(
    cfg: RunConfig, runs: list[EpisodeMetrics], summary: list[MethodSummary]
) -> dict:
    base_seed = cfg.scenario.seed
    return {
        **_meta("simulate"),
        "config_hash": config_hash(cfg),
        "seed": base_seed,
        "traffic_class": cfg.traffic_class,
        "epochs": cfg.scenario.epochs,
        "runs": cfg.runs,
        "abnormality": cfg.abnormality,
        "methods": [m.value for m in cfg.methods],
        "parameter_judgments": judgments_to_dict(cfg.parameter_judgments),
        "summary": [
            {
                "method": s.method.value,
                "abnormality_pct": s.abnormality_pct,
                "handoff_pct": s.handoff_pct,
                "runs": s.runs,
            }
            for s in summary
        ],
        "detail": [
            {
                "method": r.method.value,
                "run": (r.seed - base_seed) % 2**64,
                "seed": r.seed,
                "abnormality_pct": r.abnormality_pct,
                "handoff_pct": r.handoff_pct,
            }
            for r in runs
        ],
    }


def criticality_artifact(
    report: CriticalityReport,
    *,
    source: str,
    traffic_class: str | None = None,
    config_hash: str | None = None,
    seed: int | None = None,
) -> dict:
    em = report.evaluation
    names = em.parameter_names
    return {
        **_meta("evaluate"),
        "config_hash": config_hash,
        "seed": seed,
        "source": source,
        "traffic_class": traffic_class,
        "strict_eq3": report.strict_eq3,
        "algorithms": list(em.algorithms),
        "parameters": [{"name": p.name, "direction": p.direction.value} for p in em.parameters],
        "evaluation": em.values.tolist(),
        "normalized": report.normalized.tolist(),
        "criticality": report.criticality.tolist(),
        "weights": dict(zip(names, report.weights.weights)),
        "scale_divisor": report.scale_divisor,
        "criticality_index": dict(zip(em.algorithms, report.indices.tolist())),
        "recommended": list(report.recommended),
    }


def reproduction_artifact(checks: list[Check]) -> dict:
    reports = []
    for c in checks:
        art = criticality_artifact(
            c.report, source=c.fixture.name, traffic_class=c.fixture.traffic_class
        )
        del art["schema_version"], art["tool"], art["version"], art["artifact"]
        art["pass"] = c.passed
        art["mismatches"] = list(c.mismatches)
        reports.append(art)
    return {**_meta("reproduce"), "pass": all(c.passed for c in checks), "reports": reports}


# --- emitters ------------------------------------------------------------


def to_json(artifact: dict) -> str:
    return json.dumps(artifact, indent=2) + "\n"


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def _criticality_rows(art: dict, extra: dict) -> list[dict]:
    rows = []
    names = [p["name"] for p in art["parameters"]]
    for i, alg in enumerate(art["algorithms"]):
        row = dict(extra)
        row["algorithm"] = alg
        for j, name in enumerate(names):
            row[f"value_{name}"] = art["evaluation"][i][j]
            row[f"normalized_{name}"] = art["normalized"][i][j]
            row[f"level_{name}"] = art["criticality"][i][j]
            row[f"weight_{name}"] = art["weights"][name]
        row["scale_divisor"] = art["scale_divisor"]
        row["criticality_index"] = art["criticality_index"][alg]
        row["recommended"] = alg in art["recommended"]
        rows.append(row)
    return rows


def to_csv(artifact: dict) -> str:
    kind = artifact["artifact"]
    meta = {"tool_version": artifact["version"]}
    if kind == "simulate":
        meta.update(config_hash=artifact["config_hash"], traffic_class=artifact["traffic_class"])
        rows = [
            {"kind": "mean", "method": s["method"], "run": "", "seed": artifact["seed"],
             "abnormality_pct": s["abnormality_pct"], "handoff_pct": s["handoff_pct"], **meta}
            for s in artifact["summary"]
        ]
        rows += [
            {"kind": "run", "method": d["method"], "run": d["run"], "seed": d["seed"],
             "abnormality_pct": d["abnormality_pct"], "handoff_pct": d["handoff_pct"], **meta}
            for d in artifact["detail"]
        ]
        return _csv(rows)
    if kind == "evaluate":
        meta.update(config_hash=artifact["config_hash"] or "", seed=artifact["seed"] if artifact["seed"] is not None else "",
                    traffic_class=artifact["traffic_class"] or "", source=artifact["source"])
        return _csv(_criticality_rows(artifact, meta))
    rows = []
    for rep in artifact["reports"]:
        extra = {**meta, "traffic_class": rep["traffic_class"] or "", "source": rep["source"],
                 "pass": rep["pass"]}
        rows += _criticality_rows(rep, extra)
    return _csv(rows)


def _grid(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(out)


def _criticality_table(art: dict) -> str:
    names = [p["name"] for p in art["parameters"]]
    headers = ["algorithm"] + [f"{n} (value/level)" for n in names] + ["CI"]
    rows = []
    for i, alg in enumerate(art["algorithms"]):
        cells = [alg]
        for j in range(len(names)):
            cells.append(f"{art['evaluation'][i][j]:g} / {art['criticality'][i][j]}")
        mark = " *" if alg in art["recommended"] else ""
        cells.append(f"{art['criticality_index'][alg]:.2f}{mark}")
        rows.append(cells)
    weights = ", ".join(f"{k}={v:.3f}" for k, v in art["weights"].items())
    tail = [
        f"weights: {weights}",
        f"scale divisor n = {art['scale_divisor']}",
        f"recommended: {', '.join(art['recommended'])}",
    ]
    return _grid(headers, rows) + "\n" + "\n".join(tail)


def to_table(artifact: dict) -> str:
    kind = artifact["artifact"]
    if kind == "simulate":
        head = (f"{TOOL} {artifact['version']}  traffic={artifact['traffic_class']}  "
                f"seed={artifact['seed']}  epochs={artifact['epochs']}  runs={artifact['runs']}  "
                f"config={artifact['config_hash'][:12]}")
        rows = [[s["method"], f"{s['abnormality_pct']:.2f}", f"{s['handoff_pct']:.2f}"]
                for s in artifact["summary"]]
        return head + "\n" + _grid(["method", "abnormality %", "handoffs %"], rows) + "\n"
    if kind == "evaluate":
        head = f"{TOOL} {artifact['version']}  source={artifact['source']}"
        if artifact["traffic_class"]:
            head += f"  traffic={artifact['traffic_class']}"
        if artifact["seed"] is not None:
            head += f"  seed={artifact['seed']}"
        return head + "\n" + _criticality_table(artifact) + "\n"
    parts = []
    for rep in artifact["reports"]:
        status = "PASS" if rep["pass"] else "FAIL"
        block = [f"[{status}] {rep['source']}", _criticality_table(rep)]
        block += [f"  mismatch: {m}" for m in rep["mismatches"]]
        parts.append("\n".join(block))
    verdict = "all reference tables reproduced" if artifact["pass"] else "reproduction FAILED"
    return f"{TOOL} {artifact['version']}\n" + "\n\n".join(parts) + f"\n\n{verdict}\n"


EMITTERS = {"json": to_json, "csv": to_csv, "table": to_table}


def render(artifact: dict, fmt: str) -> str:
    return EMITTERS[fmt](artifact)

"""Exit criteria.  Each test prints one PASS/FAIL line; run with ``-s`` to see them.

    pytest tests/test_acceptance.py -v -s
"""

import json
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from vhoeval import (
    AttributeSpec,
    DecisionMatrix,
    Direction,
    Method,
    Network,
    ScenarioSpec,
    WeightVector,
    ahp_weights,
    criticality_level,
    evaluate,
    heterogeneous_scenario,
    rank,
    run_episode,
)
from vhoeval.config import default_config
from vhoeval.criticality import DEFAULT_PARAMETERS
from vhoeval.fixtures import bundled_fixture_paths, check_fixture, load_fixture

CLASSES = ("background", "conversational", "interactive", "streaming")
CI_TOL = 0.05
WEIGHT_TOL = 0.001
INSTANCES = 1000

EXPECTED_LEVELS = {
    "background": [[1, 1], [7, 1], [5, 3]],
    "conversational": [[1, 1], [5, 3], [3, 3]],
    "interactive": [[1, 1], [5, 3], [3, 1]],
    "streaming": [[1, 1], [5, 1], [5, 1]],
}
EXPECTED_CI = {
    "background": (14.29, 57.14, 57.14),
    "conversational": (20.00, 70.00, 60.00),
    "interactive": (20.00, 66.67, 26.67),
    "streaming": (20.00, 30.00, 30.00),
}
EXPECTED_WEIGHTS = {
    "background": (0.5, 0.5),
    "conversational": (0.250, 0.750),
    "interactive": (0.167, 0.833),
    "streaming": (0.125, 0.875),
}
MEASURED = {
    "background": [[50, 70], [20, 80], [30, 60]],
    "conversational": [[36, 80], [18, 60], [27, 60]],
    "interactive": [[42, 70], [25, 60], [33, 80]],
    "streaming": [[60, 60], [30, 70], [30, 60]],
}


def verdict(label, ok, detail=""):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {label}" + (f" ({detail})" if detail else ""))
    assert ok, f"{label}: {detail}"


@pytest.fixture(scope="module")
def fixtures():
    return {p.stem: load_fixture(p) for p in bundled_fixture_paths()}


@pytest.fixture(scope="module")
def reports(fixtures):
    return {cls: check_fixture(fixtures[cls]).report for cls in CLASSES}


# 1 ----------------------------------------------------------------------------


def test_criterion_1_reference_tables(fixtures):
    start = time.perf_counter()
    problems = []
    for cls in CLASSES:
        fx = fixtures[cls]
        np.testing.assert_array_equal(fx.matrix.values, MEASURED[cls])
        rep = evaluate(fx.matrix, fx.judgments)
        if rep.criticality.tolist() != EXPECTED_LEVELS[cls]:
            problems.append(f"{cls} criticality {rep.criticality.tolist()}")
        if not np.allclose(rep.indices, EXPECTED_CI[cls], atol=CI_TOL, rtol=0):
            problems.append(f"{cls} CI {np.round(rep.indices, 2).tolist()}")
    elapsed = time.perf_counter() - start
    if elapsed >= 1.0:
        problems.append(f"runtime {elapsed:.3f}s")
    verdict("criterion 1: four reference tables reproduced", not problems,
            "; ".join(problems) or f"{elapsed * 1000:.1f} ms")


# 2 ----------------------------------------------------------------------------


def test_criterion_2_ahp_weights(fixtures):
    problems = []
    for cls in CLASSES:
        w = ahp_weights(fixtures[cls].judgments).weights
        if not np.allclose(w, EXPECTED_WEIGHTS[cls], atol=WEIGHT_TOL, rtol=0):
            problems.append(f"{cls}: {w}")
    verdict("criterion 2: AHP weights within 0.001", not problems, "; ".join(problems))


# 3 ----------------------------------------------------------------------------


def test_criterion_3_gra_leads_every_class(reports):
    losers = [cls for cls, rep in reports.items() if "GRA" not in rep.recommended]
    detail = ", ".join(f"{c}: {'/'.join(r.recommended)}" for c, r in reports.items())
    verdict("criterion 3: GRA holds the maximum index in all classes", not losers, detail)


# 4 ----------------------------------------------------------------------------


def _simulate_bytes(tmp_path, name):
    out = tmp_path / name
    cmd = [sys.executable, "-m", "vhoeval.cli", "simulate", "--seed", "4242",
           "--runs", "3", "--epochs", "300", "--format", "json", "--out", str(out)]
    subprocess.run(cmd, check=True)
    return out.read_bytes()


def test_criterion_4_simulation_properties(tmp_path):
    problems = []
    a = _simulate_bytes(tmp_path, "a.json")
    b = _simulate_bytes(tmp_path, "b.json")
    if a != b:
        problems.append("two process invocations differ")
    assert json.loads(a)["seed"] == 4242

    w = ahp_weights(default_config("background").attribute_judgments)
    start = time.perf_counter()
    lo_hi = []
    for seed in range(100):
        s = heterogeneous_scenario(epochs=1000, seed=seed)
        for method in Method:
            r = run_episode(s, method, w)
            lo_hi.append((r.abnormality_pct, r.handoff_pct))
    elapsed = time.perf_counter() - start
    arr = np.array(lo_hi)
    if not np.all((arr >= 0) & (arr <= 100)):
        problems.append("percentage out of [0, 100]")
    if elapsed >= 30:
        problems.append(f"runtime {elapsed:.1f}s")

    fixed = tuple(
        Network(f"n{i}", (AttributeSpec.fixed("x", v, Direction.BENEFIT),
                          AttributeSpec.fixed("y", 10 - v, Direction.COST)))
        for i, v in enumerate((2, 5, 7, 9))
    )
    for method in Method:
        r = run_episode(ScenarioSpec(fixed, 100, 1), method, WeightVector((0.5, 0.5)))
        if r.handoff_pct != 0:
            problems.append(f"fixed scenario handoffs {method.value}={r.handoff_pct}")

    pair = tuple(
        Network(name, (AttributeSpec.uniform("x", 1, 10, Direction.BENEFIT),
                       AttributeSpec.uniform("y", 1, 10, Direction.COST)))
        for name in ("a", "b")
    )
    for method in Method:
        r = run_episode(ScenarioSpec(pair, 500, 3), method, WeightVector((0.5, 0.5)))
        if r.abnormality_pct != 0:
            problems.append(f"2-alternative abnormality {method.value}={r.abnormality_pct}")

    verdict("criterion 4: simulation determinism, bounds, degenerate cases", not problems,
            "; ".join(problems) or f"300 episodes x 1000 epochs in {elapsed:.1f}s")


# 5 ----------------------------------------------------------------------------


def _matrix(values, benefit):
    attrs = tuple(
        AttributeSpec(f"a{j}", direction=Direction.BENEFIT if b else Direction.COST)
        for j, b in enumerate(benefit)
    )
    return DecisionMatrix(tuple(f"n{i}" for i in range(len(values))), attrs, values)


def _instance(rng):
    n = int(rng.integers(3, 7))
    m = int(rng.integers(2, 7))
    values = rng.integers(1, 1001, size=(n, m)).astype(float)
    benefit = rng.random(m) < 0.5
    w = WeightVector.normalized(rng.integers(1, 21, size=m))
    return values, benefit, w


def _distinct(scores):
    return np.diff(np.sort(scores)).min() > 1e-9


def _property_failures(method, rng):
    fails = {"dominance": 0, "permutation": 0, "scaling": 0, "ties": 0}
    for _ in range(INSTANCES):
        values, benefit, w = _instance(rng)
        base = rank(_matrix(values, benefit), w, method)

        # dominance: row a made weakly better than b, strictly on one column
        a, b = rng.choice(len(values), size=2, replace=False)
        dom = values.copy()
        for j in range(dom.shape[1]):
            dom[a, j] = max(dom[a, j], dom[b, j]) if benefit[j] else min(dom[a, j], dom[b, j])
        j = int(rng.integers(dom.shape[1]))
        dom[a, j] = dom[b, j] + 5 if benefit[j] else dom[b, j] / 2
        r = rank(_matrix(dom, benefit), w, method)
        if not r.order.index(a) < r.order.index(b):
            fails["dominance"] += 1

        # row permutation
        perm = rng.permutation(len(values))
        r = rank(_matrix(values[perm], benefit), w, method)
        if not np.allclose(r.scores, base.scores[perm], rtol=1e-9, atol=1e-12):
            fails["permutation"] += 1
        elif _distinct(base.scores) and [perm[i] for i in r.order] != list(base.order):
            fails["permutation"] += 1

        # positive scaling of one column
        k = rng.uniform(0.01, 100)
        col = int(rng.integers(values.shape[1]))
        scaled = values.copy()
        scaled[:, col] *= k
        r = rank(_matrix(scaled, benefit), w, method)
        if method is Method.TOPSIS and not np.allclose(r.scores, base.scores, rtol=1e-9, atol=1e-12):
            fails["scaling"] += 1
        elif _distinct(base.scores) and r.order != base.order:
            fails["scaling"] += 1

        # duplicated row ties break towards the lower index
        src = int(rng.integers(len(values)))
        dup = np.vstack([values, values[src]])
        r = rank(_matrix(dup, benefit), w, method)
        last = len(dup) - 1
        if r.scores[src] != r.scores[last] or r.order.index(src) > r.order.index(last):
            fails["ties"] += 1
    return fails


def test_criterion_5_ranker_properties():
    golden = json.loads((Path(__file__).parent / "golden" / "ranker_3x2.json").read_text())
    problems = []
    for method in Method:
        g = rank(_matrix(np.array(golden["values"], float), golden["benefit"]),
                 WeightVector(tuple(golden["weights"])), method)
        expected = oracles.SCORERS[method.value](golden["values"], golden["benefit"], golden["weights"])
        if not (np.allclose(g.scores, golden[method.value], atol=1e-9, rtol=0)
                and np.allclose(g.scores, expected, atol=1e-9, rtol=0)):
            problems.append(f"{method.value} golden {g.scores.tolist()}")
        fails = _property_failures(method, np.random.default_rng(2012))
        problems += [f"{method.value} {k}: {v} failures" for k, v in fails.items() if v]
    verdict(f"criterion 5: ranker properties over {INSTANCES} instances per ranker, golden 3x2",
            not problems, "; ".join(problems))


# 6 ----------------------------------------------------------------------------


def test_criterion_6_band_mapping_cells():
    mismatches = []
    for cls in CLASSES:
        v = np.array(MEASURED[cls], dtype=float)
        colmax = v.max(axis=0)
        for i in range(3):
            for j in range(2):
                got = criticality_level(v[i, j] / colmax[j], DEFAULT_PARAMETERS[j].direction)
                if got != EXPECTED_LEVELS[cls][i][j]:
                    mismatches.append(f"{cls}[{i}][{j}]={got}")
    strict_edge = criticality_level(20 / 50, "cost") == 7
    verdict("criterion 6: 24 band-mapping cells incl. d=0.4 -> 7",
            not mismatches and strict_edge, ", ".join(mismatches))

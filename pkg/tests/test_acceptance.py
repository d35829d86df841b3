"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly as a script.
All checks use exact equality on integer-valued data.
"""
from __future__ import annotations

import functools
import time

import numpy as np

from oracles import closure_floyd_warshall
from tropkernel.instances import (
    ConcaveGrid,
    example7_kernel_bounds,
    example7_window,
    full_kx,
    nonincreasing_chain,
    order_indicator,
    random_metric,
    random_semimetric,
    random_span,
)
from tropkernel.nuclearity import nuclear_decompose_identity
from tropkernel.operator import (
    IntegralOperator,
    distributes_over_sups,
    identity_is_integral,
    is_integral,
    max_kernel,
    sup_operators,
)
from tropkernel.semimetric import (
    lip0_generators,
    lip_membership,
    lower_ideal_check,
    star_closure,
    validate_semimetric,
)
from tropkernel.semimodule import WEDGE_CLOSED, Semimodule, admissible, membership
from tropkernel.semiring import NEG_INF, POS_INF, RMAX, leq, odot, oplus, residual
from tropkernel.theorems import check_theorem, kernel_theorem_holds

SEED = 20240601
TIME_LIMIT = 10.0


RESULTS: list[str] = []


def report(number: int, title: str, failures: int, detail: str, started: float) -> None:
    elapsed = time.perf_counter() - started
    verdict = "PASS" if failures == 0 and elapsed < TIME_LIMIT else "FAIL"
    line = (f"[acceptance {number}] {verdict}  {title}: {detail}; "
            f"failures={failures}; {elapsed:.2f}s")
    RESULTS.append(line)
    print(line)
    assert failures == 0, line
    assert elapsed < TIME_LIMIT, line


def guarded(number: int, title: str):
    """Record a FAIL line when a criterion dies with an exception before reporting."""
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            started = time.perf_counter()
            try:
                fn()
            except AssertionError:
                raise
            except Exception as exc:
                report(number, title, 1, f"error {type(exc).__name__}: {exc}", started)
        return run
    return wrap


def random_elements(rng, size):
    v = rng.integers(-100, 101, size=size).astype(float)
    u = rng.random(size)
    v[u < 0.08] = NEG_INF
    v[u > 0.95] = POS_INF
    return v


@guarded(1, "semiring laws")
def test_criterion_1_semiring_laws():
    started = time.perf_counter()
    rng = np.random.default_rng(SEED)
    triples = random_elements(rng, (10_000, 3))
    failures = 0
    for a, b, c in triples.tolist():
        ok = (oplus(a, a) == a
              and oplus(oplus(a, b), c) == oplus(a, oplus(b, c))
              and odot(odot(a, b), c) == odot(a, odot(b, c))
              and odot(a, oplus(b, c)) == oplus(odot(a, b), odot(a, c))
              and odot(oplus(a, b), c) == oplus(odot(a, c), odot(b, c))
              and leq(odot(a, c), b) == leq(c, residual(a, b, RMAX)))
        failures += not ok
    report(1, "semiring laws", failures, "10000 triples in rmax-complete", started)


@guarded(2, "closure vs path oracle")
def test_criterion_2_closure_oracle():
    started = time.perf_counter()
    rng = np.random.default_rng(SEED + 2)
    failures = positive = 0
    for _ in range(500):
        n = int(rng.integers(1, 7))
        m = rng.integers(-9, 10, size=(n, n)).astype(float)
        m[rng.random((n, n)) < 0.35] = NEG_INF
        d = star_closure(m)
        expected = np.array(closure_floyd_warshall(m.tolist()))
        positive += bool(np.any(expected == POS_INF))
        failures += not (np.array_equal(d.matrix, expected) and validate_semimetric(d.matrix).valid)
    report(2, "closure vs path oracle", failures,
           f"500 matrices, {positive} with positive cycles", started)


def admissible_wedge_instances(rng, count):
    found = []
    while len(found) < count:
        n = int(rng.integers(2, 6))
        m = int(rng.integers(1, 5))
        V = random_span(n, m, seed=int(rng.integers(1 << 31)), closure=WEDGE_CLOSED,
                        p_zero=0.25, p_top=0.1)
        if admissible(V):
            found.append(V)
    return found


@guarded(3, "kernel rows A(d_x) on admissible wedge-closed modules")
def test_criterion_3_wedge_kernel_reconstruction():
    started = time.perf_counter()
    rng = np.random.default_rng(SEED + 3)
    failures = with_top = 0
    for V in admissible_wedge_instances(rng, 200):
        with_top += bool(np.any(V.generators == POS_INF))
        k_out = int(rng.integers(1, 4))
        kern = rng.integers(-5, 6, size=(V.n_points, k_out)).astype(float)
        kern[rng.random(kern.shape) < 0.3] = NEG_INF
        A = IntegralOperator(kern, V.ground)
        res = max_kernel(A, V, 64, rng)
        probes = np.vstack([V.generators, V.sample(rng, 64)])
        rebuilt = IntegralOperator(res.kernel, V.ground)
        same = all(np.array_equal(rebuilt.apply(f), A.apply(f)) for f in probes)
        failures += not (res.verified and same)
    report(3, "kernel rows A(d_x) on admissible wedge-closed modules", failures,
           f"200 instances ({with_top} with top values), 64 probes each", started)


def lip0_representation(rng, d):
    """The lip0 span of ``d`` presented by random combinations of its rows."""
    n = len(d)
    c = rng.integers(-3, 4, size=(n + 2, n)).astype(float)
    c[rng.random(c.shape) < 0.5] = NEG_INF
    extra = [lip0_generators(d).combine(row) for row in c]
    gens = np.vstack([d.matrix, extra])
    return Semimodule(gens[rng.permutation(len(gens))], d.ground)


@guarded(4, "semimetric <-> module round trip")
def test_criterion_4_semimetric_round_trip():
    started = time.perf_counter()
    rng = np.random.default_rng(SEED + 4)
    failures = 0
    converse = 0
    for t in range(200):
        n = int(rng.integers(2, 7))
        d = random_semimetric(n, seed=int(rng.integers(1 << 31)))
        res = identity_is_integral(lip0_generators(d), 64, rng)
        failures += not (res.verified and np.array_equal(res.kernel, d.matrix))

        # converse direction on a b-closed span: half random, half re-presented lip0 spans
        if t % 2:
            V = random_span(int(rng.integers(2, 5)), int(rng.integers(1, 5)),
                            seed=int(rng.integers(1 << 31)))
        else:
            V = lip0_representation(rng, d)
        res = identity_is_integral(V, 64, rng)
        if not res.verified:
            continue
        converse += 1
        k = res.kernel
        rows_span = Semimodule(k, V.ground)
        ok = (validate_semimetric(k).valid
              and all(membership(row, V).member for row in k)
              and all(membership(g, rows_span).member for g in V.generators))
        failures += not ok
    report(4, "semimetric <-> module round trip", failures,
           f"200 semimetrics, converse on {converse} spans with integral identity",
           started)


def fixture_catalogue():
    yield "full-KX(3)", full_kx(3)
    for seed in (1, 2, 3):
        yield f"lip(random-metric seed={seed})", lip0_generators(random_metric(4, seed=seed))
    yield "nonincreasing-chain(4)", nonincreasing_chain(4)


@guarded(5, "integral <-> nuclear <-> kernel theorem")
def test_criterion_5_nuclear_consistency():
    started = time.perf_counter()
    rng = np.random.default_rng(SEED + 5)
    disagreements = 0
    names = []
    for name, V in fixture_catalogue():
        names.append(name)
        dec = nuclear_decompose_identity(V, rng=rng)
        integral = identity_is_integral(V, 64, rng).verified
        kt, _ = kernel_theorem_holds(V, rng, 6, 64)
        verdicts = [check_theorem(t, V, rng, trials=8)["verdict"] for t in ("2", "3", "3a", "5")]
        if not (dec.verified and integral == dec.verified == kt and set(verdicts) == {"PASS"}):
            disagreements += 1
    report(5, "integral <-> nuclear <-> kernel theorem", disagreements,
           f"{len(names)} fixtures", started)


@guarded(6, "windowed two-coordinate functional is not integral")
def test_criterion_6_windowed_functional():
    started = time.perf_counter()
    failures = 0
    at_zero = []
    for n in (5, 10, 50):
        V, phi = example7_window(n)
        if is_integral(phi, V, 64, np.random.default_rng(n)):
            failures += 1
        bound = example7_kernel_bounds(V, phi, x="0")[-1][1]
        cand = max_kernel(phi, V, 64, np.random.default_rng(n)).kernel[V.ground.index("0"), 0]
        failures += not (bound <= -n and cand <= bound)
        at_zero.append(bound)
    failures += not all(b < a for a, b in zip(at_zero, at_zero[1:]))
    report(6, "windowed two-coordinate functional is not integral", failures,
           f"windows 5/10/50, kernel bound at 0 = {[int(b) for b in at_zero]}", started)


@guarded(7, "hull addition breaks evaluation at the middle point")
def test_criterion_7_concave_witness():
    started = time.perf_counter()
    grid = ConcaveGrid((0, 1, 2))
    f, g = grid.witness_pair()
    joined = grid.oplus(f, g)
    ok = (joined[1] == 0.0 and max(f[1], g[1]) == -5.0 and grid.contains(f) and grid.contains(g))
    report(7, "hull addition breaks evaluation at the middle point", int(not ok),
           f"oplus(f,g)(1) = {joined[1]:g}, max(f,g)(1) = {max(f[1], g[1]):g}", started)


@guarded(8, "non-strict indicator is a semimetric, strict is not")
def test_criterion_8_order_indicators():
    started = time.perf_counter()
    failures = 0
    for n in range(2, 7):
        ground, m = order_indicator(n, strict=False)
        failures += not validate_semimetric(m, ground).valid
        ground, m = order_indicator(n, strict=True)
        ok, witness = validate_semimetric(m, ground)
        adjacent = witness is not None and int(witness[0]) - int(witness[1]) == 1
        failures += not (not ok and adjacent)
    report(8, "non-strict indicator is a semimetric, strict is not", failures,
           "chains of size 2..6, strict witness = adjacent pair", started)


@guarded(9, "sup commutation / b-linearity / lower ideal")
def test_criterion_9_randomized_propositions():
    started = time.perf_counter()
    rng = np.random.default_rng(SEED + 9)
    fail_sup = fail_lin = fail_ideal = 0
    for _ in range(200):
        # pointwise supremum of operators commutes with application and stays linear
        n, k = int(rng.integers(2, 6)), int(rng.integers(1, 4))
        ops = [IntegralOperator(np.where(rng.random((n, k)) < 0.3, NEG_INF,
                                         rng.integers(-5, 6, size=(n, k))))
               for _ in range(int(rng.integers(1, 5)))]
        S = sup_operators(ops)
        F = np.where(rng.random((4, n)) < 0.2, NEG_INF, rng.integers(-5, 6, size=(4, n)))
        c = rng.integers(-3, 4, size=4).astype(float)
        ok = all(np.array_equal(S.apply(f), np.max([A.apply(f) for A in ops], axis=0)) for f in F)
        fail_sup += not (ok and distributes_over_sups(S, F, c))

        # integral operators are b-linear on b-closed spans
        V = random_span(n, int(rng.integers(1, 5)), seed=int(rng.integers(1 << 31)))
        A = IntegralOperator(rng.integers(-5, 6, size=(n, k)).astype(float), V.ground)
        fail_lin += not distributes_over_sups(A, V.sample(rng, 4), c)

        # lip0 spans contain every lip function below one of their elements
        d = random_semimetric(n, seed=int(rng.integers(1 << 31)))
        W = lip0_representation(rng, d)
        res = lower_ideal_check(W, d, 5, rng)
        below = W.sample(rng, 1)[0] - rng.integers(0, 3)
        fail_ideal += not (res.ok and lip_membership(d.matrix[0], d)
                           and membership(W.project(below), W).member)
    failures = fail_sup + fail_lin + fail_ideal
    report(9, "sup commutation / b-linearity / lower ideal", failures,
           f"200 trials each (failures {fail_sup}/{fail_lin}/{fail_ideal})", started)


CRITERIA = [
    test_criterion_1_semiring_laws,
    test_criterion_2_closure_oracle,
    test_criterion_3_wedge_kernel_reconstruction,
    test_criterion_4_semimetric_round_trip,
    test_criterion_5_nuclear_consistency,
    test_criterion_6_windowed_functional,
    test_criterion_7_concave_witness,
    test_criterion_8_order_indicators,
    test_criterion_9_randomized_propositions,
]


if __name__ == "__main__":
    failed = 0
    for criterion in CRITERIA:
        try:
            criterion()
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)

"""Executable checks of the kernel and nuclearity theorems on finite instances.

Each ``check_theoremN`` returns a report dict::

    {"theorem": "4", "instance": "...", "verdict": "PASS",
     "witnesses": [...], "details": {...}}

``FAIL`` always comes with at least one witness.  ``PRECONDITION_FAILED``
means the instance lies outside the theorem's hypotheses; the witness names
the failed hypothesis and nothing is concluded about the equivalence.

Quantifiers over "all b-linear maps" are sampled: random integral
operators, random tabulated operators that pass the consistency probe, and
the identity.
"""
from __future__ import annotations

import numpy as np

from .nuclearity import (
    DeltaFamily,
    compose_nuclear,
    decomposition_from_kernel,
    i_delta_embed,
    injective_on,
    nuclear_decompose_identity,
)
from .operator import (
    DEFAULT_PROBES,
    IntegralOperator,
    LinearOperator,
    TabulatedOperator,
    identity_is_integral,
    is_integral,
    max_kernel,
)
from .semimetric import Semimetric, lip0_generators, validate_semimetric
from .semimodule import WEDGE_CLOSED, GroundSet, Semimodule, admissible, membership, nondegenerate
from .semiring import NEG_INF, identity

THEOREM_IDS = ("1", "2", "3", "3a", "4", "5")


PASS = "PASS"
FAIL = "FAIL"
PRECONDITION_FAILED = "PRECONDITION_FAILED"


def _report(theorem: str, instance: str, witnesses: list, details: dict,
            precondition_ok: bool = True) -> dict:
    verdict = PRECONDITION_FAILED if not precondition_ok else (FAIL if witnesses else PASS)
    return {
        "theorem": theorem,
        "instance": instance,
        "verdict": verdict,
        "witnesses": witnesses,
        "details": details,
    }


def random_kernel(rng: np.random.Generator, n_in: int, n_out: int, p_zero: float = 0.3) -> np.ndarray:
    k = rng.integers(-5, 6, size=(n_in, n_out)).astype(float)
    k[rng.random(k.shape) < p_zero] = NEG_INF
    return k


def random_integral_operator(V: Semimodule, rng: np.random.Generator, n_out: int = 3) -> IntegralOperator:
    return IntegralOperator(random_kernel(rng, V.n_points, n_out), V.ground,
                            GroundSet.range(n_out), V.semiring)


def random_tabulated_operators(V: Semimodule, rng: np.random.Generator, count: int,
                               n_out: int = 1, attempts: int = 20) -> list[TabulatedOperator]:
    """Random tables on the generators that pass the consistency probe (spans only)."""
    found: list[TabulatedOperator] = []
    if V.closure == WEDGE_CLOSED:
        return found
    for _ in range(attempts):
        if len(found) >= count:
            break
        vals = random_kernel(rng, V.n_generators, n_out)
        A = TabulatedOperator(V, vals)
        if A.check_consistency(rng):
            found.append(A)
    return found


def functional_probe_family(V: Semimodule, rng: np.random.Generator, count: int = 4) -> list[LinearOperator]:
    """δ_x for every point, random integral functionals read back as tables, random tables."""
    fam: list[LinearOperator] = [IntegralOperator.delta(x, V.ground, V.semiring)
                                 for x in range(V.n_points)]
    for _ in range(count):
        phi = random_integral_operator(V, rng, 1)
        fam.append(phi if V.closure == WEDGE_CLOSED
                   else TabulatedOperator(V, phi.apply_many(V.generators)))
    fam.extend(random_tabulated_operators(V, rng, count))
    return fam


def all_functionals_integral(V: Semimodule, rng, n_probes: int) -> tuple[bool, list]:
    bad = []
    for j, phi in enumerate(functional_probe_family(V, rng)):
        if isinstance(phi, TabulatedOperator) and not phi.check_consistency(rng):
            continue
        if not is_integral(phi, V, n_probes, rng):
            bad.append({"functional": j, "repr": repr(phi)})
    return not bad, bad


def kernel_theorem_holds(V: Semimodule, rng, trials: int, n_probes: int) -> tuple[bool, list]:
    """The identity (kernel rows in ``V``) plus sampled b-linear maps all integral."""
    bad = []
    ident = identity_is_integral(V, n_probes, rng)
    if not ident.verified:
        bad.append({"operator": "identity", **(ident.witness or {})})
    for A in random_tabulated_operators(V, rng, trials, n_out=2):
        if not is_integral(A, V, n_probes, rng):
            bad.append({"operator": repr(A), "values": A.values})
    return not bad, bad


# ---------------------------------------------------------------------------


def check_theorem1(V: Semimodule, rng, trials: int = 20, n_probes: int = DEFAULT_PROBES,
                   name: str = "") -> dict:
    """Every b-linear map on an admissible ∧-closed module is integral with rows ``A(d_x)``."""
    details = {"closure": V.closure, "admissible": admissible(V),
               "unit_points": list(V.unit_points)}
    if V.closure != WEDGE_CLOSED or not details["admissible"]:
        return _report("1", name, [{"reason": "precondition", **details}], details, False)
    witnesses = []
    for t in range(trials):
        A = random_integral_operator(V, rng)
        res = max_kernel(A, V, n_probes, rng)
        if not res.verified:
            witnesses.append({"trial": t, "kernel": A.kernel, **res.witness})
    details["operators_checked"] = trials
    return _report("1", name, witnesses, details)


def check_theorem2(V: Semimodule, A: LinearOperator | None = None, rng=None, trials: int = 20,
                   n_probes: int = DEFAULT_PROBES, name: str = "") -> dict:
    """With all functionals integral: integral ⇔ nuclear, for ``A`` and sampled maps."""
    rng = rng if rng is not None else np.random.default_rng(0)
    pre, pre_bad = all_functionals_integral(V, rng, n_probes)
    details = {"precondition_all_functionals_integral": pre}
    if not pre:
        return _report("2", name, [{"reason": "precondition", "non_integral": pre_bad}], details,
                       False)
    # (operator, module its kernel rows must lie in); the identity maps into V
    ops = [(A, None)] if A is not None else [(IntegralOperator.identity(V.ground, V.semiring), V)]
    ops += [(random_integral_operator(V, rng), None) for _ in range(trials)]
    ops += [(T, None) for T in random_tabulated_operators(V, rng, max(1, trials // 4), n_out=2)]
    witnesses = []
    outcomes = []
    for j, (op, target) in enumerate(ops):
        res = max_kernel(op, V, n_probes, rng, target)
        T = decomposition_from_kernel(res.kernel, V, op.codomain)
        nuclear = _decomposition_matches(T, op, V, rng, n_probes, target)
        outcomes.append({"operator": j, "integral": res.verified, "nuclear": nuclear})
        if res.verified != nuclear:
            witnesses.append(outcomes[-1])
    details["operators_checked"] = len(outcomes)
    details["integral"] = outcomes[0]["integral"]
    details["nuclear"] = outcomes[0]["nuclear"]
    return _report("2", name, witnesses, details)


def _decomposition_matches(T, op: LinearOperator, V: Semimodule, rng, n_probes: int,
                           target: Semimodule | None = None) -> bool:
    """Whether ``T`` reproduces ``op``; with a ``target``, its terms must map into it."""
    if target is not None and not all(membership(t.target, target).member for t in T.terms):
        return False
    if isinstance(op, TabulatedOperator):
        coeffs = np.vstack([identity(V.n_generators), op.probe_coefficients,
                            V.sample_coefficients(rng, n_probes)])
        vectors = np.array([V.combine(c) for c in coeffs])
        expected = np.array([op.apply_coefficients(c) for c in coeffs])
        return bool(np.array_equal(T.apply_many(vectors), expected))
    ok, _ = T.verify(op, rng, n_probes)
    return ok


def check_theorem3(V: Semimodule, rng=None, trials: int = 10, n_probes: int = DEFAULT_PROBES,
                   name: str = "") -> dict:
    """Kernel theorem ⇔ (every functional integral and the identity nuclear)."""
    rng = rng if rng is not None else np.random.default_rng(0)
    kt, kt_bad = kernel_theorem_holds(V, rng, trials, n_probes)
    fun, fun_bad = all_functionals_integral(V, rng, n_probes)
    dec = nuclear_decompose_identity(V, rng=rng, n_probes=n_probes)
    details = {"kernel_theorem": kt, "functionals_integral": fun, "identity_nuclear": dec.verified}
    witnesses = []
    if kt != (fun and dec.verified):
        witnesses.append({"kernel_theorem_failures": kt_bad, "functional_failures": fun_bad,
                          "decomposition": dec.witness})
    return _report("3", name, witnesses, details)


def check_theorem3a(V: Semimodule, rng=None, trials: int = 10, n_probes: int = DEFAULT_PROBES,
                    name: str = "") -> dict:
    """Kernel theorem ⇔ identity integral."""
    rng = rng if rng is not None else np.random.default_rng(0)
    ident = identity_is_integral(V, n_probes, rng).verified
    kt, kt_bad = kernel_theorem_holds(V, rng, trials, n_probes)
    details = {"identity_integral": ident, "kernel_theorem": kt}
    witnesses = [] if ident == kt else [{"non_integral_maps": kt_bad}]
    return _report("3a", name, witnesses, details)


def check_theorem4(instance: Semimodule | Semimetric, rng=None, n_probes: int = DEFAULT_PROBES,
                   name: str = "") -> dict:
    """Semimetric ↔ kernel-theorem module round trip.

    Given a semimetric ``d``: the span of its rows has an integral identity and
    ``d`` reproduces it (maximal kernel equal to ``d`` when reflexive).  Given a
    span ``V``: if the identity is integral its maximal kernel is a semimetric
    whose rows span exactly ``V``.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    witnesses: list = []
    if isinstance(instance, Semimetric):
        d = instance
        V = lip0_generators(d)
        res = identity_is_integral(V, n_probes, rng)
        d_is_kernel = decomposition_from_kernel(d.matrix, V, V.ground).verify(None, rng, n_probes)[0]
        details = {"direction": "semimetric->module", "reflexive": d.reflexive,
                   "identity_integral": res.verified, "d_is_kernel": d_is_kernel}
        if not (res.verified and d_is_kernel):
            witnesses.append({"identity": res.witness})
        if d.reflexive and not np.array_equal(res.kernel, d.matrix):
            bad = np.argwhere(res.kernel != d.matrix)[0]
            witnesses.append({"kernel_differs_at": [d.ground.labels[i] for i in bad]})
        if not d.reflexive and not np.all(res.kernel >= d.matrix):
            witnesses.append({"kernel_below_d": True})
        return _report("4", name, witnesses, details)

    V = instance
    nondeg, _ = nondegenerate(V)
    res = identity_is_integral(V, n_probes, rng)
    details = {"direction": "module->semimetric", "nondegenerate": nondeg,
               "identity_integral": res.verified}
    if not res.verified:
        # any semimetric with lip0 ⊂ V ⊂ lip would be a kernel below the maximal bound
        details["semimetric_exists"] = False
        return _report("4", name, witnesses, details)
    k = res.kernel
    valid, pair = validate_semimetric(k, V.ground)
    details["kernel_is_semimetric"] = valid
    if not valid:
        witnesses.append({"semimetric_violation": pair})
    rows_in = [membership(row, V).member for row in k]
    span = Semimodule(k, V.ground, V.closure, V.semiring)
    gens_in = [membership(g, span).member for g in V.generators]
    details["rows_in_V"] = all(rows_in)
    details["V_in_row_span"] = all(gens_in)
    if not all(rows_in):
        witnesses.append({"row_outside_V": V.ground.labels[rows_in.index(False)]})
    if not all(gens_in):
        witnesses.append({"generator_outside_row_span": gens_in.index(False)})
    if V.closure == WEDGE_CLOSED and admissible(V):
        diag_ok = bool(np.all(np.diag(k)[V.unit_mask] == 0.0))
        details["reflexive_on_X_V"] = diag_ok
        if not diag_ok:
            witnesses.append({"non_reflexive_kernel": True})
    return _report("4", name, witnesses, details)


def check_theorem5(V: Semimodule, rng=None, n_probes: int = DEFAULT_PROBES, name: str = "") -> dict:
    """Identity nuclear ⇔ (i_Δ injective and the identity of the image integral)."""
    rng = rng if rng is not None else np.random.default_rng(0)
    dec = nuclear_decompose_identity(V, rng=rng, n_probes=n_probes)
    if dec.verified:
        names = [f"δ[{V.ground.labels[x]}]" for x in np.flatnonzero(V.unit_mask)]
        family = DeltaFamily.from_decomposition(dec.decomposition, names)
    else:
        family = DeltaFamily.canonical(V, rng)
    details = {"identity_nuclear": dec.verified, "family_size": len(family)}
    witnesses: list = []
    if len(family) == 0:
        details["embedding_injective"] = False
        details["image_identity_integral"] = False
    else:
        family_ok = family.verify(V, rng, n_probes)
        image, embed = i_delta_embed(V, family)
        probes = np.vstack([V.generators, V.sample(rng, n_probes)])
        injective = injective_on(embed, probes)
        img_integral = identity_is_integral(image, n_probes, rng).verified
        details.update(delta_pairs_verified=family_ok, embedding_injective=injective,
                       image_identity_integral=img_integral)
        if dec.verified and not family_ok:
            witnesses.append({"delta_pair_violation": True})
    rhs = details["embedding_injective"] and details["image_identity_integral"]
    if dec.verified != rhs:
        witnesses.append({"identity_nuclear": dec.verified, "rhs": rhs, "decomposition": dec.witness})
    return _report("5", name, witnesses, details)


def check_prop6(V: Semimodule, rng=None, trials: int = 10, n_probes: int = DEFAULT_PROBES) -> dict:
    """b-approximation property ⇔ maps out of / into ``V`` decompose via the identity."""
    rng = rng if rng is not None else np.random.default_rng(0)
    dec = nuclear_decompose_identity(V, rng=rng, n_probes=n_probes)
    out_ok = into_ok = True
    for _ in range(trials):
        A = random_integral_operator(V, rng)
        T = compose_nuclear(dec.decomposition, A, side="left")
        out_ok &= T.verify(A, rng, n_probes)[0]
        # maps into V: rows of the kernel are elements of V
        n_in = int(rng.integers(1, 5))
        B = IntegralOperator(V.sample(rng, n_in), GroundSet.range(n_in), V.ground, V.semiring)
        S = compose_nuclear(dec.decomposition, B, side="right")
        into_ok &= S.verify(B, rng, n_probes)[0]
    details = {"identity_nuclear": dec.verified, "out_of_V": bool(out_ok), "into_V": bool(into_ok)}
    agree = dec.verified == out_ok == into_ok
    return _report("prop6", "", [] if agree else [details], details)


def check_theorem(theorem_id: str, instance, rng=None, trials: int = 20,
                  n_probes: int = DEFAULT_PROBES, name: str = "", operator=None) -> dict:
    """Dispatch to the checker for ``theorem_id``."""
    rng = rng if rng is not None else np.random.default_rng(0)
    tid = str(theorem_id)
    if isinstance(instance, tuple):
        instance, operator = instance
    if tid == "4":
        return check_theorem4(instance, rng, n_probes, name)
    if isinstance(instance, Semimetric):
        instance = lip0_generators(instance)
    if not isinstance(instance, Semimodule):
        raise TypeError(f"theorem {tid} needs a semimodule instance")
    if tid == "1":
        return check_theorem1(instance, rng, trials, n_probes, name)
    if tid == "2":
        return check_theorem2(instance, operator, rng, trials, n_probes, name)
    if tid == "3":
        return check_theorem3(instance, rng, max(1, trials // 2), n_probes, name)
    if tid == "3a":
        return check_theorem3a(instance, rng, max(1, trials // 2), n_probes, name)
    if tid == "5":
        return check_theorem5(instance, rng, n_probes, name)
    raise ValueError(f"unknown theorem id {theorem_id!r}; choose from {THEOREM_IDS}")

"""b-linear operators between finite functional semimodules.

An operator ``A: V -> K(Y)`` is *integral* with kernel ``k`` when
``(A f)(y) = max_x f(x) ⊙ k(x, y)``.  Operators are normally stored as
kernels (:class:`IntegralOperator`); :class:`TabulatedOperator` keeps only
the values on the generators of a span and exists to express maps whose
integrality is in question.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .semimodule import (
    B_CLOSED,
    DomainError,
    GroundSet,
    Semimodule,
    WEDGE_CLOSED,
    membership,
)
from .semiring import (
    NEG_INF,
    RMAX,
    Semiring,
    SemiringError,
    get_semiring,
    identity,
    matmul,
    odot_array,
    residual_array,
    vecmat,
)

DEFAULT_PROBES = 64


class IntegrityError(ValueError):
    """A tabulated operator assigns different values to the same vector."""


class LinearOperator:
    """Common interface: ``apply`` one vector, ``apply_many`` a stack of rows."""

    semiring: Semiring = RMAX
    codomain: GroundSet

    @property
    def n_out(self) -> int:
        return len(self.codomain)

    def apply(self, f) -> np.ndarray:
        raise NotImplementedError

    def apply_many(self, F) -> np.ndarray:
        F = np.asarray(F, dtype=float)
        return np.array([self.apply(f) for f in F]).reshape(len(F), self.n_out)


class IntegralOperator(LinearOperator):
    """Operator given by a kernel matrix of shape ``(|X|, |Y|)``."""

    def __init__(self, kernel, domain: GroundSet | None = None,
                 codomain: GroundSet | None = None, semiring: Semiring | str = RMAX):
        self.semiring = get_semiring(semiring)
        k = self.semiring.validate(np.atleast_2d(np.asarray(kernel, dtype=float)))
        if k.ndim != 2:
            raise DomainError("kernel must be a matrix")
        self.domain = domain or GroundSet.range(k.shape[0])
        self.codomain = codomain or GroundSet.range(k.shape[1])
        if k.shape != (len(self.domain), len(self.codomain)):
            raise DomainError(f"kernel shape {k.shape} does not match ground sets")
        self.kernel = k.copy()
        self.kernel.setflags(write=False)

    def __repr__(self) -> str:
        return f"IntegralOperator({self.kernel.shape[0]}x{self.kernel.shape[1]})"

    @classmethod
    def identity(cls, ground: GroundSet, semiring: Semiring | str = RMAX) -> "IntegralOperator":
        return cls(identity(len(ground)), ground, ground, semiring)

    @classmethod
    def functional(cls, weights, domain: GroundSet | None = None,
                   semiring: Semiring | str = RMAX) -> "IntegralOperator":
        """Integral functional ``f ↦ max_x f(x) ⊙ weights(x)``."""
        w = np.asarray(weights, dtype=float)
        return cls(w[:, None], domain, GroundSet(("*",)), semiring)

    @classmethod
    def delta(cls, x, domain: GroundSet, semiring: Semiring | str = RMAX) -> "IntegralOperator":
        """The evaluation functional ``δ_x``."""
        w = np.full(len(domain), NEG_INF)
        w[domain.index(x)] = 0.0
        return cls.functional(w, domain, semiring)

    def apply(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.kernel.shape[0],):
            raise DomainError(f"vector of length {f.shape} outside the operator domain")
        return vecmat(f, self.kernel)

    def apply_many(self, F) -> np.ndarray:
        F = np.asarray(F, dtype=float).reshape(-1, self.kernel.shape[0])
        return matmul(F, self.kernel)


class TabulatedOperator(LinearOperator):
    """Operator known only through its values on the generators of a span.

    Values on arbitrary coefficient vectors follow by sup-linearity.  A
    vector is mapped through its maximal coefficient certificate, which is
    only meaningful when the tabulation is consistent (equal vectors get equal
    values); :meth:`check_consistency` probes that and :meth:`apply` refuses
    to run on an inconsistent table.

    ``probe_coefficients`` are extra coefficient vectors the caller wants
    every kernel search and verification to include.
    """

    def __init__(self, domain: Semimodule, values, codomain: GroundSet | None = None,
                 probe_coefficients=None):
        if domain.closure != B_CLOSED:
            raise DomainError("tabulated operators need a b-closed span as domain")
        self.domain = domain
        self.semiring = domain.semiring
        vals = self.semiring.validate(np.asarray(values, dtype=float))
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.shape[0] != domain.n_generators:
            raise DomainError("one value row per generator required")
        self.codomain = codomain or (GroundSet(("*",)) if vals.shape[1] == 1
                                     else GroundSet.range(vals.shape[1]))
        self.values = vals.copy()
        self.values.setflags(write=False)
        if probe_coefficients is None:
            probe_coefficients = np.zeros((0, domain.n_generators))
        self.probe_coefficients = np.asarray(probe_coefficients, dtype=float).reshape(
            -1, domain.n_generators)
        self._consistent: bool | None = None

    def __repr__(self) -> str:
        return f"TabulatedOperator({self.domain.n_generators} generators -> {self.n_out})"

    def apply_coefficients(self, c) -> np.ndarray:
        return vecmat(np.asarray(c, dtype=float), self.values)

    def consistency_witness(self, rng: np.random.Generator | None = None,
                            n_probes: int = DEFAULT_PROBES):
        """First coefficient vector whose value differs from its certificate's, or None."""
        V = self.domain
        m = V.n_generators
        rng = rng or np.random.default_rng(0)
        probes = [identity(m), self.probe_coefficients, V.sample_coefficients(rng, n_probes)]
        if m > 1:
            pairs = [np.maximum(identity(m)[i], identity(m)[j])
                     for i in range(m) for j in range(i + 1, m)]
            probes.append(np.array(pairs))
        for c in np.vstack(probes):
            v = V.combine(c)
            if not np.array_equal(self.apply_coefficients(V.coefficients(v)),
                                  self.apply_coefficients(c)):
                return c
        return None

    def check_consistency(self, rng=None, n_probes: int = DEFAULT_PROBES) -> bool:
        ok = self.consistency_witness(rng, n_probes) is None
        self._consistent = ok
        return ok

    def apply(self, f) -> np.ndarray:
        if self._consistent is None:
            self.check_consistency()
        if not self._consistent:
            raise IntegrityError("tabulation assigns different values to equal vectors")
        member, c = membership(f, self.domain)
        if not member:
            raise DomainError("vector is not in the operator's domain")
        return self.apply_coefficients(c)


class ComposedOperator(LinearOperator):
    """``v ↦ second(first(v))``."""

    def __init__(self, first: LinearOperator, second: LinearOperator):
        self.first = first
        self.second = second
        self.semiring = second.semiring
        self.codomain = second.codomain

    def apply(self, f) -> np.ndarray:
        return self.second.apply(self.first.apply(f))


def apply(A: LinearOperator, f) -> np.ndarray:
    return A.apply(f)


def _kernel_of(A) -> np.ndarray:
    return A.kernel if isinstance(A, IntegralOperator) else np.asarray(A, dtype=float)


def compose(A, B):
    """Kernel of "first ``A``, then ``B``": ``(x, z) ↦ max_y A(x, y) ⊙ B(y, z)``.

    Accepts kernel matrices or integral operators and returns the same kind.
    """
    ka, kb = _kernel_of(A), _kernel_of(B)
    if ka.shape[1] != kb.shape[0]:
        raise DomainError(f"cannot compose {ka.shape} with {kb.shape}")
    k = matmul(ka, kb)
    if isinstance(A, IntegralOperator) and isinstance(B, IntegralOperator):
        if A.semiring != B.semiring:
            raise SemiringError("mixed semirings")
        if A.codomain != B.domain:
            raise DomainError("codomain of the first operator differs from domain of the second")
        return IntegralOperator(k, A.domain, B.codomain, A.semiring)
    return k


def sup_operators(S: Sequence[IntegralOperator]) -> IntegralOperator:
    """Pointwise supremum of integral operators sharing domain and codomain."""
    S = list(S)
    if not S:
        raise DomainError("supremum of an empty family needs explicit ground sets")
    head = S[0]
    for A in S:
        if not isinstance(A, IntegralOperator):
            raise DomainError("sup_operators needs integral operators")
        if (A.domain, A.codomain, A.semiring) != (head.domain, head.codomain, head.semiring):
            raise DomainError("operators have different domains or codomains")
    k = np.max([A.kernel for A in S], axis=0)
    return IntegralOperator(k, head.domain, head.codomain, head.semiring)


class KernelResult(NamedTuple):
    kernel: np.ndarray
    verified: bool
    witness: dict | None


def _probe_set(A: LinearOperator, V: Semimodule, rng, n_probes: int):
    """Vectors on which the kernel is built and checked, with A's values there."""
    if isinstance(A, TabulatedOperator):
        m = V.n_generators
        coeffs = np.vstack([identity(m), A.probe_coefficients,
                            V.sample_coefficients(rng, n_probes)])
        vectors = np.array([V.combine(c) for c in coeffs]).reshape(-1, V.n_points)
        images = np.array([A.apply_coefficients(c) for c in coeffs]).reshape(-1, A.n_out)
        return vectors, images, coeffs
    vectors = np.vstack([V.generators, V.sample(rng, n_probes)])
    return vectors, A.apply_many(vectors), None


def max_kernel(A: LinearOperator, V: Semimodule, n_probes: int = DEFAULT_PROBES,
               rng: np.random.Generator | None = None,
               target: Semimodule | None = None) -> KernelResult:
    """Largest kernel representing ``A`` on ``V``, and whether it really does.

    On a ∧-closed module the kernel rows are ``A(d_x)``.  Otherwise each entry
    is the tightest bound ``k(x, y) <= v(x) \\ (A v)(y)`` over the generators
    and probe vectors ``v``; any kernel of ``A`` must lie below it, so if it
    fails to reproduce ``A`` no kernel exists.  Rows off ``X_V`` are zero.

    A kernel takes values in the codomain.  When that is a proper submodule
    ``target`` of ``K(Y)`` (``V`` itself for the identity), each row must be an
    element of ``target``: rows are replaced by the largest element of a
    b-closed ``target`` below them, and verification also checks membership.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    vectors, images, coeffs = _probe_set(A, V, rng, n_probes)
    if V.closure == WEDGE_CLOSED and not isinstance(A, TabulatedOperator):
        k = np.full((V.n_points, A.n_out), NEG_INF)
        rows = np.flatnonzero(V.unit_mask)
        if rows.size:
            k[rows] = A.apply_many(V.dx_table[rows])
    else:
        bounds = residual_array(vectors[:, :, None], images[:, None, :], V.semiring)
        k = bounds.min(axis=0) if len(vectors) else np.full((V.n_points, A.n_out), V.semiring.top)
        k[~V.unit_mask] = NEG_INF
    if target is not None:
        if len(target.ground) != k.shape[1]:
            raise DomainError("target module does not live on the codomain")
        if target.closure == B_CLOSED:
            k = np.array([target.project(row) for row in k]).reshape(k.shape)
        outside = [i for i, row in enumerate(k) if not membership(row, target).member]
        if outside:
            i = outside[0]
            return KernelResult(k, False, {"row": V.ground.labels[i], "row_values": k[i],
                                           "reason": "kernel row outside the target module"})

    reproduced = matmul(vectors, k)
    bad = np.flatnonzero(~np.all(reproduced == images, axis=1))
    witness = None
    if bad.size:
        j = int(bad[0])
        witness = {
            "vector": vectors[j],
            "expected": images[j],
            "got": reproduced[j],
        }
        if coeffs is not None:
            witness["coefficients"] = coeffs[j]
    return KernelResult(k, not bad.size, witness)


def is_integral(A: LinearOperator, V: Semimodule, n_probes: int = DEFAULT_PROBES,
                rng: np.random.Generator | None = None,
                target: Semimodule | None = None) -> bool:
    return max_kernel(A, V, n_probes, rng, target).verified


def identity_is_integral(V: Semimodule, n_probes: int = DEFAULT_PROBES,
                         rng: np.random.Generator | None = None) -> KernelResult:
    """Maximal kernel of ``id: V -> V`` with rows required to lie in ``V``."""
    return max_kernel(IntegralOperator.identity(V.ground, V.semiring), V, n_probes, rng, target=V)


def distributes_over_sups(A: LinearOperator, F, odot_coeffs=None) -> bool:
    """Check ``A(⊕_i c_i ⊙ f_i) == ⊕_i c_i ⊙ A(f_i)`` for the rows of ``F``."""
    F = np.asarray(F, dtype=float)
    c = np.zeros(len(F)) if odot_coeffs is None else np.asarray(odot_coeffs, dtype=float)
    joined = odot_array(c[:, None], F).max(axis=0)
    lhs = A.apply(joined)
    rhs = odot_array(c[:, None], A.apply_many(F)).max(axis=0)
    return bool(np.array_equal(lhs, rhs))

"""One-dimensional and b-nuclear operators, δ-functionals and the embedding i_Δ.

A one-dimensional operator ``φ ⊙ w`` sends ``v`` to ``φ(v) ⊙ w``; a b-nuclear
operator is a supremum of such terms.  The identity of a module is b-nuclear
exactly when it has an integral kernel ``k``, and then
``id = ⊕_x δ_x ⊙ k(x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .operator import (
    DEFAULT_PROBES,
    ComposedOperator,
    IntegralOperator,
    LinearOperator,
    TabulatedOperator,
    compose,
    identity_is_integral,
)
from .semimodule import (
    B_CLOSED,
    DomainError,
    GroundSet,
    Semimodule,
    WEDGE_CLOSED,
    membership,
)
from .semiring import NEG_INF, identity, odot_array, residual_array


def functional_values(phi: LinearOperator, vectors, V: Semimodule | None = None) -> np.ndarray:
    """``φ`` on each row of ``vectors``; tabulated functionals read generator rows directly."""
    vectors = np.asarray(vectors, dtype=float)
    if (isinstance(phi, TabulatedOperator) and V is not None
            and vectors.shape == V.generators.shape
            and np.array_equal(vectors, V.generators)):
        return phi.values[:, 0].copy()
    return phi.apply_many(vectors)[:, 0]


class OneDimOperator(LinearOperator):
    """``v ↦ φ(v) ⊙ w`` for a functional ``φ`` and a fixed vector ``w``."""

    def __init__(self, functional: LinearOperator, target, codomain: GroundSet | None = None):
        if functional.n_out != 1:
            raise DomainError("the first factor of a one-dimensional operator must be a functional")
        self.functional = functional
        self.target = np.asarray(target, dtype=float)
        self.semiring = functional.semiring
        self.codomain = codomain or GroundSet.range(len(self.target))
        if len(self.codomain) != len(self.target):
            raise DomainError("target does not match codomain")

    def __repr__(self) -> str:
        return f"OneDimOperator({self.functional!r} ⊙ {self.target.tolist()})"

    def apply(self, v) -> np.ndarray:
        scale = self.functional.apply(v)[0]
        return odot_array(scale, self.target)

    def apply_many(self, F) -> np.ndarray:
        scales = self.functional.apply_many(F)[:, 0]
        return odot_array(scales[:, None], self.target[None, :])


def one_dim_apply(T: OneDimOperator, v) -> np.ndarray:
    return T.apply(v)


class NuclearDecomposition(LinearOperator):
    """Finite supremum of one-dimensional operators on a common domain."""

    def __init__(self, terms: Sequence[OneDimOperator], domain: Semimodule,
                 codomain: GroundSet | None = None):
        self.terms = list(terms)
        self.domain = domain
        self.semiring = domain.semiring
        if codomain is None:
            if not self.terms:
                raise DomainError("an empty decomposition needs an explicit codomain")
            codomain = self.terms[0].codomain
        for t in self.terms:
            if len(t.codomain) != len(codomain):
                raise DomainError("terms map into different codomains")
        self.codomain = codomain

    def __len__(self) -> int:
        return len(self.terms)

    def apply(self, v) -> np.ndarray:
        return self.apply_many(np.asarray(v, dtype=float)[None, :])[0]

    def apply_many(self, F) -> np.ndarray:
        F = np.asarray(F, dtype=float)
        out = np.full((len(F), self.n_out), NEG_INF)
        for t in self.terms:
            out = np.maximum(out, t.apply_many(F))
        return out

    def verify(self, A: LinearOperator | None = None, rng: np.random.Generator | None = None,
               n_probes: int = DEFAULT_PROBES) -> tuple[bool, dict | None]:
        """Compare with ``A`` (identity by default) on generators and random elements."""
        rng = rng if rng is not None else np.random.default_rng(0)
        V = self.domain
        probes = np.vstack([V.generators, V.sample(rng, n_probes)])
        expected = probes if A is None else A.apply_many(probes)
        got = self.apply_many(probes)
        bad = np.flatnonzero(~np.all(got == expected, axis=1))
        if bad.size:
            j = int(bad[0])
            return False, {"vector": probes[j], "expected": expected[j], "got": got[j]}
        return True, None


def full_module(ground: GroundSet, semiring=None) -> Semimodule:
    """``K(X)`` presented by its unit vectors."""
    kw = {} if semiring is None else {"semiring": semiring}
    return Semimodule(identity(len(ground)), ground, B_CLOSED, **kw)


def compose_nuclear(T: NuclearDecomposition, B: LinearOperator, side: str = "right",
                    domain: Semimodule | None = None) -> NuclearDecomposition:
    """Term-by-term composition with a b-linear operator.

    ``side="left"`` builds ``B ∘ T`` (``B`` applied after ``T``), turning each
    ``φ ⊙ w`` into ``φ ⊙ B(w)``.  ``side="right"`` builds ``T ∘ B`` (``B``
    applied first), turning each term into ``(φ ∘ B) ⊙ w``; the new domain
    defaults to ``K(X')`` for an integral ``B`` on ``X'``.
    """
    if side == "left":
        terms = [OneDimOperator(t.functional, B.apply(t.target), B.codomain) for t in T.terms]
        return NuclearDecomposition(terms, T.domain, B.codomain)
    if side != "right":
        raise ValueError("side must be 'left' or 'right'")
    if domain is None:
        if not isinstance(B, IntegralOperator):
            raise DomainError("right composition with a non-integral operator needs a domain")
        domain = full_module(B.domain, B.semiring)
    if B.n_out != T.domain.n_points:
        raise DomainError("operator does not map into the decomposition's domain")
    terms = []
    for t in T.terms:
        phi = t.functional
        if isinstance(phi, IntegralOperator) and isinstance(B, IntegralOperator):
            composed = IntegralOperator(compose(B.kernel, phi.kernel), B.domain, phi.codomain,
                                        B.semiring)
        else:
            composed = ComposedOperator(B, phi)
        terms.append(OneDimOperator(composed, t.target, t.codomain))
    return NuclearDecomposition(terms, domain, T.codomain)


class IdentityDecomposition(NamedTuple):
    decomposition: NuclearDecomposition
    verified: bool
    witness: dict | None


def identity_kernel_rows(V: Semimodule, rng=None, n_probes: int = DEFAULT_PROBES) -> np.ndarray:
    """``d_x`` rows on a ∧-closed module, the maximal identity kernel with rows in ``V`` otherwise."""
    if V.closure == WEDGE_CLOSED:
        return np.array(V.dx_table)
    return identity_is_integral(V, n_probes, rng).kernel


def nuclear_decompose_identity(V: Semimodule, d_table=None, rng=None,
                               n_probes: int = DEFAULT_PROBES) -> IdentityDecomposition:
    """Decompose ``id_V`` as ``⊕_{x ∈ X_V} δ_x ⊙ d_x`` and verify it."""
    rng = rng if rng is not None else np.random.default_rng(0)
    rows = identity_kernel_rows(V, rng, n_probes) if d_table is None else np.asarray(d_table, float)
    terms = [OneDimOperator(IntegralOperator.delta(x, V.ground, V.semiring), rows[x], V.ground)
             for x in np.flatnonzero(V.unit_mask)]
    T = NuclearDecomposition(terms, V, V.ground)
    for t, x in zip(terms, np.flatnonzero(V.unit_mask)):
        if not membership(t.target, V).member:
            return IdentityDecomposition(T, False, {"point": V.ground.labels[x], "target": t.target,
                                                    "reason": "term target outside V"})
    ok, witness = T.verify(None, rng, n_probes)
    return IdentityDecomposition(T, ok, witness)


def decomposition_from_kernel(kernel, V: Semimodule, codomain: GroundSet | None = None
                              ) -> NuclearDecomposition:
    """``⊕_x δ_x ⊙ k(x)`` for the rows of ``kernel``."""
    kernel = np.asarray(kernel, dtype=float)
    codomain = codomain or GroundSet.range(kernel.shape[1])
    terms = [OneDimOperator(IntegralOperator.delta(x, V.ground, V.semiring), kernel[x], codomain)
             for x in range(V.n_points) if np.any(kernel[x] != NEG_INF)]
    return NuclearDecomposition(terms, V, codomain)


# ---------------------------------------------------------------------------
# δ-functionals and pointlike elements


def delta_functional_check(phi: LinearOperator, V: Semimodule, rng=None,
                           n_probes: int = DEFAULT_PROBES) -> np.ndarray | None:
    """A nonzero ``v ∈ V`` with ``φ(w) ⊙ v <= w`` for all ``w ∈ V``, or None.

    The pointwise bound ``∧_g φ(g) \\ g`` over generators is the largest
    vector satisfying the constraint; it is pulled back into ``V`` (largest
    span element below it) when it is not already a member.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    vals = functional_values(phi, V.generators, V)
    active = vals != NEG_INF
    if not active.any():
        return None
    bound = residual_array(vals[active][:, None], V.generators[active], V.semiring).min(axis=0)
    v = bound if membership(bound, V).member else V.project(bound)
    if np.all(v == NEG_INF):
        return None
    probes = np.vstack([V.generators, V.sample(rng, n_probes)])
    scales = functional_values(phi, probes)
    if not np.all(odot_array(scales[:, None], v[None, :]) <= probes):
        return None
    return v


@dataclass
class DeltaFamily:
    """Finite family of δ-functionals with their pointlike witnesses."""

    labels: list[str]
    functionals: list[LinearOperator]
    witnesses: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not (len(self.labels) == len(self.functionals) == len(self.witnesses)):
            raise DomainError("labels, functionals and witnesses must align")

    def __len__(self) -> int:
        return len(self.labels)

    @classmethod
    def canonical(cls, V: Semimodule, rng=None) -> "DeltaFamily":
        """``{δ_x : x ∈ X_V}`` paired with the witnesses found for them."""
        labels, funcs, wits = [], [], []
        for x in np.flatnonzero(V.unit_mask):
            delta = IntegralOperator.delta(x, V.ground, V.semiring)
            labels.append(f"δ[{V.ground.labels[x]}]")
            funcs.append(delta)
            wits.append(delta_functional_check(delta, V, rng))
        return cls(labels, funcs, wits)

    @classmethod
    def from_decomposition(cls, T: NuclearDecomposition, names: Sequence[str] | None = None
                           ) -> "DeltaFamily":
        names = names or [f"φ{j}" for j in range(len(T.terms))]
        return cls(list(names), [t.functional for t in T.terms], [t.target for t in T.terms])

    def verify(self, V: Semimodule, rng=None, n_probes: int = DEFAULT_PROBES) -> bool:
        """Every pair with a witness satisfies ``φ(w) ⊙ v <= w`` on the probes."""
        rng = rng if rng is not None else np.random.default_rng(0)
        probes = np.vstack([V.generators, V.sample(rng, n_probes)])
        for phi, v in zip(self.functionals, self.witnesses):
            if v is None:
                continue
            scales = functional_values(phi, probes)
            if not np.all(odot_array(scales[:, None], np.asarray(v)[None, :]) <= probes):
                return False
        return True


class Embedding(NamedTuple):
    image: Semimodule
    map: Callable[[np.ndarray], np.ndarray]


def i_delta_embed(V: Semimodule, family: DeltaFamily) -> Embedding:
    """``v ↦ (φ(v))_{φ ∈ family}`` and the image of ``V`` under it."""
    if len(family) == 0:
        raise DomainError("the family of functionals is empty")
    ground = GroundSet(tuple(family.labels))
    cols = [functional_values(phi, V.generators, V) for phi in family.functionals]
    gens = np.column_stack(cols) if V.n_generators else np.zeros((0, len(ground)))
    image = Semimodule(gens, ground, V.closure, V.semiring)

    def embed(v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return np.array([phi.apply(v)[0] for phi in family.functionals])

    return Embedding(image, embed)


def injective_on(embed, vectors) -> bool:
    """No two distinct rows of ``vectors`` share an image."""
    seen: dict[bytes, bytes] = {}
    for v in np.asarray(vectors, dtype=float) + 0.0:
        key = (np.asarray(embed(v), dtype=float) + 0.0).tobytes()
        val = v.tobytes()
        if seen.setdefault(key, val) != val:
            return False
    return True


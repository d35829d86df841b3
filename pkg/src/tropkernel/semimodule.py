"""Finitely generated functional semimodules ``V ⊂ K(X)`` on a finite set X.

A :class:`Semimodule` is a list of generator vectors plus a closure rule:

``b-closed-span``
    all sups ``⊕_i c_i ⊙ g_i`` with ``c_i`` in the completed semiring.  On a
    finite set every such sup is a finite one.
``wedge-closed``
    the span above closed additionally under finite pointwise infima.  By
    distributivity of max over min every element is a finite infimum of
    span elements.

Membership in a span is decided by residuation: the coefficients
``c_i = ∧_x g_i(x) \\ f(x)`` are the largest with ``⊕ c_i ⊙ g_i <= f``, so
``f`` is in the span iff this combination hits ``f`` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from .semiring import (
    NEG_INF,
    RMAX,
    Semiring,
    get_semiring,
    is_invertible,
    odot_array,
    residual_array,
)

B_CLOSED = "b-closed-span"
WEDGE_CLOSED = "wedge-closed"
CLOSURES = (B_CLOSED, WEDGE_CLOSED)


class DomainError(ValueError):
    """An argument lies outside the set an operation is defined on."""


@dataclass(frozen=True)
class GroundSet:
    """Ordered finite set of labelled points, optionally with coordinates."""

    labels: tuple[str, ...]
    coords: tuple[float, ...] | None = None

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise DomainError("ground set must be nonempty")
        if len(set(labels)) != len(labels):
            raise DomainError("ground set labels must be distinct")
        object.__setattr__(self, "labels", labels)
        if self.coords is not None:
            coords = tuple(float(c) for c in self.coords)
            if len(coords) != len(labels):
                raise DomainError("one coordinate per point required")
            object.__setattr__(self, "coords", coords)

    @classmethod
    def range(cls, n: int, start: int = 0) -> "GroundSet":
        return cls(tuple(str(i) for i in range(start, start + n)))

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def index(self, point) -> int:
        """Position of ``point``; accepts a label or an integer position."""
        if isinstance(point, (int, np.integer)) and not isinstance(point, bool):
            if 0 <= point < len(self.labels):
                return int(point)
            raise DomainError(f"point index {point} out of range")
        try:
            return self._positions[str(point)]
        except KeyError:
            raise DomainError(f"unknown point {point!r}") from None

    def restrict(self, mask) -> "GroundSet":
        idx = np.flatnonzero(mask)
        coords = None if self.coords is None else tuple(self.coords[i] for i in idx)
        return GroundSet(tuple(self.labels[i] for i in idx), coords)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)


class Membership(NamedTuple):
    member: bool
    certificate: np.ndarray | None


class Semimodule:
    """Functional semimodule given by generators on a finite ground set.

    Parameters
    ----------
    generators : array_like, shape (m, n)
        One generator per row.  ``m`` may be zero when ``ground`` is given.
    ground : GroundSet, optional
        Defaults to points labelled ``"0" .. "n-1"``.
    closure : {"b-closed-span", "wedge-closed"}
    semiring : Semiring or str
    """

    def __init__(self, generators, ground: GroundSet | None = None,
                 closure: str = B_CLOSED, semiring: Semiring | str = RMAX):
        self.semiring = get_semiring(semiring)
        gens = np.asarray(generators, dtype=float)
        if gens.ndim == 1:
            gens = gens[None, :] if gens.size else gens.reshape(0, len(ground or ()))
        if gens.ndim != 2:
            raise DomainError("generators must form a 2-d array")
        if ground is None:
            ground = GroundSet.range(gens.shape[1])
        if gens.shape[1] != len(ground):
            raise DomainError(
                f"generators have {gens.shape[1]} entries, ground set has {len(ground)}"
            )
        if closure not in CLOSURES:
            raise DomainError(f"unknown closure {closure!r}")
        self.generators = self.semiring.validate(gens).copy()
        self.generators.setflags(write=False)
        self.ground = ground
        self.closure = closure
        reachable = (self.generators != NEG_INF) & is_invertible(self.generators)
        self.unit_mask = reachable.any(axis=0)
        self.unit_mask.setflags(write=False)

    def __repr__(self) -> str:
        return (f"Semimodule({self.n_generators} generators on {self.n_points} points, "
                f"{self.closure}, {self.semiring.name})")

    @property
    def n_points(self) -> int:
        return len(self.ground)

    @property
    def n_generators(self) -> int:
        return self.generators.shape[0]

    @property
    def unit_points(self) -> tuple[str, ...]:
        """Labels of ``X_V``: points where some element takes the value one."""
        return tuple(l for l, m in zip(self.ground.labels, self.unit_mask) if m)

    def vector(self, values) -> np.ndarray:
        f = self.semiring.validate(values)
        if f.shape != (self.n_points,):
            raise DomainError(f"expected a vector of length {self.n_points}, got {f.shape}")
        return f

    def combine(self, coefficients) -> np.ndarray:
        """``⊕_i c_i ⊙ g_i``."""
        c = np.asarray(coefficients, dtype=float)
        if c.shape != (self.n_generators,):
            raise DomainError(f"expected {self.n_generators} coefficients, got {c.shape}")
        if self.n_generators == 0:
            return np.full(self.n_points, NEG_INF)
        return odot_array(c[:, None], self.generators).max(axis=0)

    def coefficients(self, f) -> np.ndarray:
        """Largest coefficients with ``⊕_i c_i ⊙ g_i <= f``."""
        f = self.vector(f)
        if self.n_generators == 0:
            return np.zeros(0)
        r = residual_array(self.generators, f[None, :], self.semiring)
        return r.min(axis=1)

    def project(self, f) -> np.ndarray:
        """Largest span element below ``f``."""
        return self.combine(self.coefficients(f))

    def with_closure(self, closure: str) -> "Semimodule":
        return Semimodule(self.generators, self.ground, closure, self.semiring)

    def restrict(self, mask=None) -> "Semimodule":
        """Restriction to a subset of points (``X_V`` by default)."""
        mask = self.unit_mask if mask is None else np.asarray(mask, dtype=bool)
        return Semimodule(self.generators[:, mask], self.ground.restrict(mask),
                          self.closure, self.semiring)

    # -- random elements --------------------------------------------------

    def sample_coefficients(self, rng: np.random.Generator, count: int,
                            low: int = -4, high: int = 4, p_zero: float = 0.3) -> np.ndarray:
        c = rng.integers(low, high + 1, size=(count, self.n_generators)).astype(float)
        c[rng.random(c.shape) < p_zero] = NEG_INF
        if self.semiring.boolean:
            c = np.where(c == NEG_INF, NEG_INF, 0.0)
        return c

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """``count`` random elements, one per row (integer-valued)."""
        if self.closure == B_CLOSED:
            coeffs = self.sample_coefficients(rng, count)
            return np.array([self.combine(c) for c in coeffs]).reshape(count, self.n_points)
        out = np.empty((count, self.n_points))
        for k in range(count):
            parts = rng.integers(1, 4)
            coeffs = self.sample_coefficients(rng, parts)
            out[k] = np.min([self.combine(c) for c in coeffs], axis=0)
        return out

    # -- the ∧-construction ------------------------------------------------

    @cached_property
    def dx_table(self) -> np.ndarray:
        """Rows ``d_x`` for ``x`` in ``X_V``; rows off ``X_V`` are zero."""
        table = np.full((self.n_points, self.n_points), NEG_INF)
        for i in np.flatnonzero(self.unit_mask):
            table[i] = d_x(i, self)
        table.setflags(write=False)
        return table


def _require_same_ground(f: np.ndarray, V: Semimodule) -> np.ndarray:
    return V.vector(f)


def delta_eval(x, f, ground: GroundSet | None = None) -> float:
    """Value of ``f`` at point ``x`` (the functional ``δ_x``)."""
    f = np.asarray(f, dtype=float)
    if f.ndim != 1:
        raise DomainError("delta_eval expects a single vector")
    if ground is None:
        ground = GroundSet.range(f.shape[0])
    elif len(ground) != f.shape[0]:
        raise DomainError("vector does not live on the given ground set")
    return float(f[ground.index(x)])


def membership(f, V: Semimodule) -> Membership:
    """Decide ``f ∈ V``.

    For spans the certificate is the maximal coefficient vector; for
    wedge-closed modules it is a matrix whose row ``x`` holds coefficients of
    a span element ``h_x >= f`` with ``h_x(x) = f(x)``.
    """
    f = _require_same_ground(f, V)
    if V.closure == WEDGE_CLOSED:
        return _wedge_membership(f, V)
    c = V.coefficients(f)
    return Membership(bool(np.array_equal(V.combine(c), f)), c)


def wedge_membership(f, V: Semimodule) -> bool:
    """Membership in the ∧-closure of the span of ``V``'s generators.

    ``f`` is a finite infimum of span elements iff for each point ``x`` some
    span element ``h >= f`` satisfies ``h(x) = f(x)``; the largest candidate
    with ``h(x) <= f(x)`` has coefficients ``g_i(x) \\ f(x)``.
    """
    return _wedge_membership(_require_same_ground(f, V), V).member


def _wedge_membership(f: np.ndarray, V: Semimodule) -> Membership:
    cert = np.empty((V.n_points, V.n_generators))
    for x in range(V.n_points):
        c = residual_array(V.generators[:, x], f[x], V.semiring)
        if not np.all(V.combine(c) >= f):
            return Membership(False, None)
        cert[x] = c
    return Membership(True, cert)


def nondegenerate(V: Semimodule) -> tuple[bool, tuple[str, ...]]:
    """Whether every point carries an element equal to one there; also ``X_V``."""
    return bool(V.unit_mask.all()), V.unit_points


def admissible(V: Semimodule) -> bool:
    """Check admissibility exactly for the finite presentation.

    Elements with a finite value at ``x`` are normalised by their inverse, so
    only elements taking the value top at ``x`` can fail: they need a
    witness ``g`` with ``g(x) = 1`` supported inside their top set.
    """
    sr = V.semiring
    G = V.generators
    if sr.top == sr.one or not np.any(G == sr.top):
        return True
    nonzero = G != NEG_INF
    finite = is_invertible(G)
    top = G == sr.top
    for x in range(V.n_points):
        active = np.flatnonzero(nonzero[:, x])
        if active.size == 0:
            continue
        if V.closure == B_CLOSED:
            for i in np.flatnonzero(top[:, x]):
                inside = ~np.any(nonzero & ~top[i][None, :], axis=1)
                if not np.any(inside & finite[:, x]):
                    return False
        else:
            if not V.unit_mask[x]:
                return False
            # minimal top set among elements equal to top at x
            minimal = np.ones(V.n_points, dtype=bool)
            for i in active:
                minimal &= top[i] if top[i, x] else nonzero[i]
            killers = (~nonzero) & nonzero[:, [x]]
            for y in np.flatnonzero(~minimal):
                if not killers[:, y].any():
                    return False
    return True


def d_x(x, V: Semimodule) -> np.ndarray:
    """Least element of ``V``'s ∧-closure taking the value one at ``x``.

    Computed as ``∧_i g_i(x)^{-1} ⊙ g_i`` over generators with an invertible
    value at ``x``, further cut to zero wherever a generator equal to top at
    ``x`` vanishes (a large multiple of it meets ``d_x`` in exactly that way).
    Domination ``f(x) ⊙ d_x <= f`` is then checked on every generator and a
    :class:`DomainError` is raised if it fails.
    """
    i = V.ground.index(x)
    if not V.unit_mask[i]:
        raise DomainError(f"point {V.ground.labels[i]!r} is not in X_V")
    G = V.generators
    sel = is_invertible(G[:, i])
    d = np.min(odot_array(-G[sel, i][:, None], G[sel]), axis=0)
    top_at_x = (G[:, i] == V.semiring.top) & ~sel
    if top_at_x.any():
        d = np.where(np.any(G[top_at_x] == NEG_INF, axis=0), NEG_INF, d)
    dominated = odot_array(G[:, [i]], d[None, :]) <= G
    if not dominated.all():
        bad = int(np.flatnonzero(~dominated.all(axis=1))[0])
        raise DomainError(
            f"d_x at {V.ground.labels[i]!r} is not dominated by generator {bad}; "
            "the module is not admissible there"
        )
    return d


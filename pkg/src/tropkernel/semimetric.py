"""K-valued semimetrics ``d = d ⊙ d`` and the Lipschitz-type modules they define.

``lip(X, d)`` is the fixed-point set ``{f : f = f ⊙ d}`` and ``Lip(X, d)``
the larger set ``{f : f >= f ⊙ d}``.  On a finite set ``lip(X, d)`` is the
span of the rows ``d_x`` (every member satisfies ``f = ⊕_x f(x) ⊙ d_x``), so
it is represented both by predicates and as a :class:`Semimodule`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .semimodule import B_CLOSED, DomainError, GroundSet, Semimodule, membership
from .semiring import NEG_INF, POS_INF, RMAX, Semiring, get_semiring, identity, matmul, vecmat


class SemimetricCheck(NamedTuple):
    valid: bool
    witness: tuple[str, str] | None


def validate_semimetric(m, ground: GroundSet | None = None) -> SemimetricCheck:
    """Check ``m(x, y) = max_z m(x, z) ⊙ m(z, y)`` exactly for every pair.

    The witness is the first violating pair ``(x, y)`` in row-major order.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("a semimetric must be a square matrix")
    ground = ground or GroundSet.range(m.shape[0])
    bad = np.argwhere(matmul(m, m) != m)
    if bad.size:
        x, y = bad[0]
        return SemimetricCheck(False, (ground.labels[x], ground.labels[y]))
    return SemimetricCheck(True, None)


@dataclass(frozen=True, eq=False)
class Semimetric:
    matrix: np.ndarray
    ground: GroundSet = None
    semiring: Semiring = field(default=RMAX)

    def __post_init__(self):
        sr = get_semiring(self.semiring)
        m = sr.validate(self.matrix).copy()
        ground = self.ground or GroundSet.range(m.shape[0])
        if m.shape != (len(ground), len(ground)):
            raise DomainError("semimetric matrix must be square over its ground set")
        ok, witness = validate_semimetric(m, ground)
        if not ok:
            raise DomainError(f"not a semimetric: d != d ⊙ d at {witness}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "semiring", sr)

    @property
    def reflexive(self) -> bool:
        return bool(np.all(np.diag(self.matrix) == 0.0))

    @property
    def symmetric(self) -> bool:
        return bool(np.array_equal(self.matrix, self.matrix.T))

    def row(self, x) -> np.ndarray:
        return self.matrix[self.ground.index(x)]

    def __len__(self) -> int:
        return len(self.ground)


def _matrix(d) -> np.ndarray:
    return d.matrix if isinstance(d, Semimetric) else np.asarray(d, dtype=float)


def star_closure(m, ground: GroundSet | None = None,
                 semiring: Semiring | str = RMAX) -> Semimetric:
    """Least reflexive semimetric above ``m``: ``sup_k (I ⊕ m)^k``.

    ``(I ⊕ m)`` is squared until it covers every path of length ``|X|``;
    any node whose diagonal then exceeds one lies on a positive cycle, and
    every entry routed through such a node is set to top.
    """
    sr = get_semiring(semiring)
    m = sr.validate(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise DomainError("closure needs a square matrix")
    p = np.maximum(identity(n), m)
    power = 1
    while power < n:
        p = matmul(p, p)
        power *= 2
    cyc = np.where(np.diag(p) > 0.0, sr.top, NEG_INF)
    if np.any(cyc != NEG_INF):
        through = np.full((n, n), NEG_INF)
        np.fill_diagonal(through, cyc)
        p = np.maximum(p, matmul(matmul(p, through), p))
    return Semimetric(p, ground, sr)


def lip_membership(f, d) -> bool:
    """``f = f ⊙ d`` exactly."""
    f = np.asarray(f, dtype=float)
    return bool(np.array_equal(vecmat(f, _matrix(d)), f))


def Lip_membership(f, d) -> bool:
    """``f >= f ⊙ d`` pointwise."""
    f = np.asarray(f, dtype=float)
    return bool(np.all(f >= vecmat(f, _matrix(d))))


def lip_project(f, d) -> np.ndarray:
    """``f ⊙ d``: a retraction of K(X) onto ``lip(X, d)``."""
    return vecmat(np.asarray(f, dtype=float), _matrix(d))


def lip0_generators(d: Semimetric) -> Semimodule:
    """Span of the rows ``d_x``."""
    return Semimodule(d.matrix, d.ground, B_CLOSED, d.semiring)


def lipschitz_space(metric, ground: GroundSet | None = None) -> Semimetric:
    """Semimetric ``-r`` for a finite metric ``r`` (reflexive and symmetric)."""
    r = np.asarray(metric, dtype=float)
    n = r.shape[0]
    if r.shape != (n, n) or not np.all(np.isfinite(r)):
        raise DomainError("metric must be a finite square matrix")
    if np.any(np.diag(r) != 0) or not np.array_equal(r, r.T) or np.any(r < 0):
        raise DomainError("metric must be symmetric, nonnegative, with zero diagonal")
    via = (r[:, :, None] + r[None, :, :]).min(axis=1)
    if np.any(via < r):
        x, y = np.argwhere(via < r)[0]
        raise DomainError(f"triangle inequality fails for pair ({x}, {y}); close the matrix first")
    return Semimetric(-r + 0.0, ground)


def is_lipschitz(f, metric) -> bool:
    """Everywhere finite with ``|f(x) - f(y)| <= r(x, y)``, or identically zero."""
    f = np.asarray(f, dtype=float)
    r = np.asarray(metric, dtype=float)
    if np.all(f == NEG_INF):
        return True
    if not np.all(np.isfinite(f)):
        return False
    return bool(np.all(np.abs(f[:, None] - f[None, :]) <= r))


class LowerIdealResult(NamedTuple):
    ok: bool
    witness: dict | None


def lower_ideal_check(V: Semimodule, d: Semimetric, trials: int,
                      rng: np.random.Generator) -> LowerIdealResult:
    """Randomised check that ``V`` contains every ``g ∈ lip(X, d)`` below its members.

    Preconditions (rows of ``d`` in ``V``, generators in ``Lip(X, d)``) are
    checked first and reported as a failed result with ``reason`` set.
    """
    for i, row in enumerate(d.matrix):
        if not membership(row, V).member:
            return LowerIdealResult(False, {"reason": "precondition", "missing_row": d.ground.labels[i]})
    for i, g in enumerate(V.generators):
        if not Lip_membership(g, d):
            return LowerIdealResult(False, {"reason": "precondition", "generator_outside_Lip": i})
    rows = lip0_generators(d)
    for t in range(trials):
        f = V.sample(rng, 1)[0]
        top = rows.coefficients(f)
        drop = rng.integers(0, 4, size=top.shape).astype(float)
        c = np.where(rng.random(top.shape) < 0.25, NEG_INF, top - drop)
        c = np.where(top == POS_INF, rng.integers(-4, 5, size=top.shape), c)
        g = rows.combine(c)
        if not np.all(g <= f):
            continue
        if not membership(g, V).member:
            return LowerIdealResult(False, {"trial": t, "f": f, "g": g})
    return LowerIdealResult(True, None)


def read_edge_list(path: str | Path) -> tuple[GroundSet, np.ndarray]:
    """Read ``x y weight`` lines into a symmetric matrix of negated weights.

    The result is ready for :func:`star_closure`, whose output is then minus
    the shortest-path metric.  Blank lines and ``#`` comments are skipped.
    """
    labels: list[str] = []
    edges = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'x y weight'")
        x, y, w = parts[0], parts[1], float(parts[2])
        if w < 0:
            raise ValueError(f"{path}:{lineno}: negative edge weight")
        for p in (x, y):
            if p not in labels:
                labels.append(p)
        edges.append((x, y, w))
    ground = GroundSet(tuple(labels))
    m = np.full((len(labels), len(labels)), NEG_INF)
    for x, y, w in edges:
        i, j = ground.index(x), ground.index(y)
        m[i, j] = m[j, i] = max(m[i, j], -w)
    return ground, m

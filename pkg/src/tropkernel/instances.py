"""Named example modules, semimetrics and counterexamples.

Every builder is deterministic in its parameters (random ones take a seed).
:func:`build` dispatches on an :class:`InstanceDescriptor` name:

=========================== ==================================================
full-KX / bounded-KX        ``K(X)`` spanned by unit vectors (equal on finite X)
nonincreasing-chain         nonincreasing functions on the chain ``1 < ... < n``
concave-grid                concave functions on a grid with hull addition
example7-window             span of ``{x ↦ -x, 1}`` on ``[-n, n]`` and ``(a, b) ↦ b``
metric-lipschitz            ``-r`` for a metric ``r`` (from coordinates or a matrix)
order-indicator-strict      ``d(x, y) = 1`` iff ``y < x`` on a chain
order-indicator-nonstrict   ``d(x, y) = 1`` iff ``y <= x`` on a chain
random-semimetric           closure of a random nonpositive integer matrix
random-metric               ``-r`` for a random shortest-path metric
random-span / random-wedge  random integer generators
=========================== ==================================================
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .operator import TabulatedOperator
from .semimetric import Semimetric, lipschitz_space, star_closure
from .semimodule import B_CLOSED, WEDGE_CLOSED, DomainError, GroundSet, Semimodule
from .semiring import NEG_INF, identity, residual_array

EXAMPLE7_PROBES = (0, 10, 100)


def full_kx(n: int) -> Semimodule:
    _positive(n)
    return Semimodule(identity(n), GroundSet.range(n, start=1), B_CLOSED)


def nonincreasing_chain(n: int, closure: str = B_CLOSED) -> Semimodule:
    """Step functions ``1`` on ``{1..k}``, zero above; their span is all nonincreasing functions."""
    _positive(n)
    steps = np.where(np.arange(n)[None, :] <= np.arange(n)[:, None], 0.0, NEG_INF)
    ground = GroundSet(tuple(str(i) for i in range(1, n + 1)), tuple(range(1, n + 1)))
    return Semimodule(steps, ground, closure)


def order_indicator(n: int, strict: bool) -> tuple[GroundSet, np.ndarray]:
    """``d(x, y) = 1`` iff ``y < x`` (strict) or ``y <= x`` on ``{1, ..., n}``."""
    _positive(n)
    x = np.arange(n)[:, None]
    y = np.arange(n)[None, :]
    below = (y < x) if strict else (y <= x)
    ground = GroundSet(tuple(str(i) for i in range(1, n + 1)), tuple(range(1, n + 1)))
    return ground, np.where(below, 0.0, NEG_INF)


def metric_from_coords(coords) -> np.ndarray:
    c = np.asarray(coords, dtype=float)
    return np.abs(c[:, None] - c[None, :])


def metric_lipschitz(coords=None, metric=None) -> Semimetric:
    if (coords is None) == (metric is None):
        raise DomainError("give exactly one of coords or metric")
    if metric is None:
        ground = GroundSet(tuple(_label(c) for c in coords), tuple(coords))
        metric = metric_from_coords(coords)
    else:
        ground = GroundSet.range(len(metric))
    return lipschitz_space(metric, ground)


def random_semimetric(n: int, seed: int = 0, p_zero: float = 0.4) -> Semimetric:
    """Closure of a random matrix with entries in ``[-9, 0]`` (no positive cycles)."""
    _positive(n)
    rng = np.random.default_rng(seed)
    m = -rng.integers(0, 10, size=(n, n)).astype(float)
    m[rng.random((n, n)) < p_zero] = NEG_INF
    return star_closure(m, GroundSet.range(n))


def random_metric(n: int, seed: int = 0) -> Semimetric:
    """Shortest-path metric of a complete graph with weights in ``1..9``, negated."""
    _positive(n)
    rng = np.random.default_rng(seed)
    w = rng.integers(1, 10, size=(n, n)).astype(float)
    w = np.minimum(w, w.T)
    m = -w
    np.fill_diagonal(m, NEG_INF)
    return star_closure(m, GroundSet.range(n))


def random_span(n: int, m: int, seed: int = 0, closure: str = B_CLOSED,
                p_zero: float = 0.25, p_top: float = 0.0) -> Semimodule:
    """``m`` random generators on ``n`` points, integer entries in ``[-5, 5]``."""
    _positive(n)
    rng = np.random.default_rng(seed)
    g = rng.integers(-5, 6, size=(m, n)).astype(float)
    u = rng.random((m, n))
    g[u < p_zero] = NEG_INF
    g[(u >= p_zero) & (u < p_zero + p_top)] = np.inf
    return Semimodule(g, GroundSet.range(n), closure)


def example7_window(n: int, probes=None) -> tuple[Semimodule, TabulatedOperator]:
    """The span of ``f(x) = -x`` and the constant one on the grid ``[-n, n]``.

    The functional sends the abstract element ``a ⊙ f ⊕ b`` to ``b``; it is
    tabulated on the generators (``φ(f) = 0``, ``φ(1) = 1``) and carries the
    probes ``a ⊙ f ⊕ 1`` for ``a`` in ``{0, 10, 100, n, 10n, 100n}``.  On a
    finite window the coordinates ``(a, b)`` are no longer determined by the
    function, so the table is inconsistent as a map on vectors.
    """
    _positive(n)
    xs = np.arange(-n, n + 1)
    ground = GroundSet(tuple(str(x) for x in xs), tuple(xs))
    V = Semimodule(np.vstack([-xs.astype(float), np.zeros(len(xs))]), ground, B_CLOSED)
    if probes is None:
        probes = sorted(set(EXAMPLE7_PROBES) | {n, 10 * n, 100 * n})
    coeffs = np.array([[float(a), 0.0] for a in probes])
    phi = TabulatedOperator(V, np.array([[NEG_INF], [0.0]]), probe_coefficients=coeffs)
    return V, phi


def example7_kernel_bounds(V: Semimodule, phi: TabulatedOperator, x="0") -> list[tuple[float, float]]:
    """Upper bounds on ``k(x)`` forced by the probes ``a ⊙ f ⊕ 1``, tightening as ``a`` grows.

    Returns ``(a, bound)`` pairs sorted by ``a``, where ``bound`` is the
    running minimum of ``v_a(x) \\ φ(v_a)``.  Any kernel of ``φ`` lies below
    every entry, and the bounds fall without limit as the probes grow.
    """
    i = V.ground.index(x)
    pairs = []
    bound = V.semiring.top
    for c in sorted(phi.probe_coefficients.tolist()):
        v = V.combine(c)
        bound = min(bound, float(residual_array(v[i], phi.apply_coefficients(c)[0], V.semiring)))
        pairs.append((c[0], bound))
    return pairs


# ---------------------------------------------------------------------------
# concave functions on a grid


def _upper_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    hull: list[tuple[float, float]] = []
    for p in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def concave_envelope(h, coords) -> np.ndarray:
    """Least function concave in ``coords`` lying above ``h`` (zero outside its support hull)."""
    h = np.asarray(h, dtype=float)
    c = np.asarray(coords, dtype=float)
    if np.any(np.diff(c) <= 0):
        raise DomainError("coordinates must be strictly increasing")
    if np.any(h == np.inf):
        raise DomainError("concave grid functions take finite values or zero")
    idx = np.flatnonzero(h != NEG_INF)
    out = np.full(len(h), NEG_INF)
    if idx.size == 0:
        return out
    hull = _upper_hull([(c[i], h[i]) for i in idx])
    hx = np.array([p[0] for p in hull])
    hy = np.array([p[1] for p in hull])
    inside = (c >= hx[0]) & (c <= hx[-1])
    out[inside] = np.interp(c[inside], hx, hy)
    return out


def concave_oplus(f, g, coords) -> np.ndarray:
    """Sum in the concave-grid module: envelope of the pointwise maximum."""
    return concave_envelope(np.maximum(np.asarray(f, float), np.asarray(g, float)), coords)


@dataclass(frozen=True)
class ConcaveGrid:
    """Concave functions on a finite grid, added by taking concave hulls.

    Order and scalar action come from ``K(X)``, the addition does not, so
    evaluation at an interior point is not additive.
    """

    coords: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coords)
        if len(c) < 1 or any(b <= a for a, b in zip(c, c[1:])):
            raise DomainError("coordinates must be strictly increasing")
        object.__setattr__(self, "coords", c)

    @property
    def ground(self) -> GroundSet:
        return GroundSet(tuple(_label(c) for c in self.coords), self.coords)

    def contains(self, f) -> bool:
        f = np.asarray(f, dtype=float)
        return bool(np.array_equal(concave_envelope(f, self.coords), f))

    def oplus(self, f, g) -> np.ndarray:
        return concave_oplus(f, g, self.coords)

    def odot(self, a: float, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        return np.where(f == NEG_INF, NEG_INF, f + a) if a != NEG_INF else np.full(len(f), NEG_INF)

    def witness_pair(self) -> tuple[np.ndarray, np.ndarray]:
        """Two lines crossing below the hull of their maximum at the middle point."""
        c = np.asarray(self.coords)
        if len(c) < 3:
            raise DomainError("need at least three grid points")
        span = c[-1] - c[0]
        f = -10.0 * (c - c[0]) / span
        g = -10.0 * (c[-1] - c) / span
        return f, g


def _label(c) -> str:
    c = float(c)
    return str(int(c)) if c.is_integer() else repr(c)


def _positive(n: int) -> None:
    if int(n) != n or n <= 0:
        raise DomainError(f"size must be a positive integer, got {n!r}")


# ---------------------------------------------------------------------------
# descriptor dispatch


@dataclass(frozen=True)
class InstanceDescriptor:
    name: str
    params: dict[str, Any] = field(default_factory=dict)


def build(desc: InstanceDescriptor | str, **params):
    """Construct the object named by ``desc``; see the module docstring."""
    if isinstance(desc, str):
        desc = InstanceDescriptor(desc, params)
    p = dict(desc.params)
    name = desc.name
    size = int(p.get("size", p.get("n", 3)))
    seed = int(p.get("seed", 0))
    if name in ("full-KX", "bounded-KX"):
        return full_kx(size)
    if name == "nonincreasing-chain":
        return nonincreasing_chain(size)
    if name == "concave-grid":
        return ConcaveGrid(tuple(p.get("coords", range(size))))
    if name == "example7-window":
        return example7_window(int(p.get("window", size)))
    if name == "metric-lipschitz":
        if "metric" in p:
            return metric_lipschitz(metric=p["metric"])
        return metric_lipschitz(coords=p.get("coords", range(size)))
    if name in ("order-indicator-strict", "order-indicator-nonstrict"):
        return order_indicator(size, strict=name.endswith("-strict"))
    if name == "random-semimetric":
        return random_semimetric(size, seed)
    if name == "random-metric":
        return random_metric(size, seed)
    if name == "random-span":
        return random_span(size, int(p.get("generators", size)), seed)
    if name == "random-wedge":
        return random_span(size, int(p.get("generators", size)), seed, WEDGE_CLOSED)
    raise DomainError(f"unknown instance {name!r}")


INSTANCE_NAMES = (
    "full-KX", "bounded-KX", "nonincreasing-chain", "concave-grid", "example7-window",
    "metric-lipschitz", "order-indicator-strict", "order-indicator-nonstrict",
    "random-semimetric", "random-metric", "random-span", "random-wedge",
)

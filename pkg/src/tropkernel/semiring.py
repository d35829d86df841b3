"""Complete idempotent semirings embedded in the extended real line.

Every supported semiring is a sub-structure of ``R ∪ {-inf, +inf}`` with
``⊕ = max`` and ``⊙ = +``, so a single numeric representation (float64 with
infinite sentinels) serves all of them:

========== =============================== ======= ======= =======
name       carrier                         zero    one     top
========== =============================== ======= ======= =======
rmax       R ∪ {-inf, +inf}                -inf    0       +inf
zmax       Z ∪ {-inf, +inf}                -inf    0       +inf
boolean    {-inf, 0}                       -inf    0       0
========== =============================== ======= ======= =======

The zero absorbs everything, top included: ``-inf ⊙ +inf = -inf``.

The scalar functions accept plain numbers or :class:`Scalar` values.  Array
helpers (``odot``, ``matmul``, ``residual`` ...) work elementwise on numpy
arrays and are what the rest of the package uses internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

NEG_INF = -math.inf
POS_INF = math.inf


class SemiringError(ValueError):
    """Raised on mixed semirings or values outside a semiring's carrier."""


@dataclass(frozen=True)
class Semiring:
    name: str
    integral: bool = False
    boolean: bool = False

    @property
    def zero(self) -> float:
        return NEG_INF

    @property
    def one(self) -> float:
        return 0.0

    @property
    def top(self) -> float:
        return 0.0 if self.boolean else POS_INF

    @property
    def is_semifield_on_finite_part(self) -> bool:
        return True

    def contains(self, value: float) -> bool:
        if math.isnan(value):
            return False
        if self.boolean:
            return value in (NEG_INF, 0.0)
        if self.integral and math.isfinite(value):
            return float(value).is_integer()
        return True

    def validate(self, values) -> np.ndarray:
        """Return ``values`` as a float array, raising if any entry is foreign."""
        arr = np.asarray(values, dtype=float)
        if np.isnan(arr).any():
            raise SemiringError("NaN is not a semiring element")
        if self.boolean:
            bad = ~((arr == NEG_INF) | (arr == 0.0))
        elif self.integral:
            fin = np.isfinite(arr)
            bad = fin & (arr != np.round(arr))
        else:
            bad = np.zeros(arr.shape, dtype=bool)
        if bad.any():
            raise SemiringError(
                f"value {arr[bad].flat[0]!r} is not an element of {self.name}"
            )
        return arr + 0.0  # folds -0.0 into 0.0 so equal vectors hash equally

    def __str__(self) -> str:
        return self.name


RMAX = Semiring("rmax-complete")
ZMAX = Semiring("zmax-complete", integral=True)
BOOLEAN = Semiring("boolean", boolean=True)

SEMIRINGS = {s.name: s for s in (RMAX, ZMAX, BOOLEAN)}
_ALIASES = {"rmax": RMAX, "zmax": ZMAX, "bool": BOOLEAN}


def get_semiring(name: str | Semiring) -> Semiring:
    if isinstance(name, Semiring):
        return name
    try:
        return SEMIRINGS.get(name) or _ALIASES[name]
    except KeyError:
        raise SemiringError(f"unknown semiring {name!r}") from None


@dataclass(frozen=True)
class Scalar:
    """A semiring element tagged with the semiring it belongs to."""

    value: float
    semiring: Semiring = RMAX

    def __post_init__(self):
        value = float(self.value)
        if not self.semiring.contains(value):
            raise SemiringError(f"{self.value!r} is not an element of {self.semiring}")
        object.__setattr__(self, "value", value)

    def __float__(self) -> float:
        return self.value

    def __repr__(self) -> str:
        return f"Scalar({format_scalar(self.value)}, {self.semiring.name})"


Number = Union[float, int, Scalar]


def _unwrap(*args: Number) -> tuple[list[float], Semiring | None]:
    tag = None
    values = []
    for a in args:
        if isinstance(a, Scalar):
            if tag is not None and tag != a.semiring:
                raise SemiringError(f"mixed semirings: {tag} and {a.semiring}")
            tag = a.semiring
            values.append(a.value)
        else:
            v = float(a)
            if math.isnan(v):
                raise SemiringError("NaN is not a semiring element")
            values.append(v)
    return values, tag


def _wrap(value: float, tag: Semiring | None) -> Number:
    return value if tag is None else Scalar(value, tag)


def _mul(a: float, b: float) -> float:
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


def oplus(a: Number, b: Number) -> Number:
    (x, y), tag = _unwrap(a, b)
    return _wrap(max(x, y), tag)


def odot(a: Number, b: Number) -> Number:
    (x, y), tag = _unwrap(a, b)
    return _wrap(_mul(x, y), tag)


def leq(a: Number, b: Number) -> bool:
    """Standard order: ``a <= b`` iff ``a ⊕ b == b``."""
    (x, y), _ = _unwrap(a, b)
    return max(x, y) == y


def sup_set(values: Iterable[Number], semiring: Semiring | None = None) -> Number:
    xs, tag = _unwrap(*values)
    return _wrap(max(xs, default=NEG_INF), tag)


def inf_set(values: Iterable[Number], semiring: Semiring | None = None) -> Number:
    """Greatest lower bound; the empty infimum is the top of ``semiring``."""
    xs, tag = _unwrap(*values)
    sr = tag or semiring or RMAX
    if semiring is not None and tag is not None and semiring != tag:
        raise SemiringError(f"mixed semirings: {tag} and {semiring}")
    return _wrap(min(xs, default=sr.top), tag)


def residual(a: Number, b: Number, semiring: Semiring | None = None) -> Number:
    """Largest ``c`` with ``a ⊙ c <= b``."""
    (x, y), tag = _unwrap(a, b)
    sr = tag or semiring or RMAX
    return _wrap(float(residual_array(x, y, sr)), tag)


# ---------------------------------------------------------------------------
# array helpers


def odot_array(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a + b
    return np.where((a == NEG_INF) | (b == NEG_INF), NEG_INF, out)


def matmul(a, b) -> np.ndarray:
    """Max-plus matrix product ``(a ⊙ b)[i, j] = max_k a[i, k] ⊙ b[k, j]``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} and {b.shape}")
    if a.shape[1] == 0:
        return np.full((a.shape[0], b.shape[1]), NEG_INF)
    return odot_array(a[:, :, None], b[None, :, :]).max(axis=1)


def vecmat(f, k) -> np.ndarray:
    """Row vector times matrix: ``y ↦ max_x f[x] ⊙ k[x, y]``."""
    return matmul(np.asarray(f, dtype=float)[None, :], k)[0]


def identity(n: int) -> np.ndarray:
    out = np.full((n, n), NEG_INF)
    np.fill_diagonal(out, 0.0)
    return out


def zeros(shape) -> np.ndarray:
    return np.full(shape, NEG_INF)


def residual_array(a, b, semiring: Semiring = RMAX) -> np.ndarray:
    """Elementwise residual ``a \\ b`` (largest ``c`` with ``a ⊙ c <= b``)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    top = semiring.top
    with np.errstate(invalid="ignore"):
        out = b - a
    out = np.where((a == POS_INF) & (b < POS_INF), NEG_INF, out)
    out = np.where((a == NEG_INF) | (b == POS_INF), top, out)
    return np.minimum(out, top)


def residual_vector(g, f, semiring: Semiring = RMAX) -> float:
    """Largest ``c`` with ``c ⊙ g <= f`` pointwise."""
    r = residual_array(g, f, semiring)
    return float(r.min()) if r.size else semiring.top


def is_invertible(values) -> np.ndarray:
    """Elements with a multiplicative inverse: finite reals (``one`` in boolean)."""
    return np.isfinite(np.asarray(values, dtype=float))


def format_scalar(value: float) -> float | int | str:
    value = float(value)
    if value == NEG_INF:
        return "-inf"
    if value == POS_INF:
        return "+inf"
    if value.is_integer():
        return int(value)
    return value


def parse_scalar(token, semiring: Semiring = RMAX) -> float:
    if isinstance(token, str):
        t = token.strip().lower()
        if t in ("-inf", "-infinity", "zero", "𝟘"):
            value = NEG_INF
        elif t in ("+inf", "inf", "infinity", "top", "⊤"):
            value = POS_INF
        else:
            value = float(t)
    elif isinstance(token, bool) or token is None:
        raise SemiringError(f"not a scalar: {token!r}")
    else:
        value = float(token)
    if not semiring.contains(value):
        raise SemiringError(f"{token!r} is not an element of {semiring}")
    return value

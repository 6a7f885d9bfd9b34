"""Transforms and norms on (F_q^d, dx), (F_q^d, dm) and (S, dsigma).

Conventions (fixed package-wide, and pinned by tests):

  hat(f)(m)    = q^(-d) * sum_x chi(-x.m) f(x)      dx-side transform
  hat_dm(g)(x) = sum_m chi(-x.m) g(m)               dm-side transform
  extend(f)(m) = (1/|S|) * sum_{x in S} chi(x.m) f(x)
  restrict(g)  = hat_dm(g) sampled on S

  ||f||_Lp(dx)^p     = q^(-d) sum |f|^p      (normalized counting measure)
  ||g||_Lr(dm)^r     = sum |g|^r             (counting measure)
  ||f||_Lp(S,dsig)^p = (1/|S|) sum_S |f|^p   (normalized surface measure)

All transforms are direct character sums (no FFT factorization); the hot
loop is backend.char_transform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import backend
from .characters import CharacterTable
from .field import Field, make_field
from .geometry import Paraboloid, Point, point_digit_rows, point_trace_rows

# Full extension matrices are cached only below this many entries.
MATRIX_CACHE_CAP = 1 << 20
GRID_CAP = 10**7
_CHUNK = 1 << 15


@dataclass(frozen=True)
class GridFunction:
    """Complex values on F_q^d in canonical grid order."""

    field: Field
    d: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != (self.field.q**self.d,):
            raise ValueError(f"grid function needs q^d = {self.field.q ** self.d} values")
        object.__setattr__(self, "values", vals)

    @property
    def grid_size(self) -> int:
        return self.field.q**self.d


@dataclass(frozen=True)
class SurfaceFunction:
    """Complex values on the paraboloid in its canonical order."""

    variety: Paraboloid
    values: np.ndarray

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.complex128)
        if vals.shape != (self.variety.size,):
            raise ValueError(f"surface function needs |S| = {self.variety.size} values")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class ExponentPair:
    p: float
    r: float

    def __post_init__(self):
        if self.p < 1 or self.r < 1:
            raise ValueError("exponents must be >= 1")

    @property
    def p_dual(self) -> float:
        return np.inf if self.p == 1 else self.p / (self.p - 1)

    @property
    def r_dual(self) -> float:
        return np.inf if self.r == 1 else self.r / (self.r - 1)


def ones_on(variety: Paraboloid) -> SurfaceFunction:
    return SurfaceFunction(variety, np.ones(variety.size))

def indicator(variety: Paraboloid, subset) -> SurfaceFunction:
    vals = np.zeros(variety.size)
    vals[np.asarray(subset.indices, dtype=np.int64)] = 1.0
    return SurfaceFunction(variety, vals)


# ---------------------------------------------------------------------------
# Grid enumeration caches


@lru_cache(maxsize=32)
def _grid_coord_rows(field: Field, d: int) -> np.ndarray:
    if field.q**d > GRID_CAP:
        raise ValueError(f"grid too large to materialize: q^d = {field.q ** d}")
    idx = np.arange(field.q**d, dtype=np.int64)
    return (idx[:, None] // field.q ** np.arange(d - 1, -1, -1, dtype=np.int64)) % field.q


@lru_cache(maxsize=32)
def _grid_digit_rows(field: Field, d: int) -> np.ndarray:
    return point_digit_rows(field, _grid_coord_rows(field, d))


@lru_cache(maxsize=32)
def _grid_trace_rows(field: Field, d: int) -> np.ndarray:
    return point_trace_rows(field, _grid_coord_rows(field, d))


@lru_cache(maxsize=16)
def _extension_matrix(variety: Paraboloid) -> np.ndarray | None:
    """Dense chi(x.m)/|S| matrix when small enough to keep around."""
    field, d = variety.field, variety.d
    if variety.grid_size * variety.size > MATRIX_CACHE_CAP:
        return None
    phases = (_grid_digit_rows(field, d).astype(np.int64) @ variety.trace_rows().T.astype(np.int64)) % field.p
    omega = np.exp(2j * np.pi * np.arange(field.p) / field.p)
    return omega[phases] / variety.size


# ---------------------------------------------------------------------------
# Transforms


def hat(f: GridFunction) -> GridFunction:
    """dx-side transform: hat(f)(m) = q^(-d) sum_x chi(-x.m) f(x)."""
    field, d = f.field, f.d
    out = backend.char_transform(
        _grid_trace_rows(field, d), f.values, _grid_digit_rows(field, d), field.p, -1
    )
    return GridFunction(field, d, out / field.q**d)


def hat_dm(g: GridFunction) -> GridFunction:
    """dm-side transform: hat_dm(g)(x) = sum_m chi(-x.m) g(m).

    This is the transform under which the punctured-surface kernel identity
    hat_dm((dsigma)^vee - delta_0) = q*1_S - 1 holds pointwise.
    """
    field, d = g.field, g.d
    out = backend.char_transform(
        _grid_trace_rows(field, d), g.values, _grid_digit_rows(field, d), field.p, -1
    )
    return GridFunction(field, d, out)


def _support(f: SurfaceFunction) -> tuple[np.ndarray, np.ndarray]:
    mask = f.values != 0
    if mask.all():
        return f.variety.trace_rows(), f.values
    return f.variety.trace_rows()[mask], f.values[mask]


def extend(f: SurfaceFunction) -> GridFunction:
    """Extension operator (f dsigma)^vee evaluated on the whole grid."""
    variety = f.variety
    field, d = variety.field, variety.d
    mat = _extension_matrix(variety)
    if mat is not None:
        return GridFunction(field, d, mat @ f.values)
    rows, weights = _support(f)
    out = backend.char_transform(
        rows, weights / variety.size, _grid_digit_rows(field, d), field.p, +1
    )
    return GridFunction(field, d, out)


def restrict(g: GridFunction, variety: Paraboloid) -> SurfaceFunction:
    """Restriction operator: hat_dm(g) sampled on S."""
    field, d = g.field, g.d
    out = backend.char_transform(
        _grid_trace_rows(field, d), g.values, variety.digit_rows(), field.p, -1
    )
    return SurfaceFunction(variety, out)


def extension_norm(f: SurfaceFunction, r: float) -> float:
    """||(f dsigma)^vee||_{L^r(dm)} without materializing the output grid."""
    variety = f.variety
    field, d = variety.field, variety.d
    mat = _extension_matrix(variety)
    if mat is not None:
        return norm_values(mat @ f.values, r, counting=True)
    rows, weights = _support(f)
    weights = weights / variety.size
    grid_digits = _grid_digit_rows(field, d)
    if r == np.inf:
        acc = 0.0
        for j0 in range(0, grid_digits.shape[0], _CHUNK):
            vals = backend.char_transform(rows, weights, grid_digits[j0 : j0 + _CHUNK], field.p, +1)
            acc = max(acc, float(np.abs(vals).max()))
        return acc
    acc = 0.0
    for j0 in range(0, grid_digits.shape[0], _CHUNK):
        vals = backend.char_transform(rows, weights, grid_digits[j0 : j0 + _CHUNK], field.p, +1)
        acc += float((np.abs(vals) ** r).sum())
    return acc ** (1.0 / r)


# ---------------------------------------------------------------------------
# Closed form for the transform of the surface measure


def sigma_inverse_closed_form_grid(variety: Paraboloid, table: CharacterTable | None = None) -> GridFunction:
    """(dsigma)^vee on the whole grid from the three-case closed form:

      1                                                     m = 0
      0                                                     m_d = 0, mbar != 0
      q^-(d-1) chi((mbar.mbar)/(-4 m_d)) eta(m_d)^(d-1) G_1^(d-1)   otherwise
    """
    field, d = variety.field, variety.d
    table = table or CharacterTable(field)
    coords = _grid_coord_rows(field, d)
    mbar, md = coords[:, :-1], coords[:, -1]
    norms = field.dot_arr(mbar, mbar)

    out = np.zeros(field.q**d, dtype=np.complex128)
    out[0] = 1.0
    nz = md != 0
    denom = field.neg_arr(field.mul_arr(field.scalar(4), md[nz]))
    shift = field.mul_arr(norms[nz], field.inv_arr(denom))
    eta_pow = table.eta_arr(md[nz]).astype(np.complex128) ** (d - 1)
    out[nz] = field.q ** (-(d - 1)) * table.chi_arr(shift) * eta_pow * (table.g1 ** (d - 1))
    return GridFunction(field, d, out)


def sigma_inverse_closed_form(variety: Paraboloid, m: Point | tuple, table: CharacterTable | None = None) -> complex:
    field, d = variety.field, variety.d
    coords = m.coords if isinstance(m, Point) else tuple(int(c) for c in m)
    if len(coords) != d:
        raise ValueError(f"point must have {d} coordinates")
    table = table or CharacterTable(field)
    mbar = np.asarray(coords[:-1], dtype=np.int64)
    md = coords[-1]
    if all(c == 0 for c in coords):
        return 1.0 + 0j
    if md == 0:
        return 0j
    norm2 = int(field.dot_arr(mbar, mbar))
    shift = field.div(norm2, field.neg(field.mul(field.scalar(4), md)))
    return field.q ** (-(d - 1)) * table.chi(shift) * (table.eta(md) ** (d - 1)) * (table.g1 ** (d - 1))


# ---------------------------------------------------------------------------
# Norms


def norm_values(values: np.ndarray, p: float, counting: bool, weight: float = 1.0) -> float:
    if p < 1:
        raise ValueError(f"exponent must be >= 1 or inf, got {p}")
    mags = np.abs(values)
    if p == np.inf:
        return float(mags.max()) if mags.size else 0.0
    total = float((mags**p).sum())
    if not counting:
        total *= weight
    return total ** (1.0 / p)


def norm_grid(f: GridFunction, p: float, measure: str = "dx") -> float:
    """L^p norm under dx (normalized, weight q^-d) or dm (counting)."""
    if measure == "dx":
        return norm_values(f.values, p, counting=False, weight=1.0 / f.grid_size)
    if measure == "dm":
        return norm_values(f.values, p, counting=True)
    raise ValueError(f"unknown measure {measure!r}")


def norm_surface(f: SurfaceFunction, p: float) -> float:
    return norm_values(f.values, p, counting=False, weight=1.0 / f.variety.size)


def l2_identity_check(f: SurfaceFunction) -> tuple[float, float]:
    """(sum_m |(f dsigma)^vee|^2 , (q^d/|S|) ||f||^2_L2(S,dsigma)) — equal for every f."""
    lhs = extension_norm(f, 2.0) ** 2
    variety = f.variety
    rhs = variety.grid_size / variety.size * norm_surface(f, 2.0) ** 2
    return float(lhs), float(rhs)


# ---------------------------------------------------------------------------
# JSON round-trips (arrays of [re, im] pairs with a (q, d) header)


def grid_to_json(f: GridFunction) -> str:
    payload = {
        "q": f.field.q,
        "p": f.field.p,
        "l": f.field.l,
        "d": f.d,
        "kind": "grid",
        "values": [[float(v.real), float(v.imag)] for v in f.values],
    }
    return json.dumps(payload, sort_keys=True)


def grid_from_json(text: str) -> GridFunction:
    payload = json.loads(text)
    field = make_field(payload["p"], payload["l"])
    vals = np.array([complex(re, im) for re, im in payload["values"]])
    return GridFunction(field, payload["d"], vals)


def surface_to_json(f: SurfaceFunction) -> str:
    v = f.variety
    payload = {
        "q": v.field.q,
        "p": v.field.p,
        "l": v.field.l,
        "d": v.d,
        "kind": "surface",
        "values": [[float(x.real), float(x.imag)] for x in f.values],
    }
    return json.dumps(payload, sort_keys=True)


def surface_from_json(text: str, variety: Paraboloid | None = None) -> SurfaceFunction:
    payload = json.loads(text)
    field = make_field(payload["p"], payload["l"])
    variety = variety or Paraboloid(field, payload["d"])
    vals = np.array([complex(re, im) for re, im in payload["values"]])
    return SurfaceFunction(variety, vals)

"""The paraboloid in F_q^d, its canonical enumeration, and subset machinery.

The surface is S = {(xbar, xbar.xbar) : xbar in F_q^(d-1)}, ordered
lexicographically by xbar (first coordinate most significant, elements in
canonical field order).  A surface index therefore decodes to xbar by
base-q digits, so subsets of S never require the full point list; this is
what lets sampling run on surfaces too large to enumerate.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import Field, FieldElement

ENUM_CAP = 10**8
# Hex bit-string serialization is refused beyond this many bits.
HEX_CAP = 1 << 24


@dataclass(frozen=True)
class Point:
    """A point of F_q^d as a tuple of canonical element indices."""

    field: Field
    coords: tuple[int, ...]

    @property
    def xbar(self) -> tuple[int, ...]:
        return self.coords[:-1]

    @property
    def xd(self) -> int:
        return self.coords[-1]

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self.field, c) for c in self.coords]

    def __repr__(self):
        return f"Point{self.coords}"


def _radix_powers(q: int, k: int) -> np.ndarray:
    return q ** np.arange(k - 1, -1, -1, dtype=np.int64)


def xbar_rows_from_surface_indices(field: Field, d: int, indices) -> np.ndarray:
    """Decode surface indices to (n, d-1) arrays of element indices."""
    idx = np.asarray(indices, dtype=np.int64)
    return (idx[:, None] // _radix_powers(field.q, d - 1)) % field.q


def surface_indices_from_xbar_rows(field: Field, d: int, rows) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.int64)
    return rows @ _radix_powers(field.q, d - 1)


def lift_xbar_rows(field: Field, rows) -> np.ndarray:
    """Append the paraboloid coordinate xbar.xbar to each row."""
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64))
    xd = field.dot_arr(rows, rows)
    return np.concatenate([rows, xd[:, None]], axis=1)


def point_digit_rows(field: Field, coord_rows: np.ndarray) -> np.ndarray:
    """Concatenate base-p digit vectors of each coordinate: (n, d*l) int8."""
    digs = field.digits(np.asarray(coord_rows, dtype=np.int64))
    n = digs.shape[0]
    return digs.reshape(n, -1).astype(np.int8)


def point_trace_rows(field: Field, coord_rows: np.ndarray) -> np.ndarray:
    """Concatenate per-coordinate trace rows, so that the digit/trace dot
    product of two points equals trace of their field dot product."""
    rows = np.asarray(coord_rows, dtype=np.int64)
    tr = field.trace_rows[rows]
    return tr.reshape(rows.shape[0], -1).astype(np.int8)


class Paraboloid:
    """Enumerated paraboloid with its canonical index map."""

    def __init__(self, field: Field, d: int, cap: int = ENUM_CAP):
        if d < 2:
            raise ValueError(f"dimension must be >= 2, got {d}")
        if field.q**d > cap:
            raise ValueError(
                f"enumeration budget exceeded: q^d = {field.q**d} > {cap}; "
                "use sampling for surfaces this large"
            )
        self.field = field
        self.d = d
        self.size = field.q ** (d - 1)
        self.xbar_rows = xbar_rows_from_surface_indices(field, d, np.arange(self.size))
        self.coord_rows = lift_xbar_rows(field, self.xbar_rows)
        self._digit_rows: np.ndarray | None = None
        self._trace_rows: np.ndarray | None = None

    def __len__(self) -> int:
        return self.size

    @property
    def grid_size(self) -> int:
        return self.field.q**self.d

    def point(self, i: int) -> Point:
        return Point(self.field, tuple(int(c) for c in self.coord_rows[i]))

    def contains(self, point: Point) -> bool:
        xbar = np.asarray(point.xbar, dtype=np.int64)
        return int(self.field.dot_arr(xbar, xbar)) == point.xd

    def index_of(self, point: Point) -> int:
        if not self.contains(point):
            raise ValueError(f"{point} is not on the paraboloid")
        return int(surface_indices_from_xbar_rows(self.field, self.d, np.asarray(point.xbar)[None, :])[0])

    def digit_rows(self) -> np.ndarray:
        if self._digit_rows is None:
            self._digit_rows = point_digit_rows(self.field, self.coord_rows)
        return self._digit_rows

    def trace_rows(self) -> np.ndarray:
        if self._trace_rows is None:
            self._trace_rows = point_trace_rows(self.field, self.coord_rows)
        return self._trace_rows

    def subset(self, indices) -> SurfaceSubset:
        return SurfaceSubset(self.field, self.d, indices)

    def full_subset(self) -> SurfaceSubset:
        return SurfaceSubset(self.field, self.d, np.arange(self.size))

    def __repr__(self):
        return f"Paraboloid(q={self.field.q}, d={self.d}, size={self.size})"


def build_paraboloid(field: Field, d: int, cap: int = ENUM_CAP) -> Paraboloid:
    return Paraboloid(field, d, cap=cap)


@dataclass(frozen=True)
class SurfaceSubset:
    """A subset of the paraboloid, stored as sorted canonical surface indices.

    Semantically a bit-set over the canonical ordering of S; hex round-trips
    are provided for report files (small surfaces only).
    """

    field: Field
    d: int
    indices: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        idx = np.unique(np.asarray(self.indices, dtype=np.int64))
        if idx.size and (idx[0] < 0 or idx[-1] >= self.surface_size):
            raise ValueError("surface index out of range")
        object.__setattr__(self, "indices", idx)

    @property
    def surface_size(self) -> int:
        return self.field.q ** (self.d - 1)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __contains__(self, i: int) -> bool:
        pos = np.searchsorted(self.indices, i)
        return pos < self.indices.size and self.indices[pos] == i

    def xbar_rows(self) -> np.ndarray:
        return xbar_rows_from_surface_indices(self.field, self.d, self.indices)

    def coord_rows(self) -> np.ndarray:
        return lift_xbar_rows(self.field, self.xbar_rows())

    def digit_rows(self) -> np.ndarray:
        return point_digit_rows(self.field, self.coord_rows())

    def points(self) -> list[Point]:
        return [Point(self.field, tuple(int(c) for c in row)) for row in self.coord_rows()]

    def bitmask(self) -> int:
        if self.surface_size > HEX_CAP:
            raise ValueError(f"bitmask refused for surfaces above {HEX_CAP} points")
        mask = 0
        for i in self.indices.tolist():
            mask |= 1 << i
        return mask

    def to_hex(self) -> str:
        nbytes = (self.surface_size + 7) // 8
        return self.bitmask().to_bytes(nbytes, "little").hex()

    @classmethod
    def from_hex(cls, field: Field, d: int, text: str) -> SurfaceSubset:
        mask = int.from_bytes(bytes.fromhex(text), "little")
        idx = [i for i in range(mask.bit_length()) if mask >> i & 1]
        return cls(field, d, np.asarray(idx, dtype=np.int64))

    @classmethod
    def from_xbar_rows(cls, field: Field, d: int, rows) -> SurfaceSubset:
        return cls(field, d, surface_indices_from_xbar_rows(field, d, rows))


def build_isotropic_subspace(field: Field, d: int) -> SurfaceSubset | None:
    """The subspace contained in the paraboloid when -1 = i^2 is a square.

    Even d >= 4: span of the paired pattern (s_1, i*s_1, ..., s_m, i*s_m, 0, 0)
    with m = (d-2)/2 pairs filling the first d-2 coordinates.  Odd d >= 3:
    m = (d-1)/2 pairs fill all of xbar.  Each point lies on S because
    s^2 + (i*s)^2 = 0.  Returns None when -1 is a nonsquare (q = 3 mod 4).
    """
    if d % 2 == 0 and d < 4:
        raise ValueError("even dimension must be >= 4")
    if d % 2 == 1 and d < 3:
        raise ValueError("odd dimension must be >= 3")
    i_idx = field.sqrt_of_minus_one()
    if i_idx is None:
        return None
    m = (d - 2) // 2 if d % 2 == 0 else (d - 1) // 2
    q = field.q
    grid = np.arange(q**m, dtype=np.int64)
    s = (grid[:, None] // _radix_powers(q, m)) % q
    rows = np.zeros((q**m, d - 1), dtype=np.int64)
    rows[:, 0 : 2 * m : 2] = s
    rows[:, 1 : 2 * m : 2] = field.mul_arr(i_idx, s)
    return SurfaceSubset.from_xbar_rows(field, d, rows)


def translate_subset(E: SurfaceSubset, tbar) -> SurfaceSubset:
    """Image of E under the surface symmetry xbar -> xbar + tbar."""
    tbar = np.asarray(tbar, dtype=np.int64)
    rows = E.field.add_arr(E.xbar_rows(), tbar[None, :])
    return SurfaceSubset.from_xbar_rows(E.field, E.d, rows)


def dilate_subset(E: SurfaceSubset, c: int) -> SurfaceSubset:
    """Image of E under the surface symmetry xbar -> c * xbar, c != 0."""
    if int(c) == 0:
        raise ValueError("dilation by zero collapses the subset")
    rows = E.field.mul_arr(E.xbar_rows(), int(c))
    return SurfaceSubset.from_xbar_rows(E.field, E.d, rows)


def necessary_condition_sides(H: SurfaceSubset, p: float, r: float) -> tuple[float, float]:
    """Both sides of the subspace obstruction for a norm bound at (p, r).

    left  = |H| / |S| * q^((d-n)/r)   (mass of the extension on the annihilator)
    right = (|H| / |S|)^(1/p)         (the L^p cost of the indicator witness)

    with n = log_q |H|.  A q-uniform bound forces left <= C * right, which
    pins r >= p(d-n) / ((p-1)(d-n-1)).
    """
    if len(H) == 0:
        raise ValueError("empty witness subset")
    q, d = H.field.q, H.d
    n = np.log(len(H)) / np.log(q)
    density = len(H) / H.surface_size
    left = density * q ** ((d - n) / r)
    right = density ** (1.0 / p)
    return float(left), float(right)


def sample_subset(field: Field, d: int, size: int, rng: np.random.Generator) -> SurfaceSubset:
    """Uniform random subset of S of the requested size (seeded, reproducible)."""
    space = field.q ** (d - 1)
    size = int(min(size, space))
    if size <= 0:
        return SurfaceSubset(field, d, np.empty(0, dtype=np.int64))
    if space <= 10**6:
        idx = rng.choice(space, size=size, replace=False)
        return SurfaceSubset(field, d, idx)
    chosen = np.unique(rng.integers(0, space, size=int(size * 1.2) + 8))
    while chosen.size < size:
        extra = rng.integers(0, space, size=size)
        chosen = np.unique(np.concatenate([chosen, extra]))
    return SurfaceSubset(field, d, rng.permutation(chosen)[:size])

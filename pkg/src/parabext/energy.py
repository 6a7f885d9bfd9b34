"""Additive energy of paraboloid subsets and its piecewise bound monitor.

The additive energy counts quadruples (x, y, z, w) in E^4 with x+y = z+w.
It is computed through the representation function r_E(v) = #{(x, y) : x+y=v}
as sum_v r_E(v)^2 (backend kernel), with a literal quadruple scan retained
as the small-case oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from . import backend
from .characters import CharacterTable
from .field import Field
from .fourier import _grid_coord_rows
from .geometry import (
    SurfaceSubset,
    build_isotropic_subspace,
    dilate_subset,
    sample_subset,
    translate_subset,
)

BRUTE_FORCE_CAP = 40


def additive_energy(E: SurfaceSubset) -> int:
    """#{(x,y,z,w) in E^4 : x+y = z+w}, exactly."""
    if len(E) == 0:
        return 0
    count = backend.pair_energy(E.digit_rows(), E.field.p)
    assert count <= len(E) ** 3, "quadruple count exceeded |E|^3"
    return count


def additive_energy_bruteforce(E: SurfaceSubset) -> int:
    """Literal quadruple enumeration; the independent oracle for small E."""
    n = len(E)
    if n > BRUTE_FORCE_CAP:
        raise ValueError(f"brute force capped at |E| <= {BRUTE_FORCE_CAP}")
    p = E.field.p
    pts = [tuple(int(v) for v in row) for row in E.digit_rows()]
    count = 0
    for x in pts:
        for y in pts:
            sxy = tuple((a + b) % p for a, b in zip(x, y))
            for z in pts:
                for w in pts:
                    if tuple((a + b) % p for a, b in zip(z, w)) == sxy:
                        count += 1
    return count


def representation_function(E: SurfaceSubset) -> dict[int, int]:
    """Sparse map: canonical grid index of v -> #{(x, y) in E^2 : x+y = v}."""
    n = len(E)
    if n == 0:
        return {}
    if n > 4096:
        raise ValueError("representation function is materialized for small subsets only")
    field, d = E.field, E.d
    rows = E.digit_rows().astype(np.int16)
    sums = (rows[:, None, :] + rows[None, :, :]) % field.p
    coord_idx = sums.reshape(n * n, d, field.l).astype(np.int64) @ field.p ** np.arange(field.l, dtype=np.int64)
    grid_idx = coord_idx @ field.q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    keys, counts = np.unique(grid_idx, return_counts=True)
    return {int(k): int(c) for k, c in zip(keys, counts)}


def l4_extension_norm_from_energy(E: SurfaceSubset) -> float:
    """||(1_E dsigma)^vee||_{L^4(dm)} = (q^(d/4) / |S|) * energy^(1/4)."""
    q, d = E.field.q, E.d
    return q ** (d / 4) / E.surface_size * additive_energy(E) ** 0.25


@dataclass
class EnergyBoundReport:
    """One subset's exact energy against the piecewise desk bound."""

    q: int
    d: int
    size: int
    energy: int
    trivial: float  # |E|^3
    branch_qinv: float  # |E|^3 / q
    branch_mid: float  # q^((d-2)/4) |E|^(5/2), or q^((d-3)/4) in the odd case
    branch_square: float  # q^((d-2)/2) |E|^2
    bound: float
    ratio: float
    branch: str
    parity: str
    precondition_ok: bool
    warning: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _parity_precondition(field: Field, d: int, parity: str) -> tuple[bool, str]:
    if parity == "even":
        if d < 4 or d % 2:
            return False, f"even-dimension bound expects even d >= 4, got d={d}"
        return True, ""
    if d % 2 == 0 or d < 3:
        return False, f"odd-dimension bound expects odd d >= 3, got d={d}"
    if field.p % 4 != 3:
        return False, f"odd-dimension bound expects p = 3 (mod 4), got p={field.p}"
    if (field.l * (d - 1)) % 4 == 0:
        return False, f"odd-dimension bound expects l(d-1) not divisible by 4, got l(d-1)={field.l * (d - 1)}"
    return True, ""


def energy_bound_report(E: SurfaceSubset, parity: str = "auto") -> EnergyBoundReport:
    field, d = E.field, E.d
    if parity == "auto":
        parity = "even" if d % 2 == 0 else "odd"
    ok, warning = _parity_precondition(field, d, parity)

    n = len(E)
    q = field.q
    energy = additive_energy(E)
    trivial = float(n) ** 3
    qinv = trivial / q
    mid_exp = (d - 2) / 4 if parity == "even" else (d - 3) / 4
    mid = q**mid_exp * float(n) ** 2.5
    square = q ** ((d - 2) / 2) * float(n) ** 2
    piecewise = qinv + mid + square
    bound = min(trivial, piecewise)
    ratio = 0.0 if n == 0 else energy / bound
    if n == 0:
        branch = "empty"
    elif trivial <= piecewise:
        branch = "cube"
    else:
        branch = ("qinv_cube", "five_halves", "square")[int(np.argmax([qinv, mid, square]))]
    return EnergyBoundReport(
        q=q, d=d, size=n, energy=energy, trivial=trivial, branch_qinv=qinv,
        branch_mid=mid, branch_square=square, bound=bound, ratio=float(ratio),
        branch=branch, parity=parity, precondition_ok=ok, warning=warning,
    )


# ---------------------------------------------------------------------------
# Second-moment decomposition behind the energy bound


@dataclass
class SecondMomentTerms:
    """Split of M(xbar) = sum_z |sum_{y in Ebar, s != 0} chi(s*Q(xbar,y,z))|^2
    into equal-parameter (diag) and unequal-parameter (offdiag) parts, where
    Q(x,y,z) = x.y - y.z - x.z + z.z detects x+y-z landing back on S."""

    diag_direct: complex
    diag_closed: int
    offdiag_direct: complex
    offdiag_closed: complex
    total: float
    gauss_power: complex
    gauss_power_expected: complex | None


def second_moment_decomposition(
    E: SurfaceSubset, xbar, table: CharacterTable | None = None
) -> SecondMomentTerms:
    field, d = E.field, E.d
    q = field.q
    table = table or CharacterTable(field)
    xb = np.asarray([int(c) for c in xbar], dtype=np.int64)
    if xb.shape != (d - 1,):
        raise ValueError(f"xbar must have {d - 1} coordinates")
    ebar = E.xbar_rows()
    m = ebar.shape[0]
    if m == 0:
        raise ValueError("empty subset")

    zbar = _grid_coord_rows(field, d - 1)
    xy = field.dot_arr(np.broadcast_to(xb, ebar.shape), ebar)  # (m,)
    yz = field.dot_arr(ebar[:, None, :], zbar[None, :, :])  # (m, Z)
    xz = field.dot_arr(np.broadcast_to(xb, zbar.shape), zbar)  # (Z,)
    zz = field.dot_arr(zbar, zbar)  # (Z,)
    base = field.add_arr(field.sub_arr(field.sub_arr(xy[:, None], yz), xz[None, :]), zz[None, :])

    inner = np.empty((q - 1, zbar.shape[0]), dtype=np.complex128)
    for s in range(1, q):
        inner[s - 1] = table.chi_table[field.mul_arr(s, base)].sum(axis=0)
    gram = inner @ inner.conj().T
    diag_direct = complex(np.trace(gram))
    offdiag_direct = complex(gram.sum() - np.trace(gram))
    total = float(abs(gram.sum()))
    diag_closed = q ** (d - 1) * (q - 1) * m

    # Collapse the z-sum of the offdiagonal part with the completed-square
    # closed form (parameters a = s, b = s'/s), leaving the a, b sums explicit.
    g_pow = table.g1 ** (d - 1)
    dyx = field.dot_arr(ebar, np.broadcast_to(xb, ebar.shape))  # (m,)
    acc = 0j
    four = field.scalar(4)
    for b_idx in range(2, q):
        one_minus_b = field.sub(1, b_idx)
        vy = field.neg_arr(field.add_arr(ebar, xb[None, :]))  # (m, d-1)
        wy = field.mul_arr(b_idx, field.add_arr(ebar, xb[None, :]))  # (m, d-1)
        v = field.add_arr(vy[:, None, :], wy[None, :, :])  # (m, m, d-1)
        vnorm = field.dot_arr(v, v)  # (m, m)
        scale = field.inv(field.neg(field.mul(four, one_minus_b)))
        lin = field.sub_arr(dyx[:, None], field.mul_arr(b_idx, dyx[None, :]))
        gamma = field.add_arr(field.mul_arr(vnorm, scale), lin)
        eta_b = complex(table.eta(one_minus_b)) ** (d - 1)
        inner_ab = 0j
        for a in range(1, q):
            coeff = complex(table.eta(a)) ** (d - 1)
            inner_ab += coeff * table.chi_table[field.mul_arr(a, gamma)].sum()
        acc += eta_b * inner_ab
    offdiag_closed = g_pow * acc

    expected = None
    ok, _ = _parity_precondition(field, d, "odd")
    if d % 2 == 1 and ok:
        expected = complex(-(q ** ((d - 1) // 2)))
    return SecondMomentTerms(
        diag_direct=diag_direct,
        diag_closed=diag_closed,
        offdiag_direct=offdiag_direct,
        offdiag_closed=offdiag_closed,
        total=total,
        gauss_power=g_pow,
        gauss_power_expected=expected,
    )


# ---------------------------------------------------------------------------
# Seeded sweeps across regime densities


def regime_size_grid(field: Field, d: int, parity: str = "auto", size_cap: int | None = None) -> list[int]:
    """Subset sizes q^e straddling each boundary of the piecewise bound."""
    if parity == "auto":
        parity = "even" if d % 2 == 0 else "odd"
    q = field.q
    surface = q ** (d - 1)
    boundaries = [(d - 2) / 2, (d - 1) / 2, (d + 1) / 2]
    if parity == "even":
        boundaries.append((d + 2) / 2)
    exps = {0.5, 1.0, 1.5} | {b + off for b in boundaries for off in (-0.5, 0.0, 0.5)}
    cap = surface if size_cap is None else min(size_cap, surface)
    sizes = sorted({max(2, min(int(round(q**e)), cap)) for e in exps if e <= d - 1 + 1e-9})
    return sizes


def _allocate(samples: int, sizes: list[int]) -> list[int]:
    # Many cheap small subsets, few expensive large ones; exact total.
    weights = np.array([s**-0.75 for s in sizes])
    raw = weights / weights.sum() * samples
    reps = np.maximum(np.floor(raw).astype(int), 1)
    order = np.argsort(raw - np.floor(raw))[::-1]
    i = 0
    while reps.sum() < samples:
        reps[order[i % len(sizes)]] += 1
        i += 1
    while reps.sum() > samples and reps.max() > 0:
        big = int(np.argmax(reps))
        reps[big] -= 1
    return reps.tolist()


def structured_subsets(field: Field, d: int, rng: np.random.Generator) -> list[tuple[str, SurfaceSubset]]:
    """Deterministic witnesses: the full surface (when enumerable), the
    isotropic subspace with a few translates/dilates, singletons and pairs."""
    out: list[tuple[str, SurfaceSubset]] = []
    surface = field.q ** (d - 1)
    if surface <= 10**5:
        out.append(("full_surface", SurfaceSubset(field, d, np.arange(surface))))
    H = build_isotropic_subspace(field, d) if (d >= 4 or d % 2 == 1) else None
    if H is not None:
        out.append(("subspace", H))
        tbar = rng.integers(0, field.q, size=d - 1)
        out.append(("subspace_translate", translate_subset(H, tbar)))
        c = int(rng.integers(2, field.q)) if field.q > 2 else 1
        out.append(("subspace_dilate", dilate_subset(H, c)))
    out.append(("singleton", sample_subset(field, d, 1, rng)))
    out.append(("pair", sample_subset(field, d, 2, rng)))
    return out


def run_energy_sweep(
    field: Field,
    d: int,
    samples: int,
    seed: int,
    parity: str = "auto",
    size_cap: int | None = None,
    include_structured: bool = True,
    densities: list[float] | None = None,
) -> list[dict]:
    """Seeded random subsets at regime densities plus structured families;
    one report row per subset.  ``densities`` overrides the default size
    exponents (sizes are round(q^e), clipped to the surface and the cap)."""
    rng = np.random.default_rng(seed)
    if densities is None:
        sizes = regime_size_grid(field, d, parity, size_cap)
    else:
        surface = field.q ** (d - 1)
        cap = surface if size_cap is None else min(size_cap, surface)
        sizes = sorted({max(1, min(int(round(field.q**e)), cap)) for e in densities})
    rows: list[dict] = []
    for size, reps in zip(sizes, _allocate(samples, sizes)):
        for _ in range(reps):
            E = sample_subset(field, d, size, rng)
            rep = energy_bound_report(E, parity)
            row = rep.as_dict()
            row["family"] = "random"
            rows.append(row)
    if include_structured:
        for name, E in structured_subsets(field, d, rng):
            if size_cap is not None and len(E) > size_cap:
                continue
            rep = energy_bound_report(E, parity)
            row = rep.as_dict()
            row["family"] = name
            rows.append(row)
    return rows

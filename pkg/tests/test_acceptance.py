"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with  pytest tests/test_acceptance.py -v -s  to see the per-criterion
lines.  Tolerances are pinned here and nowhere else.
"""

import time

import numpy as np
import pytest

from parabext import (
    CharacterTable,
    SurfaceSubset,
    additive_energy,
    additive_energy_bruteforce,
    bochner_riesz_kernel,
    build_isotropic_subspace,
    build_paraboloid,
    extend,
    gauss_sum_closed_form,
    indicator,
    kernel_transform_identity_error,
    l2_identity_check,
    l4_extension_norm_from_energy,
    make_field,
    norm_grid,
    ones_on,
    parse_prime_power,
    quadratic_exponential_sum,
    ratio,
    sample_subset,
    second_moment_decomposition,
    sigma_inverse_closed_form_grid,
    stein_tomas_checks,
    subspace_witness_ratio,
)
from parabext.cli import main
from parabext.energy import run_energy_sweep
from parabext.field import odd_prime_powers
from parabext.fourier import hat
from parabext.norms import loglog_slope, random_grid_function, random_surface_function
from parabext.reports import strip_timestamp


def report_line(num: int, name: str, ok: bool, detail: str) -> None:
    print(f"[criterion {num:2d}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_1_gauss_sum_exactness():
    t0 = time.perf_counter()
    worst = 0.0
    qs = odd_prime_powers(121)
    for q in qs:
        field = make_field(*parse_prime_power(q))
        table = CharacterTable(field)
        worst = max(worst, abs(table.gauss_sum(1) - gauss_sum_closed_form(field)))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 1.0
    report_line(1, "Gauss-sum exactness", ok,
                f"{len(qs)} fields q<=121, max |diff|={worst:.2e}, {elapsed:.3f}s (<1s)")


def test_criterion_2_surface_transform_closed_form():
    t0 = time.perf_counter()
    worst = 0.0
    checked = 0
    for q in (3, 5, 7, 9):
        for d in (2, 3, 4):
            if q**d > 10**6:
                continue
            field = make_field(*parse_prime_power(q))
            variety = build_paraboloid(field, d)
            direct = extend(ones_on(variety)).values
            closed = sigma_inverse_closed_form_grid(variety).values
            worst = max(worst, float(np.abs(direct - closed).max()))
            checked += direct.size
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-8 and elapsed < 60.0
    report_line(2, "surface-measure transform closed form", ok,
                f"{checked} grid points across 12 configs, max |diff|={worst:.2e}, {elapsed:.1f}s (<60s)")


EXHAUSTIVE_SQUARE_CONFIGS = [
    (3, 1), (3, 2), (3, 3), (3, 4), (5, 1), (5, 2), (5, 3), (7, 1), (7, 2),
    (9, 1), (9, 2), (13, 1), (13, 2), (25, 1), (27, 1), (49, 1), (81, 1), (121, 1),
]
RANDOM_SQUARE_CONFIGS = [(5, 6), (3, 9), (9, 5), (7, 5)]


def test_criterion_3_completed_square_sums():
    worst = 0.0
    exhaustive_cases = 0
    for q, k in EXHAUSTIVE_SQUARE_CONFIGS:
        assert q**k <= 10**4
        field = make_field(*parse_prime_power(q))
        table = CharacterTable(field)
        betas = (np.arange(q**k)[:, None] // q ** np.arange(k - 1, -1, -1)) % q
        for t in range(1, q):
            for beta in betas:
                qs = quadratic_exponential_sum(table, t, beta)
                worst = max(worst, abs(qs.direct - qs.closed))
                exhaustive_cases += 1
    rng = np.random.default_rng(31)
    random_cases = 0
    for q, k in RANDOM_SQUARE_CONFIGS:
        assert q**k > 10**4
        field = make_field(*parse_prime_power(q))
        table = CharacterTable(field)
        for _ in range(250):
            t = int(rng.integers(1, q))
            beta = rng.integers(0, q, size=k)
            qs = quadratic_exponential_sum(table, t, beta)
            worst = max(worst, abs(qs.direct - qs.closed))
            random_cases += 1
    ok = worst < 1e-9 and random_cases >= 1000
    report_line(3, "completed-square sums", ok,
                f"{exhaustive_cases} exhaustive (t,beta) with q^k<=1e4, "
                f"{random_cases} random beyond, max |diff|={worst:.2e}")


L2_CONFIGS = [(3, 2), (3, 3), (5, 2), (5, 3), (7, 2), (9, 2), (3, 4), (5, 4)]


def test_criterion_4_l2_identity_and_plancherel():
    rng = np.random.default_rng(4)
    worst_identity = 0.0
    worst_plancherel = 0.0
    worst_ratio = 0.0
    for q, d in L2_CONFIGS:
        field = make_field(*parse_prime_power(q))
        variety = build_paraboloid(field, d)
        root_q = np.sqrt(q)
        for _ in range(100):
            f = random_surface_function(variety, rng)
            lhs, rhs = l2_identity_check(f)
            worst_identity = max(worst_identity, abs(lhs - rhs) / rhs)
            worst_ratio = max(worst_ratio, abs(ratio(f, 2, 2) - root_q) / root_q)
            g = random_grid_function(field, d, rng)
            worst_plancherel = max(
                worst_plancherel,
                abs(norm_grid(hat(g), 2, "dm") - norm_grid(g, 2, "dx")) / norm_grid(g, 2, "dx"),
            )
    worst = max(worst_identity, worst_plancherel, worst_ratio)
    ok = worst < 1e-9
    report_line(4, "L2 identity and Plancherel", ok,
                f"100 random f per config x {len(L2_CONFIGS)} configs, "
                f"max rel dev={worst:.2e}; ratio(f,2,2)=sqrt(q) dev={worst_ratio:.2e}")


def test_criterion_5_energy_oracle_equivalence():
    rng = np.random.default_rng(5)
    checked = 0
    for q in (3, 5):
        field = make_field(q)
        for d in (2, 3, 4):
            surface = q ** (d - 1)
            if 2**surface <= 512:
                for mask in range(1, 2**surface):
                    idx = [i for i in range(surface) if mask >> i & 1]
                    if len(idx) > 12:
                        continue
                    E = SurfaceSubset(field, d, idx)
                    assert additive_energy(E) == additive_energy_bruteforce(E)
                    checked += 1
            else:
                for _ in range(60):
                    size = int(rng.integers(1, 13))
                    E = sample_subset(field, d, size, rng)
                    assert additive_energy(E) == additive_energy_bruteforce(E)
                    checked += 1
    f3 = make_field(3)
    full = build_paraboloid(f3, 2).full_subset()
    assert additive_energy(full) == 15

    worst = 0.0
    l4_cases = 0
    for q, d in [(3, 2), (3, 3), (5, 2), (5, 3), (3, 4), (5, 4)]:
        field = make_field(q)
        variety = build_paraboloid(field, d)
        for _ in range(84):
            size = int(rng.integers(1, min(30, len(variety)) + 1))
            E = sample_subset(field, d, size, rng)
            via_energy = l4_extension_norm_from_energy(E)
            direct = norm_grid(extend(indicator(variety, E)), 4, "dm")
            worst = max(worst, abs(via_energy - direct) / direct)
            l4_cases += 1
    ok = worst < 1e-9 and l4_cases >= 500
    report_line(5, "energy oracle equivalence", ok,
                f"{checked} subsets vs quadruple scan, full-surface value 15, "
                f"{l4_cases} L4 cross-checks, max rel dev={worst:.2e}")


def _max_ratio_sweep(field, d, samples, seed, size_cap=None):
    rows = run_energy_sweep(field, d, samples=samples, seed=seed, size_cap=size_cap)
    return max(r["ratio"] for r in rows), len(rows)


def test_criterion_6_energy_bound_even_dimension():
    c_desk = 16.0
    qs = [3, 5, 7, 9, 13]
    maxima = []
    counts = []
    for q in qs:
        field = make_field(*parse_prime_power(q))
        max_ratio, n = _max_ratio_sweep(field, 4, samples=1000, seed=600 + q)
        maxima.append(max_ratio)
        counts.append(n)
    slope = loglog_slope(qs, maxima)
    ok = max(maxima) <= c_desk and slope <= 0.1 and min(counts) >= 1000
    report_line(6, "energy bound monitoring d=4", ok,
                f"q={qs}, subsets/q>={min(counts)}, max ratio={max(maxima):.3f} (<=16), "
                f"log-log slope={slope:.4f} (<=0.1)")


def test_criterion_7_energy_bound_odd_dimension():
    c_desk = 16.0
    results = {}
    field3 = make_field(3)
    results[3] = _max_ratio_sweep(field3, 7, samples=1000, seed=700)
    field27 = make_field(3, 3)
    results[27] = _max_ratio_sweep(field27, 7, samples=1000, seed=727, size_cap=4096)
    maxima = [results[q][0] for q in (3, 27)]
    counts = [results[q][1] for q in (3, 27)]
    slope = loglog_slope([3, 27], maxima)
    ok = max(maxima) <= c_desk and slope <= 0.1 and min(counts) >= 1000
    report_line(7, "energy bound monitoring d=7 (odd branch)", ok,
                f"q=3: max={results[3][0]:.3f} ({results[3][1]} subsets); "
                f"q=27 capped |E|<=4096: max={results[27][0]:.3f} ({results[27][1]} subsets); "
                f"slope={slope:.4f} (<=0.1)")


def test_criterion_8_subspace_sharpness():
    qs = [5, 13, 17]
    p0 = 1.6
    below = [subspace_witness_ratio(make_field(q), 4, p0 - 0.1, 4.0) for q in qs]
    at = [subspace_witness_ratio(make_field(q), 4, p0, 4.0) for q in qs]
    slope = loglog_slope(qs, below)
    strictly_increasing = below[0] < below[1] < below[2]
    within_factor_4 = max(at) / min(at) <= 4.0
    ok = strictly_increasing and slope >= 0.05 and within_factor_4
    report_line(8, "subspace witness sharpness", ok,
                f"below endpoint: {[f'{v:.4f}' for v in below]}, slope={slope:.4f} (>=0.05); "
                f"at endpoint spread factor={max(at) / min(at):.4f} (<=4)")


def test_criterion_9_kernel_l2_bound_and_identity():
    rng = np.random.default_rng(9)
    worst_identity = 0.0
    violations = 0
    total = 0
    for q in (3, 5):
        field = make_field(q)
        variety = build_paraboloid(field, 4)
        K = bochner_riesz_kernel(variety)
        worst_identity = max(worst_identity, kernel_transform_identity_error(variety, K))
        for _ in range(200):
            g = random_grid_function(field, 4, rng)
            row = stein_tomas_checks(g, K)
            total += 1
            if not row["l2_ok"]:
                violations += 1
    ok = violations == 0 and worst_identity < 1e-9
    report_line(9, "kernel convolution L2 bound and transform identity", ok,
                f"{total} random g, {violations} violations of ||g*K||_2 <= q||g||_2; "
                f"max |K_hat - (q*1_S - 1)|={worst_identity:.2e}")


def test_criterion_10_second_moment_decomposition():
    rng = np.random.default_rng(10)
    worst_ii = 0.0
    i_failures = 0
    sign_failures = 0
    cases = 0

    def run_case(field, d, size):
        nonlocal worst_ii, i_failures, sign_failures, cases
        E = sample_subset(field, d, size, rng)
        xbar = tuple(int(c) for c in E.xbar_rows()[int(rng.integers(len(E)))])
        terms = second_moment_decomposition(E, xbar)
        if abs(terms.diag_direct - terms.diag_closed) > 1e-6 or \
                round(terms.diag_direct.real) != terms.diag_closed:
            i_failures += 1
        worst_ii = max(worst_ii, abs(terms.offdiag_direct - terms.offdiag_closed))
        if terms.gauss_power_expected is not None:
            if abs(terms.gauss_power - terms.gauss_power_expected) > 1e-8:
                sign_failures += 1
        cases += 1

    for _ in range(25):
        run_case(make_field(3), 4, int(rng.integers(2, 9)))
        run_case(make_field(5), 4, int(rng.integers(2, 11)))
        run_case(make_field(3), 7, int(rng.integers(2, 13)))
        run_case(make_field(3), 7, int(rng.integers(2, 13)))
    ok = i_failures == 0 and worst_ii < 1e-8 and sign_failures == 0 and cases == 100
    report_line(10, "second-moment decomposition", ok,
                f"{cases} cases: diagonal term integer-exact, offdiagonal "
                f"max |direct-closed|={worst_ii:.2e} (<1e-8), Gauss-power sign checks clean")


def test_criterion_11_sweep_determinism_and_runtime(tmp_path):
    t0 = time.perf_counter()
    texts = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        code = main(["sweep", "--q", "3,5", "--d", "4", "--seed", "7", "--out", str(path)])
        assert code == 0
        texts.append(strip_timestamp(path.read_text()))
    elapsed = time.perf_counter() - t0
    ok = texts[0] == texts[1] and elapsed < 600.0
    report_line(11, "sweep determinism and runtime", ok,
                f"two runs byte-identical modulo timestamp "
                f"({len(texts[0])} bytes), {elapsed:.1f}s (<600s)")

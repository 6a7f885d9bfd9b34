import numpy as np
import pytest

from parabext import (
    GridFunction,
    SurfaceFunction,
    SurfaceSubset,
    bochner_riesz_kernel,
    build_isotropic_subspace,
    build_paraboloid,
    convolve_dm,
    endpoint_exponents,
    estimate_extension_constant,
    extend,
    extension_norm,
    indicator,
    kernel_transform_identity_error,
    l4_extension_norm_from_energy,
    make_field,
    norm_grid,
    norm_surface,
    ones_on,
    ratio,
    restrict,
    sample_subset,
    stein_tomas_checks,
    subspace_witness_ratio,
)
from parabext.norms import (
    _Budget,
    _ascend,
    endpoint_sweep,
    family_admits,
    loglog_slope,
    random_grid_function,
    random_surface_function,
)


@pytest.fixture(scope="module")
def v32():
    return build_paraboloid(make_field(3), 2)


@pytest.fixture(scope="module")
def v54():
    return build_paraboloid(make_field(5), 4)


def test_ratio_constant_function_l2(v32, rng):
    assert ratio(ones_on(v32), 2, 2) ** 2 == pytest.approx(3.0, rel=1e-12)
    f = random_surface_function(v32, rng)
    assert ratio(f, 2, 2) == pytest.approx(np.sqrt(3), rel=1e-12)


def test_ratio_singleton_closed_form(v32):
    f = indicator(v32, SurfaceSubset(v32.field, 2, [1]))
    for p, r in [(2.0, 4.0), (1.6, 4.0), (2.0, 2.0)]:
        expected = 3 ** (2 / r) * 3 ** (1 / p - 1)
        assert ratio(f, p, r) == pytest.approx(expected, rel=1e-10)


def test_ratio_matches_energy_route(v54, rng):
    E = sample_subset(v54.field, 4, 9, rng)
    f = indicator(v54, E)
    expected = l4_extension_norm_from_energy(E) / (len(E) / len(v54)) ** (1 / 2)
    assert ratio(f, 2, 4) == pytest.approx(expected, rel=1e-10)


def test_ratio_rejects_zero(v32):
    with pytest.raises(ValueError):
        ratio(SurfaceFunction(v32, np.zeros(3)), 2, 2)


def test_estimate_exact_at_l2(v32):
    est = estimate_extension_constant(v32, 2, 2, budget=300, seed=1)
    assert est.estimate == pytest.approx(np.sqrt(3), rel=1e-9)


def test_estimate_dominates_exhaustive_characteristic_pool(v32):
    est = estimate_extension_constant(v32, 2, 4, budget=500, seed=1)
    subsets = [[0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2]]
    best_char = max(ratio(indicator(v32, SurfaceSubset(v32.field, 2, s)), 2, 4) for s in subsets)
    assert est.estimate >= best_char - 1e-12
    assert est.restricted_char_sup == pytest.approx(best_char, rel=1e-12)


def test_estimate_recompute_bit_consistent(v54):
    est = estimate_extension_constant(v54, 1.6, 4.0, budget=120, seed=3)
    assert est.recompute() == est.estimate


def test_estimate_budget_flag(v54):
    est = estimate_extension_constant(v54, 1.6, 4.0, budget=5, seed=3)
    assert est.budget_exhausted
    assert est.estimate > 0


def test_estimate_monotone_on_common_pool(v32, rng):
    # ratio is pointwise monotone in each exponent on a fixed witness pool
    pool = [random_surface_function(v32, rng) for _ in range(12)]
    pool.append(ones_on(v32))
    for r in (2.0, 4.0):
        sup_16 = max(ratio(f, 1.6, r) for f in pool)
        sup_20 = max(ratio(f, 2.0, r) for f in pool)
        assert sup_20 <= sup_16 + 1e-12
    for f in pool:
        assert ratio(f, 2.0, 4.0) <= ratio(f, 2.0, 2.0) + 1e-12


def test_ascent_stationarity(v32, rng):
    f0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    f_opt, _ = _ascend(v32, 1.6, 4.0, f0, _Budget(100_000), max_iter=5000, rel_gain=1e-13)

    def objective(vec):
        return np.log(ratio(SurfaceFunction(v32, vec), 1.6, 4.0))

    h = 1e-6
    grad = []
    for j in range(3):
        for delta in (h, 1j * h):
            up, down = f_opt.copy(), f_opt.copy()
            up[j] += delta
            down[j] -= delta
            grad.append((objective(up) - objective(down)) / (2 * h))
    assert np.linalg.norm(grad) < 1e-4


def test_duality_constructive(v32, rng):
    # restriction ratio of a dm-side witness is dominated by the extension
    # ratio of its Hoelder dual, hence by the estimate
    p, r = 1.6, 4.0
    p_dual, r_dual = p / (p - 1), r / (r - 1)
    best_restriction = 0.0
    for _ in range(15):
        mask = rng.random(9) < 0.4
        if not mask.any():
            continue
        g = GridFunction(v32.field, 2, mask.astype(complex))
        ghat = restrict(g, v32)
        rest_ratio = norm_surface(ghat, p_dual) / norm_grid(g, r_dual, "dm")
        best_restriction = max(best_restriction, rest_ratio)
        mags = np.abs(ghat.values)
        dual = np.where(mags > 0, ghat.values * mags ** (p_dual - 2), 0)
        if not np.any(dual):
            continue
        assert ratio(SurfaceFunction(v32, dual), p, r) >= rest_ratio * (1 - 1e-9)
    est = estimate_extension_constant(v32, p, r, budget=3000, seed=2)
    assert best_restriction <= est.estimate * (1 + 1e-6)


def test_endpoint_exponents_d4():
    p0, r4 = endpoint_exponents("p4", 4)
    assert p0 == pytest.approx(1.6)
    assert r4 == 4.0
    p2, r0 = endpoint_exponents("2r", 4)
    assert p2 == 2.0
    assert r0 == pytest.approx(3.2)


def test_family_admission():
    assert family_admits("p4", make_field(5), 4)[0]
    assert not family_admits("p4", make_field(5), 3)[0]
    assert family_admits("odd", make_field(3), 7)[0]
    assert not family_admits("odd", make_field(5), 7)[0]  # p = 1 mod 4
    assert not family_admits("odd", make_field(3, 2), 7)[0]  # l(d-1) = 12
    assert family_admits("odd", make_field(3, 3), 7)[0]  # l(d-1) = 18


def test_subspace_witness_sharpness_values():
    for q in (5, 13, 17):
        field = make_field(q)
        assert subspace_witness_ratio(field, 4, 1.6, 4.0) == pytest.approx(1.0, rel=1e-9)
        assert subspace_witness_ratio(field, 4, 1.5, 4.0) == pytest.approx(q ** (1 / 12), rel=1e-9)
    assert subspace_witness_ratio(make_field(3), 4, 1.6, 4.0) is None


def test_endpoint_sweep_rows():
    fields = [make_field(5), make_field(13)]
    rows = endpoint_sweep("p4", fields, 4, budget=60, seed=0)
    endpoints = [r for r in rows if r["kind"] == "endpoint"]
    assert [r["q"] for r in endpoints] == [5, 13]
    subs = [r for r in rows if r["kind"] == "subspace_sub_endpoint"]
    assert len(subs) == 2 and subs[1]["estimate"] > subs[0]["estimate"]
    with pytest.raises(ValueError):
        endpoint_sweep("p4", [make_field(5)], 3)


def test_endpoint_estimates_stay_desk_bounded():
    fields = [make_field(3), make_field(5), make_field(7)]
    rows = endpoint_sweep("p4", fields, 4, budget=250, seed=0)
    endpoints = [(r["q"], r["estimate"]) for r in rows if r["kind"] == "endpoint"]
    assert all(v <= 4.0 for _, v in endpoints)
    slope = loglog_slope([q for q, _ in endpoints], [v for _, v in endpoints])
    assert slope <= 0.2


def test_loglog_slope():
    qs = [5, 13, 17]
    vals = [q**0.25 for q in qs]
    assert loglog_slope(qs, vals) == pytest.approx(0.25, abs=1e-12)


def test_kernel_values(f3):
    v = build_paraboloid(f3, 4)
    K = bochner_riesz_kernel(v)
    assert K.values[0] == pytest.approx(0.0, abs=1e-12)
    q, d = 3, 4
    md = np.arange(q**d) % q
    nz = md != 0
    assert np.abs(np.abs(K.values[nz]) - q ** (-(d - 1) / 2)).max() < 1e-10


def test_kernel_transform_identity(f3, f5):
    assert kernel_transform_identity_error(build_paraboloid(f3, 4)) < 1e-9
    assert kernel_transform_identity_error(build_paraboloid(f5, 4)) < 1e-9


def test_convolution_with_delta_recovers_kernel(f3):
    v = build_paraboloid(f3, 4)
    K = bochner_riesz_kernel(v)
    delta = np.zeros(3**4, dtype=complex)
    delta[0] = 1.0
    conv = convolve_dm(GridFunction(f3, 4, delta), K)
    assert np.abs(conv.values - K.values).max() < 1e-12
    assert norm_grid(K, 2, "dm") <= 3 * 1.0


def test_stein_tomas_l2_bound_random(f3, f5, rng):
    for field in (f3, f5):
        v = build_paraboloid(field, 4)
        K = bochner_riesz_kernel(v)
        for _ in range(25):
            g = random_grid_function(field, 4, rng)
            row = stein_tomas_checks(g, K)
            assert row["l2_ok"]
            assert row["l4_monitored_constant"] > 0


def test_extension_norm_support_compression(f13, rng):
    # sparse witnesses drive the direct transform through their support only
    v = build_paraboloid(f13, 3)
    H = build_isotropic_subspace(f13, 3)
    f = indicator(v, H)
    direct = norm_grid(extend(f), 4, "dm")
    assert extension_norm(f, 4) == pytest.approx(direct, rel=1e-10)

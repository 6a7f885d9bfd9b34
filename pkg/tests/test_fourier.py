import numpy as np
import pytest

from parabext import (
    ExponentPair,
    GridFunction,
    SurfaceFunction,
    build_paraboloid,
    extend,
    extension_norm,
    hat,
    hat_dm,
    indicator,
    l2_identity_check,
    make_field,
    norm_grid,
    norm_surface,
    ones_on,
    restrict,
    sample_subset,
    sigma_inverse_closed_form,
    sigma_inverse_closed_form_grid,
)
from parabext.fourier import grid_from_json, grid_to_json, surface_from_json, surface_to_json
from parabext.norms import random_grid_function, random_surface_function


@pytest.fixture(scope="module")
def v32():
    return build_paraboloid(make_field(3), 2)


@pytest.fixture(scope="module")
def v33():
    return build_paraboloid(make_field(3), 3)


def grid_ones(field, d):
    return GridFunction(field, d, np.ones(field.q**d))


def test_hat_of_constant_is_delta(f3):
    fhat = hat(grid_ones(f3, 2))
    expected = np.zeros(9)
    expected[0] = 1.0
    assert np.abs(fhat.values - expected).max() < 1e-12


def test_hat_of_scaled_point_mass_is_one(f3):
    vals = np.zeros(9, dtype=complex)
    vals[0] = 9.0
    fhat = hat(GridFunction(f3, 2, vals))
    assert np.abs(fhat.values - 1.0).max() < 1e-12


def test_plancherel_random(f3, rng):
    for _ in range(25):
        f = random_grid_function(f3, 2, rng)
        assert norm_grid(hat(f), 2, "dm") == pytest.approx(norm_grid(f, 2, "dx"), abs=1e-10)


def test_extend_closed_form_cases(v33):
    g = extend(ones_on(v33))
    assert g.values[0] == pytest.approx(1.0, abs=1e-12)
    # m = (mbar, 0) with mbar != 0: indices with last coordinate zero
    q = 3
    for m in range(q**3):
        mbar, md = divmod(m, q)
        if md == 0 and mbar != 0:
            assert abs(g.values[m]) < 1e-12


def test_extend_modulus_q3_d2(v32):
    g = extend(ones_on(v32))
    # m = (0, 1) has grid index 1
    assert abs(g.values[1]) == pytest.approx(3 ** (-0.5), abs=1e-12)


def test_sigma_closed_form_point_values(v33):
    assert sigma_inverse_closed_form(v33, (0, 0, 0)) == pytest.approx(1.0)
    q, d = 3, 3
    for m in [(0, 1, 1), (1, 2, 2), (2, 0, 1)]:
        val = sigma_inverse_closed_form(v33, m)
        assert abs(val) == pytest.approx(q ** (-(d - 1) / 2), abs=1e-12)


def test_sigma_closed_form_matches_direct_everywhere(v33):
    direct = extend(ones_on(v33)).values
    closed = sigma_inverse_closed_form_grid(v33).values
    assert np.abs(direct - closed).max() < 1e-9


def test_sigma_closed_form_extension_field():
    v = build_paraboloid(make_field(3, 2), 3)
    direct = extend(ones_on(v)).values
    closed = sigma_inverse_closed_form_grid(v).values
    assert np.abs(direct - closed).max() < 1e-9


def test_norm_grid_constants(f3):
    one = grid_ones(f3, 2)
    assert norm_grid(one, 1.7, "dx") == pytest.approx(1.0)
    assert norm_grid(one, 2, "dm") == pytest.approx(9 ** (1 / 2))
    assert norm_grid(one, np.inf, "dx") == pytest.approx(1.0)


def test_norm_normalization_identity(f3, rng):
    f = random_grid_function(f3, 2, rng)
    assert norm_grid(f, 2, "dx") ** 2 * 9 == pytest.approx(norm_grid(f, 2, "dm") ** 2)


def test_norm_rejects_p_below_one(f3):
    with pytest.raises(ValueError):
        norm_grid(grid_ones(f3, 2), 0.5, "dx")
    with pytest.raises(ValueError):
        norm_grid(grid_ones(f3, 2), 2, "lebesgue")


def test_norm_surface_cases(v32, rng):
    assert norm_surface(ones_on(v32), 3.0) == pytest.approx(1.0)
    E = sample_subset(v32.field, 2, 1, rng)
    f = indicator(v32, E)
    assert norm_surface(f, 2) == pytest.approx((1 / 3) ** 0.5)
    for p in (1.0, 1.6, 4.0):
        assert norm_surface(f, p) == pytest.approx((1 / 3) ** (1 / p))


def test_l2_identity(v32, rng):
    lhs, rhs = l2_identity_check(ones_on(v32))
    assert lhs == pytest.approx(3.0, abs=1e-10)
    assert rhs == pytest.approx(3.0, abs=1e-10)
    for _ in range(20):
        f = random_surface_function(v32, rng)
        lhs, rhs = l2_identity_check(f)
        assert lhs == pytest.approx(rhs, rel=1e-10)
    zero = SurfaceFunction(v32, np.zeros(3))
    assert l2_identity_check(zero) == (0.0, 0.0)


def test_extension_norm_streaming_matches_materialized(v33, rng):
    f = random_surface_function(v33, rng)
    g = extend(f)
    for r in (2.0, 3.2, 4.0, np.inf):
        assert extension_norm(f, r) == pytest.approx(norm_grid(g, r, "dm"), rel=1e-10)


def test_counting_norm_nesting(v33, rng):
    f = random_surface_function(v33, rng)
    n4, n3, n2 = (extension_norm(f, r) for r in (4.0, 3.0, 2.0))
    assert n4 <= n3 * (1 + 1e-12) <= n2 * (1 + 1e-12)


def test_restriction_matches_dm_hat_on_surface(v33, rng):
    g = random_grid_function(v33.field, 3, rng)
    on_surface = restrict(g, v33).values
    full = hat_dm(g).values
    radix = 3 ** np.arange(2, -1, -1)
    surf_grid_idx = v33.coord_rows @ radix
    assert np.abs(on_surface - full[surf_grid_idx]).max() < 1e-10


def test_exponent_pair_duals():
    pair = ExponentPair(1.6, 4.0)
    assert pair.p_dual == pytest.approx(1.6 / 0.6)
    assert 1 / pair.r + 1 / pair.r_dual == pytest.approx(1.0)
    with pytest.raises(ValueError):
        ExponentPair(0.9, 2)


def test_grid_json_roundtrip(f3, rng):
    f = random_grid_function(f3, 2, rng)
    back = grid_from_json(grid_to_json(f))
    assert back.field == f3 and back.d == 2
    assert np.abs(back.values - f.values).max() < 1e-15


def test_surface_json_roundtrip(v33, rng):
    f = random_surface_function(v33, rng)
    back = surface_from_json(surface_to_json(f), v33)
    assert np.abs(back.values - f.values).max() < 1e-15


def test_value_length_validated(f3, v33):
    with pytest.raises(ValueError):
        GridFunction(f3, 2, np.ones(8))
    with pytest.raises(ValueError):
        SurfaceFunction(v33, np.ones(8))

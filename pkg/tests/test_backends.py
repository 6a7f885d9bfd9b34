import numpy as np
import pytest

from parabext import _kernels_py, backend, make_field, sample_subset
from parabext.fourier import _grid_digit_rows
from parabext.geometry import Paraboloid

compiled = pytest.importorskip("parabext._kernels", reason="compiled extension not built")


def test_backend_selected():
    assert backend.backend_name() in ("compiled", "numpy")


@pytest.mark.parametrize(
    "p,l,d,size",
    [(13, 1, 4, 250), (3, 2, 4, 120), (5, 1, 3, 25), (3, 1, 2, 3)],
)
def test_pair_energy_parity_dense(p, l, d, size, rng):
    field = make_field(p, l)
    E = sample_subset(field, d, size, rng)
    rows = E.digit_rows()
    assert compiled.pair_energy(rows, field.p) == _kernels_py.pair_energy(rows, field.p)


def test_pair_energy_parity_sparse(f27, rng):
    E = sample_subset(f27, 7, 400, rng)
    rows = E.digit_rows()
    assert compiled.pair_energy(rows, 3) == _kernels_py.pair_energy(rows, 3)


def test_pair_energy_empty():
    rows = np.empty((0, 4), dtype=np.int8)
    assert compiled.pair_energy(rows, 5) == 0
    assert _kernels_py.pair_energy(rows, 5) == 0


@pytest.mark.parametrize("sign", [1, -1])
def test_char_transform_parity(sign, rng):
    field = make_field(3, 2)
    v = Paraboloid(field, 3)
    w = rng.standard_normal(v.size) + 1j * rng.standard_normal(v.size)
    evals = _grid_digit_rows(field, 3)
    a = compiled.char_transform(v.trace_rows(), w, evals, field.p, sign)
    b = _kernels_py.char_transform(v.trace_rows(), w, evals, field.p, sign)
    assert np.abs(a - b).max() < 1e-10


def test_char_transform_empty_support(rng):
    field = make_field(5)
    evals = _grid_digit_rows(field, 2)
    out = compiled.char_transform(
        np.empty((0, 2), dtype=np.int8), np.empty(0, dtype=complex), evals, 5, 1
    )
    assert np.abs(out).max() == 0.0


def test_width_mismatch_rejected(rng):
    field = make_field(5)
    evals = _grid_digit_rows(field, 2)
    with pytest.raises(ValueError):
        compiled.char_transform(np.zeros((2, 3), dtype=np.int8), np.ones(2, dtype=complex), evals, 5, 1)
    with pytest.raises(ValueError):
        _kernels_py.char_transform(np.zeros((2, 3), dtype=np.int8), np.ones(2, dtype=complex), evals, 5, 1)

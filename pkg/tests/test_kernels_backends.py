"""Backend parity: the numba kernels must agree with the numpy fallbacks."""

import numpy as np
import pytest

from hszego import _kernels

pytestmark = pytest.mark.skipif(
    not _kernels.HAVE_NUMBA, reason="numba not importable"
)


@pytest.fixture
def restore_backend():
    before = _kernels.active_backend()
    yield
    _kernels.set_backend(before)


def _both(fn, restore=None):
    out = {}
    for be in ("numpy", "numba"):
        _kernels.set_backend(be)
        out[be] = fn()
    return out


def test_axis_projector_exp_parity(restore_backend):
    nodes = np.linspace(-2, 2, 7)
    w = np.full(7, 0.5)
    res = _both(lambda: _kernels.axis_projector_exp(nodes, w, 1.3, 0.8))
    assert np.allclose(res["numpy"], res["numba"], rtol=1e-13, atol=1e-15)
    res = _both(lambda: _kernels.axis_projector_exp(nodes, None, 0.7, 1.1))
    assert np.allclose(res["numpy"], res["numba"], rtol=1e-13, atol=1e-15)


def test_phase_quadratic_parity(restore_backend):
    rng = np.random.default_rng(0)
    zc = rng.normal(size=(12, 2)) + 1j * rng.normal(size=(12, 2))
    res = _both(lambda: _kernels.phase_quadratic(zc, (0.9, -1.2)))
    assert np.allclose(res["numpy"], res["numba"], rtol=1e-13, atol=1e-15)


def test_project_slices_parity(restore_backend):
    rng = np.random.default_rng(1)
    m = 5
    nodes = np.linspace(-1.5, 1.5, m)
    w = np.full(m, 0.75)
    slabs = rng.normal(size=(3, m * m)) + 1j * rng.normal(size=(3, m * m))
    ts = np.array([0.5, 1.0, 2.0])
    res = _both(
        lambda: _kernels.project_slices(slabs, ts, 0.5, nodes, w, (1.0,))
    )
    assert np.allclose(res["numpy"], res["numba"], rtol=1e-12, atol=1e-14)


def test_pairing_and_direct_parity(restore_backend):
    rng = np.random.default_rng(2)
    S, N, T = 9, 6, 4
    zc = rng.normal(size=(S, 1)) + 1j * rng.normal(size=(S, 1))
    Q = _kernels.phase_quadratic(zc, (1.0,))
    su = rng.normal(size=(T, S)) + 1j * rng.normal(size=(T, S))
    sg = rng.normal(size=(T, S)) + 1j * rng.normal(size=(T, S))
    ts = np.array([0.5, 1.0, 1.5, 2.0])
    coeffs = np.array([0.1, 0.2, 0.3, 0.4])
    wspat = rng.uniform(0.5, 1.0, size=S)
    res = _both(lambda: _kernels.pairing_sum(Q, su, sg, ts, coeffs, wspat))
    assert res["numpy"] == pytest.approx(res["numba"], rel=1e-12)
    uw = rng.normal(size=(S, N)) + 1j * rng.normal(size=(S, N))
    dw = rng.normal(size=(N, N))
    res = _both(lambda: _kernels.direct_kernel_apply(Q, uw, dw, ts, coeffs))
    assert np.allclose(res["numpy"], res["numba"], rtol=1e-12, atol=1e-14)


def test_set_backend_validation(restore_backend):
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")
    assert _kernels.active_backend() in ("numpy", "numba")

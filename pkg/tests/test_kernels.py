import numpy as np
import pytest

from fanikit import _accel, kernels
from fanikit.amoeba import LaurentFamily, complex_arrays, distances_to
from fanikit.tropical import Triangulation, dual_complex

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")

P2_T = Triangulation(((0, 0), (1, 0), (0, 1), (-1, -1)), ((0, 1, 2), (0, 2, 3), (0, 1, 3)))
P2_PC = dual_complex(P2_T, [0, 1, 1, 1])


@needs_numba
def test_distance_kernels_agree():
    rng = np.random.default_rng(1)
    X = rng.uniform(-4, 4, size=(500, 2))
    args = [np.ascontiguousarray(a, dtype=float) for a in (X, *complex_arrays(P2_PC))]
    a = kernels._nb_distance(*args, 1e-12)
    b = kernels._np_distance(*args, 1e-12)
    assert np.allclose(a, b, rtol=0, atol=1e-12)


def test_distance_kernel_handles_two_cells():
    T3 = Triangulation(((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 2, 3),))
    PC = dual_complex(T3, [0] * 4)
    d = distances_to([[-1.0, -2.0, 0.0], [-2.0, -1.0, -1.0], [3.0, 3.0, 3.0]], PC)
    assert np.allclose(d, [0.0, 1.0, 0.0], atol=1e-12)


@needs_numba
def test_eval_kernels_agree():
    rng = np.random.default_rng(2)
    f = LaurentFamily.from_pl([(0, 0), (1, 0), (0, 1), (-1, -1), (2, -3)], [0, 1, 1, 1, 2], 1e3)
    Z = np.exp(rng.uniform(-2, 2, size=(300, 2)) + 1j * rng.uniform(0, 6.3, size=(300, 2)))
    a = kernels._nb_eval(f.coefficients(), f.exponents(), Z)
    b = kernels._np_eval(f.coefficients(), f.exponents(), Z)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@needs_numba
def test_scan_kernels_agree():
    f = LaurentFamily.from_pl([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)], [0] * 4, 1e2)
    ax = np.linspace(-4, 4, 12)
    ph = 2 * np.pi * np.arange(6) / 6
    a = kernels._nb_scan3(f.coefficients(), f.exponents(), ax, ax, ax, ph, 0.1)
    b = kernels._np_scan3(f.coefficients(), f.exponents(), ax, ax, ax, ph, 0.1)
    assert np.array_equal(a, b) and a.any()


def test_disable_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("FANIKIT_DISABLE_NUMBA", "1")
    assert not _accel.enabled()
    monkeypatch.delenv("FANIKIT_DISABLE_NUMBA")
    monkeypatch.setenv("NUMBA_DISABLE_JIT", "1")
    assert not _accel.enabled()
    monkeypatch.delenv("NUMBA_DISABLE_JIT")
    assert _accel.enabled() == _accel.HAVE_NUMBA


def test_dispatch_results_match_under_both_paths(monkeypatch):
    X = np.array([[0.3, -2.0], [1.5, 1.5], [-3.0, 0.2]])
    fast = distances_to(X, P2_PC)
    monkeypatch.setenv("FANIKIT_DISABLE_NUMBA", "1")
    slow = distances_to(X, P2_PC)
    assert np.allclose(fast, slow, atol=1e-12)


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("FANIKIT_THREADS", "3")
    assert _accel.thread_cap() == 3
    monkeypatch.setenv("FANIKIT_THREADS", "bogus")
    assert _accel.thread_cap() >= 1

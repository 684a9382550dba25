import numpy as np
import pytest

from matraj import _kernels_py, kernels


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_scan_matches_direct(rng):
    w = rng.normal(size=300) + 1j * rng.normal(size=300)
    ph = rng.uniform(0, 200, 300)
    grid = -1.0 + 0.003 * np.arange(700)
    direct = np.abs(np.exp(1j * np.outer(grid, ph)) @ w) ** 2
    for impl in (kernels.scan_1d, _kernels_py.scan_1d):
        assert impl(w, ph, -1.0, 0.003, 700) == pytest.approx(direct, rel=1e-10)


def test_backends_agree(rng):
    if kernels.BACKEND != "cython":
        pytest.skip("compiled extension not built")
    w = rng.normal(size=1000) + 1j * rng.normal(size=1000)
    ph = rng.uniform(0, 1e3, 1000)
    a = kernels.scan_1d(w, ph, -0.5, 1e-4, 5000)
    b = _kernels_py.scan_1d(w, ph, -0.5, 1e-4, 5000)
    assert np.max(np.abs(a - b)) <= 1e-11 * np.max(b)
    for monotone in (True, False):
        assert np.array_equal(kernels.dp_tables(7, 4, 2, monotone), _kernels_py.dp_tables(7, 4, 2, monotone))


def test_scan_length_mismatch():
    with pytest.raises(ValueError):
        kernels.scan_1d(np.ones(3, complex), np.ones(4), 0.0, 0.1, 5)


def test_dp_brute_force():
    # every monotone path on a 5-point grid with steps <= 2
    import itertools
    M, N, smax = 5, 3, 2
    V = kernels.dp_tables(M, N, smax, True)
    best = max(N * sum(p * p for p in path) - sum(path) ** 2
               for path in itertools.product(range(M), repeat=N)
               if all(0 <= b - a <= smax for a, b in zip(path, path[1:])))
    p = np.arange(M)
    assert int(np.max(N * p * p + V[0, p, p])) == best

import numpy as np
import pytest

from matraj.socp import ConeDims, in_cone, max_step, solve_socp


def random_feasible_problem(rng, n=5, l=6, q=(3, 4)):
    dims = ConeDims(l=l, q=q)
    m = dims.size
    G = rng.normal(size=(m, n))
    x0 = rng.normal(size=n)
    s0 = np.concatenate([rng.uniform(0.5, 2.0, l)] + [np.r_[2.0 + rng.uniform(), rng.normal(size=k - 1) / k]
                                                    for k in q])
    h = G @ x0 + s0
    # dual-feasible cost: c = -G^T z with z strictly inside the cone
    z0 = np.concatenate([rng.uniform(0.5, 2.0, l)] + [np.r_[2.0, rng.normal(size=k - 1) / k] for k in q])
    c = -G.T @ z0
    return c, G, h, dims


def test_lp_known_optimum():
    # min -x1 - x2  s.t.  x1 + 2 x2 <= 4,  3 x1 + x2 <= 6,  x >= 0  ->  (1.6, 1.2)
    G = np.array([[1.0, 2.0], [3.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
    h = np.array([4.0, 6.0, 0.0, 0.0])
    res = solve_socp(np.array([-1.0, -1.0]), G, h, ConeDims(l=4))
    assert res.ok
    assert res.x == pytest.approx([1.6, 1.2], abs=1e-7)


def test_norm_ball():
    # max x1 + x2 on the unit disk -> (1, 1)/sqrt 2
    G = -np.vstack([np.zeros(2), np.eye(2)])
    h = np.array([1.0, 0.0, 0.0])
    res = solve_socp(np.array([-1.0, -1.0]), G, h, ConeDims(l=0, q=(3,)))
    assert res.ok
    assert res.x == pytest.approx(np.ones(2) / np.sqrt(2), abs=1e-7)
    assert res.primal_objective == pytest.approx(-np.sqrt(2), abs=1e-7)


def test_cone_helpers():
    dims = ConeDims(l=1, q=(3,))
    assert in_cone(np.array([1.0, 2.0, 1.0, 1.0]), dims)
    assert not in_cone(np.array([1.0, 1.0, 1.0, 1.0]), dims)
    step = max_step(np.array([1.0, 2.0, 0.0, 0.0]), np.array([-1.0, 0.0, 1.0, 0.0]), dims)
    assert step == pytest.approx(1.0)


def test_against_cvxopt(rng):
    cvxopt = pytest.importorskip("cvxopt")
    from cvxopt import matrix, solvers
    solvers.options["show_progress"] = False
    for _ in range(20):
        c, G, h, dims = random_feasible_problem(rng)
        ours = solve_socp(c, G, h, dims, tol=1e-9)
        ref = solvers.conelp(matrix(c), matrix(G), matrix(h), {"l": dims.l, "q": list(dims.q), "s": []})
        assert ref["status"] == "optimal"
        assert ours.ok
        assert ours.primal_objective == pytest.approx(ref["primal objective"], rel=1e-6, abs=1e-7)
        assert in_cone(h - G @ ours.x, dims, tol=1e-8)


def test_gap_history_shrinks(rng):
    c, G, h, dims = random_feasible_problem(rng)
    res = solve_socp(c, G, h, dims, record=True)
    gaps = [g for g, _, _ in res.history]
    assert gaps[-1] < 1e-6 * gaps[0]

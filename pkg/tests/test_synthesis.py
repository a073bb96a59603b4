import math
from fractions import Fraction

import pytest

from viskeep.inequalities import LinearInequalitySystem
from viskeep.scenarios import BasicScenario, gain_polytope
from viskeep.synthesis import (
    InfeasiblePolytopeError,
    is_strictly_interior,
    min_norm_gain,
)

F = Fraction

WINDOW = BasicScenario(a=0.4, b=math.pi / 4, d=2.0, V_F=0.9, V_L=0.1,
                       Omega_F=math.pi / 3, Omega_L=math.pi / 15)
REF_GAIN = (1.5173, 0.3707, 0.4925)


def sys_of(num_vars, rows):
    return LinearInequalitySystem.from_rows(num_vars, rows)


def test_nearest_point_on_a_ray():
    res = min_norm_gain(sys_of(1, [((-1,), F(-3, 2))]))
    assert res.exact_gain == (F(3, 2),)
    assert res.norm == 1.5
    assert res.kkt_residual == 0.0


def test_origin_inside_gives_zero_gain():
    res = min_norm_gain(sys_of(3, [((1, 0, 0), 1), ((0, 1, 1), 2)]))
    assert res.exact_gain == (0, 0, 0)
    assert res.active_rows == ()
    assert res.kkt_residual == 0.0


def test_infeasible_polytope_raises():
    with pytest.raises(InfeasiblePolytopeError):
        min_norm_gain(sys_of(1, [((1,), -1), ((-1,), 0)]))


def test_corner_projection():
    # feasible set x >= 1, y >= 2: nearest point is the corner (1, 2)
    res = min_norm_gain(sys_of(2, [((-1, 0), -1), ((0, -1), -2)]))
    assert res.exact_gain == (1, 2)
    assert res.kkt_residual == 0.0


def test_window_gain_reproduction():
    res = min_norm_gain(gain_polytope(WINDOW))
    assert res.gain.k11 == pytest.approx(1.5173, abs=1e-3)
    pair = math.hypot(res.gain.k22, res.gain.k23)
    ref_pair = math.hypot(REF_GAIN[1], REF_GAIN[2])
    assert pair <= ref_pair + 1e-6
    ref_norm = math.sqrt(sum(x * x for x in REF_GAIN))
    assert res.norm <= ref_norm + 1e-6
    assert res.kkt_residual <= 1e-7
    assert len(res.active_rows) >= 2


def test_window_gain_exact_membership():
    poly = gain_polytope(WINDOW)
    res = min_norm_gain(poly)
    assert poly.satisfies(res.exact_gain)  # exact, tol 0


def test_determinism():
    a = min_norm_gain(gain_polytope(WINDOW))
    b = min_norm_gain(gain_polytope(WINDOW))
    assert a.exact_gain == b.exact_gain
    assert a.active_rows == b.active_rows


def test_redundancy_removal_preserves_min_norm_gain():
    poly = gain_polytope(WINDOW)
    assert min_norm_gain(poly).exact_gain == \
        min_norm_gain(poly.reduce()).exact_gain


def _random_boxed_polytope(rnd, n):
    rows = [
        (
            tuple(F(rnd.randint(-3, 3)) for _ in range(n)),
            F(rnd.randint(-3, 5)),
        )
        for _ in range(rnd.randint(2, 6))
    ]
    for i in range(n):
        e = [F(0)] * n
        e[i] = F(1)
        rows.append((tuple(e), F(2)))
        rows.append((tuple(-c for c in e), F(2)))
    return sys_of(n, rows)


def _dense_grid_norm_2d(poly, bound=2.0, step=1e-3):
    """Literal dense grid search over the bounding box (2 variables)."""
    import numpy as np

    G = np.array([[float(c) for c in r.g] for r in poly.rows])
    h = np.array([float(r.rhs) for r in poly.rows])
    axis = np.arange(-bound, bound + step / 2, step)
    best = None
    for x0 in axis:  # sweep one axis, vectorize the other
        pts = np.column_stack([np.full_like(axis, x0), axis])
        ok = np.all(pts @ G.T <= h + 1e-12, axis=1)
        if ok.any():
            norms = np.hypot(pts[ok, 0], pts[ok, 1])
            cand = float(norms.min())
            if best is None or cand < best:
                best = cand
    return best


def test_dense_grid_oracle_two_variables(rnd):
    found = 0
    while found < 4:
        poly = _random_boxed_polytope(rnd, 2)
        if not poly.is_feasible():
            continue
        found += 1
        res = min_norm_gain(poly)
        grid_norm = _dense_grid_norm_2d(poly)
        assert grid_norm is not None
        assert res.norm <= grid_norm + 1e-9
        assert abs(res.norm - grid_norm) < 2e-3


def test_convex_solver_oracle_three_variables(rnd):
    cvxpy = pytest.importorskip("cvxpy")
    import numpy as np

    found = 0
    while found < 8:
        poly = _random_boxed_polytope(rnd, 3)
        if not poly.is_feasible():
            continue
        found += 1
        res = min_norm_gain(poly)
        G = np.array([[float(c) for c in r.g] for r in poly.rows])
        h = np.array([float(r.rhs) for r in poly.rows])
        x = cvxpy.Variable(3)
        prob = cvxpy.Problem(
            cvxpy.Minimize(cvxpy.sum_squares(x)), [G @ x <= h]
        )
        prob.solve()
        assert res.norm == pytest.approx(math.sqrt(prob.value), abs=1e-6)


def test_min_norm_gain_not_strictly_interior():
    poly = gain_polytope(WINDOW)
    res = min_norm_gain(poly)
    assert not is_strictly_interior(poly, res.gain)


def test_centroid_strictly_interior():
    poly = gain_polytope(WINDOW)
    res = min_norm_gain(poly)
    k11, k22, k23 = res.exact_gain
    # nudge into the interior: lift the speed gain, fatten the turn gains
    inner = (k11 + F(1, 10), k22 + F(1, 10), k23 + F(1, 50))
    assert poly.satisfies(inner)
    assert is_strictly_interior(poly, tuple(float(x) for x in inner))


def test_interiority_uses_eps():
    poly = sys_of(1, [((1,), 1)])
    assert is_strictly_interior(poly, (0.5,), eps=0.4)
    assert not is_strictly_interior(poly, (0.5,), eps=0.6)

"""Exact simplex and the dominated-measure LP, cross-checked against
scipy's floating-point solver and hand-solved instances."""

import random
from fractions import Fraction

import pytest
from scipy.optimize import linprog

from nikodym.errors import GroundTooLarge
from nikodym.lp import GROUND_BOUND, dominated_measure_max, simplex_max

F = Fraction


# ------------------------------------------------------------- hand-checked

def test_simplex_basic():
    # max x + y  s.t. x <= 2, y <= 3, x + y <= 4
    r = simplex_max([1, 1], [[1, 0], [0, 1], [1, 1]], [2, 3, 4])
    assert r.status == "optimal"
    assert r.value == 4
    assert sum(r.x) == 4 and all(v >= 0 for v in r.x)


def test_simplex_fractional_optimum():
    # max 3x + 5y  s.t. x + 2y <= 1, 3x + y <= 1  ->  x = 1/5, y = 2/5
    r = simplex_max([3, 5], [[1, 2], [3, 1]], [1, 1])
    assert r.status == "optimal"
    assert r.value == F(13, 5)
    assert r.x == [F(1, 5), F(2, 5)]


def test_simplex_unbounded():
    r = simplex_max([1], [[-1]], [0])
    assert r.status == "unbounded"


def test_simplex_infeasible():
    # x <= -1 with x >= 0
    r = simplex_max([1], [[1]], [-1])
    assert r.status == "infeasible"


def test_simplex_negative_rhs_feasible():
    # max x  s.t. -x <= -2 (ie x >= 2), x <= 5
    r = simplex_max([1], [[-1], [1]], [-2, 5])
    assert r.status == "optimal"
    assert r.value == 5


def test_simplex_duals_certify_optimum():
    c = [F(2), F(3)]
    A = [[F(1), F(1)], [F(2), F(1)], [F(0), F(1)]]
    b = [F(4), F(5), F(3)]
    r = simplex_max(c, A, b)
    assert r.status == "optimal"
    # weak duality with equality at the optimum: y >= 0, y.A >= c, y.b = value
    assert all(v >= 0 for v in r.y)
    for j in range(2):
        assert sum(r.y[i] * A[i][j] for i in range(3)) >= c[j]
    assert sum(yi * bi for yi, bi in zip(r.y, b)) == r.value


# -------------------------------------------------- scipy float cross-check

def _random_lp(rng):
    n = rng.randint(2, 4)
    m = rng.randint(2, 5)
    c = [F(rng.randint(-5, 8)) for _ in range(n)]
    A = [[F(rng.randint(-3, 6)) for _ in range(n)] for _ in range(m)]
    b = [F(rng.randint(0, 9)) for _ in range(m)]
    return c, A, b


def test_simplex_matches_scipy_on_seeded_instances():
    rng = random.Random(20240817)
    solved = 0
    for _ in range(120):
        c, A, b = _random_lp(rng)
        ours = simplex_max(c, A, b)
        ref = linprog([-float(v) for v in c],
                      A_ub=[[float(v) for v in row] for row in A],
                      b_ub=[float(v) for v in b],
                      bounds=[(0, None)] * len(c), method="highs")
        if ours.status == "optimal":
            assert ref.status == 0
            assert abs(float(ours.value) - (-ref.fun)) < 1e-7
            # feasibility of our exact point
            for row, bi in zip(A, b):
                assert sum(r * x for r, x in zip(row, ours.x)) <= bi
            solved += 1
        elif ours.status == "unbounded":
            assert ref.status == 3
        else:
            assert ref.status == 2
    assert solved > 40  # the sweep must actually exercise the optimal path


# ------------------------------------------------- dominated-measure values

def _sup_table(ground, measures):
    """phi(S) = max over the given measures of their mass on S."""
    table = {}
    g = list(ground)
    for mask in range(1 << len(g)):
        pts = frozenset(g[i] for i in range(len(g)) if mask >> i & 1)
        table[pts] = max((sum(m.get(p, F(0)) for p in pts) for m in measures),
                         default=F(0))
    return table


def test_truncation_sup_table_has_no_defect():
    # sup of two measures: unit atoms at 0 and 1, half atoms at 2..5
    ground = (0, 1, 2, 3, 4, 5)
    m1 = {0: F(1), 1: F(1)}
    m2 = {i: F(1, 2) for i in (2, 3, 4, 5)}
    phi = _sup_table(ground, [m1, m2])
    target = {0, 2, 3}
    value, mu, cover = dominated_measure_max(phi, ground, target)
    assert value == phi[frozenset(target)] == 1
    assert sum(mu.get(p, F(0)) for p in target) == value


def test_pathological_three_point_table():
    # phi = 1 on every nonempty proper subset, 2 on the full set
    ground = (0, 1, 2)
    phi = {}
    for mask in range(8):
        pts = frozenset(p for p in ground if mask >> p & 1)
        phi[pts] = F(0) if not pts else (F(2) if len(pts) == 3 else F(1))
    value, mu, cover = dominated_measure_max(phi, ground, set(ground))
    assert value == F(3, 2)
    assert mu == {0: F(1, 2), 1: F(1, 2), 2: F(1, 2)}
    # the fractional cover certifies the 3/2 from above
    assert sum(w * phi[s] for s, w in cover.items()) == F(3, 2)
    # defect against phi(full):
    assert phi[frozenset(ground)] - value == F(1, 2)


def test_empty_target():
    ground = (0, 1)
    phi = _sup_table(ground, [{0: F(1)}])
    assert dominated_measure_max(phi, ground, set()) == (F(0), {}, {})


def test_ground_bound_enforced():
    g = tuple(range(GROUND_BOUND + 1))
    with pytest.raises(GroundTooLarge):
        dominated_measure_max({}, g, set())


def _scipy_primal(phi, ground, target):
    """Float solve of max mu(target) s.t. mu(B) <= phi(B), mu >= 0."""
    g = list(ground)
    n = len(g)
    c = [-1.0 if p in target else 0.0 for p in g]
    A, b = [], []
    for mask in range(1, 1 << n):
        pts = frozenset(g[i] for i in range(n) if mask >> i & 1)
        A.append([1.0 if mask >> i & 1 else 0.0 for i in range(n)])
        b.append(float(phi[pts]))
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(0, None)] * n, method="highs")
    assert res.status == 0
    return -res.fun


def test_dominated_measure_matches_scipy_on_random_sups():
    rng = random.Random(7)
    for _ in range(40):
        n = rng.randint(2, 5)
        ground = tuple(range(n))
        measures = []
        for _ in range(rng.randint(1, 3)):
            measures.append({p: F(rng.randint(1, 8), rng.randint(1, 4))
                             for p in ground if rng.random() < 0.7})
        phi = _sup_table(ground, measures)
        target = {p for p in ground if rng.random() < 0.5}
        value, mu, cover = dominated_measure_max(phi, ground, target)
        ref = _scipy_primal(phi, ground, target)
        assert abs(float(value) - ref) < 1e-7
        # exact domination of the recovered measure on every subset
        for mask in range(1 << n):
            pts = frozenset(ground[i] for i in range(n) if mask >> i & 1)
            assert sum(mu.get(p, F(0)) for p in pts) <= phi[pts]


def test_sup_of_measures_is_never_pathological():
    # for phi = sup(mu_1, mu_2) the dominating measures themselves are
    # dominated, so the LP value always reaches phi(target)
    rng = random.Random(99)
    for _ in range(30):
        n = rng.randint(2, 5)
        ground = tuple(range(n))
        measures = [{p: F(rng.randint(0, 6), 2) for p in ground}
                    for _ in range(2)]
        measures = [{p: w for p, w in m.items() if w} for m in measures]
        phi = _sup_table(ground, measures)
        target = set(ground[: rng.randint(1, n)])
        value, _, _ = dominated_measure_max(phi, ground, target)
        assert value == phi[frozenset(target)]

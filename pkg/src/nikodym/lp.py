"""Exact rational linear programming, sized for small ground sets.

simplex_max solves  max c.x  s.t.  A x <= b, x >= 0  with Fraction pivots and
Bland's anti-cycling rule (two phases, artificials only on rows with b < 0).

dominated_measure_max answers the non-pathology question for a submeasure
given by a full subset table on a finite ground set: the largest mass a
dominated measure can place on a target subset.  All 2^g - 1 nonempty subset
constraints are generated explicitly; the solve runs on the dual (one row per
ground point, one column per subset) and both the measure and the fractional
cover it returns are re-verified exactly before anything is reported.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import GroundTooLarge, InconsistentVerdicts

_ZERO = Fraction(0)
_ONE = Fraction(1)

GROUND_BOUND = 12


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded
    value: Optional[Fraction] = None
    x: Optional[list] = None
    y: Optional[list] = None  # one multiplier per constraint row


def _pivot(rows, zrow, basis, r, c):
    piv = rows[r][c]
    rows[r] = [v / piv for v in rows[r]]
    prow = rows[r]
    for i, row in enumerate(rows):
        if i != r and row[c] != 0:
            f = row[c]
            rows[i] = [a - f * p for a, p in zip(row, prow)]
    if zrow[c] != 0:
        f = zrow[c]
        zrow[:] = [a - f * p for a, p in zip(zrow, prow)]
    basis[r] = c


def _optimize(rows, zrow, basis, ncols):
    """Bland's rule: entering = least improving column, leaving = least ratio
    then least basis index.  Returns 'optimal' or 'unbounded'."""
    while True:
        enter = -1
        for j in range(ncols):
            if zrow[j] > 0:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i, row in enumerate(rows):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(rows, zrow, basis, leave, enter)


def simplex_max(c, A, b) -> LPResult:
    m = len(A)
    n = len(c)
    c = [Fraction(v) for v in c]
    b = [Fraction(v) for v in b]
    art_rows = [i for i in range(m) if b[i] < 0]
    n_art = len(art_rows)
    ncols = n + m + n_art  # x, slacks, artificials; rhs rides at the end
    rows = []
    basis = []
    art_col = {}
    for k, i in enumerate(art_rows):
        art_col[i] = n + m + k
    for i in range(m):
        row = [Fraction(v) for v in A[i]] + [_ZERO] * (m + n_art) + [b[i]]
        row[n + i] = _ONE
        if i in art_col:
            row = [-v for v in row]
            row[art_col[i]] = _ONE
            basis.append(art_col[i])
        else:
            basis.append(n + i)
        rows.append(row)

    if n_art:
        # Phase 1: maximize -(sum of artificials)
        zrow = [_ZERO] * (ncols + 1)
        for i in art_rows:
            r = rows[[k for k in range(m) if basis[k] == art_col[i]][0]]
            zrow = [a + v for a, v in zip(zrow, r)]
        for k in range(n_art):
            zrow[n + m + k] = _ZERO
        status = _optimize(rows, zrow, basis, n + m)
        if status != "optimal" or zrow[-1] != 0:
            return LPResult(status="infeasible")
        # Drive leftover artificials out of the basis (degenerate rows).
        for i in range(m):
            if basis[i] >= n + m:
                for j in range(n + m):
                    if rows[i][j] != 0:
                        _pivot(rows, zrow, basis, i, j)
                        break

    # Phase 2 objective: reduced costs of maximize c.x given current basis.
    zrow = [_ZERO] * (ncols + 1)
    for j in range(n):
        zrow[j] = c[j]
    for i in range(m):
        if basis[i] < n and zrow[basis[i]] != 0:
            f = zrow[basis[i]]
            zrow = [a - f * v for a, v in zip(zrow, rows[i])]
    for k in range(n_art):
        zrow[n + m + k] = Fraction(-1)  # never re-enter
    status = _optimize(rows, zrow, basis, n + m)
    if status == "unbounded":
        return LPResult(status="unbounded")

    x = [_ZERO] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = rows[i][-1]
    y = [-zrow[n + i] for i in range(m)]
    return LPResult(status="optimal", value=-zrow[-1], x=x, y=y)


def _subset_sums(weights):
    """sums[mask] = sum of weights over the bits of mask, Gray-code order."""
    g = len(weights)
    sums = [_ZERO] * (1 << g)
    for mask in range(1, 1 << g):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + weights[low.bit_length() - 1]
    return sums


def dominated_measure_max(phi, ground, target):
    """Largest mass on `target` over measures dominated by phi on all subsets.

    phi: dict mapping frozenset-of-points to Fraction, defined on every subset
    of `ground` (a sorted tuple).  Returns (lp_value, mu, cover) where mu is an
    optimal dominated measure as {point: mass} and cover assigns multipliers to
    subsets witnessing optimality from above; both are verified exactly.
    """
    g = len(ground)
    if g > GROUND_BOUND:
        raise GroundTooLarge(g, GROUND_BOUND)
    target = frozenset(target)
    if not target:
        return _ZERO, {}, {}
    masks = list(range(1, 1 << g))
    phi_of = [_ZERO] * (1 << g)
    for mask in masks:
        pts = frozenset(ground[i] for i in range(g) if mask >> i & 1)
        phi_of[mask] = Fraction(phi[pts])
    tmask = 0
    for i, p in enumerate(ground):
        if p in target:
            tmask |= 1 << i

    # Dual of  max mu(target) s.t. mu(B) <= phi(B):  minimize sum y_B phi(B)
    # with every targeted point covered.  As a simplex_max instance:
    #   maximize -phi.y  s.t.  -(cover matrix) y <= -indicator(target).
    c = [-phi_of[mask] for mask in masks]
    A = []
    b = []
    for i in range(g):
        A.append([Fraction(-1) if mask >> i & 1 else _ZERO for mask in masks])
        b.append(Fraction(-1) if tmask >> i & 1 else _ZERO)
    res = simplex_max(c, A, b)
    if res.status != "optimal":
        raise InconsistentVerdicts(f"covering LP came back {res.status}")
    lp_value = -res.value
    cover = {masks[j]: res.x[j] for j in range(len(masks)) if res.x[j] != 0}
    mu_vec = list(res.y)

    # Exact re-verification of both certificates.
    if any(v < 0 for v in mu_vec):
        raise InconsistentVerdicts("recovered measure has a negative atom")
    mu_sums = _subset_sums(mu_vec)
    if any(mu_sums[mask] > phi_of[mask] for mask in masks):
        raise InconsistentVerdicts("recovered measure is not dominated")
    if mu_sums[tmask] != lp_value:
        raise InconsistentVerdicts("measure value disagrees with LP optimum")
    covered = [_ZERO] * g
    total = _ZERO
    for mask, w in cover.items():
        if w < 0:
            raise InconsistentVerdicts("negative cover multiplier")
        total += w * phi_of[mask]
        for i in range(g):
            if mask >> i & 1:
                covered[i] += w
    if total != lp_value:
        raise InconsistentVerdicts("cover value disagrees with LP optimum")
    if any(tmask >> i & 1 and covered[i] < 1 for i in range(g)):
        raise InconsistentVerdicts("cover misses a targeted point")

    mu = {ground[i]: mu_vec[i] for i in range(g) if mu_vec[i] != 0}
    cover_sets = {
        frozenset(ground[i] for i in range(g) if mask >> i & 1): w
        for mask, w in cover.items()
    }
    return lp_value, mu, cover_sets

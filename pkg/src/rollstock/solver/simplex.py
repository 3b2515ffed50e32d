"""Bounded-variable revised simplex, in float or exact rational arithmetic.

Solves min c'x s.t. Ax = b, 0 <= l <= x <= u (u may be +inf). The same
pivoting logic runs on float64 arrays or on object arrays of
``fractions.Fraction``; the rational mode uses exact zero tests and backs
the optimal-value *equality* assertions between models.

Pivoting is deterministic: Dantzig pricing with lowest-index tie-breaking,
falling back to Bland's rule permanently once a run of degenerate pivots
suggests cycling. The basis inverse is maintained by eta updates and, in
float mode, refactorized periodically. Columns fixed by equal bounds are
substituted out before the iterations start.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import NumericalFailure

INF = float("inf")

AT_LOWER = 0
AT_UPPER = 1
BASIC = 2


@dataclass
class SimplexResult:
    status: str                 # Optimal | Infeasible | Unbounded
    objective: object = None
    x: object = None            # values per column of A
    y: object = None            # duals per row
    iterations: int = 0


def to_fraction(v) -> Fraction:
    """Lift one number to the intended decimal rational.

    Model data is decimal-valued (rates like 0.1); taking the binary float
    verbatim would drag 50-bit denominators through every pivot. The
    nearest rational with a small denominator is the faithful reading and
    is identical for every model built from the same instance.
    """
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int) or float(v).is_integer():
        return Fraction(int(v))
    return Fraction(v).limit_denominator(10 ** 9)


def _exact_vector(values) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v if v in (INF, -INF) else to_fraction(v)
    return out


def _exact_inverse(B: np.ndarray):
    """Gauss-Jordan inverse over Fractions; None if singular."""
    m = B.shape[0]
    inv = np.zeros((m, m), dtype=object)
    for i in range(m):
        for j in range(m):
            inv[i, j] = Fraction(int(i == j))
    work = B.copy()
    for col in range(m):
        pivot = next((r for r in range(col, m) if work[r, col] != 0), None)
        if pivot is None:
            return None
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
            inv[[col, pivot]] = inv[[pivot, col]]
        f = work[col, col]
        work[col, :] = work[col, :] / f
        inv[col, :] = inv[col, :] / f
        for r in range(m):
            if r != col and work[r, col] != 0:
                f = work[r, col]
                work[r, :] = work[r, :] - f * work[col, :]
                inv[r, :] = inv[r, :] - f * inv[col, :]
    return inv


class _Core:
    """One phase-agnostic simplex problem over typed arrays.

    In exact mode the constraint matrix is additionally kept as sparse
    columns; the per-iteration products then cost O(nonzeros) in Fraction
    arithmetic instead of O(m*n).
    """

    def __init__(self, A, b, lb, ub, exact: bool):
        self.exact = exact
        self.A = A
        self.b = b
        self.lb = lb
        self.ub = ub
        self.m, self.n = A.shape
        if exact:
            self.zero = Fraction(0)
            self.tol = Fraction(0)
            self.tie = Fraction(0)
            self.cols = [[(i, A[i, j]) for i in range(self.m) if A[i, j] != 0]
                         for j in range(self.n)]
        else:
            self.zero = 0.0
            self.tol = 1e-9
            self.tie = 1e-12
            self.cols = None

    def inverse(self, basis):
        if self.exact:
            inv = _exact_inverse(self.A[:, basis])
            if inv is None:
                raise NumericalFailure("singular basis in exact mode")
            return inv
        try:
            return np.linalg.inv(self.A[:, basis])
        except np.linalg.LinAlgError as e:
            raise NumericalFailure(f"singular basis: {e}") from e

    def nonbasic_values(self, status):
        vals = np.where(status == AT_UPPER, self.ub, self.lb)
        vals[status == BASIC] = self.zero
        return vals

    def basic_values(self, basis, status, B_inv):
        vals = self.nonbasic_values(status)
        if not self.exact:
            rhs = self.b - self.A @ vals
            return B_inv @ rhs
        rhs = self.b.copy()
        for j in range(self.n):
            v = vals[j]
            if v != 0:
                for (i, a) in self.cols[j]:
                    rhs[i] = rhs[i] - a * v
        return B_inv @ rhs

    def reduced_costs(self, costs, y):
        if not self.exact:
            return costs - y @ self.A
        d = costs.copy()
        for j in range(self.n):
            acc = self.zero
            for (i, a) in self.cols[j]:
                yi = y[i]
                if yi != 0:
                    acc += yi * a
            if acc != 0:
                d[j] = d[j] - acc
        return d

    def tableau_column(self, B_inv, j):
        if not self.exact:
            return B_inv @ self.A[:, j]
        col = np.array([self.zero] * self.m, dtype=object)
        for (i, a) in self.cols[j]:
            col = col + B_inv[:, i] * a
        return col


def _pick_entering(p: _Core, status, d, fixed, bland: bool) -> int:
    if not p.exact:
        viol = np.zeros(p.n)
        low = (status == AT_LOWER) & ~fixed
        up = (status == AT_UPPER) & ~fixed
        viol[low] = -d[low]
        viol[up] = d[up]
        if bland:
            ok = viol > p.tol
            return int(np.argmax(ok)) if ok.any() else -1
        j = int(np.argmax(viol))
        return j if viol[j] > p.tol else -1
    best = p.tol
    entering = -1
    for j in range(p.n):
        if status[j] == BASIC or fixed[j]:
            continue
        v = -d[j] if status[j] == AT_LOWER else d[j]
        if v > best:
            if bland:
                return j
            best = v
            entering = j
    return entering


def _ratio_test_float(p: _Core, basis_arr, x_B, col, direction, cap):
    """(t, leaving_row, leave_to); leaving_row -1 means a bound flip."""
    w = col * direction
    lb_b = p.lb[basis_arr]
    ub_b = p.ub[basis_arr]

    dec = w > p.tol
    inc = (w < -p.tol) & (ub_b != INF)
    rows = np.concatenate([np.flatnonzero(dec), np.flatnonzero(inc)])
    if rows.size == 0:
        return cap, -1, AT_LOWER
    bounds = np.concatenate([np.zeros(int(dec.sum()), dtype=int),
                             np.ones(int(inc.sum()), dtype=int)])
    ratios = np.concatenate([
        (x_B[dec] - lb_b[dec]) / w[dec],
        (ub_b[inc] - x_B[inc]) / (-w[inc]),
    ])
    np.clip(ratios, 0.0, None, out=ratios)
    r_min = float(ratios.min())
    if r_min >= cap - p.tie:
        return cap, -1, AT_LOWER  # the entering bound binds first: flip
    close = ratios <= r_min + p.tie
    cand = np.flatnonzero(close)
    pick = cand[int(np.argmin(basis_arr[rows[cand]]))]
    return r_min, int(rows[pick]), (AT_LOWER if bounds[pick] == 0 else AT_UPPER)


def _ratio_test_exact(p: _Core, basis, x_B, col, direction, cap):
    t_best = cap
    leaving = -1
    leave_to = AT_LOWER
    for i in range(p.m):
        w = col[i] * direction
        if w > 0:
            ratio = (x_B[i] - p.lb[basis[i]]) / w
            bound = AT_LOWER
        elif w < 0 and p.ub[basis[i]] != INF:
            ratio = (p.ub[basis[i]] - x_B[i]) / (-w)
            bound = AT_UPPER
        else:
            continue
        if ratio < 0:
            ratio = p.zero
        if ratio < t_best:
            t_best, leaving, leave_to = ratio, i, bound
        elif leaving >= 0 and ratio == t_best and basis[i] < basis[leaving]:
            leaving, leave_to = i, bound
    return t_best, leaving, leave_to


def _simplex(p: _Core, basis: list[int], status: np.ndarray, costs,
             max_iter: int, B_inv=None):
    """Primal iterations; mutates basis and status.

    Returns (state, iterations, B_inv, x_B) so phases can share the basis.
    """
    if B_inv is None:
        B_inv = p.inverse(basis)
    x_B = p.basic_values(basis, status, B_inv)
    basis_arr = np.array(basis)
    fixed = p.lb == p.ub
    degenerate_run = 0
    bland = False
    iters = 0

    while True:
        if iters >= max_iter:
            raise NumericalFailure(f"simplex iteration limit {max_iter} reached")
        iters += 1
        if not p.exact and iters % 256 == 0:
            B_inv = p.inverse(basis)
            x_B = p.basic_values(basis, status, B_inv)
            basis_arr = np.array(basis)

        y = costs[basis] @ B_inv
        d = p.reduced_costs(costs, y)
        entering = _pick_entering(p, status, d, fixed, bland)
        if entering < 0:
            return "Optimal", iters, B_inv, x_B

        direction = 1 if status[entering] == AT_LOWER else -1
        col = p.tableau_column(B_inv, entering)
        cap = p.ub[entering] - p.lb[entering] if p.ub[entering] != INF else INF

        if p.exact:
            t, leaving, leave_to = _ratio_test_exact(p, basis, x_B, col,
                                                     direction, cap)
        else:
            t, leaving, leave_to = _ratio_test_float(p, basis_arr, x_B, col,
                                                     direction, cap)
        if t == INF:
            return "Unbounded", iters, B_inv, x_B

        if t <= p.tie:
            degenerate_run += 1
            if degenerate_run > 40 + 2 * (p.m + p.n):
                bland = True
        else:
            degenerate_run = 0

        if leaving < 0:
            # entering variable flips to its other bound
            x_B = x_B - col * (direction * t)
            status[entering] = AT_UPPER if direction == 1 else AT_LOWER
            continue

        out = basis[leaving]
        enter_value = (p.lb[entering] if direction == 1 else p.ub[entering]) \
            + direction * t
        x_B = x_B - col * (direction * t)
        x_B[leaving] = enter_value
        status[out] = leave_to
        status[entering] = BASIC
        basis[leaving] = entering
        basis_arr[leaving] = entering

        piv = col[leaving]
        if p.exact:
            row = B_inv[leaving, :] / piv
            B_inv[leaving, :] = row
            for i in range(p.m):
                if i != leaving and col[i] != 0:
                    B_inv[i, :] = B_inv[i, :] - col[i] * row
        else:
            B_inv[leaving, :] /= piv
            factor = col.copy()
            factor[leaving] = 0.0
            B_inv -= np.outer(factor, B_inv[leaving, :])


def _solve_typed(c, A, b, lb, ub, exact: bool, max_iter: int | None,
                 warm: tuple | None = None):
    """Two-phase run on one arithmetic type.

    Returns (SimplexResult, basis, status) where basis/status describe the
    final point over the reduced column space (or None when unused). With
    ``warm`` = (basis, status) from a float run on the same reduction,
    phase 1 is replaced by an exact feasibility check of that basis.
    """
    if exact:
        n_all = len(c)
        m_all = len(b)
        A_t = np.empty((m_all, n_all), dtype=object)
        rows = np.asarray(A, dtype=object)
        for i in range(m_all):
            A_t[i, :] = _exact_vector(rows[i])
        b_t = _exact_vector(b)
        c_t = _exact_vector(c)
        lb_t = _exact_vector(lb)
        ub_t = _exact_vector(ub)
        zero = Fraction(0)
        feas_tol = Fraction(0)
    else:
        A_t = np.asarray(A, dtype=float)
        b_t = np.asarray(b, dtype=float)
        c_t = np.asarray(c, dtype=float)
        lb_t = np.asarray(lb, dtype=float)
        ub_t = np.asarray(ub, dtype=float)
        zero = 0.0
        feas_tol = 1e-7
    n_all = len(c_t)
    m_all = len(b_t)

    for j in range(n_all):
        if lb_t[j] > ub_t[j]:
            return SimplexResult("Infeasible"), None, None
        if lb_t[j] == -INF:
            raise NumericalFailure("free variables are not supported")

    # substitute out fixed columns, drop rows that become empty
    fixed_mask = np.array([lb_t[j] == ub_t[j] for j in range(n_all)])
    free_cols = [j for j in range(n_all) if not fixed_mask[j]]
    b_eff = b_t.copy()
    if fixed_mask.any():
        fx = np.flatnonzero(fixed_mask)
        b_eff = b_eff - A_t[:, fx] @ lb_t[fx]
    if free_cols:
        alive = (A_t[:, free_cols] != 0).any(axis=1)
    else:
        alive = np.zeros(m_all, dtype=bool)
    live_rows = []
    for i in range(m_all):
        if alive[i]:
            live_rows.append(i)
        elif (abs(b_eff[i]) > feas_tol if not exact else b_eff[i] != 0):
            return SimplexResult("Infeasible"), None, None

    A_r = A_t[np.ix_(live_rows, free_cols)] if free_cols else A_t[live_rows][:, :0]
    m, n = len(live_rows), len(free_cols)
    if n == 0:
        x = lb_t.copy()
        obj = sum((c_t[j] * x[j] for j in range(n_all)), zero)
        y_full = np.array([zero] * m_all, dtype=A_t.dtype)
        return SimplexResult("Optimal", objective=obj, x=x, y=y_full), None, None

    if max_iter is None:
        max_iter = 5000 + 60 * (m + n)

    one = Fraction(1) if exact else 1.0
    lb_r = lb_t[free_cols]
    ub_r = ub_t[free_cols]
    b_r = b_eff[live_rows]
    resid = b_r - A_r @ lb_r
    art = np.zeros((m, m), dtype=object if exact else float)
    for i in range(m):
        art[i, i] = one if resid[i] >= 0 else -one

    full_A = np.concatenate([A_r, art], axis=1)
    full_lb = np.concatenate([lb_r, np.array([zero] * m, dtype=lb_r.dtype)])
    full_ub = np.concatenate([ub_r, np.array([INF] * m, dtype=ub_r.dtype)])
    p = _Core(full_A, b_r, full_lb, full_ub, exact)
    c_r = c_t[free_cols]
    phase2 = np.concatenate([c_r, np.array([zero] * m, dtype=full_A.dtype)])

    basis = None
    B_inv = None
    it1 = 0
    if warm is not None:
        warm_basis, warm_status = warm
        try:
            candidate = list(warm_basis)
            status = warm_status.copy()
            B_inv = p.inverse(candidate)
            for j in range(n, n + m):
                p.ub[j] = zero
                if status[j] != BASIC:
                    status[j] = AT_LOWER
            x_B = p.basic_values(candidate, status, B_inv)
            feasible = all(p.lb[candidate[i]] <= x_B[i] and
                           (p.ub[candidate[i]] == INF or
                            x_B[i] <= p.ub[candidate[i]])
                           for i in range(m))
            if feasible:
                basis = candidate
            else:
                p.ub[n:] = INF
        except NumericalFailure:
            p.ub[n:] = INF

    if basis is None:
        basis = list(range(n, n + m))
        status = np.full(n + m, AT_LOWER, dtype=int)
        for i in basis:
            status[i] = BASIC
        B0 = art.copy()  # the artificial diagonal is its own inverse
        phase1 = np.concatenate([np.array([zero] * n, dtype=full_A.dtype),
                                 np.array([one] * m, dtype=full_A.dtype)])
        state, it1, B_inv, x_B = _simplex(p, basis, status, phase1, max_iter, B0)
        if state == "Unbounded":
            raise NumericalFailure("phase 1 unbounded")
        art_total = sum((x_B[i] for i in range(m) if basis[i] >= n), zero)
        if art_total > feas_tol:
            return SimplexResult("Infeasible", iterations=it1), None, None
        for j in range(n, n + m):
            p.ub[j] = zero

    state, it2, B_inv, x_B = _simplex(p, basis, status, phase2, max_iter, B_inv)
    if state == "Unbounded":
        return SimplexResult("Unbounded", iterations=it1 + it2), None, None

    if not exact:  # wash out eta-update drift before reporting
        B_inv = p.inverse(basis)
        x_B = p.basic_values(basis, status, B_inv)
    x_r = p.nonbasic_values(status)
    for i, bi in enumerate(basis):
        x_r[bi] = x_B[i]
    y_r = phase2[basis] @ B_inv

    x = lb_t.copy()
    for k, j in enumerate(free_cols):
        x[j] = x_r[k]
    y_full = np.array([zero] * m_all, dtype=A_t.dtype)
    for k, i in enumerate(live_rows):
        y_full[i] = y_r[k]
    obj = sum((c_t[j] * x[j] for j in range(n_all)), zero)
    result = SimplexResult("Optimal", objective=obj, x=x, y=y_full,
                           iterations=it1 + it2)
    return result, basis, status


def solve_arrays(c, A, b, lb, ub, exact: bool = False,
                 max_iter: int | None = None) -> SimplexResult:
    """Two-phase bounded simplex on dense data.

    ``A`` is (m x n); bounds may use ``float('inf')`` for no upper bound.
    Fixed columns (equal bounds) are substituted out up front. Exact mode
    first solves in floats and then certifies (or repairs) the final basis
    in rational arithmetic, so its answers are exact regardless of how the
    float run behaved.
    """
    if not exact:
        result, _, _ = _solve_typed(c, A, b, lb, ub, False, max_iter)
        return result
    warm = None
    try:
        approx, basis, status = _solve_typed(c, A, b, lb, ub, False, max_iter)
        if approx.status == "Optimal" and basis is not None:
            warm = (basis, status)
    except NumericalFailure:
        pass
    result, _, _ = _solve_typed(c, A, b, lb, ub, True, max_iter, warm=warm)
    return result

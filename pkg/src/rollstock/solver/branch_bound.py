"""Branch and bound on top of the bounded simplex.

Depth-first search with most-fractional branching (ties to the lowest
variable index) and a best-bound reordering of the open stack every 1000
nodes. Unbounded integer parking variables branch like any other integer
variable via floor/ceil bound splits. A light fix-propagation pass over the
equality rows tightens variable bounds before the search; it is pure
algebra, so LP relaxation values are unaffected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import NumericalFailure
from ..formulation import MilpModel
from .simplex import INF, solve_arrays

INT_TOL = 1e-6


@dataclass
class _Node:
    lb: np.ndarray
    ub: np.ndarray
    bound: object
    serial: int
    res: object = None  # LP result already computed for these bounds


def _propagate_fixings(model: MilpModel, lb: np.ndarray, ub: np.ndarray,
                       index: dict[str, int]) -> bool:
    """Fix variables forced by equality rows; False if proven infeasible."""
    eq_rows = [r for r in model.rows if r.sense == "="]
    changed = True
    while changed:
        changed = False
        for row in eq_rows:
            residual = row.rhs
            free = []
            for vid, coef in row.coeffs:
                i = index[vid]
                if lb[i] == ub[i]:
                    residual -= coef * lb[i]
                else:
                    free.append((i, coef))
            if not free:
                if abs(residual) > 1e-9:
                    return False
                continue
            if len(free) == 1:
                i, coef = free[0]
                value = residual / coef
                if value < lb[i] - 1e-9 or value > ub[i] + 1e-9:
                    return False
                lb[i] = ub[i] = value
                changed = True
                continue
            # all-nonnegative coefficients with zero residual pin everything
            if residual == 0 and all(c > 0 for _, c in free) and \
                    all(lb[i] == 0 for i, _ in free):
                for i, _ in free:
                    if ub[i] != 0:
                        ub[i] = 0.0
                        changed = True
    return True


def solve_ip(model: MilpModel, tol: float = 1e-7, node_limit: int = 200000,
             exact: bool = False, presolve: bool = True):
    """Branch-and-bound integer optimum of an assembled model."""
    from . import IpSolution, model_arrays

    form = model_arrays(model)
    n = form.n_structural
    int_mask = form.integer
    zero = Fraction(0) if exact else 0.0

    lb0 = form.lb.copy()
    ub0 = form.ub.copy()
    if presolve:
        index = {vid: i for i, vid in enumerate(form.var_ids)}
        ok = _propagate_fixings(model, lb0, ub0, index)
        for i in range(n):
            if int_mask[i] and lb0[i] == ub0[i] and \
                    abs(lb0[i] - round(lb0[i])) > INT_TOL:
                ok = False
                break
        if not ok:
            return IpSolution("Infeasible", nodes=0)

    def run_lp(lb, ub):
        return solve_arrays(form.c, form.A, form.b, lb, ub, exact=exact)

    incumbent = None
    incumbent_obj = None
    nodes = 0
    serial = 0

    root = run_lp(lb0, ub0)
    if root.status == "Infeasible":
        return IpSolution("Infeasible", nodes=1)
    if root.status == "Unbounded":
        return IpSolution("Unbounded", nodes=1)
    stack = [_Node(lb0, ub0, root.objective, serial, root)]
    root_bound = root.objective

    def fractional(x):
        worst, pick = INT_TOL, -1
        for i in range(n):
            if not int_mask[i]:
                continue
            v = x[i]
            f = abs(v - round(v)) if not exact else abs(v - Fraction(round(v)))
            if f > worst:
                worst, pick = f, i
        return pick

    while stack:
        if nodes >= node_limit:
            bound = min((nd.bound for nd in stack),
                        default=incumbent_obj if incumbent_obj is not None
                        else root_bound)
            return IpSolution("NodeLimit", incumbent_obj,
                              incumbent or {}, bound, nodes)
        if nodes and nodes % 1000 == 0:
            stack.sort(key=lambda nd: (-float(nd.bound), nd.serial))

        node = stack.pop()
        if incumbent_obj is not None and node.bound >= incumbent_obj - \
                (zero if exact else 1e-9):
            continue
        nodes += 1
        res = node.res if node.res is not None else run_lp(node.lb, node.ub)
        if res.status == "Infeasible":
            continue
        if res.status == "Unbounded":
            return IpSolution("Unbounded", nodes=nodes)
        if incumbent_obj is not None and res.objective >= incumbent_obj - \
                (zero if exact else 1e-9):
            continue

        j = fractional(res.x)
        if j < 0:
            values = {}
            for i, vid in enumerate(form.var_ids):
                v = res.x[i]
                if int_mask[i]:
                    v = Fraction(round(v)) if exact else float(round(v))
                values[vid] = v if exact else float(v)
            if exact:
                obj = res.objective
            else:
                obj = float(sum(form.c[i] * values[vid]
                                for i, vid in enumerate(form.var_ids)))
            if incumbent_obj is None or obj < incumbent_obj:
                incumbent, incumbent_obj = values, obj
            continue

        v = res.x[j]
        floor_v = int(v) if exact and isinstance(v, Fraction) else int(np.floor(v + 1e-9))
        lo_lb, lo_ub = node.lb.copy(), node.ub.copy()
        hi_lb, hi_ub = node.lb.copy(), node.ub.copy()
        lo_ub[j] = min(lo_ub[j], float(floor_v))
        hi_lb[j] = max(hi_lb[j], float(floor_v + 1))
        serial += 1
        stack.append(_Node(hi_lb, hi_ub, res.objective, serial))
        serial += 1
        stack.append(_Node(lo_lb, lo_ub, res.objective, serial))

    if incumbent is None:
        return IpSolution("Infeasible", nodes=nodes)
    bound = incumbent_obj
    sol = IpSolution("Optimal", incumbent_obj, incumbent, bound, nodes)
    return sol

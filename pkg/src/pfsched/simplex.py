"""Exact two-phase simplex over the rationals.

Sparse tableau rows (dict column -> Fraction), Bland's rule for both the
entering and the leaving variable, so the method always terminates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import MalformedLP
from .model import as_rational

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = (LE, EQ, GE)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class Constraint:
    coeffs: Dict[str, Fraction]
    relation: str
    rhs: Fraction
    name: str = ""


@dataclass
class LinearProgram:
    """Minimize ``objective . x + objective_constant`` subject to constraints.

    Every variable has a finite lower bound (default 0).
    """

    variables: List[Tuple[str, Optional[Fraction]]] = field(default_factory=list)
    constraints: List[Constraint] = field(default_factory=list)
    objective: Dict[str, Fraction] = field(default_factory=dict)
    objective_constant: Fraction = Fraction(0)

    def add_variable(self, name: str, lower=0) -> str:
        self.variables.append((name, None if lower is None else as_rational(lower)))
        return name

    def add_constraint(self, coeffs, relation, rhs, name=""):
        coeffs = {v: as_rational(c) for v, c in coeffs.items() if c != 0}
        self.constraints.append(Constraint(coeffs, relation, as_rational(rhs), name))

    def variable_names(self):
        return [name for name, _ in self.variables]


@dataclass
class LPOutcome:
    status: Status
    solution: Optional[Dict[str, Fraction]] = None
    value: Optional[Fraction] = None

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def check_well_formed(lp: LinearProgram):
    names = set()
    for name, lower in lp.variables:
        if name in names:
            raise MalformedLP(f"variable {name!r} declared twice")
        if lower is None:
            raise MalformedLP(f"variable {name!r} has no lower bound; free variables are not supported")
        names.add(name)
    for con in lp.constraints:
        if con.relation not in _RELATIONS:
            raise MalformedLP(f"unknown relation {con.relation!r}")
        for var in con.coeffs:
            if var not in names:
                raise MalformedLP(f"constraint {con.name or '?'} references undeclared variable {var!r}")
    for var in lp.objective:
        if var not in names:
            raise MalformedLP(f"objective references undeclared variable {var!r}")


class _Tableau:
    def __init__(self, rows, rhs, basis, ncols):
        self.rows = rows        # list of dict col -> Fraction
        self.rhs = rhs          # list of Fraction
        self.basis = basis      # list of col index per row
        self.ncols = ncols

    def pivot(self, r, c, obj):
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            inv = 1 / piv
            for k in row:
                row[k] *= inv
            self.rhs[r] *= inv
        rhs_r = self.rhs[r]
        for i, other in enumerate(self.rows):
            if i == r:
                continue
            f = other.get(c)
            if not f:
                continue
            _axpy(other, row, -f)
            self.rhs[i] -= f * rhs_r
        obj_row, obj_rhs = obj
        f = obj_row.get(c)
        if f:
            _axpy(obj_row, row, -f)
            obj[1] = obj_rhs - f * rhs_r
        self.basis[r] = c

    def run(self, obj, allowed):
        """Bland's rule iterations.  Returns False if unbounded."""
        obj_row = obj[0]
        while True:
            entering = None
            for c, v in obj_row.items():
                if v < 0 and allowed(c) and (entering is None or c < entering):
                    entering = c
            if entering is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row.get(entering)
                if a is None or a <= 0:
                    continue
                ratio = self.rhs[i] / a
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], entering, obj)


def _axpy(target, source, factor):
    for k, v in source.items():
        nv = target.get(k, 0) + factor * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def solve(lp: LinearProgram) -> LPOutcome:
    check_well_formed(lp)
    names = [name for name, _ in lp.variables]
    lower = [lb for _, lb in lp.variables]
    index = {name: i for i, name in enumerate(names)}
    nvars = len(names)

    rows, rhs, relations = [], [], []
    for con in lp.constraints:
        row = {index[v]: c for v, c in con.coeffs.items() if c}
        b = con.rhs - sum((c * lower[index[v]] for v, c in con.coeffs.items()), Fraction(0))
        rel = con.relation
        if not row:
            ok = (b == 0) if rel == EQ else (0 <= b if rel == LE else 0 >= b)
            if not ok:
                return LPOutcome(Status.INFEASIBLE)
            continue
        if b < 0:
            row = {k: -v for k, v in row.items()}
            b = -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        rows.append(row)
        rhs.append(b)
        relations.append(rel)

    # Slack/surplus columns first, artificials last so Bland never prefers them.
    ncols = nvars
    basis = [None] * len(rows)
    for i, rel in enumerate(relations):
        if rel == LE:
            rows[i][ncols] = Fraction(1)
            basis[i] = ncols
            ncols += 1
        elif rel == GE:
            rows[i][ncols] = Fraction(-1)
            ncols += 1
    first_artificial = ncols
    for i in range(len(rows)):
        if basis[i] is None:
            rows[i][ncols] = Fraction(1)
            basis[i] = ncols
            ncols += 1

    tab = _Tableau(rows, rhs, basis, ncols)

    if ncols > first_artificial:
        obj_row, obj_rhs = {}, Fraction(0)
        for i, b in enumerate(basis):
            if b >= first_artificial:
                for k, v in rows[i].items():
                    if k < first_artificial:
                        obj_row[k] = obj_row.get(k, 0) - v
                obj_rhs -= rhs[i]
        obj_row = {k: v for k, v in obj_row.items() if v}
        phase1 = [obj_row, obj_rhs]
        tab.run(phase1, lambda c: True)
        if phase1[1] != 0:
            return LPOutcome(Status.INFEASIBLE)
        _drive_out_artificials(tab, first_artificial)
        for row in tab.rows:
            for k in [k for k in row if k >= first_artificial]:
                del row[k]

    cost = [Fraction(0)] * nvars
    for var, c in lp.objective.items():
        cost[index[var]] += as_rational(c)
    obj_row = {k: v for k, v in enumerate(cost) if v}
    obj_rhs = Fraction(0)
    for i, b in enumerate(tab.basis):
        cb = cost[b] if b < nvars else 0
        if cb:
            _axpy(obj_row, tab.rows[i], -cb)
            obj_rhs -= cb * tab.rhs[i]
    phase2 = [obj_row, obj_rhs]
    if not tab.run(phase2, lambda c: c < first_artificial):
        return LPOutcome(Status.UNBOUNDED)

    x = [Fraction(0)] * nvars
    for i, b in enumerate(tab.basis):
        if b < nvars:
            x[b] = tab.rhs[i]
    solution = {name: x[i] + lower[i] for i, name in enumerate(names)}
    value = lp.objective_constant + sum(
        (as_rational(c) * solution[v] for v, c in lp.objective.items()), Fraction(0))
    return LPOutcome(Status.OPTIMAL, solution, value)


def _drive_out_artificials(tab: _Tableau, first_artificial: int):
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] < first_artificial:
            r += 1
            continue
        candidates = [c for c, v in tab.rows[r].items() if c < first_artificial and v]
        if candidates:
            dummy = [{}, Fraction(0)]
            tab.pivot(r, min(candidates), dummy)
            r += 1
        else:
            # Redundant equality: the row is a combination of the others.
            del tab.rows[r]
            del tab.rhs[r]
            del tab.basis[r]


def check_solution(lp: LinearProgram, solution: Dict[str, Fraction]) -> List[str]:
    """Names (or indices) of constraints and bounds the solution violates."""
    bad = []
    for name, lower in lp.variables:
        if solution[name] < lower:
            bad.append(f"bound {name}")
    for i, con in enumerate(lp.constraints):
        lhs = sum((c * solution[v] for v, c in con.coeffs.items()), Fraction(0))
        ok = {LE: lhs <= con.rhs, GE: lhs >= con.rhs, EQ: lhs == con.rhs}[con.relation]
        if not ok:
            bad.append(con.name or f"#{i}")
    return bad

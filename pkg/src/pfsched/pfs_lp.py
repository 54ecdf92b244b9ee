"""Fixed-order LP for P|pmtn,r_j|f, job ordering rules and schedule extraction.

For a job order 1..n (after renumbering) the LP has variables ``t[j,l]``
(start of job j on machine l), ``p[j,l]`` (amount of j on machine l) and
``C[j]``.  Each job visits machines M_m, ..., M_1 in that order, every
machine processes the jobs in the given order, and ``C[j]`` is the end of
the M_1 piece.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import simplex
from .errors import (InfeasibleLPSolution, NotAgreeable, OrderHypothesisViolated,
                     SchedulingError, UnsupportedCriterion)
from .model import (Criterion, CriterionKind, Instance, PiecewiseLinearFn, Piece,
                    Schedule, as_rational, evaluate)
from .simplex import EQ, GE, LE, LinearProgram
from .transform import to_pfs


def _merged_breakpoints(f: PiecewiseLinearFn, g: PiecewiseLinearFn):
    return sorted(set(f.breakpoints) | set(g.breakpoints))


def check_difference_monotone(f: PiecewiseLinearFn, g: PiecewiseLinearFn) -> bool:
    """True iff ``f - g`` is nondecreasing on [0, inf)."""
    starts = [Fraction(0)] + _merged_breakpoints(f, g)
    return all(f.slope_after(t) >= g.slope_after(t) for t in starts)


def check_difference_nonnegative(f: PiecewiseLinearFn, g: PiecewiseLinearFn) -> bool:
    """True iff ``f(t) >= g(t)`` for every t >= 0."""
    points = [Fraction(0)] + _merged_breakpoints(f, g)
    if any(f(t) < g(t) for t in points):
        return False
    return f.slope_after(points[-1]) >= g.slope_after(points[-1])


class OrderCase(enum.Enum):
    NO_RELEASE = "no_release"
    AGREEABLE_SUM = "agreeable_sum"
    AGREEABLE_MAX = "agreeable_max"
    AGREEABLE_WULJ = "agreeable_wulj"
    USER_SUPPLIED = "user_supplied"


@dataclass(frozen=True)
class OrderCertificate:
    permutation: tuple
    case: OrderCase
    evidence: tuple = ()

    @property
    def certified(self) -> bool:
        return self.case is not OrderCase.USER_SUPPLIED


def _pair_test(criterion: Criterion):
    if criterion.kind is CriterionKind.SUM:
        return check_difference_monotone, "f_{a} - f_{b} is nondecreasing"
    return check_difference_nonnegative, "f_{a} - f_{b} is nonnegative"


def _sorted_order(instance: Instance, criterion: Criterion, use_release: bool):
    """Sort by (r, p), breaking (r, p) ties with the criterion's pair test."""
    kind = criterion.kind
    if kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
        def key(j):
            job = instance.job(j)
            return (job.release if use_release else 0, job.processing, -job.weight, j)
        return sorted(instance.job_ids(), key=key)

    test, _ = _pair_test(criterion)

    def cmp(a, b):
        ja, jb = instance.job(a), instance.job(b)
        ka = (ja.release if use_release else 0, ja.processing)
        kb = (jb.release if use_release else 0, jb.processing)
        if ka != kb:
            return -1 if ka < kb else 1
        fa, fb = criterion.fn(a), criterion.fn(b)
        ab, ba = test(fa, fb), test(fb, fa)
        if ab and not ba:
            return -1
        if ba and not ab:
            return 1
        return -1 if a < b else (1 if a > b else 0)

    return sorted(instance.job_ids(), key=functools.cmp_to_key(cmp))


def _verify_order(instance: Instance, criterion: Criterion, order, use_release: bool):
    evidence = []
    if use_release:
        for a, b in zip(order, order[1:]):
            ja, jb = instance.job(a), instance.job(b)
            if ja.release > jb.release or ja.processing > jb.processing:
                raise NotAgreeable((a, b), "release dates and processing times are not co-sorted "
                                           "(p decreases while r increases)")
    else:
        for a, b in zip(order, order[1:]):
            if instance.job(a).processing > instance.job(b).processing:
                raise NotAgreeable((a, b), "processing times are not sorted")
    if criterion.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
        for x, a in enumerate(order):
            for b in order[x + 1:]:
                if instance.job(a).weight < instance.job(b).weight:
                    raise NotAgreeable((a, b), "weights must be nonincreasing along (r, p) order")
                evidence.append((a, b, "r, p nondecreasing; w nonincreasing"))
        return evidence
    test, text = _pair_test(criterion)
    for x, a in enumerate(order):
        for b in order[x + 1:]:
            if not test(criterion.fn(a), criterion.fn(b)):
                raise NotAgreeable((a, b), "job %d precedes job %d in (r, p) order but %s does not hold"
                                   % (a, b, text.format(a=a, b=b)))
            evidence.append((a, b, "r, p nondecreasing; " + text.format(a=a, b=b)))
    return evidence


def determine_order(instance: Instance, criterion: Criterion, enumerate_cap: int = 8) -> OrderCertificate:
    """Find a job order that some optimal schedule's completion times follow."""
    criterion.check_instance(instance)
    if criterion.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
        order = _sorted_order(instance, criterion, True)
        evidence = _verify_order(instance, criterion, order, True)
        return OrderCertificate(tuple(order), OrderCase.AGREEABLE_WULJ, tuple(evidence))

    if instance.releases_equal():
        order = _sorted_order(instance, criterion, False)
        try:
            evidence = _verify_order(instance, criterion, order, False)
        except NotAgreeable:
            if instance.n > enumerate_cap:
                raise
            from .oracle import enumerate_orders_optimum
            result = enumerate_orders_optimum(instance, criterion, cap=enumerate_cap)
            return OrderCertificate(tuple(result.order), OrderCase.NO_RELEASE,
                                    (("*", "*", f"minimum over all {instance.n}! orders"),))
        return OrderCertificate(tuple(order), OrderCase.NO_RELEASE, tuple(evidence))

    order = _sorted_order(instance, criterion, True)
    evidence = _verify_order(instance, criterion, order, True)
    case = OrderCase.AGREEABLE_SUM if criterion.kind is CriterionKind.SUM else OrderCase.AGREEABLE_MAX
    return OrderCertificate(tuple(order), case, tuple(evidence))


def t_var(j, l):
    return f"t[{j},{l}]"


def p_var(j, l):
    return f"p[{j},{l}]"


def c_var(j):
    return f"C[{j}]"


def _check_permutation(instance: Instance, order, allow_subset=False):
    order = [int(j) for j in order]
    ids = instance.job_ids()
    if len(set(order)) != len(order) or any(j not in ids for j in order):
        raise ValueError(f"order {order} is not a permutation of job ids")
    if not allow_subset and len(order) != len(ids):
        raise ValueError(f"order {order} is not a permutation of job ids")
    return order


def structural_lp(instance: Instance, order: Sequence[int]) -> LinearProgram:
    """Constraints of the fixed-order LP without an objective.

    ``order`` may list a subset of the jobs.
    """
    order = _check_permutation(instance, order, allow_subset=True)
    m = instance.machines
    lp = LinearProgram()
    for j in order:
        for l in range(1, m + 1):
            lp.add_variable(t_var(j, l))
            lp.add_variable(p_var(j, l))
        lp.add_variable(c_var(j))
    for j in order:
        job = instance.job(j)
        lp.add_constraint({p_var(j, l): 1 for l in range(1, m + 1)}, EQ, job.processing,
                          f"processing[{j}]")
    for j in order:
        for l in range(1, m):
            lp.add_constraint({t_var(j, l + 1): 1, p_var(j, l + 1): 1, t_var(j, l): -1}, LE, 0,
                              f"machine-sequence[{j},{l}]")
    # No-overlap on every machine, M_m included.
    for a, b in zip(order, order[1:]):
        for l in range(1, m + 1):
            lp.add_constraint({t_var(a, l): 1, p_var(a, l): 1, t_var(b, l): -1}, LE, 0,
                              f"job-sequence[{a},{b},{l}]")
    for j in order:
        lp.add_constraint({t_var(j, m): 1}, GE, instance.job(j).release, f"release[{j}]")
    for j in order:
        lp.add_constraint({t_var(j, 1): 1, p_var(j, 1): 1, c_var(j): -1}, EQ, 0, f"completion[{j}]")
    return lp


def build_lp(instance: Instance, order: Sequence[int], criterion: Criterion) -> LinearProgram:
    if criterion.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
        raise UnsupportedCriterion("weighted late jobs are handled by solve_common_due_late_jobs")
    criterion.check_instance(instance)
    order = _check_permutation(instance, order)
    lp = structural_lp(instance, order)
    # Epigraph variables are shifted by the function floor f(0) so they stay >= 0.
    if criterion.kind is CriterionKind.SUM:
        for j in order:
            f = criterion.fn(j)
            floor = f(0)
            phi = lp.add_variable(f"phi[{j}]")
            for s, (slope, intercept) in enumerate(f.segments()):
                lp.add_constraint({phi: 1, c_var(j): -slope}, GE, intercept - floor, f"epigraph[{j},{s}]")
            lp.objective[phi] = Fraction(1)
            lp.objective_constant += floor
    else:
        floor = min(criterion.fn(j)(0) for j in order)
        z = lp.add_variable("z")
        for j in order:
            for s, (slope, intercept) in enumerate(criterion.fn(j).segments()):
                lp.add_constraint({z: 1, c_var(j): -slope}, GE, intercept - floor, f"epigraph[{j},{s}]")
        lp.objective[z] = Fraction(1)
        lp.objective_constant = floor
    return lp


def extract_schedule(instance: Instance, order: Sequence[int], lp_solution: Dict[str, Fraction]) -> Schedule:
    """Pieces ``[t[j,l], t[j,l] + p[j,l])`` on machine l for every positive ``p[j,l]``."""
    order = _check_permutation(instance, order, allow_subset=True)
    structure = structural_lp(instance, order)
    try:
        bad = simplex.check_solution(structure, lp_solution)
    except KeyError as exc:
        raise InfeasibleLPSolution(f"solution lacks variable {exc.args[0]}") from None
    if bad:
        raise InfeasibleLPSolution(f"solution violates {', '.join(bad[:5])}")
    pieces = []
    for j in order:
        for l in range(1, instance.machines + 1):
            amount = lp_solution[p_var(j, l)]
            if amount > 0:
                start = lp_solution[t_var(j, l)]
                pieces.append(Piece(j, l, start, start + amount))
    return Schedule(tuple(pieces))


@dataclass(frozen=True)
class Solution:
    schedule: Schedule
    value: Fraction
    certificate: OrderCertificate
    order: tuple
    extracted: Schedule
    lp_size: tuple = field(default=(0, 0))


def _solve_lp(lp: LinearProgram) -> simplex.LPOutcome:
    outcome = simplex.solve(lp)
    if not outcome.optimal:
        raise SchedulingError(f"fixed-order LP unexpectedly {outcome.status.value}")
    return outcome


def solve(instance: Instance, criterion: Criterion, order: Optional[Sequence[int]] = None,
          enumerate_cap: int = 8) -> Solution:
    """Optimal schedule via the fixed-order LP.

    Without ``order`` the order comes from :func:`determine_order`; a user
    order is solved as given (the value is then only the best schedule
    following that order).  The returned schedule is normalized to a
    non-delay PFS-like schedule whenever its completion order allows it.
    """
    if criterion.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
        raise UnsupportedCriterion("use solve_common_due_late_jobs for weighted late jobs")
    criterion.check_instance(instance)
    if order is None:
        cert = determine_order(instance, criterion, enumerate_cap)
    else:
        cert = OrderCertificate(tuple(_check_permutation(instance, order)), OrderCase.USER_SUPPLIED)
    lp = build_lp(instance, cert.permutation, criterion)
    outcome = _solve_lp(lp)
    extracted = extract_schedule(instance, cert.permutation, outcome.solution)
    try:
        schedule, numbering = to_pfs(instance, extracted, cert.permutation)
    except OrderHypothesisViolated:
        if cert.certified:
            raise
        schedule, numbering = extracted, cert.permutation
    if cert.certified:
        got = evaluate(instance, extracted, criterion)
        final = evaluate(instance, schedule, criterion)
        if not got == final == outcome.value:
            raise SchedulingError(
                f"schedule value {got}/{final} differs from LP optimum {outcome.value}")
    return Solution(schedule, outcome.value, cert, tuple(numbering), extracted,
                    (len(lp.variables), len(lp.constraints)))


@dataclass(frozen=True)
class LateJobsSolution:
    schedule: Schedule
    value: Fraction
    k_star: int
    certificate: OrderCertificate
    order: tuple
    feasible_prefixes: tuple = ()


def deadline_lp(instance: Instance, order: Sequence[int], due, on_time: int) -> LinearProgram:
    """Fixed-order LP where the first ``on_time`` jobs of ``order`` finish by ``due``."""
    due = as_rational(due)
    lp = structural_lp(instance, order)
    for j in list(order)[:on_time]:
        lp.add_constraint({t_var(j, 1): 1, p_var(j, 1): 1}, LE, due, f"deadline[{j}]")
    return lp


def solve_common_due_late_jobs(instance: Instance, d) -> LateJobsSolution:
    """Minimize the weighted number of late jobs for a common due date ``d``.

    Tests prefixes of the agreeable order for on-time feasibility.  Every
    prefix is tested so that monotonicity of feasibility is checked rather
    than assumed.
    """
    d = as_rational(d)
    criterion = Criterion.weighted_late(instance, d)
    cert = determine_order(instance, criterion)
    order = list(cert.permutation)
    flags = []
    for k in range(1, instance.n + 1):
        prefix = order[:k]
        outcome = simplex.solve(deadline_lp(instance, prefix, d, k))
        flags.append(outcome.optimal)
        if outcome.optimal and not all(flags):
            raise AssertionError(f"prefix {k} feasible after an infeasible shorter prefix")
    k_star = flags.index(False) if False in flags else instance.n

    lp = deadline_lp(instance, order, d, k_star)
    for j in order:
        lp.objective[c_var(j)] = Fraction(1)
    outcome = _solve_lp(lp)
    extracted = extract_schedule(instance, order, outcome.solution)
    schedule, numbering = to_pfs(instance, extracted, order)
    value = sum((instance.job(j).weight for j in order[k_star:]), Fraction(0))
    got = evaluate(instance, schedule, criterion)
    if got != value:
        raise SchedulingError(f"late-jobs schedule has value {got}, expected {value}")
    return LateJobsSolution(schedule, value, k_star, cert, tuple(numbering), tuple(flags))

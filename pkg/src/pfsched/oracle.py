"""Independent ground truth for tests: order enumeration, McNaughton's bound,
subset brute force for late jobs and random generators.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import networkx as nx
import numpy as np
from scipy.optimize import linprog

from . import simplex
from .errors import NotAgreeable, ReleasesPresent, TooLarge
from .model import Criterion, CriterionKind, Instance, Job, Piece, Schedule, as_rational
from .pfs_lp import build_lp, determine_order
from .simplex import EQ, GE, LE, LinearProgram

OPTIMAL = "optimal"
BEST_PFS_LIKE = "best-pfs-like"


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    m: int
    max_value: int = 10
    seed: int = 0
    agreeable: bool = False

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.max_value < 1:
            raise ValueError("n, m and max_value must be positive")


@dataclass(frozen=True)
class OracleResult:
    value: Fraction
    order: tuple
    label: str


def _float_order_value(instance: Instance, order, criterion: Criterion) -> float:
    """Fixed-order LP value in floating point, assembled independently of
    :func:`build_lp`.  Used only to screen orders."""
    n, m = len(order), instance.machines
    width = 2 * m + 1
    extra = n if criterion.kind is CriterionKind.SUM else 1
    nvar = n * width + extra

    def t(i, l):
        return i * width + 2 * (l - 1)

    def p(i, l):
        return t(i, l) + 1

    def c(i):
        return i * width + 2 * m

    eq, eq_b, ub, ub_b = [], [], [], []
    for i, j in enumerate(order):
        job = instance.job(j)
        row = np.zeros(nvar)
        row[[p(i, l) for l in range(1, m + 1)]] = 1
        eq.append(row)
        eq_b.append(float(job.processing))
        row = np.zeros(nvar)
        row[t(i, 1)] = row[p(i, 1)] = 1
        row[c(i)] = -1
        eq.append(row)
        eq_b.append(0.0)
        for l in range(1, m):
            row = np.zeros(nvar)
            row[t(i, l + 1)] = row[p(i, l + 1)] = 1
            row[t(i, l)] = -1
            ub.append(row)
            ub_b.append(0.0)
        if i + 1 < n:
            for l in range(1, m + 1):
                row = np.zeros(nvar)
                row[t(i, l)] = row[p(i, l)] = 1
                row[t(i + 1, l)] = -1
                ub.append(row)
                ub_b.append(0.0)
        row = np.zeros(nvar)
        row[t(i, m)] = -1
        ub.append(row)
        ub_b.append(-float(job.release))
        # epigraph: slope * C_j + intercept <= phi (or z)
        aux = n * width + (i if criterion.kind is CriterionKind.SUM else 0)
        for slope, intercept in criterion.fn(j).segments():
            row = np.zeros(nvar)
            row[c(i)] = float(slope)
            row[aux] = -1
            ub.append(row)
            ub_b.append(-float(intercept))
    cost = np.zeros(nvar)
    cost[n * width:] = 1
    bounds = [(0, None)] * (n * width) + [(None, None)] * extra
    res = linprog(cost, A_ub=np.array(ub), b_ub=ub_b, A_eq=np.array(eq), b_eq=eq_b,
                  bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed on a fixed-order LP: {res.message}")
    return res.fun


def _exact_lp_value(lp: LinearProgram) -> Fraction:
    outcome = simplex.solve(lp)
    if not outcome.optimal:
        raise RuntimeError(f"fixed-order LP {outcome.status.value}")
    return outcome.value


def enumerate_orders_optimum(instance: Instance, criterion: Criterion, cap: int = 8,
                             exact: bool = False) -> OracleResult:
    """Minimum fixed-order LP value over all n! job orders.

    Orders are screened with a floating-point LP solver; every order within a
    small tolerance of the float minimum is re-solved exactly, so the
    returned value is exact.  ``exact=True`` skips the screening.
    """
    if criterion.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
        raise ValueError("order enumeration needs a SUM or MAX criterion")
    if instance.n > cap:
        raise TooLarge(f"{instance.n}! orders exceed the cap of {cap}! ")
    orders = list(itertools.permutations(instance.job_ids()))
    if exact:
        candidates = orders
    else:
        values = [_float_order_value(instance, order, criterion) for order in orders]
        best = min(values)
        tol = 1e-6 * max(1.0, abs(best))
        candidates = [o for o, v in zip(orders, values) if v <= best + tol]
    # Orders that present identical job data position by position give
    # isomorphic LPs; solve one representative exactly.
    exact_by_shape = {}
    scored = []
    for o in candidates:
        shape = tuple(_job_shape(instance, criterion, j) for j in o)
        if shape not in exact_by_shape:
            exact_by_shape[shape] = _exact_lp_value(build_lp(instance, o, criterion))
        scored.append((exact_by_shape[shape], o))
    value, order = min(scored)
    return OracleResult(value, tuple(order), _label(instance, criterion))


def _job_shape(instance, criterion, j):
    job = instance.job(j)
    return job.release, job.processing, criterion.fn(j)


def _label(instance: Instance, criterion: Criterion) -> str:
    if instance.releases_equal():
        return OPTIMAL
    try:
        determine_order(instance, criterion)
    except NotAgreeable:
        return BEST_PFS_LIKE
    return OPTIMAL


def mcnaughton_cmax(instance: Instance) -> Fraction:
    if not instance.releases_equal():
        raise ReleasesPresent("McNaughton's bound needs equal release dates")
    total = sum((job.processing for job in instance.jobs), Fraction(0))
    longest = max(job.processing for job in instance.jobs)
    return max(longest, total / instance.machines) + instance.jobs[0].release


def deadline_feasible(instance: Instance, jobs: Iterable[int], d) -> bool:
    """Can ``jobs`` all be finished by ``d``?  Preemptive max-flow test.

    Source -> job (capacity p_j), job -> interval between consecutive
    release/deadline points it may use (capacity = interval length),
    interval -> sink (capacity = m * length).
    """
    d = as_rational(d)
    jobs = sorted(set(jobs))
    if not jobs:
        return True
    data = [instance.job(j) for j in jobs]
    if any(job.release + job.processing > d for job in data):
        return False
    points = sorted({job.release for job in data} | {d})
    points = [t for t in points if t <= d]
    values = [job.processing for job in data] + points
    scale = math.lcm(*(Fraction(v).denominator for v in values))
    g = nx.DiGraph()
    for job in data:
        g.add_edge("s", ("j", job.id), capacity=int(job.processing * scale))
    for a, b in zip(points, points[1:]):
        length = int((b - a) * scale)
        g.add_edge(("i", a), "t", capacity=instance.machines * length)
        for job in data:
            if job.release <= a:
                g.add_edge(("j", job.id), ("i", a), capacity=length)
    if "t" not in g:
        return False
    flow = nx.maximum_flow_value(g, "s", "t")
    return flow == sum(int(job.processing * scale) for job in data)


def capacity_conditions(instance: Instance, jobs: Iterable[int], d) -> bool:
    """Necessary conditions for meeting ``d`` that use no LP and no flow."""
    d = as_rational(d)
    data = [instance.job(j) for j in jobs]
    for job in data:
        if job.processing > d - job.release:
            return False
    for rho in {job.release for job in data}:
        work = sum((job.processing for job in data if job.release >= rho), Fraction(0))
        if work > instance.machines * (d - rho):
            return False
    return True


def brute_force_late_jobs(instance: Instance, d, cap: int = 16):
    """Minimum total weight of late jobs over all on-time subsets.

    Returns ``(value, on_time_set)``.  Subsets are tried by increasing late
    weight (then larger on-time sets, then lexicographically); the first
    feasible one is optimal.
    """
    d = as_rational(d)
    if instance.n > cap:
        raise TooLarge(f"2^{instance.n} subsets exceed the cap of 2^{cap}")
    ids = instance.job_ids()
    total = sum((instance.job(j).weight for j in ids), Fraction(0))
    subsets = []
    for size in range(len(ids) + 1):
        for combo in itertools.combinations(ids, size):
            on_time_weight = sum((instance.job(j).weight for j in combo), Fraction(0))
            subsets.append((total - on_time_weight, -size, combo))
    subsets.sort()
    for value, _, combo in subsets:
        if not capacity_conditions(instance, combo, d):
            continue
        if deadline_feasible(instance, combo, d):
            return value, frozenset(combo)
    raise RuntimeError("the empty set is always feasible")


def random_instance(config: GeneratorConfig) -> Instance:
    rng = random.Random(config.seed)
    hi = config.max_value
    releases = [rng.randint(0, hi) for _ in range(config.n)]
    processing = [rng.randint(1, hi) for _ in range(config.n)]
    if config.agreeable:
        releases.sort()
        processing.sort()
    dues = [rng.randint(1, hi) for _ in range(config.n)]
    weights = [rng.randint(1, hi) for _ in range(config.n)]
    jobs = [Job(i + 1, releases[i], processing[i], dues[i], weights[i]) for i in range(config.n)]
    return Instance(config.m, tuple(jobs))


def random_feasible_schedule(instance: Instance, seed: int) -> Schedule:
    """Randomized list scheduling with random preemptions and idle time."""
    rng = random.Random(seed)
    remaining = {job.id: job.processing for job in instance.jobs}
    release = {job.id: job.release for job in instance.jobs}
    steps = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]
    t = Fraction(0)
    pieces = []
    while any(remaining.values()):
        pending = [j for j, rem in remaining.items() if rem > 0]
        avail = [j for j in pending if release[j] <= t]
        later = [release[j] for j in pending if release[j] > t]
        if not avail:
            t = min(later)
            continue
        rng.shuffle(avail)
        low = 0 if rng.random() < 0.1 else 1
        k = rng.randint(low, min(instance.machines, len(avail)))
        chosen = avail[:k]
        machines = rng.sample(range(1, instance.machines + 1), k)
        step = rng.choice(steps)
        if later:
            step = min(step, min(later) - t)
        for j in chosen:
            step = min(step, remaining[j])
        for j, q in zip(chosen, machines):
            pieces.append(Piece(j, q, t, t + step))
            remaining[j] -= step
        t += step
    return Schedule(tuple(pieces))

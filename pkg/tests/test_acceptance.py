"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

All comparisons are exact rational equalities (tolerance 0).  Sample counts
and seeds are pinned so every run checks the same cases.
"""

import random
from fractions import Fraction
from pathlib import Path

import pytest

from pfsched import oracle, pfs_lp, transform, validate
from pfsched.cli import EXIT_OK, main
from pfsched.errors import OrderHypothesisViolated
from pfsched.model import Criterion, CriterionKind, Instance, Job, PiecewiseLinearFn, evaluate

TOLERANCE = 0          # exact comparisons throughout
GOLDEN = Path(__file__).parent / "golden"

RESULTS = []


def _report(number, title, failures, detail):
    line = f"[{'PASS' if not failures else 'FAIL'}] criterion {number}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert not failures, failures[:5]


def _agreeable_instance(rng, n, m, hi=10, due_order=None, weight_order=None):
    """Release and processing times co-sorted.  ``due_order``/``weight_order``
    of +1/-1 additionally sort dues/weights along the same job order."""
    r = sorted(rng.randint(0, hi) for _ in range(n))
    p = sorted(rng.randint(1, hi) for _ in range(n))
    d = [rng.randint(1, hi) for _ in range(n)]
    w = [rng.randint(1, hi) for _ in range(n)]
    if due_order:
        d.sort(reverse=due_order < 0)
    if weight_order:
        w.sort(reverse=weight_order < 0)
    return Instance(m, tuple(Job(i + 1, r[i], p[i], d[i], w[i]) for i in range(n)))


def _random_convex(rng, strict=True):
    k = rng.randint(0, 3)
    bps = sorted(rng.sample(range(1, 25), k))
    slopes = sorted(rng.sample(range(0, 8), k + 1)) if strict else sorted(rng.randint(0, 5) for _ in range(k + 1))
    den = rng.choice((1, 2))
    return PiecewiseLinearFn(tuple(bps), rng.randint(0, 5), tuple(Fraction(s, den) for s in slopes))


def _add(f, g):
    bps = tuple(sorted(set(f.breakpoints) | set(g.breakpoints)))
    starts = (Fraction(0),) + bps
    slopes = tuple(f.slope_after(t) + g.slope_after(t) for t in starts)
    return PiecewiseLinearFn(bps, f.initial_value + g.initial_value, slopes)


def _dominating(rng, f):
    """Random convex h >= f on [0, inf) with h - f not necessarily monotone."""
    h = _random_convex(rng, strict=False)
    slopes = list(h.slopes)
    slopes[-1] = max(slopes[-1], f.slopes[-1])
    h = PiecewiseLinearFn(h.breakpoints, h.initial_value, tuple(slopes))
    points = [Fraction(0)] + sorted(set(f.breakpoints) | set(h.breakpoints))
    lift = max(max(f(t) - h(t) for t in points), 0)
    return PiecewiseLinearFn(h.breakpoints, h.initial_value + lift, h.slopes)


# -- 1 ---------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_1_oracle_equivalence():
    rng = random.Random(1001)
    kinds = ("sum_cj", "sum_wj_tj", "lmax", "cmax")
    failures, counts = [], dict.fromkeys(kinds, 0)
    for case in range(200):
        kind = kinds[case % 4]
        n, m = rng.randint(1, 6), rng.randint(1, 3)
        if kind == "sum_wj_tj":
            inst = _agreeable_instance(rng, n, m, due_order=1, weight_order=-1)
            crit = Criterion.sum_tardiness(inst)
        elif kind == "lmax":
            inst = _agreeable_instance(rng, n, m, due_order=1)
            crit = Criterion.max_lateness(inst)
        else:
            inst = _agreeable_instance(rng, n, m)
            crit = Criterion.sum_completion(inst) if kind == "sum_cj" else Criterion.makespan(inst)
        sol = pfs_lp.solve(inst, crit, enumerate_cap=0)
        if not sol.certificate.certified:
            failures.append((case, kind, "order not certified"))
        best = oracle.enumerate_orders_optimum(inst, crit)
        counts[kind] += 1
        if abs(sol.value - best.value) > TOLERANCE:
            failures.append((case, kind, sol.value, best.value))
    _report(1, "solve equals order-enumeration optimum", failures,
            f"{sum(counts.values())} instances: " + ", ".join(f"{k} {v}" for k, v in counts.items()))


# -- 2 ---------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_2_common_due_late_jobs():
    rng = random.Random(2002)
    failures = []
    for case in range(200):
        n, m = rng.randint(1, 10), rng.randint(1, 3)
        inst = _agreeable_instance(rng, n, m, weight_order=-1)
        horizon = max(j.release for j in inst.jobs) + sum(j.processing for j in inst.jobs)
        d = Fraction(rng.randint(1, 2 * int(horizon)), 2)
        try:
            sol = pfs_lp.solve_common_due_late_jobs(inst, d)
        except AssertionError as exc:
            failures.append((case, "prefix monotonicity", str(exc)))
            continue
        flags = list(sol.feasible_prefixes)
        if flags != sorted(flags, reverse=True):
            failures.append((case, "prefix flags", flags))
        value, _ = oracle.brute_force_late_jobs(inst, d)
        if abs(sol.value - value) > TOLERANCE:
            failures.append((case, sol.value, value))
    _report(2, "common-due late jobs equal subset brute force", failures, "200 instances, n <= 10")


# -- 3 ---------------------------------------------------------------------

def test_criterion_3_make_pfs():
    rng = random.Random(3003)
    failures, accepted, skipped, exchanges = [], 0, 0, 0
    seed = 0
    while accepted < 500:
        seed += 1
        inst = _agreeable_instance(rng, rng.randint(1, 6), rng.randint(1, 3))
        sched = oracle.random_feasible_schedule(inst, seed)
        order = transform.completion_order(inst, sched)
        try:
            transform.check_order_hypothesis(inst, sched, order)
        except OrderHypothesisViolated:
            skipped += 1
            continue
        accepted += 1
        trace = []
        out = transform.make_pfs(inst, sched, order, trace)
        _, numbering = transform.to_pfs(inst, sched, order)
        before, after = sched.completion_times(), out.completion_times()
        if not validate.is_pfs_like(out, numbering).ok:
            failures.append((seed, "not PFS-like"))
        if not validate.is_non_delay(inst, out).ok:
            failures.append((seed, "not non-delay"))
        if any(after[j] > before[j] for j in before):
            failures.append((seed, "completion increased"))
        keys = [entry[:3] for entry in trace]
        if any(a >= b for a, b in zip(keys, keys[1:])):
            failures.append((seed, "progress key not strictly increasing", keys))
        exchanges += len(trace)
    _report(3, "make_pfs gives non-delay PFS-like schedules, C' <= C, progress strictly advances",
            failures, f"{accepted} schedules, {skipped} skipped, {exchanges} exchanges")


# -- 4 ---------------------------------------------------------------------

def test_criterion_4_exchange_inequalities():
    rng = random.Random(4004)
    variants = ("sum", "max", "wulj")
    failures, counts, seed = [], dict.fromkeys(variants, 0), 0
    while sum(counts.values()) < 510:
        seed += 1
        inst = _agreeable_instance(rng, rng.randint(2, 6), rng.randint(1, 3))
        sched = oracle.random_feasible_schedule(inst, seed)
        c = sched.completion_times()
        pairs = [(a.id, b.id) for a in inst.jobs for b in inst.jobs
                 if a.id != b.id and a.release <= b.release and a.processing <= b.processing
                 and c[a.id] > c[b.id]]
        if not pairs:
            continue
        j, k = rng.choice(pairs)
        out = transform.exchange_pair(inst, sched, j, k)
        c2 = out.completion_times()
        if not (c2[j] <= c[k] and c2[k] == c[j]):
            failures.append((seed, j, k, "completion guarantee"))
        if any(c2[x] != c[x] for x in c if x not in (j, k)):
            failures.append((seed, j, k, "other job moved"))
        if not validate.check_feasible(inst, out).ok:
            failures.append((seed, j, k, "infeasible"))

        variant = variants[seed % 3]
        counts[variant] += 1
        if variant == "sum":
            fk = _random_convex(rng)
            fj = _add(fk, _random_convex(rng))
            assert pfs_lp.check_difference_monotone(fj, fk)
            ok = fj(c2[j]) + fk(c2[k]) <= fj(c[j]) + fk(c[k])
        elif variant == "max":
            fk = _random_convex(rng)
            fj = _dominating(rng, fk)
            assert pfs_lp.check_difference_nonnegative(fj, fk)
            ok = max(fj(c2[j]), fk(c2[k])) <= max(fj(c[j]), fk(c[k]))
        else:
            d = Fraction(rng.randint(0, 2 * int(max(c.values()))), 2)
            wk = rng.randint(1, 10)
            wj = rng.randint(wk, 10)

            def late(w, t):
                return w if t > d else 0

            ok = late(wj, c2[j]) + late(wk, c2[k]) <= late(wj, c[j]) + late(wk, c[k])
        if not ok:
            failures.append((seed, j, k, variant, "pair inequality"))
    _report(4, "exchange_pair completion guarantees and pair inequalities", failures,
            ", ".join(f"{k} {v}" for k, v in counts.items()))


# -- 5 ---------------------------------------------------------------------

def test_criterion_5_makespan_closed_form():
    rng = random.Random(5005)
    failures = []
    for case in range(100):
        n, m = rng.randint(1, 10), rng.randint(1, 4)
        p = [Fraction(rng.randint(1, 20), rng.choice((1, 1, 2, 3))) for _ in range(n)]
        inst = Instance.build(m, p)
        sol = pfs_lp.solve(inst, Criterion.makespan(inst))
        expected = max(max(p), sum(p) / m)
        if abs(sol.value - expected) > TOLERANCE:
            failures.append((case, sol.value, expected))
    _report(5, "no-release makespan equals max(max p, sum p / m)", failures, "100 instances")


# -- 6 ---------------------------------------------------------------------

def test_criterion_6_lp_structure():
    rng = random.Random(6006)
    failures = []
    for case in range(150):
        n, m = rng.randint(1, 8), rng.randint(1, 4)
        inst = _agreeable_instance(rng, n, m)
        choice = case % 5
        if choice == 0:
            crit = Criterion.sum_completion(inst)
        elif choice == 1:
            crit = Criterion.sum_tardiness(inst)
        elif choice == 2:
            crit = Criterion.max_lateness(inst)
        elif choice == 3:
            crit = Criterion.makespan(inst)
        else:
            kind = rng.choice((CriterionKind.SUM, CriterionKind.MAX))
            crit = Criterion(kind, tuple(_random_convex(rng) for _ in range(n)), name="custom")
        order = [j.id for j in inst.jobs]
        rng.shuffle(order)
        lp = pfs_lp.build_lp(inst, order, crit)
        segments = sum(len(crit.fn(j).breakpoints) + 1 for j in order)
        epigraph = n if crit.kind is CriterionKind.SUM else 1
        want = (n * (2 * m + 1) + epigraph, 2 * n * m + 2 * n - m + segments)
        got = (len(lp.variables), len(lp.constraints))
        if got != want:
            failures.append((case, n, m, crit.name, got, want))
    _report(6, "LP has n(2m+1) + epigraph variables and 2nm + 2n - m + segments constraints",
            failures, "150 (n, m, criterion) draws")


# -- 7 ---------------------------------------------------------------------

def test_criterion_7_extraction_equality():
    rng = random.Random(7007)
    failures = []
    makers = (
        lambda inst: Criterion.sum_completion(inst),
        lambda inst: Criterion.sum_completion(inst, weighted=True),
        lambda inst: Criterion.sum_tardiness(inst),
        lambda inst: Criterion.max_lateness(inst),
        lambda inst: Criterion.makespan(inst),
    )
    solves = 0
    for case in range(250):
        n, m = rng.randint(1, 10), rng.randint(1, 3)
        which = case % 5
        # sort dues up and weights down so every criterion is certified
        inst = _agreeable_instance(rng, n, m, due_order=1, weight_order=-1)
        crit = makers[which](inst)
        sol = pfs_lp.solve(inst, crit, enumerate_cap=0)
        solves += 1
        got = evaluate(inst, sol.extracted, crit)
        if abs(got - sol.value) > TOLERANCE:
            failures.append((case, got, sol.value))
        if evaluate(inst, sol.schedule, crit) != sol.value:
            failures.append((case, "final schedule", sol.value))
    _report(7, "value of the extracted schedule equals the LP optimum", failures, f"{solves} solves")


# -- 8 ---------------------------------------------------------------------

def test_criterion_8_cli_fixpoint(tmp_path):
    files = sorted(GOLDEN.glob("*.json"))
    failures = []
    for path in files:
        sched = tmp_path / f"{path.stem}.schedule.json"
        again = tmp_path / f"{path.stem}.normalized.json"
        if main(["solve", str(path), "--out", str(sched)]) != EXIT_OK:
            failures.append((path.name, "solve"))
            continue
        if main(["verify", str(path), str(sched), "--pfs", "--non-delay",
                 "--out", str(tmp_path / "verify.json")]) != EXIT_OK:
            failures.append((path.name, "verify"))
        if main(["transform", str(path), str(sched), "normalize", "--out", str(again)]) != EXIT_OK:
            failures.append((path.name, "transform"))
        elif again.read_bytes() != sched.read_bytes():
            failures.append((path.name, "not a fixpoint"))
    if len(files) < 10:
        failures.append(("golden set", len(files)))
    _report(8, "solve -> verify --pfs --non-delay -> transform normalize is byte-identical",
            failures, f"{len(files)} golden files")

"""Schedule transformations on an exact slice timeline.

* :func:`left_shift_normalize` pulls work into earlier idle slots until the
  schedule is non-delay.
* :func:`vertical_order` reassigns every slice so that running jobs sit on
  M1, M2, ... in increasing order.
* :func:`make_pfs` is the constructive conversion to a non-delay
  permutation-flow-shop-like schedule for schedules whose completion times
  follow the release order.
* :func:`exchange_pair` is the two-job exchange that puts a pair of
  agreeable jobs back into completion order.
"""

from __future__ import annotations

import bisect
from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import InfeasibleInput, OrderHypothesisViolated, PreconditionViolated
from .model import Instance, Piece, Schedule, render_rational
from .validate import check_feasible, is_non_delay, is_pfs_like

MAX_ITERATIONS = 100_000
MAX_ROUNDS = 1_000


class Timeline:
    """Slices between consecutive event times with a machine -> job table.

    ``slots[i][q]`` is the job on machine ``q + 1`` during
    ``[times[i], times[i + 1])`` or None when the machine is idle.
    """

    def __init__(self, times, slots, machines):
        self.times: List[Fraction] = list(times)
        self.slots: List[List[Optional[int]]] = [list(s) for s in slots]
        self.machines = machines

    @classmethod
    def from_schedule(cls, schedule: Schedule, machines: int, extra_times=()):
        points = set(extra_times)
        for p in schedule.pieces:
            points.add(p.start)
            points.add(p.end)
        times = sorted(points)
        slots = [[None] * machines for _ in range(max(len(times) - 1, 0))]
        for p in schedule.pieces:
            i = bisect.bisect_left(times, p.start)
            while i < len(times) - 1 and times[i] < p.end:
                slots[i][p.machine - 1] = p.job
                i += 1
        return cls(times, slots, machines)

    def __len__(self):
        return len(self.slots)

    def length(self, i) -> Fraction:
        return self.times[i + 1] - self.times[i]

    def running(self, i) -> set:
        return {j for j in self.slots[i] if j is not None}

    def index_of(self, t) -> int:
        """Index of the slice starting exactly at ``t``."""
        i = bisect.bisect_left(self.times, t)
        if i >= len(self.slots) or self.times[i] != t:
            raise KeyError(t)
        return i

    def split(self, i, t):
        """Split slice ``i`` at interior time ``t``; return index of the right part."""
        if not self.times[i] < t < self.times[i + 1]:
            raise ValueError(f"{t} is not interior to slice {i}")
        self.times.insert(i + 1, t)
        self.slots.insert(i + 1, list(self.slots[i]))
        return i + 1

    def machine_of(self, i, job) -> Optional[int]:
        for q, j in enumerate(self.slots[i]):
            if j == job:
                return q
        return None

    def next_run(self, job, after) -> Optional[int]:
        """First slice index > ``after`` in which ``job`` runs."""
        for i in range(after + 1, len(self.slots)):
            if job in self.slots[i]:
                return i
        return None

    def verticalize(self, i, key=None):
        jobs = sorted(self.running(i), key=key)
        self.slots[i] = jobs + [None] * (self.machines - len(jobs))

    def compact(self):
        times, slots = [self.times[0]] if self.times else [], []
        for i, row in enumerate(self.slots):
            if slots and slots[-1] == row:
                times[-1] = self.times[i + 1]
            else:
                slots.append(list(row))
                times.append(self.times[i + 1])
        self.times, self.slots = times, slots

    def to_schedule(self) -> Schedule:
        pieces = []
        for q in range(self.machines):
            current, start = None, None
            for i, row in enumerate(self.slots):
                job = row[q]
                if job != current:
                    if current is not None:
                        pieces.append(Piece(current, q + 1, start, self.times[i]))
                    current, start = job, self.times[i]
            if current is not None:
                pieces.append(Piece(current, q + 1, start, self.times[len(self.slots)]))
        return Schedule(tuple(pieces))

    def runs(self, q):
        """Maximal runs ``(start, end, job)`` on machine index ``q``."""
        out = []
        for i, row in enumerate(self.slots):
            job = row[q]
            if job is None:
                continue
            if out and out[-1][2] == job and out[-1][1] == self.times[i]:
                out[-1][1] = self.times[i + 1]
            else:
                out.append([self.times[i], self.times[i + 1], job])
        return [tuple(r) for r in out]


def _require_feasible(instance, schedule):
    report = check_feasible(instance, schedule)
    if not report.ok:
        raise InfeasibleInput("schedule is not feasible", report)


def _left_shift_pass(instance: Instance, tl: Timeline, priority) -> int:
    moves = 0
    i = 0
    while i < len(tl):
        a = tl.times[i]
        for q in range(tl.machines):
            if tl.slots[i][q] is not None:
                continue
            running = tl.running(i)
            eligible = sorted((job.id for job in instance.jobs
                               if job.release <= a and job.id not in running), key=priority)
            target = None
            for j in eligible:
                s = tl.next_run(j, i)
                if s is not None:
                    target = (j, s)
                    break
            if target is None:
                break
            j, s = target
            delta = min(tl.length(i), tl.length(s))
            if delta < tl.length(s):
                tl.split(s, tl.times[s] + delta)
            if delta < tl.length(i):
                tl.split(i, a + delta)
                s += 1
            tl.slots[s][tl.machine_of(s, j)] = None
            tl.slots[i][q] = j
            moves += 1
            if moves > MAX_ITERATIONS:
                raise RuntimeError("left shift did not converge")
        i += 1
    return moves


def left_shift_normalize(instance: Instance, schedule: Schedule,
                         order: Optional[Sequence[int]] = None) -> Schedule:
    """Return a non-delay schedule whose completion times are all <= the input's.

    Idle slots are filled by the earliest later fragment of an available job,
    preferring jobs early in ``order`` (default: by id).
    """
    _require_feasible(instance, schedule)
    priority = _rank(order)
    current = schedule
    for _ in range(64):
        if is_non_delay(instance, current).ok:
            return current
        tl = Timeline.from_schedule(current, instance.machines,
                                    [job.release for job in instance.jobs])
        _left_shift_pass(instance, tl, priority)
        tl.compact()
        current = tl.to_schedule()
    raise RuntimeError("left shift normalization did not reach a non-delay schedule")


def _rank(order):
    if order is None:
        return None
    pos = {job: i for i, job in enumerate(order)}
    return lambda job: pos.get(job, len(pos) + job)


def vertical_order(schedule: Schedule, machines: Optional[int] = None,
                   order: Optional[Sequence[int]] = None) -> Schedule:
    """Per slice, put running jobs on M1, M2, ... by increasing rank in ``order``."""
    key = _rank(order)
    if machines is None:
        machines = max((p.machine for p in schedule.pieces), default=1)
    tl = Timeline.from_schedule(schedule, machines)
    for i in range(len(tl)):
        if len(tl.running(i)) != sum(1 for j in tl.slots[i] if j is not None):
            raise InfeasibleInput("a job runs on two machines at once")
        tl.verticalize(i, key)
    tl.compact()
    return tl.to_schedule()


def _normalized(instance, schedule, order):
    shifted = left_shift_normalize(instance, schedule, order)
    return vertical_order(shifted, instance.machines, order)


def check_order_hypothesis(instance: Instance, schedule: Schedule, order):
    completions = schedule.completion_times()
    for a, b in zip(order, order[1:]):
        ra, rb = instance.job(a).release, instance.job(b).release
        if ra > rb:
            raise OrderHypothesisViolated(
                f"release of job {a} ({render_rational(ra)}) exceeds release of job {b} ({render_rational(rb)})")
        if completions[a] > completions[b]:
            raise OrderHypothesisViolated(
                f"C_{a} = {render_rational(completions[a])} > C_{b} = {render_rational(completions[b])}")


def _first_violation(tl: Timeline, job, pos):
    """Smallest t where a later job starts on some machine before a piece of ``job``."""
    best = None
    for q in range(tl.machines):
        runs = tl.runs(q)
        last_j = max((r[0] for r in runs if r[2] == job), default=None)
        if last_j is None:
            continue
        for start, _, k in runs:
            if start >= last_j:
                break
            if k != job and pos[k] > pos[job]:
                t_prime = min(r[0] for r in runs if r[2] == job and r[0] > start)
                if best is None or (start, q) < (best[0], best[2]):
                    best = (start, t_prime, q)
                break
    return best


def make_pfs(instance: Instance, schedule: Schedule, order: Optional[Sequence[int]] = None,
             trace: Optional[list] = None) -> Schedule:
    """Convert a schedule whose completion times follow the release order into
    a non-delay PFS-like schedule without increasing any completion time.

    ``order`` is the job numbering (default: by id); along it release dates
    and completion times must both be nondecreasing.  See :func:`to_pfs` for
    the returned schedule's numbering.
    """
    _require_feasible(instance, schedule)
    order = _permutation(instance, order)
    check_order_hypothesis(instance, schedule, order)
    return to_pfs(instance, schedule, order, trace)[0]


def _permutation(instance, order):
    order = list(order) if order is not None else instance.job_ids()
    if sorted(order) != instance.job_ids():
        raise ValueError("order must be a permutation of the job ids")
    return order


def _restore_order(instance: Instance, schedule: Schedule, order, strict=True):
    """Normalize, then re-number equal-release ties by completion time and
    exchange pairs whose completion order contradicts their release order.

    An inversion where the earlier-released job is also longer cannot be
    exchanged away.  With ``strict`` that raises; otherwise it is left in
    place (non-delay can force it: a short job released while a long one
    runs must start on an idle machine and may finish first).
    """
    current = _normalized(instance, schedule, order)
    for _ in range(MAX_ITERATIONS):
        idx = completion_order(instance, current, order)
        completions = current.completion_times()
        inversions = [(a, b) for x, a in enumerate(idx) for b in idx[x + 1:]
                      if completions[a] > completions[b]]
        fixable = [(a, b) for a, b in inversions
                   if instance.job(a).processing <= instance.job(b).processing]
        if inversions and not fixable and strict:
            a, b = inversions[0]
            raise OrderHypothesisViolated(
                f"job {a} is released before job {b}, completes after it in every non-delay "
                f"repair, and is longer; no exchange restores the order")
        if not fixable:
            if idx != order:
                current = vertical_order(current, instance.machines, idx)
            return current, idx
        a, b = fixable[0]
        current = _normalized(instance, exchange_pair(instance, current, a, b), idx)
        order = idx
    raise RuntimeError("completion order could not be restored")


def _pfs_pass(instance: Instance, current: Schedule, order, trace, round_no) -> Schedule:
    """One run of the inductive exchange procedure for jobs in ``order``."""
    pos = {job: i for i, job in enumerate(order)}
    key = pos.__getitem__
    releases = [job.release for job in instance.jobs]
    steps = 0
    for j in order:
        last_t = None
        while True:
            tl = Timeline.from_schedule(current, instance.machines, releases)
            found = _first_violation(tl, j, pos)
            if found is None:
                break
            t, t_prime, q = found
            if last_t is not None and t <= last_t:
                raise RuntimeError(f"no progress for job {j}: t={t} after {last_t}")
            i, i2 = tl.index_of(t), tl.index_of(t_prime)
            at_t = tl.running(i)
            if j in at_t or len(at_t) < instance.machines:
                raise RuntimeError(f"non-delay/vertical order assumption broken at t={t}")
            at_t2 = tl.running(i2)
            candidates = []
            for l in at_t - at_t2:
                if pos[l] > pos[j]:
                    nxt = tl.next_run(l, i2)
                    if nxt is not None:
                        candidates.append((pos[l], l, nxt))
            if not candidates:
                raise RuntimeError(f"no exchange partner for job {j} at t={t}")
            _, l, nxt = max(candidates)
            delta = min(tl.times[nxt] - t_prime, tl.length(i), tl.length(i2))
            if delta < tl.length(i2):
                tl.split(i2, t_prime + delta)
            if delta < tl.length(i):
                tl.split(i, t + delta)
                i2 += 1
            tl.slots[i][tl.machine_of(i, l)] = j
            tl.slots[i2][tl.machine_of(i2, j)] = l
            tl.verticalize(i, key)
            tl.verticalize(i2, key)
            tl.compact()
            current = tl.to_schedule()
            if not is_non_delay(instance, current).ok:
                raise RuntimeError(f"exchange at t={t} left an idle slot")
            if trace is not None:
                trace.append((round_no, pos[j], t, delta))
            last_t = t
            steps += 1
            if steps > MAX_ITERATIONS:
                raise RuntimeError("make_pfs did not converge")
    return current


def to_pfs(instance: Instance, schedule: Schedule, order: Optional[Sequence[int]] = None,
           trace: Optional[list] = None):
    """Non-delay PFS-like schedule with no larger completion time than the input.

    Returns ``(schedule, numbering)``; the schedule is PFS-like with respect
    to ``numbering``, which sorts jobs by release date and, as far as
    possible, by completion time.

    If the input's completion times follow the release order (``order``
    breaking ties), no completion time increases.  Otherwise pair exchanges
    may swap completion times and only the sorted completion vector is
    guaranteed not to increase, which suffices for the agreeable criteria;
    an inversion that cannot be exchanged raises OrderHypothesisViolated.

    Completion times along ``numbering`` are nondecreasing except where
    the non-delay property forbids it: a short job released while a longer,
    earlier job runs and a machine is idle must start at once and may
    finish first.  After each exchange pass the order is restored
    (renumbering ties, exchanging inversions) and the pass repeated.

    When ``trace`` is a list, one ``(round, position, t, delta)`` tuple is
    appended per exchange; ``(round, position, t)`` increases strictly from
    one exchange to the next.
    """
    _require_feasible(instance, schedule)
    order = _permutation(instance, order)
    original = schedule.completion_times()
    ranked = completion_order(instance, schedule, order)
    hypothesis = all(original[a] <= original[b] for a, b in zip(ranked, ranked[1:]))
    current, order = _restore_order(instance, schedule, order, strict=not hypothesis)
    for round_no in range(MAX_ROUNDS):
        current = _pfs_pass(instance, current, order, trace, round_no)
        final = current.completion_times()
        if all(final[a] <= final[b] for a, b in zip(order, order[1:])):
            break
        restored, renumbered = _restore_order(instance, current, order, strict=False)
        if restored == current and renumbered == order:
            break
        current, order = restored, renumbered
    else:
        raise RuntimeError("completion order did not stabilize")

    if not hypothesis:
        before, after = sorted(original.values()), sorted(final.values())
        if any(x > y for x, y in zip(after, before)):
            raise RuntimeError("sorted completion vector increased")
    else:
        for job in order:
            if final[job] > original[job]:
                raise RuntimeError(f"completion time of job {job} increased")
    report = is_pfs_like(current, order)
    if not report.ok:
        raise RuntimeError(f"result is not PFS-like: {report.violations[0].message}")
    return current, order


def exchange_pair(instance: Instance, schedule: Schedule, j: int, k: int) -> Schedule:
    """Swap the completion order of jobs ``j`` and ``k``.

    Requires ``r_j <= r_k``, ``p_j <= p_k`` and ``C_j > C_k``.  Other jobs
    keep their pieces; ``j`` keeps what it ran before ``r_k`` and the
    intervals where both ran stay as they were; the remaining slots of both
    jobs, from ``r_k`` on, take the rest of ``j`` first and then ``k``.
    """
    _require_feasible(instance, schedule)
    job_j, job_k = instance.job(j), instance.job(k)
    completions = schedule.completion_times()
    failed = []
    if j == k:
        failed.append("j != k")
    if job_j.release > job_k.release:
        failed.append(f"r_{j} <= r_{k}")
    if job_j.processing > job_k.processing:
        failed.append(f"p_{j} <= p_{k}")
    if completions[j] <= completions[k]:
        failed.append(f"C_{j} > C_{k}")
    if failed:
        raise PreconditionViolated("failed: " + ", ".join(failed))

    r_k = job_k.release
    tl = Timeline.from_schedule(schedule, instance.machines, [r_k])
    rem_j, rem_k = job_j.processing, job_k.processing
    slots = []
    for i in range(len(tl)):
        qj, qk = tl.machine_of(i, j), tl.machine_of(i, k)
        length = tl.length(i)
        if qj is not None and qk is not None:
            rem_j -= length
            rem_k -= length
        elif qj is not None and tl.times[i + 1] <= r_k:
            rem_j -= length
        elif qj is not None or qk is not None:
            q = qj if qj is not None else qk
            tl.slots[i][q] = None
            slots.append((tl.times[i], tl.times[i + 1], q + 1))

    pieces = list(tl.to_schedule().pieces)
    for start, end, machine in slots:
        if rem_j > 0:
            cut = min(end, start + rem_j)
            pieces.append(Piece(j, machine, start, cut))
            rem_j -= cut - start
            start = cut
        if start < end:
            pieces.append(Piece(k, machine, start, end))
            rem_k -= end - start
    if rem_j != 0 or rem_k != 0:
        raise RuntimeError("exchange did not conserve processing times")
    merged = Timeline.from_schedule(Schedule(tuple(pieces)), instance.machines)
    merged.compact()
    result = merged.to_schedule()

    after = result.completion_times()
    if not (after[j] <= completions[k] and after[k] == completions[j]):
        raise RuntimeError("exchange completion guarantees failed")
    return result


def completion_order(instance: Instance, schedule: Schedule, order: Optional[Sequence[int]] = None):
    """Jobs sorted by (release, completion, position in ``order``)."""
    order = list(order) if order is not None else instance.job_ids()
    pos = {job: i for i, job in enumerate(order)}
    completions = schedule.completion_times()
    return sorted(order, key=lambda j: (instance.job(j).release, completions[j], pos[j]))

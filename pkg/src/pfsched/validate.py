"""Structural predicates over schedules: feasibility, non-delay, vertical
order and the permutation-flow-shop-like shape.

Everything is evaluated on the slices between consecutive event points
(piece endpoints and release dates).  The set of running jobs is constant
on each slice, so these finite checks are exact.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from graphlib import CycleError, TopologicalSorter
from typing import List, Optional, Sequence, Tuple

from .errors import InfeasibleInput
from .model import Instance, Piece, Schedule, render_rational


@dataclass(frozen=True)
class Violation:
    kind: str
    jobs: Tuple[int, ...]
    interval: Optional[Tuple[Fraction, Fraction]]
    message: str

    def as_dict(self):
        return {
            "kind": self.kind,
            "jobs": list(self.jobs),
            "interval": None if self.interval is None else [render_rational(x) for x in self.interval],
            "message": self.message,
        }


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def add(self, kind, jobs, interval, message):
        self.violations.append(Violation(kind, tuple(jobs), interval, message))

    def kinds(self):
        return {v.kind for v in self.violations}

    def as_dict(self):
        return {"ok": self.ok, "violations": [v.as_dict() for v in self.violations]}


def _fmt(t):
    return render_rational(t)


def _overlaps(report: ValidationReport, schedule: Schedule):
    by_machine = defaultdict(list)
    by_job = defaultdict(list)
    for p in schedule.pieces:
        by_machine[p.machine].append(p)
        by_job[p.job].append(p)
    for machine, pieces in sorted(by_machine.items()):
        pieces.sort()
        for a, b in zip(pieces, pieces[1:]):
            if b.start < a.end:
                report.add("machine-overlap", sorted({a.job, b.job}), (b.start, min(a.end, b.end)),
                           f"M{machine} runs jobs {a.job} and {b.job} at the same time")
    for job, pieces in sorted(by_job.items()):
        pieces.sort()
        for a, b in zip(pieces, pieces[1:]):
            if b.start < a.end:
                report.add("job-parallel", [job], (b.start, min(a.end, b.end)),
                           f"job {job} runs on M{a.machine} and M{b.machine} simultaneously")


def check_feasible(instance: Instance, schedule: Schedule) -> ValidationReport:
    report = ValidationReport()
    n, m = instance.n, instance.machines
    for p in schedule.pieces:
        if not 1 <= p.job <= n:
            report.add("unknown-job", [p.job], (p.start, p.end), f"job {p.job} is not in the instance")
        if not 1 <= p.machine <= m:
            report.add("bad-machine", [p.job], (p.start, p.end), f"machine {p.machine} outside 1..{m}")
    _overlaps(report, schedule)
    for p in schedule.pieces:
        if 1 <= p.job <= n and p.start < instance.job(p.job).release:
            r = instance.job(p.job).release
            report.add("release", [p.job], (p.start, min(p.end, r)),
                       f"job {p.job} starts at {_fmt(p.start)} before its release {_fmt(r)}")
    for job in instance.jobs:
        done = schedule.processed(job.id)
        if done != job.processing:
            report.add("processing", [job.id], None,
                       f"job {job.id} processed {_fmt(done)} of {_fmt(job.processing)}")
    return report


def _require_feasible(instance: Instance, schedule: Schedule):
    report = check_feasible(instance, schedule)
    if not report.ok:
        raise InfeasibleInput("schedule is not feasible", report)


def _require_no_overlap(schedule: Schedule):
    report = ValidationReport()
    _overlaps(report, schedule)
    if not report.ok:
        raise InfeasibleInput("schedule has overlapping pieces", report)


def event_points(schedule: Schedule, instance: Optional[Instance] = None):
    points = set()
    for p in schedule.pieces:
        points.add(p.start)
        points.add(p.end)
    if instance is not None:
        points.update(job.release for job in instance.jobs)
    return sorted(points)


def slices(schedule: Schedule, instance: Optional[Instance] = None):
    """Yield ``(a, b, {machine: job})`` for consecutive event points."""
    points = event_points(schedule, instance)
    pieces = sorted(schedule.pieces)
    active: List[Piece] = []
    idx = 0
    for a, b in zip(points, points[1:]):
        active = [p for p in active if p.end > a]
        while idx < len(pieces) and pieces[idx].start <= a:
            if pieces[idx].end > a:
                active.append(pieces[idx])
            idx += 1
        yield a, b, {p.machine: p.job for p in active}


def is_non_delay(instance: Instance, schedule: Schedule) -> ValidationReport:
    _require_feasible(instance, schedule)
    report = ValidationReport()
    last_end = schedule.completion_times()
    for a, b, assignment in slices(schedule, instance):
        if len(assignment) >= instance.machines:
            continue
        running = set(assignment.values())
        idle = [q for q in range(1, instance.machines + 1) if q not in assignment]
        for job in instance.jobs:
            if job.id in running or job.release > a:
                continue
            if last_end.get(job.id, a) > a:
                report.add("delay", [job.id], (a, b),
                           f"M{idle[0]} is idle on [{_fmt(a)}, {_fmt(b)}) while job {job.id} "
                           f"is available and still processed later")
    return report


def _rank_key(order):
    if order is None:
        return lambda job: job
    pos = {job: i for i, job in enumerate(order)}
    return lambda job: pos.get(job, len(pos) + job)


def is_vertically_ordered(schedule: Schedule, order: Optional[Sequence[int]] = None) -> ValidationReport:
    """Running jobs must occupy M1, M2, ... in increasing job order.

    ``order`` overrides the job numbering (default: by id).
    """
    _require_no_overlap(schedule)
    report = ValidationReport()
    key = _rank_key(order)
    for a, b, assignment in slices(schedule):
        by_job = sorted(((job, machine) for machine, job in assignment.items()), key=lambda x: key(x[0]))
        for rank, (job, machine) in enumerate(by_job, start=1):
            if machine != rank:
                report.add("vertical-order", [j for j, _ in by_job], (a, b),
                           f"job {job} runs on M{machine} but its rank among running jobs is {rank}")
                break
    return report


def merged_pieces(schedule: Schedule):
    """Pieces with abutting same-job, same-machine fragments fused."""
    out = []
    for p in sorted(schedule.pieces, key=lambda p: (p.machine, p.start)):
        if out and out[-1].machine == p.machine and out[-1].job == p.job and out[-1].end == p.start:
            out[-1] = Piece(p.job, p.machine, out[-1].start, p.end)
        else:
            out.append(p)
    return out


def machine_sequences(schedule: Schedule):
    seqs = defaultdict(list)
    for p in merged_pieces(schedule):
        seqs[p.machine].append(p.job)
    return dict(seqs)


def is_pfs_like(schedule: Schedule, order: Optional[Sequence[int]] = None) -> ValidationReport:
    report = is_vertically_ordered(schedule, order)
    pieces = merged_pieces(schedule)
    counts = defaultdict(list)
    for p in pieces:
        counts[(p.job, p.machine)].append(p)
    for (job, machine), ps in sorted(counts.items()):
        if len(ps) > 1:
            report.add("multiple-pieces", [job], (ps[0].start, ps[-1].end),
                       f"M{machine} processes {len(ps)} pieces of job {job}")
    graph = defaultdict(set)
    for machine, seq in sorted(machine_sequences(schedule).items()):
        for a, b in zip(seq, seq[1:]):
            if a != b:
                graph[b].add(a)
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError as exc:
        cycle = exc.args[1]
        report.add("machine-order", sorted(set(cycle)), None,
                   f"machines disagree on the relative order of jobs {sorted(set(cycle))}")
    return report


def common_order(schedule: Schedule):
    """A total job order compatible with every machine sequence, or None."""
    graph = defaultdict(set)
    for seq in machine_sequences(schedule).values():
        for a, b in zip(seq, seq[1:]):
            if a != b:
                graph[b].add(a)
    for job in schedule.job_ids():
        graph.setdefault(job, set())
    try:
        ts = TopologicalSorter(graph)
        return list(ts.static_order())
    except CycleError:
        return None

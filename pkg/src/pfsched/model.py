"""Core domain types: jobs, instances, criteria and preemptive schedules.

All numeric data is held as :class:`fractions.Fraction` so that interval
surgery, LP optima and oracle comparisons are exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .errors import IncompleteSchedule, UnknownJob

Rational = Fraction


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to a Fraction.

    Floats are rejected: they would silently break exactness.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational string")
        if "." in text or "e" in text.lower():
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def render_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class Job:
    id: int
    release: Fraction
    processing: Fraction
    due: Optional[Fraction] = None
    weight: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "release", as_rational(self.release))
        object.__setattr__(self, "processing", as_rational(self.processing))
        if self.due is not None:
            object.__setattr__(self, "due", as_rational(self.due))
        if self.weight is not None:
            object.__setattr__(self, "weight", as_rational(self.weight))
        if self.processing <= 0:
            raise ValueError(f"job {self.id}: processing time must be positive")
        if self.release < 0:
            raise ValueError(f"job {self.id}: release date must be nonnegative")
        if self.weight is not None and self.weight < 0:
            raise ValueError(f"job {self.id}: weight must be nonnegative")


@dataclass(frozen=True)
class Instance:
    machines: int
    jobs: tuple

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(self.jobs))
        if self.machines < 1:
            raise ValueError("at least one machine is required")
        if not self.jobs:
            raise ValueError("at least one job is required")
        for expected, job in enumerate(self.jobs, start=1):
            if job.id != expected:
                raise ValueError(f"job ids must be 1..n in order; got {job.id} at position {expected}")

    @classmethod
    def build(cls, machines, processing, release=None, due=None, weight=None):
        """Convenience constructor from parallel lists."""
        n = len(processing)
        release = release if release is not None else [0] * n
        jobs = []
        for i in range(n):
            jobs.append(Job(
                id=i + 1,
                release=release[i],
                processing=processing[i],
                due=None if due is None else due[i],
                weight=None if weight is None else weight[i],
            ))
        return cls(machines, tuple(jobs))

    @property
    def n(self) -> int:
        return len(self.jobs)

    def job(self, job_id: int) -> Job:
        if not 1 <= job_id <= len(self.jobs):
            raise UnknownJob(job_id)
        return self.jobs[job_id - 1]

    def job_ids(self):
        return [job.id for job in self.jobs]

    def releases_equal(self) -> bool:
        return len({job.release for job in self.jobs}) == 1


@dataclass(frozen=True)
class PiecewiseLinearFn:
    """Continuous, convex, nondecreasing piecewise-linear function on [0, inf).

    ``slopes[0]`` applies on ``[0, breakpoints[0])``, ``slopes[i]`` on
    ``[breakpoints[i-1], breakpoints[i])`` and the last slope on the tail.
    """

    breakpoints: tuple
    initial_value: Fraction
    slopes: tuple

    def __post_init__(self):
        bps = tuple(as_rational(b) for b in self.breakpoints)
        slopes = tuple(as_rational(s) for s in self.slopes)
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "initial_value", as_rational(self.initial_value))
        if len(slopes) != len(bps) + 1:
            raise ValueError("need exactly one slope per segment (len(breakpoints) + 1)")
        if any(b <= 0 for b in bps):
            raise ValueError("breakpoints must be positive")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(s < 0 for s in slopes):
            raise ValueError("slopes must be nonnegative (regular criterion)")
        if any(a > b for a, b in zip(slopes, slopes[1:])):
            raise ValueError("slopes must be nondecreasing (convex function)")

    @classmethod
    def linear(cls, slope=1, offset=0):
        """``t -> offset + slope * t``."""
        return cls((), offset, (slope,))

    @classmethod
    def tardiness(cls, due, weight=1):
        """``t -> weight * max(0, t - due)``."""
        due, weight = as_rational(due), as_rational(weight)
        if due <= 0:
            return cls((), -weight * due, (weight,))
        return cls((due,), 0, (0, weight))

    def __call__(self, t) -> Fraction:
        t = as_rational(t)
        value = self.initial_value
        left = Fraction(0)
        for bp, slope in zip(self.breakpoints, self.slopes):
            if t <= bp:
                return value + slope * (t - left)
            value += slope * (bp - left)
            left = bp
        return value + self.slopes[-1] * (t - left)

    def slope_after(self, t) -> Fraction:
        """Right derivative at ``t``."""
        for bp, slope in zip(self.breakpoints, self.slopes):
            if t < bp:
                return slope
        return self.slopes[-1]

    def segments(self):
        """Affine pieces as ``(slope, intercept)``; f is their pointwise max."""
        out = []
        starts = (Fraction(0),) + self.breakpoints
        for start, slope in zip(starts, self.slopes):
            out.append((slope, self(start) - slope * start))
        return out


class CriterionKind(enum.Enum):
    SUM = "sum"
    MAX = "max"
    WEIGHTED_LATE_COMMON_DUE = "wulj"


@dataclass(frozen=True)
class Criterion:
    kind: CriterionKind
    per_job: tuple = ()
    common_due: Optional[Fraction] = None
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "per_job", tuple(self.per_job))
        if self.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
            if self.common_due is None:
                raise ValueError("weighted late jobs criterion needs a common due date")
            object.__setattr__(self, "common_due", as_rational(self.common_due))
        elif not self.per_job:
            raise ValueError("SUM/MAX criteria need one function per job")

    def check_instance(self, instance: Instance):
        if self.kind is CriterionKind.WEIGHTED_LATE_COMMON_DUE:
            missing = [job.id for job in instance.jobs if job.weight is None]
            if missing:
                raise ValueError(f"jobs {missing} carry no weight")
        elif len(self.per_job) != instance.n:
            raise ValueError(f"criterion has {len(self.per_job)} functions for {instance.n} jobs")

    def fn(self, job_id: int) -> PiecewiseLinearFn:
        return self.per_job[job_id - 1]

    # Named shortcuts.  They read d_j / w_j from the instance.

    @classmethod
    def sum_completion(cls, instance: Instance, weighted=False):
        fns = [PiecewiseLinearFn.linear(_weight(j) if weighted else 1) for j in instance.jobs]
        return cls(CriterionKind.SUM, fns, name="sum_wjcj" if weighted else "sum_cj")

    @classmethod
    def sum_tardiness(cls, instance: Instance, weighted=True):
        fns = [PiecewiseLinearFn.tardiness(_due(j), _weight(j) if weighted else 1)
               for j in instance.jobs]
        return cls(CriterionKind.SUM, fns, name="sum_wj_tj" if weighted else "sum_tj")

    @classmethod
    def max_lateness(cls, instance: Instance):
        fns = [PiecewiseLinearFn.linear(1, -_due(j)) for j in instance.jobs]
        return cls(CriterionKind.MAX, fns, name="lmax")

    @classmethod
    def makespan(cls, instance: Instance):
        fns = [PiecewiseLinearFn.linear(1) for _ in instance.jobs]
        return cls(CriterionKind.MAX, fns, name="cmax")

    @classmethod
    def weighted_late(cls, instance: Instance, common_due):
        crit = cls(CriterionKind.WEIGHTED_LATE_COMMON_DUE, common_due=common_due, name="wulj")
        crit.check_instance(instance)
        return crit


def _due(job: Job) -> Fraction:
    if job.due is None:
        raise ValueError(f"job {job.id} has no due date")
    return job.due


def _weight(job: Job) -> Fraction:
    return Fraction(1) if job.weight is None else job.weight


@dataclass(frozen=True, order=True)
class Piece:
    start: Fraction
    machine: int
    job: int
    end: Fraction

    def __init__(self, job, machine, start, end):
        object.__setattr__(self, "job", int(job))
        object.__setattr__(self, "machine", int(machine))
        object.__setattr__(self, "start", as_rational(start))
        object.__setattr__(self, "end", as_rational(end))
        if self.start >= self.end:
            raise ValueError(f"piece of job {self.job} has start {self.start} >= end {self.end}")

    @property
    def length(self) -> Fraction:
        return self.end - self.start

    def __repr__(self):
        return (f"Piece(job={self.job}, machine={self.machine}, "
                f"start={render_rational(self.start)}, end={render_rational(self.end)})")


@dataclass(frozen=True)
class Schedule:
    """An immutable set of pieces, kept sorted by (start, machine, job)."""

    pieces: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(sorted(self.pieces)))

    @classmethod
    def of(cls, items: Iterable) -> "Schedule":
        """Build from Pieces or ``(job, machine, start, end)`` tuples.

        Zero-length pieces are dropped.
        """
        pieces = []
        for item in items:
            if isinstance(item, Piece):
                pieces.append(item)
                continue
            job, machine, start, end = item
            start, end = as_rational(start), as_rational(end)
            if start == end:
                continue
            pieces.append(Piece(job, machine, start, end))
        return cls(tuple(pieces))

    def pieces_of(self, job: int):
        return [p for p in self.pieces if p.job == job]

    def job_ids(self):
        return sorted({p.job for p in self.pieces})

    def processed(self, job: int) -> Fraction:
        return sum((p.length for p in self.pieces if p.job == job), Fraction(0))

    def completion_times(self) -> dict:
        out = {}
        for p in self.pieces:
            if p.job not in out or p.end > out[p.job]:
                out[p.job] = p.end
        return out


def completion_time(schedule: Schedule, job: int) -> Fraction:
    ends = [p.end for p in schedule.pieces if p.job == job]
    if not ends:
        raise UnknownJob(job)
    return max(ends)


def jobs_processed_at(schedule: Schedule, t) -> set:
    t = as_rational(t)
    return {p.job for p in schedule.pieces if p.start <= t < p.end}


def piece_at(schedule: Schedule, job: int, t) -> Optional[Piece]:
    """The piece of ``job`` running at ``t`` (gives both C(j,t) and M(j,t))."""
    t = as_rational(t)
    for p in schedule.pieces:
        if p.job == job and p.start <= t < p.end:
            return p
    return None


def evaluate(instance: Instance, schedule: Schedule, criterion: Criterion) -> Fraction:
    criterion.check_instance(instance)
    for job in instance.jobs:
        done = schedule.processed(job.id)
        if done != job.processing:
            raise IncompleteSchedule(
                f"job {job.id} has {render_rational(done)} of {render_rational(job.processing)} processed")
    return evaluate_completions(instance, schedule.completion_times(), criterion)


def evaluate_completions(instance: Instance, completions: dict, criterion: Criterion) -> Fraction:
    """Criterion value for an explicit completion-time vector."""
    if criterion.kind is CriterionKind.SUM:
        return sum((criterion.fn(j)(c) for j, c in completions.items()), Fraction(0))
    if criterion.kind is CriterionKind.MAX:
        return max(criterion.fn(j)(c) for j, c in completions.items())
    d = criterion.common_due
    return sum((instance.job(j).weight for j, c in completions.items() if c > d), Fraction(0))


def order_positions(order: Sequence[int]) -> dict:
    return {job: pos for pos, job in enumerate(order)}

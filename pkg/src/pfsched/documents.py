"""JSON documents for instances and schedules.

Numbers are written as JSON integers when integral and as ``"a/b"``
strings otherwise, so parsing and re-serializing is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import (
    Criterion,
    CriterionKind,
    Instance,
    Job,
    Piece,
    PiecewiseLinearFn,
    Schedule,
    as_rational,
)


class DocumentError(ValueError):
    """A document is not valid JSON or does not follow the expected layout."""


SHORTCUTS = {
    "sum_cj": lambda inst: Criterion.sum_completion(inst),
    "sum_wj_cj": lambda inst: Criterion.sum_completion(inst, weighted=True),
    "sum_tj": lambda inst: Criterion.sum_tardiness(inst, weighted=False),
    "sum_wj_tj": lambda inst: Criterion.sum_tardiness(inst),
    "lmax": Criterion.max_lateness,
    "cmax": Criterion.makespan,
}


def number_to_json(value):
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def number_from_json(raw, where="value") -> Fraction:
    if isinstance(raw, float):
        raise DocumentError(f"{where}: floats are not accepted, write {raw!r} as an \"a/b\" string")
    try:
        return as_rational(raw)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"{where}: {exc}") from None


def _field(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentError(f"{where}: missing field {key!r}")
    return obj[key]


def _int(raw, where):
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise DocumentError(f"{where}: expected an integer, got {raw!r}")
    return raw


@dataclass(frozen=True)
class CriterionSpec:
    """Criterion as written in a document; expanded against an instance later."""

    kind: str
    functions: object = None   # shortcut name or list of function dicts
    common_due: Optional[Fraction] = None

    def resolve(self, instance: Instance) -> Criterion:
        if self.kind == CriterionKind.WEIGHTED_LATE_COMMON_DUE.value:
            if self.common_due is None:
                raise DocumentError("criterion: wulj needs common_due")
            try:
                return Criterion.weighted_late(instance, self.common_due)
            except ValueError as exc:
                raise DocumentError(f"criterion: {exc}") from None
        if isinstance(self.functions, str):
            crit = shortcut_criterion(self.functions, instance)
            if crit.kind.value != self.kind:
                raise DocumentError(f"criterion: {self.functions} is a {crit.kind.value} criterion, "
                                    f"not {self.kind}")
            return crit
        fns = tuple(self.functions or ())
        try:
            crit = Criterion(CriterionKind(self.kind), fns, name="custom")
            crit.check_instance(instance)
        except ValueError as exc:
            raise DocumentError(f"criterion: {exc}") from None
        return crit

    def to_json(self):
        out = {"kind": self.kind}
        if isinstance(self.functions, str):
            out["functions"] = self.functions
        elif self.functions is not None:
            out["functions"] = [function_to_json(f) for f in self.functions]
        if self.common_due is not None:
            out["common_due"] = number_to_json(self.common_due)
        return out


def shortcut_criterion(name: str, instance: Instance) -> Criterion:
    if name not in SHORTCUTS:
        raise DocumentError(f"unknown criterion {name!r}; choose from {', '.join(sorted(SHORTCUTS))} or wulj")
    try:
        return SHORTCUTS[name](instance)
    except ValueError as exc:
        raise DocumentError(f"criterion {name}: {exc}") from None


def function_to_json(fn: PiecewiseLinearFn):
    return {
        "breakpoints": [number_to_json(b) for b in fn.breakpoints],
        "initial_value": number_to_json(fn.initial_value),
        "slopes": [number_to_json(s) for s in fn.slopes],
    }


def function_from_json(raw, where) -> PiecewiseLinearFn:
    bps = [number_from_json(b, where) for b in _field(raw, "breakpoints", where)]
    slopes = [number_from_json(s, where) for s in _field(raw, "slopes", where)]
    initial = number_from_json(raw.get("initial_value", 0), where)
    try:
        return PiecewiseLinearFn(tuple(bps), initial, tuple(slopes))
    except ValueError as exc:
        raise DocumentError(f"{where}: {exc}") from None


def criterion_from_json(raw) -> CriterionSpec:
    kind = _field(raw, "kind", "criterion")
    if kind not in {k.value for k in CriterionKind}:
        raise DocumentError(f"criterion: unknown kind {kind!r}")
    functions = raw.get("functions")
    if isinstance(functions, list):
        functions = tuple(function_from_json(f, f"criterion.functions[{i}]")
                          for i, f in enumerate(functions))
    elif functions is not None and not isinstance(functions, str):
        raise DocumentError("criterion.functions must be a shortcut name or a list")
    common_due = raw.get("common_due")
    if common_due is not None:
        common_due = number_from_json(common_due, "criterion.common_due")
    return CriterionSpec(kind, functions, common_due)


@dataclass(frozen=True)
class InstanceDocument:
    instance: Instance
    criterion: Optional[CriterionSpec] = None

    def to_json(self):
        jobs = []
        for job in self.instance.jobs:
            entry = {"id": job.id, "release": number_to_json(job.release),
                     "processing": number_to_json(job.processing)}
            if job.due is not None:
                entry["due"] = number_to_json(job.due)
            if job.weight is not None:
                entry["weight"] = number_to_json(job.weight)
            jobs.append(entry)
        out = {"machines": self.instance.machines, "jobs": jobs}
        if self.criterion is not None:
            out["criterion"] = self.criterion.to_json()
        return out

    @classmethod
    def from_json(cls, raw) -> "InstanceDocument":
        machines = _int(_field(raw, "machines", "instance"), "machines")
        jobs = []
        for i, entry in enumerate(_field(raw, "jobs", "instance")):
            where = f"jobs[{i}]"
            due = entry.get("due")
            weight = entry.get("weight")
            try:
                jobs.append(Job(
                    _int(_field(entry, "id", where), f"{where}.id"),
                    number_from_json(_field(entry, "release", where), f"{where}.release"),
                    number_from_json(_field(entry, "processing", where), f"{where}.processing"),
                    None if due is None else number_from_json(due, f"{where}.due"),
                    None if weight is None else number_from_json(weight, f"{where}.weight"),
                ))
            except ValueError as exc:
                if isinstance(exc, DocumentError):
                    raise
                raise DocumentError(f"{where}: {exc}") from None
        try:
            instance = Instance(machines, tuple(jobs))
        except ValueError as exc:
            raise DocumentError(f"instance: {exc}") from None
        crit = raw.get("criterion")
        return cls(instance, None if crit is None else criterion_from_json(crit))


@dataclass(frozen=True)
class ScheduleDocument:
    schedule: Schedule
    value: Optional[Fraction] = None
    order: Optional[tuple] = None
    certificate: Optional[str] = None

    def to_json(self):
        return {
            "pieces": [{"job": p.job, "machine": p.machine,
                        "start": number_to_json(p.start), "end": number_to_json(p.end)}
                       for p in self.schedule.pieces],
            "value": None if self.value is None else number_to_json(self.value),
            "order": None if self.order is None else list(self.order),
            "certificate": self.certificate,
        }

    @classmethod
    def from_json(cls, raw) -> "ScheduleDocument":
        pieces = []
        for i, entry in enumerate(_field(raw, "pieces", "schedule")):
            where = f"pieces[{i}]"
            try:
                pieces.append(Piece(
                    _int(_field(entry, "job", where), f"{where}.job"),
                    _int(_field(entry, "machine", where), f"{where}.machine"),
                    number_from_json(_field(entry, "start", where), f"{where}.start"),
                    number_from_json(_field(entry, "end", where), f"{where}.end"),
                ))
            except ValueError as exc:
                if isinstance(exc, DocumentError):
                    raise
                raise DocumentError(f"{where}: {exc}") from None
        value = raw.get("value")
        order = raw.get("order")
        if order is not None:
            order = tuple(_int(j, "order") for j in order)
        return cls(Schedule(tuple(pieces)),
                   None if value is None else number_from_json(value, "value"),
                   order, raw.get("certificate"))


def dumps(obj) -> str:
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj.to_json(), indent=2, sort_keys=True) + "\n"


def loads_instance(text: str) -> InstanceDocument:
    return InstanceDocument.from_json(_parse(text))


def loads_schedule(text: str) -> ScheduleDocument:
    return ScheduleDocument.from_json(_parse(text))


def _parse(text):
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise DocumentError("top-level JSON value must be an object")
    return raw

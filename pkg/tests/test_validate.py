import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfsched.errors import InfeasibleInput
from pfsched.model import Instance, Piece, Schedule
from pfsched.oracle import random_feasible_schedule
from pfsched.transform import completion_order, to_pfs
from pfsched.validate import (
    check_feasible,
    common_order,
    event_points,
    is_non_delay,
    is_pfs_like,
    is_vertically_ordered,
)

from conftest import instances


def test_feasible_two_jobs():
    inst = Instance.build(2, [1, 2])
    assert check_feasible(inst, Schedule.of([(1, 1, 0, 1), (2, 2, 0, 2)])).ok


def test_machine_overlap():
    inst = Instance.build(1, [2, 2])
    report = check_feasible(inst, Schedule.of([(1, 1, 0, 2), (2, 1, 1, 3)]))
    assert "machine-overlap" in report.kinds()


def test_release_violation():
    inst = Instance.build(1, [1], release=[3])
    report = check_feasible(inst, Schedule.of([(1, 1, 2, 3)]))
    assert "release" in report.kinds()


def test_every_violation_is_reported():
    inst = Instance.build(2, [2, 2], release=[0, 1])
    s = Schedule.of([(1, 1, 0, 1), (1, 2, 0, 1), (2, 1, 0, 1), (3, 3, 0, 1)])
    assert check_feasible(inst, s).kinds() == {
        "machine-overlap", "job-parallel", "release", "processing", "unknown-job", "bad-machine"}


def _movable_fragment_exists(inst, s):
    """Exhaustive search: can some later fragment of an available job be moved
    into an idle slot starting at an event point without losing feasibility?"""
    points = event_points(s, inst)
    for a, b in zip(points, points[1:]):
        busy = {p.machine for p in s.pieces if p.start <= a < p.end}
        for q in range(1, inst.machines + 1):
            if q in busy:
                continue
            for p in s.pieces:
                if p.end <= a or inst.job(p.job).release > a:
                    continue
                start = max(p.start, a)
                length = min(b - a, p.end - start)
                others = [x for x in s.pieces if x != p]
                rest = [(p.job, p.machine, p.start, start), (p.job, p.machine, start + length, p.end)]
                if start == a and p.machine != q:
                    # the fragment already sits at [a, a+length); moving it sideways is no left shift
                    continue
                moved = Schedule.of(others + [Piece(*x) for x in rest if x[2] < x[3]]
                                    + [Piece(p.job, q, a, a + length)])
                if start > a and check_feasible(inst, moved).ok:
                    return True
    return False


def test_idle_gap_with_later_fragment_is_a_delay():
    inst = Instance.build(2, [2, 2])
    s = Schedule.of([(1, 1, 0, 1), (1, 1, 2, 3), (2, 2, 0, 2)])
    report = is_non_delay(inst, s)
    assert not report.ok and report.kinds() == {"delay"}
    assert _movable_fragment_exists(inst, s)


def test_no_idle_time_is_non_delay():
    inst = Instance.build(2, [2, 2])
    assert is_non_delay(inst, Schedule.of([(1, 1, 0, 2), (2, 2, 0, 2)])).ok


def test_single_job_at_release():
    inst = Instance.build(1, [3], release=[2])
    assert is_non_delay(inst, Schedule.of([(1, 1, 2, 5)])).ok


def test_non_delay_needs_feasible_input():
    inst = Instance.build(1, [3])
    with pytest.raises(InfeasibleInput):
        is_non_delay(inst, Schedule.of([(1, 1, 0, 1)]))


@given(instances(max_n=4, max_m=3), st.integers(0, 10 ** 6))
def test_non_delay_matches_fragment_search(inst, seed):
    s = random_feasible_schedule(inst, seed)
    assert is_non_delay(inst, s).ok == (not _movable_fragment_exists(inst, s))


def test_vertical_examples():
    assert is_vertically_ordered(Schedule.of([(2, 1, 0, 1), (5, 2, 0, 1)])).ok
    report = is_vertically_ordered(Schedule.of([(5, 1, 0, 1), (2, 2, 0, 1)]))
    assert not report.ok and report.violations[0].interval == (0, 1)
    assert is_vertically_ordered(Schedule()).ok


def test_vertical_respects_custom_numbering():
    s = Schedule.of([(5, 1, 0, 1), (2, 2, 0, 1)])
    assert is_vertically_ordered(s, order=[5, 2]).ok


def test_two_pieces_on_one_machine():
    s = Schedule.of([(3, 1, 0, 1), (3, 1, 2, 3)])
    assert "multiple-pieces" in is_pfs_like(s).kinds()


def test_adjacent_fragments_count_as_one_piece():
    assert is_pfs_like(Schedule.of([(3, 1, 0, 1), (3, 1, 1, 3)])).ok


def test_conflicting_machine_orders():
    s = Schedule.of([(1, 1, 0, 1), (2, 1, 1, 2), (3, 1, 2, 3),
                     (1, 2, 1, 2), (3, 2, 3, 4), (2, 2, 4, 5)])
    assert "machine-order" in is_pfs_like(s).kinds()
    assert common_order(s) is None


def test_machines_may_skip_jobs():
    s = Schedule.of([(1, 1, 0, 2), (2, 1, 2, 3), (3, 1, 3, 4), (2, 2, 0, 1), (3, 2, 1, 2)])
    assert is_pfs_like(s).ok
    assert common_order(s) == [1, 2, 3]


@given(instances(max_n=5, agreeable=True), st.integers(0, 10 ** 6))
def test_pfs_outputs_are_vertical(inst, seed):
    s = random_feasible_schedule(inst, seed)
    out, numbering = to_pfs(inst, s, completion_order(inst, s))
    assert is_pfs_like(out, numbering).ok
    assert is_vertically_ordered(out, numbering).ok


@given(instances(max_n=5), st.integers(0, 10 ** 6))
def test_feasibility_ignores_piece_list_order(inst, seed):
    s = random_feasible_schedule(inst, seed)
    broken = Schedule(s.pieces + (Piece(1, 1, 0, 1),))
    for sched in (s, broken):
        pieces = list(sched.pieces)
        random.Random(seed).shuffle(pieces)
        assert check_feasible(inst, Schedule(tuple(pieces))).as_dict() == check_feasible(inst, sched).as_dict()

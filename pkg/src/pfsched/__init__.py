"""Exact preemptive parallel-machine scheduling through PFS-like schedules.

Regular sum and max criteria with release dates are solved by a fixed-order
linear program over the rationals once a job order is certified; the
weighted number of late jobs with a common due date is solved by a prefix
scan.  All arithmetic is exact (:class:`fractions.Fraction`).
"""

from .errors import (
    IncompleteSchedule,
    InfeasibleInput,
    InfeasibleLPSolution,
    MalformedLP,
    NotAgreeable,
    OrderHypothesisViolated,
    PreconditionViolated,
    ReleasesPresent,
    SchedulingError,
    TooLarge,
    UnknownJob,
    UnsupportedCriterion,
)
from .model import (
    Criterion,
    CriterionKind,
    Instance,
    Job,
    Piece,
    PiecewiseLinearFn,
    Schedule,
    as_rational,
    evaluate,
    render_rational,
)
from .pfs_lp import OrderCase, build_lp, determine_order, solve, solve_common_due_late_jobs
from .transform import exchange_pair, left_shift_normalize, make_pfs, to_pfs, vertical_order
from .validate import check_feasible, is_non_delay, is_pfs_like, is_vertically_ordered

__version__ = "0.1.0"

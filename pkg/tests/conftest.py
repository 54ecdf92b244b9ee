from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pfsched.model import Instance, Job

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_ints = st.integers(min_value=0, max_value=10)
positive_ints = st.integers(min_value=1, max_value=10)
halves = st.integers(min_value=0, max_value=20).map(lambda k: Fraction(k, 2))


@st.composite
def instances(draw, max_n=5, max_m=3, agreeable=False, equal_release=False):
    n = draw(st.integers(min_value=1, max_value=max_n))
    m = draw(st.integers(min_value=1, max_value=max_m))
    r = [0] * n if equal_release else draw(st.lists(small_ints, min_size=n, max_size=n))
    p = draw(st.lists(positive_ints, min_size=n, max_size=n))
    if agreeable:
        r, p = sorted(r), sorted(p)
    d = draw(st.lists(positive_ints, min_size=n, max_size=n))
    w = draw(st.lists(positive_ints, min_size=n, max_size=n))
    return Instance(m, tuple(Job(i + 1, r[i], p[i], d[i], w[i]) for i in range(n)))


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

import hypothesis.strategies as st
from hypothesis import settings

from pbmle import Instance, Profile

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def S(*allocs: str) -> frozenset:
    """``S("p1,p3", "")`` -> {{p1, p3}, {}}."""
    return frozenset(frozenset(x for x in a.split(",") if x) for a in allocs)


@st.composite
def instances(draw, max_projects=4, max_cost=3, unit=False):
    m = draw(st.integers(1, max_projects))
    if unit:
        costs = [1] * m
    else:
        costs = draw(st.lists(st.integers(1, max_cost), min_size=m, max_size=m))
    budget = draw(st.integers(1, sum(costs)))
    return Instance.from_costs(costs, budget)


@st.composite
def profiles(draw, inst, min_agents=1, max_agents=4):
    n = draw(st.integers(min_agents, max_agents))
    ballot = st.frozensets(st.sampled_from(inst.ids))
    return Profile(tuple(draw(st.lists(ballot, min_size=n, max_size=n))))


@st.composite
def instance_and_profile(draw, max_projects=4, max_cost=3, unit=False, min_agents=1, max_agents=4):
    inst = draw(instances(max_projects, max_cost, unit))
    return inst, draw(profiles(inst, min_agents, max_agents))


# acceptance reporting ---------------------------------------------------------

import functools
import time

ACCEPTANCE: dict[int, str] = {}


def criterion(number: int, title: str):
    """Record a one-line PASS/FAIL verdict for an acceptance test.

    The wrapped test returns an optional detail string; any exception marks
    the criterion as failed and is re-raised.
    """

    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            start = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                msg = (str(exc).strip().splitlines() or [type(exc).__name__])[0]
                _record(number, title, False, msg, time.perf_counter() - start)
                raise
            _record(number, title, True, detail or "", time.perf_counter() - start)

        return run

    return wrap


def _record(number, title, ok, detail, elapsed):
    line = f"acceptance {number:>2} {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.2f}s)"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])

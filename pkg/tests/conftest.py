import os

from hypothesis import HealthCheck, settings, strategies as st

from framedkit.finkit import FinFn, FinSet

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def finsets(prefix="x", min_size=0, max_size=4):
    return st.integers(min_size, max_size).map(
        lambda n: FinSet(prefix, tuple(f"{prefix}{i}" for i in range(n))))


@st.composite
def finfns(draw, dom=None, cod=None, max_size=4):
    A = dom if dom is not None else draw(finsets("a", 0, max_size))
    B = cod if cod is not None else draw(finsets("b", 1 if len(A) else 0, max_size))
    if not len(B):
        return FinFn(FinSet(A.name, ()), B, ())
    return FinFn(A, B, tuple(draw(st.sampled_from(B.elements)) for _ in A))


@st.composite
def spans(draw, A, B, max_apex=4):
    from framedkit.spaninst import Span
    n = draw(st.integers(0, max_apex)) if len(A) and len(B) else 0
    legs = {f"s{i}": (draw(st.sampled_from(A.elements)), draw(st.sampled_from(B.elements)))
            for i in range(n)}
    return Span.make(A, B, legs)


@st.composite
def matrices(draw, A, B, max_entry=2):
    from framedkit.matinst import SetMatrix
    table = {(a, b): [f"e{a}{b}_{i}" for i in range(draw(st.integers(0, max_entry)))]
             for a in A for b in B}
    return SetMatrix.from_table(A, B, table)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)

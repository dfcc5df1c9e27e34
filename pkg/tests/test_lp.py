from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from ontolab.lp import check_certificate, check_solution, phase_one, solve_affine

from helpers import oracle_feasible

F = Fraction


@st.composite
def systems(draw):
    m = draw(st.integers(1, 3))
    n = draw(st.integers(1, 4))
    a = [[F(draw(st.integers(-3, 3))) for _ in range(n)] for _ in range(m)]
    b = [F(draw(st.integers(-4, 4))) for _ in range(m)]
    return a, b


def test_simple_feasible():
    res = phase_one([[1, 1]], [F(1)])
    assert res.feasible and check_solution([[1, 1]], [1], res.x)


def test_simple_infeasible():
    a, b = [[1, 1], [1, 1]], [F(1), F(2)]
    res = phase_one(a, b)
    assert not res.feasible and check_certificate(a, b, res.certificate)


def test_negative_rhs_needs_negative_x():
    res = phase_one([[1, 2]], [F(-1)])
    assert not res.feasible and check_certificate([[1, 2]], [-1], res.certificate)


@settings(max_examples=400, deadline=None)
@given(systems())
def test_phase_one_agrees_with_basic_solution_enumeration(system):
    a, b = system
    res = phase_one(a, b)
    assert res.feasible == oracle_feasible(a, b)
    if res.feasible:
        assert check_solution(a, b, res.x)
    else:
        assert check_certificate(a, b, res.certificate)


@settings(max_examples=200, deadline=None)
@given(systems())
def test_solve_affine(system):
    a, b = system
    x = solve_affine(a, b)
    if x is not None:
        assert check_solution(a, b, x, nonnegative=False)
    if phase_one(a, b).feasible:
        assert x is not None


def test_affine_inconsistent():
    assert solve_affine([[1, 0], [1, 0]], [F(1), F(2)]) is None

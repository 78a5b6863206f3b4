import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from extch.simplex import InfeasibleError, UnboundedError, solve_bounded, solve_standard_form


def test_toy_maximize():
    # maximize w1 s.t. w1 + w2 = 1
    sol = solve_bounded(np.array([1.0, 0.0]), np.array([[1.0, 1.0]]), np.array([1.0]), np.full(2, np.inf), maximize=True)
    assert sol.objective == pytest.approx(1.0)
    np.testing.assert_allclose(sol.x, [1.0, 0.0])


def test_upper_bound_respected():
    sol = solve_bounded(np.array([1.0, 0.0]), np.array([[1.0, 1.0]]), np.array([1.0]), np.array([0.3, np.inf]), maximize=True)
    assert sol.objective == pytest.approx(0.3)


def test_infeasible():
    with pytest.raises(InfeasibleError):
        solve_standard_form(np.zeros(2), np.array([[1.0, 1.0]]), np.array([-1.0]))


def test_unbounded():
    with pytest.raises(UnboundedError):
        solve_standard_form(np.array([-1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([0.0]))


def test_redundant_rows():
    A = np.array([[1.0, 1.0, 1.0], [2.0, 2.0, 2.0], [1.0, 0.0, 0.0]])
    b = np.array([1.0, 2.0, 0.25])
    sol = solve_standard_form(np.array([0.0, -1.0, 0.0]), A, b)
    assert sol.objective == pytest.approx(-0.75)


def test_degenerate_cycling_example():
    # Beale's example, which cycles under the textbook largest-coefficient rule
    c = np.array([-0.75, 150.0, -0.02, 6.0, 0, 0, 0])
    A = np.array(
        [
            [0.25, -60.0, -0.04, 9.0, 1, 0, 0],
            [0.5, -90.0, -0.02, 3.0, 0, 1, 0],
            [0.0, 0.0, 1.0, 0.0, 0, 0, 1],
        ]
    )
    b = np.array([0.0, 0.0, 1.0])
    sol = solve_standard_form(c, A, b)
    assert sol.objective == pytest.approx(-0.05)


@st.composite
def feasible_lps(draw):
    m = draw(st.integers(1, 4))
    n = draw(st.integers(m + 1, 8))
    vals = st.floats(-5, 5, allow_nan=False).map(lambda v: round(v, 3))
    A = np.array(draw(st.lists(st.lists(vals, min_size=n, max_size=n), min_size=m, max_size=m)))
    x0 = np.array(draw(st.lists(st.floats(0, 3).map(lambda v: round(v, 3)), min_size=n, max_size=n)))
    c = np.array(draw(st.lists(vals, min_size=n, max_size=n)))
    upper = np.full(n, 10.0)  # keeps every problem bounded
    return c, A, A @ x0, upper


@given(feasible_lps(), st.booleans())
def test_matches_highs(lp, maximize):
    c, A, b, upper = lp
    ours = solve_bounded(c, A, b, upper, maximize=maximize)
    ref = linprog(-c if maximize else c, A_eq=A, b_eq=b, bounds=[(0, u) for u in upper], method="highs")
    assert ref.status == 0
    expected = -ref.fun if maximize else ref.fun
    assert ours.objective == pytest.approx(expected, abs=1e-7)
    np.testing.assert_allclose(A @ ours.x, b, atol=1e-8)
    assert (ours.x >= -1e-9).all() and (ours.x <= upper + 1e-9).all()

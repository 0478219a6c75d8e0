"""Polynomial core: parsing, arithmetic, ordering, evaluation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sipsolve.poly import (Polynomial, PolynomialError, SemialgebraicSet,
                           VariableSpace, basis_size, grlex_key,
                           monomial_exponents, parse_polynomial,
                           poly_to_string)

X = VariableSpace("x", 2)
U = VariableSpace("u", 1)


def test_monomial_exponents_graded_lex():
    exps = monomial_exponents(2, 2)
    assert exps == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(exps) == basis_size(2, 2) == 6
    assert exps == sorted(exps, key=grlex_key)


def test_basis_size_binomial():
    for n in range(1, 5):
        for d in range(5):
            assert basis_size(n, d) == len(monomial_exponents(n, d))


def test_parse_simple():
    p = parse_polynomial("1/3 x1^2 + 1/2 x1 + x2^2 - x2", [X])
    assert p({"x": [3.0, 2.0]}) == pytest.approx(3.0 + 1.5 + 4.0 - 2.0)
    assert p.degree() == 2


def test_parse_mixed_spaces():
    g = parse_polynomial("- x1^2 - 2 x1 x2 u1^2 + u1 - 1/6 u1^3", [X, U])
    val = g({"x": [1.0, 2.0], "u": [0.5]})
    assert val == pytest.approx(-1.0 - 4.0 * 0.25 + 0.5 - 0.125 / 6)
    assert g.degree_in(U) == 3
    assert g.degree_in(X) == 2


def test_parse_errors():
    with pytest.raises(PolynomialError):
        parse_polynomial("x1^", [X])
    with pytest.raises(PolynomialError):
        parse_polynomial("x3", [X])
    with pytest.raises(PolynomialError):
        parse_polynomial("y1 + 1", [X])


def test_arithmetic_matches_pointwise():
    p = parse_polynomial("x1^2 - x2", [X])
    q = parse_polynomial("2 x2 + 1", [X])
    pt = {"x": [1.3, -0.7]}
    assert (p + q)(pt) == pytest.approx(p(pt) + q(pt))
    assert (p - q)(pt) == pytest.approx(p(pt) - q(pt))
    assert (p * q)(pt) == pytest.approx(p(pt) * q(pt))
    assert (p ** 3)(pt) == pytest.approx(p(pt) ** 3)
    assert (-p)(pt) == pytest.approx(-p(pt))


def test_gradient():
    p = parse_polynomial("x1^3 + 2 x1 x2 - x2^2", [X])
    gx = p.gradient(X)
    pt = {"x": [0.4, -1.1]}
    assert gx[0](pt) == pytest.approx(3 * 0.4 ** 2 + 2 * -1.1)
    assert gx[1](pt) == pytest.approx(2 * 0.4 - 2 * -1.1)


def test_fix_block():
    g = parse_polynomial("x1 u1 + u1^2 - x2", [X, U])
    gu = g.fix(X, [2.0, 5.0])
    assert gu.spaces == (U,)
    assert gu({"u": [3.0]}) == pytest.approx(6.0 + 9.0 - 5.0)
    gx = g.fix(U, [3.0])
    assert gx({"x": [2.0, 5.0]}) == pytest.approx(6.0 + 9.0 - 5.0)


def test_semialgebraic_set_membership():
    S = SemialgebraicSet(X,
                         equalities=[parse_polynomial("x1^2 + x2^2 - 2", [X])],
                         inequalities=[parse_polynomial("x1", [X])])
    assert S.contains([1.0, 1.0])
    assert not S.contains([-1.0, 1.0])
    assert not S.contains([0.5, 0.5])
    assert S.violation([1.0, 1.0]) <= 1e-12


def test_set_rejects_foreign_space():
    with pytest.raises(PolynomialError):
        SemialgebraicSet(X, inequalities=[parse_polynomial("u1", [U])])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=0, max_value=3),
    st.floats(min_value=-10, max_value=10, allow_nan=False)),
    min_size=1, max_size=6))
def test_string_round_trip(raw_terms):
    terms = {}
    for a, b, c in raw_terms:
        terms[(a, b)] = terms.get((a, b), 0.0) + c
    p = Polynomial((X,), terms)
    q = parse_polynomial(poly_to_string(p), [X])
    assert q == p

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkmflag.polyring import LinearForm, Polynomial, parse_polynomial

from oracles import naive_product

X1 = Polynomial.variable(3, 1)
X2 = Polynomial.variable(3, 2)
X3 = Polynomial.variable(3, 3)


def lf(*coeffs):
    return LinearForm(coeffs)


# ----------------------------------------------------------------------
# pinned examples


def test_add_examples():
    assert (X1 + (-X1)).is_zero()
    assert (X1 - X2) + (X2 - X3) == X1 - X3
    assert X1 ** 2 * X2 + X1 ** 2 * X2 == (X1 ** 2 * X2).scale(2)


def test_add_varcount_mismatch():
    with pytest.raises(ValueError):
        X1 + Polynomial.variable(2, 1)


def test_mul_examples():
    f = X1 ** 2 * X2 - X3.scale(Fraction(1, 2))
    assert Polynomial.one(3) * f == f
    assert (X1 - X2) * (X1 + X2) == X1 ** 2 - X2 ** 2


def test_a2_positive_root_product():
    # brute-force expansion, frozen
    p = (X1 - X2) * (X1 - X3) * (X2 - X3)
    assert str(p) == "x1^2*x2 - x1^2*x3 - x1*x2^2 + x1*x3^2 + x2^2*x3 - x2*x3^2"


def test_substitute_linear():
    f = X1 * X2
    identity = [lf(1, 0, 0), lf(0, 1, 0), lf(0, 0, 1)]
    assert f.substitute_linear(identity) == f
    swap = [lf(0, 1, 0), lf(1, 0, 0), lf(0, 0, 1)]
    assert X1.substitute_linear(swap) == X2
    # u = 312 acting by x_k -> x_{u(k)}: x1 -> x3, x2 -> x1
    act = [lf(0, 0, 1), lf(1, 0, 0), lf(0, 1, 0)]
    assert (X1 ** 2 * X2).substitute_linear(act) == X3 ** 2 * X1


def test_divrem_linear_examples():
    q, r = (X1 ** 2 - X2 ** 2).divrem_linear(lf(1, -1, 0))
    assert q == X1 + X2 and r.is_zero()
    q, r = X1.divrem_linear(lf(0, 1, -1))
    assert q.is_zero() and r == X1
    q, r = (X2 - X1).divrem_linear(lf(1, -1, 0))
    assert q == Polynomial.constant(3, -1) and r.is_zero()


def test_divrem_zero_form():
    with pytest.raises(ZeroDivisionError):
        X1.divrem_linear(lf(0, 0, 0))


def test_eval_examples():
    assert Polynomial.zero(3).evaluate([7, 8, 9]) == 0
    assert (X1 - X2).evaluate([3, 1, 0]) == 2
    vandermonde = (X1 - X2) * (X1 - X3) * (X2 - X3)
    assert vandermonde.evaluate([1, 2, 4]) == -6


def test_eval_length_mismatch():
    with pytest.raises(ValueError):
        X1.evaluate([1, 2])


def test_string_format():
    assert str(Polynomial.zero(3)) == "0"
    assert str(-X1) == "-x1"
    assert str(X1 ** 2 * X2 - X3.scale(Fraction(1, 2))) == "x1^2*x2 - 1/2*x3"
    assert str(Polynomial.constant(3, Fraction(-3, 4))) == "-3/4"


def test_parse_round_trip_and_whitespace():
    for text in ["x1^2*x2 - 1/2*x3", "0", "-x1 + 5", "2*x2^3", "1/3"]:
        p = parse_polynomial(text, 3)
        assert str(p) == text
    spaced = parse_polynomial("  x1 ^ 2 * x2   -  1/2 * x3 ", 3)
    assert str(spaced) == "x1^2*x2 - 1/2*x3"


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_polynomial("x1 + y2", 3)
    with pytest.raises(ValueError):
        parse_polynomial("x9", 3)


# ----------------------------------------------------------------------
# properties

coeffs = st.fractions(
    min_value=-5, max_value=5, max_denominator=3
).filter(lambda c: c != 0)
exponents = st.tuples(*(st.integers(0, 3) for _ in range(3)))


@st.composite
def polys(draw, max_terms=4):
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        terms[draw(exponents)] = draw(coeffs)
    return Polynomial(3, terms)


@st.composite
def nonzero_forms(draw):
    c = draw(st.tuples(*(st.integers(-3, 3) for _ in range(3))))
    if all(v == 0 for v in c):
        c = (1, -1, 0)
    return LinearForm(c)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_mul_matches_naive_oracle(f, g):
    assert f * g == naive_product(f.terms, g.terms, 3)


@settings(max_examples=60, deadline=None)
@given(polys(), nonzero_forms())
def test_divrem_reconstructs_and_is_idempotent(f, l):
    q, r = f.divrem_linear(l)
    assert q * l.to_polynomial() + r == f
    q2, r2 = r.divrem_linear(l)
    assert q2.is_zero() and r2 == r


@settings(max_examples=60, deadline=None)
@given(polys(), nonzero_forms())
def test_divisibility_is_substitution_independent(f, l):
    """r == 0 iff f vanishes after substituting the pivot solution of l=0."""
    _, r = f.divrem_linear(l)
    p = max(i for i, c in enumerate(l.coeffs) if c != 0)
    images = []
    for i in range(3):
        if i != p:
            e = [0, 0, 0]
            e[i] = 1
            images.append(LinearForm(e))
        else:
            sol = [-c / l.coeffs[p] for c in l.coeffs]
            sol[p] = Fraction(0)
            images.append(LinearForm(sol))
    assert r.is_zero() == f.substitute_linear(images).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys(), st.permutations([0, 1, 2]))
def test_substitute_permutation_round_trip(f, perm):
    def unit(i):
        e = [0, 0, 0]
        e[i] = 1
        return LinearForm(e)

    forward = [unit(perm[i]) for i in range(3)]
    inverse = [unit(perm.index(i)) for i in range(3)]
    assert f.substitute_linear(forward).substitute_linear(inverse) == f


@settings(max_examples=40, deadline=None)
@given(polys())
def test_string_round_trip(f):
    assert parse_polynomial(str(f), 3) == f

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ncmorita.errors import DetError, NotQuadraticError, PoleError
from ncmorita.exact import (
    FINITE_ORDER,
    IDENTITY,
    J0,
    P,
    W3,
    W4,
    GeneratorWord,
    IntMat2,
    QMat,
    QuadIrrational,
    cf_eval,
    cf_expand,
    embed_so22,
    format_theta,
    matrix_equivalent,
    mobius,
    parse_intmat2,
    parse_theta,
    quad_cf,
    quad_equivalent,
    quad_orbit_witness,
    rational_orbit_witness,
    snf2,
    so22_act,
    so22_blocks,
    so22_conditions,
    theta_matrix,
    word_decompose,
)

SQRT2 = QuadIrrational.sqrt(2)
SQRT3 = QuadIrrational.sqrt(3)


def euclid_oracle(p, q):
    out = []
    while q:
        out.append(math.floor(Fraction(p, q)))
        p, q = q, p - out[-1] * q
    return out


@st.composite
def sl2z(draw, bound=10**6):
    a = draw(st.integers(-bound, bound))
    b = draw(st.integers(-bound, bound))
    assume(math.gcd(a, b) == 1)
    # extended Euclid written out independently of the package
    r0, r1, x0, x1, y0, y1 = a, b, 1, 0, 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if r0 < 0:
        x0, y0 = -x0, -y0
    k = draw(st.integers(-3, 3))
    return IntMat2(1, 0, k, 1) @ IntMat2(a, b, -y0, x0)


fractions = st.fractions(max_denominator=200).filter(lambda r: abs(r) < 10**4)


@pytest.mark.parametrize("r, expected", [
    (Fraction(3, 7), (0, 2, 3)),
    (Fraction(5), (5,)),
    (Fraction(22, 7), (3, 7)),
    (Fraction(1, 7), (0, 7)),
    (Fraction(-3, 7), (-1, 1, 1, 3)),
])
def test_cf_expand(r, expected):
    assert cf_expand(r).coefficients == expected
    assert list(expected) == euclid_oracle(r.numerator, r.denominator)


@pytest.mark.parametrize("coeffs, value", [((0, 2, 3), Fraction(3, 7)), ((5,), Fraction(5)), ((0, 7), Fraction(1, 7))])
def test_cf_eval(coeffs, value):
    assert cf_eval(coeffs) == value


@given(fractions)
def test_cf_roundtrip(r):
    assert cf_eval(cf_expand(r)) == r


@pytest.mark.parametrize("g, t, out", [
    (IDENTITY, Fraction(3, 7), Fraction(3, 7)),
    (IntMat2(1, 0, 1, 1), Fraction(1, 2), Fraction(1, 3)),
])
def test_mobius_examples(g, t, out):
    assert mobius(g, t) == out


def test_mobius_pole():
    with pytest.raises(PoleError):
        mobius(IntMat2(1, 0, 2, 1), Fraction(-1, 2))


@settings(max_examples=60)
@given(sl2z(50), sl2z(50), fractions)
def test_mobius_is_an_action(g, h, t):
    try:
        lhs = mobius(g @ h, t)
        rhs = mobius(g, mobius(h, t))
    except PoleError:
        return
    assert lhs == rhs


def test_mobius_on_quadratic_matches_float():
    g = IntMat2(2, 1, 1, 1)
    assert float(mobius(g, SQRT2)) == pytest.approx((2 * 2**0.5 + 1) / (2**0.5 + 1), rel=1e-14)


def test_embedding_blocks():
    assert embed_so22(IDENTITY) == tuple(tuple(int(i == j) for j in range(4)) for i in range(4))
    a, b, c, d = 2, 3, 1, 2
    A, B, C, D = so22_blocks(embed_so22(IntMat2(a, b, c, d)))
    assert A == ((a, 0), (0, a)) and D == ((d, 0), (0, d))
    assert B == ((0, b), (-b, 0)) and C == ((0, -c), (c, 0))


@given(sl2z(10**4), fractions)
def test_embedding_matches_mobius(g, t):
    M = embed_so22(g)
    assert so22_conditions(M)
    try:
        expected = theta_matrix(mobius(g, t))
    except PoleError:
        return
    assert so22_act(M, theta_matrix(t)) == expected


def test_so22_conditions_reject_non_orthogonal():
    bad = ((2, 0, 0, 0), (0, 2, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    assert not so22_conditions(bad)


@pytest.mark.parametrize("A, tokens", [
    (W4, ("J0",)),
    (W3, ("Pinv", "J0")),
    (IDENTITY, ()),
    (FINITE_ORDER[2], ("J0", "J0")),
])
def test_word_decompose_examples(A, tokens):
    w = word_decompose(A)
    assert w.tokens == tokens
    assert w.matrix() == A


def test_w3_product_by_hand():
    assert P.inv() @ J0 == IntMat2(0, 1, -1, -1)


@given(sl2z())
def test_word_decompose_roundtrip(A):
    assert word_decompose(A).matrix() == A


def test_word_decompose_rejects_det():
    with pytest.raises(DetError):
        word_decompose(IntMat2(2, 0, 0, 1))


def test_runs_stay_short_for_large_powers():
    A = P ** 10**9
    w = word_decompose(A)
    assert w.runs == (("P", 10**9),)
    assert len(w) == 10**9


def test_word_inverse_and_concat():
    w = GeneratorWord.parse("J0 P Pinv P J0inv P")
    assert w.runs == (("J0", 1), ("P", 1), ("J0", -1), ("P", 1))
    assert (w @ w.inverse()).matrix() == IDENTITY
    assert len(w @ w.inverse()) == 0


@pytest.mark.parametrize("i", [2, 3, 4, 6])
def test_finite_orders(i):
    W = FINITE_ORDER[i]
    powers = [W ** k for k in range(1, i + 1)]
    assert powers[-1] == IDENTITY
    assert IDENTITY not in powers[:-1]


def brute_snf_oracle(M):
    g = math.gcd(math.gcd(M.a, M.b), math.gcd(M.c, M.d))
    det = abs(M.det())
    return (g, det // g) if g else (0, 0)


@pytest.mark.parametrize("M, D", [
    (IntMat2(0, 1, 0, 0), (1, 0)),
    (IDENTITY, (1, 1)),
    (IntMat2(2, 0, 0, 4), (2, 4)),
    (IntMat2(0, 0, 0, 0), (0, 0)),
])
def test_snf_examples(M, D):
    assert snf2(M).D == D


def test_snf_rank_one_exhaustive_oracle():
    # for rank 1 the oracle gives (gcd, 0); check against an exhaustive search
    M = IntMat2(0, 1, 0, 0)
    units = [U for U in (IntMat2(*e) for e in itertools.product(range(-1, 2), repeat=4)) if abs(U.det()) == 1]
    assert any(U @ M @ V == IntMat2(1, 0, 0, 0) for U in units for V in units)


@given(st.tuples(*[st.integers(-40, 40)] * 4))
def test_snf_properties(entries):
    M = IntMat2(*entries)
    s = snf2(M)
    assert s.U @ M @ s.V == s.diag()
    assert abs(s.U.det()) == 1 and abs(s.V.det()) == 1
    d1, d2 = s.D
    if d1:
        assert d2 % d1 == 0
    if M.det() != 0:
        assert s.D == brute_snf_oracle(M)
    else:
        assert d1 == math.gcd(math.gcd(M.a, M.b), math.gcd(M.c, M.d)) and d2 == 0


@given(st.tuples(*[st.integers(-20, 20)] * 4), sl2z(30), sl2z(30))
def test_snf_invariant_under_unimodular_mixing(entries, U, V):
    M = IntMat2(*entries)
    assert snf2(U @ M @ V).D == snf2(M).D


@pytest.mark.parametrize("M, N, expected", [
    (IntMat2(1, 2, 3, 4), IntMat2(1, 2, 3, 4), True),
    (IntMat2(0, 1, 0, 0), IntMat2(0, 2, 0, 0), False),
    (IntMat2(0, 1, 0, 0), IntMat2(1, 0, 0, 0), True),
])
def test_matrix_equivalent(M, N, expected):
    assert matrix_equivalent(M, N) is expected


@pytest.mark.parametrize("r1, r2", [(0, 0), (Fraction(1, 2), 0), (Fraction(3, 7), Fraction(1, 2))])
def test_rational_orbit_witness(r1, r2):
    g = rational_orbit_witness(r1, r2)
    assert g.is_gl() and mobius(g, Fraction(r1)) == r2
    if (r1, r2) == (0, 0):
        assert g == IDENTITY
    if (r1, r2) == (Fraction(1, 2), 0):
        assert (g.a, g.b) == (2, -1)


@pytest.mark.parametrize("x, pre, period", [
    (SQRT2, (1,), (2,)),
    (SQRT3, (1,), (1, 2)),
    (QuadIrrational(1, 1, 5, 2), (), (1,)),
])
def test_quad_cf(x, pre, period):
    cf = quad_cf(x)
    assert (cf.preperiod, cf.period) == (pre, period)


@pytest.mark.parametrize("x, y, expected", [
    (SQRT2, SQRT2, True),
    (SQRT2, SQRT2 + 1, True),
    (SQRT2, SQRT3, False),
    (SQRT2, QuadIrrational(0, 1, 8, 1), False),
    (SQRT2, SQRT2.reciprocal(), True),
])
def test_quad_equivalent(x, y, expected):
    assert quad_equivalent(x, y) is expected
    g = quad_orbit_witness(x, y)
    assert (g is not None) is expected
    if g is not None:
        assert mobius(g, x) == y


def test_quad_canonical_form():
    assert QuadIrrational(0, 1, 8, 1) == QuadIrrational(0, 2, 2, 1)
    assert QuadIrrational(2, 2, 2, -4) == QuadIrrational(-1, -1, 2, 2)
    with pytest.raises(NotQuadraticError):
        QuadIrrational(0, 1, 9, 1)


@given(st.integers(-50, 50), st.integers(-50, 50).filter(bool), st.sampled_from([2, 3, 5, 6, 7, 10]), st.integers(1, 50))
def test_quad_floor_matches_float(a, b, d, e):
    x = QuadIrrational(a, b, d, e)
    assert x.floor() == math.floor(float(x))


@pytest.mark.parametrize("text, value", [
    ("3/7", Fraction(3, 7)),
    ("5", Fraction(5)),
    ("-1/2", Fraction(-1, 2)),
    ("(0+1√2)/1", SQRT2),
    ("(1+1sqrt2)/1", SQRT2 + 1),
    ("(1-2√3)/5", QuadIrrational(1, -2, 3, 5)),
])
def test_parse_theta(text, value):
    assert parse_theta(text) == value


@pytest.mark.parametrize("bad", ["", "x", "1/0", "(1+√2)"])
def test_parse_theta_errors(bad):
    with pytest.raises(ValueError):
        parse_theta(bad)


@given(fractions)
def test_format_parse_roundtrip(r):
    assert parse_theta(format_theta(r)) == r


def test_format_quad_roundtrip():
    for x in (SQRT2, QuadIrrational(1, -2, 3, 5)):
        assert parse_theta(format_theta(x)) == x


def test_parse_intmat2():
    assert parse_intmat2("[1,1;0,1]") == IntMat2(1, 1, 0, 1)
    assert parse_intmat2(" [ -1 , 2 ; 3 , -4 ] ") == IntMat2(-1, 2, 3, -4)
    with pytest.raises(ValueError):
        parse_intmat2("[1,2,3]")


@given(sl2z(1000))
def test_inverse_transpose_is_j0_conjugation(A):
    assert A.inv_T() == J0 @ A @ J0.inv()


def test_qmat_inverse():
    M = QMat(((Fraction(1, 2), 3), (1, 4)))
    assert M @ M.inv() == QMat.identity(2)

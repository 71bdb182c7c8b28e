import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncmorita.errors import DetError, TraceError
from ncmorita.exact import IDENTITY, J0, L, IntMat2, QuadIrrational, cf_eval, mobius
from ncmorita.morita import (
    EQUIVALENT,
    NOT_EQUIVALENT,
    UNKNOWN,
    EquivalenceCertificate,
    MoritaStep,
    conjugation_isomorphism_check,
    decide_finite,
    decide_z,
    finite_chain,
    kgroup_report,
    replay,
    trace_range,
    z_chain,
)

SQRT2 = QuadIrrational.sqrt(2)
T = IntMat2(1, 1, 0, 1)


def mobius_replay_oracle(cert):
    """Walk the steps with raw 2x2 matrices, independent of MoritaStep.apply."""
    theta = cert.theta_start
    for s in cert.steps:
        if s.kind == "shear":
            theta = theta / (s.c * theta + 1)
        elif s.kind == "flip":
            theta = 1 / theta
        else:
            theta = theta + s.n
    return theta


def test_chain_3_7():
    cert = finite_chain(Fraction(3, 7))
    assert cert.theta_start == 3
    assert cert.steps == (MoritaStep.shear(2),)
    assert replay(cert) and mobius_replay_oracle(cert) == Fraction(3, 7)


def test_chain_integer():
    cert = finite_chain(5)
    assert cert.theta_start == 0 and cert.steps == (MoritaStep.shift(5),)
    assert cert.K_accum == IDENTITY and replay(cert)


def test_chain_single_flip():
    cert = finite_chain(Fraction(1, 7))
    assert cert.theta_start == 7 and cert.steps == (MoritaStep.flip(),)
    assert cert.K_accum == L


def test_z_chain_conjugator():
    cert = z_chain(Fraction(3, 7), T)
    assert cert.K_accum == J0
    assert cert.conjugated_A == J0 @ T @ J0.inv()
    assert z_chain(4, T).K_accum == IDENTITY
    assert z_chain(Fraction(1, 7), T).K_accum == L
    with pytest.raises(DetError):
        z_chain(Fraction(1, 2), IntMat2(2, 0, 0, 1))


reduced = st.tuples(st.integers(-200, 200), st.integers(1, 60)).filter(lambda t: math.gcd(*t) == 1).map(lambda t: Fraction(*t))


@given(reduced)
def test_chain_replays(r):
    for cert in (finite_chain(r), z_chain(r, T)):
        assert cert.theta_end == r and cert.theta_start.denominator == 1
        assert replay(cert) and mobius_replay_oracle(cert) == r


def test_chain_shape_follows_continued_fraction():
    r = Fraction(43, 30)  # [1; 2, 3, 4]
    cert = finite_chain(r)
    kinds = [s.kind for s in cert.steps]
    assert cert.theta_start == 4
    assert kinds == ["shear", "flip", "shear", "shift"]
    assert [s.c for s in cert.steps if s.kind == "shear"] == [3, 2]
    assert cf_eval((1, 2, 3, 4)) == r


def test_certificate_json_roundtrip():
    cert = z_chain(Fraction(-11, 13), T)
    text = cert.dumps()
    back = EquivalenceCertificate.from_json(json.loads(text))
    assert back == cert and replay(back)
    assert json.loads(text)["theta_end"] == "-11/13"


def test_tampered_certificate_fails_replay():
    d = finite_chain(Fraction(3, 7)).to_json()
    d["theta_end"] = "3/8"
    assert not replay(EquivalenceCertificate.from_json(d))


def test_step_validation():
    with pytest.raises(ValueError):
        MoritaStep.shear(0)
    with pytest.raises(ValueError):
        MoritaStep("rotate")


@pytest.mark.parametrize("theta, k, generator", [(Fraction(1, 3), 2, Fraction(1, 6)), (0, 5, Fraction(1, 5))])
def test_trace_range_rank_one(theta, k, generator):
    R = trace_range(theta, k)
    assert R.rank == 1 and R.generator == generator


def test_trace_range_rank_two():
    R = trace_range(SQRT2, 2)
    assert R.rank == 2
    assert not R.compatible_with(trace_range(Fraction(1, 2), 2))
    with pytest.raises(ValueError):
        R.generator


def test_decide_finite_rational():
    d = decide_finite(Fraction(1, 2), Fraction(3, 7), 4)
    assert d.verdict == EQUIVALENT
    assert all(replay(c) for c in d.certificates)
    assert [c.theta_end for c in d.certificates] == [Fraction(1, 2), Fraction(3, 7)]


@pytest.mark.parametrize("i", [2, 3, 4, 6])
def test_decide_finite_rank_obstruction(i):
    d = decide_finite(Fraction(1, 2), SQRT2, i)
    assert d.verdict == NOT_EQUIVALENT
    assert d.obstruction["statement"] == "rank(Z+θZ) = 1 ≠ 2"


def test_decide_finite_quadratic():
    d = decide_finite(SQRT2, SQRT2 + 1, 6)
    assert d.verdict == EQUIVALENT
    g = IntMat2.from_rows(d.witness["matrix"])
    assert mobius(g, SQRT2) == SQRT2 + 1
    d = decide_finite(SQRT2, QuadIrrational.sqrt(3), 2)
    assert d.verdict == NOT_EQUIVALENT and d.obstruction["kind"] == "cf_period_mismatch"
    with pytest.raises(ValueError):
        decide_finite(SQRT2, SQRT2, 5)


def test_decide_z_same_matrix():
    d = decide_z(Fraction(1, 2), Fraction(3, 7), T, T)
    assert d.verdict == EQUIVALENT
    assert all(c.A == T and replay(c) for c in d.certificates)
    d = decide_z(Fraction(1, 2), SQRT2, T, T)
    assert d.verdict == NOT_EQUIVALENT and d.obstruction["kind"] == "trace_range_rank"


def test_decide_z_smith_forms():
    d = decide_z(Fraction(1, 3), Fraction(1, 5), T, IntMat2(1, 2, 0, 1))
    assert d.verdict == NOT_EQUIVALENT
    assert (d.obstruction["D_A"], d.obstruction["D_B"]) == ([1, 0], [2, 0])
    # conjugate trace-2 matrices share the Smith form
    B = J0 @ T @ J0.inv()
    d = decide_z(Fraction(1, 3), Fraction(1, 5), T, B)
    assert d.verdict == EQUIVALENT and d.witness["D_A"] == d.witness["D_B"] == [1, 0]


def test_decide_z_unknown_branches():
    assert decide_z(Fraction(1, 3), Fraction(1, 5), IntMat2(2, 1, 1, 1), T).verdict == UNKNOWN
    assert decide_z(SQRT2, SQRT2, J0, J0).verdict == UNKNOWN


def test_decide_z_quadratic_hyperbolic():
    A = IntMat2(2, 1, 1, 1)
    d = decide_z(SQRT2, SQRT2 + 3, A, A)
    assert d.verdict == EQUIVALENT
    B = IntMat2(3, 1, 2, 1)  # I - A^-1 has det -1, I - B^-1 has det -2
    d = decide_z(SQRT2, SQRT2 + 3, A, B)
    assert d.verdict == NOT_EQUIVALENT
    assert (d.obstruction["D_A"], d.obstruction["D_B"]) == ([1, 1], [1, 2])


@pytest.mark.parametrize("n, h1", [(1, 1), (4, 4), (-3, 3)])
def test_kgroup_torsion(n, h1):
    assert kgroup_report(IntMat2(1, n, 0, 1)).K1_torsion == h1


def test_kgroup_rejections():
    with pytest.raises(TraceError):
        kgroup_report(IDENTITY)
    with pytest.raises(TraceError):
        kgroup_report(IntMat2(2, 1, 1, 1))


unimodular = st.sampled_from([J0, L, IntMat2(2, 1, 1, 1), IntMat2(5, 2, 2, 1), IntMat2(1, 7, 0, 1), IntMat2(-3, 1, -7, 2)])


@given(st.integers(-10, 10).filter(bool), st.lists(unimodular, min_size=1, max_size=4))
def test_kgroup_conjugation_invariance(n, factors):
    A = IntMat2(1, n, 0, 1)
    P = IDENTITY
    for F in factors:
        P = P @ F
    B = P @ A @ P.inv()
    assert kgroup_report(B).K1_torsion == kgroup_report(A).K1_torsion == abs(n)
    assert conjugation_isomorphism_check(A, P)


def test_conjugation_monomial_index_map():
    A, P = T, J0
    B = P @ A @ P.inv()
    assert B == IntMat2(1, 0, -1, 1)
    assert conjugation_isomorphism_check(A, IDENTITY)
    assert conjugation_isomorphism_check(A, P)
    # the monomial n = (1, 0) is carried to the same index along both paths
    n = (1, 0)
    assert (A.inv() @ P.inv()).T().apply(n) == (P.inv() @ B.inv()).T().apply(n)

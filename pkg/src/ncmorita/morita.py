"""Morita-equivalence bookkeeping: continued-fraction chains with
conjugators, decision procedures, trace ranges and SNF criteria.

Every certificate is replayed in exact arithmetic before it is returned.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DetError, ReplayError, TraceError
from .exact import (
    IDENTITY,
    J0,
    L,
    IntMat2,
    QuadIrrational,
    as_rational,
    cf_expand,
    format_theta,
    matrix_equivalent,
    mobius,
    quad_cf,
    quad_equivalent,
    quad_orbit_witness,
    snf2,
)

EQUIVALENT = "Equivalent"
NOT_EQUIVALENT = "NotEquivalent"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class MoritaStep:
    kind: str  # "shear", "flip" or "shift"
    c: int | None = None
    n: int | None = None

    def __post_init__(self):
        if self.kind == "shear" and not (isinstance(self.c, int) and self.c > 0):
            raise ValueError("a shear needs a positive integer c")
        if self.kind == "shift" and not isinstance(self.n, int):
            raise ValueError("a shift needs an integer n")
        if self.kind not in ("shear", "flip", "shift"):
            raise ValueError(f"unknown step kind {self.kind!r}")

    @classmethod
    def shear(cls, c: int):
        return cls("shear", c=c)

    @classmethod
    def flip(cls):
        return cls("flip")

    @classmethod
    def shift(cls, n: int):
        return cls("shift", n=n)

    @property
    def conjugator(self) -> IntMat2:
        return {"shear": J0, "flip": L, "shift": IDENTITY}[self.kind]

    def apply(self, theta: Fraction) -> Fraction:
        if self.kind == "shear":
            return mobius(IntMat2(1, 0, self.c, 1), theta)
        if self.kind == "flip":
            return mobius(IntMat2(0, 1, 1, 0), theta)
        return theta + self.n

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "shear":
            d["c"] = self.c
        if self.kind == "shift":
            d["n"] = self.n
        d["conjugator"] = self.conjugator.tolist()
        return d


@dataclass(frozen=True)
class EquivalenceCertificate:
    theta_start: Fraction
    theta_end: Fraction
    steps: tuple
    K_accum: IntMat2
    replay_ok: bool
    A: IntMat2 | None = None

    @property
    def conjugated_A(self) -> IntMat2 | None:
        if self.A is None:
            return None
        return self.K_accum @ self.A @ self.K_accum.inv()

    def claim(self) -> str:
        end = format_theta(self.theta_end)
        if self.A is None:
            return f"A_{end} x| Z_i ~ C(T^2) x| Z_i"
        return f"A_{end} x|_(K A K^-1) Z ~ C(T^2) x|_A Z with A = {self.A}, K A K^-1 = {self.conjugated_A}"

    def to_json(self) -> dict:
        d = {
            "theta_start": format_theta(self.theta_start),
            "steps": [s.to_json() for s in self.steps],
            "theta_end": format_theta(self.theta_end),
            "K_accum": self.K_accum.tolist(),
            "replay_ok": self.replay_ok,
        }
        if self.A is not None:
            d["A"] = self.A.tolist()
            d["conjugated_A"] = self.conjugated_A.tolist()
            d["claim"] = self.claim()
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False)

    @classmethod
    def from_json(cls, d: dict) -> "EquivalenceCertificate":
        steps = []
        for s in d["steps"]:
            steps.append(MoritaStep(s["kind"], c=s.get("c"), n=s.get("n")))
        A = IntMat2.from_rows(d["A"]) if "A" in d else None
        return cls(Fraction(d["theta_start"]), Fraction(d["theta_end"]), tuple(steps),
                   IntMat2.from_rows(d["K_accum"]), bool(d["replay_ok"]), A)


def replay(cert: EquivalenceCertificate) -> bool:
    """Recompute the endpoint and the conjugator product from the steps."""
    theta = cert.theta_start
    K = IDENTITY
    for step in cert.steps:
        theta = step.apply(theta)
        K = step.conjugator @ K
    return theta == cert.theta_end and K == cert.K_accum


def _chain_steps(r: Fraction):
    cf = cf_expand(r).coefficients
    a0, tail = cf[0], cf[1:]
    steps = []
    if not tail:
        start = Fraction(0)
    else:
        n = len(tail)
        start = Fraction(tail[-1])
        if n == 1:
            steps.append(MoritaStep.flip())
        # shears by a_{n-1}, ..., a_1 with flips between them
        for idx, a in enumerate(reversed(tail[:-1])):
            steps.append(MoritaStep.shear(a))
            if idx < n - 2:
                steps.append(MoritaStep.flip())
    if a0:
        steps.append(MoritaStep.shift(a0))
    return start, tuple(steps)


def _certify(r: Fraction, A: IntMat2 | None) -> EquivalenceCertificate:
    start, steps = _chain_steps(r)
    K = IDENTITY
    theta = start
    for s in steps:
        theta = s.apply(theta)
        K = s.conjugator @ K
    cert = EquivalenceCertificate(start, r, steps, K, theta == r, A)
    if not (cert.replay_ok and replay(cert)):
        raise ReplayError(f"chain for {r} failed replay")
    return cert


def finite_chain(r) -> EquivalenceCertificate:
    """Chain from an integer start to r: shears and flips driven by the
    continued fraction of the fractional part, then a shift by a0."""
    return _certify(as_rational(r), None)


def z_chain(r, A: IntMat2) -> EquivalenceCertificate:
    if A.det() != 1:
        raise DetError(f"A must lie in SL(2,Z), det = {A.det()}")
    return _certify(as_rational(r), A)


# ---------------------------------------------------------------------------
# trace ranges


@dataclass(frozen=True)
class TraceRange:
    """(1/k)(Z + theta Z)."""

    k: int
    theta: object

    @property
    def rank(self) -> int:
        return 2 if isinstance(self.theta, QuadIrrational) else 1

    @property
    def generator(self) -> Fraction:
        """For rank 1 the range is generator * Z."""
        if self.rank != 1:
            raise ValueError("rank-2 range has no single generator")
        t = as_rational(self.theta)
        return Fraction(1, self.k * t.denominator)

    def compatible_with(self, other: "TraceRange") -> bool:
        """Whether one range is a positive multiple of the other."""
        if self.rank != other.rank:
            return False
        if self.rank == 1:
            return True
        return quad_equivalent(self.theta, other.theta)

    def to_json(self) -> dict:
        d = {"k": self.k, "theta": format_theta(self.theta), "rank": self.rank}
        if self.rank == 1:
            d["generator"] = format_theta(self.generator)
        return d


def trace_range(theta, k: int = 1) -> TraceRange:
    if k < 1:
        raise ValueError("k must be positive")
    if not isinstance(theta, QuadIrrational):
        theta = as_rational(theta)
    return TraceRange(k, theta)


# ---------------------------------------------------------------------------
# decisions


@dataclass
class Decision:
    verdict: str
    reason: str = ""
    certificates: list = field(default_factory=list)
    witness: dict | None = None
    obstruction: dict | None = None

    def to_json(self) -> dict:
        d = {"verdict": self.verdict, "reason": self.reason}
        if self.certificates:
            d["certificates"] = [c.to_json() for c in self.certificates]
        if self.witness is not None:
            d["witness"] = self.witness
        if self.obstruction is not None:
            d["obstruction"] = self.obstruction
        return d


def _kind(t):
    if isinstance(t, QuadIrrational):
        return "quad"
    if isinstance(t, (int, Fraction)):
        return "rational"
    return "other"


def _rank_obstruction(t1, t2, k: int) -> dict:
    r1, r2 = trace_range(t1, k), trace_range(t2, k)
    assert not r1.compatible_with(r2)
    return {
        "kind": "trace_range_rank",
        "ranges": [r1.to_json(), r2.to_json()],
        "statement": f"rank(Z+θZ) = {r1.rank} ≠ {r2.rank}",
    }


def _theta_decision(t1, t2, certify, k: int) -> Decision:
    k1, k2 = _kind(t1), _kind(t2)
    if k1 == "rational" and k2 == "rational":
        return Decision(EQUIVALENT, "both parameters rational", [certify(t1), certify(t2)])
    if {k1, k2} == {"rational", "quad"}:
        return Decision(NOT_EQUIVALENT, "trace ranges have different ranks", obstruction=_rank_obstruction(t1, t2, k))
    if k1 == "quad" and k2 == "quad":
        g = quad_orbit_witness(t1, t2)
        if g is not None:
            return Decision(EQUIVALENT, "GL(2,Z)-related by continued-fraction tails",
                            witness={"kind": "gl2z_orbit", "matrix": g.tolist(),
                                     "replay": format_theta(mobius(g, t1)) == format_theta(t2)})
        p1, p2 = quad_cf(t1).period, quad_cf(t2).period
        return Decision(NOT_EQUIVALENT, "continued-fraction tails differ",
                        obstruction={"kind": "cf_period_mismatch", "period_1": list(p1), "period_2": list(p2),
                                     "field_1": t1.d, "field_2": t2.d})
    return Decision(UNKNOWN, "parameters outside rationals and quadratic irrationals")


def decide_finite(t1, t2, i: int) -> Decision:
    if i not in (2, 3, 4, 6):
        raise ValueError("i must be one of 2, 3, 4, 6")
    return _theta_decision(t1, t2, finite_chain, i)


def _finite_order(A: IntMat2) -> bool:
    return abs(A.trace()) < 2 or A == IDENTITY or A == -IDENTITY


def decide_z(t1, t2, A: IntMat2, B: IntMat2) -> Decision:
    for M in (A, B):
        if M.det() != 1:
            raise DetError(f"{M} is not in SL(2,Z)")
    k1, k2 = _kind(t1), _kind(t2)
    both_quad = k1 == k2 == "quad"
    if A == B:
        if both_quad and _finite_order(A):
            return Decision(UNKNOWN, "irrational branch needs a matrix of infinite order")
        return _theta_decision(t1, t2, lambda r: z_chain(r, A), 1)
    if k1 == "rational" and k2 == "rational":
        if A.trace() == 2 and B.trace() == 2:
            MA, MB = IDENTITY - A.inv(), IDENTITY - B.inv()
            DA, DB = snf2(MA).D, snf2(MB).D
            payload = {"kind": "smith_normal_form", "I_minus_A_inv": MA.tolist(), "I_minus_B_inv": MB.tolist(),
                       "D_A": list(DA), "D_B": list(DB)}
            if matrix_equivalent(MA, MB):
                return Decision(EQUIVALENT, "trace-2 matrices with equal Smith forms",
                                [z_chain(t1, A), z_chain(t2, B)], witness=payload)
            return Decision(NOT_EQUIVALENT, f"Smith forms diag{DA} ≠ diag{DB}", obstruction=payload)
        return Decision(UNKNOWN, "rational parameters with distinct matrices outside the trace-2 case")
    if both_quad:
        if _finite_order(A) or _finite_order(B):
            return Decision(UNKNOWN, "irrational branch needs matrices of infinite order")
        g = quad_orbit_witness(t1, t2)
        MA, MB = IDENTITY - A.inv(), IDENTITY - B.inv()
        DA, DB = snf2(MA).D, snf2(MB).D
        snf = {"kind": "smith_normal_form", "D_A": list(DA), "D_B": list(DB)}
        if g is None:
            p1, p2 = quad_cf(t1).period, quad_cf(t2).period
            return Decision(NOT_EQUIVALENT, "continued-fraction tails differ",
                            obstruction={"kind": "cf_period_mismatch", "period_1": list(p1), "period_2": list(p2)})
        if DA != DB:
            return Decision(NOT_EQUIVALENT, f"Smith forms diag{DA} ≠ diag{DB}", obstruction=snf)
        return Decision(EQUIVALENT, "orbit and matrix-equivalence conditions hold",
                        witness={"kind": "gl2z_orbit_and_snf", "matrix": g.tolist(), **snf})
    return Decision(UNKNOWN, "combination not covered")


# ---------------------------------------------------------------------------
# K-groups and the conjugation lemma


@dataclass(frozen=True)
class KGroupReport:
    K0_rank: int
    K1_rank: int
    K1_torsion: int

    def to_json(self):
        return {"K0_rank": self.K0_rank, "K1_rank": self.K1_rank, "K1_torsion": self.K1_torsion}


def kgroup_report(A: IntMat2, theta=None) -> KGroupReport:
    if A.det() != 1:
        raise DetError(f"{A} is not in SL(2,Z)")
    if A.trace() != 2:
        raise TraceError(f"trace(A) = {A.trace()}, expected 2")
    if A == IDENTITY:
        raise TraceError("A = I is degenerate: I - A^-1 = 0")
    h1 = snf2(IDENTITY - A.inv()).D[0]
    return KGroupReport(3, 3, h1)


def conjugation_isomorphism_check(A: IntMat2, Pm: IntMat2, radius: int = 4, seed: int = 0) -> bool:
    """phi(f)(x) = f(P^-1 x) intertwines alpha_A and alpha_B, B = P A P^-1.

    The monomial e(<n, x>) pulled back by M becomes e(<M^t n, x>), so on
    monomials both composites are index maps.  Those are compared exactly,
    and the monomials are also evaluated at a few points of the torus.
    """
    if A.det() != 1:
        raise DetError(f"A = {A} is not in SL(2,Z)")
    if not Pm.is_gl():
        raise DetError(f"P = {Pm} is not unimodular")
    B = Pm @ A @ Pm.inv()
    Ai, Pi, Bi = A.inv(), Pm.inv(), B.inv()
    if Ai @ Pi != Pi @ Bi:
        return False
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 1, size=(5, 2))
    for n in itertools.product(range(-radius, radius + 1), repeat=2):
        lhs = (Ai @ Pi).T().apply(n)  # phi(alpha_A f)(x) = f(A^-1 P^-1 x)
        rhs = (Pi @ Bi).T().apply(n)  # alpha_B(phi f)(x) = f(P^-1 B^-1 x)
        if lhs != rhs:
            return False
        for x in pts:
            direct = np.exp(2j * np.pi * np.dot(n, _apply_float(Ai @ Pi, x)))
            via = np.exp(2j * np.pi * np.dot(rhs, x))
            if abs(direct - via) > 1e-9:
                return False
    return True


def _apply_float(M: IntMat2, x):
    return np.array([M.a * x[0] + M.b * x[1], M.c * x[0] + M.d * x[1]])

"""The verification suites behind ``ncmorita verify``.

Exact-tier checks count failures and must report a residual of exactly 0.
Quadrature-tier checks carry their own nominal tolerance, multiplied by
``config.tolerance / 1e-6`` so that ``--tol`` rescales the whole tier.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import bimodule as bm
from . import heisenberg_weyl as hw
from .errors import ConfigError, OrderMismatch, PoleError
from .exact import (
    FINITE_ORDER,
    IDENTITY,
    J0,
    GeneratorWord,
    IntMat2,
    QMat,
    QuadIrrational,
    cf_eval,
    cf_expand,
    embed_so22,
    format_theta,
    mobius,
    snf2,
    so22_act,
    so22_conditions,
    theta_matrix,
    token_matrix,
    _bezout,
    word_decompose,
)
from .morita import (
    NOT_EQUIVALENT,
    EQUIVALENT,
    conjugation_isomorphism_check,
    decide_finite,
    decide_z,
    finite_chain,
    kgroup_report,
    replay,
    z_chain,
)
from .twisted_algebra import AlgebraElement, act, cocycle, mul, star

NOMINAL_TOL = 1e-6


@dataclass
class CheckReport:
    check_id: str
    params: dict
    residual: float
    tolerance: float
    tier: str
    passed: bool = field(init=False)

    def __post_init__(self):
        self.residual = float(self.residual)
        if self.tier == "exact":
            self.tolerance = 0.0
        self.passed = bool(self.residual <= self.tolerance)

    def to_json(self) -> dict:
        return {
            "check_id": self.check_id,
            "params": self.params,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "tier": self.tier,
        }


@dataclass
class RunConfig:
    theta: Fraction = Fraction(2, 5)
    c: int = 2
    N: int = 2048
    m: int = 8
    L: Fraction | None = None
    tolerance: float = NOMINAL_TOL
    window: int = 3
    seed: int = 0
    family: int = 10

    FIELDS = ("theta", "c", "N", "m", "L", "tolerance", "window", "seed", "family")

    def __post_init__(self):
        self.validate()

    def validate(self):
        def need(cond, name, msg):
            if not cond:
                raise ConfigError(msg, field=name)

        try:
            self.theta = Fraction(self.theta) if not isinstance(self.theta, Fraction) else self.theta
        except (TypeError, ValueError, ZeroDivisionError):
            raise ConfigError(f"theta must be p/q, got {self.theta!r}", field="theta")
        for name in ("c", "N", "m", "window", "seed", "family"):
            v = getattr(self, name)
            need(isinstance(v, int) and not isinstance(v, bool), name, f"{name} must be an integer, got {v!r}")
        need(self.c >= 1, "c", "c must be positive")
        need(self.N >= 2 and self.N % 2 == 0, "N", "N must be a positive even integer")
        need(self.m >= 1, "m", "m must be positive")
        need(self.window >= 0, "window", "window must be nonnegative")
        need(self.family >= 1, "family", "family must be positive")
        need(isinstance(self.tolerance, (int, float)) and self.tolerance >= 0, "tolerance", "tolerance must be a nonnegative number")
        if self.c * self.theta + 1 == 0:
            raise PoleError(f"c*theta + 1 = 0 for theta = {self.theta}, c = {self.c}")
        if self.L is not None:
            derived = self.grid().L
            try:
                L = Fraction(str(self.L))
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"L must be a number, got {self.L!r}", field="L")
            need(L == derived, "L", f"L = {L} is inconsistent with N*delta/2 = {derived}")

    def grid(self) -> hw.GridSpec:
        return hw.GridSpec(self.theta, self.c, self.m, self.N)

    @property
    def scale(self) -> float:
        return self.tolerance / NOMINAL_TOL

    def as_params(self) -> dict:
        return {"theta": format_theta(self.theta), "c": self.c, "N": self.N, "m": self.m,
                "L": str(self.grid().L), "tolerance": self.tolerance, "window": self.window,
                "seed": self.seed, "family": self.family}

    @classmethod
    def from_json_text(cls, text: str) -> "RunConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, line=exc.lineno) from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object", line=1)
        lines = text.splitlines()

        def line_of(key):
            for i, ln in enumerate(lines, 1):
                if f'"{key}"' in ln:
                    return i
            return None

        for key in data:
            if key not in cls.FIELDS:
                raise ConfigError(f"unknown field; expected one of {', '.join(cls.FIELDS)}", field=key, line=line_of(key))
        try:
            return cls(**data)
        except ConfigError as exc:
            raise ConfigError(str(exc).split("] ", 1)[-1], field=exc.field, line=line_of(exc.field)) from None


# ---------------------------------------------------------------------------
# helpers


def _rng(cfg: RunConfig, salt: str) -> random.Random:
    return random.Random(f"{cfg.seed}:{salt}")


def random_word(rng: random.Random, max_len: int) -> GeneratorWord:
    toks = ("J0", "J0inv", "P", "Pinv")
    return GeneratorWord(rng.choice(toks) for _ in range(rng.randint(0, max_len)))


def random_sl2(rng: random.Random, bound: int) -> IntMat2:
    while True:
        a, b = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if math.gcd(a, b) == 1:
            break
    g, x, y = _bezout(a, b)
    M = IntMat2(a, b, -y, x)  # a x + b y = 1
    k = rng.randint(-bound, bound) // max(1, max(abs(a), abs(b)))
    return IntMat2(1, 0, k, 1) @ M if abs(k) * max(abs(a), abs(b)) <= bound else M


def _exact(cid, params, failures):
    return CheckReport(cid, params, failures, 0.0, "exact")


def _quad(cid, params, residual, nominal, cfg):
    return CheckReport(cid, params, residual, nominal * cfg.scale, "quadrature")


def lattice_T(E, radius):
    return [E.T_point((a, b)) for a in range(-radius, radius + 1) for b in range(-radius, radius + 1)]


def lattice_S(E, radius):
    return [E.S_point((a, b)) for a in range(-radius, radius + 1) for b in range(-radius, radius + 1)]


NAMED_WORDS = {
    "J0": GeneratorWord(["J0"]),
    "P": GeneratorWord(["P"]),
    "W2": word_decompose(FINITE_ORDER[2]),
    "W3": word_decompose(FINITE_ORDER[3]),
    "W4": word_decompose(FINITE_ORDER[4]),
    "W6": word_decompose(FINITE_ORDER[6]),
}


# ---------------------------------------------------------------------------
# exact tier


def exact_checks(cfg: RunConfig) -> list[CheckReport]:
    out = []
    theta, c = cfg.theta, cfg.c
    E = bm.build_embedding(theta, c)

    bad = sum(cf_eval(cf_expand(Fraction(p, q))) != Fraction(p, q) for p in range(-50, 51) for q in range(1, 51))
    out.append(_exact("exact.cf_roundtrip", {"range": "|p|,q<=50"}, bad))

    rng = _rng(cfg, "mobius")
    bad = 0
    for _ in range(200):
        g, h = random_sl2(rng, 50), random_sl2(rng, 50)
        t = Fraction(rng.randint(-30, 30), rng.randint(1, 30))
        try:
            lhs = mobius(g @ h, t)
            rhs = mobius(g, mobius(h, t))
        except PoleError:
            continue
        bad += lhs != rhs
    out.append(_exact("exact.mobius_composition", {"pairs": 200}, bad))

    rng = _rng(cfg, "so22")
    bad = 0
    for _ in range(100):
        g = random_sl2(rng, 10**6)
        M = embed_so22(g)
        bad += not so22_conditions(M)
        t = Fraction(rng.randint(-20, 20), rng.randint(1, 20))
        try:
            bad += so22_act(M, theta_matrix(t)) != theta_matrix(mobius(g, t))
        except PoleError:
            pass
    out.append(_exact("exact.so22_embedding", {"matrices": 100}, bad))

    rng = _rng(cfg, "words")
    bad = 0
    for _ in range(100):
        A = random_sl2(rng, 10**6)
        bad += word_decompose(A).matrix() != A
        w = random_word(rng, 40)
        bad += word_decompose(w.matrix()).matrix() != w.matrix()
    out.append(_exact("exact.word_roundtrip", {"matrices": 200}, bad))

    rng = _rng(cfg, "snf")
    bad = 0
    for _ in range(100):
        M = IntMat2(*(rng.randint(-30, 30) for _ in range(4)))
        s = snf2(M)
        bad += s.U @ M @ s.V != s.diag() or abs(s.U.det()) != 1 or abs(s.V.det()) != 1
        bad += s.D[0] < 0 or s.D[1] < 0 or (s.D[0] and s.D[1] % s.D[0]) or (s.D[0] == 0 and s.D[1] != 0)
        U, V = random_sl2(rng, 20), random_sl2(rng, 20)
        bad += snf2(U @ M @ V).D != s.D
    out.append(_exact("exact.snf", {"matrices": 100}, bad))

    bad = sum(W ** i != IDENTITY for i, W in FINITE_ORDER.items())
    out.append(_exact("exact.finite_orders", {"i": [2, 3, 4, 6]}, bad))

    rng = _rng(cfg, "inverse_transpose")
    bad = 0
    for _ in range(20):
        w = random_word(rng, 12)
        for M in [token_matrix(t) for t in w.tokens] + [w.matrix()]:
            bad += M.inv_T() != J0 @ M @ J0.inv()
    out.append(_exact("exact.inverse_transpose", {"words": 20}, bad))

    rng = _rng(cfg, "cocycle")
    bad = 0
    for _ in range(1000):
        x, y, z = [(rng.randint(-20, 20), rng.randint(-20, 20)) for _ in range(3)]
        xy = (x[0] + y[0], x[1] + y[1])
        yz = (y[0] + z[0], y[1] + z[1])
        bad += cocycle(theta, x, y) * cocycle(theta, xy, z) != cocycle(theta, x, yz) * cocycle(theta, y, z)
    out.append(_exact("twisted.cocycle_identity", {"triples": 1000}, bad))

    e1, e2 = AlgebraElement.delta(theta, (1, 0)), AlgebraElement.delta(theta, (0, 1))
    a, b = mul(e1, e2), mul(e2, e1)
    bad = int(a.support != ((1, 1),) or b.support != ((1, 1),))
    if not bad:
        bad = int(b.exact_phase((1, 1)) != a.exact_phase((1, 1)) * cocycle(2 * theta, (0, 1), (1, 0)))
        bad += int(a.exact_phase((1, 1)).t != theta % 2)
    out.append(_exact("twisted.commutation", {"theta": format_theta(theta)}, bad))

    rng = _rng(cfg, "act")
    bad = 0
    for _ in range(50):
        A, B = random_sl2(rng, 6), random_sl2(rng, 6)
        f = AlgebraElement(theta, {(rng.randint(-3, 3), rng.randint(-3, 3)): 1.0 for _ in range(4)})
        g = AlgebraElement(theta, {(rng.randint(-3, 3), rng.randint(-3, 3)): 1.0 for _ in range(4)})
        bad += not act(A @ B, f).is_exactly(act(A, act(B, f)))
        bad += not act(A, mul(f, g)).is_exactly(mul(act(A, f), act(A, g)))
    out.append(_exact("twisted.action_homomorphism", {"pairs": 50}, bad))

    rng = _rng(cfg, "embedding")
    bad = 0
    cases = [(theta, c)] + [(Fraction(rng.randint(-20, 20), rng.randint(1, 20)), rng.randint(1, 6)) for _ in range(50)]
    for t, cc in cases:
        try:
            F = bm.build_embedding(t, cc)
        except PoleError:
            continue
        bad += F.T.T @ F.J @ F.T != F.Theta
        bad += F.S.T @ F.J @ F.S != -F.Theta_prime
        bad += not bm.shear_blocks_check(F)
    out.append(_exact("bimodule.embedding_identities", {"cases": len(cases)}, bad))

    rng = _rng(cfg, "symplectic")
    bad = 0
    J = hw.j_form(c)
    for _ in range(50):
        w = random_word(rng, 12)
        M = hw.build_MA(w, theta, c)
        bad += M.T @ J @ M != J
        prod = QMat.identity(4)
        for t in w.tokens:
            prod = prod @ hw.generator_MA(t, theta, c)
        bad += prod != M
    for i, W in FINITE_ORDER.items():
        M = hw.build_MA(word_decompose(W), theta, c)
        P = QMat.identity(4)
        for _ in range(i):
            P = P @ M
        bad += P != QMat.identity(4)
    out.append(_exact("hw.symplectic", {"words": 50}, bad))

    # the Z_c phase of pi(k + c, l) differs from pi(k, l) by exactly l/2 turns
    bad = 0
    for k in range(-2 * c, 2 * c + 1):
        for l in range(-2 * c, 2 * c + 1):
            diff = Fraction(-(k + c) * l, 2 * c) - Fraction(-k * l, 2 * c)
            bad += (diff - Fraction(l, 2)) % 1 != 0
    out.append(_exact("hw.lift_dependence_phase", {"c": c}, bad))

    rng = _rng(cfg, "lattice")
    words = {f"W{i}": i for i in (2, 3, 4, 6)}
    words["P"] = GeneratorWord(["P"])
    for name, w in sorted(words.items()):
        chk = bm.lattice_identity_check(w, E)
        out.append(_exact(f"bimodule.lattice_identity[{name}]", {"radius": 5}, 0 if chk else 1))
    bad = sum(not bm.lattice_identity_check(random_word(rng, 8), E) for _ in range(20))
    out.append(_exact("bimodule.lattice_identity[random]", {"words": 20, "radius": 5}, bad))

    bad = 0
    for q in range(1, 51):
        for p in range(-q, 2 * q + 1):
            if math.gcd(p, q) != 1:
                continue
            r = Fraction(p, q)
            for cert in (finite_chain(r), z_chain(r, IntMat2(1, 1, 0, 1))):
                bad += not (cert.replay_ok and replay(cert) and cert.theta_end == r
                            and cert.theta_start.denominator == 1)
    out.append(_exact("morita.chain_replay", {"q_max": 50}, bad))

    s2 = QuadIrrational.sqrt(2)
    bad = 0
    bad += decide_finite(Fraction(1, 2), Fraction(3, 7), 4).verdict != EQUIVALENT
    for i in (2, 3, 4, 6):
        d = decide_finite(Fraction(1, 2), s2, i)
        bad += d.verdict != NOT_EQUIVALENT or d.obstruction["kind"] != "trace_range_rank"
    bad += decide_finite(s2, s2 + 1, 6).verdict != EQUIVALENT
    bad += decide_finite(s2, QuadIrrational.sqrt(3), 2).verdict != NOT_EQUIVALENT
    d = decide_z(Fraction(1, 3), Fraction(1, 5), IntMat2(1, 1, 0, 1), IntMat2(1, 2, 0, 1))
    bad += d.verdict != NOT_EQUIVALENT or (d.obstruction["D_A"], d.obstruction["D_B"]) != ([1, 0], [2, 0])
    out.append(_exact("morita.decisions", {}, bad))

    rng = _rng(cfg, "kgroup")
    bad = 0
    for _ in range(100):
        n = rng.choice([v for v in range(-12, 13) if v])
        A = IntMat2(1, n, 0, 1)
        Pm = random_sl2(rng, 30)
        B = Pm @ A @ Pm.inv()
        bad += kgroup_report(A).K1_torsion != kgroup_report(B).K1_torsion or kgroup_report(A).K1_torsion != abs(n)
        bad += not conjugation_isomorphism_check(A, Pm)
    out.append(_exact("morita.kgroup_invariance", {"conjugations": 100}, bad))
    return out


# ---------------------------------------------------------------------------
# quadrature tier


def quadrature_checks(cfg: RunConfig) -> list[CheckReport]:
    out = []
    spec = cfg.grid()
    E = bm.build_embedding(cfg.theta, cfg.c)
    fam = hw.gaussian_family(spec, cfg.family, cfg.seed)
    f, g = fam[0], fam[1 % len(fam)]
    R = cfg.window
    edge = max(h.edge for h in fam)
    out.append(_quad("hw.edge_decay", {}, edge, 1e-12, cfg))

    lat = lattice_T(E, 2) + lattice_S(E, 2)
    out.append(_quad("hw.unitarity", {"points": len(lat)}, max(abs(hw.hw_apply(p, f).norm() - f.norm()) for p in lat), 1e-14, cfg))
    out.append(_quad("hw.adjoint", {"points": len(lat)},
                     max(hw.hw_adjoint(p, hw.hw_apply(p, f)).max_abs_diff(f) for p in lat), 1e-14, cfg))

    rng = _rng(cfg, "composition")
    worst = 0.0
    for _ in range(100):
        a = rng.choice(lat)
        b = rng.choice(lat)
        lhs = hw.hw_apply(a, hw.hw_apply(b, f))
        t = (b.x * a.y - a.x * b.y) / 2 + Fraction(b.k * a.l - a.k * b.l, 2 * cfg.c)
        rhs = hw.hw_apply(a + b, f) * hw.e_const(t)
        worst = max(worst, lhs.max_abs_diff(rhs))
    out.append(_quad("hw.composition_law", {"pairs": 100}, worst, 1e-12, cfg))

    worst = 0.0
    for p in lat:
        lifted = hw.PhaseSpacePoint(p.x, p.y, p.k + cfg.c, p.l)
        worst = max(worst, hw.hw_apply(lifted, f).max_abs_diff(hw.hw_apply(p, f) * (-1) ** (p.l % 2)))
    out.append(_quad("hw.lift_dependence", {"points": len(lat)}, worst, 1e-14, cfg))

    out.append(_quad("hw.J0_inverse", {}, hw.weyl_J0(hw.weyl_J0(f), inverse=True).max_abs_diff(f), 1e-8, cfg))
    h = f
    for _ in range(4):
        h = hw.weyl_J0(h)
    out.append(_quad("hw.J0_fourth_power", {}, h.max_abs_diff(f), 1e-8, cfg))
    out.append(_quad("hw.P_inverse", {}, hw.weyl_P(hw.weyl_P(f), inverse=True).max_abs_diff(f), 1e-14, cfg))

    for name, w in NAMED_WORDS.items():
        worst = max(max(hw.covariance_residuals(w, lat, h)) for h in fam)
        out.append(_quad(f"hw.covariance[{name}]", {"family": len(fam), "points": len(lat)}, worst, 1e-6, cfg))

    for i in (2, 3, 4, 6):
        w = word_decompose(FINITE_ORDER[i])
        try:
            op = hw.order_phase(w, i, fam, tol=1e-6 * cfg.scale if cfg.scale else 0.0)
            params = {"lambda": [op.lam.real, op.lam.imag]}
            out.append(_quad(f"hw.order_phase[{i}].modulus", params, abs(abs(op.lam) - 1), 1e-8, cfg))
            out.append(_quad(f"hw.order_phase[{i}].spread", params, op.spread, 1e-6, cfg))
            if i == 4:
                out.append(_quad("hw.order_phase[4].unit", params, abs(op.lam - 1), 1e-6, cfg))
        except OrderMismatch as exc:
            params = {"error": "not parallel"}
            out.append(_quad(f"hw.order_phase[{i}].modulus", params, exc.residual, 1e-8, cfg))
            out.append(_quad(f"hw.order_phase[{i}].spread", params, exc.residual, 1e-6, cfg))
            if i == 4:
                out.append(_quad("hw.order_phase[4].unit", params, exc.residual, 1e-6, cfg))

    V = hw.stft(g, f)
    rng = _rng(cfg, "stft")
    worst = 0.0
    for _ in range(20):
        s = int(V.shifts[rng.randrange(len(V.shifts))])
        n = rng.randint(-spec.N // 2, spec.N // 2 - 1)
        k, l = rng.randrange(spec.c), rng.randrange(spec.c)
        worst = max(worst, abs(V.at(s, n, k, l) - hw.stft_point(g, f, s, n, k, l)))
    out.append(_quad("hw.stft_factorization", {"samples": 20}, worst, 1e-10, cfg))
    out.append(_quad("hw.stft_isometry", {}, abs(V.norm() - f.norm() * g.norm()), 1e-6, cfg))
    quad = [fam[i % len(fam)] for i in range(2, 6)]
    out.append(_quad("hw.parseval", {}, hw.parseval_check(*quad), 1e-6, cfg))

    pts = [(a, b) for a in range(-R, R + 1) for b in range(-R, R + 1)]
    out.append(_quad("bimodule.right_action_pointwise", {"window": R},
                     max(bm.act_right(f, l, E).max_abs_diff(hw.hw_apply(E.T_point(l), f)) for l in pts), 1e-14, cfg))
    out.append(_quad("bimodule.left_action_pointwise", {"window": R},
                     max(bm.act_left(l, f, E).max_abs_diff(hw.hw_adjoint(E.S_point(l), f)) for l in pts), 1e-14, cfg))
    rng = _rng(cfg, "module_cocycle")
    wr = wl = 0.0
    small = [(a, b) for a in range(-2, 3) for b in range(-2, 3)]
    for _ in range(30):
        l, lp = rng.choice(small), rng.choice(small)
        s = (l[0] + lp[0], l[1] + lp[1])
        lhs = bm.act_right(bm.act_right(f, l, E), lp, E)
        wr = max(wr, lhs.max_abs_diff(bm.act_right(f, s, E) * cocycle(E.theta, l, lp).value()))
        lhs = bm.act_left(l, bm.act_left(lp, f, E), E)
        wl = max(wl, lhs.max_abs_diff(bm.act_left(s, f, E) * cocycle(E.theta_prime, l, lp).value()))
    out.append(_quad("bimodule.right_cocycle", {"pairs": 30}, wr, 1e-12, cfg))
    out.append(_quad("bimodule.left_cocycle", {"pairs": 30}, wl, 1e-12, cfg))

    win = bm.InnerProductWindow(R)
    a = bm.inner_A(f, g, E, win)
    b = bm.inner_B(f, g, E, win)
    ra = max(abs(a[l] - bm.act_right(g, (-l[0], -l[1]), E).inner(f)) for l in pts)
    rb = max(abs(b[l] - f.inner(bm.act_left(l, g, E))) for l in pts)
    out.append(_quad("bimodule.inner_A_relation", {"window": R}, ra, 1e-12, cfg))
    out.append(_quad("bimodule.inner_B_relation", {"window": R}, rb, 1e-12, cfg))
    herm = max(a.max_abs_diff(star(bm.inner_A(g, f, E, win)), pts), b.max_abs_diff(star(bm.inner_B(g, f, E, win)), pts))
    out.append(_quad("bimodule.hermitian", {"window": R}, herm, 1e-10, cfg))

    for name in ("W2", "W3", "W4", "W6", "P"):
        rep = bm.equivariance_residual(NAMED_WORDS[name], f, g, E, win)
        out.append(_quad(f"bimodule.equivariance[{name}]", {k: v for k, v in rep.as_dict().items()}, rep.worst, 1e-5, cfg))

    triples = [tuple(fam[(3 * t + j) % len(fam)] for j in range(3)) for t in range(5)]
    cal = bm.calibrate_K(E, triples, strict=False)
    params = {"K": cal.K, "triples": len(triples)}
    out.append(_quad("bimodule.K_consistency", params, cal.spread, 1e-6, cfg))
    out.append(_quad("bimodule.associativity", params, cal.residual, 1e-5, cfg))
    return out


def run_suite(cfg: RunConfig, tiers=("exact", "quadrature")) -> list[CheckReport]:
    reports = []
    if "exact" in tiers:
        reports += exact_checks(cfg)
    if "quadrature" in tiers:
        reports += quadrature_checks(cfg)
    return sorted(reports, key=lambda r: r.check_id)


def summarize(reports) -> dict:
    out = {}
    for tier in ("exact", "quadrature"):
        rs = [r for r in reports if r.tier == tier]
        out[tier] = {"passed": sum(r.passed for r in rs), "failed": sum(not r.passed for r in rs)}
    out["ok"] = all(r.passed for r in reports)
    return out

"""The Heisenberg bimodule between A_theta' and A_theta on S(R x Z_c).

The right action of U_l and the left action of V_l are evaluated from their
own defining formulas in terms of the embeddings T and S and the form J',
independently of :func:`heisenberg_weyl.hw_apply`; the two routes are
compared in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InconsistentCalibration, PoleError, WindowTooSmall
from .exact import FINITE_ORDER, GeneratorWord, L as L_MAT, QMat, as_rational, word_decompose
from .heisenberg_weyl import (
    BOUNDARY_TOL,
    GridFunction,
    PhaseSpacePoint,
    _same_spec,
    build_MA,
    e_const,
    e_frac,
    j_form,
    shift_samples,
    weyl_word,
)
from .twisted_algebra import AlgebraElement


@dataclass(frozen=True)
class LatticeEmbedding:
    theta: Fraction
    c: int
    theta_tilde: Fraction
    theta_prime: Fraction
    T: QMat
    S: QMat
    J: QMat
    Jprime: QMat
    T1: QMat
    S1: QMat
    L: QMat
    Zmat: QMat

    @property
    def Theta(self) -> QMat:
        return QMat(((0, self.theta), (-self.theta, 0)))

    @property
    def Theta_prime(self) -> QMat:
        return QMat(((0, self.theta_prime), (-self.theta_prime, 0)))

    def T_point(self, l) -> PhaseSpacePoint:
        return _point(self.T.apply(l))

    def S_point(self, l) -> PhaseSpacePoint:
        return _point(self.S.apply(l))


def _point(v) -> PhaseSpacePoint:
    x, y, k, l = v
    return PhaseSpacePoint(x, y, int(k), int(l))


def build_embedding(theta, c: int) -> LatticeEmbedding:
    theta = as_rational(theta)
    if c < 1:
        raise ValueError("c must be a positive integer")
    if c * theta + 1 == 0:
        raise PoleError(f"c*theta + 1 = 0 for theta = {theta}, c = {c}")
    k = c * theta + 1
    tt = k / c
    tp = theta / k
    r = Fraction(1, c)
    T = QMat(((tt, 0), (0, 1), (-1, 0), (0, 1)))
    S = QMat(((0, r), (-1 / k, 0), (0, -1), (-1, 0)))
    J = j_form(c)
    Jp = J.map_entries(lambda v: max(v, Fraction(0)))
    E = LatticeEmbedding(
        theta=theta,
        c=c,
        theta_tilde=tt,
        theta_prime=tp,
        T=T,
        S=S,
        J=J,
        Jprime=Jp,
        T1=QMat(((tt, 0), (0, 1))),
        S1=QMat(((0, r), (-1 / k, 0))),
        L=QMat.from_int(L_MAT),
        Zmat=QMat(((0, -r), (r, 0))),
    )
    if T.T @ J @ T != E.Theta or S.T @ J @ S != -E.Theta_prime:
        raise AssertionError("embedding identities failed")  # exact arithmetic: cannot happen
    return E


def shear_blocks_check(E: LatticeEmbedding) -> bool:
    """-C Z = D for the embedded shear [[1,0],[c,1]]: C = [[0,-c],[c,0]], D = I."""
    C = QMat(((0, -E.c), (E.c, 0)))
    return -(C @ E.Zmat) == QMat.identity(2)


# ---------------------------------------------------------------------------
# module actions


def _half_form_phase(E: LatticeEmbedding, v) -> Fraction:
    """<v, J' v / 2> as an exact rational."""
    Jv = E.Jprime.apply(v)
    return sum((a * b for a, b in zip(v, Jv)), Fraction(0)) / 2


def _pairing(f: GridFunction, y, l) -> np.ndarray:
    """<(p, q), (y, l)> = e(p y) e(q l / c) on the grid."""
    spec = f.spec
    cont = e_frac(spec.delta * as_rational(y), spec.offsets)
    disc = e_frac(Fraction(int(l), spec.c), np.arange(spec.c))
    return np.outer(cont, disc)


def _shift_index(f: GridFunction, x) -> int:
    return PhaseSpacePoint(x, 0, 0, 0).shift_index(f.spec)


def act_right(f: GridFunction, l, E: LatticeEmbedding, tol: float = BOUNDARY_TOL) -> GridFunction:
    """f.U_l(x) = e(<-T l, J' T l / 2>) <x, T''(l)> f(x - T'(l))."""
    _check_theta(f, E)
    v = E.T.apply(l)
    s = _shift_index(f, v[0])
    moved = shift_samples(f.samples, s, int(v[2]), E.c, tol)
    out = moved * _pairing(f, v[1], v[3]) * e_const(-_half_form_phase(E, v))
    return GridFunction(f.spec, out)


def act_left(l, f: GridFunction, E: LatticeEmbedding, tol: float = BOUNDARY_TOL) -> GridFunction:
    """V_l.f(x) = e(<-S l, J' S l / 2>) <x, -S''(l)> f(x + S'(l))."""
    _check_theta(f, E)
    v = E.S.apply(l)
    s = _shift_index(f, -v[0])
    moved = shift_samples(f.samples, s, -int(v[2]), E.c, tol)
    out = moved * _pairing(f, -v[1], -v[3]) * e_const(-_half_form_phase(E, v))
    return GridFunction(f.spec, out)


def _check_theta(f: GridFunction, E: LatticeEmbedding):
    if f.spec.theta != E.theta or f.spec.c != E.c:
        raise ValueError(f"grid (theta={f.spec.theta}, c={f.spec.c}) does not match embedding (theta={E.theta}, c={E.c})")


# ---------------------------------------------------------------------------
# inner products


@dataclass(frozen=True)
class InnerProductWindow:
    """Coefficients for |l|_inf <= radius.  ``radius=None`` grows the window
    until the outer shell drops below ``decay_tol``; with a fixed radius the
    shell is checked only when ``decay_tol`` is given."""

    radius: int | None = 3
    decay_tol: float | None = None
    max_radius: int = 40


def _window_points(R: int):
    return [(a, b) for a in range(-R, R + 1) for b in range(-R, R + 1)]


def _shell(R: int):
    return [(a, b) for (a, b) in _window_points(R) if max(abs(a), abs(b)) == R]


def inner_A_coefficient(f: GridFunction, g: GridFunction, l, E: LatticeEmbedding) -> complex:
    """e(<-T l, J' T l/2>) int <x, -T''(l)> g(x + T'(l)) conj f(x) dx."""
    v = E.T.apply(l)
    s = _shift_index(f, -v[0])
    # mass pushed off the grid would pair with f outside the window
    moved = shift_samples(g.samples, s, -int(v[2]), E.c, tol=np.inf)
    integrand = _pairing(f, -v[1], -v[3]) * moved * np.conj(f.samples)
    return complex(np.sum(integrand)) * f.spec.weight() * e_const(-_half_form_phase(E, v))


def inner_B_coefficient(f: GridFunction, g: GridFunction, l, E: LatticeEmbedding, K: float = 1.0) -> complex:
    """K e(<S l, J' S l/2>) int <x, S''(l)> conj g(x + S'(l)) f(x) dx."""
    v = E.S.apply(l)
    s = _shift_index(f, -v[0])
    # mass pushed off the grid would pair with f outside the window
    moved = shift_samples(g.samples, s, -int(v[2]), E.c, tol=np.inf)
    integrand = _pairing(f, v[1], v[3]) * np.conj(moved) * f.samples
    return K * complex(np.sum(integrand)) * f.spec.weight() * e_const(_half_form_phase(E, v))


def _collect(coef, theta, W: InnerProductWindow) -> AlgebraElement:
    if W.radius is not None:
        pts = _window_points(W.radius)
        vals = {l: coef(l) for l in pts}
        if W.decay_tol is not None and W.radius > 0:
            shell = max(abs(vals[l]) for l in _shell(W.radius))
            if shell > W.decay_tol:
                raise WindowTooSmall(f"shell |l| = {W.radius} carries {shell:.3g} > {W.decay_tol:g}")
        return AlgebraElement(theta, vals)
    tol = 1e-10 if W.decay_tol is None else W.decay_tol
    vals = {(0, 0): coef((0, 0))}
    for R in range(1, W.max_radius + 1):
        shell = {l: coef(l) for l in _shell(R)}
        vals.update(shell)
        if max(abs(z) for z in shell.values()) < tol:
            return AlgebraElement(theta, vals)
    raise WindowTooSmall(f"coefficients still above {tol:g} at radius {W.max_radius}")


def inner_A(f: GridFunction, g: GridFunction, E: LatticeEmbedding, W: InnerProductWindow = InnerProductWindow()) -> AlgebraElement:
    _same_spec(f, g)
    _check_theta(f, E)
    return _collect(lambda l: inner_A_coefficient(f, g, l, E), E.theta, W)


def inner_B(f: GridFunction, g: GridFunction, E: LatticeEmbedding, W: InnerProductWindow = InnerProductWindow(), K: float = 1.0) -> AlgebraElement:
    _same_spec(f, g)
    _check_theta(f, E)
    return _collect(lambda l: inner_B_coefficient(f, g, l, E, K), E.theta_prime, W)


def _term_tol(z: complex) -> float:
    # a term may lose mass up to BOUNDARY_TOL after scaling by its coefficient
    return BOUNDARY_TOL / abs(z) if z else np.inf


def right_module_action(f: GridFunction, a: AlgebraElement, E: LatticeEmbedding) -> GridFunction:
    """f.a = sum_l a(l) f.U_l."""
    out = np.zeros_like(f.samples)
    for l in a.support:
        z = a.coefficient(l)
        out = out + z * act_right(f, l, E, _term_tol(z)).samples
    return GridFunction(f.spec, out)


def left_module_action(b: AlgebraElement, h: GridFunction, E: LatticeEmbedding) -> GridFunction:
    """b.h = sum_l b(l) V_l.h."""
    out = np.zeros_like(h.samples)
    for l in b.support:
        z = b.coefficient(l)
        out = out + z * act_left(l, h, E, _term_tol(z)).samples
    return GridFunction(h.spec, out)


# ---------------------------------------------------------------------------
# calibration of K


@dataclass
class Calibration:
    K: float
    per_triple: list = field(default_factory=list)
    spread: float = 0.0
    residual: float = 0.0


def _associativity_pair(f, g, h, E, W):
    b = inner_B(f, g, E, W, K=1.0)
    a = inner_A(g, h, E, W)
    return left_module_action(b, h, E), right_module_action(f, a, E)


def associativity_residual(f, g, h, E: LatticeEmbedding, K: float, W: InnerProductWindow = InnerProductWindow(None)) -> float:
    """||<f,g>_B . h - f . <g,h>_A|| / ||f . <g,h>_A|| at the given K."""
    lhs, rhs = _associativity_pair(f, g, h, E, W)
    return (lhs * K - rhs).norm() / rhs.norm()


def calibrate_K(E: LatticeEmbedding, triples, rtol: float = 1e-6, atol: float = 1e-5,
                W: InnerProductWindow = InnerProductWindow(None), strict: bool = True) -> Calibration:
    """Least-squares K with <f,g>_B . h = f . <g,h>_A over the triples.

    With ``strict=False`` the post-checks are reported in the result instead
    of raising.
    """
    pairs = [_associativity_pair(f, g, h, E, W) for f, g, h in triples]
    per, num, den = [], 0.0, 0.0
    for lhs, rhs in pairs:
        n_t = rhs.inner(lhs).real
        d_t = lhs.inner(lhs).real
        per.append(n_t / d_t)
        num += n_t
        den += d_t
    K = num / den
    spread = max(abs(k - K) / abs(K) for k in per)
    residual = max((lhs * K - rhs).norm() / rhs.norm() for lhs, rhs in pairs)
    cal = Calibration(K, per, spread, residual)
    if not strict:
        return cal
    if not K > 0:
        raise InconsistentCalibration(f"calibrated K = {K} is not positive", per, residual)
    if spread > rtol:
        raise InconsistentCalibration(f"per-triple K disagree: relative spread {spread:.3g} > {rtol:g}", per, residual)
    if residual > atol:
        raise InconsistentCalibration(f"associativity residual {residual:.3g} > {atol:g} after calibration", per, residual)
    return cal


# ---------------------------------------------------------------------------
# exact lattice identities and equivariance


def build_NA(w, theta, c: int) -> QMat:
    """diag(S1 A^-t S1^-1, L A L^-1)."""
    A = w.matrix() if isinstance(w, GeneratorWord) else w
    E = build_embedding(theta, c)
    Ait = QMat.from_int(A.inv_T())
    return QMat.block_diag(E.S1 @ Ait @ E.S1.inv(), E.L @ QMat.from_int(A) @ E.L.inv())


class IdentityCheck:
    """Truthy result carrying the first counterexample, if any."""

    __slots__ = ("ok", "counterexample")

    def __init__(self, ok: bool, counterexample=None):
        self.ok = ok
        self.counterexample = counterexample

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"IdentityCheck(ok={self.ok}, counterexample={self.counterexample!r})"


def lattice_identity_check(w, E: LatticeEmbedding, radius: int = 5) -> IdentityCheck:
    """M_A T(l) = T(A l) and N_A S(l) = S(A^-t l) for all |l|_inf <= radius."""
    if isinstance(w, int):
        w = word_decompose(FINITE_ORDER[w])
    A = w.matrix() if isinstance(w, GeneratorWord) else w
    M = build_MA(A, E.theta, E.c)
    Nm = build_NA(A, E.theta, E.c)
    Ait = A.inv_T()
    for l in _window_points(radius):
        lhs, rhs = M.apply(E.T.apply(l)), E.T.apply(A.apply(l))
        if lhs != rhs:
            return IdentityCheck(False, {"side": "T", "l": l, "lhs": [str(v) for v in lhs], "rhs": [str(v) for v in rhs]})
        lhs, rhs = Nm.apply(E.S.apply(l)), E.S.apply(Ait.apply(l))
        if lhs != rhs:
            return IdentityCheck(False, {"side": "S", "l": l, "lhs": [str(v) for v in lhs], "rhs": [str(v) for v in rhs]})
    return IdentityCheck(True)


@dataclass
class EquivarianceReport:
    right_action: float
    left_action: float
    inner_A: float
    inner_B: float

    @property
    def worst(self) -> float:
        return max(self.right_action, self.left_action, self.inner_A, self.inner_B)

    def as_dict(self):
        return {"right_action": self.right_action, "left_action": self.left_action,
                "inner_A": self.inner_A, "inner_B": self.inner_B}


def equivariance_residual(w, f: GridFunction, g: GridFunction, E: LatticeEmbedding,
                          W: InnerProductWindow = InnerProductWindow(3), K: float = 1.0) -> EquivarianceReport:
    """Residuals of (a) H(f.U_l) = (Hf).U_{Wl}, (b) H(V_l f) = V_{W^-t l}(Hf),
    (c) <Hf,Hg>_A(l) = <f,g>_A(W^-1 l), (d) <Hf,Hg>_B(l) = <f,g>_B(W^t l),
    over |l|_inf <= W.radius.  (a), (b) are relative to ||f||."""
    if isinstance(w, int):
        w = word_decompose(FINITE_ORDER[w])
    A = w.matrix()
    Ainv, Ait, At = A.inv(), A.inv_T(), A.T()
    pts = _window_points(W.radius)
    Hf, Hg = weyl_word(w, f), weyl_word(w, g)
    nf = f.norm()
    ra = max((weyl_word(w, act_right(f, l, E)) - act_right(Hf, A.apply(l), E)).norm() for l in pts) / nf
    rb = max((weyl_word(w, act_left(l, f, E)) - act_left(Ait.apply(l), Hf, E)).norm() for l in pts) / nf
    rc = max(abs(inner_A_coefficient(Hf, Hg, l, E) - inner_A_coefficient(f, g, Ainv.apply(l), E)) for l in pts)
    rd = max(abs(inner_B_coefficient(Hf, Hg, l, E, K) - inner_B_coefficient(f, g, At.apply(l), E, K)) for l in pts)
    return EquivarianceReport(ra, rb, rc, rd)


# ---------------------------------------------------------------------------
# dump format


def dump_algebra_element(a: AlgebraElement) -> str:
    lines = []
    for l in a.support:
        z = a.coefficient(l)
        lines.append(f"{l[0]} {l[1]} {z.real!r} {z.imag!r}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_algebra_dump(text: str, theta) -> AlgebraElement:
    coeffs = {}
    for ln in text.splitlines():
        if ln.strip():
            a, b, re, im = ln.split()
            coeffs[(int(a), int(b))] = complex(float(re), float(im))
    return AlgebraElement(theta, coeffs)

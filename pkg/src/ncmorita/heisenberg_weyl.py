"""Sampled functions on R x Z_c, the Heisenberg-Weyl representation and
the Weyl operators built from a scaled Fourier transform and a chirp.

Sample (j, q) of a :class:`GridFunction` sits at the point (-L + j*delta, q).
Sums over Z_c carry the self-dual weight c**-0.5, so the finite Fourier
transform with kernel e(qm/c) is unitary.  ``e(t)`` means exp(2 pi i t).

Phases whose argument is an exact rational times an integer are reduced
modulo 1 in integer arithmetic before exponentiating, which keeps samplewise
comparisons at the 1e-15 level even for large arguments.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real

import numpy as np

from .errors import (
    BoundaryDecay,
    BoundaryOverflow,
    OffGridTranslation,
    OrderMismatch,
    PoleError,
    SpecMismatch,
)
from .exact import IDENTITY, GeneratorWord, L as L_MAT, QMat, as_rational

TWO_PI = 2.0 * math.pi
BOUNDARY_TOL = 1e-10  # relative mass allowed to leave the window
EDGE_TOL = 1e-12


def e_const(t) -> complex:
    t = as_rational(t) % 1
    return complex(np.exp(1j * TWO_PI * float(t)))


def e_frac(coef, n: np.ndarray) -> np.ndarray:
    """e(coef * n) for an exact rational coef and an integer array n."""
    coef = as_rational(coef)
    num, den = coef.numerator, coef.denominator
    n = np.asarray(n)
    bound = int(np.max(np.abs(n))) * abs(num) if n.size else 0
    if bound < 2**62:
        r = (n.astype(np.int64) * num) % den
    else:
        r = np.vectorize(lambda v: (int(v) * num) % den, otypes=[object])(n).astype(float)
    return np.exp(1j * TWO_PI * (r / den))


# ---------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class GridSpec:
    theta: Fraction
    c: int
    m: int = 8
    N: int = 2048

    def __post_init__(self):
        theta = as_rational(self.theta)
        object.__setattr__(self, "theta", theta)
        if self.c < 1 or self.m < 1:
            raise ValueError("c and m must be positive")
        if self.N < 2 or self.N % 2:
            raise ValueError("N must be a positive even integer")
        if self.c * theta + 1 == 0:
            raise PoleError(f"c*theta + 1 = 0 for theta = {theta}, c = {self.c}")
        # both translation lengths must land on the grid
        assert (self.theta_tilde / self.delta).denominator == 1
        assert (Fraction(1, self.c) / self.delta).denominator == 1

    @property
    def q(self) -> int:
        return self.theta.denominator

    @property
    def p(self) -> int:
        return self.theta.numerator

    @property
    def theta_tilde(self) -> Fraction:
        return (self.c * self.theta + 1) / self.c

    @property
    def delta(self) -> Fraction:
        return Fraction(1, self.c * self.q * self.m)

    @property
    def L(self) -> Fraction:
        return self.N * self.delta / 2

    @property
    def offsets(self) -> np.ndarray:
        """Integer n_j = j - N/2, so the sample point is n_j * delta."""
        return np.arange(self.N, dtype=np.int64) - self.N // 2

    @property
    def points(self) -> np.ndarray:
        return self.offsets * float(self.delta)

    def weight(self) -> float:
        return float(self.delta) * self.c ** -0.5


class GridFunction:
    """Immutable N x c complex samples on a :class:`GridSpec`."""

    __slots__ = ("spec", "samples")

    def __init__(self, spec: GridSpec, samples):
        arr = np.array(samples, dtype=complex)
        if arr.shape != (spec.N, spec.c):
            raise ValueError(f"samples must have shape {(spec.N, spec.c)}, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "samples", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    @property
    def edge(self) -> float:
        s = self.samples
        return float(max(np.abs(s[0]).max(), np.abs(s[-1]).max()))

    def edge_ratio(self) -> float:
        top = float(np.abs(self.samples).max())
        return self.edge / top if top else 0.0

    def inner(self, other: "GridFunction") -> complex:
        """<f, g> = delta c^-1/2 sum f conj(g), linear in the first slot."""
        _same_spec(self, other)
        return complex(np.vdot(other.samples, self.samples)) * self.spec.weight()

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))

    def _new(self, samples) -> "GridFunction":
        return GridFunction(self.spec, samples)

    def __add__(self, o):
        _same_spec(self, o)
        return self._new(self.samples + o.samples)

    def __sub__(self, o):
        _same_spec(self, o)
        return self._new(self.samples - o.samples)

    def __mul__(self, s):
        return self._new(self.samples * s)

    __rmul__ = __mul__

    def max_abs_diff(self, o: "GridFunction") -> float:
        _same_spec(self, o)
        return float(np.abs(self.samples - o.samples).max())

    def dump(self) -> str:
        return dump_grid_function(self)


def _same_spec(f, g):
    if f.spec != g.spec:
        raise SpecMismatch(f"grid specs differ: {f.spec} vs {g.spec}")


def dump_grid_function(f: GridFunction) -> str:
    s = f.spec
    lines = [f"# {s.N} {s.c} {s.delta} {s.L}"]
    for j in range(s.N):
        for q in range(s.c):
            v = f.samples[j, q]
            lines.append(f"{j} {q} {float(v.real)!r} {float(v.imag)!r}")
    return "\n".join(lines) + "\n"


def parse_grid_dump(text: str):
    """Return (N, c, delta, L, samples) from :func:`dump_grid_function` text."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    head = lines[0].lstrip("#").split()
    N, c = int(head[0]), int(head[1])
    delta, L = Fraction(head[2]), Fraction(head[3])
    samples = np.zeros((N, c), dtype=complex)
    for ln in lines[1:]:
        j, q, re, im = ln.split()
        samples[int(j), int(q)] = complex(float(re), float(im))
    return N, c, delta, L, samples


def make_gaussian(
    spec: GridSpec,
    center=(0, None),
    width: float = 1.0,
    modulation=(0.0, 0),
    discrete_width: float = 1.0,
) -> GridFunction:
    """Normalized exp(-pi((p - x0)/w)^2) e(p y0) times a profile on Z_c.

    ``center = (x0, k0)``.  With ``k0 = None`` the Z_c profile is flat;
    otherwise it is a cyclic Gaussian around k0.  ``modulation = (y0, l0)``
    multiplies by e(p y0) e(q l0 / c).
    """
    x0, k0 = center
    y0, l0 = modulation
    if abs(float(x0)) >= float(spec.L):
        raise ValueError("Gaussian centre lies outside the grid")
    p = spec.points
    cont = np.exp(-math.pi * ((p - float(x0)) / width) ** 2)
    if y0:
        cont = cont * _modulation(spec, y0)
    q = np.arange(spec.c)
    if k0 is None:
        disc = np.ones(spec.c, dtype=complex)
    else:
        d = np.minimum((q - k0) % spec.c, (k0 - q) % spec.c)
        disc = np.exp(-math.pi * (d / discrete_width) ** 2).astype(complex)
    disc = disc * e_frac(Fraction(int(l0), spec.c), q)
    f = GridFunction(spec, np.outer(cont, disc))
    f = f * (1.0 / f.norm())
    if f.edge > EDGE_TOL:
        warnings.warn(f"Gaussian edge magnitude {f.edge:.3g} exceeds {EDGE_TOL}", BoundaryDecay, stacklevel=2)
    return f


def _modulation(spec: GridSpec, y) -> np.ndarray:
    if isinstance(y, (int, Fraction)):
        return e_frac(spec.delta * as_rational(y), spec.offsets)
    return np.exp(1j * TWO_PI * spec.points * float(y))


def gaussian_family(spec: GridSpec, size: int = 10, seed: int = 0) -> list[GridFunction]:
    """Random Gaussians used as a test family; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        x0 = float(rng.uniform(-0.5, 0.5))
        w = float(rng.uniform(0.8, 1.25))
        y0 = float(rng.uniform(-0.5, 0.5))
        k0 = int(rng.integers(0, spec.c))
        l0 = int(rng.integers(0, spec.c))
        out.append(make_gaussian(spec, (x0, k0), w, (y0, l0)))
    return out


# ---------------------------------------------------------------------------
# phase-space points and the representation


@dataclass(frozen=True)
class PhaseSpacePoint:
    """(x, y, k, l) in R x R^ x Z_c x Z_c^; k and l are integer lifts."""

    x: Real = Fraction(0)
    y: Real = Fraction(0)
    k: int = 0
    l: int = 0

    def __post_init__(self):
        for name in ("x", "y"):
            v = getattr(self, name)
            if isinstance(v, int):
                object.__setattr__(self, name, Fraction(v))
        for name in ("k", "l"):
            v = getattr(self, name)
            if isinstance(v, Fraction):
                if v.denominator != 1:
                    raise ValueError(f"{name} must be an integer lift, got {v}")
                v = int(v)
            if not isinstance(v, (int, np.integer)):
                raise TypeError(f"{name} must be an integer lift, got {v!r}")
            object.__setattr__(self, name, int(v))

    def __neg__(self):
        return PhaseSpacePoint(-self.x, -self.y, -self.k, -self.l)

    def __add__(self, o):
        return PhaseSpacePoint(self.x + o.x, self.y + o.y, self.k + o.k, self.l + o.l)

    def as_tuple(self):
        return (self.x, self.y, self.k, self.l)

    def shift_index(self, spec: GridSpec) -> int:
        x = self.x
        if isinstance(x, Fraction):
            s = x / spec.delta
            if s.denominator != 1:
                raise OffGridTranslation(f"x = {x} is not a multiple of delta = {spec.delta}")
            return int(s)
        s = float(x) / float(spec.delta)
        if abs(s - round(s)) > 1e-9:
            raise OffGridTranslation(f"x = {x} is not a multiple of delta = {spec.delta}")
        return int(round(s))


def apply_mat4(M: QMat, g: PhaseSpacePoint) -> PhaseSpacePoint:
    x, y, k, l = M.apply([as_rational(v) for v in g.as_tuple()])
    if k.denominator != 1 or l.denominator != 1:
        raise ValueError(f"matrix does not preserve the integer lifts: ({k}, {l})")
    return PhaseSpacePoint(x, y, int(k), int(l))


def _continuous_phase(spec: GridSpec, g: PhaseSpacePoint, s: int) -> np.ndarray:
    # e(p y - x y / 2)
    x = s * spec.delta
    if isinstance(g.y, Fraction):
        return e_frac(spec.delta * g.y, spec.offsets) * e_const(-x * g.y / 2)
    y = float(g.y)
    return np.exp(1j * TWO_PI * (spec.points * y - float(x) * y / 2))


def _discrete_phase(spec: GridSpec, k: int, l: int) -> np.ndarray:
    # e(q l / c - k l / 2c) with q the canonical lift
    q = np.arange(spec.c)
    return e_frac(Fraction(l, spec.c), q) * e_const(Fraction(-k * l, 2 * spec.c))


def shift_samples(arr: np.ndarray, s: int, k: int, c: int, tol: float = BOUNDARY_TOL) -> np.ndarray:
    """out[..., j, q] = arr[..., j - s, (q - k) mod c], zero filled.

    Raises BoundaryOverflow if samples carrying more than ``tol`` of the
    peak magnitude would be pushed out of the window.
    """
    N = arr.shape[-2]
    out = np.zeros_like(arr)
    if abs(s) >= N:
        lost = arr
    elif s >= 0:
        out[..., s:, :] = arr[..., : N - s, :]
        lost = arr[..., N - s:, :]
    else:
        out[..., : N + s, :] = arr[..., -s:, :]
        lost = arr[..., : -s, :]
    if lost.size:
        top = np.abs(arr).max()
        drop = np.abs(lost).max()
        if top and drop > tol * top:
            raise BoundaryOverflow(f"shift by {s} samples drops mass {drop:.3g} (peak {top:.3g})")
    idx = (np.arange(c) - k) % c
    return out[..., idx]


def _hw_array(g: PhaseSpacePoint, spec: GridSpec, arr: np.ndarray) -> np.ndarray:
    s = g.shift_index(spec)
    shifted = shift_samples(arr, s, g.k, spec.c)
    phase = np.outer(_continuous_phase(spec, g, s), _discrete_phase(spec, g.k, g.l))
    return shifted * phase


def hw_apply(g: PhaseSpacePoint, f: GridFunction) -> GridFunction:
    """pi(x,y,k,l) f(p,q) = e(py - xy/2) e(ql/c - kl/2c) f(p - x, q - k)."""
    return GridFunction(f.spec, _hw_array(g, f.spec, f.samples))


def hw_adjoint(g: PhaseSpacePoint, f: GridFunction) -> GridFunction:
    return hw_apply(-g, f)


# ---------------------------------------------------------------------------
# Weyl operators


@functools.lru_cache(maxsize=4)
def _fourier_kernels(spec: GridSpec):
    tt = spec.theta_tilde
    if tt <= 0:
        raise ValueError(f"the scaled transform needs theta_tilde > 0, got {tt}")
    n = spec.offsets
    # e(-p z / tt) with p = n delta, z = n' delta
    K = e_frac(-spec.delta * spec.delta / tt, np.multiply.outer(n, n))
    K *= float(spec.delta) / math.sqrt(float(tt))
    q = np.arange(spec.c)
    D = e_frac(Fraction(1, spec.c), np.multiply.outer(q, q)) / math.sqrt(spec.c)
    for a in (K, D):
        a.setflags(write=False)
    return K, D


def _chirp(spec: GridSpec, power: int) -> np.ndarray:
    # (e(z^2 / 2tt) e(-m^2 / 2c))^power, m the canonical lift
    n = spec.offsets
    q = np.arange(spec.c)
    cont = e_frac(power * spec.delta * spec.delta / (2 * spec.theta_tilde), n * n)
    disc = e_frac(Fraction(-power, 2 * spec.c), q * q)
    return np.outer(cont, disc)


def _check_decay(arr: np.ndarray, tol: float = BOUNDARY_TOL):
    top = np.abs(arr).max()
    edge = max(np.abs(arr[..., 0, :]).max(), np.abs(arr[..., -1, :]).max())
    if top and edge > tol * top:
        raise BoundaryOverflow(f"input does not decay inside the window (edge/peak = {edge / top:.3g})")


def _weyl_J0_array(spec: GridSpec, arr: np.ndarray, inverse: bool) -> np.ndarray:
    _check_decay(arr)
    K, D = _fourier_kernels(spec)
    if inverse:
        K, D = K.conj(), D.conj()
    return K @ arr @ D.T


def weyl_J0(f: GridFunction, inverse: bool = False) -> GridFunction:
    """Quadrature for tt^-1/2 int e(-pz/tt) e(qm/c) f(p, q) dp dq."""
    return GridFunction(f.spec, _weyl_J0_array(f.spec, f.samples, inverse))


def weyl_P(f: GridFunction, inverse: bool = False) -> GridFunction:
    return GridFunction(f.spec, f.samples * _chirp(f.spec, -1 if inverse else 1))


def _weyl_word_array(w: GeneratorWord, spec: GridSpec, arr: np.ndarray) -> np.ndarray:
    # H_A = H_W1 o ... o H_Wn: the rightmost token acts first
    for base, e in reversed(w.runs):
        if base == "P":
            arr = arr * _chirp(spec, e)
        else:
            for _ in range(abs(e)):
                arr = _weyl_J0_array(spec, arr, inverse=e < 0)
    return arr


def weyl_word(w: GeneratorWord, f: GridFunction) -> GridFunction:
    return GridFunction(f.spec, _weyl_word_array(w, f.spec, f.samples))


def j_form(c: int) -> QMat:
    r = Fraction(1, c)
    return QMat(((0, 1, 0, 0), (-1, 0, 0, 0), (0, 0, 0, r), (0, 0, -r, 0)))


def build_MA(w, theta, c: int) -> QMat:
    """diag(T1 A T1^-1, L A L^-1) for A the product of the word."""
    A = w.matrix() if isinstance(w, GeneratorWord) else w
    tt = (c * as_rational(theta) + 1) / c
    T1 = QMat(((tt, 0), (0, 1)))
    Lq = QMat.from_int(L_MAT)
    Aq = QMat.from_int(A)
    return QMat.block_diag(T1 @ Aq @ T1.inv(), Lq @ Aq @ Lq.inv())


def generator_MA(token: str, theta, c: int) -> QMat:
    """The displayed per-generator matrices, written out entry by entry."""
    tt = (c * as_rational(theta) + 1) / c
    if token == "J0":
        return QMat(((0, tt, 0, 0), (-1 / tt, 0, 0, 0), (0, 0, 0, -1), (0, 0, 1, 0)))
    if token == "P":
        return QMat(((1, 0, 0, 0), (1 / tt, 1, 0, 0), (0, 0, 1, 0), (0, 0, -1, 1)))
    if token == "J0inv":
        return QMat(((0, -tt, 0, 0), (1 / tt, 0, 0, 0), (0, 0, 0, 1), (0, 0, -1, 0)))
    if token == "Pinv":
        return QMat(((1, 0, 0, 0), (-1 / tt, 1, 0, 0), (0, 0, 1, 0), (0, 0, 1, 1)))
    raise ValueError(f"unknown token {token!r}")


def covariance_residual(w: GeneratorWord, g: PhaseSpacePoint, f: GridFunction) -> float:
    """||H_A pi(g) f - pi(M_A g) H_A f|| / ||f||."""
    return covariance_residuals(w, [g], f)[0]


def covariance_residuals(w: GeneratorWord, gs, f: GridFunction) -> list[float]:
    """Batched :func:`covariance_residual` over several points g."""
    spec = f.spec
    if len(w) == 0:
        return [0.0 for _ in gs]
    M = build_MA(w, spec.theta, spec.c)
    images = [apply_mat4(M, g) for g in gs]
    for g in list(gs) + images:
        g.shift_index(spec)
    Hf = _weyl_word_array(w, spec, f.samples)
    moved = np.stack([_hw_array(g, spec, f.samples) for g in gs])
    lhs = _weyl_word_array(w, spec, moved)
    rhs = np.stack([_hw_array(h, spec, Hf) for h in images])
    nf = f.norm()
    diff = lhs - rhs
    w8 = spec.weight()
    return [math.sqrt(float(np.vdot(d, d).real) * w8) / nf for d in diff]


@dataclass
class OrderPhase:
    lam: complex
    spread: float
    lambdas: list = field(default_factory=list)
    parallel_residual: float = 0.0

    def __iter__(self):
        return iter((self.lam, self.spread))


def order_phase(w: GeneratorWord, i: int, family, tol: float = 1e-6) -> OrderPhase:
    """lambda_f = <H^i f, f>/||f||^2 for each f; mean and max deviation.

    With the inner product linear in its first slot this is the eigenvalue
    itself when H^i f = lambda f.
    """
    if w.matrix() ** i != IDENTITY:
        raise OrderMismatch(f"word matrix {w.matrix()} does not have order dividing {i}")
    lams, worst = [], 0.0
    for f in family:
        h = f
        for _ in range(i):
            h = weyl_word(w, h)
        n2 = f.inner(f).real
        lam = h.inner(f) / n2
        worst = max(worst, (h - f * lam).norm() / math.sqrt(n2))
        lams.append(lam)
    if worst > tol:
        raise OrderMismatch(f"H^{i} f is not parallel to f (residual {worst:.3g} > {tol:g})", residual=worst)
    mean = complex(np.mean(lams))
    spread = float(max(abs(l - mean) for l in lams))
    return OrderPhase(mean, spread, lams, worst)


# ---------------------------------------------------------------------------
# short-time Fourier transform


@dataclass
class STFT:
    """Values V[ix, iy, k, l] at x = shifts[ix]*delta, y = freqs[iy]/(N delta)."""

    spec: GridSpec
    shifts: np.ndarray
    freqs: np.ndarray
    values: np.ndarray
    x_stride: int

    @property
    def cell(self) -> float:
        s = self.spec
        return float(s.delta) * self.x_stride * (1.0 / (s.N * float(s.delta))) / s.c

    def inner(self, other: "STFT") -> complex:
        return complex(np.vdot(other.values, self.values)) * self.cell

    def norm(self) -> float:
        return math.sqrt(self.inner(self).real)

    def at(self, s: int, n: int, k: int, l: int) -> complex:
        ix = int(np.searchsorted(self.shifts, s))
        if ix >= len(self.shifts) or self.shifts[ix] != s:
            raise KeyError(f"shift {s} not sampled (stride {self.x_stride})")
        return complex(self.values[ix, n + self.spec.N // 2, k % self.spec.c, l % self.spec.c])


def stft(g: GridFunction, f: GridFunction, x_stride: int = 16) -> STFT:
    """V_g f as F_2 applied to T_a(f (x) conj g).

    T_a(f (x) conj g)(x, p, k, q) = f(p, q) conj g(p - x, q - k); F_2 is the
    Fourier transform in (p, q).  Only every ``x_stride``-th translation is
    sampled; frequencies cover the full dual grid.
    """
    _same_spec(f, g)
    spec = f.spec
    N, c = spec.N, spec.c
    if N % x_stride:
        raise ValueError("x_stride must divide N")
    shifts = np.arange(-N // 2, N // 2, x_stride)
    gidx = (np.arange(c)[None, :] - np.arange(c)[:, None]) % c  # [k, q] -> q - k
    ta = np.empty((len(shifts), N, c, c), dtype=complex)
    for ix, s in enumerate(shifts):
        gs = shift_samples(g.samples, int(s), 0, c, tol=np.inf)
        ta[ix] = f.samples[:, None, :] * np.conj(gs[:, gidx])
    # sum_j e(-(j - N/2) n / N) = (-1)^n * fft
    out = np.fft.fft(ta, axis=1)
    out = np.fft.fft(out, axis=3)
    n = np.arange(N)
    sign = np.where((n - (n >= N // 2) * N) % 2 == 0, 1.0, -1.0)
    out *= sign[None, :, None, None] * float(spec.delta) / math.sqrt(c)
    out = np.fft.fftshift(out, axes=1)
    freqs = np.arange(-N // 2, N // 2)
    return STFT(spec, shifts, freqs, out, x_stride)


def stft_point(g: GridFunction, f: GridFunction, s: int, n: int, k: int, l: int) -> complex:
    """Direct double sum for V_g f at x = s delta, y = n/(N delta)."""
    _same_spec(f, g)
    spec = f.spec
    gs = shift_samples(g.samples, int(s), int(k), spec.c, tol=np.inf)
    prod = f.samples * np.conj(gs)
    ph = np.outer(e_frac(Fraction(-n, spec.N), spec.offsets), e_frac(Fraction(-l, spec.c), np.arange(spec.c)))
    return complex(np.sum(prod * ph)) * spec.weight()


def parseval_check(f1, f2, g1, g2, x_stride: int = 16) -> float:
    for h in (f2, g1, g2):
        _same_spec(f1, h)
    lhs = stft(g1, f1, x_stride).inner(stft(g2, f2, x_stride))
    rhs = f1.inner(f2) * np.conj(g1.inner(g2))
    return abs(lhs - rhs)

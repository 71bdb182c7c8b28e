"""Finitely supported elements of the twisted group algebra of Z^2.

Coefficients are kept as ``(ExactPhase, complex)`` pairs.  Products of
monomials only ever add phases, so commutation relations stay exact; a sum
of two terms with different phases falls back to a plain complex number.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import DetError, ThetaMismatch, WindowOverflow
from .exact import IntMat2, as_rational


@dataclass(frozen=True)
class ExactPhase:
    """The unit complex number exp(pi i t), t kept modulo 2."""

    t: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "t", as_rational(self.t) % 2)

    def __mul__(self, o: "ExactPhase") -> "ExactPhase":
        return ExactPhase(self.t + o.t)

    def conj(self) -> "ExactPhase":
        return ExactPhase(-self.t)

    def __pow__(self, n: int) -> "ExactPhase":
        return ExactPhase(self.t * n)

    def value(self) -> complex:
        t = self.t
        if (2 * t).denominator == 1:  # quarter turns are returned exactly
            return complex((1, 1j, -1, -1j)[int(2 * t)])
        return cmath.exp(1j * math.pi * float(t))

    def __complex__(self):
        return self.value()

    @property
    def is_one(self) -> bool:
        return self.t == 0


ONE = ExactPhase(0)


def cocycle(theta, x, y) -> ExactPhase:
    """omega_theta(x, y) = exp(pi i (x1 theta y2 - x2 theta y1))."""
    theta = as_rational(theta)
    return ExactPhase(theta * (x[0] * y[1] - x[1] * y[0]))


def _add_coef(a, b):
    (pa, za), (pb, zb) = a, b
    if pa == pb:
        return (pa, za + zb)
    return (ONE, za * pa.value() + zb * pb.value())


class AlgebraElement:
    """A finite sum of delta_l, l in Z^2, over a fixed exact theta."""

    __slots__ = ("theta", "_coeffs")

    def __init__(self, theta, coeffs: Mapping | None = None):
        self.theta = as_rational(theta)
        out = {}
        for l, v in (coeffs or {}).items():
            key = (int(l[0]), int(l[1]))
            if isinstance(v, tuple):
                ph, z = v
                if not isinstance(ph, ExactPhase):
                    ph = ExactPhase(ph)
                v = (ph, complex(z))
            else:
                v = (ONE, complex(v))
            out[key] = _add_coef(out[key], v) if key in out else v
        self._coeffs = {l: v for l, v in out.items() if v[1] != 0}

    # construction helpers
    @classmethod
    def delta(cls, theta, l, amplitude=1.0, phase: ExactPhase = ONE) -> "AlgebraElement":
        return cls(theta, {tuple(l): (phase, amplitude)})

    @classmethod
    def zero(cls, theta) -> "AlgebraElement":
        return cls(theta)

    @property
    def support(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self._coeffs))

    def items(self):
        """(l, phase, amplitude) triples in sorted order."""
        for l in self.support:
            ph, z = self._coeffs[l]
            yield l, ph, z

    def exact_phase(self, l) -> ExactPhase | None:
        v = self._coeffs.get(tuple(l))
        return None if v is None else v[0]

    def coefficient(self, l) -> complex:
        v = self._coeffs.get(tuple(l))
        if v is None:
            return 0j
        return v[1] * v[0].value()

    __getitem__ = coefficient

    def to_dict(self) -> dict:
        return {l: self.coefficient(l) for l in self.support}

    def __len__(self):
        return len(self._coeffs)

    def __add__(self, o: "AlgebraElement") -> "AlgebraElement":
        _same_theta(self, o)
        out = dict(self._coeffs)
        for l, v in o._coeffs.items():
            out[l] = _add_coef(out[l], v) if l in out else v
        return AlgebraElement(self.theta, out)

    def __sub__(self, o: "AlgebraElement") -> "AlgebraElement":
        return self + o.scale(-1)

    def scale(self, s: complex) -> "AlgebraElement":
        return AlgebraElement(self.theta, {l: (ph, z * s) for l, (ph, z) in self._coeffs.items()})

    def __mul__(self, o):
        if isinstance(o, AlgebraElement):
            return mul(self, o)
        return self.scale(o)

    def __rmul__(self, s):
        return self.scale(s)

    def l1_norm(self) -> float:
        return sum(abs(z) for _, z in self._coeffs.values())

    def max_abs_diff(self, o: "AlgebraElement", points: Iterable | None = None) -> float:
        pts = set(self.support) | set(o.support) if points is None else points
        return max((abs(self.coefficient(l) - o.coefficient(l)) for l in pts), default=0.0)

    def is_exactly(self, o: "AlgebraElement") -> bool:
        return self.theta == o.theta and self._coeffs == o._coeffs

    def __repr__(self):
        terms = ", ".join(f"{l}: {self.coefficient(l):.6g}" for l in self.support[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"AlgebraElement(theta={self.theta}, {{{terms}{more}}})"


def _same_theta(f, g):
    if f.theta != g.theta:
        raise ThetaMismatch(f"theta {f.theta} != {g.theta}")


def mul(f: AlgebraElement, g: AlgebraElement) -> AlgebraElement:
    """Twisted convolution (f*g)(x) = sum_y f(y) g(x-y) omega(y, x-y)."""
    _same_theta(f, g)
    out: dict = {}
    for y, (py, zy) in f._coeffs.items():
        for z, (pz, zz) in g._coeffs.items():
            x = (y[0] + z[0], y[1] + z[1])
            v = (py * pz * cocycle(f.theta, y, z), zy * zz)
            out[x] = _add_coef(out[x], v) if x in out else v
    return AlgebraElement(f.theta, out)


def star(f: AlgebraElement) -> AlgebraElement:
    """f*(x) = conj(omega(x, -x) f(-x)); the cocycle factor is 1 on Z^2."""
    out = {}
    for l, (ph, z) in f._coeffs.items():
        w = cocycle(f.theta, (-l[0], -l[1]), l)
        out[(-l[0], -l[1])] = ((ph * w).conj(), z.conjugate())
    return AlgebraElement(f.theta, out)


def act(A: IntMat2, f: AlgebraElement) -> AlgebraElement:
    """(A.f)(l) = f(A^{-1} l), so delta_l goes to delta_{Al}."""
    if A.det() != 1:
        raise DetError(f"the action needs det 1, got {A.det()}")
    return AlgebraElement(f.theta, {A.apply(l): v for l, v in f._coeffs.items()})


def reindex(f: AlgebraElement, B: IntMat2) -> AlgebraElement:
    """l -> f(B l); used for the automorphisms acting on inner products."""
    Binv = B.inv()
    return AlgebraElement(f.theta, {Binv.apply(l): v for l, v in f._coeffs.items()})


class WindowVector:
    """A complex vector on the square window |l|_inf <= radius of Z^2."""

    __slots__ = ("radius", "values")

    def __init__(self, radius: int, values=None):
        self.radius = int(radius)
        n = 2 * self.radius + 1
        if values is None:
            values = np.zeros((n, n), dtype=complex)
        values = np.array(values, dtype=complex)
        if values.shape != (n, n):
            raise ValueError(f"expected shape {(n, n)}, got {values.shape}")
        values.setflags(write=False)
        self.values = values

    @classmethod
    def point(cls, radius, l, amplitude=1.0) -> "WindowVector":
        v = np.zeros((2 * radius + 1,) * 2, dtype=complex)
        v[l[0] + radius, l[1] + radius] = amplitude
        return cls(radius, v)

    def __getitem__(self, l) -> complex:
        R = self.radius
        if max(abs(l[0]), abs(l[1])) > R:
            return 0j
        return complex(self.values[l[0] + R, l[1] + R])

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))


def _translate(theta, x, xi: WindowVector) -> np.ndarray:
    # (L(x) xi)(y) = omega(x, y - x) xi(y - x)
    R = xi.radius
    out = np.zeros_like(xi.values)
    nz = np.argwhere(xi.values != 0)
    for i, j in nz:
        src = (int(i) - R, int(j) - R)
        y = (src[0] + x[0], src[1] + x[1])
        if max(abs(y[0]), abs(y[1])) > R:
            raise WindowOverflow(f"translation by {x} moves {src} outside the radius-{R} window")
        out[y[0] + R, y[1] + R] += cocycle(theta, x, src).value() * xi.values[i, j]
    return out


def left_regular(theta, x, xi: WindowVector) -> WindowVector:
    return WindowVector(xi.radius, _translate(as_rational(theta), x, xi))


def regular_rep_apply(f: AlgebraElement, xi: WindowVector) -> WindowVector:
    """Apply sum_x f(x) L(x) to xi; leaving the window raises WindowOverflow."""
    out = np.zeros_like(xi.values)
    for x in f.support:
        out += f.coefficient(x) * _translate(f.theta, x, xi)
    return WindowVector(xi.radius, out)

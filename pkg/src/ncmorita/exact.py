"""Exact integer, rational and 2x2 integer-matrix arithmetic.

Rationals are plain :class:`fractions.Fraction` values.  Quadratic
irrationals ``(a + b*sqrt(d))/e`` are kept symbolically so that orbit
questions never depend on floating point.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DetError, NotQuadraticError, PoleError

Rational = Fraction


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact rational: {x!r}")


# ---------------------------------------------------------------------------
# Quadratic irrationals


def _squarefree_split(n: int) -> tuple[int, int]:
    """Return (s, r) with n = s*s*r and r squarefree."""
    s, r = 1, n
    f = 2
    while f * f <= r:
        while r % (f * f) == 0:
            r //= f * f
            s *= f
        f += 1
    return s, r


@dataclass(frozen=True)
class QuadIrrational:
    """The real number (a + b*sqrt(d)) / e in canonical form."""

    a: int
    b: int
    d: int
    e: int

    def __post_init__(self):
        a, b, d, e = self.a, self.b, self.d, self.e
        if not all(isinstance(v, int) for v in (a, b, d, e)):
            raise TypeError("QuadIrrational entries must be integers")
        if e == 0:
            raise PoleError("zero denominator")
        if d < 2:
            raise NotQuadraticError(f"sqrt({d}) is rational")
        s, d0 = _squarefree_split(d)
        if d0 == 1:
            raise NotQuadraticError(f"sqrt({d}) is rational")
        if b == 0:
            raise NotQuadraticError("b = 0 gives a rational value")
        b *= s
        if e < 0:
            a, b, e = -a, -b, -e
        g = math.gcd(math.gcd(a, b), e)
        object.__setattr__(self, "a", a // g)
        object.__setattr__(self, "b", b // g)
        object.__setattr__(self, "d", d0)
        object.__setattr__(self, "e", e // g)

    @classmethod
    def sqrt(cls, d: int) -> "QuadIrrational":
        return cls(0, 1, d, 1)

    def __float__(self):
        return (self.a + self.b * math.sqrt(self.d)) / self.e

    def floor(self) -> int:
        # b*sqrt(d) = sign(b) * sqrt(b^2 d), and sqrt(n) is never an integer here
        n = self.b * self.b * self.d
        r = math.isqrt(n)
        u = self.a + r if self.b > 0 else self.a - r - 1
        return u // self.e

    def __add__(self, n):
        if isinstance(n, int):
            return QuadIrrational(self.a + n * self.e, self.b, self.d, self.e)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, n):
        if isinstance(n, int):
            return self + (-n)
        return NotImplemented

    def __neg__(self):
        return QuadIrrational(-self.a, -self.b, self.d, self.e)

    def reciprocal(self) -> "QuadIrrational":
        # e/(a + b sqrt d) = e(a - b sqrt d)/(a^2 - b^2 d)
        den = self.a * self.a - self.b * self.b * self.d
        return QuadIrrational(self.e * self.a, -self.e * self.b, self.d, den)

    def __str__(self):
        return f"({self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}√{self.d})/{self.e}"


_QUAD_RE = re.compile(
    r"^\(\s*([+-]?\d+)\s*([+-])\s*(\d+)\s*(?:√|sqrt)\s*\(?\s*(\d+)\s*\)?\s*\)\s*/\s*(\d+)$"
)


def parse_theta(text: str):
    """Parse ``"p/q"``, an integer, or ``"(a+b√d)/e"`` (``sqrt`` also accepted)."""
    s = text.strip()
    m = _QUAD_RE.match(s)
    if m:
        a, sign, b, d, e = m.groups()
        bb = int(b) if sign == "+" else -int(b)
        return QuadIrrational(int(a), bb, int(d), int(e))
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse theta {text!r}: expected p/q or (a+b√d)/e") from exc


def format_theta(t) -> str:
    if isinstance(t, QuadIrrational):
        return str(t)
    t = as_rational(t)
    return f"{t.numerator}/{t.denominator}"


# ---------------------------------------------------------------------------
# Integer 2x2 matrices


@dataclass(frozen=True)
class IntMat2:
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def from_rows(cls, rows) -> "IntMat2":
        (a, b), (c, d) = rows
        return cls(int(a), int(b), int(c), int(d))

    def rows(self):
        return ((self.a, self.b), (self.c, self.d))

    def tolist(self):
        return [[self.a, self.b], [self.c, self.d]]

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def trace(self) -> int:
        return self.a + self.d

    def is_sl(self) -> bool:
        return self.det() == 1

    def is_gl(self) -> bool:
        return abs(self.det()) == 1

    def __matmul__(self, o: "IntMat2") -> "IntMat2":
        if not isinstance(o, IntMat2):
            return NotImplemented
        return IntMat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self):
        return IntMat2(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, o: "IntMat2") -> "IntMat2":
        return IntMat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def inv(self) -> "IntMat2":
        det = self.det()
        if abs(det) != 1:
            raise DetError(f"matrix with determinant {det} is not unimodular")
        return IntMat2(det * self.d, -det * self.b, -det * self.c, det * self.a)

    def T(self) -> "IntMat2":
        return IntMat2(self.a, self.c, self.b, self.d)

    def inv_T(self) -> "IntMat2":
        return self.inv().T()

    def __pow__(self, n: int) -> "IntMat2":
        base = self if n >= 0 else self.inv()
        n = abs(n)
        out = IDENTITY
        while n:
            if n & 1:
                out = out @ base
            base = base @ base
            n >>= 1
        return out

    def apply(self, v):
        x, y = v
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def __str__(self):
        return f"[{self.a},{self.b};{self.c},{self.d}]"


IDENTITY = IntMat2(1, 0, 0, 1)
J0 = IntMat2(0, 1, -1, 0)
P = IntMat2(1, 0, 1, 1)
L = IntMat2(-1, 0, 0, 1)
W2 = IntMat2(-1, 0, 0, -1)
W3 = IntMat2(0, 1, -1, -1)
W4 = IntMat2(0, 1, -1, 0)
W6 = IntMat2(1, 1, -1, 0)
FINITE_ORDER = {2: W2, 3: W3, 4: W4, 6: W6}


def parse_intmat2(text: str) -> IntMat2:
    """Parse ``[a,b;c,d]``."""
    m = re.fullmatch(r"\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*;\s*(-?\d+)\s*,\s*(-?\d+)\s*\]\s*", text)
    if not m:
        raise ValueError(f"cannot parse matrix {text!r}: expected [a,b;c,d]")
    return IntMat2(*(int(v) for v in m.groups()))


# ---------------------------------------------------------------------------
# Generator words

TOKENS = ("J0", "J0inv", "P", "Pinv")
_TOKEN_MATRIX = {"J0": J0, "J0inv": J0.inv(), "P": P, "Pinv": P.inv()}
_BASE = {"J0": ("J0", 1), "J0inv": ("J0", -1), "P": ("P", 1), "Pinv": ("P", -1)}


def token_matrix(tok: str) -> IntMat2:
    return _TOKEN_MATRIX[tok]


class GeneratorWord:
    """A word over {J0, J0inv, P, Pinv}, stored run-length encoded.

    Runs are ``(base, exponent)`` with base in {"J0", "P"} and a nonzero
    exponent; adjacent runs with the same base are merged so that
    ``J0 J0inv`` cancels.  ``tokens`` expands the word.
    """

    __slots__ = ("_runs",)

    def __init__(self, tokens: Iterable[str] = ()):
        runs: list[list] = []
        for tok in tokens:
            if tok not in _BASE:
                raise ValueError(f"unknown generator token {tok!r}")
            base, e = _BASE[tok]
            _push(runs, base, e)
        self._runs = tuple((b, e) for b, e in runs)

    @classmethod
    def from_runs(cls, runs: Iterable[tuple[str, int]]) -> "GeneratorWord":
        out: list[list] = []
        for base, e in runs:
            if base not in ("J0", "P"):
                raise ValueError(f"unknown generator base {base!r}")
            _push(out, base, int(e))
        w = cls()
        w._runs = tuple((b, e) for b, e in out)
        return w

    @classmethod
    def parse(cls, text: str) -> "GeneratorWord":
        toks = [t for t in re.split(r"[\s,]+", text.strip()) if t]
        return cls(toks)

    @property
    def runs(self) -> tuple[tuple[str, int], ...]:
        return self._runs

    @property
    def tokens(self) -> tuple[str, ...]:
        out = []
        for base, e in self._runs:
            tok = base if e > 0 else base + "inv"
            out.extend([tok] * abs(e))
        return tuple(out)

    def __len__(self):
        return sum(abs(e) for _, e in self._runs)

    def __iter__(self):
        return iter(self.tokens)

    def __eq__(self, other):
        return isinstance(other, GeneratorWord) and self._runs == other._runs

    def __hash__(self):
        return hash(self._runs)

    def __repr__(self):
        return f"GeneratorWord({list(self.tokens)!r})" if len(self) <= 16 else f"GeneratorWord(runs={self._runs!r})"

    def __matmul__(self, other: "GeneratorWord") -> "GeneratorWord":
        return GeneratorWord.from_runs(self._runs + other._runs)

    def inverse(self) -> "GeneratorWord":
        return GeneratorWord.from_runs((b, -e) for b, e in reversed(self._runs))

    def matrix(self) -> IntMat2:
        out = IDENTITY
        for base, e in self._runs:
            out = out @ (_TOKEN_MATRIX[base] ** e)
        return out


def _push(runs, base, e):
    if e == 0:
        return
    if runs and runs[-1][0] == base:
        runs[-1][1] += e
        if runs[-1][1] == 0:
            runs.pop()
    else:
        runs.append([base, e])


def word_decompose(A: IntMat2) -> GeneratorWord:
    """Write A in SL(2,Z) as a word in J0 and P.

    Euclid on the first row with right multiplications: ``A P^k`` adds k
    times the second column to the first, ``A J0^{-1}`` swaps the columns
    with a sign.  The row ends at (±1, 0), leaving ±P^n.
    """
    if A.det() != 1:
        raise DetError(f"word_decompose needs det 1, got {A.det()}")
    M = A
    right: list[tuple[str, int]] = []  # right multipliers, in order applied
    J0inv = J0.inv()
    while M.b != 0:
        q, r = divmod(M.a, M.b)
        if 2 * abs(r) > abs(M.b):  # nearest quotient keeps the run count logarithmic
            q += 1
        k = -q
        if k:
            M = M @ (P ** k)
            right.append(("P", k))
        M = M @ J0inv
        right.append(("J0", -1))
    runs: list[tuple[str, int]] = []
    if M.a == -1:
        M = M @ W2
        right.append(("J0", -2))  # W2 = J0^2 = J0^-2; recorded so the word reads J0 J0
    # now M = P^n with n = M.c
    runs.append(("P", M.c))
    runs.extend((b, -e) for b, e in reversed(right))
    w = GeneratorWord.from_runs(runs)
    assert w.matrix() == A
    return w


# ---------------------------------------------------------------------------
# Continued fractions


@dataclass(frozen=True)
class ContinuedFraction:
    coefficients: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(int(v) for v in self.coefficients)
        if not cs:
            raise ValueError("continued fraction needs at least one coefficient")
        if any(v <= 0 for v in cs[1:]):
            raise ValueError("partial quotients after a0 must be positive")
        object.__setattr__(self, "coefficients", cs)

    @property
    def a0(self) -> int:
        return self.coefficients[0]

    def __str__(self):
        head, *tail = self.coefficients
        return f"[{head}]" if not tail else f"[{head}; {', '.join(map(str, tail))}]"


def cf_expand(r) -> ContinuedFraction:
    """Raw Euclidean expansion; a0 is the floor, so negatives work too."""
    r = as_rational(r)
    p, q = r.numerator, r.denominator
    out = []
    while True:
        a, rem = divmod(p, q)
        out.append(a)
        if rem == 0:
            break
        p, q = q, rem
    return ContinuedFraction(tuple(out))


def cf_eval(cf) -> Fraction:
    coeffs = cf.coefficients if isinstance(cf, ContinuedFraction) else tuple(cf)
    if not coeffs:
        raise ValueError("empty continued fraction")
    val = Fraction(coeffs[-1])
    for a in reversed(coeffs[:-1]):
        val = a + 1 / val
    return val


@dataclass(frozen=True)
class PeriodicCF:
    """Eventually periodic expansion: preperiod then a repeating block."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]


def _quad_key(x: QuadIrrational):
    return (x.a, x.b, x.d, x.e)


def _complete_quotients(x: QuadIrrational, max_steps: int = 100000):
    """Return (quotients, partials, first_repeat_index, period_length)."""
    seen: dict = {}
    quotients = []
    partials = []
    cur = x
    for i in range(max_steps):
        key = _quad_key(cur)
        if key in seen:
            start = seen[key]
            return quotients, partials, start, i - start
        seen[key] = i
        quotients.append(cur)
        a = cur.floor()
        partials.append(a)
        cur = (cur - a).reciprocal()
    raise RuntimeError("continued fraction period not found within step budget")


def quad_cf(x: QuadIrrational) -> PeriodicCF:
    _, partials, start, plen = _complete_quotients(x)
    return PeriodicCF(tuple(partials[:start]), tuple(partials[start:start + plen]))


def _rotations_equal(p1, p2) -> bool:
    if len(p1) != len(p2):
        return False
    doubled = p1 + p1
    return any(doubled[i:i + len(p2)] == p2 for i in range(len(p1)))


def quad_equivalent(x1: QuadIrrational, x2: QuadIrrational) -> bool:
    for x in (x1, x2):
        if not isinstance(x, QuadIrrational):
            raise NotQuadraticError(f"{x!r} is not a quadratic irrational")
    if x1.d != x2.d:
        return False
    return _rotations_equal(quad_cf(x1).period, quad_cf(x2).period)


def _convergent_matrix(partials: Sequence[int]) -> IntMat2:
    out = IDENTITY
    for a in partials:
        out = out @ IntMat2(a, 1, 1, 0)
    return out


def quad_orbit_witness(x1: QuadIrrational, x2: QuadIrrational) -> IntMat2 | None:
    """g in GL(2,Z) with mobius(g, x1) = x2, or None if none exists.

    Both numbers are written as M_i applied to a shared complete quotient.
    """
    q1, p1, s1, n1 = _complete_quotients(x1)
    q2, p2, s2, n2 = _complete_quotients(x2)
    index1 = {_quad_key(t): i for i, t in enumerate(q1)}
    for j, t in enumerate(q2):
        i = index1.get(_quad_key(t))
        if i is not None:
            g = _convergent_matrix(p2[:j]) @ _convergent_matrix(p1[:i]).inv()
            if mobius(g, x1) != x2:
                raise AssertionError("orbit witness failed replay")
            return g
    return None


# ---------------------------------------------------------------------------
# Mobius action and the SO(2,2|Z) embedding


def mobius(g: IntMat2, t):
    if not g.is_gl():
        raise DetError(f"mobius needs det ±1, got {g.det()}")
    if isinstance(t, QuadIrrational):
        a, b, d, e = t.a, t.b, t.d, t.e
        A1, B1 = g.a * a + g.b * e, g.a * b
        A2, B2 = g.c * a + g.d * e, g.c * b
        den = A2 * A2 - B2 * B2 * d
        return QuadIrrational(A1 * A2 - B1 * B2 * d, B1 * A2 - A1 * B2, d, den)
    t = as_rational(t)
    den = g.c * t + g.d
    if den == 0:
        raise PoleError(f"c*theta + d = 0 for g = {g} and theta = {t}")
    return (g.a * t + g.b) / den


def embed_so22(g: IntMat2):
    """4x4 integer block matrix [[aI, B], [C, dI]] as a tuple of rows."""
    if g.det() != 1:
        raise DetError(f"embedding needs det 1, got {g.det()}")
    a, b, c, d = g.a, g.b, g.c, g.d
    return (
        (a, 0, 0, b),
        (0, a, -b, 0),
        (0, -c, d, 0),
        (c, 0, 0, d),
    )


def so22_blocks(M):
    A = ((M[0][0], M[0][1]), (M[1][0], M[1][1]))
    B = ((M[0][2], M[0][3]), (M[1][2], M[1][3]))
    C = ((M[2][0], M[2][1]), (M[3][0], M[3][1]))
    D = ((M[2][2], M[2][3]), (M[3][2], M[3][3]))
    return A, B, C, D


def so22_conditions(M) -> bool:
    """A^tC + C^tA = 0, B^tD + D^tB = 0, A^tD + B^tC = I."""
    A, B, C, D = (QMat(x) for x in so22_blocks(M))
    Z2 = QMat.zeros(2, 2)
    return (
        A.T @ C + C.T @ A == Z2
        and B.T @ D + D.T @ B == Z2
        and A.T @ D + B.T @ C == QMat.identity(2)
    )


def theta_matrix(theta) -> "QMat":
    theta = as_rational(theta)
    return QMat(((0, theta), (-theta, 0)))


def so22_act(M, Theta: "QMat") -> "QMat":
    """(A Theta + B)(C Theta + D)^{-1}."""
    A, B, C, D = (QMat(x) for x in so22_blocks(M))
    return (A @ Theta + B) @ (C @ Theta + D).inv()


# ---------------------------------------------------------------------------
# Smith normal form (2x2)


@dataclass(frozen=True)
class SmithForm:
    U: IntMat2
    V: IntMat2
    D: tuple[int, int]

    def diag(self) -> IntMat2:
        return IntMat2(self.D[0], 0, 0, self.D[1])


def snf2(M: IntMat2) -> SmithForm:
    """U M V = diag(d1, d2) with d1 | d2 and d1, d2 >= 0."""
    m = [[M.a, M.b], [M.c, M.d]]
    U = [[1, 0], [0, 1]]
    V = [[1, 0], [0, 1]]

    def row_op(i, j, k):  # row_i += k row_j
        m[i] = [m[i][t] + k * m[j][t] for t in range(2)]
        U[i] = [U[i][t] + k * U[j][t] for t in range(2)]

    def col_op(i, j, k):  # col_i += k col_j
        for r in (m, V):
            for row in r:
                row[i] += k * row[j]

    def swap_rows():
        m.reverse()
        U.reverse()

    def swap_cols():
        for r in (m, V):
            for row in r:
                row.reverse()

    while True:
        entries = [(abs(m[i][j]), i, j) for i in range(2) for j in range(2) if m[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        if i:
            swap_rows()
        if j:
            swap_cols()
        p = m[0][0]
        if m[1][0]:
            row_op(1, 0, -(m[1][0] // p))
            if m[1][0]:
                continue
        if m[0][1]:
            col_op(1, 0, -(m[0][1] // p))
            if m[0][1]:
                continue
        if m[1][1] % p:
            row_op(0, 1, 1)
            continue
        break
    for i in range(2):
        if m[i][i] < 0:
            m[i] = [-v for v in m[i]]
            U[i] = [-v for v in U[i]]
    Um = IntMat2.from_rows(U)
    Vm = IntMat2.from_rows(V)
    D = (m[0][0], m[1][1])
    if D[0] == 0 and D[1] != 0:
        # keep the zero invariant last
        Um = IntMat2(0, 1, 1, 0) @ Um
        Vm = Vm @ IntMat2(0, 1, 1, 0)
        D = (D[1], 0)
    assert Um @ M @ Vm == IntMat2(D[0], 0, 0, D[1])
    return SmithForm(Um, Vm, D)


def matrix_equivalent(M: IntMat2, N: IntMat2) -> bool:
    return snf2(M).D == snf2(N).D


def _bezout(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def _to_zero(r: Fraction) -> IntMat2:
    p, q = r.numerator, r.denominator
    # [[q, -p], [u, v]] with q v + p u = 1
    g, v, u = _bezout(q, p)
    assert g == 1
    return IntMat2(q, -p, u, v)


def rational_orbit_witness(r1, r2) -> IntMat2:
    r1, r2 = as_rational(r1), as_rational(r2)
    g = _to_zero(r2).inv() @ _to_zero(r1)
    if mobius(g, r1) != r2:
        raise AssertionError("rational orbit witness failed replay")
    return g


# ---------------------------------------------------------------------------
# Small exact rational matrices


class QMat:
    """Immutable matrix of Fractions with just enough algebra for the checks."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(as_rational(v) if not isinstance(v, Fraction) else v for v in r) for r in rows)
        if len({len(r) for r in self.rows}) > 1:
            raise ValueError("ragged matrix")

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n, m):
        return cls([[0] * m for _ in range(n)])

    @classmethod
    def block_diag(cls, A: "QMat", B: "QMat") -> "QMat":
        n, m = A.shape
        p, q = B.shape
        rows = [list(r) + [0] * q for r in A.rows] + [[0] * m + list(r) for r in B.rows]
        return cls(rows)

    @classmethod
    def from_int(cls, g: IntMat2) -> "QMat":
        return cls(g.rows())

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @property
    def T(self) -> "QMat":
        return QMat(list(zip(*self.rows)))

    def __matmul__(self, o: "QMat") -> "QMat":
        cols = list(zip(*o.rows))
        return QMat([[sum((a * b for a, b in zip(r, col)), Fraction(0)) for col in cols] for r in self.rows])

    def __add__(self, o: "QMat") -> "QMat":
        return QMat([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def __sub__(self, o: "QMat") -> "QMat":
        return QMat([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def __neg__(self) -> "QMat":
        return QMat([[-a for a in r] for r in self.rows])

    def scale(self, s) -> "QMat":
        s = as_rational(s)
        return QMat([[s * a for a in r] for r in self.rows])

    def __eq__(self, o):
        return isinstance(o, QMat) and self.rows == o.rows

    def __hash__(self):
        return hash(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def inv(self) -> "QMat":
        if self.shape != (2, 2):
            raise ValueError("only 2x2 inverses are supported")
        (a, b), (c, d) = self.rows
        det = a * d - b * c
        if det == 0:
            raise PoleError("singular matrix")
        return QMat([[d / det, -b / det], [-c / det, a / det]])

    def apply(self, v: Sequence) -> tuple:
        return tuple(sum((a * as_rational(x) for a, x in zip(r, v)), Fraction(0)) for r in self.rows)

    def map_entries(self, f) -> "QMat":
        return QMat([[f(a) for a in r] for r in self.rows])

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self.rows for a in r)

    def tolist(self):
        return [[str(a) for a in r] for r in self.rows]

    def __repr__(self):
        return f"QMat({self.tolist()!r})"

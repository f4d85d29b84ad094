"""Exact complex scalar kernel.

All charges in this package are finite formal sums of atoms

    e^(-i*pi*rot) * e^(pi*scale) * (a + b*i),        rot, scale, a, b rational.

This shape is closed under everything the tilting algorithms do: addition,
multiplication, conjugation, and multiplication by e^(-i*pi*lam) for lam with
rational real and imaginary part (rotation adds to ``rot``, the imaginary part
adds to ``scale``).  Crucially, sign tests are decidable:

* atoms with distinct ``scale`` are linearly independent over the algebraic
  numbers (a relation would make e^(pi*(s-s')) algebraic), so Im(v) = 0 is
  equivalent to the per-scale groups vanishing individually;
* a single atom's Im/Re sign reduces to comparing the phase of a Gaussian
  rational with a rational number, which is exact except in Niven's special
  cases (axes and diagonals), where it is exact too;
* nonzero quantities are separated from 0 by escalating-precision interval
  arithmetic (mpmath.iv), which terminates precisely because they are nonzero.

Phases are measured in half-turns: z = m * e^(i*pi*phi) with phi in (-1, 1].
The semi-closed upper half plane is  {phi in (0, 1]}.
"""

from __future__ import annotations

import itertools
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping

import mpmath
from mpmath import iv


@contextmanager
def _iv_prec(prec: int):
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old

__all__ = [
    "GaussianRational",
    "ExactComplex",
    "LaurentGR",
    "PrecisionError",
    "QQ",
    "gr",
    "mat_mul",
    "mat_vec",
    "mat_identity",
    "mat_det",
    "solve_in_basis",
]

QQ = Fraction

_IV_START_PREC = 64
_IV_MAX_PREC = 1 << 14


class PrecisionError(ArithmeticError):
    """A sign decision could not be certified.

    Raised only for genuinely singular inputs (e.g. a zero test for a sum of
    same-scale atoms with distinct rotations); for nonzero values the interval
    escalation always terminates.
    """


# ---------------------------------------------------------------------------
# Gaussian rationals


@dataclass(frozen=True, slots=True)
class GaussianRational:
    re: Fraction
    im: Fraction

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        q = Fraction(other)
        return GaussianRational(self.re * q, self.im * q)

    __rmul__ = __mul__

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        n2 = other.norm2()
        if n2 == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        c = self * other.conj()
        return GaussianRational(c.re / n2, c.im / n2)

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def times_minus_i(self, quarter_turns: int) -> "GaussianRational":
        """Multiply by (-i)^quarter_turns."""
        q = quarter_turns % 4
        if q == 0:
            return self
        if q == 1:
            return GaussianRational(self.im, -self.re)
        if q == 2:
            return -self
        return GaussianRational(-self.im, self.re)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"({self.re})+({self.im})i"


def gr(re, im=0) -> GaussianRational:
    return GaussianRational(Fraction(re), Fraction(im))


_GR_ZERO = gr(0)
_GR_ONE = gr(1)


def _norm_pm1(r: Fraction) -> Fraction:
    """Reduce r mod 2 into (-1, 1]."""
    r = r % 2
    if r > 1:
        r -= 2
    return r


def _exact_phase(c: GaussianRational):
    """Phase of c in (-1, 1] when it is rational (axes and diagonals), else None."""
    a, b = c.re, c.im
    if a == 0 and b == 0:
        raise ZeroDivisionError("phase of 0")
    if b == 0:
        return Fraction(0) if a > 0 else Fraction(1)
    if a == 0:
        return Fraction(1, 2) if b > 0 else Fraction(-1, 2)
    if abs(a) == abs(b):
        if a > 0:
            return Fraction(1, 4) if b > 0 else Fraction(-1, 4)
        return Fraction(3, 4) if b > 0 else Fraction(-3, 4)
    return None


def _iv_frac(q: Fraction):
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _iv_sign(x) -> int | None:
    """Sign of a real interval, or None if it straddles zero."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    if x == 0:  # true only for the exact zero interval
        return 0
    return None


def phase_cmp_rational(c: GaussianRational, r: Fraction) -> int:
    """Compare phase(c) in (-1, 1] with the rational r (reduced mod 2).

    Exact: the only coincidences phase(c) = r happen on axes/diagonals
    (Niven), which are handled symbolically.  Off those, phase(c) lies in an
    open octant (k/4, (k+1)/4) where tan(pi * .) is strictly increasing with
    no pole, so an interior comparison reduces to im/re versus tan(pi*r),
    two reals that interval arithmetic always separates.
    """
    r = _norm_pm1(r)
    p = _exact_phase(c)
    if p is not None:
        return (p > r) - (p < r)
    a, b = c.re, c.im
    if a > 0 and b > 0:
        k = 0 if abs(b) < abs(a) else 1
    elif a < 0 and b > 0:
        k = 2 if abs(b) > abs(a) else 3
    elif a < 0 and b < 0:
        k = -4 if abs(b) < abs(a) else -3
    else:
        k = -2 if abs(b) > abs(a) else -1
    lo, hi = Fraction(k, 4), Fraction(k + 1, 4)
    if r <= lo:
        return 1
    if r >= hi:
        return -1
    t = b / a
    prec = _IV_START_PREC
    while prec <= _IV_MAX_PREC:
        with _iv_prec(prec):
            tr = iv.tan(iv.pi * _iv_frac(r))
            s = _iv_sign(_iv_frac(t) - tr)
        if s is not None and s != 0:
            return s
        prec *= 2
    raise PrecisionError(f"phase comparison undecided: {c} vs {r}")


def _atom_im_sign(rot: Fraction, c: GaussianRational) -> int:
    """Sign of Im(e^(-i*pi*rot) * c); 0 for c = 0."""
    if c.is_zero():
        return 0
    # normalize: absorb quarter turns so rot lies in [0, 1/2)
    rot = rot % 2
    q, rot = divmod(rot, Fraction(1, 2))
    c = c.times_minus_i(int(q))
    # Im > 0  iff  phase(c) lies in the open window (rot, rot+1) mod 2;
    # with phase(c) in (-1, 1] and rot in [0, 1/2) the window reads
    #   rot = 0:        (0, 1)
    #   rot in (0,1/2): (rot, 1] union (-1, rot-1)
    at_rot = phase_cmp_rational(c, rot)
    if at_rot == 0:
        return 0
    if rot == 0:
        if at_rot < 0:
            return -1
        return 0 if phase_cmp_rational(c, Fraction(1)) == 0 else 1
    low = rot - 1  # in [-1, -1/2)
    at_low = phase_cmp_rational(c, low)
    if at_low == 0:
        return 0
    if at_rot > 0 or at_low < 0:
        return 1
    return -1


def _atom_re_sign(rot: Fraction, c: GaussianRational) -> int:
    # Re(e^(-i*pi*rot) c) = Im(e^(-i*pi*(rot - 1/2)) c)
    return _atom_im_sign(rot - Fraction(1, 2), c)


# ---------------------------------------------------------------------------
# Exact complex values


def _normalize_atom(rot: Fraction, scale: Fraction, c: GaussianRational):
    """Reduce rot mod 2 into [0, 1/2), absorbing quarter turns into c."""
    if c.is_zero():
        return None
    rot = rot % 2
    q, rem = divmod(rot, Fraction(1, 2))
    return (rem, scale, c.times_minus_i(int(q)))


class ExactComplex:
    """A finite sum of exactly-representable complex atoms.

    Immutable.  Atoms are stored normalized with rot in [0, 1/2); two values
    are equal iff their atom multisets agree, which is sound because distinct
    normalized atoms cannot cancel pairwise (a cancellation would force
    e^(i*pi*(rot-rot')) or e^(pi*(scale-scale')) to be a nonreal Gaussian
    rational resp. an algebraic number).
    """

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[tuple[Fraction, Fraction, GaussianRational]] = ()):
        merged: dict[tuple[Fraction, Fraction], GaussianRational] = {}
        for rot, scale, c in atoms:
            a = _normalize_atom(rot, scale, c)
            if a is None:
                continue
            rot, scale, c = a
            key = (rot, scale)
            if key in merged:
                merged[key] = merged[key] + c
            else:
                merged[key] = c
        object.__setattr__(
            self,
            "atoms",
            tuple(
                (k[0], k[1], v)
                for k, v in sorted(merged.items())
                if not v.is_zero()
            ),
        )

    # -- constructors

    @classmethod
    def zero(cls) -> "ExactComplex":
        return cls(())

    @classmethod
    def from_gaussian(cls, c: GaussianRational) -> "ExactComplex":
        return cls([(Fraction(0), Fraction(0), c)])

    @classmethod
    def rational(cls, re, im=0) -> "ExactComplex":
        return cls.from_gaussian(gr(re, im))

    @classmethod
    def unit(cls, rot, scale=0) -> "ExactComplex":
        """e^(-i*pi*rot) * e^(pi*scale)."""
        return cls([(Fraction(rot), Fraction(scale), _GR_ONE)])

    @classmethod
    def exp_minus_i_pi(cls, lam_re, lam_im=0) -> "ExactComplex":
        """e^(-i*pi*(lam_re + i*lam_im)) = e^(-i*pi*lam_re) e^(pi*lam_im)."""
        return cls.unit(Fraction(lam_re), Fraction(lam_im))

    # -- ring operations

    def __add__(self, other: "ExactComplex") -> "ExactComplex":
        return ExactComplex(self.atoms + other.atoms)

    def __sub__(self, other: "ExactComplex") -> "ExactComplex":
        return self + (-other)

    def __neg__(self) -> "ExactComplex":
        return ExactComplex([(r, s, -c) for r, s, c in self.atoms])

    def __mul__(self, other):
        if isinstance(other, ExactComplex):
            return ExactComplex(
                [
                    (r1 + r2, s1 + s2, c1 * c2)
                    for (r1, s1, c1), (r2, s2, c2) in itertools.product(
                        self.atoms, other.atoms
                    )
                ]
            )
        if isinstance(other, GaussianRational):
            return ExactComplex([(r, s, c * other) for r, s, c in self.atoms])
        q = Fraction(other)
        return ExactComplex([(r, s, c * q) for r, s, c in self.atoms])

    __rmul__ = __mul__

    def conj(self) -> "ExactComplex":
        return ExactComplex([(-r, s, c.conj()) for r, s, c in self.atoms])

    def divide_atom(self, other: "ExactComplex") -> "ExactComplex":
        """Divide by a single-atom value."""
        if len(other.atoms) != 1:
            raise ValueError("divisor must be a single atom")
        r, s, c = other.atoms[0]
        inv = ExactComplex([(-r, -s, _GR_ONE / c)])
        return self * inv

    # -- predicates

    def is_zero(self) -> bool:
        return not self.atoms

    def __eq__(self, other) -> bool:
        return isinstance(other, ExactComplex) and self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash(self.atoms)

    def _group_by_scale(self):
        out: dict[Fraction, list[tuple[Fraction, GaussianRational]]] = {}
        for r, s, c in self.atoms:
            out.setdefault(s, []).append((r, c))
        return out

    def _signed_part_sign(self, part: str) -> int:
        """Exact sign of Re or Im of the value."""
        atom_sign = _atom_re_sign if part == "re" else _atom_im_sign
        groups = self._group_by_scale()
        group_signs: dict[Fraction, int] = {}
        undecided = []
        for s, atoms in groups.items():
            if len(atoms) == 1:
                group_signs[s] = atom_sign(atoms[0][0], atoms[0][1])
            else:
                undecided.append(s)
        if not undecided:
            nonzero = {s: g for s, g in group_signs.items() if g != 0}
            if not nonzero:
                return 0
            if len(nonzero) == 1:
                return next(iter(nonzero.values()))
        # numerical refinement; sound because a nonzero mixed sum of
        # distinct-scale groups cannot vanish
        return self._iv_part_sign(part, allow_zero=bool(undecided))

    def _iv_part_sign(self, part: str, allow_zero: bool) -> int:
        prec = _IV_START_PREC
        while prec <= _IV_MAX_PREC:
            with _iv_prec(prec):
                total = iv.mpf(0)
                for r, s, c in self.atoms:
                    ang = iv.pi * _iv_frac(r)
                    co, si = iv.cos(ang), iv.sin(ang)
                    a, b = _iv_frac(c.re), _iv_frac(c.im)
                    if part == "re":
                        val = a * co + b * si
                    else:
                        val = b * co - a * si
                    total += iv.exp(iv.pi * _iv_frac(s)) * val
                sign = _iv_sign(total)
            if sign is not None and sign != 0:
                return sign
            prec *= 2
        if allow_zero:
            raise PrecisionError(
                "sign of same-scale mixed-rotation sum could not be certified"
            )
        # all exact group signs were zero but mixed; the independence
        # argument says the value is zero
        return 0

    def im_sign(self) -> int:
        return self._signed_part_sign("im")

    def re_sign(self) -> int:
        return self._signed_part_sign("re")

    def in_upper_semiclosed(self) -> bool:
        """Membership in {m e^(i pi phi): m > 0, 0 < phi <= 1}."""
        if self.is_zero():
            return False
        s = self.im_sign()
        if s > 0:
            return True
        if s < 0:
            return False
        return self.re_sign() < 0

    def phase_bucket(self) -> int:
        """0 if the phase lies in (-1, 0], 1 if in (0, 1]. Value must be nonzero."""
        if self.is_zero():
            raise ZeroDivisionError("phase of 0")
        return 1 if self.in_upper_semiclosed() else 0

    def cmp_phase(self, other: "ExactComplex") -> int:
        """Compare phase representatives in (-1, 1]. Both values nonzero."""
        b1, b2 = self.phase_bucket(), other.phase_bucket()
        if b1 != b2:
            return -1 if b1 < b2 else 1
        cross = self.conj() * other
        s = cross.im_sign()
        if s > 0:
            return -1
        if s < 0:
            return 1
        if cross.re_sign() > 0:
            return 0
        # antipodal within one bucket cannot happen: buckets are half-turns
        raise PrecisionError("phase comparison hit an antipodal pair")

    def parallel_positive(self, other: "ExactComplex") -> bool:
        """True if self = t * other for some real t > 0."""
        if self.is_zero() or other.is_zero():
            return False
        cross = self.conj() * other
        return cross.im_sign() == 0 and cross.re_sign() > 0

    def cmp_abs(self, other: "ExactComplex") -> int:
        d = self * self.conj() - other * other.conj()
        return d.re_sign()

    # -- numeric views

    def abs2_parts(self) -> list[tuple[Fraction, Fraction]]:
        """|v|^2 as a sum of e^(2*pi*s) * q terms: list of (s, q)."""
        sq = self * self.conj()
        out = []
        for r, s, c in sq.atoms:
            if r == 0 and c.im == 0:
                out.append((s / 2, c.re))
            else:  # mixed-rotation cross terms; keep the numeric view honest
                return []
        return out

    def to_mpc(self, dps: int = 30):
        with mpmath.workdps(dps):
            total = mpmath.mpc(0)
            for r, s, c in self.atoms:
                total += (
                    mpmath.e ** (mpmath.pi * (mpmath.mpf(s.numerator) / s.denominator))
                    * mpmath.e
                    ** (
                        -1j
                        * mpmath.pi
                        * (mpmath.mpf(r.numerator) / r.denominator)
                    )
                    * mpmath.mpc(
                        mpmath.mpf(c.re.numerator) / c.re.denominator,
                        mpmath.mpf(c.im.numerator) / c.im.denominator,
                    )
                )
            return total

    def __complex__(self) -> complex:
        return complex(self.to_mpc())

    def __abs__(self) -> float:
        return abs(complex(self))

    def as_gaussian(self) -> GaussianRational | None:
        """The value as a Gaussian rational, if it is one."""
        if not self.atoms:
            return _GR_ZERO
        if len(self.atoms) == 1:
            r, s, c = self.atoms[0]
            if r == 0 and s == 0:
                return c
        return None

    def phase_fraction(self) -> Fraction | None:
        """Exact phase in (-1, 1] as a Fraction when it is rational, else None."""
        if len(self.atoms) != 1:
            return None
        r, _, c = self.atoms[0]
        p = _exact_phase(c)
        if p is None:
            return None
        return _norm_pm1(p - r)

    def __repr__(self) -> str:
        if not self.atoms:
            return "EC(0)"
        return "EC(" + " + ".join(
            f"e^(-i*pi*{r})*e^(pi*{s})*{c}" for r, s, c in self.atoms
        ) + ")"


EC = ExactComplex


# ---------------------------------------------------------------------------
# Laurent polynomials over the Gaussian rationals


class LaurentGR:
    """Laurent polynomial in one parameter t with Gaussian-rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, GaussianRational] | None = None):
        cleaned = {}
        if coeffs:
            for k, c in coeffs.items():
                if not c.is_zero():
                    cleaned[int(k)] = c
        self.coeffs = dict(sorted(cleaned.items()))

    @classmethod
    def const(cls, c: GaussianRational) -> "LaurentGR":
        return cls({0: c})

    @classmethod
    def monomial(cls, k: int, c: GaussianRational) -> "LaurentGR":
        return cls({k: c})

    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self) -> int | None:
        if not self.coeffs:
            return None
        return min(self.coeffs)

    def leading(self) -> GaussianRational:
        v = self.valuation()
        if v is None:
            raise ZeroDivisionError("leading coefficient of 0")
        return self.coeffs[v]

    def coeff(self, k: int) -> GaussianRational:
        return self.coeffs.get(k, _GR_ZERO)

    def __add__(self, other: "LaurentGR") -> "LaurentGR":
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, _GR_ZERO) + c
        return LaurentGR(out)

    def __neg__(self) -> "LaurentGR":
        return LaurentGR({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other: "LaurentGR") -> "LaurentGR":
        return self + (-other)

    def scale(self, c) -> "LaurentGR":
        if not isinstance(c, GaussianRational):
            c = gr(c)
        return LaurentGR({k: v * c for k, v in self.coeffs.items()})

    def shift(self, d: int) -> "LaurentGR":
        return LaurentGR({k + d: c for k, c in self.coeffs.items()})

    def eval_fraction(self, t: Fraction) -> GaussianRational:
        total = _GR_ZERO
        for k, c in self.coeffs.items():
            total = total + c * (t**k)
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentGR) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(tuple(self.coeffs.items()))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*t^{k}" for k, c in self.coeffs.items())


# ---------------------------------------------------------------------------
# Small exact linear algebra (integer/rational, dense, tiny sizes)


def mat_identity(n: int):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [
        [sum(a[i][k] * b[k][j] for k in range(m)) for j in range(p)]
        for i in range(n)
    ]


def mat_vec(a, v):
    return [sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a))]


def mat_det(a) -> Fraction:
    n = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def solve_in_basis(basis, target) -> list[Fraction] | None:
    """Coefficients x with sum_j x_j * basis[j] = target, or None.

    ``basis`` is a list of integer/rational vectors (not necessarily square).
    """
    if not basis:
        return None
    n = len(basis[0])
    k = len(basis)
    m = [[Fraction(basis[j][i]) for j in range(k)] + [Fraction(target[i])] for i in range(n)]
    row = 0
    pivots = []
    for col in range(k):
        pivot = next((r for r in range(row, n) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = 1 / m[row][col]
        m[row] = [x * inv for x in m[row]]
        for r in range(n):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
    # consistency: rows below must have zero rhs
    for r in range(row, n):
        if m[r][k] != 0:
            return None
    x = [Fraction(0)] * k
    for r, col in enumerate(pivots):
        x[col] = m[r][k]
    return x


def lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out

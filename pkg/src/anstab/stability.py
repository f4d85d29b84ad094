"""Stability conditions on finite hearts and the rescaled-rotation action.

A stability condition is a heart together with an exact central charge
sending every simple into the semi-closed upper half plane
H = {m e^(i*pi*phi) : m > 0, 0 < phi <= 1}.  The action of a complex number
lam multiplies the charge by e^(-i*pi*lam) and repairs the heart by forward
tilts: while some simple's charge has left H, tilt at a simple of minimal
phase (ties by label).  The charge of the result always equals
e^(-i*pi*lam) times the input charge as a map on K; lam = 1 realizes the
shift, purely imaginary lam rescales without touching the heart.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .anquiver import enumerate_strings
from .exact import EC, ExactComplex, GaussianRational, solve_in_basis
from .hearts import Heart, KClass, forward_tilt, shift_heart


class StabilityError(ValueError):
    pass


class WallHit(StabilityError):
    """A charge landed on the positive real axis and no tilt can absorb it."""


def as_lambda(lam) -> tuple[Fraction, Fraction]:
    """Coerce a rotation parameter to exact (re, im) rationals."""
    if isinstance(lam, tuple):
        return Fraction(lam[0]), Fraction(lam[1])
    if isinstance(lam, GaussianRational):
        return lam.re, lam.im
    if isinstance(lam, complex):
        return Fraction(lam.real), Fraction(lam.imag)
    return Fraction(lam), Fraction(0)


def as_exact_value(v) -> ExactComplex:
    """Coerce a charge entry (exact, Gaussian, complex, pair, rational)."""
    if isinstance(v, ExactComplex):
        return v
    if isinstance(v, GaussianRational):
        return EC.from_gaussian(v)
    if isinstance(v, complex):
        return EC.rational(Fraction(v.real), Fraction(v.imag))
    if isinstance(v, tuple):
        return EC.rational(Fraction(v[0]), Fraction(v[1]))
    return EC.rational(Fraction(v))


def charge_from_values(heart: Heart, values: Mapping[int, object]) -> dict[int, ExactComplex]:
    out = {}
    for l in heart.labels:
        if l not in values:
            raise StabilityError(f"charge missing on simple {l}")
        out[l] = as_exact_value(values[l])
    return out


@dataclass(frozen=True)
class StabilityCondition:
    heart: Heart
    charge: tuple[tuple[int, ExactComplex], ...]  # sorted by label

    def z(self, label: int) -> ExactComplex:
        for l, v in self.charge:
            if l == label:
                return v
        raise StabilityError(f"unknown simple label {label}")

    def charge_dict(self) -> dict[int, ExactComplex]:
        return dict(self.charge)

    def value(self, gamma: KClass) -> ExactComplex:
        """The charge of an arbitrary K-class (Z-linear in the simple basis)."""
        coeffs = solve_in_basis([list(c) for c in self.heart.classes], list(gamma))
        if coeffs is None:
            raise StabilityError("class outside the span of the simples")
        total = EC.zero()
        for x, (_, v) in zip(coeffs, self.charge):
            if x:
                total = total + v * x
        return total

    def to_json(self) -> dict:
        return {
            "heart": self.heart.to_json(),
            "charge": {str(l): _ec_json(v) for l, v in self.charge},
        }


def _ec_json(v: ExactComplex):
    g = v.as_gaussian()
    if g is not None:
        return [
            g.re.numerator, g.re.denominator, g.im.numerator, g.im.denominator,
        ]
    if len(v.atoms) == 1:
        r, s, c = v.atoms[0]
        return {
            "rot": [r.numerator, r.denominator],
            "scale": [s.numerator, s.denominator],
            "gauss": [c.re.numerator, c.re.denominator, c.im.numerator, c.im.denominator],
        }
    z = complex(v)
    return {"re": z.real, "im": z.imag}


def validate(heart: Heart, values: Mapping[int, object]) -> StabilityCondition:
    """Check the charge maps every simple into the semi-closed upper half plane."""
    charge = charge_from_values(heart, values)
    bad = []
    for l in heart.labels:
        v = charge[l]
        if v.is_zero():
            bad.append((l, "zero charge"))
        elif not v.in_upper_semiclosed():
            bad.append((l, "outside the semi-closed upper half plane"))
    if bad:
        msg = "; ".join(f"simple {l}: {why}" for l, why in bad)
        raise StabilityError(f"invalid central charge: {msg}")
    return StabilityCondition(heart, tuple(sorted(charge.items())))


@dataclass(frozen=True)
class Phase:
    """Exact phase handle for a nonzero charge value, normalized to (-1, 1]."""

    value: ExactComplex

    def cmp(self, other: "Phase") -> int:
        return self.value.cmp_phase(other.value)

    def fraction(self) -> Fraction | None:
        return self.value.phase_fraction()

    def __float__(self) -> float:
        import cmath
        import math

        return cmath.phase(complex(self.value)) / math.pi


@dataclass(frozen=True)
class Mass:
    """|Z| with the exact square kept alongside the float view.

    ``sq_parts`` lists (s, q) with |Z|^2 = sum q * e^(2*pi*s); for plain
    Gaussian charges this is a single (0, q) and the square is the Fraction q.
    """

    sq_parts: tuple[tuple[Fraction, Fraction], ...]
    value: float

    def exact_square(self) -> Fraction | None:
        if len(self.sq_parts) == 1 and self.sq_parts[0][0] == 0:
            return self.sq_parts[0][1]
        return None

    def __float__(self) -> float:
        return self.value


def phase(sigma: StabilityCondition, gamma: KClass) -> Phase:
    v = sigma.value(gamma)
    if v.is_zero():
        raise StabilityError("phase of a zero charge")
    return Phase(v)


def mass(sigma: StabilityCondition, gamma: KClass) -> Mass:
    v = sigma.value(gamma)
    return Mass(tuple(v.abs2_parts()), abs(v))


def _min_phase_label(charge: dict[int, ExactComplex], labels) -> int:
    best = None
    for l in labels:
        if best is None:
            best = l
            continue
        c = charge[l].cmp_phase(charge[best])
        if c < 0 or (c == 0 and l < best):
            best = l
    return best


def tilt_with_charge(heart: Heart, charge: dict[int, ExactComplex], s: int):
    """Forward tilt updating the charge values alongside the K-classes."""
    zs = charge[s]
    new_charge = dict(charge)
    for t in heart.labels:
        if t == s:
            continue
        m = heart.ext1(t, s)
        if m:
            new_charge[t] = new_charge[t] + zs * m
    new_charge[s] = -zs
    return forward_tilt(heart, s), new_charge


def _settle_charge(heart: Heart, charge: dict[int, ExactComplex], cap: int):
    """Forward-tilt at minimal-phase offenders until every simple is valid.

    Correctly realizes the tilt at the torsion-free class of one rotation
    step with real part at most 1; larger rotations must be chunked.
    """
    steps = 0
    while True:
        offenders = [l for l in heart.labels if not charge[l].in_upper_semiclosed()]
        if not offenders:
            return heart, charge
        for l in offenders:
            if charge[l].is_zero():
                raise StabilityError("charge degenerated to zero during the action")
        steps += 1
        if steps > cap:
            raise WallHit(
                "tilt loop did not terminate; the rotation hits a wall "
                "outside the finite-type range"
            )
        s = _min_phase_label(charge, offenders)
        heart, charge = tilt_with_charge(heart, charge, s)


def c_act(sigma: StabilityCondition, lam, max_steps: int | None = None) -> StabilityCondition:
    """The action of lam: rotate the charge by e^(-i*pi*lam) and retilt.

    The rotation is applied in real-part chunks of at most one half-turn;
    one greedy tilt pass per chunk realizes the torsion-free tilt of that
    chunk, and the chunks compose by the action axiom.
    """
    re, im = as_lambda(lam)
    even = 2 * (re // 2)
    residual = re - even
    heart = shift_heart(sigma.heart, int(even)) if even else sigma.heart
    scale = EC.exp_minus_i_pi(0, im)
    charge = {l: scale * v for l, v in sigma.charge}
    n = heart.rank()
    cap = max_steps if max_steps is not None else 40 * n * n + 8
    while residual > 0:
        step = min(residual, Fraction(1))
        rot = EC.exp_minus_i_pi(step)
        charge = {l: rot * v for l, v in charge.items()}
        heart, charge = _settle_charge(heart, charge, cap)
        residual -= step
    return StabilityCondition(heart, tuple(sorted(charge.items())))


@dataclass(frozen=True)
class SpectrumEntry:
    kclass: KClass
    phase: Phase
    mass: Mass


def indecomposable_spectrum(sigma: StabilityCondition) -> list[SpectrumEntry]:
    """Charges of all strings of the heart's ext-quiver.

    This is a finite superset of the stable spectrum, which is what the
    wall-avoidance and mass diagnostics need.
    """
    h = sigma.heart
    entries = []
    for s in enumerate_strings(h.ext):
        dv = s.dimension_vector(h.ext.vertices)
        cls = tuple(
            sum(m * c[i] for m, c in zip(dv, _classes_by_vertex(h)))
            for i in range(h.rank())
        )
        v = _value_from_multiplicities(h, dict(sigma.charge), dv)
        entries.append(SpectrumEntry(cls, Phase(v), Mass(tuple(v.abs2_parts()), abs(v))))
    return entries


def _classes_by_vertex(h: Heart):
    return [h.cls(v) for v in h.ext.vertices]


def _value_from_multiplicities(h: Heart, charge: dict[int, ExactComplex], dv):
    total = EC.zero()
    for m, v in zip(dv, h.ext.vertices):
        if m:
            total = total + charge[v] * m
    return total

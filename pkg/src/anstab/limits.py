"""Exact limit extraction for one-parameter families of central charges.

A family is a Laurent polynomial in a parameter t per simple (t -> 0+), with
Gaussian-rational coefficients, together with a global rational rotation
accumulated while processing.  Everything is decided symbolically:

* admissibility (values in the semi-closed upper half plane for all small
  t > 0) reads off the sign of the first nonvanishing imaginary, then real,
  coefficient after rotation;
* the level order compares t-adic valuations: a simple dominates another
  exactly when its valuation is smaller or equal;
* the limit charge at each level is the leading coefficient, once none of
  them sits on the positive real axis.  If one does, the family is rotated
  by the smallest schedule value 1/q (q = 64, 32, ...) that leaves every
  indecomposable leading phase off the axis, the hearts are retilted
  symbolically, and the extraction restarts.

The returned rotation lets callers undo the rotation branch exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .anquiver import enumerate_strings
from .exact import (
    EC,
    GaussianRational,
    LaurentGR,
    _atom_im_sign,
    _atom_re_sign,
    gr,
)
from .hearts import Heart, forward_tilt
from .multiscale import MscError, MultiScaleStab, validate_msc


class LimitError(ValueError):
    pass


class InadmissibleFamily(LimitError):
    """Some simple leaves the semi-closed upper half plane for small t."""


ROTATION_SCHEDULE = tuple(Fraction(1, q) for q in (64, 32, 16, 8, 4))


@dataclass(frozen=True)
class LaurentCharge:
    """Per-simple Laurent polynomials plus a global rotation e^(-i*pi*rot)."""

    families: tuple[tuple[int, LaurentGR], ...]
    rot: Fraction = Fraction(0)

    @staticmethod
    def build(values: Mapping[int, LaurentGR | Mapping[int, GaussianRational]],
              rot=0) -> "LaurentCharge":
        fams = []
        for l, f in values.items():
            if not isinstance(f, LaurentGR):
                f = LaurentGR(dict(f))
            fams.append((int(l), f))
        return LaurentCharge(tuple(sorted(fams)), Fraction(rot))

    def family(self, label: int) -> LaurentGR:
        for l, f in self.families:
            if l == label:
                return f
        raise LimitError(f"no family for simple {label}")

    def to_json(self) -> dict:
        return {
            str(l): [
                [k, c.re.numerator, c.re.denominator, c.im.numerator, c.im.denominator]
                for k, c in f.coeffs.items()
            ]
            for l, f in self.families
        }

    @staticmethod
    def from_json(data: Mapping) -> "LaurentCharge":
        fams = {}
        for l, terms in data.items():
            fams[int(l)] = LaurentGR(
                {
                    int(k): gr(Fraction(a, b), Fraction(c, d))
                    for k, a, b, c, d in terms
                }
            )
        return LaurentCharge.build(fams)


def _series_im_sign(rot: Fraction, f: LaurentGR) -> int:
    for k in sorted(f.coeffs):
        s = _atom_im_sign(rot, f.coeffs[k])
        if s:
            return s
    return 0


def _series_re_sign(rot: Fraction, f: LaurentGR) -> int:
    for k in sorted(f.coeffs):
        s = _atom_re_sign(rot, f.coeffs[k])
        if s:
            return s
    return 0


def _eventually_in_h(rot: Fraction, f: LaurentGR) -> bool:
    """Whether e^(-i*pi*rot) * f(t) lies in the half plane for all small t > 0."""
    if f.is_zero():
        return False
    s = _series_im_sign(rot, f)
    if s:
        return s > 0
    return _series_re_sign(rot, f) < 0


@dataclass(frozen=True)
class LevelAssignment:
    level_of: tuple[tuple[int, int], ...]   # (label, level)
    valuations: tuple[int, ...]             # valuation per level, increasing

    def level(self, label: int) -> int:
        return dict(self.level_of)[label]

    def level_sets(self) -> list[frozenset[int]]:
        out = [set() for _ in self.valuations]
        for l, i in self.level_of:
            out[i].add(l)
        return [frozenset(s) for s in out]


def order_relation(heart: Heart, zc: LaurentCharge) -> LevelAssignment:
    """Group simples into levels by t-adic valuation, largest charges first."""
    _check_admissible(heart, zc)
    vals = {}
    for l in heart.labels:
        f = zc.family(l)
        vals[l] = f.valuation()
    distinct = sorted(set(vals.values()))
    return LevelAssignment(
        tuple(sorted((l, distinct.index(v)) for l, v in vals.items())),
        tuple(distinct),
    )


def _check_admissible(heart: Heart, zc: LaurentCharge) -> None:
    bad = []
    for l in heart.labels:
        f = zc.family(l)
        if f.is_zero():
            bad.append((l, "identically zero"))
        elif not _eventually_in_h(zc.rot, f):
            bad.append((l, "leaves the semi-closed upper half plane near t=0"))
    if bad:
        msg = "; ".join(f"simple {l}: {why}" for l, why in bad)
        raise InadmissibleFamily(msg)


def _tilt_family(heart: Heart, fams: dict[int, LaurentGR], s: int):
    fs = fams[s]
    out = dict(fams)
    for t in heart.labels:
        if t == s:
            continue
        m = heart.ext1(t, s)
        if m:
            out[t] = out[t] + fs.scale(m)
    out[s] = -fs
    return forward_tilt(heart, s), out


def _leading_phase_cmp(rot: Fraction, f1: LaurentGR, f2: LaurentGR) -> int:
    a = EC([(rot, Fraction(0), f1.leading())])
    b = EC([(rot, Fraction(0), f2.leading())])
    return a.cmp_phase(b)


def _settle_family(heart: Heart, fams: dict[int, LaurentGR], rot: Fraction):
    """Forward-tilt until every simple family is eventually in the half plane."""
    n = heart.rank()
    for _ in range(40 * n * n + 8):
        offenders = [
            l for l in heart.labels if not _eventually_in_h(rot, fams[l])
        ]
        if not offenders:
            return heart, fams
        for l in offenders:
            if fams[l].is_zero():
                raise InadmissibleFamily(f"simple {l} degenerated to zero")
        best = offenders[0]
        for l in offenders[1:]:
            c = _leading_phase_cmp(rot, fams[l], fams[best])
            if c < 0:
                best = l
        heart, fams = _tilt_family(heart, fams, best)
    raise LimitError("family tilt loop did not terminate")


def _wall_phases_hit(heart: Heart, fams: dict[int, LaurentGR], rot: Fraction,
                     lam: Fraction) -> bool:
    """Does rotating by lam land some indecomposable leading term on R_{>0}?"""
    for s in enumerate_strings(heart.ext):
        dv = s.dimension_vector(heart.ext.vertices)
        total = LaurentGR()
        for m, v in zip(dv, heart.ext.vertices):
            if m:
                total = total + fams[v].scale(m)
        if total.is_zero():
            continue
        lead = total.leading()
        r = rot + lam
        if _atom_im_sign(r, lead) == 0 and _atom_re_sign(r, lead) > 0:
            return True
    return False


def extract_limit(heart: Heart, zc: LaurentCharge):
    """Extract the limiting multi-scale object of an admissible family.

    Returns (msc, rotation): the applied total rotation r means every output
    charge carries the factor e^(-i*pi*r); dropping it recovers the
    unrotated leading coefficients.  Deterministic: the rotation branch
    always picks the earliest admissible schedule value.
    """
    _check_admissible(heart, zc)
    fams = {l: f for l, f in zc.families}
    missing = set(heart.labels) - set(fams)
    if missing:
        raise LimitError(f"families missing for simples {sorted(missing)}")
    rot = zc.rot
    heart_cur = heart
    for _round in range(len(ROTATION_SCHEDULE) + 1):
        heart_cur, fams = _settle_family(heart_cur, fams, rot)
        vals = {l: fams[l].valuation() for l in heart_cur.labels}
        distinct = sorted(set(vals.values()))
        hit = False
        for l in heart_cur.labels:
            lead = fams[l].leading()
            if _atom_im_sign(rot, lead) == 0 and _atom_re_sign(rot, lead) > 0:
                hit = True
                break
        if not hit:
            charges = []
            for i, v in enumerate(distinct):
                ch = {}
                for l in heart_cur.labels:
                    if vals[l] < v:
                        continue
                    if vals[l] == v:
                        ch[l] = EC([(rot, Fraction(0), fams[l].leading())])
                    else:
                        ch[l] = EC.zero()
                charges.append(ch)
            return validate_msc(heart_cur, charges), rot
        lam = next(
            (
                lam
                for lam in ROTATION_SCHEDULE
                if not _wall_phases_hit(heart_cur, fams, rot, lam)
            ),
            None,
        )
        if lam is None:
            raise LimitError(
                "no admissible rotation in the schedule: the degeneration "
                "is horizontal, which cannot occur in finite A_n type"
            )
        rot = rot + lam
    raise LimitError("rotation branch did not stabilize")


def plumbing_ray(m: MultiScaleStab) -> tuple[Heart, LaurentCharge]:
    """The symbolic ray Z_0 + t Z_1 + t^2 Z_2 + ... of a rational msc.

    Feeding the result back through extract_limit recovers an equivalent
    multi-scale object.
    """
    fams: dict[int, LaurentGR] = {}
    for l in m.top.labels:
        depth = max(i for i in range(m.L + 1) if l in m.labels(i))
        v = m.charge(depth)[l]
        g = v.as_gaussian()
        if g is None:
            raise MscError("plumbing rays need plain Gaussian-rational charges")
        fams[l] = LaurentGR.monomial(depth, g)
    return m.top, LaurentCharge.build(fams)

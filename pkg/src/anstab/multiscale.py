"""Multi-scale stability conditions: nested hearts with per-level charges.

A multi-scale object is a top heart A_0 together with label subsets
N_1 > N_2 > ... > N_L and charges Z_0, ..., Z_L, where Z_i is defined on the
simples of level i and vanishes exactly on those of level i+1.  Each deeper
level is the Serre subcategory generated by the simples its predecessor's
charge kills; per level the quotient charge must land in the semi-closed
upper half plane (on the nose at level 0, up to a complex rescaling per
deeper level, mirroring the equivalence relation).

The two structural operations are the rescaled-rotation action (all charges
multiply by e^(-i*pi*lam); tilts at deeper simples and lifted tilts at
quotient simples repair the hearts level by level) and plumbing (the action
by tau on the sub-object below a level passage followed by merging the two
levels with charge Z_{j-1} + e^(-i*pi*tau) Z_j on the disjoint simple
decomposition).  Lifted tilts use convenient representatives: tilt forward
along the chains inside the deeper subset, tilt at the quotient simple, tilt
backward along the chains; the deeper data returns to its starting state.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .anquiver import enumerate_strings, restrict
from .exact import EC, ExactComplex, solve_in_basis
from .hearts import Heart, canonical_form, shift_heart, _tilt
from .klattice import simple_twist_data
from .stability import StabilityCondition, WallHit, as_exact_value, as_lambda

INFTY = None  # formal -i*infinity plumbing entry


class MscError(ValueError):
    pass


LevelCharge = tuple[tuple[int, ExactComplex], ...]


@dataclass(frozen=True)
class MultiScaleStab:
    top: Heart
    level_sets: tuple[frozenset[int], ...]   # N_1 > ... > N_L
    charges: tuple[LevelCharge, ...]         # length L+1; keys of charges[i] = N_i

    @property
    def L(self) -> int:
        return len(self.level_sets)

    def labels(self, i: int) -> frozenset[int]:
        if i == 0:
            return frozenset(self.top.labels)
        if i <= self.L:
            return self.level_sets[i - 1]
        return frozenset()

    def quotient_labels(self, i: int) -> frozenset[int]:
        return self.labels(i) - self.labels(i + 1)

    def charge(self, i: int) -> dict[int, ExactComplex]:
        return dict(self.charges[i])

    def level_components(self, i: int) -> list[frozenset[int]]:
        return self.top.ext.components(self.labels(i))

    def is_honest(self) -> bool:
        return self.L == 0

    def as_stability(self) -> StabilityCondition:
        if not self.is_honest():
            raise MscError("only a zero-level object is an honest stability condition")
        return StabilityCondition(self.top, self.charges[0])

    def to_json(self) -> dict:
        from .stability import _ec_json

        return {
            "schema": 1,
            "top_heart": self.top.to_json(),
            "levels": [
                {
                    "simples": sorted(self.labels(i)),
                    "charge": {str(l): _ec_json(v) for l, v in self.charges[i]},
                }
                for i in range(self.L + 1)
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "MultiScaleStab":
        top = Heart.from_json(data["top_heart"])
        charges = []
        for lvl in data["levels"]:
            ch = {}
            for k, v in lvl["charge"].items():
                if isinstance(v, list):
                    ch[int(k)] = EC.rational(
                        Fraction(v[0], v[1]), Fraction(v[2], v[3])
                    )
                elif "gauss" in v:
                    a, b, c, d = v["gauss"]
                    ch[int(k)] = EC(
                        [
                            (
                                Fraction(*v["rot"]),
                                Fraction(*v["scale"]),
                                EC.rational(Fraction(a, b), Fraction(c, d)).as_gaussian(),
                            )
                        ]
                    )
                else:
                    ch[int(k)] = EC.rational(
                        Fraction(v["re"]), Fraction(v["im"])
                    )
            charges.append(ch)
        return validate_msc(top, charges)


@dataclass(frozen=True)
class VanishingChain:
    """Per level: the label subset and its connected components."""

    levels: tuple[tuple[frozenset[int], tuple[frozenset[int], ...]], ...]

    def rho(self) -> list[tuple[int, ...]]:
        return [
            tuple(sorted((len(c) for c in comps), reverse=True))
            for (_, comps) in self.levels
        ]


# ---------------------------------------------------------------------------
# Validation


def _h_window_label(values: Sequence[tuple[int, ExactComplex]]) -> int | None:
    """A label whose rotation-to-the-negative-axis puts the whole level in H.

    Returns the first label a such that every value b satisfies
    phase(b) - phase(a) in (-1, 0]; None when no common rotation exists.
    """
    for a, va in values:
        ok = True
        for _, vb in values:
            cross = va.conj() * vb
            s = cross.im_sign()
            if s > 0 or (s == 0 and cross.re_sign() < 0):
                ok = False
                break
        if ok:
            return a
    return None


def _check_type_constraints(top: Heart, chain: list[frozenset[int]]) -> None:
    for i in range(1, len(chain)):
        ambient_comps = top.ext.components(chain[i - 1])
        for comp in ambient_comps:
            sub = chain[i] & comp
            if not sub or sub == comp:
                continue
            parts = top.ext.components(sub)
            total = sum(len(p) + 1 for p in parts)
            if total > len(comp) + 1 or (
                total == len(comp) + 1 and len(parts) < 2
            ):
                raise MscError(
                    f"level {i} vanishing subset {sorted(sub)} has an invalid "
                    f"component type inside {sorted(comp)}"
                )


def validate_msc(top: Heart, level_charges: Sequence[Mapping[int, object]]) -> MultiScaleStab:
    """Validate level charges and assemble the multi-scale object.

    The vanishing chain is derived from the zero sets: N_{i+1} is where Z_i
    vanishes, and charges[i+1] must be given exactly on N_{i+1}.  Level 0 must
    be honestly half-plane valued; deeper levels only up to one rotation.
    """
    if not level_charges:
        raise MscError("at least the level-0 charge is required")
    charges = [
        {int(l): as_exact_value(v) for l, v in lc.items()} for lc in level_charges
    ]
    chain: list[frozenset[int]] = [frozenset(top.labels)]
    for i, ch in enumerate(charges):
        expected = chain[-1]
        if frozenset(ch) != expected:
            raise MscError(
                f"level {i} charge must be defined exactly on {sorted(expected)}"
            )
        zero = frozenset(l for l, v in ch.items() if v.is_zero())
        if zero == expected:
            raise MscError(f"level {i} charge is identically zero")
        chain.append(zero)
    if chain[-1]:
        raise MscError(
            f"deepest level still vanishes on {sorted(chain[-1])}: a further "
            "level charge is missing"
        )
    chain.pop()  # drop the empty terminal set
    # half-plane conditions
    for l, v in sorted(charges[0].items()):
        if (len(chain) == 1 or l not in chain[1]) and not v.in_upper_semiclosed():
            raise MscError(
                f"level 0 simple {l} maps outside the semi-closed upper half plane"
            )
    for i in range(1, len(charges)):
        deeper = chain[i + 1] if i + 1 < len(chain) else frozenset()
        vals = sorted(
            (l, v) for l, v in charges[i].items() if l not in deeper
        )
        if _h_window_label(vals) is None:
            raise MscError(
                f"level {i} charge admits no rotation into the semi-closed "
                "upper half plane"
            )
    _check_type_constraints(top, chain)
    return MultiScaleStab(
        top,
        tuple(chain[1:]),
        tuple(tuple(sorted(ch.items())) for ch in charges),
    )


def vanishing_chain(m: MultiScaleStab) -> VanishingChain:
    return VanishingChain(
        tuple(
            (m.labels(i), tuple(m.level_components(i)))
            for i in range(1, m.L + 1)
        )
    )


def type_rho(m: MultiScaleStab) -> list[tuple[int, ...]]:
    """Component sizes per level, largest first."""
    return vanishing_chain(m).rho()


def normalize_representative(m: MultiScaleStab) -> MultiScaleStab:
    """Rotate each deeper level into the semi-closed upper half plane.

    Levels whose values already sit in the half plane are left alone; the
    rest are multiplied by -conj(v_a) for the canonical window label a, which
    lands a on the negative real axis.  Level 0 is never rescaled.
    """
    charges = [m.charge(0)]
    for i in range(1, m.L + 1):
        ch = m.charge(i)
        quot = [(l, ch[l]) for l in sorted(m.quotient_labels(i))]
        if all(v.in_upper_semiclosed() for _, v in quot):
            charges.append(ch)
            continue
        a = _h_window_label(quot)
        if a is None:
            raise MscError(f"level {i} admits no rotation into the half plane")
        scal = -(ch[a].conj())
        charges.append({l: scal * v for l, v in ch.items()})
    return MultiScaleStab(
        m.top,
        m.level_sets,
        tuple(tuple(sorted(ch.items())) for ch in charges),
    )


# ---------------------------------------------------------------------------
# Equivalence


def _label_correspondence(h1: Heart, h2: Heart) -> dict[int, int] | None:
    if canonical_form(h1) != canonical_form(h2):
        return None
    by_class = {c: l for l, c in zip(h2.labels, h2.classes)}
    return {l: by_class[c] for l, c in zip(h1.labels, h1.classes)}


def _proportional(pairs: list[tuple[ExactComplex, ExactComplex]]) -> bool:
    """True when the second coordinates are one common multiple of the first."""
    ref = next(((a, b) for a, b in pairs if not a.is_zero()), None)
    if ref is None:
        return all(b.is_zero() for _, b in pairs)
    ra, rb = ref
    if rb.is_zero():
        return False
    for a, b in pairs:
        if a.is_zero() != b.is_zero():
            return False
        if not (ra * b == rb * a):
            return False
    return True


def _same_saturated_span(span1, span2) -> bool:
    """Equality of the sublattices spanned by two integer vector families."""
    if len(span1) != len(span2):
        return False
    b1 = [list(v) for v in span1]
    b2 = [list(v) for v in span2]
    for v in b2:
        x = solve_in_basis(b1, v)
        if x is None or any(c.denominator != 1 for c in x):
            return False
    for v in b1:
        x = solve_in_basis(b2, v)
        if x is None or any(c.denominator != 1 for c in x):
            return False
    return True


def _level_value(m: MultiScaleStab, i: int, cls) -> ExactComplex | None:
    """The level-i charge on an ambient class lying in the level-i lattice."""
    basis = [list(m.top.cls(l)) for l in sorted(m.labels(i))]
    coeffs = solve_in_basis(basis, list(cls))
    if coeffs is None:
        return None
    ch = m.charge(i)
    total = EC.zero()
    for x, l in zip(coeffs, sorted(m.labels(i))):
        if x:
            total = total + ch[l] * x
    return total


def _compare_levels(m1: MultiScaleStab, m2: MultiScaleStab, projective0: bool) -> bool:
    """Equivalence on the faithful shadow: equal vanishing sublattice chains
    and per-level quotient charges agreeing as linear maps (up to one scalar
    per deeper level, and at level 0 on the nose unless projective).

    Representatives may differ by tilts inside the vanishing subcategories;
    such tilts change the top heart but none of the data compared here.
    """
    if m1.L != m2.L:
        return False
    n = m1.top.rank()
    if n != m2.top.rank():
        return False
    for i in range(1, m1.L + 1):
        if not _same_saturated_span(
            [m1.top.cls(l) for l in sorted(m1.labels(i))],
            [m2.top.cls(l) for l in sorted(m2.labels(i))],
        ):
            return False
    # level 0: both kill the level-1 lattice, so compare on the standard basis
    basis = [tuple(1 if j == k else 0 for j in range(n)) for k in range(n)]
    pairs0 = []
    for e in basis:
        v1 = _level_value(m1, 0, e)
        v2 = _level_value(m2, 0, e)
        if v1 is None or v2 is None:
            return False
        pairs0.append((v1, v2))
    if projective0:
        if not _proportional(pairs0):
            return False
    else:
        if any(not (a == b) for a, b in pairs0):
            return False
    for i in range(1, m1.L + 1):
        pairs = []
        for l in sorted(m1.labels(i)):
            v2 = _level_value(m2, i, m1.top.cls(l))
            if v2 is None:
                return False
            pairs.append((m1.charge(i)[l], v2))
        if not _proportional(pairs):
            return False
    # level-0 quotient hearts must agree on the nose: compare the simple
    # classes modulo the level-1 lattice (deeper hearts are free to move by
    # the projective action, so only their charges were compared above)
    deeper = [list(m1.top.cls(l)) for l in sorted(m1.labels(1))]

    def in_deeper(vec) -> bool:
        if not deeper:
            return all(x == 0 for x in vec)
        x = solve_in_basis(deeper, list(vec))
        return x is not None and all(c.denominator == 1 for c in x)

    left = [m1.top.cls(l) for l in sorted(m1.quotient_labels(0))]
    right = [m2.top.cls(l) for l in sorted(m2.quotient_labels(0))]
    if len(left) != len(right):
        return False
    remaining = list(right)
    for c in left:
        hit = next(
            (r for r in remaining if in_deeper([a - b for a, b in zip(c, r)])),
            None,
        )
        if hit is None:
            return False
        remaining.remove(hit)
    return True


def equivalent(m1: MultiScaleStab, m2: MultiScaleStab) -> bool:
    """Equal vanishing chains; quotient charges equal at level 0 and equal up
    to one nonzero scalar per deeper level."""
    return _compare_levels(m1, m2, projective0=False)


def projectively_equivalent(m1: MultiScaleStab, m2: MultiScaleStab) -> bool:
    return _compare_levels(m1, m2, projective0=True)


# ---------------------------------------------------------------------------
# The working state: tilts that carry hearts and all level charges along


class _State:
    def __init__(self, m: MultiScaleStab):
        self.heart = m.top
        self.levels: list[frozenset[int]] = list(m.level_sets)
        self.charges: list[dict[int, ExactComplex]] = [
            m.charge(i) for i in range(m.L + 1)
        ]
        n = self.heart.rank()
        self.cap = 80 * n * n + 16

    @property
    def L(self) -> int:
        return len(self.levels)

    def lset(self, i: int) -> frozenset[int]:
        if i == 0:
            return frozenset(self.heart.labels)
        if i <= self.L:
            return self.levels[i - 1]
        return frozenset()

    def tilt(self, s: int, direction: int) -> None:
        h = self.heart
        for t in h.labels:
            if t == s:
                continue
            mult = h.ext1(t, s) if direction > 0 else h.ext1(s, t)
            if not mult:
                continue
            for ch in self.charges:
                if t in ch:
                    if s not in ch:
                        raise AssertionError(
                            "tilt at a simple outside a level would change "
                            "that level's lattice"
                        )
                    ch[t] = ch[t] + ch[s] * mult
        for ch in self.charges:
            if s in ch:
                ch[s] = -ch[s]
        self.heart = _tilt(h, s, direction)

    def rotate_from(self, i0: int, factor: ExactComplex) -> None:
        for i in range(i0, self.L + 1):
            ch = self.charges[i]
            for l in ch:
                ch[l] = factor * ch[l]

    def _min_phase(self, labels, charge) -> int:
        best = None
        for l in labels:
            if best is None:
                best = l
                continue
            c = charge[l].cmp_phase(charge[best])
            if c < 0 or (c == 0 and l < best):
                best = l
        return best

    def depth_of(self, s: int) -> int:
        d = 0
        for k in range(1, self.L + 1):
            if s in self.lset(k):
                d = k
        return d

    def protected_tilt(self, s: int) -> list[tuple[int, int]]:
        """Forward tilt of the depth(s)-quotient at s, preserving all deeper
        levels; returns the flat elementary tilt word performed.

        Deeper simples extending s are removed first by tilting along the
        chains inside the next level (each such tilt is itself protected),
        then the tilt at s happens, then the chain tilts are reversed.  The
        net effect on every level below depth(s) is the identity, which is
        asserted.
        """
        d = self.depth_of(s)
        v = self.lset(d + 1)
        if not v:
            self.tilt(s, +1)
            return [(s, +1)]
        snapshot = {l: self.heart.cls(l) for l in v}
        word: list[tuple[int, int]] = []
        guard = 0
        while True:
            extenders = sorted(l for l in v if self.heart.ext1(l, s) == 1)
            if not extenders:
                break
            guard += 1
            if guard > self.cap:
                raise WallHit("convenient-representative chains did not terminate")
            word.extend(self.protected_tilt(extenders[0]))
        self.tilt(s, +1)
        undo = [(l, -dd) for (l, dd) in reversed(word)]
        for l, dd in undo:
            self.tilt(l, dd)
        if {l: self.heart.cls(l) for l in v} != snapshot:
            raise AssertionError("protected tilt failed to restore deeper levels")
        return word + [(s, +1)] + undo

    def settle(self, i: int) -> None:
        """Re-establish half-plane validity of quotients at levels >= i."""
        if i < self.L:
            self.settle(i + 1)
        quotient = sorted(self.lset(i) - self.lset(i + 1))
        charge = self.charges[i]
        steps = 0
        while True:
            offenders = [
                l for l in quotient if not charge[l].in_upper_semiclosed()
            ]
            if not offenders:
                break
            steps += 1
            if steps > self.cap:
                raise WallHit(f"tilt loop at level {i} did not terminate")
            x = self._min_phase(offenders, charge)
            self.protected_tilt(x)

    def act_from(self, i0: int, re: Fraction, im: Fraction) -> None:
        """Apply the action by re + i*im to levels i0..L, in unit chunks.

        One settle pass realizes the torsion-free tilt of a rotation with
        real part at most one half-turn; larger rotations decompose by the
        action axiom.  The even rotation part only contributes shift
        bookkeeping at the top.
        """
        even = 2 * (re // 2)
        residual = re - even
        if im:
            self.rotate_from(i0, EC.unit(Fraction(0), im))
        if even and i0 == 0:
            self.heart = shift_heart(self.heart, int(even))
        while residual > 0:
            step = min(residual, Fraction(1))
            self.rotate_from(i0, EC.unit(step))
            self.settle(i0)
            residual -= step

    def merge(self, j: int) -> None:
        """Remove the passage between levels j-1 and j."""
        nj, njp = self.lset(j), self.lset(j + 1)
        for l in sorted(nj - njp):
            self.charges[j - 1][l] = self.charges[j][l]
        del self.charges[j]
        del self.levels[j - 1]

    def freeze(self) -> MultiScaleStab:
        return MultiScaleStab(
            self.heart,
            tuple(self.levels),
            tuple(tuple(sorted(ch.items())) for ch in self.charges),
        )


# ---------------------------------------------------------------------------
# The action and plumbing


def c_act_msc(m: MultiScaleStab, lam) -> MultiScaleStab:
    """Multiply every level charge by e^(-i*pi*lam) and repair the hearts.

    The vanishing chain is preserved; deeper levels are settled first, then
    lifted tilts fix the quotients.  Deeper levels are normalized into the
    half plane beforehand (a representative change inside the equivalence
    class).
    """
    m = normalize_representative(m)
    re, im = as_lambda(lam)
    st = _State(m)
    st.act_from(0, re, im)
    return st.freeze()


def plumb(m: MultiScaleStab, taus: Sequence) -> MultiScaleStab:
    """Plumb the level passages with parameters tau (None = no plumbing).

    Processing runs from the deepest finite entry upward: rotate the charges
    at and below the passage by e^(-i*pi*tau_j), settle the hearts, then
    merge levels j-1 and j with the disjoint-decomposition charge.  Finite
    entries must have negative imaginary part.
    """
    if len(taus) != m.L:
        raise MscError(f"expected {m.L} plumbing entries, got {len(taus)}")
    m = normalize_representative(m)
    st = _State(m)
    finite = []
    for j, tau in enumerate(taus, start=1):
        if tau is INFTY:
            continue
        re, im = as_lambda(tau)
        if im >= 0:
            raise MscError(f"plumbing entry {j} must have negative imaginary part")
        finite.append((j, re, im))
    for j, re, im in sorted(finite, reverse=True):
        st.act_from(j, re, im)
        st.merge(j)
    out = st.freeze()
    # plumbing valid inputs always yields a valid multi-scale object
    for l in sorted(out.quotient_labels(0)):
        if not out.charge(0)[l].in_upper_semiclosed():
            raise AssertionError(
                f"plumbed charge left the half plane on simple {l}"
            )
    return out


# ---------------------------------------------------------------------------
# Commutation defect


def _in_basis_value(heart: Heart, charge: dict[int, ExactComplex], cls) -> ExactComplex:
    coeffs = solve_in_basis([list(c) for c in heart.classes], list(cls))
    if coeffs is None:
        raise MscError("class outside the heart's lattice span")
    total = EC.zero()
    for x, l in zip(coeffs, heart.labels):
        if x:
            total = total + charge[l] * x
    return total


def is_intermediate(h: Heart, base: Heart) -> bool:
    """Every simple class is a nonnegative or nonpositive base combination."""
    basis = [list(c) for c in base.classes]
    for c in h.classes:
        x = solve_in_basis(basis, list(c))
        if x is None:
            return False
        if not (all(v >= 0 for v in x) or all(v <= 0 for v in x)):
            return False
    return True


@dataclass(frozen=True)
class DefectResult:
    sigma_tilde: MultiScaleStab   # lam . (tau * m)
    sigma_hat: MultiScaleStab     # tau * (lam . m)
    max_simple_defect: float
    bound: float
    within_bound: bool
    per_simple: tuple[tuple[int, float], ...]


def commutation_defect(m: MultiScaleStab, lam, tau, tol: float = 1e-9) -> DefectResult:
    """Compare lam.(tau*m) against tau*(lam.m) on the level-0 simples.

    Requires one level below zero and 0 <= Re(lam), 0 <= Re(tau),
    Re(lam + tau) < 1.  The defect is measured against the coarse bound
    ell * |e^(-i*pi*(lam+tau))| * sum of the lower-level simple masses, with
    ell the number of indecomposable classes of the level-0 quotient.
    """
    if m.L != 1:
        raise MscError("the commutation defect is defined for one level below zero")
    lre, lim_ = as_lambda(lam)
    tre, tim = as_lambda(tau)
    if lre < 0 or tre < 0 or lre + tre >= 1:
        raise MscError("need 0 <= Re(lam), 0 <= Re(tau), Re(lam + tau) < 1")
    if tim >= 0:
        raise MscError("tau must have negative imaginary part")
    m = normalize_representative(m)
    sigma_tilde = c_act_msc(plumb(m, [(tre, tim)]), (lre, lim_))
    sigma_hat = plumb(c_act_msc(m, (lre, lim_)), [(tre, tim)])
    if not (
        is_intermediate(sigma_tilde.top, m.top)
        and is_intermediate(sigma_hat.top, m.top)
    ):
        raise AssertionError("defect hearts must be intermediate for the base heart")
    per = []
    worst = 0.0
    cht, chh = sigma_tilde.charge(0), sigma_hat.charge(0)
    for l in sorted(m.top.labels):
        cls = m.top.cls(l)
        vt = _in_basis_value(sigma_tilde.top, cht, cls)
        vh = _in_basis_value(sigma_hat.top, chh, cls)
        d = abs(vt - vh)
        per.append((l, d))
        worst = max(worst, d)
    ell = len(enumerate_strings(restrict(m.top.ext, sorted(m.quotient_labels(0)))))
    scale = math.exp(math.pi * (lim_ + tim))
    lower = sum(abs(v) for l, v in m.charge(1).items())
    bound = ell * scale * lower
    within = worst <= bound * (1 + tol) + tol
    return DefectResult(sigma_tilde, sigma_hat, worst, bound, within, tuple(per))


# ---------------------------------------------------------------------------
# Neighborhoods and charts


@dataclass(frozen=True)
class NeighborhoodSpec:
    delta: tuple[float, ...]               # per passage 1..L
    eps: float = 1e-6                      # default radius per merged interval
    eps_by_interval: tuple[tuple[tuple[int, ...], float], ...] = ()

    def eps_for(self, interval: tuple[int, ...]) -> float:
        for key, val in self.eps_by_interval:
            if key == interval:
                return val
        return self.eps


@dataclass(frozen=True)
class NeighborhoodVerdict:
    accepted: bool
    reason: str
    tau: tuple | None = None               # per passage: (re, im) floats or None
    distances: tuple[tuple[tuple[int, ...], float], ...] = ()


def in_neighborhood(
    candidate: MultiScaleStab, base: MultiScaleStab, spec: NeighborhoodSpec
) -> NeighborhoodVerdict:
    """Decide membership of candidate in the plumbing neighborhood of base.

    The witness tau is recovered per plumbed passage from the ratio of the
    candidate charge to the base level charge (principal logarithm with
    negative imaginary part; the real part carries the documented
    translation ambiguity, normalized into [0, 2)).  Both objects must live
    on the same label set; representatives are compared after canonical
    half-plane normalization.
    """
    if set(candidate.top.labels) != set(base.top.labels):
        return NeighborhoodVerdict(False, "different underlying label sets")
    if len(spec.delta) != base.L:
        raise MscError("spec.delta must have one entry per base passage")
    base = normalize_representative(base)
    candidate = normalize_representative(candidate)
    base_chain = [base.labels(i) for i in range(base.L + 1)]
    cand_chain = [candidate.labels(i) for i in range(candidate.L + 1)]
    positions = []
    for ncand in cand_chain:
        if ncand not in base_chain:
            return NeighborhoodVerdict(
                False, "vanishing chain is not an undegeneration of the base chain"
            )
        positions.append(base_chain.index(ncand))
    # candidate level holding base level j
    def cand_level_of(j: int) -> int:
        return max(i for i, p in enumerate(positions) if p <= j)

    # cumulative factors at each base level
    cums: dict[int, complex] = {}
    for j in range(base.L + 1):
        if j in positions:
            cums[j] = 1.0 + 0.0j
            continue
        i = cand_level_of(j)
        cand_heart_classes = [
            list(candidate.top.cls(l)) for l in sorted(candidate.labels(i))
        ]
        cand_vals = [
            candidate.charge(i)[l] for l in sorted(candidate.labels(i))
        ]
        pairs = []
        for l in sorted(base.labels(j) - base.labels(j + 1)):
            coeffs = solve_in_basis(cand_heart_classes, list(base.top.cls(l)))
            if coeffs is None:
                return NeighborhoodVerdict(
                    False, f"base level {j} lattice not contained in candidate level {i}"
                )
            cval = EC.zero()
            for x, v in zip(coeffs, cand_vals):
                if x:
                    cval = cval + v * x
            pairs.append((base.charge(j)[l], cval))
        if not _proportional(pairs):
            return NeighborhoodVerdict(
                False, f"candidate charge is not proportional to the base at level {j}"
            )
        bval, cval = next((a, b) for a, b in pairs if not a.is_zero())
        cums[j] = complex(cval) / complex(bval)
    taus: list = []
    for p in range(1, base.L + 1):
        if p in positions:
            taus.append(INFTY)
            continue
        ratio = cums[p] / cums[p - 1]
        r = abs(ratio)
        if r >= spec.delta[p - 1]:
            return NeighborhoodVerdict(
                False, f"plumbing scale {r:.3g} at passage {p} exceeds delta"
            )
        if r >= 1.0:
            return NeighborhoodVerdict(
                False, f"passage {p} ratio is not contracting"
            )
        tau_re = (-cmath.phase(ratio) / math.pi) % 2.0
        tau_im = math.log(r) / math.pi
        taus.append((Fraction(tau_re).limit_denominator(1 << 40),
                     Fraction(tau_im).limit_denominator(1 << 40)))
    recon = plumb(base, taus)
    corr = _label_correspondence(recon.top, candidate.top)
    if corr is None:
        return NeighborhoodVerdict(
            False, "plumbed base does not match the candidate heart"
        )
    distances = []
    for i in range(candidate.L + 1):
        interval = tuple(j for j in range(base.L + 1) if cand_level_of(j) == i)
        total = 0.0
        chc = candidate.charge(i)
        chr_ = recon.charge(i)
        for l in sorted(recon.labels(i) - recon.labels(i + 1)):
            diff = chr_[l] - chc[corr[l]]
            total += abs(diff) ** 2
        dist = math.sqrt(total)
        distances.append((interval, dist))
        if dist > spec.eps_for(interval):
            return NeighborhoodVerdict(
                False,
                f"quotient charge distance {dist:.3g} at interval {interval} "
                "exceeds epsilon",
                tuple(taus),
                tuple(distances),
            )
    return NeighborhoodVerdict(True, "plumbing witness found", tuple(taus), tuple(distances))


@dataclass(frozen=True)
class ChartCoords:
    t: tuple[complex, ...]
    pivots: tuple[int, ...]
    nonpivot: tuple[tuple[int, tuple[tuple[int, complex], ...]], ...]
    top_values: tuple[tuple[int, complex], ...]


def chart_coords(
    point: MultiScaleStab, base: MultiScaleStab, spec: NeighborhoodSpec | None = None
) -> ChartCoords:
    """Chart coordinates of a point near base: t_i = e^(-2*pi*i*tau_i/ell_i)
    from the plumbing witness, pivot-normalized deeper charges, and the
    level-0 charge values."""
    if spec is None:
        spec = NeighborhoodSpec(delta=(1.0,) * base.L, eps=float("inf"))
    verdict = in_neighborhood(point, base, spec)
    if not verdict.accepted:
        raise MscError(f"point is outside the base neighborhood: {verdict.reason}")
    ells = [lvl.ell for lvl in simple_twist_data(type_rho(base)).levels]
    ts = []
    for (tau, ell) in zip(verdict.tau, ells):
        if tau is INFTY:
            ts.append(0j)
        else:
            z = complex(Fraction(tau[0]), 0) + 1j * complex(Fraction(tau[1]), 0)
            ts.append(cmath.exp(-2j * cmath.pi * z / ell))
    point = normalize_representative(point)
    pivots = []
    nonpivot = []
    for i in range(1, point.L + 1):
        ch = point.charge(i)
        quo = sorted(point.quotient_labels(i))
        pivot = next(l for l in quo if not ch[l].is_zero())
        pivots.append(pivot)
        pv = complex(ch[pivot])
        nonpivot.append(
            (i, tuple((l, complex(ch[l]) / pv) for l in quo if l != pivot))
        )
    top_vals = tuple(
        (l, complex(point.charge(0)[l])) for l in sorted(point.quotient_labels(0))
    )
    return ChartCoords(tuple(ts), tuple(pivots), tuple(nonpivot), top_vals)

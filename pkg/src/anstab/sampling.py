"""Random generators for hearts and multi-scale objects (tests, examples)."""

from __future__ import annotations

import random
from fractions import Fraction

from .exact import gr
from .hearts import Heart, forward_tilt, standard_heart
from .multiscale import MscError, MultiScaleStab, validate_msc


def random_heart(rng: random.Random, n: int, depth: int = 3) -> Heart:
    h = standard_heart(n)
    for _ in range(rng.randrange(depth + 1)):
        h = forward_tilt(h, rng.choice(h.labels))
    return h


def _random_h_value(rng: random.Random):
    """A Gaussian rational in the semi-closed upper half plane."""
    if rng.random() < 0.1:
        return gr(Fraction(-rng.randrange(1, 7), rng.randrange(1, 4)), 0)
    re = Fraction(rng.randrange(-6, 7), rng.randrange(1, 4))
    im = Fraction(rng.randrange(1, 7), rng.randrange(1, 4))
    return gr(re, im)


def _valid_subset(rng: random.Random, h: Heart, labels: frozenset[int]):
    """A proper nonempty subset of ``labels`` with a valid component type."""
    pool = sorted(labels)
    if len(pool) < 2:
        return None
    for _ in range(40):
        k = rng.randrange(1, len(pool))
        sub = frozenset(rng.sample(pool, k))
        comps = h.ext.components(sub)
        total = sum(len(c) + 1 for c in comps)
        if total > len(pool) + 1:
            continue
        if total == len(pool) + 1 and len(comps) < 2:
            continue
        return sub
    return None


def random_msc(
    rng: random.Random, n: int, max_levels: int = 2, depth: int = 3
) -> MultiScaleStab:
    """A random valid multi-scale object with Gaussian-rational charges."""
    for _ in range(200):
        h = random_heart(rng, n, depth)
        labels = frozenset(h.labels)
        chain = [labels]
        want = rng.randrange(0, max_levels + 1)
        ok = True
        for _ in range(want):
            sub = _valid_subset(rng, h, chain[-1])
            if sub is None:
                ok = False
                break
            chain.append(sub)
        if not ok:
            continue
        charges = []
        for i, cur in enumerate(chain):
            deeper = chain[i + 1] if i + 1 < len(chain) else frozenset()
            charges.append(
                {
                    l: (_random_h_value(rng) if l not in deeper else gr(0))
                    for l in cur
                }
            )
        try:
            return validate_msc(h, charges)
        except MscError:
            continue
    raise RuntimeError("could not sample a valid multi-scale object")

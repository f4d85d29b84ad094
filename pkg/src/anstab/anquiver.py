"""Quivers with potential of A_n type.

A quiver is stored as a vertex set, an arrow list, and the set of oriented
3-cycles contributed by the potential (each 3-cycle is a triple of arrows
closing up head-to-tail).  In the A_n mutation class the potential is a sum
of such 3-cycles and every arrow lies in at most one of them; both facts are
enforced at construction and after every mutation.

Conventions.  An arrow v -> w in the ext-quiver of a heart means
dim Ext^1(S_v, S_w) = 1.  The Euler pairing on simple classes is then
chi(e_i, e_j) = #arrows(j -> i) - #arrows(i -> j); it is antisymmetric, as
forced by the CY3 duality  hom - ext^1 + ext^1(op) - hom(op).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence


class QuiverError(ValueError):
    pass


class StringCapExceeded(QuiverError):
    """The string enumeration exceeded its cap; the input is not A_n-type."""


Arrow = tuple[int, int]
Cycle = tuple[Arrow, Arrow, Arrow]


def _canon_cycle(cycle: Sequence[Arrow]) -> Cycle:
    """Rotate a 3-cycle so its lexicographically smallest arrow comes first."""
    rots = [tuple(cycle[i:]) + tuple(cycle[:i]) for i in range(3)]
    return min(rots)  # type: ignore[return-value]


@dataclass(frozen=True)
class QuiverWithPotential:
    vertices: tuple[int, ...]
    arrows: tuple[Arrow, ...]
    cycles: frozenset[Cycle]

    def __post_init__(self):
        vs = set(self.vertices)
        seen = set()
        for (a, b) in self.arrows:
            if a == b:
                raise QuiverError(f"loop at vertex {a}")
            if a not in vs or b not in vs:
                raise QuiverError(f"arrow ({a},{b}) leaves the vertex set")
            if (b, a) in seen:
                raise QuiverError(f"2-cycle between {a} and {b}")
            if (a, b) in seen:
                raise QuiverError(f"parallel arrows ({a},{b})")
            seen.add((a, b))
        used: set[Arrow] = set()
        for cyc in self.cycles:
            if len(cyc) != 3:
                raise QuiverError("potential terms must be 3-cycles")
            for i in range(3):
                if cyc[i] not in seen:
                    raise QuiverError(f"cycle arrow {cyc[i]} not in the quiver")
                if cyc[i][1] != cyc[(i + 1) % 3][0]:
                    raise QuiverError(f"cycle {cyc} does not close up")
                if cyc[i] in used:
                    raise QuiverError(f"arrow {cyc[i]} lies in two potential cycles")
                used.add(cyc[i])

    # -- constructors

    @staticmethod
    def build(vertices: Iterable[int], arrows: Iterable[Arrow],
              cycles: Iterable[Sequence[Arrow]] = ()) -> "QuiverWithPotential":
        return QuiverWithPotential(
            tuple(sorted(vertices)),
            tuple(sorted(tuple(a) for a in arrows)),
            frozenset(_canon_cycle(tuple(map(tuple, c))) for c in cycles),
        )

    # -- basic queries

    def arrow_count(self, v: int, w: int) -> int:
        return sum(1 for a in self.arrows if a == (v, w))

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for (a, b) in self.arrows:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def components(self, subset: Iterable[int] | None = None) -> list[frozenset[int]]:
        """Connected components of the underlying graph, optionally restricted."""
        verts = set(self.vertices) if subset is None else set(subset)
        adj = {v: set() for v in verts}
        for (a, b) in self.arrows:
            if a in verts and b in verts:
                adj[a].add(b)
                adj[b].add(a)
        comps = []
        todo = set(verts)
        while todo:
            seed = min(todo)
            comp = {seed}
            stack = [seed]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            todo -= comp
            comps.append(frozenset(comp))
        return sorted(comps, key=min)

    def cycle_of(self, arrow: Arrow) -> Cycle | None:
        for cyc in self.cycles:
            if arrow in cyc:
                return cyc
        return None

    # -- serialization

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "arrows": [list(a) for a in self.arrows],
            "cycles": [[list(a) for a in cyc] for cyc in sorted(self.cycles)],
        }

    @staticmethod
    def from_json(data: dict) -> "QuiverWithPotential":
        return QuiverWithPotential.build(
            data["vertices"],
            [tuple(a) for a in data["arrows"]],
            [[tuple(a) for a in cyc] for cyc in data.get("cycles", [])],
        )

    def __str__(self) -> str:
        return json.dumps(self.to_json())


def make_linear(n: int) -> QuiverWithPotential:
    """The linear quiver 1 -> 2 -> ... -> n with empty potential."""
    if n < 1:
        raise QuiverError("a linear quiver needs at least one vertex")
    return QuiverWithPotential.build(
        range(1, n + 1), [(i, i + 1) for i in range(1, n)]
    )


def mutate(q: QuiverWithPotential, k: int) -> QuiverWithPotential:
    """Mutation at the vertex k, with 2-cycle cancellation against the potential.

    For every path a: i -> k, b: k -> j we either add the composite arrow
    [ab]: i -> j together with the potential 3-cycle ([ab], b*, a*), or, when
    {a, b} already lie in a potential 3-cycle closed by c: j -> i, cancel the
    would-be 2-cycle by deleting c and adding nothing.  In the A_n mutation
    class this reduction is complete: any closing arrow belongs to a potential
    term with the path, so no 2-cycles survive (checked at construction).
    """
    if k not in q.vertices:
        raise QuiverError(f"unknown vertex {k}")
    incoming = [a for a in q.arrows if a[1] == k]
    outgoing = [a for a in q.arrows if a[0] == k]
    removed: set[Arrow] = set()
    composites: list[Arrow] = []
    new_cycles: list[tuple[Arrow, Arrow, Arrow]] = []
    for a, b in itertools.product(incoming, outgoing):
        i, j = a[0], b[1]
        cyc = q.cycle_of(a)
        if cyc is not None and b in cyc:
            third = next(x for x in cyc if x not in (a, b))
            removed.add(third)
        else:
            comp = (i, j)
            composites.append(comp)
            new_cycles.append((comp, (j, k), (k, i)))
    arrows: list[Arrow] = []
    for a in q.arrows:
        if a in removed:
            continue
        if a[0] == k or a[1] == k:
            arrows.append((a[1], a[0]))
        else:
            arrows.append(a)
    arrows.extend(composites)
    kept_cycles = [
        cyc
        for cyc in q.cycles
        if all(x not in removed and k not in x for x in cyc)
    ]
    return QuiverWithPotential.build(q.vertices, arrows, kept_cycles + new_cycles)


def restrict(q: QuiverWithPotential, subset: Iterable[int]) -> QuiverWithPotential:
    """Full subquiver on ``subset``; keeps the potential cycles lying inside."""
    sub = set(subset)
    if not sub <= set(q.vertices):
        raise QuiverError("restriction set is not a vertex subset")
    arrows = [a for a in q.arrows if a[0] in sub and a[1] in sub]
    cycles = [c for c in q.cycles if all(x in arrows for x in c)]
    return QuiverWithPotential.build(sub, arrows, cycles)


def euler_pairing(q: QuiverWithPotential, a: Sequence[int], b: Sequence[int]) -> int:
    """chi(a, b) = sum over arrows (v -> w) of a_w b_v - a_v b_w."""
    n = len(q.vertices)
    if len(a) != n or len(b) != n:
        raise QuiverError("class length does not match the vertex count")
    idx = {v: i for i, v in enumerate(q.vertices)}
    total = 0
    for (v, w) in q.arrows:
        total += a[idx[w]] * b[idx[v]] - a[idx[v]] * b[idx[w]]
    return total


# ---------------------------------------------------------------------------
# String objects


@dataclass(frozen=True)
class StringObject:
    """A string: reduced relation-avoiding walk in the quiver.

    ``steps`` is a tuple of (arrow, direction); direction +1 traverses the
    arrow, -1 traverses its formal inverse.  ``source`` is the start vertex;
    a trivial string has no steps.
    """

    source: int
    steps: tuple[tuple[Arrow, int], ...]

    def vertex_path(self) -> list[int]:
        path = [self.source]
        for (a, b), d in self.steps:
            path.append(b if d > 0 else a)
        return path

    def dimension_vector(self, vertices: Sequence[int]) -> tuple[int, ...]:
        counts = {v: 0 for v in vertices}
        for v in self.vertex_path():
            counts[v] += 1
        return tuple(counts[v] for v in vertices)


def _forbidden_pair(q: QuiverWithPotential, x: Arrow, y: Arrow) -> bool:
    """True when the path 'x then y' composes to zero in the Jacobian algebra."""
    if x[1] != y[0]:
        return True
    cyc = q.cycle_of(x)
    return cyc is not None and y in cyc


def _step_ok(q: QuiverWithPotential, prev: tuple[Arrow, int], nxt: tuple[Arrow, int]) -> bool:
    (pa, pd), (na, nd) = prev, nxt
    if pa == na and pd == -nd:
        return False  # immediate backtrack
    if pd > 0 and nd > 0:
        return not _forbidden_pair(q, pa, na)
    if pd < 0 and nd < 0:
        return not _forbidden_pair(q, na, pa)
    return True


def _walk_end(source: int, steps) -> int:
    if not steps:
        return source
    (a, b), d = steps[-1]
    return b if d > 0 else a


def _canonical_walk(source: int, steps):
    if not steps:
        return (source,)
    fwd = (source,) + steps
    rev_steps = tuple((arr, -d) for arr, d in reversed(steps))
    rev = (_walk_end(source, steps),) + rev_steps
    return min(fwd, rev)


def enumerate_strings(q: QuiverWithPotential, cap: int | None = None) -> list[StringObject]:
    """All strings of the Jacobian algebra, including the trivial ones.

    The enumeration aborts once more than ``cap`` (default 10*n^2) distinct
    strings are found, which signals a non-A_n-type input.
    """
    n = len(q.vertices)
    if cap is None:
        cap = 10 * n * n
    seen = {}
    for v in q.vertices:
        seen[(v,)] = StringObject(v, ())
    frontier = []
    for a in q.arrows:
        for d in (1, -1):
            src = a[0] if d > 0 else a[1]
            walk = ((a, d),)
            key = _canonical_walk(src, walk)
            if key not in seen:
                seen[key] = StringObject(src, walk)
            frontier.append((src, walk))
    while frontier:
        if len(seen) > cap:
            raise StringCapExceeded(
                f"more than {cap} strings; the quiver is not of A_n type"
            )
        src, walk = frontier.pop()
        end = _walk_end(src, walk)
        for a in q.arrows:
            for d in (1, -1):
                start = a[0] if d > 0 else a[1]
                if start != end:
                    continue
                if not _step_ok(q, walk[-1], (a, d)):
                    continue
                nwalk = walk + ((a, d),)
                key = _canonical_walk(src, nwalk)
                if key in seen:
                    continue
                seen[key] = StringObject(src, nwalk)
                frontier.append((src, nwalk))
    if len(seen) > cap:
        raise StringCapExceeded(
            f"more than {cap} strings; the quiver is not of A_n type"
        )
    return sorted(seen.values(), key=lambda s: (len(s.steps), s.source, s.steps))


# ---------------------------------------------------------------------------
# Isomorphism testing (canonical labeling by degree-refined backtracking)


def _degree_profile(q: QuiverWithPotential, v: int):
    indeg = sum(1 for a in q.arrows if a[1] == v)
    outdeg = sum(1 for a in q.arrows if a[0] == v)
    incyc = sum(1 for c in q.cycles for a in c if v == a[0])
    return (indeg, outdeg, incyc)


def is_isomorphic(q1: QuiverWithPotential, q2: QuiverWithPotential) -> bool:
    """Isomorphism of quivers with potential (vertex relabeling)."""
    if len(q1.vertices) != len(q2.vertices) or len(q1.arrows) != len(q2.arrows):
        return False
    if len(q1.cycles) != len(q2.cycles):
        return False
    prof1 = sorted(_degree_profile(q1, v) for v in q1.vertices)
    prof2 = sorted(_degree_profile(q2, v) for v in q2.vertices)
    if prof1 != prof2:
        return False
    # group q2 vertices by profile and backtrack over compatible bijections
    by_prof: dict[tuple, list[int]] = {}
    for v in q2.vertices:
        by_prof.setdefault(_degree_profile(q2, v), []).append(v)
    order = sorted(q1.vertices, key=lambda v: (len(by_prof[_degree_profile(q1, v)]), v))
    arrows2 = set(q2.arrows)

    def extend(i: int, mapping: dict[int, int], used: set[int]) -> bool:
        if i == len(order):
            mapped = frozenset(
                _canon_cycle(tuple((mapping[a], mapping[b]) for (a, b) in cyc))
                for cyc in q1.cycles
            )
            return mapped == q2.cycles
        v = order[i]
        for w in by_prof[_degree_profile(q1, v)]:
            if w in used:
                continue
            ok = True
            for u, x in mapping.items():
                if ((u, v) in q1.arrows) != ((x, w) in arrows2):
                    ok = False
                    break
                if ((v, u) in q1.arrows) != ((w, x) in arrows2):
                    ok = False
                    break
            if ok:
                mapping[v] = w
                used.add(w)
                if extend(i + 1, mapping, used):
                    return True
                del mapping[v]
                used.remove(w)
        return False

    return extend(0, {}, set())

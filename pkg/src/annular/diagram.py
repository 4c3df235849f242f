"""Affine (annular) set-partition diagrams.

A diagram of shape (s, t) lives on the strip with vertices at the integers
of the bottom and top lines.  It is invariant under the translation T that
shifts bottom indices by s and top indices by t, so it is stored through
one representative per translation orbit of blocks.

Vertices are addressed as (side, pos, copy) with side 0 = bottom, 1 = top,
0 <= pos < arity and copy in Z; the global index is pos + copy * arity.
A block is kept as ``Block(period, members)`` where members are sorted
(copy, side, pos) triples.  Period 0 means a finite block; period k > 0
means the block is invariant under T^k and then copies are residues mod k.
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from math import gcd
from typing import Iterable, NamedTuple

BOTTOM, TOP = 0, 1
_SIDE_NAMES = {"b": BOTTOM, "t": TOP, BOTTOM: BOTTOM, TOP: TOP}


class DiagramError(ValueError):
    pass


class Block(NamedTuple):
    period: int
    members: tuple  # sorted (copy, side, pos)

    @property
    def size(self):
        return len(self.members) if self.period == 0 else None

    def is_through(self) -> bool:
        sides = {m[1] for m in self.members}
        return len(sides) == 2

    def span(self) -> int:
        if self.period:
            return self.period
        copies = [m[0] for m in self.members]
        return max(copies) - min(copies)


def _normalize_block(period: int, members) -> Block:
    members = list(members)
    if period == 0:
        c0 = min(c for c, _, _ in members)
        return Block(0, tuple(sorted((c - c0, s, p) for c, s, p in members)))
    best = None
    for j in range(period):
        cand = tuple(sorted(((c + j) % period, s, p) for c, s, p in members))
        if best is None or cand < best:
            best = cand
    return Block(period, best)


class _WeightedUF:
    """Union-find whose edges carry integer copy offsets.

    ``find(x)`` returns (root, D) meaning (x, c) ~ (root, c + D).  A class
    picks up torsion when a union closes a cycle with nonzero net offset;
    the class is then invariant under that many copy shifts.
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.off = [0] * n
        self.tors = [0] * n

    def find(self, x):
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        root = x
        acc = 0
        for y in reversed(path):
            acc += self.off[y]
            self.off[y] = acc
            self.parent[y] = root
        if path:
            return root, self.off[path[0]]
        return root, 0

    def union(self, u, v, w):
        """Record (u, c) ~ (v, c + w)."""
        ru, du = self.find(u)
        rv, dv = self.find(v)
        delta = w + dv - du  # (ru, x) ~ (rv, x + delta)
        if ru == rv:
            self.tors[ru] = gcd(self.tors[ru], abs(delta))
            return
        self.parent[ru] = rv
        self.off[ru] = delta
        self.tors[rv] = gcd(self.tors[rv], self.tors[ru])

    def add_torsion(self, u, k):
        r, _ = self.find(u)
        self.tors[r] = gcd(self.tors[r], abs(k))


@dataclass(frozen=True, order=True)
class AffineDiagram:
    s: int
    t: int
    loops: int
    blocks: tuple = field(default=())

    # -- structural helpers -------------------------------------------
    def arity(self, side: int) -> int:
        return self.s if side == BOTTOM else self.t

    def through_blocks(self):
        return [b for b in self.blocks if b.is_through()]

    def n_through(self) -> int:
        return len(self.through_blocks())

    def max_span(self) -> int:
        return max((b.span() for b in self.blocks), default=0)

    def has_wrapping(self) -> bool:
        return any(b.period for b in self.blocks)

    def slot_map(self):
        """(side, pos) -> (block index, copy of that slot's representative)."""
        out = {}
        for i, b in enumerate(self.blocks):
            for c, side, pos in b.members:
                out[(side, pos)] = (i, c)
        return out

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class ScaledElement:
    """beta^beta * alpha^alpha * coeff * diagram."""

    diagram: AffineDiagram
    beta: int = 0
    alpha: int = 0
    coeff: object = 1

    def reduced(self) -> "ScaledElement":
        """Move non-contractible loops into the alpha exponent."""
        d = self.diagram
        if d.loops == 0:
            return self
        return ScaledElement(
            AffineDiagram(d.s, d.t, 0, d.blocks), self.beta, self.alpha + d.loops, self.coeff
        )

    def merged(self) -> "ScaledElement":
        """Identify alpha with beta (the alpha = beta specialisation)."""
        r = self.reduced()
        return ScaledElement(r.diagram, r.beta + r.alpha, 0, r.coeff)

    def __mul__(self, other: "ScaledElement") -> "ScaledElement":
        prod = compose(self.diagram, other.diagram)
        return ScaledElement(
            prod.diagram,
            self.beta + other.beta + prod.beta,
            self.alpha + other.alpha,
            self.coeff * other.coeff,
        )


# --- construction -------------------------------------------------------

def _vertex(side, index, s, t):
    side = _SIDE_NAMES[side]
    ar = s if side == BOTTOM else t
    if ar == 0:
        raise DiagramError("no vertices on that side")
    return side, index % ar, index // ar


def _from_unionfind(uf, s, t, slot_id, outer_slots, extra_loops):
    classes = {}
    for slot in outer_slots:
        r, d = uf.find(slot_id[slot])
        classes.setdefault(r, []).append((-d, slot[0], slot[1]))
    blocks = []
    for r, members in classes.items():
        period = uf.tors[r]
        if period:
            members = [(c % period, side, pos) for c, side, pos in members]
        blocks.append(_normalize_block(period, members))
    return AffineDiagram(s, t, extra_loops, tuple(sorted(blocks)))


def canonicalize(s: int, t: int, loops: int = 0, blocks=(), edges=(), wraps=()) -> AffineDiagram:
    """Build the normalized diagram from raw cover data.

    ``blocks``: iterables of (side, global index) vertices, pairwise disjoint.
    ``edges``: pairs of vertices, merged freely.
    ``wraps``: pairs (k, vertices) describing blocks invariant under T^k.
    Vertices not mentioned anywhere become singletons.
    """
    if loops < 0:
        raise DiagramError("negative loop count")
    if s < 0 or t < 0:
        raise DiagramError("negative arity")
    slots = [(BOTTOM, p) for p in range(s)] + [(TOP, p) for p in range(t)]
    slot_id = {sl: i for i, sl in enumerate(slots)}
    uf = _WeightedUF(len(slots))
    owner = {}

    def claim(vertices, tag):
        verts = [_vertex(side, idx, s, t) for side, idx in vertices]
        seen = set()
        for side, pos, c in verts:
            if (side, pos, c) in seen:
                raise DiagramError("vertex covered twice in one block")
            seen.add((side, pos, c))
            prev = owner.get((side, pos))
            if prev is not None and prev != tag:
                raise DiagramError("overlapping blocks at %s" % ((side, pos),))
            owner[(side, pos)] = tag
        return verts

    for n, blk in enumerate(blocks):
        verts = claim(list(blk), ("block", n))
        if not verts:
            raise DiagramError("empty block")
        s0, p0, c0 = verts[0]
        for side, pos, c in verts[1:]:
            uf.union(slot_id[(s0, p0)], slot_id[(side, pos)], c - c0)
    for n, (k, blk) in enumerate(wraps):
        if k < 1:
            raise DiagramError("wrap period must be positive")
        verts = claim(list(blk), ("wrap", n))
        s0, p0, c0 = verts[0]
        uf.add_torsion(slot_id[(s0, p0)], k)
        for side, pos, c in verts[1:]:
            uf.union(slot_id[(s0, p0)], slot_id[(side, pos)], c - c0)
    for u, v in edges:
        su, pu, cu = _vertex(u[0], u[1], s, t)
        sv, pv, cv = _vertex(v[0], v[1], s, t)
        uf.union(slot_id[(su, pu)], slot_id[(sv, pv)], cv - cu)
    return _from_unionfind(uf, s, t, slot_id, slots, loops)


def from_blocks(s: int, t: int, blocks: Iterable[Block], loops: int = 0) -> AffineDiagram:
    """Re-normalize a list of Block values (used after local edits)."""
    out = tuple(sorted(_normalize_block(b.period, b.members) for b in blocks))
    return AffineDiagram(s, t, loops, out)


def validate(d: AffineDiagram, width: int | None = None) -> bool:
    """Coverage check: on a window of copies every vertex lies in exactly one
    block translate."""
    if width is None:
        width = 2 * d.max_span() + 2
    counts = {}
    for side in (BOTTOM, TOP):
        for p in range(d.arity(side)):
            for c in range(-width, width + 1):
                counts[(side, p, c)] = 0
    for verts in window_blocks(d, width + d.max_span() + 1):
        for v in verts:
            if v in counts:
                counts[v] += 1
    slots = {(m[1], m[2]) for b in d.blocks for m in b.members}
    expected = {(BOTTOM, p) for p in range(d.s)} | {(TOP, p) for p in range(d.t)}
    return slots == expected and all(n == 1 for n in counts.values())


def window_blocks(d: AffineDiagram, width: int):
    """All block translates meeting copies [-width, width], as lists of
    (side, pos, copy) restricted to that window."""
    out = []
    for b in d.blocks:
        if b.period == 0:
            for shift in range(-width - b.span(), width + 1):
                verts = [(side, pos, c + shift) for c, side, pos in b.members]
                verts = [v for v in verts if -width <= v[2] <= width]
                if verts:
                    out.append(verts)
        else:
            k = b.period
            for shift in range(k):
                verts = []
                for c, side, pos in b.members:
                    first = c + shift
                    start = first - k * ((first + width) // k)
                    cc = start
                    while cc <= width:
                        if cc >= -width:
                            verts.append((side, pos, cc))
                        cc += k
                if verts:
                    out.append(verts)
    return out


# --- composition --------------------------------------------------------

def compose(a: AffineDiagram, b: AffineDiagram) -> ScaledElement:
    """Stack a on top of b.

    betaExp counts closed components that do not wrap; wrapping closed
    components become non-contractible loops, one per component orbit.
    """
    if a.s != b.t:
        raise DiagramError(f"arity mismatch: top factor has {a.s} bottom vertices, "
                           f"bottom factor has {b.t} top vertices")
    k, m, n = b.s, b.t, a.t
    uf = _WeightedUF(k + m + n)

    def node_b(side, pos):
        return pos if side == BOTTOM else k + pos

    def node_a(side, pos):
        return k + pos if side == BOTTOM else k + m + pos

    for diag, node in ((b, node_b), (a, node_a)):
        for blk in diag.blocks:
            c0, s0, p0 = blk.members[0]
            first = node(s0, p0)
            if blk.period:
                uf.add_torsion(first, blk.period)
            for c, side, pos in blk.members[1:]:
                uf.union(first, node(side, pos), c - c0)

    roots_outer = set()
    for i in list(range(k)) + list(range(k + m, k + m + n)):
        roots_outer.add(uf.find(i)[0])
    beta = 0
    new_loops = 0
    seen = set()
    for i in range(k, k + m):
        r, _ = uf.find(i)
        if r in roots_outer or r in seen:
            continue
        seen.add(r)
        if uf.tors[r]:
            new_loops += 1
        else:
            beta += 1
    slots = [(BOTTOM, p) for p in range(k)] + [(TOP, p) for p in range(n)]
    slot_id = {}
    for p in range(k):
        slot_id[(BOTTOM, p)] = p
    for p in range(n):
        slot_id[(TOP, p)] = k + m + p
    d = _from_unionfind(uf, k, n, slot_id, slots, a.loops + b.loops + new_loops)
    return ScaledElement(d, beta, 0)


def multiply(*factors) -> ScaledElement:
    """Left-to-right product: the leftmost factor ends up on top."""
    if not factors:
        raise DiagramError("empty product")
    acc = factors[0] if isinstance(factors[0], ScaledElement) else ScaledElement(factors[0])
    for f in factors[1:]:
        acc = acc * (f if isinstance(f, ScaledElement) else ScaledElement(f))
    return acc


def involute(d: AffineDiagram) -> AffineDiagram:
    """Reflect in a horizontal line: swap bottom and top."""
    blocks = [Block(b.period, [(c, 1 - side, pos) for c, side, pos in b.members]) for b in d.blocks]
    return from_blocks(d.t, d.s, blocks, d.loops)


def translate(d: AffineDiagram, shift: int) -> AffineDiagram:
    """Apply T^shift to the top line only (equivalently compose with tau^shift
    in the full-twist sense).  Used for H_lambda actions."""
    blocks = []
    for b in d.blocks:
        blocks.append(Block(b.period, [(c + shift if side == TOP else c, side, pos)
                                       for c, side, pos in b.members]))
    return from_blocks(d.s, d.t, blocks, d.loops)


def juxtapose(d1: AffineDiagram, d2: AffineDiagram) -> AffineDiagram:
    """Horizontal juxtaposition of two diagrams with finite blocks.

    Copy offsets are kept, i.e. colored labels are preserved; this is the
    monoidal product on the symmetric reduced categories.
    """
    if d1.has_wrapping() or d2.has_wrapping():
        raise DiagramError("juxtaposition needs finite blocks")
    blocks = list(d1.blocks)
    for b in d2.blocks:
        blocks.append(Block(0, [(c, side, pos + (d1.s if side == BOTTOM else d1.t))
                                for c, side, pos in b.members]))
    return from_blocks(d1.s + d2.s, d1.t + d2.t, blocks, d1.loops + d2.loops)


# --- generators -----------------------------------------------------------

def identity(m: int) -> AffineDiagram:
    return canonicalize(m, m, 0, blocks=[[("b", j), ("t", j)] for j in range(m)])


def _with_identity(m, special, singles=()):
    """Special blocks given with global indices; untouched positions get
    vertical strands."""
    used_b, used_t = set(), set()
    for blk in special:
        for side, idx in blk:
            (used_b if side == "b" else used_t).add(idx % m)
    for side, idx in singles:
        (used_b if side == "b" else used_t).add(idx % m)
    blocks = list(special) + [[v] for v in singles]
    for j in range(m):
        if j not in used_b and j not in used_t:
            blocks.append([("b", j), ("t", j)])
        elif (j in used_b) != (j in used_t):
            raise DiagramError("generator leaves a position half-defined")
    return canonicalize(m, m, 0, blocks=blocks)


GENERATOR_KINDS = ("s", "e", "p", "phalf", "l", "r", "t", "tau", "tauinv", "id", "rook_e")


def make_generator(kind: str, m: int, index=None, power: int = 1) -> AffineDiagram:
    """Generators with strand k at global index k - 1 (so index 0 wraps).

    e_i caps strands i, i+1 top and bottom; s_i crosses them; p_i isolates
    strand i; p_{i+1/2} (kind 'phalf', index i) joins strands i, i+1 on both
    sides; l_i joins top i+1 to bottom i; r_i joins top i to bottom i+1;
    t_i^a joins bottom strand i to the same strand a copies to the right on
    top; tau joins bottom j to top j+1.
    """
    if m < 1:
        raise DiagramError("m must be positive")
    if kind == "id":
        return identity(m)
    if kind in ("tau", "tauinv"):
        sh = power if kind == "tau" else -power
        return canonicalize(m, m, 0, blocks=[[("b", j), ("t", j + sh)] for j in range(m)])
    if kind == "rook_e":
        kind, index = "p", 1
    if index is None:
        raise DiagramError(f"generator {kind} needs an index")
    g = index - 1
    if kind in ("s", "e", "phalf", "l", "r") and m < 2:
        raise DiagramError(f"{kind} needs m >= 2")
    if kind == "t":
        if m == 1:
            return canonicalize(1, 1, 0, blocks=[[("b", 0), ("t", power)]])
        return _with_identity(m, [[("b", g), ("t", g + power * m)]])
    if kind == "s":
        return _with_identity(m, [[("b", g), ("t", g + 1)], [("b", g + 1), ("t", g)]])
    if kind == "e":
        return _with_identity(m, [[("b", g), ("b", g + 1)], [("t", g), ("t", g + 1)]])
    if kind == "p":
        return _with_identity(m, [], singles=[("b", g), ("t", g)])
    if kind == "phalf":
        return _with_identity(m, [[("b", g), ("b", g + 1), ("t", g), ("t", g + 1)]])
    if kind == "l":
        return _with_identity(m, [[("b", g), ("t", g + 1)]], singles=[("t", g), ("b", g + 1)])
    if kind == "r":
        return _with_identity(m, [[("t", g), ("b", g + 1)]], singles=[("b", g), ("t", g + 1)])
    raise DiagramError(f"unknown generator kind {kind!r}")


# --- families -------------------------------------------------------------

BASES = ("Pa", "Br", "RoBr", "Ro", "TL", "Mo", "PRo")
FLAVORS = ("affineBar", "affineReduced", "periodicBar", "periodicReduced", "rReduced", "ordinary")
SYMMETRIC = ("Pa", "Br", "RoBr", "Ro")
PLANAR = ("TL", "Mo", "PRo")


@dataclass(frozen=True)
class FamilyId:
    base: str
    flavor: str
    r: int | None = None

    def __post_init__(self):
        if self.base not in BASES:
            raise ValueError(f"unknown base {self.base!r}")
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.flavor == "rReduced":
            if self.base not in SYMMETRIC:
                raise ValueError("r-reduced quotients exist only for symmetric bases")
            if not self.r or self.r < 1:
                raise ValueError("r-reduced flavor needs r >= 1")

    @property
    def reduced(self) -> bool:
        return self.flavor in ("affineReduced", "periodicReduced", "rReduced", "ordinary")

    @property
    def planar(self) -> bool:
        return self.base in PLANAR

    def __str__(self):
        prefix = {"affineBar": "a", "affineReduced": "a", "periodicBar": "p",
                  "periodicReduced": "p", "rReduced": "a", "ordinary": ""}[self.flavor]
        suffix = "bar" if self.flavor in ("affineBar", "periodicBar") else ""
        name = prefix + self.base + suffix
        if self.flavor == "rReduced":
            name += f"[r={self.r}]"
        return name

    @classmethod
    def parse(cls, text: str, r: int | None = None) -> "FamilyId":
        """Names like aTL, aTLbar, pMo, pBrbar, TL, aBr with r given."""
        name = text.strip()
        if "[r=" in name:
            name, rest = name.split("[r=")
            r = int(rest.rstrip("]"))
        bar = name.endswith("bar")
        if bar:
            name = name[:-3]
        if name in BASES:
            if bar:
                raise ValueError("ordinary families have no bar flavor")
            return cls(name, "ordinary")
        prefix, base = name[0], name[1:]
        if prefix not in "ap" or base not in BASES:
            raise ValueError(f"cannot parse family {text!r}")
        if r is not None:
            if prefix != "a" or bar:
                raise ValueError("r applies to reduced affine symmetric families")
            return cls(base, "rReduced", r)
        if prefix == "a":
            return cls(base, "affineBar" if bar else "affineReduced")
        return cls(base, "periodicBar" if bar else "periodicReduced")


def _base_ok(d: AffineDiagram, base: str) -> bool:
    if base == "Pa":
        return True
    if d.has_wrapping():
        return False
    sizes = [len(b.members) for b in d.blocks]
    if base in ("Br", "TL"):
        ok = all(n == 2 for n in sizes)
    elif base in ("RoBr", "Mo"):
        ok = all(n <= 2 for n in sizes)
    else:  # Ro, PRo: partial bijections
        ok = all(n == 1 or (n == 2 and b.is_through()) for n, b in zip(sizes, d.blocks))
        ok = ok and d.loops == 0
    if ok and base in PLANAR:
        ok = is_planar(d)
    return ok


def in_family(d: AffineDiagram, family: FamilyId, cap: int = 20000):
    """Membership; periodic flavours (other than pTLbar) return True, False
    or the string 'undecided' when the closure search hits ``cap``."""
    fl = family.flavor
    if fl in ("affineReduced", "periodicReduced", "rReduced", "ordinary") and d.loops:
        return False
    if not _base_ok(d, family.base):
        return False
    if fl in ("affineBar", "affineReduced"):
        return True
    if fl == "ordinary":
        return d.max_span() == 0 and not d.has_wrapping()
    if fl == "rReduced":
        return not d.has_wrapping() and d.max_span() <= family.r - 1
    if d.s != d.t:
        return False
    m = d.s
    if family.base == "TL":
        if not is_even(d):
            return False
        return not _is_nontrivial_tau_power(d)
    from .presentations import periodic_generators, generated_closure
    gens = periodic_generators(family.base, m)
    target = d if fl == "periodicBar" else d
    res = generated_closure(gens, cap, reduce_loops=(fl == "periodicReduced"), target=target)
    if target in res.elements:
        return True
    return "undecided" if res.hit_cap else False


def _is_nontrivial_tau_power(d: AffineDiagram) -> bool:
    if d.loops or d.s != d.t:
        return False
    m = d.s
    for b in d.blocks:
        if len(b.members) != 2 or not b.is_through():
            return False
    # all strands shifted by the same amount
    shifts = set()
    for b in d.blocks:
        (c0, s0, p0), (c1, s1, p1) = b.members
        gb = p0 + c0 * m if s0 == BOTTOM else p1 + c1 * m
        gt = p1 + c1 * m if s1 == TOP else p0 + c0 * m
        shifts.add(gt - gb)
    return len(shifts) == 1 and shifts != {0}


# --- planarity --------------------------------------------------------------

def _boundary_key(side, pos, copy, s, t):
    if side == BOTTOM:
        return (0, pos + copy * s)
    return (1, -(pos + copy * t))


def _noncrossing(points) -> bool:
    """points: list of (key, label) ; True iff the labels form a noncrossing
    partition in key order."""
    points.sort()
    last = {}
    for i, (_, lab) in enumerate(points):
        last[lab] = i
    stack = []
    opened = set()
    for i, (_, lab) in enumerate(points):
        if lab not in opened:
            opened.add(lab)
            stack.append(lab)
        elif not stack or stack[-1] != lab:
            return False
        if last[lab] == i:
            if stack[-1] != lab:
                return False
            stack.pop()
    return True


def is_planar(d: AffineDiagram, width: int | None = None) -> bool:
    """Loop rule plus noncrossing check on a window of block translates."""
    if d.loops and any(b.is_through() for b in d.blocks):
        return False
    if width is None:
        width = 2 * d.max_span() + 2
    pts = []
    for lab, verts in enumerate(window_blocks(d, width)):
        for side, pos, c in verts:
            pts.append((_boundary_key(side, pos, c, d.s, d.t), lab))
    return _noncrossing(pts)


def crossings_of_line(d: AffineDiagram, i: int) -> int:
    """Minimal number of intersections of the vertical line x = i + 1/2 with
    the strands of a Temperley-Lieb type diagram (s = t)."""
    m = d.s
    count = d.loops
    for b in d.blocks:
        (c0, s0, p0), (c1, s1, p1) = b.members
        x0 = p0 + c0 * (d.s if s0 == BOTTOM else d.t)
        x1 = p1 + c1 * (d.s if s1 == BOTTOM else d.t)
        lo, hi = min(x0, x1), max(x0, x1)
        # translates by multiples of m crossing the line
        for j in range((i - hi) // m - 1, (i - lo) // m + 2):
            if lo + j * m <= i < hi + j * m:
                count += 1
    return count


def is_even(d: AffineDiagram) -> bool:
    return all(crossings_of_line(d, i) % 2 == 0 for i in range(d.s))


def even_test(d: AffineDiagram) -> bool:
    if d.s != d.t or not _base_ok(d, "TL"):
        raise DiagramError("even test needs an affine Temperley-Lieb diagram")
    return is_even(d)


# --- colored form -------------------------------------------------------------

@dataclass(frozen=True)
class ColoredDiagram:
    """Ordinary diagram plus one integer label per consecutive pair inside
    each block.  Vertices are ordered 1 < ... < t (top) < s-bar < ... < 1-bar,
    i.e. key(top q) = q and key(bottom p) = t + (s - 1 - p); the label of a
    pair u < v is copy(v) - copy(u)."""

    s: int
    t: int
    blocks: tuple  # tuple of (tuple of (side, pos) in key order, tuple of labels)


def _ckey(side, pos, s, t):
    return pos if side == TOP else t + (s - 1 - pos)


def to_colored(d: AffineDiagram) -> ColoredDiagram:
    if d.loops or d.has_wrapping():
        raise DiagramError("colored form needs finite blocks and no loops")
    out = []
    for b in d.blocks:
        mem = sorted(b.members, key=lambda m: _ckey(m[1], m[2], d.s, d.t))
        verts = tuple((side, pos) for _, side, pos in mem)
        labels = tuple(mem[i + 1][0] - mem[i][0] for i in range(len(mem) - 1))
        out.append((verts, labels))
    return ColoredDiagram(d.s, d.t, tuple(sorted(out)))


def from_colored(cd: ColoredDiagram) -> AffineDiagram:
    blocks = []
    for verts, labels in cd.blocks:
        c = 0
        mem = [(0, verts[0][0], verts[0][1])]
        for (side, pos), lab in zip(verts[1:], labels):
            c += lab
            mem.append((c, side, pos))
        blocks.append(Block(0, mem))
    return from_blocks(cd.s, cd.t, blocks, 0)


def compose_colored(a: ColoredDiagram, b: ColoredDiagram):
    """Stack colored diagrams by walking strands and summing oriented labels.

    Returns (colored result, number of closed components, list of the
    absolute label sums of the closed components).
    """
    if a.s != b.t:
        raise DiagramError("arity mismatch")
    # graph on nodes ('B', p) bottom of b, ('M', p) middle, ('A', q) top of a
    adj = {}

    def add(u, v, w):
        adj.setdefault(u, []).append((v, w))
        adj.setdefault(v, []).append((u, -w))

    def node_b(side, pos):
        return ("B", pos) if side == BOTTOM else ("M", pos)

    def node_a(side, pos):
        return ("M", pos) if side == BOTTOM else ("A", pos)

    for cd, node in ((b, node_b), (a, node_a)):
        for verts, labels in cd.blocks:
            adj.setdefault(node(*verts[0]), [])
            for (u, v, w) in zip(verts, verts[1:], labels):
                add(node(*u), node(*v), w)
    potential = {}
    closed = []
    blocks = []
    for start in sorted(adj):
        if start in potential:
            continue
        potential[start] = 0
        comp = [start]
        queue = deque([start])
        winding = 0
        while queue:
            u = queue.popleft()
            for v, w in adj[u]:
                if v not in potential:
                    potential[v] = potential[u] + w
                    comp.append(v)
                    queue.append(v)
                else:
                    winding = gcd(winding, abs(potential[u] + w - potential[v]))
        outer = [x for x in comp if x[0] != "M"]
        if not outer:
            closed.append(winding)
            continue
        if winding:
            raise DiagramError("composite has a wrapping block; not a colored diagram")
        mem = []
        for x in outer:
            side = BOTTOM if x[0] == "B" else TOP
            mem.append((potential[x], side, x[1]))
        blocks.append(Block(0, mem))
    result = to_colored(from_blocks(b.s, a.t, blocks, 0))
    return result, len(closed), closed


# --- winding normal form -------------------------------------------------------

def winding_normal_form(d: AffineDiagram):
    """Write d = (t_1^{i_1}..t_m^{i_m}) D0 (t_1^{j_1}..t_m^{j_m}).

    Tie-break: a block containing bottom vertices is anchored at the copy of
    its first bottom vertex; every other bottom vertex takes its offset on
    the right and every top vertex on the left.  Top-only blocks are anchored
    at their first top vertex.
    """
    if d.loops or d.has_wrapping():
        raise DiagramError("normal form needs finite blocks and no loops")
    left = [0] * d.t
    right = [0] * d.s
    blocks0 = []
    for b in d.blocks:
        bottoms = [m for m in b.members if m[1] == BOTTOM]
        anchor = min(bottoms, key=lambda m: m[2])[0] if bottoms else \
            min(b.members, key=lambda m: m[2])[0]
        mem0 = []
        for c, side, pos in b.members:
            if side == TOP:
                left[pos] = c - anchor
            else:
                right[pos] = anchor - c
            mem0.append((0, side, pos))
        blocks0.append(Block(0, mem0))
    return tuple(left), from_blocks(d.s, d.t, blocks0, 0), tuple(right)


def twist_product(exps) -> AffineDiagram:
    """t_1^{e_1} ... t_m^{e_m} as a single diagram."""
    m = len(exps)
    return canonicalize(m, m, 0, blocks=[[("b", j), ("t", j + e * m)] for j, e in enumerate(exps)])


def recompose_normal_form(left, d0, right) -> AffineDiagram:
    prod = multiply(twist_product(left), d0, twist_product(right))
    if prod.beta:
        raise DiagramError("normal form recomposition produced closed components")
    return prod.diagram


# --- enumeration ----------------------------------------------------------------

def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _size_filter(base):
    if base in ("Br", "TL"):
        return lambda blk: len(blk) == 2
    if base in ("RoBr", "Mo"):
        return lambda blk: len(blk) <= 2
    if base in ("Ro", "PRo"):
        return lambda blk: len(blk) == 1 or (len(blk) == 2 and blk[0][0] != blk[1][0])
    return lambda blk: True


class CapExceeded(RuntimeError):
    pass


def enumerate_diagrams(family: FamilyId, s: int, t: int, max_disp: int,
                       predicate=None, cap: int = 200000):
    """Every loop-free family member of shape (s, t) whose blocks are finite
    with copy span at most ``max_disp``, in canonical order."""
    slots = [(BOTTOM, p) for p in range(s)] + [(TOP, p) for p in range(t)]
    ok_block = _size_filter(family.base)
    found = set()
    for part in set_partitions(slots):
        if not all(ok_block(blk) for blk in part):
            continue
        choices = []
        for blk in part:
            opts = []
            for offs in product(range(max_disp + 1), repeat=len(blk) - 1):
                copies = (0,) + offs
                opts.append(Block(0, [(c, side, pos) for c, (side, pos) in zip(copies, blk)]))
            choices.append(opts)
        for combo in product(*choices):
            d = from_blocks(s, t, combo, 0)
            if d in found:
                continue
            if d.max_span() > max_disp:
                continue
            if not _member_shape(d, family):
                continue
            if predicate is not None and not predicate(d):
                continue
            found.add(d)
            if len(found) > cap:
                raise CapExceeded(f"more than {cap} diagrams")
    return sorted(found)


def _member_shape(d, family):
    """Family predicate for (s, t) diagrams, periodic flavours treated as
    their affine hulls."""
    if not _base_ok(d, family.base):
        return False
    if family.flavor == "ordinary":
        return d.max_span() == 0
    if family.flavor == "rReduced":
        return d.max_span() <= family.r - 1
    return True


# --- random diagrams for property tests -------------------------------------------

def random_diagram(rng: random.Random, family: FamilyId, m: int, length: int = 6) -> AffineDiagram:
    """Random product of affine generators of the family (diagram part)."""
    from .presentations import affine_generators
    gens = affine_generators(family.base, m)
    acc = identity(m)
    for _ in range(length):
        acc = compose(acc, rng.choice(gens)).diagram
    if family.reduced:
        acc = AffineDiagram(acc.s, acc.t, 0, acc.blocks)
    return acc


def random_partition_diagram(rng: random.Random, s: int, t: int, max_disp: int = 2,
                             wrap_prob: float = 0.0, loops: int = 0) -> AffineDiagram:
    """Uniform-ish random set partition with random copy offsets."""
    slots = [(BOTTOM, p) for p in range(s)] + [(TOP, p) for p in range(t)]
    rng.shuffle(slots)
    blocks = []
    i = 0
    while i < len(slots):
        size = rng.randint(1, min(4, len(slots) - i))
        blk = slots[i:i + size]
        i += size
        if rng.random() < wrap_prob:
            k = rng.randint(1, 2)
            mem = [(rng.randint(0, k - 1), side, pos) for side, pos in blk]
            blocks.append(Block(k, mem))
        else:
            mem = [(rng.randint(0, max_disp), side, pos) for side, pos in blk]
            blocks.append(Block(0, mem))
    # renormalize wrap periods through canonicalize to get minimal periods
    raw_blocks, raw_wraps = [], []
    for b in blocks:
        verts = [(("b" if side == BOTTOM else "t"), pos + c * (s if side == BOTTOM else t))
                 for c, side, pos in b.members]
        if b.period:
            raw_wraps.append((b.period, verts))
        else:
            raw_blocks.append(verts)
    return canonicalize(s, t, loops, blocks=raw_blocks, wraps=raw_wraps)


# --- text format ---------------------------------------------------------------------

def _fmt_vertex(side, pos, c):
    tag = ("b" if side == BOTTOM else "t") + str(pos)
    if c > 0:
        tag += f"+{c}"
    elif c < 0:
        tag += f"{c}"
    return tag


def to_text(d: AffineDiagram) -> str:
    lines = [f"diagram s={d.s} t={d.t} loops={d.loops}"]
    for b in d.blocks:
        verts = " ".join(_fmt_vertex(side, pos, c) for c, side, pos in b.members)
        if b.period:
            lines.append(f"wrap k={b.period} {verts}")
        else:
            lines.append(f"block {verts}")
    return "\n".join(lines) + "\n"


def _parse_vertex(tok, lineno):
    import re
    mt = re.fullmatch(r"([bt])(\d+)([+-]\d+)?", tok)
    if not mt:
        raise DiagramError(f"line {lineno}: bad vertex token {tok!r}")
    return mt.group(1), int(mt.group(2)), int(mt.group(3) or 0)


def from_text(text: str) -> AffineDiagram:
    header = None
    blocks, wraps = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "diagram":
            if header is not None:
                raise DiagramError(f"line {lineno}: second header")
            kv = dict(tok.split("=", 1) for tok in toks[1:])
            try:
                header = (int(kv["s"]), int(kv["t"]), int(kv.get("loops", 0)))
            except (KeyError, ValueError):
                raise DiagramError(f"line {lineno}: header needs s=, t=, loops=")
            continue
        if header is None:
            raise DiagramError(f"line {lineno}: missing 'diagram' header")
        s, t, _ = header
        if toks[0] == "block":
            verts = [_parse_vertex(x, lineno) for x in toks[1:]]
            if not verts:
                raise DiagramError(f"line {lineno}: empty block")
            blocks.append(verts)
        elif toks[0] == "wrap":
            if len(toks) < 3 or not toks[1].startswith("k="):
                raise DiagramError(f"line {lineno}: wrap needs k= and vertices")
            wraps.append((int(toks[1][2:]), [_parse_vertex(x, lineno) for x in toks[2:]]))
        else:
            raise DiagramError(f"line {lineno}: unknown keyword {toks[0]!r}")
    if header is None:
        raise DiagramError("empty diagram file")
    s, t, loops = header

    def glob(v):
        side, pos, c = v
        ar = s if side == "b" else t
        if pos >= ar:
            raise DiagramError(f"vertex {side}{pos} outside arity {ar}")
        return side, pos + c * ar

    try:
        return canonicalize(s, t, loops, blocks=[[glob(v) for v in b] for b in blocks],
                            wraps=[(k, [glob(v) for v in b]) for k, b in wraps])
    except DiagramError:
        raise

"""Matrix modules over prime fields: composition factors, indecomposable
summands, tensor products and fusion graphs.

Matrices are numpy int64 arrays with entries in [0, p) acting on column
vectors.  Subspaces are stored as reduced row echelon bases.
"""
from __future__ import annotations

import csv
import hashlib
import io
import itertools
import math
import random
from dataclasses import dataclass, field

import networkx as nx
import numpy as np
from sympy import ZZ
from sympy.polys.galoistools import gf_factor_sqf, gf_sqf_list

from .exactmath import is_prime

DEFAULT_PRIME = 1000003
CHOP_CAP = 4096
END_CAP = 1024


class DecompositionError(RuntimeError):
    pass


class CapExceeded(DecompositionError):
    pass


class FingerprintCollision(DecompositionError):
    pass


# --- linear algebra mod p --------------------------------------------------------------

def _mod(a, p):
    return np.asarray(a, dtype=np.int64) % p


def matmul(a, b, p):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1] if a.ndim else 1
    if inner * (p - 1) ** 2 < 2 ** 53:
        return (np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)).astype(np.int64) % p
    return (a.astype(object) @ b.astype(object)).astype(np.int64) % p


def rref(a, p):
    """Reduced row echelon form and pivot columns."""
    m = _mod(a, p).copy()
    if m.ndim == 1:
        m = m.reshape(1, -1)
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            m[[r, k]] = m[[k, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = m[r] * inv % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[r]) % p) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(a, p) -> int:
    if np.asarray(a).size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a, p):
    """Rows spanning {x : a x = 0}."""
    a = _mod(a, p)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    r, piv = rref(a, p)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.int64)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, pc in enumerate(piv):
            out[k, pc] = (-r[i, f]) % p
    return out


def inverse(a, p):
    a = _mod(a, p)
    n = a.shape[0]
    r, piv = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)) or len(piv) < n or (len(piv) > n and piv[n] < n):
        raise DecompositionError("matrix is singular")
    return r[:n, n:]


def is_invertible(a, p) -> bool:
    return rank(a, p) == a.shape[0]


def span_rows(vectors, p):
    if len(vectors) == 0:
        return np.zeros((0, 0), dtype=np.int64), []
    return rref(np.asarray(vectors), p)


def spin(seeds, mats, p):
    """Smallest subspace containing the seed rows and stable under every
    matrix (acting on columns); returned as an rref basis."""
    seeds = _mod(np.atleast_2d(seeds), p)
    d = seeds.shape[1]
    basis, piv = rref(seeds, p)
    frontier = basis
    while frontier.shape[0]:
        new = np.vstack([matmul(frontier, np.asarray(m).T, p) for m in mats])
        # reduce the new vectors against the current basis
        red = new.copy()
        if basis.shape[0]:
            red = (red - matmul(red[:, piv], basis, p)) % p
        red = red[np.any(red != 0, axis=1)]
        if red.shape[0] == 0:
            break
        add, _ = rref(red, p)
        basis, piv = rref(np.vstack([basis, add]), p)
        if basis.shape[0] == d:
            break
        frontier = add
    return basis, piv


# --- polynomials over F_p (coefficient lists, highest degree first) -------------------------

def charpoly(a, p):
    """Characteristic polynomial via Hessenberg reduction."""
    h = _mod(a, p).copy()
    n = h.shape[0]
    for j in range(n - 2):
        nz = np.nonzero(h[j + 2:, j])[0]
        if h[j + 1, j] == 0:
            if nz.size == 0:
                continue
            k = j + 2 + nz[0]
            h[[j + 1, k]] = h[[k, j + 1]]
            h[:, [j + 1, k]] = h[:, [k, j + 1]]
        inv = pow(int(h[j + 1, j]), p - 2, p)
        for i in range(j + 2, n):
            f = int(h[i, j]) * inv % p
            if f:
                h[i] = (h[i] - f * h[j + 1]) % p
                h[:, j + 1] = (h[:, j + 1] + f * h[:, i]) % p
    # recurrence for characteristic polynomials of leading blocks (low degree first)
    polys = [[1]]
    for k in range(n):
        prev = polys[-1]
        cur = [0] + prev
        cur = [(c - int(h[k, k]) * (prev[i] if i < len(prev) else 0)) % p for i, c in enumerate(cur)]
        prod = 1
        for i in range(k - 1, -1, -1):
            prod = prod * int(h[i + 1, i]) % p
            coef = prod * int(h[i, k]) % p
            if coef:
                sub = polys[i]
                for t, c in enumerate(sub):
                    cur[t] = (cur[t] - coef * c) % p
        polys.append(cur)
    return list(reversed(polys[-1]))


def poly_eval_matrix(f, a, p):
    n = a.shape[0]
    out = np.zeros((n, n), dtype=np.int64)
    for c in f:
        out = matmul(out, a, p)
        out[np.diag_indices(n)] = (out[np.diag_indices(n)] + c) % p
    return out


def irreducible_factors(f, p):
    """Distinct monic irreducible factors with multiplicity, by degree."""
    out = []
    _, sqf = gf_sqf_list([int(c) for c in f], p, ZZ)
    for g, e in sqf:
        for h in gf_factor_sqf(g, p, ZZ)[1]:
            out.append(([int(c) for c in h], e))
    out.sort(key=lambda fe: (len(fe[0]), fe[0]))
    return out


# --- representations --------------------------------------------------------------------

@dataclass
class MatRep:
    p: int
    gens: dict
    units: frozenset = frozenset()
    label: str = ""

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError("the field must be F_p for a prime p")
        self.gens = {k: _mod(v, self.p).reshape(np.asarray(v).shape) for k, v in self.gens.items()}
        dims = {m.shape for m in self.gens.values()}
        if len(dims) != 1 or any(a != b for a, b in dims):
            raise ValueError("generator matrices must be square of one size")
        self.units = frozenset(self.units)
        if not self.units <= set(self.gens):
            raise ValueError("unit generators must be generators")

    @property
    def dim(self) -> int:
        return next(iter(self.gens.values())).shape[0]

    @property
    def names(self):
        return sorted(self.gens)

    @property
    def is_monoid(self) -> bool:
        return set(self.gens) != set(self.units)

    def mats(self):
        return [self.gens[k] for k in self.names]

    def check_units(self) -> bool:
        return all(is_invertible(self.gens[u], self.p) for u in self.units)

    def act(self, word):
        out = np.eye(self.dim, dtype=np.int64)
        for g in word:
            out = matmul(out, self.gens[g], self.p)
        return out

    def sub(self, basis, piv):
        """Action on the submodule with rref basis (rows)."""
        bt = basis.T
        return MatRep(self.p, {k: matmul(m, bt, self.p)[piv, :] for k, m in self.gens.items()},
                      self.units, self.label)

    def quotient(self, basis, piv):
        d = self.dim
        comp = [c for c in range(d) if c not in set(piv)]
        out = {}
        for k, m in self.gens.items():
            u = m[:, comp]
            if basis.shape[0]:
                u = (u - matmul(basis.T, u[piv, :], self.p)) % self.p
            out[k] = u[comp, :]
        return MatRep(self.p, out, self.units, self.label)

    def restrict_to(self, cols):
        """Action on an invariant subspace spanned by the columns of ``cols``."""
        b = _mod(cols, self.p)
        r, piv = rref(b.T, self.p)
        return self.sub(r, piv)

    def transpose(self):
        return MatRep(self.p, {k: m.T.copy() for k, m in self.gens.items()}, self.units, self.label)


def tensor_rep(r1: MatRep, r2: MatRep) -> MatRep:
    """Kronecker product; monoid elements act diagonally."""
    if r1.p != r2.p or set(r1.gens) != set(r2.gens):
        raise ValueError("tensor factors must share field and generators")
    p = r1.p
    if r1.dim * r2.dim > CHOP_CAP:
        raise CapExceeded("tensor product too large")
    return MatRep(p, {k: np.kron(r1.gens[k], r2.gens[k]) % p for k in r1.gens},
                  r1.units | r2.units, r1.label)


def trivial_rep(template: MatRep) -> MatRep:
    """Every monoid element acts as 1 (the tensor unit)."""
    return MatRep(template.p, {k: np.ones((1, 1), dtype=np.int64) for k in template.gens}, template.units)


def direct_sum(*reps) -> MatRep:
    p = reps[0].p
    out = {}
    for k in reps[0].gens:
        blocks = [r.gens[k] for r in reps]
        n = sum(b.shape[0] for b in blocks)
        m = np.zeros((n, n), dtype=np.int64)
        o = 0
        for b in blocks:
            m[o:o + b.shape[0], o:o + b.shape[0]] = b
            o += b.shape[0]
        out[k] = m
    return MatRep(p, out, reps[0].units)


def conjugate(rep: MatRep, g) -> MatRep:
    gi = inverse(g, rep.p)
    return MatRep(rep.p, {k: matmul(matmul(gi, m, rep.p), g, rep.p) for k, m in rep.gens.items()},
                  rep.units, rep.label)


def is_group_annihilated(rep: MatRep) -> bool:
    return all(not np.any(m) for k, m in rep.gens.items() if k not in rep.units)


# --- homomorphisms ------------------------------------------------------------------------

def hom_space(a: MatRep, b: MatRep):
    """Basis of {X : B_g X = X A_g}, each X of shape (dim b, dim a)."""
    p = a.p
    da, db = a.dim, b.dim
    if da * db > END_CAP * END_CAP // 16 and da * db > END_CAP:
        pass
    if da * db > 64 * END_CAP:
        raise CapExceeded("hom space too large")
    K = np.eye(da * db, dtype=np.int64)
    for k in a.names:
        if K.shape[0] == 0:
            break
        A, B = a.gens[k], b.gens[k]
        # row-major vec: vec(B X) = (B (x) I) vec X, vec(X A) = (I (x) A^T) vec X
        Xs = K.reshape(-1, db, da)
        img = (np.einsum("ij,njk->nik", B.astype(object), Xs.astype(object))
               - np.einsum("nij,jk->nik", Xs.astype(object), A.astype(object)))
        img = np.asarray(img % p, dtype=np.int64).reshape(K.shape[0], -1)
        coeff = nullspace(img.T, p)
        K = matmul(coeff, K, p) if coeff.shape[0] else np.zeros((0, da * db), dtype=np.int64)
    return [x.reshape(db, da) for x in K]


def end_algebra(rep: MatRep):
    return hom_space(rep, rep)


def is_isomorphic(a: MatRep, b: MatRep, rng=None, tries: int = 8) -> bool:
    if a.dim != b.dim:
        return False
    H = hom_space(a, b)
    if not H:
        return False
    rng = rng or random.Random(0)
    p = a.p
    for _ in range(tries):
        x = np.zeros_like(H[0])
        for h in H:
            x = (x + rng.randrange(p) * h) % p
        if is_invertible(x, p):
            return True
    return False


# --- fingerprints ---------------------------------------------------------------------------

def fingerprint_words(names, count: int = 24, seed: int = 24):
    """Fixed list of algebra elements: powers a, a^2, ..., a^count of one
    seeded linear combination a of the generators, so every monomial up to
    that length enters each trace with a pseudo-random coefficient."""
    rng = random.Random(seed)
    coeffs = {g: rng.randrange(1, 2 ** 30) for g in sorted(names)}
    return [("power", k, tuple(sorted(coeffs.items()))) for k in range(1, count + 1)]


def fingerprint(rep: MatRep, words=None):
    words = words or fingerprint_words(rep.names)
    p = rep.p
    a = np.zeros((rep.dim, rep.dim), dtype=np.int64)
    for g, c in words[0][2]:
        a = (a + (c % p) * rep.gens[g]) % p
    out = [rep.dim]
    acc = np.eye(rep.dim, dtype=np.int64)
    for _w in words:
        acc = matmul(acc, a, p)
        out.append(int(np.trace(acc) % p))
    # over small fields one combination and its power sums see too little
    out.extend(int(c) for c in charpoly(a, p))
    mats = rep.mats()
    out.extend(int(np.trace(m) % p) for m in mats)
    out.extend(int(np.trace(matmul(x, y, p)) % p) for x in mats for y in mats)
    return tuple(out)


def fingerprint_hash(fp) -> str:
    return hashlib.sha1(repr(fp).encode()).hexdigest()[:10]


# --- Meataxe chop -----------------------------------------------------------------------

class _ElementSource:
    """Pseudo-random algebra elements built from products of generators."""

    def __init__(self, rep: MatRep, rng: random.Random):
        self.rep, self.rng = rep, rng
        self.pool = [m for m in rep.mats()]

    def next(self):
        p = self.rep.p
        a, b = self.rng.choice(self.pool), self.rng.choice(self.pool)
        self.pool.append(matmul(a, b, p))
        if len(self.pool) > 40:
            self.pool.pop(len(self.rep.gens))
        out = np.zeros_like(self.pool[0])
        for m in self.rng.sample(self.pool, min(4, len(self.pool))):
            out = (out + self.rng.randrange(1, p) * m) % p
        out[np.diag_indices(out.shape[0])] += self.rng.randrange(p)
        return out % p


def find_submodule(rep: MatRep, rng: random.Random, tries: int = 200):
    """A proper nonzero submodule (rref basis, pivots) or None when the
    Holt-Rees test proves irreducibility."""
    d, p = rep.dim, rep.p
    if d <= 1:
        return None
    mats = rep.mats()
    if not mats:
        raise DecompositionError("representation has no generators")
    tmats = [m.T for m in mats]
    src = _ElementSource(rep, rng)
    for _ in range(tries):
        a = src.next()
        for f, _e in irreducible_factors(charpoly(a, p), p):
            fa = poly_eval_matrix(f, a, p)
            N = nullspace(fa, p)
            deg = len(f) - 1
            v = N[0] if N.shape[0] == deg else (rng.choice(list(N)) * 1 + sum(
                rng.randrange(p) * n for n in N)) % p
            if not np.any(v):
                continue
            W, piv = spin(v, mats, p)
            if W.shape[0] < d:
                return W, piv
            if N.shape[0] != deg:
                continue
            Nt = nullspace(fa.T, p)
            U, _ = spin(Nt[0], tmats, p)
            if U.shape[0] < d:
                W, piv = rref(nullspace(U, p), p)
                return W, piv
            return None
    raise DecompositionError("irreducibility test inconclusive; try another seed or a larger p")


def chop(rep: MatRep, rng: random.Random):
    """List of simple subquotients (a composition series, bottom first)."""
    if rep.dim > CHOP_CAP:
        raise CapExceeded(f"dimension {rep.dim} exceeds chop cap")
    if rep.dim == 0:
        return []
    found = find_submodule(rep, rng)
    if found is None:
        return [rep]
    W, piv = found
    return chop(rep.sub(W, piv), rng) + chop(rep.quotient(W, piv), rng)


@dataclass
class IsoClass:
    rep: MatRep
    fingerprint: tuple
    key: str


class Registry:
    """Append-only list of isomorphism classes."""

    def __init__(self, simple: bool):
        self.simple = simple
        self.classes: list = []
        self.words = None

    def identify(self, rep: MatRep, rng) -> int:
        if self.words is None:
            self.words = fingerprint_words(rep.names)
        fp = fingerprint(rep, self.words)
        for i, c in enumerate(self.classes):
            if c.fingerprint != fp:
                continue
            if is_isomorphic(c.rep, rep, rng):
                return i
            if self.simple:
                raise FingerprintCollision("non-isomorphic simple modules share a fingerprint; "
                                           "use a longer word list")
        key = fingerprint_hash(fp)
        n_same = sum(1 for c in self.classes if c.key.split("_")[0] == key)
        if n_same:
            key = f"{key}_{n_same}"
        self.classes.append(IsoClass(rep, fp, key))
        return len(self.classes) - 1


@dataclass
class DecompositionReport:
    mode: str
    dim: int
    seed: int
    parts: list  # (class index, dim, multiplicity)
    registry: Registry = field(repr=False, default=None)
    idempotents: list = field(repr=False, default_factory=list)

    @property
    def count(self) -> int:
        return sum(m for _, _, m in self.parts)

    def conserved(self) -> bool:
        return sum(d * m for _, d, m in self.parts) == self.dim

    def dims(self):
        return sorted(d for _, d, m in self.parts for _ in range(m))


def _tally(indices, registry):
    counts = {}
    for i in indices:
        counts[i] = counts.get(i, 0) + 1
    return [(i, registry.classes[i].rep.dim, m) for i, m in sorted(counts.items())]


def comp_factors(rep: MatRep, seed: int = 0, registry: Registry | None = None) -> DecompositionReport:
    rng = random.Random(seed)
    registry = registry or Registry(simple=True)
    idx = [registry.identify(f, rng) for f in chop(rep, rng)]
    return DecompositionReport("length", rep.dim, seed, _tally(idx, registry), registry)


# --- splitting into indecomposables ----------------------------------------------------------

def is_split_local(E, d: int, p: int) -> bool:
    """True iff the algebra spanned by E (containing 1) is F_p plus a
    nilpotent ideal, i.e. End/rad is one-dimensional.

    Every element must have a single eigenvalue in F_p; the shifted
    elements must span a subalgebra whose powers reach zero."""
    shifted = []
    for x in E:
        facs = irreducible_factors(charpoly(x, p), p)
        if len(facs) != 1 or len(facs[0][0]) != 2:
            return False
        c = (-facs[0][0][1]) % p
        n = x.copy()
        n[np.diag_indices(d)] = (n[np.diag_indices(d)] - c) % p
        shifted.append(n)
    N, _ = rref(np.array([n.reshape(-1) for n in shifted]), p)
    if N.shape[0] != len(E) - 1:
        return False
    power = N
    for _ in range(d + 1):
        if power.shape[0] == 0:
            return True
        prods = [matmul(a.reshape(d, d), b.reshape(d, d), p).reshape(-1) for a in power for b in N]
        nxt, _ = rref(np.array(prods), p)
        # the products must stay inside N
        if power is N and rank(np.vstack([N, nxt]), p) != N.shape[0]:
            return False
        if nxt.shape[0] >= power.shape[0]:
            return False
        power = nxt
    return power.shape[0] == 0


def _generalized_kernel(f, e, a, p):
    d = a.shape[0]
    fa = poly_eval_matrix(f, a, p)
    m = np.eye(d, dtype=np.int64)
    for _ in range(min(e, d)):
        m = matmul(m, fa, p)
    return nullspace(m, p)


def _split(rep: MatRep, rng: random.Random, tries: int = 30):
    """Bases (as column blocks) of a decomposition into indecomposables."""
    d, p = rep.dim, rep.p
    if d <= 1:
        return [np.eye(d, dtype=np.int64)]
    if d > END_CAP:
        raise CapExceeded(f"dimension {d} exceeds End-ring cap")
    E = end_algebra(rep)
    if is_split_local(E, d, p):
        return [np.eye(d, dtype=np.int64)]
    for _ in range(tries):
        phi = np.zeros((d, d), dtype=np.int64)
        for x in E:
            phi = (phi + rng.randrange(p) * x) % p
        facs = irreducible_factors(charpoly(phi, p), p)
        if len(facs) < 2:
            continue
        pieces = []
        for f, e in facs:
            K = _generalized_kernel(f, e, phi, p)
            sub = rep.restrict_to(K.T)
            for block in _split(sub, rng, tries):
                pieces.append(matmul(K.T, block, p))
        return pieces
    # End/rad is a field bigger than F_p: local, not split
    return [np.eye(d, dtype=np.int64)]


def indecomposable_summands(rep: MatRep, seed: int = 0, registry: Registry | None = None) -> DecompositionReport:
    rng = random.Random(seed)
    p = rep.p
    registry = registry or Registry(simple=False)
    blocks = _split(rep, rng)
    B = np.hstack(blocks) if blocks else np.zeros((rep.dim, 0), dtype=np.int64)
    Binv = inverse(B, p)
    idem, idx = [], []
    o = 0
    for blk in blocks:
        k = blk.shape[1]
        mask = np.zeros((rep.dim, rep.dim), dtype=np.int64)
        mask[o:o + k, o:o + k] = np.eye(k, dtype=np.int64)
        idem.append(matmul(matmul(B, mask, p), Binv, p))
        idx.append(registry.identify(rep.restrict_to(blk), rng))
        o += k
    return DecompositionReport("summand", rep.dim, seed, _tally(idx, registry), registry, idem)


def is_local(rep: MatRep) -> bool:
    """Split-local test: End/rad(End) is one-dimensional."""
    return is_split_local(end_algebra(rep), rep.dim, rep.p)


# --- fusion graphs ------------------------------------------------------------------------

@dataclass
class FusionGraph:
    mode: str
    vertices: list  # IsoClass
    edges: dict  # (i, j) -> weight
    start: dict  # class -> multiplicity in V
    annihilated: set
    dim_v: int
    complete: bool = True

    def graph(self):
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.vertices)))
        for (i, j), w in self.edges.items():
            g.add_edge(i, j, weight=w)
        return g

    def matrix(self):
        n = len(self.vertices)
        a = [[0] * n for _ in range(n)]
        for (i, j), w in self.edges.items():
            a[i][j] = w
        return a

    def dim(self, i):
        return self.vertices[i].rep.dim

    def conservation_ok(self) -> bool:
        """Out-edges of every expanded vertex carry dim V times its dimension."""
        for i in self.expanded:
            tot = sum(w * self.dim(j) for (a, j), w in self.edges.items() if a == i)
            if tot != self.dim_v * self.dim(i):
                return False
        return True

    def counts(self, n_max: int):
        """(n, total count, count in the group-annihilated part) for V^(x n)."""
        A = self.matrix()
        vec = [self.start.get(i, 0) for i in range(len(self.vertices))]
        out = []
        for n in range(1, n_max + 1):
            out.append((n, sum(vec), sum(v for i, v in enumerate(vec) if i in self.annihilated)))
            vec = [sum(vec[i] * A[i][j] for i in range(len(vec))) for j in range(len(vec))]
        return out

    def to_dot(self) -> str:
        lines = [f"digraph fusion_{self.mode} {{"]
        for i, v in enumerate(self.vertices):
            style = ', style=filled, fillcolor="lightblue"' if i in self.annihilated else ""
            lines.append(f'  "{v.key}" [label="{v.rep.dim}"{style}];')
        for (i, j), w in sorted(self.edges.items()):
            lines.append(f'  "{self.vertices[i].key}" -> "{self.vertices[j].key}" [label="{w}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def fusion_graph(V: MatRep, depth: int, mode: str = "summand", seed: int = 0,
                 max_vertices: int = 200) -> FusionGraph:
    if mode not in ("summand", "length"):
        raise ValueError("mode is 'summand' or 'length'")
    decompose = indecomposable_summands if mode == "summand" else comp_factors
    registry = Registry(simple=(mode == "length"))
    first = decompose(V, seed, registry)
    start = {i: m for i, _, m in first.parts}
    edges = {}
    expanded = set()
    frontier = sorted(start)
    complete = True
    for _level in range(depth):
        nxt = []
        for i in frontier:
            if i in expanded:
                continue
            expanded.add(i)
            rep = registry.classes[i].rep
            rpt = decompose(tensor_rep(V, rep), seed, registry)
            for j, _, m in rpt.parts:
                edges[(i, j)] = m
                if j not in expanded:
                    nxt.append(j)
            if len(registry.classes) > max_vertices:
                raise CapExceeded("fusion graph vertex cap exceeded")
        frontier = sorted(set(nxt))
        if not frontier:
            break
    else:
        complete = not any(j not in expanded for j in frontier)
    annihilated = {i for i, c in enumerate(registry.classes) if is_group_annihilated(c.rep)}
    g = FusionGraph(mode, registry.classes, edges, start, annihilated, V.dim, complete)
    g.expanded = expanded
    return g


def _spectral_radius(a):
    if not len(a):
        return 0.0
    ev = np.linalg.eigvals(np.asarray(a, dtype=float))
    return float(max(abs(ev)))


def graph_analytics(G: FusionGraph, max_power: int = 60) -> dict:
    if not G.vertices:
        raise ValueError("empty graph")
    g = G.graph()
    A = G.matrix()
    classes = [sorted(c) for c in nx.strongly_connected_components(g)]
    classes.sort()
    info = []
    for c in classes:
        sub = [[A[i][j] for j in c] for i in c]
        nontrivial = len(c) > 1 or A[c[0]][c[0]] > 0
        period = _class_period(g, c) if nontrivial else 0
        info.append({"vertices": c, "pf": _spectral_radius(sub) if nontrivial else 0.0,
                     "period": period})
    best = max(x["pf"] for x in info)
    cond = nx.condensation(g, scc=[set(c) for c in classes])
    for k, x in enumerate(info):
        x["basic"] = x["pf"] > 0 and abs(x["pf"] - best) < 1e-9 * max(1.0, best)
    for k, x in enumerate(info):
        reach = nx.descendants(cond, k)
        x["final"] = not reach
        x["fbc"] = x["basic"] and not any(info[j]["basic"] for j in reach)
    top = next(x for x in info if x["basic"])
    h = top["period"] or 1
    i0 = top["vertices"][0]
    sub_idx = top["vertices"]
    M = [[A[i][j] for j in sub_idx] for i in sub_idx]
    n = max(1, max_power // h)
    P = _int_matpow(M, h * n)
    entry = P[0][0]
    est = entry ** (1.0 / (h * n)) if entry > 0 else 0.0
    return {
        "period": math.gcd(*[x["period"] for x in info if x["period"]] or [0]),
        "pf_estimate": est,
        "pf_power": h * n,
        "pf_vertex": i0,
        "pf_spectral": best,
        "classes": info,
        "final_basic_classes": [x["vertices"] for x in info if x["fbc"]],
    }


def _class_period(g, c):
    sub = g.subgraph(c)
    level = {c[0]: 0}
    stack = [c[0]]
    per = 0
    while stack:
        u = stack.pop()
        for v in sub.successors(u):
            if v not in level:
                level[v] = level[u] + 1
                stack.append(v)
            else:
                per = math.gcd(per, level[u] + 1 - level[v])
    return per


def _int_matpow(M, e):
    n = len(M)
    R = [[int(i == j) for j in range(n)] for i in range(n)]
    B = [row[:] for row in M]
    while e:
        if e & 1:
            R = [[sum(R[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        B = [[sum(B[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        e >>= 1
    return R


def series_csv(G: FusionGraph, n_max: int, other: FusionGraph | None = None, meta=None) -> str:
    """CSV of n, l(n), b(n), r_n; the graph in length mode supplies l and r_n."""
    lg = G if G.mode == "length" else other
    bg = G if G.mode == "summand" else other
    lc = {n: (t, a) for n, t, a in lg.counts(n_max)} if lg else {}
    bc = {n: t for n, t, _ in bg.counts(n_max)} if bg else {}
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf)
    w.writerow(["n", "l", "b", "r"])
    for n in range(1, n_max + 1):
        l_, a = lc.get(n, ("", ""))
        r = f"{a / l_:.6f}" if l_ else ""
        w.writerow([n, l_, bc.get(n, ""), r])
    return buf.getvalue()


# --- cell modules as matrix modules ---------------------------------------------------------

UNIT_KINDS = ("tau", "tauinv", "t", "s")


def _family_generators(family, m):
    from .diagram import make_generator
    kinds = {
        "TL": ["e"], "PRo": ["l", "r"], "Mo": ["e", "l", "r"], "Br": ["s", "e"],
        "Ro": ["s", "p"], "RoBr": ["s", "e", "p"], "Pa": ["s", "p", "phalf"],
    }[family.base]
    out = {}
    ordinary = family.flavor == "ordinary"
    for k in kinds:
        if k in ("s", "e", "l", "r", "phalf") and m < 2:
            continue
        # ordinary families have no generator joining strand m to strand 1
        last = m - 1 if ordinary and k != "p" else m
        for i in range(1, last + 1):
            if k == "p" and family.base == "Ro" and i > 1:
                continue
            out[f"{k}{i}"] = make_generator(k, m, i)
    if family.flavor != "ordinary":
        out["tau"] = make_generator("tau", m)
        out["tauinv"] = make_generator("tauinv", m)
    return out


def cell_matrix_rep(family, m: int, lam: int, z=1, beta0=1, alpha0=None, p: int = DEFAULT_PRIME,
                    S=None) -> MatRep:
    """Generators act on the top set T(lam) by stacking; products that lose
    through blocks act as 0, H_lambda parts are evaluated at z (or on the
    H_lambda-module with label S for symmetric families)."""
    from .cellular import (DOTTED_BASES, WreathSimple, _solve_h, classify, dotted_paths, top_half,
                           top_set)
    from .diagram import FamilyId, compose
    from .exactmath import Fp
    if isinstance(family, str):
        family = FamilyId.parse(family)
    T = top_set(family, m, lam)
    gens = _family_generators(family, m)
    F = lambda v: Fp(v, p)
    b0 = F(beta0)
    a0 = b0 if alpha0 is None else F(alpha0)
    zz = F(z)
    if not family.planar and lam > 0 and family.flavor != "ordinary":
        if S is None:
            raise ValueError("symmetric cell modules need an H_lambda label")
        rep = WreathSimple(tuple((F(v), tuple(mu)) for v, mu in S), F)
    else:
        rep = None
    sdim = rep.dim if rep else 1
    n = len(T) * sdim
    index = {x: i for i, x in enumerate(T.diagrams)}
    out = {}
    for name, g in gens.items():
        M = np.zeros((n, n), dtype=np.int64)
        for x, j in index.items():
            el = compose(g, x)
            d = el.diagram
            if d.n_through() != lam or d.has_wrapping():
                continue
            x2 = top_half(d)
            h = _solve_h(d, x2)
            free = dotted_paths(g, x) if family.base in DOTTED_BASES else 0
            sc = classify(family, lam, type(el)(h, el.beta, el.alpha), free)
            val = (b0 ** sc.beta) * (a0 ** sc.alpha)
            i = index[x2]
            if sc.kind == "tau":
                if zz.v == 0:
                    raise ValueError("z must be invertible")
                val = val * (zz ** sc.data if sc.data >= 0 else (zz ** -sc.data).inverse())
                M[i, j] = val.v
            elif sc.kind == "t":
                M[i, j] = (val * (zz ** sc.data if sc.data else F(1))).v
            elif sc.kind == "one":
                for k in range(sdim):
                    M[i * sdim + k, j * sdim + k] = val.v
            else:
                blk = rep.matrix(*sc.data)
                for r_ in range(sdim):
                    for c_ in range(sdim):
                        M[i * sdim + r_, j * sdim + c_] = (val * blk[r_][c_]).v
        out[name] = M
    units = {k for k in out if k.rstrip("0123456789") in UNIT_KINDS}
    return MatRep(p, out, units, label=f"{family} Delta({lam},{z})")


# --- oracle used by tests and the CLI -------------------------------------------------------------

def exhaustive_length(rep: MatRep):
    """Composition factor dimensions by brute force: the smallest cyclic
    submodule over all vectors is simple; recurse on the quotient."""
    p, d = rep.p, rep.dim
    if d == 0:
        return []
    mats = rep.mats()
    best = None
    for v in itertools.product(range(p), repeat=d):
        if not any(v):
            continue
        first = next(x for x in v if x)
        if first != 1:
            continue
        W, piv = spin(np.array(v), mats, p)
        if best is None or W.shape[0] < best[0].shape[0]:
            best = (W, piv)
            if W.shape[0] == 1:
                break
    W, piv = best
    return [W.shape[0]] + exhaustive_length(rep.quotient(W, piv))

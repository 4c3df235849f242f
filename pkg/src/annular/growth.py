"""Character tables, column sums and exact growth counts.

Everything here is exact: character values live in cyclotomic fields and
weights of abelian normal subgroups are integer exponent vectors, so a
"generic" character is a structural statement rather than a numeric one.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from sympy import factorint

from .exactmath import Cyclotomic, compositions, involution_count, is_prime, multinomial, partitions


class UnsupportedGroup(ValueError):
    pass


class NotCentral(ValueError):
    pass


class EngineCapExceeded(RuntimeError):
    pass


def _cyc_int(c) -> int:
    """Convert an exact scalar known to be an integer."""
    if isinstance(c, Cyclotomic):
        c = c.to_rational()
    c = Fraction(c)
    if c.denominator != 1:
        raise ValueError(f"expected an integer, got {c}")
    return int(c)


# --- character tables ---------------------------------------------------------------------

@dataclass
class CharacterTable:
    name: str
    order: int
    classes: list
    sizes: list
    inverse: list
    values: list  # rows are irreducibles, entries Cyclotomic(conductor)
    conductor: int
    irreps: list
    identity: int = 0
    element_class: dict = field(default_factory=dict, repr=False)

    @property
    def degrees(self):
        return [_cyc_int(row[self.identity]) for row in self.values]

    def __len__(self):
        return len(self.classes)

    def class_of(self, element) -> int:
        return self.element_class[element]

    def row_orthogonality(self) -> bool:
        k = len(self.classes)
        conj = [[v.conjugate() for v in row] for row in self.values]
        for i, a in enumerate(self.values):
            for j, b in enumerate(conj):
                s = sum((a[t] * b[t] * self.sizes[t] for t in range(k)), Cyclotomic.rational(self.conductor, 0))
                if s != (self.order if i == j else 0):
                    return False
        return True

    def column_orthogonality(self) -> bool:
        k = len(self.classes)
        for s in range(k):
            for t in range(k):
                tot = sum((row[s] * row[t].conjugate() for row in self.values),
                          Cyclotomic.rational(self.conductor, 0))
                want = Fraction(self.order, self.sizes[s]) if s == t else 0
                if tot != want:
                    return False
        return True


def _sort_irreps(labels, rows, identity):
    order = sorted(range(len(rows)), key=lambda i: _cyc_int(rows[i][identity]))
    return [labels[i] for i in order], [rows[i] for i in order]


@lru_cache(maxsize=None)
def mn_character(lam: tuple, mu: tuple) -> int:
    """chi^lam at cycle type mu by rim-hook removal on beta-sets."""
    if not mu:
        return 1 if sum(lam) == 0 else 0
    k, rest = mu[0], mu[1:]
    L = len(lam)
    beta = [lam[i] + L - 1 - i for i in range(L)]
    bs = set(beta)
    total = 0
    for b in beta:
        nb = b - k
        if nb < 0 or nb in bs:
            continue
        sign = -1 if sum(1 for x in beta if nb < x < b) % 2 else 1
        newbeta = sorted((bs - {b}) | {nb}, reverse=True)
        newlam = tuple(x - (L - 1 - i) for i, x in enumerate(newbeta))
        total += sign * mn_character(tuple(x for x in newlam if x > 0), rest)
    return total


def _centralizer_sym(mu) -> int:
    out = 1
    for k in set(mu):
        c = mu.count(k)
        out *= k ** c * math.factorial(c)
    return out


def symmetric_table(n: int) -> CharacterTable:
    if not 0 <= n <= 6:
        raise UnsupportedGroup("symmetric groups are supported up to degree 6")
    parts = [tuple(p) for p in partitions(n)]
    classes = parts[::-1]  # identity (1^n) first
    sizes = [math.factorial(n) // _centralizer_sym(mu) for mu in classes]
    rows = [[Cyclotomic.rational(1, mn_character(lam, mu)) for mu in classes] for lam in parts]
    labels, rows = _sort_irreps(parts, rows, 0)
    return CharacterTable(f"S{n}", math.factorial(n), classes, sizes, list(range(len(classes))),
                          rows, 1, labels)


def cyclic_table(r: int) -> CharacterTable:
    if not 1 <= r <= 64:
        raise UnsupportedGroup("cyclic groups are supported up to order 64")
    rows = [[Cyclotomic.root(r, j * k) for k in range(r)] for j in range(r)]
    return CharacterTable(f"C{r}", r, list(range(r)), [1] * r, [(-k) % r for k in range(r)],
                          rows, r, list(range(r)))


def wreath_classes(r: int, m: int):
    """Classes of C_r wr S_m as sorted tuples of (cycle length, winding sum mod r)."""
    out = []
    for mu in partitions(m):
        for winds in itertools.product(range(r), repeat=len(mu)):
            out.append(tuple(sorted(zip(mu, winds))))
    out = sorted(set(out), key=lambda c: (-len(c), c))
    return out


def _wreath_centralizer(cls, r) -> int:
    out = 1
    for key in set(cls):
        c = cls.count(key)
        out *= (key[0] * r) ** c * math.factorial(c)
    return out


def _multipartitions(r: int, m: int):
    for sizes in compositions(m, r):
        for parts in itertools.product(*[[tuple(p) for p in partitions(s)] for s in sizes]):
            yield parts


def _wreath_value(label, cls, r):
    """Sum over colourings of the cycles matching the colour sizes of ``label``."""
    need = [sum(p) for p in label]
    coeffs = [0] * r
    for colours in itertools.product(range(r), repeat=len(cls)):
        got = [0] * r
        for (length, _), c in zip(cls, colours):
            got[c] += length
        if got != need:
            continue
        expo = sum(c * w for (_, w), c in zip(cls, colours)) % r
        val = 1
        for i in range(r):
            mu = tuple(sorted((length for (length, _), c in zip(cls, colours) if c == i), reverse=True))
            val *= mn_character(label[i], mu)
            if not val:
                break
        coeffs[expo] += val
    return Cyclotomic(r, coeffs)


def wreath_table(r: int, m: int) -> CharacterTable:
    if not (1 <= r <= 12 and 1 <= m <= 3):
        raise UnsupportedGroup("C_r wr S_m is supported for r <= 12, m <= 3")
    classes = wreath_classes(r, m)
    order = r ** m * math.factorial(m)
    sizes = [order // _wreath_centralizer(c, r) for c in classes]
    index = {c: i for i, c in enumerate(classes)}
    inverse = [index[tuple(sorted((k, (-w) % r) for k, w in c))] for c in classes]
    labels = list(_multipartitions(r, m))
    rows = [[_wreath_value(lab, c, r) for c in classes] for lab in labels]
    identity = index[tuple((1, 0) for _ in range(m))]
    labels, rows = _sort_irreps(labels, rows, identity)
    return CharacterTable(f"C{r}wrS{m}", order, classes, sizes, inverse, rows, r, labels, identity)


# --- small explicit groups: a Burnside/Dixon computation over F_p -------------------------------

def _prime_1_mod(e: int, lower: int) -> int:
    p = lower + 1
    while True:
        if p % e == 1 and is_prime(p):
            return p
        p += 1


def _primitive_root_mod(p: int) -> int:
    facs = list(factorint(p - 1))
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in facs):
            return g
    return 1


def tiny_explicit(elements, mul, name: str = "tiny") -> CharacterTable:
    """Character table of an explicit group of order at most 48.

    Central characters are the common eigenvectors of the class
    multiplication matrices over F_p with p = 1 mod the exponent; values are
    lifted to Q(zeta_e) through eigenvalue multiplicities on cyclic subgroups.
    """
    els = list(dict.fromkeys(elements))
    n = len(els)
    if n > 48:
        raise UnsupportedGroup("explicit groups are limited to order 48")
    idx = {g: i for i, g in enumerate(els)}
    table = [[idx.get(mul(a, b)) for b in els] for a in els]
    if any(x is None for row in table for x in row):
        raise ValueError("elements are not closed under multiplication")
    e = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    inv = [table[i].index(e) for i in range(n)]
    # conjugacy classes, identity first then by element order and size
    cls_of = [-1] * n
    raw = []
    for i in range(n):
        if cls_of[i] < 0:
            orbit = sorted({table[table[g][i]][inv[g]] for g in range(n)})
            for x in orbit:
                cls_of[x] = len(raw)
            raw.append(orbit)

    def order_of(i):
        k, x = 1, i
        while x != e:
            x, k = table[x][i], k + 1
        return k

    perm = sorted(range(len(raw)), key=lambda c: (order_of(raw[c][0]), len(raw[c]), raw[c][0]))
    classes = [raw[c] for c in perm]
    cls_of = [0] * n
    for c, orbit in enumerate(classes):
        for x in orbit:
            cls_of[x] = c
    k = len(classes)
    sizes = [len(c) for c in classes]
    reps = [c[0] for c in classes]
    inverse = [cls_of[inv[r]] for r in reps]
    expo = math.lcm(*[order_of(r) for r in reps])
    p = _prime_1_mod(expo, max(2 * n, 50))
    # class structure constants: A_j[r][s] = #{x in C_j : x^-1 g_s in C_r}
    mats = []
    for j in range(k):
        A = np.zeros((k, k), dtype=np.int64)
        for s in range(k):
            for x in classes[j]:
                A[cls_of[table[inv[x]][reps[s]]], s] += 1
        mats.append(A % p)
    from .repdecomp import matmul, nullspace

    spaces = [np.eye(k, dtype=np.int64)]
    for A in mats:
        nxt = []
        for B in spaces:
            if B.shape[0] == 1:
                nxt.append(B)
                continue
            found = 0
            for lam in range(p):
                M = (A - lam * np.eye(k, dtype=np.int64)) % p
                ns = nullspace(matmul(M, B.T, p), p)
                if ns.shape[0]:
                    nxt.append(matmul(ns, B, p))
                    found += ns.shape[0]
                    if found == B.shape[0]:
                        break
            if found != B.shape[0]:
                raise ArithmeticError("class matrices did not diagonalise")
        spaces = nxt
    if len(spaces) != k:
        raise ArithmeticError("class matrices do not separate the characters")
    z = pow(_primitive_root_mod(p), (p - 1) // expo, p)
    rows = []
    for B in spaces:
        w = B[0] * pow(int(B[0][0]), p - 2, p) % p
        tot = sum(int(w[j]) * int(w[inverse[j]]) * pow(sizes[j], p - 2, p) for j in range(k)) % p
        dsq = n * pow(tot, p - 2, p) % p
        d = next(d for d in range(1, math.isqrt(n) + 1) if d * d % p == dsq)
        vals = [int(w[j]) * d * pow(sizes[j], p - 2, p) % p for j in range(k)]
        row = []
        for j in range(k):
            g = reps[j]
            o = order_of(g)
            powers, x = [], e
            for _ in range(o):
                powers.append(vals[cls_of[x]])
                x = table[x][g]
            zo = pow(z, expo // o, p)
            coeffs = [0] * expo
            for t in range(o):
                mult = sum(powers[l] * pow(zo, (-l * t) % o, p) for l in range(o)) * pow(o, p - 2, p) % p
                if mult > d:
                    raise ArithmeticError("lifted multiplicity out of range")
                coeffs[(t * expo // o) % expo] += mult
            row.append(Cyclotomic(expo, coeffs))
        rows.append(row)
    labels, rows = _sort_irreps(list(range(k)), rows, 0)
    return CharacterTable(name, n, [tuple(els[x] for x in c) for c in classes], sizes, inverse,
                          rows, expo, labels, 0, {els[x]: cls_of[x] for x in range(n)})


def permutation_group(gens):
    """Close a set of permutation tuples under composition."""
    gens = [tuple(g) for g in gens]
    ident = tuple(range(len(gens[0]))) if gens else ()
    seen, frontier = {ident}, [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = tuple(a[i] for i in g)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return sorted(seen)


def perm_mul(a, b):
    """(a*b)(i) = a(b(i))."""
    return tuple(a[i] for i in b)


def _parse_table_spec(spec: str) -> CharacterTable:
    s = spec.replace(" ", "").replace("≀", "wr")
    if m := re.fullmatch(r"S(\d+)", s):
        return symmetric_table(int(m.group(1)))
    if m := re.fullmatch(r"C(\d+)", s):
        return cyclic_table(int(m.group(1)))
    if m := re.fullmatch(r"C(\d+)wrS(\d+)", s):
        return wreath_table(int(m.group(1)), int(m.group(2)))
    raise UnsupportedGroup(f"unsupported group spec {spec!r}")


def char_table(spec) -> CharacterTable:
    """Tables for 'S<n>', 'C<r>', 'C<r>wrS<m>' or ('tiny', elements, mul)."""
    if isinstance(spec, str):
        return _parse_table_spec(spec)
    if isinstance(spec, tuple) and spec and spec[0] == "tiny":
        return tiny_explicit(*spec[1:])
    raise UnsupportedGroup(f"unsupported group spec {spec!r}")


def column_sums(table: CharacterTable):
    """S_t: the sum of the column at the inverse class of g_t."""
    out = []
    for t in range(len(table.classes)):
        s = sum((row[table.inverse[t]] for row in table.values), Cyclotomic.rational(table.conductor, 0))
        out.append(_cyc_int(s) if s.is_rational() else s)
    return out


@dataclass
class VData:
    dim: int
    central: dict = field(default_factory=dict)  # class index -> scalar omega
    character: list | None = None

    @classmethod
    def from_character(cls, table: CharacterTable, character):
        chi = [c if isinstance(c, Cyclotomic) else Cyclotomic.rational(table.conductor, c) for c in character]
        d = _cyc_int(chi[table.identity])
        central = {}
        for t, c in enumerate(chi):
            if c * c.conjugate() == d * d:
                central[t] = c * Fraction(1, d)
        return cls(d, central, chi)


def predict_a_n(table: CharacterTable, V: VData, n: int):
    """(1/|G|) sum over elements acting as scalars of S_t omega_t^n (dim V)^n."""
    S = column_sums(table)
    total = Cyclotomic.rational(table.conductor, 0)
    for t, omega in V.central.items():
        if not isinstance(omega, Cyclotomic):
            omega = Cyclotomic.rational(table.conductor, omega)
        if V.character is not None and V.character[t] != omega * V.dim:
            raise NotCentral(f"class {t} does not act by the scalar {omega}")
        total = total + omega ** n * S[t] * table.sizes[t]
    total = total * Fraction(V.dim ** n, table.order)
    return total.to_rational() if total.is_rational() else total


def exact_l_finite(table: CharacterTable, character, n: int) -> int:
    """Number of composition factors of V^n in the semisimple case."""
    S_inv = [sum((row[t] for row in table.values), Cyclotomic.rational(table.conductor, 0))
             for t in range(len(table.classes))]
    total = Cyclotomic.rational(table.conductor, 0)
    for t, c in enumerate(character):
        if not isinstance(c, Cyclotomic):
            c = Cyclotomic.rational(table.conductor, c)
        total = total + c ** n * S_inv[table.inverse[t]] * table.sizes[t]
    return _cyc_int(total * Fraction(1, table.order))


# --- generalized symmetric groups -------------------------------------------------------------

def gensym_column_sum(m: int, r: int, t: int) -> int:
    """Column sum of C_m wr S_r at the central element zeta^t."""
    if not 0 <= t < m:
        raise ValueError("need 0 <= t < m")
    if r == 0:
        return 1  # the trivial group: every zeta^t is the identity
    if t == 0:
        return sum(math.factorial(r) // (math.factorial(r - 2 * k) * math.factorial(k) * 2 ** k) * m ** (r - k)
                   for k in range(r // 2 + 1))
    if 2 * t == m and r % 2 == 0:
        return math.factorial(r) // math.factorial(r // 2) * (m // 2) ** (r // 2)
    return 0


def gensym_column_sum_oracle(m: int, r: int, t: int) -> int:
    """Direct sum over compositions r_1 + ... + r_m = r."""
    total = Cyclotomic.rational(m, 0)
    for comp in compositions(r, m):
        expo = t * sum(i * ri for i, ri in enumerate(comp))
        term = Fraction(math.factorial(r))
        for ri in comp:
            term *= Fraction(involution_count(ri), math.factorial(ri))
        total = total + Cyclotomic.root(m, expo) * term
    return _cyc_int(total)


def gensym_central_class(m: int, r: int, t: int):
    """Class label of zeta^t * I inside the table of C_m wr S_r."""
    return tuple((1, t % m) for _ in range(r))


# --- abelian-by-finite groups -------------------------------------------------------------------

def _apply(P, w, c, modulus):
    k = len(P)
    rows = [w[i * c:(i + 1) * c] for i in range(k)]
    out = []
    for i in range(k):
        for col in range(c):
            v = sum(P[i][j] * rows[j][col] for j in range(k))
            out.append(v % modulus if modulus else v)
    return tuple(out)


def _matmul_int(a, b):
    return tuple(tuple(sum(a[i][l] * b[l][j] for l in range(len(b))) for j in range(len(b[0])))
                 for i in range(len(a)))


@dataclass
class MonomialGroupRep:
    """V = Ind(chi) for A x| H, with A = Z^k (or (Z/q)^k) and H acting by integer matrices.

    A weight is a flat tuple of k rows of ``cols`` exponents: row j gives chi
    on the j-th generator of A.  h sends a weight W to P_h W.
    """
    k: int
    cols: int
    H: list
    lines: list
    modulus: int | None = None
    scalars: dict = field(default_factory=dict)  # (h index, line index) -> scalar
    values: tuple | None = None  # numeric value of each exponent column, used for matrices
    label: str = ""

    def __post_init__(self):
        self.H = [tuple(tuple(int(x) for x in row) for row in P) for P in self.H]
        self.lines = [self._norm(w) for w in self.lines]
        hs = set(self.H)
        if any(_matmul_int(a, b) not in hs for a in self.H for b in self.H):
            raise ValueError("H is not closed under multiplication")
        ls = set(self.lines)
        if len(ls) != len(self.lines):
            raise ValueError("lines must carry distinct weights")
        if any(self.act(P, w) not in ls for P in self.H for w in self.lines):
            raise ValueError("H does not permute the line weights")

    def _norm(self, w):
        w = tuple(int(x) for x in w)
        return tuple(x % self.modulus for x in w) if self.modulus else w

    def act(self, P, w):
        return _apply(P, w, self.cols, self.modulus)

    @property
    def dim(self) -> int:
        return len(self.lines)

    def image(self, h: int, line: int):
        target = self.lines.index(self.act(self.H[h], self.lines[line]))
        return target, self.scalars.get((h, line), 1)

    @property
    def identity(self) -> int:
        ident = tuple(tuple(int(i == j) for j in range(self.k)) for i in range(self.k))
        return self.H.index(ident)


def _poly_mul(a, b, modulus, cap):
    out = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = tuple((x + y) % modulus if modulus else x + y for x, y in zip(wa, wb))
            out[w] = out.get(w, 0) + ca * cb
    out = {w: c for w, c in out.items() if c != 0}
    if len(out) > cap:
        raise EngineCapExceeded(f"weight polynomial exceeds {cap} terms")
    return out


def _poly_pow(f, n, modulus, cap, zero):
    out = {zero: 1}
    for _ in range(n):
        out = _poly_mul(out, f, modulus, cap)
    return out


def weight_expansion(rep: MonomialGroupRep, n: int, cap: int = 2_000_000) -> dict:
    """Weights of V^n with multiplicity: (sum over lines of x^wt)^n."""
    f = {}
    for w in rep.lines:
        f[w] = f.get(w, 0) + 1
    return _poly_pow(f, n, rep.modulus, cap, tuple([0] * (rep.k * rep.cols)))


@dataclass
class EngineResult:
    n: int
    count: int
    dim_total: int
    orbits: list  # (representative, orbit size, stabilizer order, constituent count)

    def conserved(self, dim_v: int) -> bool:
        return self.dim_total == dim_v ** self.n


_STAB_TABLES: dict = {}


def _stabilizer_table(elements):
    key = frozenset(elements)
    if key not in _STAB_TABLES:
        if len(elements) > 24:
            raise UnsupportedGroup("stabilizers are limited to order 24")
        _STAB_TABLES[key] = tiny_explicit(sorted(elements), _matmul_int, "stab")
    return _STAB_TABLES[key]


def exact_l_abelian_by_finite(rep: MonomialGroupRep, n: int, cap: int = 2_000_000) -> EngineResult:
    if len(rep.H) > 24:
        raise UnsupportedGroup("H is limited to order 24")
    zero = tuple([0] * (rep.k * rep.cols))
    twisted = []
    for h in range(len(rep.H)):
        f = {}
        for i, w in enumerate(rep.lines):
            tgt, sc = rep.image(h, i)
            if tgt == i:
                f[w] = f.get(w, 0) + sc
        twisted.append(_poly_pow(f, n, rep.modulus, cap, zero) if f else {})
    full = twisted[rep.identity]
    seen = set()
    orbits = []
    count = dim_total = 0
    for mu in sorted(full):
        if mu in seen:
            continue
        orb = {rep.act(P, mu) for P in rep.H}
        seen |= orb
        stab = [h for h, P in enumerate(rep.H) if rep.act(P, mu) == mu]
        if len(stab) == 1:
            c = full[mu]
            count += c
            dim_total += c * len(orb)
            orbits.append((mu, len(orb), 1, c))
            continue
        tab = _stabilizer_table([rep.H[h] for h in stab])
        here = 0
        for row in tab.values:
            tot = Cyclotomic.rational(tab.conductor, 0)
            for h in stab:
                tr = twisted[h].get(mu, 0)
                if tr:
                    tot = tot + row[tab.class_of(rep.H[h])].conjugate() * tr
            mult = _cyc_int(tot * Fraction(1, len(stab)))
            here += mult
            dim_total += mult * len(orb) * _cyc_int(row[tab.identity])
        count += here
        orbits.append((mu, len(orb), len(stab), here))
    return EngineResult(n, count, dim_total, orbits)


def _perm_matrix(sigma):
    k = len(sigma)
    return tuple(tuple(int(sigma[j] == i) for j in range(k)) for i in range(k))


def wreath_rep(m: int, weights, modulus: int | None = None) -> MonomialGroupRep:
    """Ind to Z wr S_m (or C_q wr S_m) of the character e_j -> weights[j].

    Over Z the weights are positive integers encoded by prime exponents;
    over C_q they are exponents of a fixed primitive q-th root of unity.
    """
    if len(weights) != m:
        raise ValueError("need one weight per coordinate")
    H = [_perm_matrix(s) for s in itertools.permutations(range(m))]
    if modulus:
        cols, values = 1, None
        chi = tuple(int(w) % modulus for w in weights)
    else:
        if any(int(w) < 1 for w in weights):
            raise ValueError("weights over Z must be positive integers")
        primes = sorted({q for w in weights for q in factorint(int(w))}) or [2]
        cols, values = len(primes), tuple(primes)
        chi = tuple(factorint(int(w)).get(q, 0) for w in weights for q in primes)
    lines = sorted({_apply(P, chi, cols, modulus) for P in H})
    label = f"{'C%d' % modulus if modulus else 'Z'} wr S{m} weights={','.join(map(str, weights))}"
    return MonomialGroupRep(m, cols, H, lines, modulus, values=values, label=label)


P3_ROTATION = ((0, 1), (-1, -1))


def wallpaper_p3_rep(modulus: int | None = None, chi=None) -> MonomialGroupRep:
    """Ind of chi_{a,b} to Z^2 x| C_3; generic a, b are independent exponent directions."""
    t = P3_ROTATION
    H = [((1, 0), (0, 1)), t, _matmul_int(t, t)]
    if modulus:
        chi = tuple(chi or (1, 0))
        cols = 1
    else:
        chi = (1, 0, 0, 1)
        cols = 2
    lines = []
    w = chi
    for P in H:
        lines.append(_apply(P, w, cols, modulus))
    label = "wallpaper p3 " + (f"mod={modulus}" if modulus else "generic")
    return MonomialGroupRep(2, cols, H, lines, modulus, values=None if modulus else (2, 3), label=label)


def wallpaper_l(n: int, mode: str = "engine") -> int:
    if mode == "engine":
        return exact_l_abelian_by_finite(wallpaper_p3_rep(), n).count
    if mode == "paperFormula":
        if n % 3 == 0:
            return 3 ** (n - 1) - multinomial(n, (n // 3,) * 3)
        return 3 ** (n - 1)
    raise ValueError(f"unknown mode {mode!r}")


def wallpaper_report(n: int) -> dict:
    """Both values side by side, flagging disagreement."""
    res = exact_l_abelian_by_finite(wallpaper_p3_rep(), n)
    formula = wallpaper_l(n, "paperFormula")
    return {"n": n, "engine": res.count, "paperFormula": formula,
            "conserved": res.conserved(3), "discrepancy": res.count != formula}


def explicit_module(rep: MonomialGroupRep, p: int):
    """V as a matrix module over F_p; generators are A's basis and H."""
    from .repdecomp import MatRep

    d = rep.dim
    gens = {}
    if rep.modulus:
        if (p - 1) % rep.modulus:
            raise ValueError("p must be 1 mod the exponent of A")
        zeta = pow(_primitive_root_mod(p), (p - 1) // rep.modulus, p)
        values = [zeta] * rep.cols
    else:
        values = list(rep.values)
    for j in range(rep.k):
        D = np.zeros((d, d), dtype=np.int64)
        for i, w in enumerate(rep.lines):
            v = 1
            for col in range(rep.cols):
                e = w[j * rep.cols + col]
                v = v * pow(values[col], e % (p - 1) if e < 0 else e, p) % p
            D[i, i] = v
        gens[f"a{j + 1}"] = D
    for h in range(len(rep.H)):
        if h == rep.identity:
            continue
        M = np.zeros((d, d), dtype=np.int64)
        for i in range(d):
            tgt, sc = rep.image(h, i)
            M[tgt, i] = int(sc) % p
        gens[f"h{h}"] = M
    return MatRep(p, gens, frozenset(gens), rep.label)


def explicit_tensor_power(rep: MonomialGroupRep, n: int, p: int):
    from .repdecomp import tensor_rep

    V = explicit_module(rep, p)
    out = V
    for _ in range(n - 1):
        out = tensor_rep(out, V)
    return out


def splitting_prime(rep: MonomialGroupRep, lower: int = 1000) -> int:
    """A prime with enough roots of unity for A and the stabilizers."""
    e = math.lcm(rep.modulus or 1, 3 * len(rep.H))
    return _prime_1_mod(e, lower)


# --- series ----------------------------------------------------------------------------------------

def parse_group_spec(text: str) -> MonomialGroupRep:
    """'wreath Z S3 weights=1,2,3', 'wreath C3 S3 weights=0,1,2', 'wallpaper p3 generic'."""
    toks = text.split()
    if toks[:1] == ["wreath"] and len(toks) == 4:
        base, sym, wts = toks[1:]
        m = int(sym.lstrip("S"))
        weights = [int(x) for x in wts.split("=", 1)[1].split(",")]
        modulus = None if base == "Z" else int(base.lstrip("C"))
        return wreath_rep(m, weights, modulus)
    if toks[:2] == ["wallpaper", "p3"] and len(toks) == 3:
        if toks[2] == "generic":
            return wallpaper_p3_rep()
        if toks[2].startswith("mod="):
            return wallpaper_p3_rep(int(toks[2][4:]))
    raise UnsupportedGroup(f"cannot parse group spec {text!r}")


@dataclass
class GrowthSeries:
    name: str
    rows: list  # (n, value, comparison, ratio)
    meta: dict = field(default_factory=dict)

    def values(self):
        return [v for _, v, _, _ in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.meta.items():
            buf.write(f"# {k}={v}\n")
        w = csv.writer(buf)
        w.writerow(["n", "value", "k_n", "ratio"])
        for n, v, k, r in self.rows:
            w.writerow([n, v, "" if k is None else k, "" if r is None else f"{float(r):.6f}"])
        return buf.getvalue()


def growth_series(source, n_max: int) -> GrowthSeries:
    """Series from a group spec string, a MonomialGroupRep, a FusionGraph or 'trivial'."""
    from .repdecomp import FusionGraph

    if source == "trivial":
        return GrowthSeries("trivial", [(n, 1, 1, Fraction(1)) for n in range(1, n_max + 1)])
    if isinstance(source, str):
        source = parse_group_spec(source)
    if isinstance(source, MonomialGroupRep):
        rows = []
        for n in range(1, n_max + 1):
            res = exact_l_abelian_by_finite(source, n)
            if not res.conserved(source.dim):
                raise ArithmeticError(f"dimension conservation failed at n={n}")
            k = Fraction(source.dim ** n, len(source.H))
            rows.append((n, res.count, k, res.count / k))
        return GrowthSeries(source.label, rows, {"dim": source.dim, "H": len(source.H)})
    if isinstance(source, FusionGraph):
        rows = []
        dim = source.dim_v
        for n, total, ann in source.counts(n_max):
            rows.append((n, total, dim ** n, Fraction(ann, total) if total else None))
        return GrowthSeries(f"fusion graph ({source.mode})", rows, {"dim": dim, "ratio": "annihilated/total"})
    raise UnsupportedGroup(f"unsupported growth source {source!r}")

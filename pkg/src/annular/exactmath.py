"""Exact scalars, Laurent polynomials and the small combinatorial kernels.

Everything here is immutable.  Coefficient rings are plain Python ints,
``fractions.Fraction`` or :class:`Fp` elements.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class Fp:
    """Element of the prime field F_p, value kept in [0, p)."""

    __slots__ = ("v", "p")

    def __init__(self, v, p: int):
        if not 2 <= p < 2**31:
            raise ValueError("prime modulus must lie in [2, 2^31)")
        if isinstance(v, Fraction):
            v = v.numerator * pow(v.denominator, -1, p)
        self.v = int(v) % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError("mixing prime fields")
            return other.v
        if isinstance(other, (int, Fraction)):
            return Fp(other, self.p).v
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.v, self.p)

    def inverse(self) -> "Fp":
        if self.v == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return Fp(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * Fp(o, self.p).inverse()

    def __rtruediv__(self, other):
        return Fp(other, self.p) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return Fp(pow(self.v, e, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.v == other.v
        if isinstance(other, (int, Fraction)):
            return self.v == Fp(other, self.p).v
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"


def is_zero(c) -> bool:
    return c == 0


class MultiLaurent:
    """Laurent polynomial in a fixed ordered list of variables.

    ``terms`` maps exponent tuples to nonzero coefficients.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables, terms=None):
        self.vars = tuple(variables)
        n = len(self.vars)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError("exponent length does not match variables")
            if c != 0:
                clean[exp] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def const(cls, variables, c):
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def monomial(cls, variables, exp, c=1):
        return cls(variables, {tuple(exp): c})

    @classmethod
    def var(cls, variables, name, power=1):
        variables = tuple(variables)
        exp = [0] * len(variables)
        exp[variables.index(name)] = power
        return cls(variables, {tuple(exp): 1})

    def _coerce(self, other):
        if isinstance(other, MultiLaurent):
            if other.vars != self.vars:
                raise ValueError("variable lists differ: %s vs %s" % (self.vars, other.vars))
            return other
        return MultiLaurent.const(self.vars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiLaurent(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiLaurent(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiLaurent(self.vars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials can be inverted")
            (e, c), = self.terms.items()
            inv = Fraction(1, c) if isinstance(c, int) else 1 / c
            return MultiLaurent(self.vars, {tuple(-x for x in e): inv}) ** (-n)
        result = MultiLaurent.const(self.vars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def coefficient(self, exp):
        return self.terms.get(tuple(exp), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, values):
        """Substitute a value for every variable (values must be invertible
        wherever a negative exponent occurs)."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for v, k in zip(values, e):
                term = term * (v ** k)
            total = total + term
        return total

    def map_coeffs(self, f):
        return MultiLaurent(self.vars, {e: f(c) for e, c in self.terms.items()})

    def substitute_monomials(self, images):
        """Apply the ring map sending variable i to the MultiLaurent images[i]."""
        if not images:
            return self
        target_vars = images[0].vars
        total = MultiLaurent(target_vars)
        for e, c in self.terms.items():
            term = MultiLaurent.const(target_vars, c)
            for img, k in zip(images, e):
                term = term * (img ** k)
            total = total + term
        return total

    def swap_sign(self, index: int):
        """Return the image under x_index -> x_index^{-1}."""
        out = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[index] = -e2[index]
            out[tuple(e2)] = c
        return MultiLaurent(self.vars, out)

    def total_mass(self):
        return sum(self.terms.values())

    def __eq__(self, other):
        if isinstance(other, MultiLaurent):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction, Fp)):
            return self == MultiLaurent.const(self.vars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            c = self.terms[e]
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


# --- cyclotomic numbers -------------------------------------------------

def _poly_divmod(num, den):
    """Integer/rational polynomial division, coefficient lists low degree first."""
    num = list(num)
    out = [0] * max(len(num) - len(den) + 1, 1)
    lead = den[-1]
    for i in range(len(num) - len(den), -1, -1):
        q = Fraction(num[i + len(den) - 1], lead)
        if q.denominator == 1:
            q = q.numerator
        out[i] = q
        if q:
            for j, d in enumerate(den):
                num[i + j] -= q * d
    rem = num[: len(den) - 1]
    return out, rem


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Coefficients (low degree first) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_poly(d)))
            assert all(r == 0 for r in rem)
    return tuple(int(c) for c in poly)


class Cyclotomic:
    """Element of Q(zeta_n) stored as a polynomial in zeta_n of degree < phi(n)."""

    __slots__ = ("n", "c")

    def __init__(self, n: int, coeffs):
        self.n = n
        phi = cyclotomic_poly(n)
        deg = len(phi) - 1
        coeffs = [Fraction(x) for x in coeffs]
        if len(coeffs) > deg:
            _, coeffs = _poly_divmod(coeffs, list(phi))
            coeffs = [Fraction(x) for x in coeffs]
        coeffs = coeffs + [Fraction(0)] * (deg - len(coeffs))
        self.c = tuple(coeffs)

    @classmethod
    def root(cls, n: int, k: int = 1) -> "Cyclotomic":
        k %= n
        return cls(n, [0] * k + [1])

    @classmethod
    def rational(cls, n: int, x) -> "Cyclotomic":
        return cls(n, [x])

    def _coerce(self, other):
        if isinstance(other, Cyclotomic):
            if other.n != self.n:
                raise ValueError("different cyclotomic fields")
            return other
        return Cyclotomic(self.n, [other])

    def __add__(self, other):
        o = self._coerce(other)
        return Cyclotomic(self.n, [a + b for a, b in zip(self.c, o.c)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.n, [-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        prod = [Fraction(0)] * (2 * len(self.c))
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    prod[i + j] += a * b
        return Cyclotomic(self.n, prod)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers not supported")
        out = Cyclotomic.rational(self.n, 1)
        for _ in range(e):
            out = out * self
        return out

    def conjugate(self) -> "Cyclotomic":
        total = Cyclotomic.rational(self.n, 0)
        for k, a in enumerate(self.c):
            if a:
                total = total + Cyclotomic.root(self.n, -k) * a
        return total

    def is_rational(self) -> bool:
        return all(x == 0 for x in self.c[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        return self.c[0]

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            return self.n == other.n and self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.c[0] == other
        return NotImplemented

    def __hash__(self):
        return hash((self.n, self.c))

    def __repr__(self):
        if self.is_rational():
            return str(self.c[0])
        return "Cyc%d(%s)" % (self.n, ",".join(str(x) for x in self.c))


# --- combinatorial kernels ---------------------------------------------

def _check_nonneg(*args):
    for a in args:
        if not isinstance(a, int) or a < 0:
            raise ValueError(f"expected a nonnegative integer, got {a!r}")


def binomial(n: int, k: int) -> int:
    _check_nonneg(n, k)
    return math.comb(n, k)


def multinomial(n: int, parts) -> int:
    parts = list(parts)
    _check_nonneg(n, *parts)
    if sum(parts) != n:
        raise ValueError("parts must sum to n")
    out = math.factorial(n)
    for k in parts:
        out //= math.factorial(k)
    return out


def double_factorial(n: int) -> int:
    if n == -1:
        return 1
    _check_nonneg(n)
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    _check_nonneg(n, k)
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def power(base: int, e: int) -> int:
    """Integer power with the 0^0 = 1 convention made explicit."""
    if e == 0:
        return 1
    return base**e


_KERNELS = {
    "binomial": binomial,
    "multinomial": lambda n, *parts: multinomial(n, parts),
    "double_factorial": double_factorial,
    "stirling2": stirling2,
}


def combinatorial_kernels(kind: str, *args) -> int:
    if kind not in _KERNELS:
        raise ValueError(f"unknown kernel {kind!r}")
    return _KERNELS[kind](*args)


@lru_cache(maxsize=None)
def involution_count(k: int) -> int:
    """Number of involutions (including the identity) in S_k."""
    _check_nonneg(k)
    if k < 2:
        return 1
    return involution_count(k - 1) + (k - 1) * involution_count(k - 2)


def trinomial_coeff(m: int, j: int) -> int:
    """Coefficient of t^j in (1 + t + t^2)^m."""
    _check_nonneg(m)
    if j < 0 or j > 2 * m:
        return 0
    # choose i factors contributing t^2, then j - 2i factors contributing t
    return sum(
        math.comb(m, i) * math.comb(m - i, j - 2 * i)
        for i in range(0, j // 2 + 1)
        if j - 2 * i <= m - i
    )


# --- partitions ---------------------------------------------------------

class IntPartition(tuple):
    """A weakly decreasing tuple of positive integers."""

    def __new__(cls, parts=()):
        parts = tuple(int(p) for p in parts)
        if any(p <= 0 for p in parts):
            raise ValueError("partition parts must be positive")
        return super().__new__(cls, sorted(parts, reverse=True))

    @property
    def size(self) -> int:
        return sum(self)

    def conjugate(self) -> "IntPartition":
        if not self:
            return IntPartition()
        return IntPartition(sum(1 for p in self if p > i) for i in range(self[0]))

    def __repr__(self):
        return "[" + ",".join(map(str, self)) + "]"


def partitions(n: int, max_part: int | None = None):
    """All partitions of n in reverse lexicographic order."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield IntPartition()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield IntPartition((first,) + tuple(rest))


def hook_dim(part) -> int:
    """Number of standard Young tableaux of the given shape."""
    part = IntPartition(part)
    n = part.size
    conj = part.conjugate()
    hooks = 1
    for i, row in enumerate(part):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(n) // hooks


# --- power series -------------------------------------------------------

def _series_mul(a, b, order):
    out = [0] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x:
            for j, y in enumerate(b[: order + 1 - i]):
                out[i + j] += x * y
    return out


def lagrange_inversion_check(series_order: int, phi=(1, 1, 1)) -> bool:
    """Check [x^n] N^k = (k/n) [t^(n-k)] phi^n for 1 <= k <= n <= order.

    The left side uses N = x M(x) with M from the Motzkin recurrence
    M = 1 + xM + x^2 M^2; the right side expands powers of ``phi``.  With
    the default phi = 1 + t + t^2 both sides must agree.
    """
    if series_order < 2:
        raise ValueError("series_order must be at least 2")
    order = series_order
    N = [0] + motzkin_numbers(order)
    phi_poly = MultiLaurent(("t",), {(i,): c for i, c in enumerate(phi) if c})
    for n in range(1, order + 1):
        phin = phi_poly**n
        Nk = [1] + [0] * order
        for k in range(1, n + 1):
            Nk = _series_mul(Nk, N, order)
            lhs = Fraction(Nk[n])
            rhs = Fraction(k, n) * phin.coefficient((n - k,))
            if lhs != rhs:
                return False
    return True


def motzkin_numbers(count: int):
    """M_0..M_{count-1} from the quadratic recurrence M = 1 + xM + x^2 M^2."""
    M = [0] * count
    for n in range(count):
        if n == 0:
            M[0] = 1
            continue
        total = M[n - 1]
        for i in range(n - 1):
            total += M[i] * M[n - 2 - i]
        M[n] = total
    return M


def compositions(total: int, parts: int):
    """Weak compositions of ``total`` into ``parts`` nonnegative pieces."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def all_vectors(bound: int, length: int):
    return product(range(-bound, bound + 1), repeat=length)

"""Exact coefficient arithmetic: the rationals, prime fields, and univariate
polynomials over either.

Field elements are plain Python values (``fractions.Fraction`` for Q, ``int``
in ``[0, p)`` for GF(p)); a field object supplies the operations.  This keeps
inner loops free of per-element wrapper overhead and makes serialization a
field concern.  Mixing elements of different fields is always an error.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt
from random import Random


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all 64-bit integers."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class RationalField:
    """The field Q; elements are ``Fraction`` in lowest terms."""

    is_modular = False
    char = 0
    name = "Q"

    zero = Fraction(0)
    one = Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero in Q")
        return 1 / a

    def div(self, a, b):
        return a / self._nonzero(b)

    @staticmethod
    def _nonzero(b):
        if b == 0:
            raise ZeroDivisionError("division by zero in Q")
        return b

    def is_zero(self, a):
        return a == 0

    def sort_key(self, a):
        return a

    def parse(self, s):
        try:
            return Fraction(str(s).strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad rational scalar {s!r}") from exc

    def fmt(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """GF(p) for a prime p; elements are ints reduced into [0, p)."""

    is_modular = True

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.name = f"Fp:{p}"
        self.zero = 0
        self.one = 1 % p

    def from_int(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError(f"inverse of zero in GF({self.p})")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def is_zero(self, a):
        return a % self.p == 0

    def sort_key(self, a):
        return a

    def parse(self, s):
        text = str(s).strip()
        if "mod" in text:
            value, mod = text.split("mod")
            if int(mod) != self.p:
                raise ValueError(f"scalar {s!r} has modulus {mod.strip()}, field is GF({self.p})")
            return int(value) % self.p
        frac = Fraction(text)
        return self.from_fraction(frac)

    def from_fraction(self, q: Fraction):
        if q.denominator % self.p == 0:
            raise ZeroDivisionError(f"denominator of {q} vanishes mod {self.p}")
        return q.numerator * pow(q.denominator, -1, self.p) % self.p

    def fmt(self, a) -> str:
        return f"{a % self.p} mod {self.p}"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def field_from_name(name: str):
    name = name.strip()
    if name == "Q":
        return QQ
    if name.startswith("Fp:"):
        return PrimeField(int(name[3:]))
    raise ValueError(f"unknown field descriptor {name!r}")


class PolyRing:
    """Univariate polynomials over a field, presented with the same
    operation surface as a field (minus inversion); lets tensor code run
    unchanged with polynomial coefficients in a formal parameter."""

    is_modular = False

    def __init__(self, base):
        self.base = base
        self.name = f"{base.name}[t]"
        self.zero = UniPoly(base, ())
        self.one = UniPoly(base, (base.one,))

    def from_int(self, n):
        return UniPoly.constant(self.base, self.base.from_int(n))

    def from_base(self, c):
        return UniPoly.constant(self.base, c)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a):
        return a.is_zero()

    def fmt(self, a) -> str:
        return a.pretty("t")

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.base == self.base

    def __hash__(self):
        return hash(("polyring", self.base))

    def __repr__(self):
        return f"PolyRing({self.base!r})"


class UniPoly:
    """Dense univariate polynomial; coefficients ascending, no trailing zeros."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        coeffs = list(coeffs)
        while coeffs and field.is_zero(coeffs[-1]):
            coeffs.pop()
        self.field = field
        self.coeffs = tuple(coeffs)

    @classmethod
    def zero(cls, field):
        return cls(field, ())

    @classmethod
    def one(cls, field):
        return cls(field, (field.one,))

    @classmethod
    def constant(cls, field, c):
        return cls(field, (c,))

    @classmethod
    def x(cls, field):
        return cls(field, (field.zero, field.one))

    @classmethod
    def from_root(cls, field, r):
        return cls(field, (field.neg(r), field.one))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and self.field.is_zero(
            self.field.sub(self.coeffs[0], self.field.one))

    def leading(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def _check(self, other):
        if self.field != other.field:
            raise ValueError("polynomials over different fields")

    def __add__(self, other):
        self._check(other)
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(F, [F.add(self.coeff(i), other.coeff(i)) for i in range(n)])

    def __sub__(self, other):
        self._check(other)
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(F, [F.sub(self.coeff(i), other.coeff(i)) for i in range(n)])

    def __neg__(self):
        F = self.field
        return UniPoly(F, [F.neg(c) for c in self.coeffs])

    def __mul__(self, other):
        self._check(other)
        F = self.field
        if self.is_zero() or other.is_zero():
            return UniPoly(F, ())
        out = [F.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if F.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = F.add(out[i + j], F.mul(a, b))
        return UniPoly(F, out)

    def scale(self, c):
        F = self.field
        return UniPoly(F, [F.mul(c, a) for a in self.coeffs])

    def shift(self, k: int):
        """Multiply by x^k."""
        if self.is_zero():
            return self
        return UniPoly(self.field, (self.field.zero,) * k + self.coeffs)

    def __pow__(self, n: int):
        result = UniPoly.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        return (isinstance(other, UniPoly) and self.field == other.field
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def divmod(self, other):
        self._check(other)
        F = self.field
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quo = [F.zero] * max(0, len(rem) - len(other.coeffs) + 1)
        inv_lead = F.inv(other.leading())
        d = other.degree
        for i in range(len(rem) - 1, d - 1, -1):
            c = F.mul(rem[i], inv_lead)
            if F.is_zero(c):
                continue
            quo[i - d] = c
            for j, b in enumerate(other.coeffs):
                rem[i - d + j] = F.sub(rem[i - d + j], F.mul(c, b))
        return UniPoly(F, quo), UniPoly(F, rem[:d])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    def monic(self):
        if self.is_zero():
            return self
        return self.scale(self.field.inv(self.leading()))

    def derivative(self):
        F = self.field
        return UniPoly(F, [F.mul(F.from_int(i), c)
                           for i, c in enumerate(self.coeffs)][1:])

    def evaluate(self, x):
        F = self.field
        acc = F.zero
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def gcd(self, other):
        """Monic greatest common divisor."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def xgcd(self, other):
        """Extended Euclid: returns (g, u, v) with u*self + v*other = g, g monic."""
        F = self.field
        r0, r1 = self, other
        u0, u1 = UniPoly.one(F), UniPoly.zero(F)
        v0, v1 = UniPoly.zero(F), UniPoly.one(F)
        while not r1.is_zero():
            q, r = r0.divmod(r1)
            r0, r1 = r1, r
            u0, u1 = u1, u0 - q * u1
            v0, v1 = v1, v0 - q * v1
        if r0.is_zero():
            return r0, u0, v0
        c = F.inv(r0.leading())
        return r0.scale(c), u0.scale(c), v0.scale(c)

    def pow_mod(self, n: int, mod: UniPoly):
        result = UniPoly.one(self.field) % mod
        base = self % mod
        while n:
            if n & 1:
                result = result * base % mod
            base = base * base % mod
            n >>= 1
        return result

    def pth_root(self):
        """For GF(p): the p-th root of a polynomial in x^p (Frobenius on the
        prime field is the identity, so coefficients carry over)."""
        p = self.field.char
        if p == 0:
            raise ValueError("p-th root only defined in characteristic p")
        if any(not self.field.is_zero(c) for i, c in enumerate(self.coeffs) if i % p):
            raise ValueError("polynomial is not a p-th power")
        return UniPoly(self.field, self.coeffs[::p])

    def pretty(self, var: str = "x") -> str:
        if self.is_zero():
            return "0"
        F = self.field
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if F.is_zero(c):
                continue
            cs = F.fmt(c)
            if i == 0:
                parts.append(cs)
            else:
                xs = var if i == 1 else f"{var}^{i}"
                parts.append(xs if cs == "1" else f"{cs}*{xs}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"UniPoly({self.pretty()})"


def squarefree_part(f: UniPoly) -> UniPoly:
    """Monic product of the distinct irreducible factors of f.

    Handles characteristic p by peeling p-th powers (prime fields only).
    """
    if f.is_zero():
        raise ValueError("squarefree part of the zero polynomial")
    f = f.monic()
    if f.degree == 0:
        return f
    d = f.derivative()
    if d.is_zero():
        return squarefree_part(f.pth_root())
    g = f.gcd(d)
    w = f.exact_div(g)
    # g retains f_i^(e_i) exactly for the factors whose multiplicity is
    # divisible by char; strip the w-factors completely to isolate them.
    r = g
    while True:
        h = r.gcd(w)
        if h.degree == 0:
            break
        r = r.exact_div(h)
    if r.degree == 0:
        return w.monic()
    return (w * squarefree_part(r)).monic()


def _root_multiplicity(f: UniPoly, r):
    """Divide out (x - r) as often as possible; returns (cofactor, mult)."""
    lin = UniPoly.from_root(f.field, r)
    mult = 0
    while True:
        q, rem = f.divmod(lin)
        if not rem.is_zero():
            return f, mult
        f, mult = q, mult + 1


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def _rational_roots(f: UniPoly):
    """All rational roots with multiplicity; returns (roots, cofactor)."""
    roots = []
    zero_mult = 0
    while not f.is_zero() and f.coeff(0) == 0 and f.degree >= 1:
        f = UniPoly(f.field, f.coeffs[1:])
        zero_mult += 1
    if zero_mult:
        roots.append((Fraction(0), zero_mult))
    if f.degree < 1:
        return roots, f
    from math import lcm

    scale = lcm(*[c.denominator for c in f.coeffs])
    ints = [c.numerator * (scale // c.denominator) for c in f.coeffs]
    candidates = set()
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            candidates.add(Fraction(num, den))
            candidates.add(Fraction(-num, den))
    for cand in sorted(candidates):
        if f.degree < 1:
            break
        if f.evaluate(cand) == 0:
            f, mult = _root_multiplicity(f, cand)
            roots.append((cand, mult))
    return roots, f


def _distinct_roots_mod_p(g: UniPoly, rng: Random):
    """Roots of a squarefree product of distinct linear factors over GF(p)."""
    F = g.field
    p = F.char
    if g.degree <= 0:
        return []
    if g.degree == 1:
        return [F.div(F.neg(g.coeff(0)), g.coeff(1))]
    if p == 2:
        return [a for a in (0, 1) if F.is_zero(g.evaluate(a))]
    x = UniPoly.x(F)
    one = UniPoly.one(F)
    while True:
        a = rng.randrange(p)
        shifted = x + UniPoly.constant(F, F.from_int(a))
        h = shifted.pow_mod((p - 1) // 2, g) - one
        d = h.gcd(g)
        if 0 < d.degree < g.degree:
            other = g.exact_div(d)
            return _distinct_roots_mod_p(d, rng) + _distinct_roots_mod_p(other, rng)


def split_linear_factors(f: UniPoly, seed: int = 0):
    """Extract all roots of f in its coefficient field.

    Returns ``(roots, residual)`` where roots is a list of (root,
    multiplicity) sorted by root and residual is the monic root-free
    cofactor (1 when f splits completely).  Over GF(p) the distinct roots
    are separated by seeded equal-degree splitting; over Q by the rational
    root bound on a cleared-denominator integer polynomial.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    F = f.field
    f = f.monic()
    if f.degree == 0:
        return [], f
    if not F.is_modular:
        roots, residual = _rational_roots(f)
    else:
        x = UniPoly.x(F)
        xq = x.pow_mod(F.char, f)
        linear_part = (xq - x).gcd(f)
        rng = Random(seed)
        distinct = _distinct_roots_mod_p(linear_part, rng)
        roots = []
        residual = f
        for r in distinct:
            residual, mult = _root_multiplicity(residual, r)
            roots.append((r, mult))
    roots.sort(key=lambda rm: F.sort_key(rm[0]))
    residual = residual.monic() if not residual.is_zero() else residual
    return roots, residual


def crt_idempotent_polys(moduli: list[UniPoly]) -> list[UniPoly]:
    """For pairwise coprime moduli q_i with product chi, the polynomials
    P_i with P_i = 1 mod q_i and P_i = 0 mod q_j (j != i), reduced mod chi."""
    chi = moduli[0]
    for q in moduli[1:]:
        chi = chi * q
    out = []
    for q in moduli:
        cofactor = chi.exact_div(q)
        g, u, _ = cofactor.xgcd(q)
        if g.degree != 0:
            raise ValueError("moduli are not pairwise coprime")
        out.append(cofactor * u % chi)
    return out

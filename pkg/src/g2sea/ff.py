"""Exact arithmetic over small prime fields, their extensions and univariate polynomials.

Fields are immutable value objects compared by structure, so two fields built
from the same data are interchangeable.  Elements are thin wrappers around an
integer payload (an int in [0, p) for prime fields, a tuple of such ints for
extension fields).  Every randomized routine takes an explicit seed or
random.Random instance; there is no hidden global state.

Prime fields of characteristic 2 and 3 are supported as coefficient domains
for mod-ell work (quartic residues of Frobenius polynomials and their
factorizations live there), but extension fields and curves reject them:
the hyperelliptic model y^2 = P(x) assumes odd characteristic at least 5.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import G2Error, InternalInconsistency

# Guard for routines that materialize a whole field (square tables, scans).
ENUMERATION_GUARD = 1 << 20


# ----------------------------------------------------------------------
# Integer utilities
# ----------------------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond machine-word inputs."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
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


def primes_upto(bound: int) -> list[int]:
    """All primes <= bound (inclusive), by sieve."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(bound + 1) if sieve[i]]


def _pollard_rho(n: int, rng: random.Random) -> int:
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(2, n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd_int(abs(x - y), n)
        if d != n:
            return d


def gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def factor_int(n: int) -> dict[int, int]:
    """Factor a positive integer into primes; trial division plus Pollard rho."""
    if n <= 0:
        raise ValueError("positive integer expected")
    out: dict[int, int] = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 17
    while d * d <= n and d < 100000:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 2
    if n == 1:
        return out
    rng = random.Random(0xF0F0)
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m, rng)
        stack.append(d)
        stack.append(m // d)
    return out


def integer_crt(residues: list[tuple[int, int]]) -> tuple[int, int]:
    """Merge congruences x = r (mod m) into a single one.

    Moduli need not be pairwise coprime; inconsistent overlaps raise.
    """
    if not residues:
        raise ValueError("empty residue list")
    r0, m0 = residues[0]
    r0 %= m0
    for r, m in residues[1:]:
        g = gcd_int(m0, m)
        if (r - r0) % g != 0:
            raise G2Error(f"inconsistent congruences: {r0} mod {m0} vs {r} mod {m}")
        lcm = m0 // g * m
        # solve r0 + m0*t = r (mod m)
        t = ((r - r0) // g * pow(m0 // g, -1, m // g)) % (m // g)
        r0 = (r0 + m0 * t) % lcm
        m0 = lcm
    return r0, m0


def centered_lift(r: int, m: int) -> int:
    """Representative of r mod m in (-m/2, m/2]."""
    r %= m
    if 2 * r > m:
        r -= m
    return r


# ----------------------------------------------------------------------
# Raw coefficient-list helpers (ints mod p), used inside ExtField only
# ----------------------------------------------------------------------


def _itrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _imul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _itrim(out)


def _idivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [0] * max(0, len(a) - len(b) + 1)
    inv = pow(b[-1], -1, p)
    for i in range(len(a) - len(b), -1, -1):
        c = a[i + len(b) - 1] * inv % p
        if c:
            q[i] = c
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - c * bj) % p
    return _itrim(q), _itrim(a)


def _ixgcd(a, b, p):
    # returns (monic g, s, t) with s*a + t*b = g
    r0, r1 = list(a), list(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _idivmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _itrim([(x - y) % p for x, y in _zippad(s0, _imul(q, s1, p), p)])
        t0, t1 = t1, _itrim([(x - y) % p for x, y in _zippad(t0, _imul(q, t1, p), p)])
    if not r0:
        return [], s0, t0
    inv = pow(r0[-1], -1, p)
    return (
        [c * inv % p for c in r0],
        [c * inv % p for c in s0],
        [c * inv % p for c in t0],
    )


def _zippad(a, b, p):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)]


# ----------------------------------------------------------------------
# Fields and elements
# ----------------------------------------------------------------------


class FieldElement:
    """Element of a PrimeField or ExtField, in canonical reduced form."""

    __slots__ = ("field", "val")

    def __init__(self, field, val):
        self.field = field
        self.val = val

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field.key != self.field.key:
                raise TypeError("elements of different fields")
            return other
        if isinstance(other, int):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._padd(self.val, o.val))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._psub(self.val, o.val))

    def __rsub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field, self.field._psub(o.val, self.val))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field, self.field._pmul(self.val, o.val))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return FieldElement(
            self.field, self.field._pmul(self.val, self.field._pinv(o.val))
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return FieldElement(
            self.field, self.field._pmul(o.val, self.field._pinv(self.val))
        )

    def __neg__(self):
        return FieldElement(self.field, self.field._pneg(self.val))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field._ppow(self.val, e))

    def inverse(self):
        return FieldElement(self.field, self.field._pinv(self.val))

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field(other)
        return (
            isinstance(other, FieldElement)
            and self.field.key == other.field.key
            and self.val == other.val
        )

    def __hash__(self):
        return hash((self.field.key, self.val))

    def __bool__(self):
        return self.val != self.field.zero().val

    def is_zero(self):
        return not self

    def coeff_vector(self) -> tuple[int, ...]:
        """Coefficients over the prime field, little-endian, length = degree."""
        return self.field._pvector(self.val)

    def is_square(self) -> bool:
        if not self:
            return True
        q = self.field.order
        return self.field._ppow(self.val, (q - 1) // 2) == self.field.one().val

    def sqrt(self):
        """A square root, or None if the element is a non-residue."""
        return self.field.sqrt(self)

    def __repr__(self):
        return f"{self.field.short_name()}({self._fmt()})"

    def _fmt(self):
        v = self.coeff_vector()
        return str(v[0]) if len(v) == 1 else str(list(v))


class PrimeField:
    """The field F_p for a prime p; payloads are ints in [0, p)."""

    __slots__ = ("p", "_gen", "_nonres")

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self._gen = None
        self._nonres = None

    @property
    def key(self):
        return ("p", self.p)

    @property
    def char(self):
        return self.p

    @property
    def order(self):
        return self.p

    @property
    def degree(self):
        return 1

    def __eq__(self, other):
        return isinstance(other, (PrimeField, ExtField)) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __call__(self, v) -> FieldElement:
        if isinstance(v, FieldElement):
            if v.field.key != self.key:
                raise TypeError("element of another field")
            return v
        return FieldElement(self, v % self.p)

    def zero(self):
        return FieldElement(self, 0)

    def one(self):
        return FieldElement(self, 1)

    def elements(self):
        for v in range(self.p):
            yield FieldElement(self, v)

    def element_at(self, i: int) -> FieldElement:
        return FieldElement(self, i % self.p)

    def index_of(self, a: FieldElement) -> int:
        return a.val

    def random_element(self, rng: random.Random) -> FieldElement:
        return FieldElement(self, rng.randrange(self.p))

    def short_name(self):
        return f"F{self.p}"

    def __repr__(self):
        return f"PrimeField({self.p})"

    # payload ops
    def _padd(self, a, b):
        return (a + b) % self.p

    def _psub(self, a, b):
        return (a - b) % self.p

    def _pmul(self, a, b):
        return a * b % self.p

    def _pneg(self, a):
        return -a % self.p

    def _pinv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def _ppow(self, a, e):
        if e < 0:
            a = self._pinv(a)
            e = -e
        return pow(a, e, self.p)

    def _pvector(self, a):
        return (a,)

    def sqrt(self, a: FieldElement):
        return _tonelli(self, a)

    def multiplicative_generator(self) -> FieldElement:
        if self._gen is None:
            self._gen = _find_generator(self)
        return self._gen


class ExtField:
    """F_{p^n} presented as F_p[X] modulo a monic irreducible polynomial.

    Payloads are tuples of n ints.  Embeddings into larger extensions are
    created on demand via :func:`embedding` and cached compatibly.
    """

    __slots__ = ("base", "n", "modulus", "_gen", "_nonres")

    def __init__(self, base: PrimeField, modulus_coeffs):
        if base.p < 5:
            raise ValueError("extension fields require characteristic >= 5")
        mod = [c % base.p for c in modulus_coeffs]
        while mod and mod[-1] == 0:
            mod.pop()
        if len(mod) < 2 or mod[-1] != 1:
            raise ValueError("modulus must be monic of degree >= 1")
        self.base = base
        self.n = len(mod) - 1
        self.modulus = tuple(mod)
        if self.n > 1 and not poly_is_irreducible(UniPoly.from_ints(base, mod)):
            raise ValueError("modulus is not irreducible")
        self._gen = None
        self._nonres = None

    @property
    def key(self):
        return ("e", self.base.p, self.modulus)

    @property
    def char(self):
        return self.base.p

    @property
    def order(self):
        return self.base.p**self.n

    @property
    def degree(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, (PrimeField, ExtField)) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __call__(self, v) -> FieldElement:
        p = self.base.p
        if isinstance(v, FieldElement):
            if v.field.key == self.key:
                return v
            if v.field.key == self.base.key:
                return self.from_vector((v.val,))
            raise TypeError("element of another field; embed explicitly")
        if isinstance(v, int):
            return self.from_vector((v % p,))
        return self.from_vector(v)

    def from_vector(self, coeffs) -> FieldElement:
        p = self.base.p
        c = [x % p for x in coeffs]
        if len(c) > self.n:
            _, c = _idivmod(c, list(self.modulus), p)
        c = c + [0] * (self.n - len(c))
        return FieldElement(self, tuple(c[: self.n]))

    def gen(self) -> FieldElement:
        """The class of X, a root of the modulus."""
        return self.from_vector((0, 1))

    def zero(self):
        return FieldElement(self, (0,) * self.n)

    def one(self):
        return FieldElement(self, (1,) + (0,) * (self.n - 1))

    def elements(self):
        for i in range(self.order):
            yield self.element_at(i)

    def element_at(self, i: int) -> FieldElement:
        p = self.base.p
        i %= self.order
        digits = []
        for _ in range(self.n):
            digits.append(i % p)
            i //= p
        return FieldElement(self, tuple(digits))

    def index_of(self, a: FieldElement) -> int:
        out = 0
        for d in reversed(a.val):
            out = out * self.base.p + d
        return out

    def random_element(self, rng: random.Random) -> FieldElement:
        p = self.base.p
        return FieldElement(self, tuple(rng.randrange(p) for _ in range(self.n)))

    def short_name(self):
        return f"F{self.base.p}^{self.n}"

    def __repr__(self):
        return f"ExtField(p={self.base.p}, n={self.n}, modulus={list(self.modulus)})"

    # payload ops on int tuples of length n
    def _padd(self, a, b):
        p = self.base.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def _psub(self, a, b):
        p = self.base.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def _pneg(self, a):
        p = self.base.p
        return tuple(-x % p for x in a)

    def _pmul(self, a, b):
        p = self.base.p
        prod = _imul(_itrim(list(a)), _itrim(list(b)), p)
        if len(prod) >= len(self.modulus):
            _, prod = _idivmod(prod, list(self.modulus), p)
        return tuple(prod + [0] * (self.n - len(prod)))

    def _pinv(self, a):
        p = self.base.p
        av = _itrim(list(a))
        if not av:
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = _ixgcd(av, list(self.modulus), p)
        if g != [1]:
            raise InternalInconsistency("modulus not irreducible")
        return tuple(s + [0] * (self.n - len(s)))

    def _ppow(self, a, e):
        if e < 0:
            a = self._pinv(a)
            e = -e
        result = self.one().val
        while e:
            if e & 1:
                result = self._pmul(result, a)
            a = self._pmul(a, a)
            e >>= 1
        return result

    def _pvector(self, a):
        return a

    def sqrt(self, a: FieldElement):
        return _tonelli(self, a)

    def multiplicative_generator(self) -> FieldElement:
        if self._gen is None:
            self._gen = _find_generator(self)
        return self._gen


def _find_generator(field) -> FieldElement:
    q = field.order
    fac = factor_int(q - 1)
    i = 1
    while True:
        i += 1
        g = field.element_at(i)
        if not g:
            continue
        if all(g ** ((q - 1) // r) != field.one() for r in fac):
            return g
        if i > q:
            raise InternalInconsistency("no generator found")


def _tonelli(field, a: FieldElement):
    """Square root in a finite field of odd order, or None for non-residues."""
    if not a:
        return field.zero()
    q = field.order
    if not a.is_square():
        return None
    if q % 4 == 3:
        return a ** ((q + 1) // 4)
    # write q-1 = 2^s * t
    t, s = q - 1, 0
    while t % 2 == 0:
        t //= 2
        s += 1
    if field._nonres is None:
        i = 1
        while True:
            c = field.element_at(i)
            if c and not c.is_square():
                field._nonres = c
                break
            i += 1
    c = field._nonres**t
    r = a ** ((t + 1) // 2)
    b = a**t
    one = field.one()
    while b != one:
        m, b2 = 0, b
        while b2 != one:
            b2 = b2 * b2
            m += 1
        if m >= s:
            raise InternalInconsistency("sqrt of a certified residue failed")
        corr = c ** (1 << (s - m - 1))
        r = r * corr
        c = corr * corr
        b = b * c
        s = m
    return r


# ----------------------------------------------------------------------
# Univariate polynomials
# ----------------------------------------------------------------------


class UniPoly:
    """Univariate polynomial over a field; coefficients little-endian, trimmed."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        cs = [field(c) if not isinstance(c, FieldElement) else c for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, field):
        return cls(field, [])

    @classmethod
    def one(cls, field):
        return cls(field, [1])

    @classmethod
    def x(cls, field):
        return cls(field, [0, 1])

    @classmethod
    def from_ints(cls, field, ints):
        return cls(field, [field(int(c)) for c in ints])

    @classmethod
    def constant(cls, c: FieldElement):
        return cls(c.field, [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def is_one(self):
        return len(self.coeffs) == 1 and self.coeffs[0] == self.field.one()

    def lc(self) -> FieldElement:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> FieldElement:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero()

    def __eq__(self, other):
        return (
            isinstance(other, UniPoly)
            and self.field.key == other.field.key
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.field.key, tuple(c.val for c in self.coeffs)))

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(
            self.field, [self.coeff(i) + other.coeff(i) for i in range(n)]
        )

    def __sub__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(
            self.field, [self.coeff(i) - other.coeff(i) for i in range(n)]
        )

    def __neg__(self):
        return UniPoly(self.field, [-c for c in self.coeffs])

    def _coerce(self, other):
        if isinstance(other, UniPoly):
            return other
        return UniPoly(self.field, [other])

    def __mul__(self, other):
        if isinstance(other, (FieldElement, int)):
            c = self.field(other) if isinstance(other, int) else other
            return UniPoly(self.field, [a * c for a in self.coeffs])
        if self.is_zero() or other.is_zero():
            return UniPoly.zero(self.field)
        out = [self.field.zero()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative polynomial powers are undefined")
        acc = UniPoly.one(self.field)
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return UniPoly.zero(self.field), self
        q = [self.field.zero()] * (dq + 1)
        inv = other.lc().inverse()
        ob = other.coeffs
        for i in range(dq, -1, -1):
            c = r[i + len(ob) - 1] * inv
            if not c.is_zero():
                q[i] = c
                for j, bj in enumerate(ob):
                    r[i + j] = r[i + j] - c * bj
        return UniPoly(self.field, q), UniPoly(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero():
            raise InternalInconsistency("division expected to be exact")
        return q

    def __call__(self, x: FieldElement) -> FieldElement:
        acc = self.field.zero()
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self):
        if self.is_zero() or self.lc() == self.field.one():
            return self
        inv = self.lc().inverse()
        return UniPoly(self.field, [c * inv for c in self.coeffs])

    def derivative(self):
        return UniPoly(
            self.field, [self.coeffs[i] * i for i in range(1, len(self.coeffs))]
        )

    def compose(self, g: "UniPoly") -> "UniPoly":
        acc = UniPoly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = acc * g + UniPoly.constant(c)
        return acc

    def compose_mod(self, g: "UniPoly", m: "UniPoly") -> "UniPoly":
        acc = UniPoly.zero(self.field)
        for c in reversed(self.coeffs):
            acc = (acc * g + UniPoly.constant(c)) % m
        return acc

    def pow_mod(self, e: int, m: "UniPoly") -> "UniPoly":
        result = UniPoly.one(self.field)
        base = self % m
        while e:
            if e & 1:
                result = result * base % m
            base = base * base % m
            e >>= 1
        return result

    def gcd(self, other: "UniPoly") -> "UniPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def xgcd(self, other: "UniPoly"):
        """(g, s, t) with g monic and s*self + t*other = g."""
        r0, r1 = self, other
        s0, s1 = UniPoly.one(self.field), UniPoly.zero(self.field)
        t0, t1 = UniPoly.zero(self.field), UniPoly.one(self.field)
        while not r1.is_zero():
            q, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.is_zero():
            return r0, s0, t0
        inv = r0.lc().inverse()
        return r0 * inv, s0 * inv, t0 * inv

    def int_coeffs(self) -> list[int]:
        """Coefficients as ints, for prime-field polynomials."""
        return [c.val for c in self.coeffs]

    def map_coeffs(self, fn, field) -> "UniPoly":
        return UniPoly(field, [fn(c) for c in self.coeffs])

    def __repr__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            cs = c._fmt()
            if i == 0:
                terms.append(cs)
            else:
                xs = "x" if i == 1 else f"x^{i}"
                terms.append(xs if cs == "1" else f"{cs}*{xs}")
        return " + ".join(reversed(terms))


def lagrange_interpolate(field, points) -> UniPoly:
    """Unique polynomial of degree < len(points) through distinct-x points."""
    xs = [x for x, _ in points]
    if len(set((x.field.key, x.val) for x in xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    acc = UniPoly.zero(field)
    for i, (xi, yi) in enumerate(points):
        num = UniPoly.one(field)
        den = field.one()
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            num = num * UniPoly(field, [-xj, field.one()])
            den = den * (xi - xj)
        acc = acc + num * (yi / den)
    return acc


# ----------------------------------------------------------------------
# Irreducibility, roots, factorization
# ----------------------------------------------------------------------


def poly_is_irreducible(f: UniPoly) -> bool:
    """Rabin's test over any finite coefficient field."""
    n = f.degree
    if n <= 0:
        return False
    if n == 1:
        return True
    q = f.field.order
    x = UniPoly.x(f.field)
    if x.pow_mod(q**n, f) != x % f:
        return False
    for r in factor_int(n):
        h = x.pow_mod(q ** (n // r), f) - x
        if f.gcd(h).degree != 0:
            return False
    return True


def ext_field_create(base: PrimeField, n: int, seed: int = 0) -> ExtField:
    """Extension of degree n with a seeded random irreducible modulus.

    Degree 1 always uses the modulus X, so arithmetic matches the base field.
    """
    if n < 1:
        raise ValueError("degree must be positive")
    if n == 1:
        return ExtField(base, [0, 1])
    rng = random.Random((seed * 1000003 + base.p) * 1000003 + n)
    p = base.p
    while True:
        coeffs = [rng.randrange(p) for _ in range(n)] + [1]
        f = UniPoly.from_ints(base, coeffs)
        if poly_is_irreducible(f):
            return ExtField(base, coeffs)


def poly_roots_in_field(f: UniPoly, rng=None) -> list[FieldElement]:
    """Roots of f in its coefficient field, with multiplicity.

    Distinct roots come from gcd(f, X^q - X) followed by seeded equal-degree
    splitting; multiplicities by repeated exact division.  The output is
    sorted by the field's canonical element order.
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    if rng is None:
        rng = random.Random(0)
    elif isinstance(rng, int):
        rng = random.Random(rng)
    field = f.field
    if f.degree <= 0:
        return []
    q = field.order
    if q <= 4096:
        distinct = [a for a in field.elements() if f(a).is_zero()]
    else:
        x = UniPoly.x(field)
        g = f.gcd(x.pow_mod(q, f) - x)
        distinct = _split_to_roots(g, rng)
    out = []
    for r in sorted(distinct, key=field.index_of):
        lin = UniPoly(field, [-r, field.one()])
        h = f
        while True:
            quo, rem = divmod(h, lin)
            if not rem.is_zero():
                break
            out.append(r)
            h = quo
    return out


def _split_to_roots(g: UniPoly, rng) -> list[FieldElement]:
    # g is squarefree and splits into linear factors
    if g.degree <= 0:
        return []
    if g.degree == 1:
        gm = g.monic()
        return [-gm.coeffs[0]]
    field = g.field
    q = field.order
    if field.char == 2:
        raise G2Error("root splitting requires odd characteristic")
    while True:
        a = field.random_element(rng)
        h = UniPoly(field, [a, field.one()]).pow_mod((q - 1) // 2, g) - UniPoly.one(
            field
        )
        d = g.gcd(h)
        if 0 < d.degree < g.degree:
            return _split_to_roots(d, rng) + _split_to_roots(g.exact_div(d), rng)


def squarefree_decomposition(f: UniPoly) -> list[tuple[UniPoly, int]]:
    """[(g_i, m_i)] with f = lc * prod g_i^{m_i}, g_i monic squarefree coprime."""
    field = f.field
    p = field.char
    f = f.monic()
    out: dict[int, UniPoly] = {}

    def add(g, m):
        if g.degree > 0:
            out[m] = out[m] * g if m in out else g

    def rec(h, mult):
        if h.degree <= 0:
            return
        d = h.derivative()
        if d.is_zero():
            # h = w(X^p); take p-th roots of coefficients
            q = field.order
            w = UniPoly(
                field,
                [h.coeffs[i * p] ** (q // p) for i in range(h.degree // p + 1)],
            )
            rec(w, mult * p)
            return
        c = h.gcd(d)
        w = h.exact_div(c)  # product of squarefree-part factors
        m = 1
        while w.degree > 0:
            y = w.gcd(c)
            add(w.exact_div(y), mult * m)
            w = y
            c = c.exact_div(y)
            m += 1
        rec(c, mult)

    rec(f, 1)
    return [(g, m) for m, g in sorted(out.items())]


def _ddf(f: UniPoly) -> list[tuple[UniPoly, int]]:
    # distinct-degree split of a monic squarefree f: [(product of irred of deg d, d)]
    field = f.field
    q = field.order
    out = []
    x = UniPoly.x(field)
    h = x % f
    v = f
    d = 0
    while v.degree > 2 * (d + 1) - 1 and v.degree > 0:
        d += 1
        h = h.pow_mod(q, v)
        g = v.gcd(h - x)
        if g.degree > 0:
            out.append((g, d))
            v = v.exact_div(g)
            h = h % v
    if v.degree > 0:
        out.append((v, v.degree))
    return out


def _edf(f: UniPoly, d: int, rng) -> list[UniPoly]:
    # Cantor-Zassenhaus equal-degree splitting, odd characteristic
    if f.degree == d:
        return [f]
    field = f.field
    q = field.order
    while True:
        a = UniPoly(
            field, [field.random_element(rng) for _ in range(f.degree)]
        )
        if a.degree <= 0:
            continue
        g = f.gcd(a)
        if 0 < g.degree < f.degree:
            break
        h = a.pow_mod((q**d - 1) // 2, f) - UniPoly.one(field)
        g = f.gcd(h)
        if 0 < g.degree < f.degree:
            break
    return _edf(g, d, rng) + _edf(f.exact_div(g), d, rng)


def _factor_enumerate(f: UniPoly) -> list[UniPoly]:
    # trial division by monic polynomials of ascending degree; tiny fields only
    field = f.field
    out = []
    g = f.monic()
    d = 1
    while 2 * d <= g.degree:
        for idx in range(field.order**d):
            coeffs = []
            i = idx
            for _ in range(d):
                coeffs.append(field.element_at(i % field.order))
                i //= field.order
            cand = UniPoly(field, coeffs + [field.one()])
            while True:
                quo, rem = divmod(g, cand)
                if rem.is_zero() and g.degree >= cand.degree:
                    out.append(cand)
                    g = quo
                else:
                    break
            if 2 * d > g.degree:
                break
        d += 1
    if g.degree > 0:
        out.append(g)
    return out


def poly_factor(f: UniPoly, seed: int = 0) -> tuple[FieldElement, list[tuple[UniPoly, int]]]:
    """Full factorization (lc, [(monic irreducible, multiplicity)])."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    field = f.field
    lc = f.lc()
    if f.degree == 0:
        return lc, []
    rng = random.Random(seed)
    small = field.order ** ((f.degree // 2) or 1) <= 4096
    counts: dict[UniPoly, int] = {}
    if small:
        for g in _factor_enumerate(f):
            counts[g] = counts.get(g, 0) + 1
    else:
        if field.char == 2:
            raise G2Error("large-field factorization requires odd characteristic")
        for g, m in squarefree_decomposition(f):
            for h, d in _ddf(g):
                for irr in _edf(h, d, rng):
                    counts[irr] = counts.get(irr, 0) + m
    out = sorted(
        counts.items(),
        key=lambda t: (t[0].degree, [c.field.index_of(c) for c in t[0].coeffs]),
    )
    return lc, out


def poly_factor_degree_pattern(f: UniPoly, seed: int = 0) -> list[tuple[int, int]]:
    """Sorted (degree, count) pairs of irreducible factors, multiplicity counted."""
    _, facs = poly_factor(f, seed)
    pat: dict[int, int] = {}
    for g, m in facs:
        pat[g.degree] = pat.get(g.degree, 0) + m
    return sorted(pat.items())


# ----------------------------------------------------------------------
# Resultants
# ----------------------------------------------------------------------


def resultant(f: UniPoly, g: UniPoly) -> FieldElement:
    """Resultant with the product convention prod over (f-root a, g-root b) of (b - a).

    Equal to (-1)^(deg f * deg g) times lc(f)^deg(g) * prod g(a) over roots a
    of f.  Res(X - a, X - b) = b - a; Res(f, 1) = 1.
    """
    sign = (f.degree % 2) * (g.degree % 2)
    r = _resultant_field_std(f, g)
    return -r if sign else r


def _resultant_field_std(f: UniPoly, g: UniPoly) -> FieldElement:
    """Standard resultant lc(f)^deg(g) * prod g(root of f) via Euclid."""
    field = f.field
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of zero polynomial")
    res = field.one()
    a, b = f, g
    while True:
        if b.degree == 0:
            return res * b.coeffs[0] ** a.degree
        if a.degree < b.degree:
            if (a.degree * b.degree) % 2 == 1:
                res = -res
            a, b = b, a
            continue
        r = a % b
        if r.is_zero():
            return field.zero()
        res = res * b.lc() ** (a.degree - r.degree)
        if (a.degree * b.degree) % 2 == 1:
            res = -res
        a, b = b, r


def prod_over_roots(u: UniPoly, g: UniPoly) -> FieldElement:
    """prod g(x0) over the roots x0 of monic u (with multiplicity)."""
    if u.degree == 0:
        return u.field.one()
    if g.is_zero():
        return u.field.zero()
    return _resultant_field_std(u.monic(), g)


def resultant_zz(fc: list[int], gc: list[int]) -> int:
    """Resultant of integer polynomials, same convention, exact over Q."""
    f = [Fraction(c) for c in fc]
    g = [Fraction(c) for c in gc]

    def trim(a):
        while a and a[-1] == 0:
            a.pop()
        return a

    f, g = trim(f), trim(g)
    if not f or not g:
        raise ValueError("resultant of zero polynomial")
    sign0 = ((len(f) - 1) % 2) * ((len(g) - 1) % 2)
    res = Fraction(1)
    a, b = f, g
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            res = res * b[0] ** da
            break
        if da < db:
            if (da * db) % 2 == 1:
                res = -res
            a, b = b, a
            continue
        r = list(a)
        inv = 1 / b[-1]
        for i in range(da - db, -1, -1):
            c = r[i + db] * inv
            if c:
                for j in range(db + 1):
                    r[i + j] -= c * b[j]
        r = trim(r)
        if not r:
            res = Fraction(0)
            break
        res = res * b[-1] ** (da - (len(r) - 1))
        if (da * db) % 2 == 1:
            res = -res
        a, b = b, r
    if sign0:
        res = -res
    if res.denominator != 1:
        raise InternalInconsistency("integer resultant was not integral")
    return int(res)


# ----------------------------------------------------------------------
# Embeddings between extension fields
# ----------------------------------------------------------------------


class Embedding:
    """Field homomorphism fixing F_p, determined by the image of the generator."""

    __slots__ = ("src", "dst", "gen_image", "_powers")

    def __init__(self, src, dst, gen_image: FieldElement):
        self.src = src
        self.dst = dst
        self.gen_image = gen_image
        self._powers = None

    def __call__(self, a: FieldElement) -> FieldElement:
        if a.field.key != self.src.key:
            raise TypeError("element not in the source field")
        if self._powers is None:
            pw = [self.dst.one()]
            for _ in range(self.src.degree - 1):
                pw.append(pw[-1] * self.gen_image)
            self._powers = pw
        acc = self.dst.zero()
        for c, gp in zip(a.coeff_vector(), self._powers):
            acc = acc + gp * c
        return acc

    def map_poly(self, f: UniPoly) -> UniPoly:
        return UniPoly(self.dst, [self(c) for c in f.coeffs])

    def section(self, y: FieldElement) -> FieldElement:
        """Preimage of y, or raises if y is outside the image subfield."""
        p = self.src.char
        cols = [self(self.src.element_at(p**i)) for i in range(self.src.degree)]
        # solve sum x_i * cols[i] = y over F_p
        rows = self.dst.degree
        mat = [
            [cols[j].coeff_vector()[i] for j in range(self.src.degree)]
            + [y.coeff_vector()[i]]
            for i in range(rows)
        ]
        sol = _solve_mod_p(mat, self.src.degree, p)
        if sol is None:
            raise G2Error("element does not lie in the embedded subfield")
        if self.src.degree == 1:
            return self.src(sol[0])
        return self.src.from_vector(sol)


def _solve_mod_p(mat, ncols, p):
    rows = len(mat)
    piv_cols = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, rows) if mat[i][c] % p), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], -1, p)
        mat[r] = [v * inv % p for v in mat[r]]
        for i in range(rows):
            if i != r and mat[i][c] % p:
                f = mat[i][c]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[r])]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if mat[i][ncols] % p:
            return None
    sol = [0] * ncols
    for i, c in enumerate(piv_cols):
        sol[c] = mat[i][ncols] % p
    return sol


_EMBEDDING_CACHE: dict[tuple, Embedding] = {}


def embedding(src, dst) -> Embedding:
    """Compatible embedding src -> dst (degrees must divide).

    Images of generators are chosen among the roots of the source modulus in
    dst, filtered so that previously created embeddings through common
    subfields commute; this makes towers built through this function
    consistent.
    """
    if src.key == dst.key:
        img = dst.gen() if isinstance(dst, ExtField) else dst.one()
        return Embedding(src, dst, img)
    if isinstance(src, PrimeField):
        if isinstance(dst, PrimeField):
            raise ValueError("no embedding between distinct prime fields")
        if dst.base.p != src.p:
            raise ValueError("characteristic mismatch")
        return Embedding(src, dst, dst.gen())  # unused image; constants only
    if isinstance(dst, PrimeField):
        raise ValueError("cannot embed an extension into its prime field")
    if src.base.p != dst.base.p or dst.n % src.n != 0:
        raise ValueError("no embedding: degree or characteristic mismatch")
    key = (src.key, dst.key)
    if key in _EMBEDDING_CACHE:
        return _EMBEDDING_CACHE[key]
    mod_in_dst = UniPoly.from_ints(dst, list(src.modulus))
    roots = poly_roots_in_field(mod_in_dst, rng=random.Random(7))
    roots = sorted(set(roots), key=dst.index_of)
    chosen = None
    for root in roots:
        cand = Embedding(src, dst, root)
        ok = True
        for (a_key, b_key), e_ab in list(_EMBEDDING_CACHE.items()):
            # compatibility with cached mid -> src and mid -> dst pairs
            if b_key == src.key and (a_key, dst.key) in _EMBEDDING_CACHE:
                e_ad = _EMBEDDING_CACHE[(a_key, dst.key)]
                g = e_ab.src.gen() if isinstance(e_ab.src, ExtField) else None
                if g is not None and cand(e_ab(g)) != e_ad(g):
                    ok = False
                    break
        if ok:
            chosen = cand
            break
    if chosen is None:
        raise InternalInconsistency("no compatible embedding root")
    _EMBEDDING_CACHE[key] = chosen
    return chosen


def constant_embed(field_src, field_dst, a: FieldElement) -> FieldElement:
    """Move a prime-field or already-compatible constant into field_dst."""
    if a.field.key == field_dst.key:
        return a
    if isinstance(a.field, PrimeField):
        return field_dst(a.val)
    return embedding(field_src, field_dst)(a)

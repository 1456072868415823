"""Genus-2 curves y^2 = P(x), Jacobian arithmetic in Mumford form, counting, invariants.

Jacobian arithmetic uses Cantor composition and reduction on an odd-degree
model.  Degree-6 curves are accepted for counting and invariants; Jacobian
work transforms them to a degree-5 model through a rational root of P, or
refuses when none exists.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import G2Error, GuardExceeded, InternalInconsistency, UsageError
from . import ff
from .ff import FieldElement, UniPoly

COUNT_GUARD_DEFAULT = 1 << 26


class Genus2Curve:
    """y^2 = P(x) with P squarefree of degree 5 or 6 over a field of char >= 5."""

    __slots__ = ("field", "P")

    def __init__(self, field, P: UniPoly):
        if field.char < 5:
            raise UsageError("genus-2 model y^2 = P(x) needs characteristic >= 5")
        if P.field.key != field.key:
            raise UsageError("curve polynomial over the wrong field")
        if P.degree not in (5, 6):
            raise UsageError("P must have degree 5 or 6")
        if P.gcd(P.derivative()).degree != 0:
            raise UsageError("P must be squarefree (smooth curve)")
        self.field = field
        self.P = P

    @classmethod
    def from_coeffs(cls, field, coeffs):
        return cls(field, UniPoly.from_ints(field, coeffs))

    @property
    def q(self) -> int:
        return self.field.order

    def points_at_infinity(self) -> int:
        if self.P.degree == 5:
            return 1
        return 2 if self.P.lc().is_square() else 0

    def has_odd_model(self) -> bool:
        return self.P.degree == 5 or bool(ff.poly_roots_in_field(self.P))

    def odd_model(self) -> "Genus2Curve":
        """An isomorphic curve with deg P = 5 (rational Weierstrass point at infinity)."""
        if self.P.degree == 5:
            return self
        roots = ff.poly_roots_in_field(self.P)
        if not roots:
            raise G2Error(
                "degree-6 model with no rational root of P: "
                "no rational Weierstrass point, Jacobian arithmetic unavailable"
            )
        x0 = roots[0]
        field = self.field
        # P = (x - x0) Q(x); substitute x = x0 + 1/u, y = v/u^3:
        # v^2 = sum_i q_i u^(5-i) (x0 u + 1)^i, degree 5 with lc Q(x0) != 0.
        Q = self.P.exact_div(UniPoly(field, [-x0, field.one()]))
        lin = UniPoly(field, [field.one(), x0])  # 1 + x0*u
        acc = UniPoly.zero(field)
        upow = UniPoly.one(field)
        linpow = [UniPoly.one(field)]
        for _ in range(5):
            linpow.append(linpow[-1] * lin)
        for i in range(6):
            c = Q.coeff(i)
            if not c.is_zero():
                term = linpow[i] * c
                # multiply by u^(5-i)
                shifted = UniPoly(
                    field, [field.zero()] * (5 - i) + list(term.coeffs)
                )
                acc = acc + shifted
        return Genus2Curve(field, acc)

    def twist(self, c: FieldElement) -> "Genus2Curve":
        """Quadratic twist y^2 = c*P(x) for a non-square c (any c accepted)."""
        return Genus2Curve(self.field, self.P * c)

    def base_change(self, emb: ff.Embedding) -> "Genus2Curve":
        return Genus2Curve(emb.dst, emb.map_poly(self.P))

    def __eq__(self, other):
        return isinstance(other, Genus2Curve) and self.P == other.P

    def __hash__(self):
        return hash(self.P)

    def __repr__(self):
        return f"Genus2Curve(q={self.q}, y^2 = {self.P!r})"


def parse_curve(spec: str) -> Genus2Curve:
    """Parse 'p=<prime>;P=[c0,...,cd]' with d in {5, 6}."""
    try:
        parts = dict(kv.split("=", 1) for kv in spec.strip().split(";"))
        p = int(parts["p"])
        body = parts["P"].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError("P must be a bracketed coefficient list")
        coeffs = [int(c) for c in body[1:-1].split(",")]
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad curve spec {spec!r}: {exc}") from exc
    if len(coeffs) not in (6, 7):
        raise UsageError("curve needs 6 or 7 coefficients (degree 5 or 6)")
    try:
        field = ff.PrimeField(p)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return Genus2Curve.from_coeffs(field, coeffs)


def format_curve(C: Genus2Curve) -> str:
    if C.field.degree != 1:
        raise UsageError("text format only covers prime-field curves")
    coeffs = ",".join(str(c) for c in C.P.int_coeffs())
    return f"p={C.field.p};P=[{coeffs}]"


class MumfordDivisor:
    """Reduced Mumford pair (u, v): u monic, deg v < deg u, u | v^2 - P."""

    __slots__ = ("u", "v")

    def __init__(self, u: UniPoly, v: UniPoly):
        self.u = u
        self.v = v

    @classmethod
    def identity(cls, field):
        return cls(UniPoly.one(field), UniPoly.zero(field))

    @property
    def field(self):
        return self.u.field

    @property
    def weight(self) -> int:
        return self.u.degree

    def is_identity(self) -> bool:
        return self.u.degree == 0

    def key(self):
        return (
            tuple(c.val for c in self.u.coeffs),
            tuple(c.val for c in self.v.coeffs),
        )

    def __eq__(self, other):
        return (
            isinstance(other, MumfordDivisor)
            and self.u == other.u
            and self.v == other.v
        )

    def __hash__(self):
        return hash((self.u, self.v))

    def on_jacobian(self, C: Genus2Curve) -> bool:
        if self.u.is_zero() or self.u.lc() != self.field.one():
            return False
        if self.u.degree > 2 or self.v.degree >= max(self.u.degree, 1):
            if not (self.u.degree == 0 and self.v.is_zero()):
                return False
        return ((self.v * self.v - C.P) % self.u).is_zero()

    def coordinates(self):
        """(u0, u1, v0, v1) for weight-2 divisors."""
        if self.weight != 2:
            raise G2Error("Mumford coordinates need a weight-2 divisor")
        return (self.u.coeff(0), self.u.coeff(1), self.v.coeff(0), self.v.coeff(1))

    def __repr__(self):
        return f"({self.u!r}, {self.v!r})"


def _require_odd_model(C: Genus2Curve) -> Genus2Curve:
    if C.P.degree != 5:
        raise G2Error("Jacobian arithmetic needs a degree-5 model; use odd_model()")
    return C


def negate(D: MumfordDivisor) -> MumfordDivisor:
    return MumfordDivisor(D.u, (-D.v) % D.u if D.u.degree > 0 else D.v)


def cantor_add(
    C: Genus2Curve, D1: MumfordDivisor, D2: MumfordDivisor
) -> MumfordDivisor:
    D, _ = cantor_add_traced(C, D1, D2)
    return D


def cantor_add_traced(C: Genus2Curve, D1: MumfordDivisor, D2: MumfordDivisor):
    """Cantor addition returning (sum, trace).

    The trace records the principal divisors consumed along the way, as
    factors ('poly', g) for g(x) and ('line', v, u') for (y - v(x)) / u'(x);
    their product h satisfies div(D1) + div(D2) = div(sum) + div(h).  The
    Weil pairing evaluates these factors on disjoint divisors.
    """
    _require_odd_model(C)
    field = C.field
    f = C.P
    u1, v1 = D1.u, D1.v
    u2, v2 = D2.u, D2.v
    trace = []
    d1, e1, e2 = u1.xgcd(u2)
    d, c1, c2 = d1.xgcd(v1 + v2)
    s1, s2, s3 = c1 * e1, c1 * e2, c2
    u = (u1 * u2).exact_div(d * d)
    num = s1 * u1 * v2 + s2 * u2 * v1 + s3 * (v1 * v2 + f)
    v = num.exact_div(d) % u
    if d.degree > 0:
        trace.append(("poly", d))
    while u.degree > 2:
        unew = (f - v * v).exact_div(u).monic()
        vnew = (-v) % unew if unew.degree > 0 else UniPoly.zero(field)
        trace.append(("line", v, unew))
        u, v = unew, vnew
    return MumfordDivisor(u.monic(), v), trace


def scalar_mul(C: Genus2Curve, D: MumfordDivisor, m: int) -> MumfordDivisor:
    if m < 0:
        return scalar_mul(C, negate(D), -m)
    acc = MumfordDivisor.identity(C.field)
    base = D
    while m:
        if m & 1:
            acc = cantor_add(C, acc, base)
        m >>= 1
        if m:
            base = cantor_add(C, base, base)
    return acc


def frobenius_on_divisor(D: MumfordDivisor, q: int) -> MumfordDivisor:
    """Coordinate-wise q-power map; q is the order of the curve's base field."""
    u = UniPoly(D.field, [c**q for c in D.u.coeffs])
    v = UniPoly(D.field, [c**q for c in D.v.coeffs])
    return MumfordDivisor(u, v)


def random_divisor(C: Genus2Curve, rng) -> MumfordDivisor:
    """Weight-2 divisor from two random affine points (seeded, uniform-ish)."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    _require_odd_model(C)
    field = C.field
    for _ in range(10000):
        x1 = field.random_element(rng)
        x2 = field.random_element(rng)
        if x1 == x2:
            continue
        y1 = C.P(x1).sqrt()
        y2 = C.P(x2).sqrt()
        if y1 is None or y2 is None:
            continue
        if rng.randrange(2):
            y1 = -y1
        if rng.randrange(2):
            y2 = -y2
        u = UniPoly(field, [x1 * x2, -(x1 + x2), field.one()])
        v = ff.lagrange_interpolate(field, [(x1, y1), (x2, y2)])
        return MumfordDivisor(u, v)
    raise InternalInconsistency("no random divisor found; field too small?")


def curve_point_count(C: Genus2Curve, guard: int = COUNT_GUARD_DEFAULT) -> int:
    """#C(F_q) by exhaustive scan of x plus points at infinity."""
    q = C.q
    if q > guard:
        raise GuardExceeded(f"field of size {q} exceeds the counting guard {guard}")
    field = C.field
    squares = set()
    for a in field.elements():
        sq = a * a
        squares.add(sq.val)
    count = 0
    for x in field.elements():
        c = C.P(x)
        if c.is_zero():
            count += 1
        elif c.val in squares:
            count += 2
    return count + C.points_at_infinity()


# ----------------------------------------------------------------------
# Igusa-type invariants
# ----------------------------------------------------------------------

# Normalization tag for the weighted invariants used throughout this package
# and in modular-equation data files.  With (A, B, C, D) the Igusa-Clebsch
# invariants of the binary sextic (root-difference normalization, weights
# 2/4/6/10) we set
#     I4 = B,  I6' = (A*B - 3*C)/2,  I10 = D,  I12 = A*D,
# and the absolute invariants are
#     j1 = I4*I6'/I10,  j2 = I4^2*I12/I10^2,  j3 = I4^5/I10^2.
IGUSA_NORMALIZATION = "icl-v1"

_PAIRINGS_15 = None
_SPLITS_10 = None
_TRIPLES_60 = None


def _index_tables():
    global _PAIRINGS_15, _SPLITS_10, _TRIPLES_60
    if _PAIRINGS_15 is not None:
        return _PAIRINGS_15, _SPLITS_10, _TRIPLES_60
    import itertools

    def matchings(items):
        if not items:
            yield []
            return
        first = items[0]
        for i in range(1, len(items)):
            pair = (first, items[i])
            rest = items[1:i] + items[i + 1 :]
            for m in matchings(rest):
                yield [pair] + m

    _PAIRINGS_15 = list(matchings(list(range(6))))
    splits = []
    for tri in itertools.combinations(range(6), 3):
        if 0 in tri:
            other = tuple(i for i in range(6) if i not in tri)
            splits.append((tri, other))
    _SPLITS_10 = splits
    triples = []
    for t, u in splits:
        for perm in itertools.permutations(u):
            triples.append((t, perm))
    _TRIPLES_60 = triples
    return _PAIRINGS_15, _SPLITS_10, _TRIPLES_60


def igusa_clebsch(C: Genus2Curve):
    """Igusa-Clebsch invariants (A, B, C, D) of P as a binary sextic.

    Computed from the six projective roots over a splitting field (degree-5
    polynomials contribute the root at infinity) and mapped back to the base
    field; exact in any characteristic >= 5.
    """
    field = C.field
    lc = C.P.lc()
    _, facs = ff.poly_factor(C.P, seed=5)
    degs = [g.degree for g, _ in facs]
    m = 1
    for d in degs:
        m = m * d // ff.gcd_int(m, d)
    p = field.char
    base_deg = field.degree
    if m * base_deg == 1:
        big = field
        emb = None
        poly_big = C.P
    else:
        big = ff.ext_field_create(ff.PrimeField(p), m * base_deg, seed=11)
        emb = ff.embedding(field, big) if base_deg > 1 else None
        if emb is None:
            poly_big = UniPoly.from_ints(big, C.P.int_coeffs())
        else:
            poly_big = emb.map_poly(C.P)
    # projective roots [x : 1] plus (6 - deg) copies of [1 : 0]
    finite = ff.poly_roots_in_field(poly_big)
    if len(finite) != C.P.degree:
        raise InternalInconsistency("splitting field failed to split P")
    pts = [(r, big.one()) for r in finite]
    pts += [(big.one(), big.zero())] * (6 - C.P.degree)

    def br(i, j):
        xi, zi = pts[i]
        xj, zj = pts[j]
        return xi * zj - xj * zi

    b2 = {}
    for i in range(6):
        for j in range(6):
            if i != j:
                t = br(i, j)
                b2[(i, j)] = t * t

    pair15, split10, trip60 = _index_tables()
    one = big.one()

    def tri(t):
        i, j, k = t
        return b2[(i, j)] * b2[(j, k)] * b2[(k, i)]

    A = big.zero()
    for m3 in pair15:
        term = one
        for (i, j) in m3:
            term = term * b2[(i, j)]
        A = A + term
    B = big.zero()
    for t, u in split10:
        B = B + tri(t) * tri(u)
    Cc = big.zero()
    for t, u in trip60:
        cross = b2[(t[0], u[0])] * b2[(t[1], u[1])] * b2[(t[2], u[2])]
        Cc = Cc + tri(t) * tri(u) * cross
    D = one
    for i in range(6):
        for j in range(i + 1, 6):
            D = D * b2[(i, j)]

    def descend(x, power):
        y = x * constant_pow(lc, power, big, field, emb)
        if big.key == field.key:
            return y
        if emb is not None:
            return emb.section(y)
        vec = y.coeff_vector()
        if any(vec[1:]):
            raise InternalInconsistency("invariant failed to descend to base field")
        return field(vec[0])

    return (descend(A, 2), descend(B, 4), descend(Cc, 6), descend(D, 10))


def constant_pow(c: FieldElement, e: int, big, field, emb):
    cc = emb(c) if emb is not None else (big(c.val) if big.key != field.key else c)
    return cc**e


class IgusaInvariants:
    """Weighted invariants (I4, I6', I10, I12) plus the absolute triple.

    Over a finite field the entries are FieldElements; parsed rational tuples
    carry Fractions with the weighted data absent.  ``singular`` flags
    I4 = 0 or I10 = 0, where the absolute invariants stop being coordinates.
    """

    __slots__ = ("weighted", "j1", "j2", "j3", "singular", "normalization")

    def __init__(self, weighted, j1, j2, j3, singular, normalization=IGUSA_NORMALIZATION):
        self.weighted = weighted
        self.j1 = j1
        self.j2 = j2
        self.j3 = j3
        self.singular = singular
        self.normalization = normalization

    @property
    def defined(self) -> bool:
        return self.j1 is not None

    def triple(self):
        if not self.defined:
            raise G2Error("absolute invariants undefined on the singular locus")
        return (self.j1, self.j2, self.j3)

    def __repr__(self):
        if self.defined:
            return f"IgusaInvariants{format_invariant_triple(self.triple())}"
        return f"IgusaInvariants(singular, weighted={self.weighted})"


def igusa_invariants(C: Genus2Curve) -> IgusaInvariants:
    A, B, Cc, D = igusa_clebsch(C)
    field = C.field
    two_inv = field(2).inverse()
    i4 = B
    i6p = (A * B - field(3) * Cc) * two_inv
    i10 = D
    i12 = A * D
    singular = i4.is_zero() or i10.is_zero()
    if singular:
        return IgusaInvariants((i4, i6p, i10, i12), None, None, None, True)
    inv10 = i10.inverse()
    j1 = i4 * i6p * inv10
    j2 = i4 * i4 * i12 * inv10 * inv10
    j3 = i4**5 * inv10 * inv10
    return IgusaInvariants((i4, i6p, i10, i12), j1, j2, j3, False)


def format_invariant_triple(triple) -> str:
    """Exact text form '(a/b,c/d,e/f)'; field elements print their vectors."""
    parts = []
    for t in triple:
        if isinstance(t, Fraction):
            parts.append(str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}")
        elif isinstance(t, FieldElement):
            parts.append(t._fmt())
        else:
            parts.append(str(Fraction(t)))
    return "(" + ",".join(parts) + ")"


def parse_invariant_triple(text: str) -> tuple[Fraction, Fraction, Fraction]:
    body = text.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise UsageError("invariant triple must be parenthesized")
    items = body[1:-1].split(",")
    if len(items) != 3:
        raise UsageError("invariant triple needs exactly three entries")
    return tuple(Fraction(item.strip()) for item in items)

"""Kernel ideals for finite Frobenius-stable subgroups in Mumford coordinates.

A generic odd-order subgroup S (all non-identity points of weight 2, distinct
u1 per +/- pair, nonvanishing v1) is cut out by four univariate polynomials
in the Groebner shape

    V0 = V1 * S0(U1),  V1^2 = S1(U1),  U0 = R0(U1),  R1(U1) = 0,

with deg R1 = (|S| - 1)/2.  The ideal is built here by interpolation through
explicit points and must descend to the base field, which certifies that S
was Galois-stable.  Symbolic q-power Frobenius then works inside the quotient
algebra, giving eigenvalues on cyclic kernels without touching points.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ff, genus2
from .errors import InternalInconsistency, NonGeneric, NotEigen, NotRational
from .ff import UniPoly
from .genus2 import Genus2Curve, MumfordDivisor, cantor_add


class SubgroupPoints:
    """Explicit points of a finite subgroup of Jac(C) over an extension field."""

    __slots__ = ("curve", "points", "q", "galois_stable", "_keys")

    def __init__(self, curve: Genus2Curve, points, q: int, check_closure: bool = False):
        self.curve = curve
        self.q = q
        pts = {}
        for D in points:
            pts[D.key()] = D
        ident = MumfordDivisor.identity(curve.field)
        pts.setdefault(ident.key(), ident)
        self.points = list(pts.values())
        self._keys = set(pts.keys())
        self.galois_stable = all(
            genus2.frobenius_on_divisor(D, q).key() in self._keys for D in self.points
        )
        if check_closure and not self.is_closed():
            raise InternalInconsistency("point set is not closed under the group law")

    @classmethod
    def cyclic(cls, curve: Genus2Curve, gen: MumfordDivisor, ell: int, q: int):
        pts = [MumfordDivisor.identity(curve.field)]
        acc = gen
        for _ in range(ell - 1):
            pts.append(acc)
            acc = cantor_add(curve, acc, gen)
        if not acc.is_identity():
            raise InternalInconsistency("generator does not have the stated order")
        return cls(curve, pts, q)

    @property
    def order(self) -> int:
        return len(self.points)

    def contains(self, D: MumfordDivisor) -> bool:
        return D.key() in self._keys

    def is_closed(self) -> bool:
        return all(
            cantor_add(self.curve, a, b).key() in self._keys
            for a in self.points
            for b in self.points
        )

    def pair_representatives(self):
        """One point per {D, -D} pair, all of weight 2, or NonGeneric."""
        reps = {}
        for D in self.points:
            if D.is_identity():
                continue
            if D.weight != 2:
                raise NonGeneric("weight<2 point")
            if D.v.coeff(1).is_zero():
                raise NonGeneric("v1 = 0")
            key = tuple(c.val for c in D.u.coeffs)
            reps.setdefault(key, D)
        expected = (self.order - 1) // 2
        if self.order % 2 == 0 or len(reps) != expected:
            raise NonGeneric("weight<2 point")
        u1s = {D.u.coeff(1).val for D in reps.values()}
        if len(u1s) != expected:
            raise NonGeneric("u1 collision")
        return list(reps.values())


@dataclass(frozen=True)
class KernelIdeal:
    """The four polynomials of the Groebner shape, over the base field."""

    R1: UniPoly
    R0: UniPoly
    S1: UniPoly
    S0: UniPoly
    order: int
    certificate: str

    @property
    def field(self):
        return self.R1.field

    def lifted(self, K):
        """The four polynomials mapped into an extension field K."""
        lift = lambda f: UniPoly.from_ints(K, f.int_coeffs())
        return lift(self.R1), lift(self.R0), lift(self.S1), lift(self.S0)

    def contains_point(self, D: MumfordDivisor) -> bool:
        """Check the four equations at a weight-2 point over any extension."""
        K = D.field
        R1, R0, S1, S0 = self.lifted(K)
        u0, u1, v0, v1 = D.coordinates()
        if not R1(u1).is_zero():
            return False
        if R0(u1) != u0:
            return False
        if S1(u1) != v1 * v1:
            return False
        return v1 * S0(u1) == v0

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "order": self.order,
            "R1": self.R1.int_coeffs(),
            "R0": self.R0.int_coeffs(),
            "S1": self.S1.int_coeffs(),
            "S0": self.S0.int_coeffs(),
            "certificate": self.certificate,
        }


def ideal_from_subgroup(S: SubgroupPoints, base_field=None, verify: bool = False) -> KernelIdeal:
    """Interpolate the Groebner-shape ideal of S and descend it to F_q.

    Raises NonGeneric when S violates the shape's preconditions and
    NotRational when the interpolated coefficients fail the q-power descent
    check (S not Galois-stable).
    """
    reps = S.pair_representatives()
    K = S.curve.field
    q = S.q
    if base_field is None:
        base_field = ff.PrimeField(K.char)
    if base_field.order != q:
        raise InternalInconsistency("descent target must be the base field F_q")
    one = K.one()
    pts_u0 = []
    pts_s1 = []
    pts_s0 = []
    r1 = UniPoly.one(K)
    for D in reps:
        u0, u1, v0, v1 = D.coordinates()
        r1 = r1 * UniPoly(K, [-u1, one])
        pts_u0.append((u1, u0))
        pts_s1.append((u1, v1 * v1))
        pts_s0.append((u1, v0 / v1))
    r0 = ff.lagrange_interpolate(K, pts_u0)
    s1 = ff.lagrange_interpolate(K, pts_s1)
    s0 = ff.lagrange_interpolate(K, pts_s0)

    def descend(f: UniPoly) -> UniPoly:
        out = []
        for c in f.coeffs:
            if c**q != c:
                raise NotRational("kernel ideal does not descend to F_q")
            vec = c.coeff_vector()
            if any(vec[1:]):
                raise NotRational("kernel ideal does not descend to F_q")
            out.append(vec[0])
        return UniPoly.from_ints(base_field, out)

    ideal = KernelIdeal(
        descend(r1),
        descend(r0),
        descend(s1),
        descend(s0),
        S.order,
        certificate=f"generic: {len(reps)} pairs, distinct u1, v1 != 0",
    )
    if verify:
        for D in S.points:
            if D.is_identity():
                continue
            if not ideal.contains_point(D):
                raise InternalInconsistency("interpolated ideal misses a point of S")
    return ideal


@dataclass(frozen=True)
class FrobeniusImages:
    """q-power images of the Mumford coordinates in the quotient algebra.

    u1_image and u0_image are the classes of U1^q and U0^q as polynomials in
    U1 mod R1; the V-coordinates satisfy V1^q = v1_multiplier(U1) * V1 and
    V0^q = v0_multiplier(U1) * V1, using V1^2 = S1(U1).
    """

    u1_image: UniPoly
    u0_image: UniPoly
    v1_multiplier: UniPoly
    v0_multiplier: UniPoly

    def apply_to_point(self, D: MumfordDivisor):
        """Evaluate the images at a point; returns predicted (u0, u1, v0, v1) of pi(D)."""
        K = D.field
        lift = lambda f: UniPoly.from_ints(K, f.int_coeffs())
        u0, u1, v0, v1 = D.coordinates()
        t = lift(self.u1_image)(u1)
        r0t = lift(self.u0_image)(u1)
        m1 = lift(self.v1_multiplier)(u1)
        m0 = lift(self.v0_multiplier)(u1)
        return (r0t, t, m0 * v1, m1 * v1)


def frobenius_mod_ideal(C: Genus2Curve, ideal: KernelIdeal, q: int) -> FrobeniusImages:
    """Square-and-multiply Frobenius reduction modulo the defining ideal."""
    if q % 2 == 0:
        raise InternalInconsistency("q must be odd")
    field = ideal.field
    R1 = ideal.R1
    x = UniPoly.x(field)
    t = x.pow_mod(q, R1)
    u0_img = ideal.R0.compose_mod(t, R1)
    v1_mul = ideal.S1.pow_mod((q - 1) // 2, R1)
    v0_mul = v1_mul * ideal.S0.compose_mod(t, R1) % R1
    return FrobeniusImages(t, u0_img, v1_mul, v0_mul)


def multiplication_maps(S: SubgroupPoints, k: int):
    """Interpolated action of [k] on the pair coordinates of a cyclic S.

    Returns (M_k, rho_k) with u1([k]D) = M_k(u1(D)) and
    v1([k]D) = rho_k(u1(D)) * v1(D) for all D in S.
    """
    ell = S.order
    K = S.curve.field
    gen = next(D for D in S.points if not D.is_identity())
    chain = [MumfordDivisor.identity(K)]
    for _ in range(ell - 1):
        chain.append(cantor_add(S.curve, chain[-1], gen))
    index_of = {chain[i].key(): i for i in range(ell)}
    pts_m = []
    pts_r = []
    seen = set()
    for i in range(1, ell):
        D = chain[i]
        u1 = D.u.coeff(1)
        if u1.coeff_vector() in seen:
            continue
        seen.add(u1.coeff_vector())
        Dk = chain[(i * k) % ell]
        if Dk.is_identity() or Dk.weight != 2:
            raise NonGeneric("weight<2 point")
        pts_m.append((u1, Dk.u.coeff(1)))
        pts_r.append((u1, Dk.v.coeff(1) / D.v.coeff(1)))
    return ff.lagrange_interpolate(K, pts_m), ff.lagrange_interpolate(K, pts_r)


def eigenvalue_on_kernel(
    C: Genus2Curve, S: SubgroupPoints, q: int, ell: int, ideal: KernelIdeal | None = None
) -> int:
    """The lambda with pi(D) = [lambda] D on a stable cyclic order-ell subgroup.

    Determined symbolically (Frobenius images against interpolated
    multiplication maps in the quotient algebra), with an explicit pointwise
    comparison as cross-check and fallback.  Spec'd to exist; NotEigen is a
    hard error.
    """
    if S.order != ell or not ff.is_prime(ell):
        raise InternalInconsistency("S must be cyclic of prime order ell")
    if not S.galois_stable:
        raise NotEigen("subgroup is not Frobenius-stable")
    gen = next(D for D in S.points if not D.is_identity())
    pig = genus2.frobenius_on_divisor(gen, q)
    # pointwise path
    lam_points = None
    acc = MumfordDivisor.identity(S.curve.field)
    for k in range(1, ell):
        acc = cantor_add(S.curve, acc, gen)
        if acc == pig:
            lam_points = k
            break
    if lam_points is None:
        raise NotEigen("Frobenius does not act as a scalar on the subgroup")
    # symbolic path
    lam_symbolic = None
    try:
        if ideal is None:
            ideal = ideal_from_subgroup(S)
        images = frobenius_mod_ideal(C, ideal, q)
        K = S.curve.field
        lift = lambda f: UniPoly.from_ints(K, f.int_coeffs())
        t = lift(images.u1_image)
        m1 = lift(images.v1_multiplier)
        r1K = lift(ideal.R1)
        for k in range(1, ell):
            Mk, rho = multiplication_maps(S, k)
            if (t - Mk) % r1K == UniPoly.zero(K) and (m1 - rho) % r1K == UniPoly.zero(K):
                lam_symbolic = k
                break
    except NonGeneric:
        lam_symbolic = None
    if lam_symbolic is not None and lam_symbolic != lam_points:
        raise InternalInconsistency(
            f"eigenvalue paths disagree: symbolic {lam_symbolic}, points {lam_points}"
        )
    return lam_points

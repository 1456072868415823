"""Frobenius characteristic polynomials and their torsion-level realizations.

The naive oracle recovers (s1, s2) from curve counts over F_q and F_{q^2};
everything else in the package is ultimately checked against it.  Torsion
bases over extension fields give Frobenius matrices mod ell and the Weil
pairing, realized with exact arithmetic: a combinatorial rule on Weierstrass
points for ell = 2 and a Miller loop on Mumford divisors for odd ell.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import ff, genus2, linalg
from .errors import G2Error, GuardExceeded, InternalInconsistency
from .ff import UniPoly
from .genus2 import Genus2Curve, MumfordDivisor, cantor_add, cantor_add_traced

DEGREE_GUARD_DEFAULT = 12


@dataclass(frozen=True)
class CharPoly:
    """chi = X^4 - s1 X^3 + (s2 + 2q) X^2 - q s1 X + q^2."""

    q: int
    s1: int
    s2: int

    def validate(self) -> "CharPoly":
        q, s1, s2 = self.q, self.s1, self.s2
        if s1 * s1 > 16 * q:
            raise G2Error(f"|s1| <= 4*sqrt(q) violated: {self}")
        if abs(s2) > 4 * q:
            raise G2Error(f"|s2| <= 4q violated: {self}")
        if s1 * s1 - 4 * s2 < 0:
            raise G2Error(f"s1^2 - 4 s2 >= 0 violated: {self}")
        if s2 + 4 * q < 2 * abs(s1):
            raise G2Error(f"s2 + 4q >= 2|s1| violated: {self}")
        return self

    def coeffs(self) -> list[int]:
        """Little-endian integer coefficients, degree 4."""
        q, s1, s2 = self.q, self.s1, self.s2
        return [q * q, -q * s1, s2 + 2 * q, -s1, 1]

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs()):
            acc = acc * x + c
        return acc

    def group_order(self) -> int:
        return self(1)

    def reduce(self, ell: int) -> UniPoly:
        return UniPoly.from_ints(ff.PrimeField(ell), self.coeffs())

    def to_json(self) -> dict:
        return {"q": self.q, "s1": self.s1, "s2": self.s2}


def chi_naive(C: Genus2Curve, guard: int = genus2.COUNT_GUARD_DEFAULT) -> CharPoly:
    """CharPoly from exhaustive counts of C over F_q and F_{q^2}.

    s1 = q + 1 - #C(F_q); s2 follows from the power sums of the Frobenius
    eigenvalues: sum a_i = s1 and sum a_i^2 = s1^2 - 2(s2 + 2q), so
    #C(F_{q^2}) = q^2 + 1 - (s1^2 - 2 s2 - 4q).
    """
    field = C.field
    q = field.order
    n1 = genus2.curve_point_count(C, guard)
    if isinstance(field, ff.PrimeField):
        K2 = ff.ext_field_create(field, 2, seed=2)
        C2 = Genus2Curve(K2, UniPoly.from_ints(K2, C.P.int_coeffs()))
    else:
        K2 = ff.ext_field_create(ff.PrimeField(field.char), 2 * field.degree, seed=2)
        emb = ff.embedding(field, K2)
        C2 = C.base_change(emb)
    n2 = genus2.curve_point_count(C2, guard)
    s1 = q + 1 - n1
    p2 = q * q + 1 - n2
    if (s1 * s1 - p2) % 2 != 0:
        raise InternalInconsistency("power-sum parity violated; counting bug")
    s2 = (s1 * s1 - p2) // 2 - 2 * q
    return CharPoly(q, s1, s2).validate()


def order_over_extension(chi: CharPoly, n: int) -> int:
    """#A(F_{q^n}) = prod (1 - a_i^n) = Res(chi, X^n - 1), exactly over Z."""
    if n < 1:
        raise ValueError("extension degree must be positive")
    xn = [-1] + [0] * (n - 1) + [1]
    order = ff.resultant_zz(chi.coeffs(), xn)
    if order <= 0:
        raise InternalInconsistency("nonpositive group order")
    return order


def frobenius_on_divisor(D: MumfordDivisor, q: int) -> MumfordDivisor:
    return genus2.frobenius_on_divisor(D, q)


def torsion_extension_degree(chi: CharPoly, ell: int) -> int:
    """Order of X in F_ell[X]/(chi mod ell); A[ell] is rational over F_{q^n}."""
    chil = chi.reduce(ell)
    if chil.coeff(0).is_zero():
        raise G2Error("ell divides q; no etale ell-torsion")
    x = UniPoly.x(chil.field)
    t = x % chil
    one = UniPoly.one(chil.field)
    n = 1
    while t != one % chil:
        t = t * x % chil
        n += 1
        if n > ell**4:
            raise InternalInconsistency("order search exceeded the group bound")
    return n


class TorsionBasis:
    """Four independent points of A[ell] over F_{q^n}, with the extended curve."""

    __slots__ = ("ell", "points", "curve", "n", "q", "_span", "_div_by_coords")

    def __init__(self, ell, points, curve, n, q):
        self.ell = ell
        self.points = points
        self.curve = curve
        self.n = n
        self.q = q
        self._span = None
        self._div_by_coords = None

    @property
    def field(self):
        return self.curve.field

    def _ensure_span(self):
        if self._span is not None:
            return
        ell = self.ell
        items = [(MumfordDivisor.identity(self.field), (0, 0, 0, 0))]
        for k, b in enumerate(self.points):
            mults = [MumfordDivisor.identity(self.field)]
            for _ in range(ell - 1):
                mults.append(cantor_add(self.curve, mults[-1], b))
            new_items = []
            for D, coords in items:
                for j in range(ell):
                    Dj = cantor_add(self.curve, D, mults[j]) if j else D
                    cj = coords[:k] + (j,) + coords[k + 1 :]
                    new_items.append((Dj, cj))
            items = new_items
        span = {}
        divs = {}
        for D, coords in items:
            span[D.key()] = coords
            divs[coords] = D
        if len(span) != ell**4:
            raise InternalInconsistency("basis points are not independent")
        self._span = span
        self._div_by_coords = divs

    def dlog(self, D: MumfordDivisor) -> tuple[int, int, int, int]:
        self._ensure_span()
        key = D.key()
        if key not in self._span:
            raise G2Error("divisor is not in the ell-torsion span")
        return self._span[key]

    def combination(self, coords) -> MumfordDivisor:
        self._ensure_span()
        return self._div_by_coords[tuple(c % self.ell for c in coords)]

    def all_points(self):
        self._ensure_span()
        return dict(self._div_by_coords)


def torsion_basis(
    C: Genus2Curve,
    chi: CharPoly,
    ell: int,
    seed: int = 0,
    degree_guard: int = DEGREE_GUARD_DEFAULT,
) -> TorsionBasis:
    """Basis of A[ell] over F_{q^n}, n minimal with X^n = 1 mod (chi mod ell).

    For ell = 2 the basis comes straight from Weierstrass roots; for odd ell
    random divisors are multiplied into the ell-part of the group and walked
    down to order ell, collecting independent points.
    """
    field = C.field
    if not isinstance(field, ff.PrimeField):
        raise GuardExceeded("torsion machinery is restricted to prime base fields")
    if not ff.is_prime(ell) or ell == field.p:
        raise G2Error("ell must be a prime different from the characteristic")
    Codd = C.odd_model()
    q = field.order
    n = torsion_extension_degree(chi, ell)
    if n > degree_guard:
        raise GuardExceeded(
            f"A[{ell}] needs extension degree {n} > guard {degree_guard}"
        )
    if n == 1:
        K = field
        Cext = Codd
    else:
        K = ff.ext_field_create(field, n, seed=3)
        Cext = Genus2Curve(K, UniPoly.from_ints(K, Codd.P.int_coeffs()))
    rng = random.Random((seed * 1000003 + ell) * 1000003 + q)
    if ell == 2:
        roots = ff.poly_roots_in_field(Cext.P)
        if len(roots) != 5:
            raise InternalInconsistency("P must split over the 2-torsion field")
        roots = sorted(set(roots), key=K.index_of)
        pts = [
            MumfordDivisor(UniPoly(K, [-r, K.one()]), UniPoly.zero(K))
            for r in roots[:4]
        ]
        return TorsionBasis(2, pts, Cext, n, q)

    order = order_over_extension(chi, n)
    cof = order
    e = 0
    while cof % ell == 0:
        cof //= ell
        e += 1
    if e < 4:
        raise InternalInconsistency("full ell-torsion not rational over F_{q^n}")

    basis: list[MumfordDivisor] = []
    span = {MumfordDivisor.identity(K).key()}
    span_items = [MumfordDivisor.identity(K)]
    for _ in range(800):
        if len(basis) == 4:
            break
        D = genus2.random_divisor(Cext, rng)
        Q = genus2.scalar_mul(Cext, D, cof)
        if Q.is_identity():
            continue
        while True:
            R = genus2.scalar_mul(Cext, Q, ell)
            if R.is_identity():
                break
            Q = R
        if Q.key() in span:
            continue
        basis.append(Q)
        if len(basis) < 4:
            mults = [MumfordDivisor.identity(K)]
            for _ in range(ell - 1):
                mults.append(cantor_add(Cext, mults[-1], Q))
            span_items = [
                cantor_add(Cext, Dv, mj) if j else Dv
                for Dv in span_items
                for j, mj in enumerate(mults)
            ]
            span = {Dv.key() for Dv in span_items}
    else:
        raise InternalInconsistency("torsion basis search exhausted its attempts")
    return TorsionBasis(ell, basis, Cext, n, q)


def _sample_order_ell(Cext, cofactor: int, ell: int, rng) -> MumfordDivisor | None:
    D = genus2.random_divisor(Cext, rng)
    Q = genus2.scalar_mul(Cext, D, cofactor)
    if Q.is_identity():
        return None
    while True:
        R = genus2.scalar_mul(Cext, Q, ell)
        if R.is_identity():
            return Q
        Q = R


def stable_eigenline(
    C: Genus2Curve,
    chi: CharPoly,
    ell: int,
    lam: int,
    seed: int = 0,
    degree_guard: int = DEGREE_GUARD_DEFAULT,
):
    """A Frobenius-stable order-ell subgroup with pi acting by lam.

    lam must be a root of chi mod ell.  A generator is rational over
    F_{q^m}, m = ord(lam) in (Z/ell)*; it is carved out of a random
    order-ell point by projecting onto the generalized lam-eigenspace with
    chi/(X - lam)^mult and walking down with pi - lam.
    """
    from .kernel import SubgroupPoints

    field = C.field
    if not isinstance(field, ff.PrimeField):
        raise GuardExceeded("eigenline search is restricted to prime base fields")
    q = field.order
    Fl = ff.PrimeField(ell)
    chil = chi.reduce(ell)
    lam %= ell
    if lam == 0 or not chil(Fl(lam)).is_zero():
        raise G2Error("lam must be a nonzero root of chi mod ell")
    # multiplicative order of lam
    m, t = 1, lam
    while t != 1:
        t = t * lam % ell
        m += 1
    if m > degree_guard:
        raise GuardExceeded(
            f"eigenvector of lambda={lam} needs extension degree {m} > guard"
        )
    Codd = C.odd_model()
    if m == 1:
        Cext = Codd
    else:
        K = ff.ext_field_create(field, m, seed=3)
        Cext = Genus2Curve(K, UniPoly.from_ints(K, Codd.P.int_coeffs()))
    order = order_over_extension(chi, m)
    cof = order
    e = 0
    while cof % ell == 0:
        cof //= ell
        e += 1
    if e == 0:
        raise InternalInconsistency("eigenvalue present but ell does not divide #A")
    lin = UniPoly.from_ints(Fl, [-lam, 1])
    mult = 0
    rest = chil
    while True:
        quo, rem = divmod(rest, lin)
        if not rem.is_zero():
            break
        rest = quo
        mult += 1
    h = chil
    for _ in range(mult):
        h = h.exact_div(lin)
    hc = [c.val for c in h.coeffs]
    rng = random.Random((seed * 1000003 + ell) * 9176 + lam)
    for _ in range(400):
        T = _sample_order_ell(Cext, cof, ell, rng)
        if T is None:
            continue
        # Horner for h(pi) applied to T
        w = genus2.scalar_mul(Cext, T, hc[-1])
        for c in reversed(hc[:-1]):
            w = cantor_add(Cext, frobenius_on_divisor(w, q), genus2.scalar_mul(Cext, T, c))
        if w.is_identity():
            continue
        for _ in range(mult + 1):
            wn = cantor_add(
                Cext,
                frobenius_on_divisor(w, q),
                genus2.scalar_mul(Cext, w, ell - lam),
            )
            if wn.is_identity():
                break
            w = wn
        else:
            raise InternalInconsistency("eigenspace walk failed to terminate")
        if frobenius_on_divisor(w, q) != genus2.scalar_mul(Cext, w, lam):
            raise InternalInconsistency("constructed point is not a lam-eigenvector")
        return SubgroupPoints.cyclic(Cext, w, ell, q)
    raise InternalInconsistency("eigenline sampling exhausted its attempts")


# ----------------------------------------------------------------------
# Weil pairing
# ----------------------------------------------------------------------


class _Collision(Exception):
    """A randomized representative hit the support of a Miller function."""


def _weierstrass_subset(Cext: Genus2Curve, D: MumfordDivisor, root_index):
    if D.is_identity():
        return frozenset()
    if not D.v.is_zero():
        raise G2Error("not a 2-torsion divisor")
    if D.weight == 1:
        r = -D.u.coeff(0)
        return frozenset({root_index[r.coeff_vector()], -1})
    rs = ff.poly_roots_in_field(D.u)
    if len(rs) != 2:
        raise InternalInconsistency("2-torsion u must split over the torsion field")
    return frozenset(root_index[r.coeff_vector()] for r in rs)


def _pairing_two(Cext: Genus2Curve, D1, D2) -> int:
    roots = sorted(set(ff.poly_roots_in_field(Cext.P)), key=Cext.field.index_of)
    if len(roots) != 5:
        raise G2Error("2-torsion pairing needs all Weierstrass points rational")
    root_index = {r.coeff_vector(): i for i, r in enumerate(roots)}
    S = _weierstrass_subset(Cext, D1, root_index)
    T = _weierstrass_subset(Cext, D2, root_index)
    return len(S & T) % 2


def _eval_factors(trace, u_e: UniPoly, v_e: UniPoly):
    field = u_e.field
    val = field.one()
    for item in trace:
        if item[0] == "poly":
            g = item[1]
            t = ff.prod_over_roots(u_e, g)
            if t.is_zero():
                raise _Collision
            val = val * t
        else:
            _, v, uprime = item
            a = ff.prod_over_roots(u_e, v_e - v)
            if a.is_zero():
                raise _Collision
            val = val * a
            if uprime.degree > 0:
                b = ff.prod_over_roots(u_e, uprime)
                if b.is_zero():
                    raise _Collision
                val = val / b
    return val


def _support_rep(Cext, D, rng):
    """(A, T, trace) with A = reduced(D + T); E_A - E_T represents the class of D."""
    for _ in range(100):
        T = genus2.random_divisor(Cext, rng)
        A, tr = cantor_add_traced(Cext, D, T)
        if A.weight == 2 and A.u.gcd(T.u).degree == 0:
            return A, T, tr
    raise InternalInconsistency("no generic support representative found")


def _miller(Cext, D, tr_init, ell, eval_pair):
    B, U = eval_pair

    def ev(trace):
        return _eval_factors(trace, B.u, B.v) / _eval_factors(trace, U.u, U.v)

    theta1 = ev(tr_init).inverse()
    theta = theta1
    Z = D
    for bit in bin(ell)[3:]:
        Z, tr = cantor_add_traced(Cext, Z, Z)
        theta = theta * theta * ev(tr)
        if bit == "1":
            Z, tr = cantor_add_traced(Cext, Z, D)
            theta = theta * theta1 * ev(tr)
    if not Z.is_identity():
        raise InternalInconsistency("Miller loop did not annihilate the divisor")
    return theta


def weil_pairing(
    Cext: Genus2Curve, D1: MumfordDivisor, D2: MumfordDivisor, ell: int, seed: int = 0
) -> int:
    """The ell-Weil pairing as an element of Z/ell, via a fixed primitive root.

    Written additively: the returned k satisfies e(D1, D2) = zeta^k where
    zeta = g^((|K|-1)/ell) for the field's canonical multiplicative generator
    g.  Bilinear, alternating, Galois-equivariant.
    """
    field = Cext.field
    if D1.is_identity() or D2.is_identity() or D1 == D2 or D1 == genus2.negate(D2):
        return 0
    if ell == 2:
        return _pairing_two(Cext, D1, D2)
    rng = random.Random((seed * 1000003 + ell) * 1000003 + field.order % 1000003)
    for _ in range(200):
        try:
            A1, T1, tr1 = _support_rep(Cext, D1, rng)
            A2, T2, tr2 = _support_rep(Cext, D2, rng)
            us = [A1.u, T1.u, A2.u, T2.u]
            ok = all(
                us[i].gcd(us[j]).degree == 0
                for i in range(4)
                for j in range(i + 1, 4)
            )
            ok = ok and all(
                D.u.gcd(u).degree == 0
                for D in (D1, D2)
                for u in (A2.u, T2.u, A1.u, T1.u)
            )
            if not ok:
                continue
            th1 = _miller(Cext, D1, tr1, ell, (A2, T2))
            th2 = _miller(Cext, D2, tr2, ell, (A1, T1))
            e = th1 / th2
        except (_Collision, ZeroDivisionError):
            continue
        if e**ell != field.one():
            raise InternalInconsistency("pairing value is not an ell-th root of unity")
        return _dlog_in_mu(e, ell)
    raise InternalInconsistency("pairing representative retries exhausted")


def _dlog_in_mu(e, ell) -> int:
    field = e.field
    q = field.order
    if (q - 1) % ell != 0:
        raise InternalInconsistency("mu_ell does not lie in the torsion field")
    zeta = field.multiplicative_generator() ** ((q - 1) // ell)
    z = field.one()
    for k in range(ell):
        if z == e:
            return k
        z = z * zeta
    raise InternalInconsistency("pairing value outside <zeta>")


def pairing_gram(basis: TorsionBasis, seed: int = 0):
    """Gram matrix J of the Weil pairing on the basis (alternating, mod ell)."""
    ell = basis.ell
    pts = basis.points
    J = [[0] * 4 for _ in range(4)]
    for i in range(4):
        for j in range(i + 1, 4):
            v = weil_pairing(basis.curve, pts[i], pts[j], ell, seed=seed)
            J[i][j] = v % ell
            J[j][i] = (-v) % ell
    return linalg.mat(J, ell)


# ----------------------------------------------------------------------
# Frobenius matrices
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class FrobMatrix:
    """Matrix of the q-power Frobenius on a torsion basis, columns = images."""

    mat: tuple
    ell: int
    basis: TorsionBasis

    def charpoly_coeffs(self) -> list[int]:
        return linalg.charpoly(self.mat, self.ell)

    def verify_multiplier(self, J) -> bool:
        """<pi x, pi y> = q <x, y> on coordinates: M^T J M = q J.

        Columns of M are the images of the basis; with the row-vector
        convention the same identity reads M J M^T = q J.
        """
        ell = self.ell
        q = self.basis.q
        MtJM = linalg.mat_mul(
            linalg.mat_mul(linalg.transpose(self.mat), J, ell), self.mat, ell
        )
        return MtJM == linalg.mat_scale(J, q, ell)


def frob_matrix(C: Genus2Curve, basis: TorsionBasis) -> FrobMatrix:
    ell = basis.ell
    cols = []
    for b in basis.points:
        pb = frobenius_on_divisor(b, basis.q)
        cols.append(basis.dlog(pb))
    M = linalg.mat(list(zip(*cols)), ell)
    d = linalg.det(M, ell)
    if d != (basis.q**2) % ell:
        raise InternalInconsistency("det of Frobenius matrix is not q^2 mod ell")
    return FrobMatrix(M, ell, basis)


def match_charpoly_on_torsion(C: Genus2Curve, basis: TorsionBasis, q: int, ell: int):
    """All (s1, s2) mod ell whose quartic annihilates Frobenius on the basis."""
    M = frob_matrix(C, basis).mat
    M2 = linalg.mat_mul(M, M, ell)
    M3 = linalg.mat_mul(M2, M, ell)
    M4 = linalg.mat_mul(M3, M, ell)
    I = linalg.identity(4, ell)
    out = set()
    for s1 in range(ell):
        for s2 in range(ell):
            acc = M4
            acc = linalg.mat_add(acc, linalg.mat_scale(M3, -s1, ell), ell)
            acc = linalg.mat_add(acc, linalg.mat_scale(M2, s2 + 2 * q, ell), ell)
            acc = linalg.mat_add(acc, linalg.mat_scale(M, -q * s1, ell), ell)
            acc = linalg.mat_add(acc, linalg.mat_scale(I, q * q, ell), ell)
            if all(all(x == 0 for x in row) for row in acc):
                out.add((s1, s2))
    if not out:
        raise InternalInconsistency("no (s1, s2) annihilates the torsion basis")
    return out

"""Siegel-case Elkies logic: q-reciprocals, prime classification, pipelines.

A prime ell is usable when a Frobenius-stable Lagrangian subgroup of A[ell]
exists over F_q; the characteristic polynomial P of Frobenius on that kernel
determines chi mod ell as P * Rec_q(P).  Collecting enough primes with
prod ell > 8q pins (s1, s2) through the Weil-Rueck box.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product

from . import ff, genus2, kernel, linalg
from .errors import (
    EmptyRange,
    G2Error,
    GuardExceeded,
    InternalInconsistency,
    NonGeneric,
    NotRational,
)
from .ff import UniPoly
from .frobenius import CharPoly, chi_naive
from .genus2 import Genus2Curve

ELKIES_COPRIME_SPLIT = "ElkiesCoprimeSplit"
ELKIES_TOTALLY_SPLIT = "ElkiesTotallySplit"
NOT_GUARANTEED = "NotGuaranteed"
ATKIN_LIKE = "AtkinLike"

ELKIES_VERDICTS = (ELKIES_COPRIME_SPLIT, ELKIES_TOTALLY_SPLIT)


def rec_q(P: UniPoly, q: int) -> UniPoly:
    """The monic q-reciprocal a0^-1 X^d P(q/X); pairs each root x with q/x."""
    field = P.field
    d = P.degree
    if d < 0 or P.coeff(0).is_zero():
        raise G2Error("rec_q needs an invertible constant coefficient")
    qf = field(q)
    if qf.is_zero():
        raise G2Error("q must be invertible mod ell")
    coeffs = [P.coeff(d - j) * qf ** (d - j) for j in range(d + 1)]
    out = UniPoly(field, coeffs)
    return out.monic()


def chi_from_kernel_charpoly(P: UniPoly, q: int, ell: int) -> UniPoly:
    """chi mod ell = P * Rec_q(P) for the kernel charpoly P (monic, degree 2)."""
    if P.degree != 2:
        raise G2Error("kernel characteristic polynomial must have degree 2")
    out = P * rec_q(P, q)
    if rec_q(out, q) != out:
        raise InternalInconsistency("P * Rec_q(P) is not q-self-reciprocal")
    return out


def extract_s1_s2(chi_ell: UniPoly, q: int, ell: int) -> tuple[int, int]:
    """(s1, s2) mod ell from a quartic of the Frobenius shape; validates it."""
    F = chi_ell.field
    if chi_ell.degree != 4 or chi_ell.lc() != F.one():
        raise InternalInconsistency("expected a monic quartic")
    s1 = (-chi_ell.coeff(3).val) % ell
    s2 = (chi_ell.coeff(2).val - 2 * q) % ell
    if chi_ell.coeff(1) != F(-q * s1) or chi_ell.coeff(0) != F(q * q):
        raise InternalInconsistency("quartic does not have the Frobenius shape")
    return s1, s2


@dataclass(frozen=True)
class PrimeClassification:
    ell: int
    verdict: str
    pattern: tuple
    witness: UniPoly | None

    @property
    def is_elkies(self) -> bool:
        return self.verdict in ELKIES_VERDICTS

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "verdict": self.verdict,
            "pattern": [list(t) for t in self.pattern],
            "witness": self.witness.int_coeffs() if self.witness else None,
        }


def _quadratic_divisors(chi_ell: UniPoly, seed: int = 0):
    """All monic quadratic divisors of a quartic, from its factorization."""
    _, facs = ff.poly_factor(chi_ell, seed)
    linear = []
    quads = []
    for g, m in facs:
        if g.degree == 1:
            linear.extend([g] * m)
        elif g.degree == 2:
            quads.extend([g] * m)
    out = []
    seen = set()
    for i in range(len(linear)):
        for j in range(i + 1, len(linear)):
            q2 = linear[i] * linear[j]
            if q2 not in seen:
                seen.add(q2)
                out.append(q2)
    for q2 in quads:
        if q2 not in seen:
            seen.add(q2)
            out.append(q2)
    return out, facs


def classify_prime(chi_ell: UniPoly, q: int, ell: int) -> PrimeClassification:
    """Sufficiency test for ell being Elkies, from chi mod ell alone.

    ElkiesTotallySplit: chi splits into linear factors.  ElkiesCoprimeSplit:
    chi = P * Rec_q(P) with gcd(P, Rec_q(P)) = 1.  NotGuaranteed: chi splits
    into two quadratics but never in the coprime-reciprocal form (splitting
    in degree-2 factors alone proves nothing).  AtkinLike: no quadratic
    splitting exists at all.
    """
    pattern = tuple(ff.poly_factor_degree_pattern(chi_ell))
    quads, facs = _quadratic_divisors(chi_ell)
    if all(g.degree == 1 for g, _ in facs):
        return PrimeClassification(ell, ELKIES_TOTALLY_SPLIT, pattern, None)
    for P in quads:
        Q = rec_q(P, q)
        if P * Q == chi_ell and P.gcd(Q).degree == 0:
            return PrimeClassification(ell, ELKIES_COPRIME_SPLIT, pattern, P)
    for P in quads:
        quo, rem = divmod(chi_ell, P)
        if rem.is_zero() and quo.degree == 2:
            return PrimeClassification(ell, NOT_GUARANTEED, pattern, None)
    return PrimeClassification(ell, ATKIN_LIKE, pattern, None)


# ----------------------------------------------------------------------
# Lagrangian subspaces of (Z/ell)^4
# ----------------------------------------------------------------------


def two_dim_subspaces(ell: int):
    """Canonical (row-echelon) bases of all 2-dimensional subspaces of F_ell^4."""
    out = []
    for c1 in range(4):
        for c2 in range(c1 + 1, 4):
            free1 = [j for j in range(4) if j > c1 and j != c2]
            free2 = [j for j in range(4) if j > c2]
            for vals1 in product(range(ell), repeat=len(free1)):
                v = [0, 0, 0, 0]
                v[c1] = 1
                for pos, val in zip(free1, vals1):
                    v[pos] = val
                for vals2 in product(range(ell), repeat=len(free2)):
                    w = [0, 0, 0, 0]
                    w[c2] = 1
                    for pos, val in zip(free2, vals2):
                        w[pos] = val
                    out.append((tuple(v), tuple(w)))
    return out


def _is_isotropic(v, w, J, ell):
    return linalg.dot(v, linalg.mat_vec(J, w, ell), ell) == 0


def lagrangian_planes(J, ell: int):
    """All Lagrangian (maximal isotropic) planes for a nondegenerate alternating J.

    The count is always ell^3 + ell^2 + ell + 1; a different count means J was
    not a symplectic Gram matrix.
    """
    planes = [
        (v, w) for v, w in two_dim_subspaces(ell) if _is_isotropic(v, w, J, ell)
    ]
    expected = ell**3 + ell**2 + ell + 1
    if len(planes) != expected:
        raise InternalInconsistency(
            f"Lagrangian count {len(planes)} != {expected}; J is not symplectic"
        )
    return planes


def _in_plane_coords(x, v, w, ell):
    M = tuple((v[i], w[i]) for i in range(4))
    return linalg.solve(M, x, ell)


def enumerate_stable_lagrangians(M, J, ell: int):
    """M-stable Lagrangian planes, as (v, w) basis pairs of coordinate vectors."""
    out = []
    for v, w in lagrangian_planes(J, ell):
        Mv = linalg.mat_vec(M, v, ell)
        Mw = linalg.mat_vec(M, w, ell)
        if _in_plane_coords(Mv, v, w, ell) is None:
            continue
        if _in_plane_coords(Mw, v, w, ell) is None:
            continue
        out.append((v, w))
    return out


def plane_frobenius_charpoly(M, plane, ell: int) -> UniPoly:
    """Charpoly of M restricted to a stable plane, as a monic quadratic mod ell."""
    v, w = plane
    a = _in_plane_coords(linalg.mat_vec(M, v, ell), v, w, ell)
    b = _in_plane_coords(linalg.mat_vec(M, w, ell), v, w, ell)
    if a is None or b is None:
        raise InternalInconsistency("plane is not M-stable")
    tr = (a[0] + b[1]) % ell
    det = (a[0] * b[1] - a[1] * b[0]) % ell
    return UniPoly.from_ints(ff.PrimeField(ell), [det, -tr, 1])


# ----------------------------------------------------------------------
# Degenerate-case detection and Elkies proportions
# ----------------------------------------------------------------------

FLAG_SINGULAR = "SingularLocus"
FLAG_PRODUCT = "ProductOfEllipticCurves"
FLAG_CM_QUINTIC = "CMQuintic"


def detect_degenerate(curve_or_invariants) -> set[str]:
    """Degeneracy flags from the weighted invariants (I4, I6', I10, I12).

    CMQuintic detects the geometric class of y^2 = x^5 - 1 (extra
    automorphisms), which is exactly I4 = I6' = I12 = 0 with I10 != 0.
    Normality and extra-automorphism tests beyond that are not implemented;
    such primes fall to the skip policy.
    """
    if isinstance(curve_or_invariants, Genus2Curve):
        inv = genus2.igusa_invariants(curve_or_invariants)
    else:
        inv = curve_or_invariants
    i4, i6p, i10, i12 = inv.weighted
    flags = set()
    if i10.is_zero():
        flags.add(FLAG_PRODUCT)
        flags.add(FLAG_SINGULAR)
    if i4.is_zero():
        flags.add(FLAG_SINGULAR)
    if i4.is_zero() and i6p.is_zero() and i12.is_zero() and not i10.is_zero():
        flags.add(FLAG_CM_QUINTIC)
    return flags


@dataclass(frozen=True)
class ProportionReport:
    X: int
    eps: Fraction
    per_ell: tuple
    n_elkies: int
    n_primes: int
    proportion: Fraction
    reference: Fraction

    def to_json(self) -> dict:
        return {
            "X": self.X,
            "eps": str(self.eps),
            "per_ell": [c.to_json() for c in self.per_ell],
            "n_elkies": self.n_elkies,
            "n_primes": self.n_primes,
            "proportion": str(self.proportion),
            "reference": str(self.reference),
        }


def elkies_proportion(chis: dict[int, UniPoly], q: int, eps) -> ProportionReport:
    """Proportion of primes ell <= X with an Elkies verdict, against 3/8.

    chis maps ell to chi mod ell; X is the largest key.  The range must
    satisfy X >= (1/eps) * log q (natural log), the regime where the
    proportion is meaningful.
    """
    if not chis:
        raise EmptyRange("no primes in range")
    eps = Fraction(eps)
    X = max(chis)
    if X < math.log(q) / eps:
        raise G2Error(
            f"X = {X} is below (1/eps) log q = {float(math.log(q) / eps):.2f}"
        )
    rows = []
    n_elkies = 0
    for ell in sorted(chis):
        c = classify_prime(chis[ell], q, ell)
        rows.append(c)
        if c.is_elkies:
            n_elkies += 1
    return ProportionReport(
        X=X,
        eps=eps,
        per_ell=tuple(rows),
        n_elkies=n_elkies,
        n_primes=len(rows),
        proportion=Fraction(n_elkies, len(rows)),
        reference=Fraction(3, 8),
    )


# ----------------------------------------------------------------------
# Pipeline
# ----------------------------------------------------------------------


@dataclass
class PrimeRow:
    ell: int
    status: str  # "used" or "skipped"
    reason: str
    chi_mod_ell: list | None = None
    s1s2: tuple | None = None
    kernels_found: int = 0
    micros: int = 0

    def to_json(self) -> dict:
        return {
            "ell": self.ell,
            "status": self.status,
            "reason": self.reason,
            "chi_mod_ell": self.chi_mod_ell,
            "s1s2": list(self.s1s2) if self.s1s2 else None,
            "kernels_found": self.kernels_found,
            "micros": self.micros,
        }


@dataclass
class SiegelReport:
    q: int
    target: int
    rows: list = dc_field(default_factory=list)
    modulus: int = 1
    s1_mod: int = 0
    s2_mod: int = 0
    final: CharPoly | None = None

    def to_json(self) -> dict:
        return {
            "mode": "siegel",
            "q": self.q,
            "target": self.target,
            "rows": [r.to_json() for r in self.rows],
            "modulus": self.modulus,
            "s1_mod": self.s1_mod,
            "s2_mod": self.s2_mod,
            "final": self.final.to_json() if self.final else None,
        }


def kernel_charpoly_via_points(S: kernel.SubgroupPoints, ell: int) -> UniPoly:
    """Charpoly of Frobenius on an order-ell^2 subgroup, from explicit points."""
    pts = S.points
    if len(pts) != ell * ell:
        raise InternalInconsistency("expected a subgroup of order ell^2")
    ident = genus2.MumfordDivisor.identity(S.curve.field)
    G1 = next(D for D in pts if not D.is_identity())
    members = {ident.key(): (0, 0)}
    acc = ident
    for a in range(1, ell):
        acc = genus2.cantor_add(S.curve, acc, G1)
        members[acc.key()] = (a, 0)
    G2_ = next(D for D in pts if D.key() not in members)
    col = {k: v for k, v in members.items()}
    accb = ident
    for b in range(1, ell):
        accb = genus2.cantor_add(S.curve, accb, G2_)
        acc = accb
        col[acc.key()] = (0, b)
        for a in range(1, ell):
            acc = genus2.cantor_add(S.curve, acc, G1)
            col[acc.key()] = (a, b)
    if len(col) != ell * ell:
        raise InternalInconsistency("subgroup points do not form a plane")
    c1 = col[genus2.frobenius_on_divisor(G1, S.q).key()]
    c2 = col[genus2.frobenius_on_divisor(G2_, S.q).key()]
    tr = (c1[0] + c2[1]) % ell
    det = (c1[0] * c2[1] - c1[1] * c2[0]) % ell
    return UniPoly.from_ints(ff.PrimeField(ell), [det, -tr, 1])


def _fetch_waves(items, fetch, jobs):
    """Yield (item, result_or_exception) in order, fetching jobs at a time."""
    if jobs <= 1:
        for it in items:
            try:
                yield it, fetch(it)
            except GuardExceeded as e:
                yield it, e
        return
    from concurrent.futures import ThreadPoolExecutor

    for start in range(0, len(items), jobs):
        wave = items[start : start + jobs]
        with ThreadPoolExecutor(len(wave)) as ex:
            futs = [(it, ex.submit(fetch, it)) for it in wave]
            for it, fut in futs:
                try:
                    yield it, fut.result()
                except GuardExceeded as e:
                    yield it, e


def pipeline_count_siegel(
    C: Genus2Curve,
    provider,
    ell_max: int = 30,
    verify: bool = False,
    count_guard: int = genus2.COUNT_GUARD_DEFAULT,
    jobs: int = 1,
) -> SiegelReport:
    """Elkies point counting: per-ell stable kernels, CRT until prod ell > 8q.

    The provider supplies Frobenius-stable Lagrangian kernels per ell (the
    brute-force oracle, or modular-equation screening around it); primes that
    fail genericity or guards are skipped.  The report is partial when the
    budget runs out first.  jobs > 1 fetches kernels for several primes at a
    time; results are merged in ell order, so the outcome is identical.
    """
    q = C.q
    target = 8 * q
    report = SiegelReport(q=q, target=target)
    cong_s1: list[tuple[int, int]] = []
    cong_s2: list[tuple[int, int]] = []
    ells = [ell for ell in ff.primes_upto(ell_max) if q % ell != 0]
    for ell, fetched in _fetch_waves(
        ells, lambda l: provider.siegel_kernels(C, l), jobs
    ):
        t0 = time.perf_counter()
        row = PrimeRow(ell=ell, status="skipped", reason="")
        report.rows.append(row)
        if isinstance(fetched, GuardExceeded):
            row.reason = f"guard: {fetched}"
            row.micros = int((time.perf_counter() - t0) * 1e6)
            continue
        kernels = fetched
        row.kernels_found = len(kernels)
        if not kernels:
            row.reason = "no Frobenius-stable Lagrangian kernel"
            row.micros = int((time.perf_counter() - t0) * 1e6)
            continue
        P = None
        last_reason = "kernel unusable"
        for S in kernels:
            try:
                if ell != 2:
                    kernel.ideal_from_subgroup(S, base_field=None, verify=False)
                P = kernel_charpoly_via_points(S, ell)
                break
            except NonGeneric as e:
                last_reason = f"non-generic kernel ({e.reason})"
            except NotRational as e:
                last_reason = str(e)
        if P is None:
            row.reason = last_reason
            row.micros = int((time.perf_counter() - t0) * 1e6)
            continue
        chi_ell = chi_from_kernel_charpoly(P, q, ell)
        s1, s2 = extract_s1_s2(chi_ell, q, ell)
        row.status = "used"
        row.reason = "elkies kernel"
        row.chi_mod_ell = chi_ell.int_coeffs()
        row.s1s2 = (s1, s2)
        row.micros = int((time.perf_counter() - t0) * 1e6)
        cong_s1.append((s1, ell))
        cong_s2.append((s2, ell))
        s1m, mod = ff.integer_crt(cong_s1)
        s2m, _ = ff.integer_crt(cong_s2)
        report.modulus, report.s1_mod, report.s2_mod = mod, s1m, s2m
        if mod > target:
            s1_lift = ff.centered_lift(s1m, mod)
            s2_lift = ff.centered_lift(s2m, mod)
            try:
                report.final = CharPoly(q, s1_lift, s2_lift).validate()
            except G2Error as e:
                raise InternalInconsistency(
                    f"lifted (s1, s2) violates the Weil-Rueck box: {e}"
                ) from e
            if report.final is not None:
                break
    if verify and report.final is not None:
        oracle = chi_naive(C, count_guard)
        if oracle != report.final:
            raise InternalInconsistency(
                f"pipeline result {report.final} != naive oracle {oracle}"
            )
    return report

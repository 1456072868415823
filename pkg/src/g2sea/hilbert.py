"""Real-multiplication point counting: arithmetic in Z_F, residues, CRT, pipelines.

For a real quadratic field F of discriminant Delta the real Frobenius psi
lives in Z_F = Z[omega].  A split prime ell = N(beta) with a Frobenius
eigenvalue lambda on a stable order-ell kernel contributes the residue
psi = lambda + q/lambda mod beta; enough residues with N(B) > 16q pin psi
inside the Weil box |Tr| <= 4 sqrt(q), Disc(Z[psi]) <= 4q.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dc_field

from . import ff, genus2, kernel
from .errors import (
    BoundNotMet,
    G2Error,
    GuardExceeded,
    InconsistentResidues,
    InternalInconsistency,
    Ramified,
)
from .frobenius import CharPoly, chi_naive
from .genus2 import Genus2Curve

# Supported real quadratic fields: fundamental discriminant, narrow class
# number 1, fundamental unit of norm -1 precomputed as (a, b) for a + b*omega.
SUPPORTED_DISCRIMINANTS = {5: (0, 1), 8: (1, 1), 13: (1, 1), 17: (3, 2)}


class RealQuadField:
    """Z_F = Z[omega] for F = Q(sqrt(Delta)), Delta a fundamental discriminant.

    omega = (1 + sqrt(Delta))/2 when Delta = 1 mod 4, else sqrt(Delta/4);
    in both cases omega^2 = t*omega + n with t = Tr(omega), n = -N(omega).
    """

    __slots__ = ("delta", "omega_trace", "omega_n")

    def __init__(self, delta: int):
        if delta not in SUPPORTED_DISCRIMINANTS:
            raise G2Error(
                f"discriminant {delta} unsupported; need narrow class number 1 "
                f"with precomputed unit: {sorted(SUPPORTED_DISCRIMINANTS)}"
            )
        self.delta = delta
        if delta % 4 == 1:
            self.omega_trace = 1
            self.omega_n = (delta - 1) // 4
        else:
            self.omega_trace = 0
            self.omega_n = delta // 4

    def elem(self, a: int, b: int) -> "RQElem":
        return RQElem(self, a, b)

    def zero(self):
        return RQElem(self, 0, 0)

    def one(self):
        return RQElem(self, 1, 0)

    def omega(self):
        return RQElem(self, 0, 1)

    def fundamental_unit(self) -> "RQElem":
        a, b = SUPPORTED_DISCRIMINANTS[self.delta]
        return RQElem(self, a, b)

    def __eq__(self, other):
        return isinstance(other, RealQuadField) and self.delta == other.delta

    def __hash__(self):
        return hash(("rqf", self.delta))

    def __repr__(self):
        return f"RealQuadField({self.delta})"


class RQElem:
    """a + b*omega with exact integer coordinates."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: RealQuadField, a: int, b: int):
        self.field = field
        self.a = a
        self.b = b

    def __add__(self, other):
        return RQElem(self.field, self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return RQElem(self.field, self.a - other.a, self.b - other.b)

    def __neg__(self):
        return RQElem(self.field, -self.a, -self.b)

    def __mul__(self, other):
        if isinstance(other, int):
            return RQElem(self.field, self.a * other, self.b * other)
        t, n = self.field.omega_trace, self.field.omega_n
        a, b, c, d = self.a, self.b, other.a, other.b
        return RQElem(self.field, a * c + b * d * n, a * d + b * c + b * d * t)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers only for units; invert manually")
        acc = self.field.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def conj(self) -> "RQElem":
        t = self.field.omega_trace
        return RQElem(self.field, self.a + self.b * t, -self.b)

    def trace(self) -> int:
        return 2 * self.a + self.b * self.field.omega_trace

    def norm(self) -> int:
        t, n = self.field.omega_trace, self.field.omega_n
        return self.a * self.a + self.a * self.b * t - self.b * self.b * n

    def is_totally_positive(self) -> bool:
        return self.trace() > 0 and self.norm() > 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def divides(self, other: "RQElem") -> bool:
        n = self.norm()
        if n == 0:
            return other.is_zero()
        prod = other * self.conj()
        return prod.a % n == 0 and prod.b % n == 0

    def __eq__(self, other):
        return (
            isinstance(other, RQElem)
            and self.field == other.field
            and self.a == other.a
            and self.b == other.b
        )

    def __hash__(self):
        return hash((self.field.delta, self.a, self.b))

    def __repr__(self):
        return f"{self.a}{self.b:+d}*w"


def split_prime(F: RealQuadField, ell: int):
    """Totally positive generators (beta, conj(beta)) with N(beta) = ell, or None.

    None when ell is inert; Ramified when ell | Delta.  The search scans
    a + b*omega in boxes of doubling radius and normalizes the first hit by
    the fundamental unit (norm -1) and sign to total positivity.
    """
    if not ff.is_prime(ell):
        raise G2Error("ell must be prime")
    if F.delta % ell == 0:
        raise Ramified(f"{ell} ramifies in discriminant {F.delta}")
    if ell == 2:
        if F.delta % 8 != 1:
            return None
    elif pow(F.delta % ell, (ell - 1) // 2, ell) != 1:
        return None
    found = None
    bound = max(2, math.isqrt(ell))
    while found is None:
        for b in range(-bound, bound + 1):
            for a in range(-bound, bound + 1):
                x = F.elem(a, b)
                if abs(x.norm()) == ell:
                    found = x
                    break
            if found is not None:
                break
        bound *= 2
        if bound > 64 * (ell + 2):
            raise InternalInconsistency("split prime search exhausted its box")
    x = found
    if x.norm() == -ell:
        eps = F.fundamental_unit()
        if eps.norm() != -1:
            raise InternalInconsistency("fundamental unit must have norm -1")
        x = x * eps
    if x.trace() < 0:
        x = -x
    if not x.is_totally_positive() or x.norm() != ell:
        raise InternalInconsistency("split prime normalization failed")
    return x, x.conj()


def small_trace_generator(F: RealQuadField, beta: RQElem) -> RQElem:
    """The associate beta * eps^(2k) of minimal trace (still totally positive)."""
    if not beta.is_totally_positive():
        raise G2Error("beta must be totally positive")
    eps2 = F.fundamental_unit() ** 2
    best = beta
    cur = beta * eps2
    while cur.trace() < best.trace():
        best, cur = cur, cur * eps2
    # walk the other direction: multiply by conj(eps2)/N(eps2) = eps^-2
    inv = eps2.conj()  # norm 1, so conj is the inverse
    cur = best * inv
    while cur.trace() < best.trace():
        best, cur = cur, cur * inv
    if not best.is_totally_positive():
        raise InternalInconsistency("trace minimization left the positive cone")
    return best


def residue_root(F: RealQuadField, beta: RQElem) -> int:
    """The image t of omega under Z_F/(beta) = Z/ell: the root with a + b t = 0."""
    ell = beta.norm()
    if beta.b % ell == 0:
        raise InternalInconsistency("beta must generate a degree-one prime")
    t = (-beta.a * pow(beta.b, -1, ell)) % ell
    if (t * t - F.omega_trace * t - F.omega_n) % ell != 0:
        raise InternalInconsistency("residue root fails omega's minimal polynomial")
    return t


def reduce_mod_beta(x: RQElem, beta: RQElem) -> int:
    ell = beta.norm()
    t = residue_root(x.field, beta)
    return (x.a + x.b * t) % ell


@dataclass(frozen=True)
class RMResidue:
    """psi = r mod beta, coming from the eigenvalue lam on a beta-kernel."""

    beta: RQElem
    ell: int
    lam: int | None
    residue: int

    def __repr__(self):
        return f"({self.residue} mod {self.ell}; beta={self.beta})"


def residue_from_eigenvalue(
    F: RealQuadField, lam: int, q: int, beta: RQElem
) -> RMResidue:
    """psi = lambda + q/lambda mod beta under Z_F/(beta) = Z/ell."""
    ell = beta.norm()
    if not ff.is_prime(ell):
        raise G2Error("beta must have prime norm")
    if lam % ell == 0 or q % ell == 0:
        raise G2Error("lambda and q must be invertible mod ell")
    r = (lam + q * pow(lam, -1, ell)) % ell
    return RMResidue(beta=beta, ell=ell, lam=lam % ell, residue=r)


class RMClass:
    """A residue class psi mod the ideal (prod beta_i), canonically represented."""

    __slots__ = ("field", "rep", "gen", "modulus_norm")

    def __init__(self, field: RealQuadField, rep: RQElem, gen: RQElem):
        self.field = field
        self.gen = gen
        self.modulus_norm = abs(gen.norm())
        self.rep = self._canonicalize(rep)

    def _lattice_rows(self):
        g = self.gen
        gw = g * self.field.omega()
        return (g.a, g.b), (gw.a, gw.b)

    def _canonicalize(self, x: RQElem) -> RQElem:
        # Hermite-reduce (x.a, x.b) modulo the lattice spanned by gen, gen*omega
        (a1, b1), (a2, b2) = self._lattice_rows()
        # integer row ops: bring to (h11, 0), (h21, h22) with h22 = gcd(b1, b2)
        r1, r2 = (a1, b1), (a2, b2)
        while r2[1] != 0:
            qq = r1[1] // r2[1]
            r1, r2 = r2, (r1[0] - qq * r2[0], r1[1] - qq * r2[1])
        h21, h22 = r1
        h11 = abs(r2[0])
        if h11 == 0 or h22 == 0:
            raise InternalInconsistency("degenerate ideal lattice")
        b = x.b % h22
        t = (x.b - b) // h22
        a = x.a - t * h21
        a %= h11
        return self.field.elem(a, b)

    def reduce(self, beta: RQElem) -> int:
        return reduce_mod_beta(self.rep, beta)

    def same_class(self, y: RQElem) -> bool:
        return self.gen.divides(y - self.rep)

    def small_representative(self, limit: int | None = None) -> RQElem:
        """Scan representatives minimizing (max(|a|,|b|), |a|+|b|, a, b)."""
        (a1, b1), (a2, b2) = self._lattice_rows()
        if limit is None:
            limit = 2 * math.isqrt(self.modulus_norm) + 2
        best = None
        det = a1 * b2 - a2 * b1
        for b in range(self.rep.b - limit, self.rep.b + limit + 1):
            # solve rep + s*(a1,b1) + t*(a2,b2) with b-component = b
            g = ff.gcd_int(b1, b2)
            if (b - self.rep.b) % g != 0:
                continue
            # one solution of s*b1 + t*b2 = b - rep.b
            gg, s0, t0 = _xgcd_int(b1, b2)
            k = (b - self.rep.b) // g
            s, t = s0 * k, t0 * k
            a_base = self.rep.a + s * a1 + t * a2
            # kernel direction of the b-component: (b2/g, -b1/g)
            step = (b2 // g) * a1 - (b1 // g) * a2
            if step == 0:
                candidates = [a_base]
            else:
                st = abs(step)
                a_mod = a_base % st
                candidates = [a_mod, a_mod - st]
            for a in candidates:
                if abs(a) > limit:
                    continue
                cand = self.field.elem(a, b)
                keyc = (max(abs(a), abs(b)), abs(a) + abs(b), a, b)
                if best is None or keyc < best[0]:
                    best = (keyc, cand)
        if best is None:
            return self.rep
        if abs(det) != self.modulus_norm:
            raise InternalInconsistency("lattice determinant mismatch")
        return best[1]

    def __repr__(self):
        return f"RMClass({self.rep} mod ({self.gen}), N={self.modulus_norm})"


def _xgcd_int(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def rm_crt(F: RealQuadField, residues: list[RMResidue]) -> RMClass:
    """CRT in Z_F for residues at pairwise non-associate primes of distinct norms."""
    if not residues:
        raise G2Error("empty residue list")
    norms = [r.ell for r in residues]
    if len(set(norms)) != len(norms):
        raise G2Error("duplicated norms; merge conjugate residues first")
    for r in residues:
        if not ff.is_prime(r.ell):
            raise G2Error("residue moduli must have prime norm")
    c, _ = ff.integer_crt([(r.residue, r.ell) for r in residues])
    gen = F.one()
    for r in residues:
        gen = gen * r.beta
    cls = RMClass(F, F.elem(c, 0), gen)
    for r in residues:
        if cls.reduce(r.beta) != r.residue:
            raise InternalInconsistency("CRT class fails a defining congruence")
    return cls


def weil_box(F: RealQuadField, q: int):
    """All x + y*omega with |Tr| <= 4 sqrt(q) and Disc(Z[psi]) = y^2 Delta <= 4q."""
    t = F.omega_trace
    tr_bound = math.isqrt(16 * q)
    y_bound = math.isqrt(4 * q // F.delta)
    out = []
    for y in range(-y_bound, y_bound + 1):
        lo = -(tr_bound + y * t) // 2
        hi = (tr_bound - y * t) // 2
        for x in range(lo - 1, hi + 2):
            tr = 2 * x + y * t
            if tr * tr <= 16 * q and y * y * F.delta <= 4 * q:
                out.append(F.elem(x, y))
    return out


def reconstruct_psi(F: RealQuadField, residues: list[RMResidue], q: int) -> RQElem:
    """The unique psi in the Weil box matching all residues, for N(B) > 16q.

    Raises BoundNotMet when the norm product is too small, and
    InconsistentResidues when nothing in the box matches (a wrong eigenvalue
    or beta assignment upstream).  Two matches would contradict uniqueness
    and are a hard error.
    """
    nb = 1
    for r in residues:
        nb *= r.ell
    if nb <= 16 * q:
        raise BoundNotMet(f"N(B) = {nb} <= 16q = {16 * q}")
    cands = []
    for psi in weil_box(F, q):
        if all(reduce_mod_beta(psi, r.beta) == r.residue for r in residues):
            cands.append(psi)
    if not cands:
        raise InconsistentResidues("no Weil-box element matches the residues")
    if len(cands) > 1:
        raise InternalInconsistency(
            f"uniqueness violated with N(B) = {nb} > 16q: {cands}"
        )
    return cands[0]


@dataclass(frozen=True)
class XiPoly:
    """xi = X^2 - s1 X + s2, the characteristic polynomial of the real Frobenius."""

    s1: int
    s2: int

    def discriminant(self) -> int:
        return self.s1 * self.s1 - 4 * self.s2

    def validate(self, q: int) -> "XiPoly":
        if self.discriminant() < 0:
            raise G2Error("xi must be totally real: s1^2 - 4 s2 >= 0")
        if self.s1 * self.s1 > 16 * q:
            raise G2Error("|Tr(psi)| <= 4 sqrt(q) violated")
        if self.discriminant() > 4 * q:
            raise G2Error("Disc(Z[psi]) <= 4q violated")
        return self

    def to_json(self):
        return {"s1": self.s1, "s2": self.s2}


def psi_to_xi(psi: RQElem) -> XiPoly:
    return XiPoly(psi.trace(), psi.norm())


def chi_from_xi(xi: XiPoly, q: int) -> CharPoly:
    """chi from xi: s1 = Tr(psi), s2 = N(psi); full Weil-Rueck validation."""
    xi.validate(q)
    return CharPoly(q, xi.s1, xi.s2).validate()


# ----------------------------------------------------------------------
# Pipeline
# ----------------------------------------------------------------------


@dataclass
class HilbertRow:
    ell: int
    status: str
    reason: str
    beta: str = ""
    lambdas: tuple = ()
    residues: tuple = ()
    micros: int = 0

    def to_json(self):
        return {
            "ell": self.ell,
            "status": self.status,
            "reason": self.reason,
            "beta": self.beta,
            "lambdas": list(self.lambdas),
            "residues": list(self.residues),
            "micros": self.micros,
        }


@dataclass
class HilbertReport:
    q: int
    delta: int
    target: int
    rows: list = dc_field(default_factory=list)
    psi: RQElem | None = None
    xi: XiPoly | None = None
    final: CharPoly | None = None
    n_split: int = 0
    n_elkies: int = 0

    def elkies_fraction(self):
        from fractions import Fraction

        if self.n_split == 0:
            return None
        return Fraction(self.n_elkies, self.n_split)

    def to_json(self):
        frac = self.elkies_fraction()
        return {
            "mode": "hilbert",
            "q": self.q,
            "delta": self.delta,
            "target": self.target,
            "rows": [r.to_json() for r in self.rows],
            "psi": str(self.psi) if self.psi else None,
            "xi": self.xi.to_json() if self.xi else None,
            "final": self.final.to_json() if self.final else None,
            "split_primes_seen": self.n_split,
            "elkies_primes": self.n_elkies,
            "elkies_fraction": str(frac) if frac is not None else None,
            "elkies_reference": "1/2",
        }


def _assignment_options(beta, betabar, residues):
    rs = sorted(residues)
    if len(rs) == 2:
        r1, r2 = rs
        return [
            ((r1, beta), (r2, betabar)),
            ((r2, beta), (r1, betabar)),
        ]
    r = rs[0]
    return [((r, beta),), ((r, betabar),), ((r, beta), (r, betabar))]


def _try_reconstruct(F, constraints, q):
    """Enumerate beta/conj-beta assignments, intersect candidate psi sets."""
    option_lists = [
        _assignment_options(beta, betabar, rs) for beta, betabar, rs in constraints
    ]

    def combos(idx):
        if idx == len(option_lists):
            yield []
            return
        for opt in option_lists[idx]:
            for rest in combos(idx + 1):
                yield list(opt) + rest

    candidates = {}
    for combo in combos(0):
        nb = 1
        residues = []
        for r, beta in combo:
            nb *= beta.norm()
            residues.append(RMResidue(beta=beta, ell=beta.norm(), lam=None, residue=r))
        if nb <= 16 * q:
            continue
        try:
            psi = reconstruct_psi(F, residues, q)
        except (InconsistentResidues, BoundNotMet):
            continue
        candidates[(psi.a, psi.b)] = psi
    # strong filter: psi must explain every observed residue set
    good = []
    for psi in candidates.values():
        ok = True
        for beta, betabar, rs in constraints:
            pair = {reduce_mod_beta(psi, beta), reduce_mod_beta(psi, betabar)}
            if not set(rs) <= pair:
                ok = False
                break
        if ok:
            good.append(psi)
    by_xi = {}
    for psi in good:
        by_xi[(psi.trace(), psi.norm())] = psi
    if len(by_xi) == 1:
        return next(iter(by_xi.values()))
    return None


def pipeline_count_hilbert(
    C: Genus2Curve,
    F: RealQuadField,
    provider,
    ell_max: int = 60,
    verify: bool = False,
    count_guard: int = genus2.COUNT_GUARD_DEFAULT,
    jobs: int = 1,
) -> HilbertReport:
    """RM point counting: eigenvalues on stable order-ell kernels at split primes.

    beta/conj(beta) assignment ambiguity is resolved by trying both per prime
    and intersecting candidate psi sets; reconstruction triggers once the
    guaranteed norm product exceeds 16q and succeeds when exactly one xi
    survives.  jobs > 1 fetches kernels for several split primes at a time
    with a deterministic in-order merge.
    """
    from .siegel import _fetch_waves

    q = C.q
    target = 16 * q
    report = HilbertReport(q=q, delta=F.delta, target=target)
    constraints = []
    guaranteed = 1
    split_info = {}
    ells = []
    for ell in ff.primes_upto(ell_max):
        if q % ell == 0 or F.delta % ell == 0:
            continue
        ells.append(ell)
        split_info[ell] = split_prime(F, ell)
    split_ells = [ell for ell in ells if split_info[ell] is not None]
    for ell, fetched in _fetch_waves(
        split_ells, lambda l: provider.hilbert_kernels(C, l), jobs
    ):
        t0 = time.perf_counter()
        for skipped in [e for e in ells if e < ell and split_info[e] is None]:
            if not any(r.ell == skipped for r in report.rows):
                report.rows.append(
                    HilbertRow(ell=skipped, status="skipped", reason="inert")
                )
        row = HilbertRow(ell=ell, status="skipped", reason="")
        report.rows.append(row)
        pair = split_info[ell]
        beta = small_trace_generator(F, pair[0])
        betabar = beta.conj()
        row.beta = repr(beta)
        report.n_split += 1
        if isinstance(fetched, GuardExceeded):
            row.reason = f"guard: {fetched}"
            row.micros = int((time.perf_counter() - t0) * 1e6)
            continue
        kernels = fetched
        if not kernels:
            row.reason = "not Elkies (no stable order-ell kernel)"
            row.micros = int((time.perf_counter() - t0) * 1e6)
            continue
        lambdas = []
        residues = set()
        for S in kernels:
            lam = kernel.eigenvalue_on_kernel(C, S, q, ell)
            lambdas.append(lam)
            residues.add(residue_from_eigenvalue(F, lam, q, beta).residue)
        report.n_elkies += 1
        row.status = "used"
        row.reason = "elkies"
        row.lambdas = tuple(sorted(set(lambdas)))
        row.residues = tuple(sorted(residues))
        row.micros = int((time.perf_counter() - t0) * 1e6)
        constraints.append((beta, betabar, tuple(sorted(residues))))
        guaranteed *= ell ** min(len(residues), 2)
        if guaranteed > target:
            psi = _try_reconstruct(F, constraints, q)
            if psi is not None:
                report.psi = psi
                report.xi = psi_to_xi(psi)
                report.final = chi_from_xi(report.xi, q)
                break
    if verify and report.final is not None:
        oracle = chi_naive(C, count_guard)
        if oracle != report.final:
            raise InternalInconsistency(
                f"pipeline result {report.final} != naive oracle {oracle}"
            )
    return report

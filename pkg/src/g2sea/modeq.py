"""Modular-equation data files, specialization, and kernel providers.

The file format is line-oriented text.  A header names the kind, the level
and the invariant normalization the data was computed in:

    kind=siegel-igusa;level=2;norm=icl-v1
    num 1: 0 0 0 15 : 1
    num 2: 1 2 0 3 : -42
    den: 0 0 0 : 1

Each ``num k`` line is one monomial of the numerator of Psi_k: the exponent
vector lists the invariant variables (three for Igusa kinds, two for
Gundlach) followed by the exponent of X, then the integer coefficient.  The
``den`` lines carry the common denominator, which has no X.  Hilbert levels
are written a,b,delta for beta = a + b*omega in discriminant delta.

No genuine modular-equation coefficients ship with the package (the
evaluation algorithms producing them are a separate artifact); the format
exists so external databases can be imported, and the evaluation path is
validated on synthetic data.  The brute-force kernel provider stands in for
the modular-equation route at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import ff, frobenius, genus2, hilbert, kernel, siegel
from .errors import (
    DenominatorVanishes,
    G2Error,
    GuardExceeded,
    InternalInconsistency,
    ValidationError,
)
from .ff import FieldElement, UniPoly
from .genus2 import Genus2Curve

KIND_NVARS = {"siegel-igusa": 3, "hilbert-igusa": 3, "hilbert-gundlach": 2}
KIND_NPSI = {"siegel-igusa": 3, "hilbert-igusa": 3, "hilbert-gundlach": 2}


def _level_degree(kind: str, level) -> int:
    if kind == "siegel-igusa":
        ell = level
        return ell**3 + ell**2 + ell + 1
    a, b, delta = level
    F = hilbert.RealQuadField(delta)
    n = F.elem(a, b).norm()
    if n <= 0 or not ff.is_prime(n):
        raise ValidationError(f"level beta = {a}+{b}*w must have positive prime norm")
    return n + 1


@dataclass(frozen=True)
class ModEqData:
    """Parsed modular equations: numerators of Psi_k plus a common denominator."""

    kind: str
    level: object
    norm: str
    nums: tuple
    den: dict

    @property
    def nvars(self) -> int:
        return KIND_NVARS[self.kind]

    @property
    def npsi(self) -> int:
        return KIND_NPSI[self.kind]

    def degree(self) -> int:
        """The covering degree d(level) that pins deg_X Psi_1."""
        return _level_degree(self.kind, self.level)

    def deg_x(self, k: int) -> int:
        num = self.nums[k - 1]
        return max((mono[-1] for mono in num), default=-1)

    def total_deg_invariants(self, k: int | None) -> int:
        src = self.den if k is None else self.nums[k - 1]
        if k is None:
            return max((sum(mono) for mono in src), default=-1)
        return max((sum(mono[:-1]) for mono in src), default=-1)

    def validate(self) -> "ModEqData":
        if self.kind not in KIND_NVARS:
            raise ValidationError(f"unknown kind {self.kind!r}")
        if not self.den or all(c == 0 for c in self.den.values()):
            raise ValidationError("denominator must be nonzero")
        d = self.degree()
        for k in range(1, self.npsi + 1):
            want = d if k == 1 else d - 1
            got = self.deg_x(k)
            if got != want:
                raise ValidationError(
                    f"deg_X Psi_{k} = {got}, but the degree theorem for "
                    f"{self.kind} requires exactly {want} (d(level) = {d})"
                )
        if self.kind == "siegel-igusa":
            for k in range(1, 4):
                bound_num = 5 * d if k == 1 else 10 * d
                t = max(self.total_deg_invariants(k), self.total_deg_invariants(None))
                if 3 * t > bound_num:
                    raise ValidationError(
                        f"total degree of Psi_{k} in the invariants is {t}, "
                        f"above the theorem bound {bound_num}/3"
                    )
        elif self.kind == "hilbert-gundlach":
            for k in range(1, 3):
                t = max(self.total_deg_invariants(k), self.total_deg_invariants(None))
                if 3 * t > 10 * d:
                    raise ValidationError(
                        f"total degree of Psi_{k} in (G1, G2) is {t}, "
                        f"above the theorem bound {10 * d}/3"
                    )
        # hilbert-igusa total degrees are only O_F(ell); no explicit constant
        return self


def _format_level(level) -> str:
    if isinstance(level, tuple):
        return ",".join(str(x) for x in level)
    return str(level)


def _parse_level(kind: str, text: str):
    if kind == "siegel-igusa":
        ell = int(text)
        if not ff.is_prime(ell):
            raise ValidationError(f"siegel level {ell} must be prime")
        return ell
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 3:
        raise ValidationError("hilbert level must be a,b,delta")
    return tuple(parts)


def parse_modeq(text: str) -> ModEqData:
    header = None
    nums: list[dict] = []
    den: dict = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            fields = dict(kv.split("=", 1) for kv in line.split(";"))
            try:
                kind = fields["kind"]
                level = _parse_level(kind, fields["level"])
                norm = fields["norm"]
            except (KeyError, ValueError) as exc:
                raise ValidationError(f"bad header {line!r}: {exc}") from exc
            if kind not in KIND_NVARS:
                raise ValidationError(f"unknown kind {kind!r}")
            header = (kind, level, norm)
            nums = [dict() for _ in range(KIND_NPSI[kind])]
            continue
        kind, level, norm = header
        nvars = KIND_NVARS[kind]
        try:
            head, coeff_s = line.rsplit(":", 1)
            coeff = int(coeff_s)
            tag, exps_s = head.split(":", 1)
            exps = tuple(int(x) for x in exps_s.split())
        except ValueError as exc:
            raise ValidationError(f"bad data line {line!r}") from exc
        if tag.strip() == "den":
            if len(exps) != nvars:
                raise ValidationError(f"den monomial needs {nvars} exponents")
            if coeff:
                den[exps] = den.get(exps, 0) + coeff
        elif tag.strip().startswith("num"):
            k = int(tag.strip().split()[1])
            if not 1 <= k <= KIND_NPSI[kind]:
                raise ValidationError(f"num index {k} out of range")
            if len(exps) != nvars + 1:
                raise ValidationError(f"num monomial needs {nvars + 1} exponents")
            if coeff:
                nums[k - 1][exps] = nums[k - 1].get(exps, 0) + coeff
        else:
            raise ValidationError(f"unknown line tag {tag!r}")
    if header is None:
        raise ValidationError("missing header line")
    kind, level, norm = header
    data = ModEqData(
        kind=kind,
        level=level,
        norm=norm,
        nums=tuple(nums),
        den=den,
    )
    return data.validate()


def serialize_modeq(data: ModEqData) -> str:
    lines = [
        f"kind={data.kind};level={_format_level(data.level)};norm={data.norm}"
    ]
    for k in range(1, data.npsi + 1):
        for mono in sorted(data.nums[k - 1]):
            c = data.nums[k - 1][mono]
            if c:
                lines.append(f"num {k}: {' '.join(map(str, mono))} : {c}")
    for mono in sorted(data.den):
        c = data.den[mono]
        if c:
            lines.append(f"den: {' '.join(map(str, mono))} : {c}")
    return "\n".join(lines) + "\n"


def load_modeq(path) -> ModEqData:
    return parse_modeq(Path(path).read_text())


def save_modeq(data: ModEqData, path) -> None:
    Path(path).write_text(serialize_modeq(data))


# ----------------------------------------------------------------------
# Specialization
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class EvaluatedModEq:
    """Psi_k specialized at a point: univariate polynomials in X.

    Coefficients are Fractions (rational point) or FieldElements.  dpsi1 is
    the X-derivative of Psi_1, the quantity the isogeny route divides by.
    """

    kind: str
    level: object
    psi: tuple
    dpsi1: tuple
    den_value: object

    def domain_field(self):
        c = self.psi[0][0]
        return c.field if isinstance(c, FieldElement) else None


def evaluate_at(data: ModEqData, point) -> EvaluatedModEq:
    """Specialize the three fractions at a tuple of invariants.

    The point entries are Fractions (or ints) for the rational path, or
    FieldElements of a common field.  Direct substitution, exact arithmetic.
    """
    point = tuple(point)
    if len(point) != data.nvars:
        raise G2Error(f"{data.kind} needs {data.nvars} invariant coordinates")
    fieldish = [c for c in point if isinstance(c, FieldElement)]
    if fieldish:
        field = fieldish[0].field
        point = tuple(field(c) if not isinstance(c, FieldElement) else c for c in point)
        lift = lambda n: field(n)
        zero = field.zero()
    else:
        point = tuple(Fraction(c) for c in point)
        lift = Fraction
        zero = Fraction(0)

    def mono_value(exps):
        acc = lift(1)
        for c, e in zip(point, exps):
            acc = acc * c**e
        return acc

    den_value = zero
    for exps, coeff in data.den.items():
        den_value = den_value + lift(coeff) * mono_value(exps)
    if den_value == zero:
        raise DenominatorVanishes(
            f"denominator of {data.kind} level {_format_level(data.level)} "
            f"vanishes at the point"
        )
    psis = []
    for k in range(1, data.npsi + 1):
        dx = data.deg_x(k)
        coeffs = [zero] * (dx + 1)
        for exps, coeff in data.nums[k - 1].items():
            coeffs[exps[-1]] = coeffs[exps[-1]] + lift(coeff) * mono_value(exps[:-1])
        psis.append(tuple(c / den_value for c in coeffs))
    dpsi1 = tuple(psis[0][i] * i for i in range(1, len(psis[0])))
    return EvaluatedModEq(
        kind=data.kind, level=data.level, psi=tuple(psis), dpsi1=dpsi1,
        den_value=den_value,
    )


@dataclass(frozen=True)
class IsogenousSet:
    """Roots of Psi_1 expanded to invariant tuples; double roots set aside."""

    tuples: tuple
    degenerate: tuple  # (j1', multiplicity) pairs


def isogenous_invariants(e: EvaluatedModEq) -> IsogenousSet:
    """Invariants of the isogenous surfaces from the specialized system.

    For each simple root x0 of Psi_1 over the field, the remaining
    coordinates are Psi_k(x0) / Psi_1'(x0).  Multiple roots are reported as
    degenerate (several isogenous surfaces sharing a first coordinate).
    """
    field = e.domain_field()
    if field is None:
        raise G2Error("isogenous invariants are extracted over a finite field")
    psi1 = UniPoly(field, list(e.psi[0]))
    dpsi1 = UniPoly(field, list(e.dpsi1))
    roots = ff.poly_roots_in_field(psi1)
    mult: dict = {}
    for r in roots:
        mult[r] = mult.get(r, 0) + 1
    tuples = []
    degenerate = []
    for r in sorted(mult, key=field.index_of):
        if mult[r] > 1:
            degenerate.append((r, mult[r]))
            continue
        dv = dpsi1(r)
        if dv.is_zero():
            raise InternalInconsistency("simple root with vanishing derivative")
        rest = [UniPoly(field, list(c))(r) / dv for c in e.psi[1:]]
        tuples.append(tuple([r] + rest))
    return IsogenousSet(tuples=tuple(tuples), degenerate=tuple(degenerate))


# ----------------------------------------------------------------------
# Kernel providers
# ----------------------------------------------------------------------


class OracleKernelProvider:
    """Brute-force kernels from explicit torsion, standing in for modular equations.

    Siegel: realizes every Frobenius-stable Lagrangian plane of A[ell] as a
    point subgroup (at most d(ell) of them).  Hilbert: one stable order-ell
    line per distinct Frobenius eigenvalue (at most ell + 1).  Consults the
    naive chi internally, which is what makes it an oracle.
    """

    def __init__(
        self,
        seed: int = 0,
        degree_guard: int = frobenius.DEGREE_GUARD_DEFAULT,
        table_limit: int = 2800,
        count_guard: int = genus2.COUNT_GUARD_DEFAULT,
    ):
        self.seed = seed
        self.degree_guard = degree_guard
        self.table_limit = table_limit
        self.count_guard = count_guard
        self._chi_cache: dict = {}
        self._basis_cache: dict = {}

    def chi(self, C: Genus2Curve) -> frobenius.CharPoly:
        if C not in self._chi_cache:
            self._chi_cache[C] = frobenius.chi_naive(C, self.count_guard)
        return self._chi_cache[C]

    def torsion(self, C: Genus2Curve, ell: int) -> frobenius.TorsionBasis:
        key = (C, ell)
        if key not in self._basis_cache:
            self._basis_cache[key] = frobenius.torsion_basis(
                C, self.chi(C), ell, seed=self.seed, degree_guard=self.degree_guard
            )
        return self._basis_cache[key]

    def siegel_kernels(self, C: Genus2Curve, ell: int):
        if ell**4 > self.table_limit:
            raise GuardExceeded(
                f"span table of size {ell}^4 exceeds the oracle limit"
            )
        basis = self.torsion(C, ell)
        M = frobenius.frob_matrix(C, basis)
        J = frobenius.pairing_gram(basis, seed=self.seed)
        if not M.verify_multiplier(J):
            raise InternalInconsistency("Frobenius matrix fails the multiplier identity")
        planes = siegel.enumerate_stable_lagrangians(M.mat, J, ell)
        out = []
        for v, w in planes:
            pts = []
            for a in range(ell):
                for b in range(ell):
                    coords = tuple(
                        (a * v[i] + b * w[i]) % ell for i in range(4)
                    )
                    pts.append(basis.combination(coords))
            S = kernel.SubgroupPoints(basis.curve, pts, basis.q)
            if not S.galois_stable:
                raise InternalInconsistency("stable plane realized unstably")
            out.append(S)
        return out

    def hilbert_kernels(self, C: Genus2Curve, ell: int):
        chi = self.chi(C)
        chil = chi.reduce(ell)
        roots = sorted(
            {r.val for r in ff.poly_roots_in_field(chil)}
        )
        if not roots:
            return []
        lines = []
        guard_hit = None
        for lam in roots:
            try:
                lines.append(
                    frobenius.stable_eigenline(
                        C, chi, ell, lam, seed=self.seed, degree_guard=self.degree_guard
                    )
                )
            except GuardExceeded as e:
                guard_hit = e
        if not lines and guard_hit is not None:
            raise guard_hit
        return lines


class ModeqScreeningProvider:
    """Per-ell screening through modular-equation data files.

    Evaluates the equations at the curve's invariants and skips ell when no
    isogenous invariants exist (the paper's root test).  Producing an actual
    kernel from a root requires the explicit-isogeny algorithm, which is out
    of scope here, so kernels come from an inner provider (normally the
    brute-force oracle); without one, detected-Elkies primes are reported as
    skipped.
    """

    def __init__(self, directory, inner=None, delta: int | None = None):
        self.directory = Path(directory)
        self.inner = inner
        self.delta = delta

    def _data_path(self, kind: str, level) -> Path:
        return self.directory / f"{kind}-{_format_level(level)}.modeq"

    def _screen(self, C: Genus2Curve, kind: str, level):
        path = self._data_path(kind, level)
        if not path.exists():
            raise GuardExceeded(f"no modular-equation data file {path.name}")
        data = load_modeq(path)
        if data.norm != genus2.IGUSA_NORMALIZATION:
            raise ValidationError(
                f"data file {path.name} uses normalization {data.norm!r}, "
                f"this build computes {genus2.IGUSA_NORMALIZATION!r}"
            )
        inv = genus2.igusa_invariants(C)
        if not inv.defined:
            raise GuardExceeded(
                "curve lies on the singular locus of the invariants; "
                "coordinate changes are not implemented, skipping"
            )
        try:
            ev = evaluate_at(data, inv.triple())
        except DenominatorVanishes as e:
            raise GuardExceeded(str(e)) from e
        return isogenous_invariants(ev)

    def siegel_kernels(self, C: Genus2Curve, ell: int):
        iso = self._screen(C, "siegel-igusa", ell)
        if not iso.tuples and not iso.degenerate:
            return []
        if self.inner is None:
            raise GuardExceeded(
                "modular equations detect an isogeny but the kernel route "
                "(explicit isogenies) is out of scope; no inner provider"
            )
        return self.inner.siegel_kernels(C, ell)

    def hilbert_kernels(self, C: Genus2Curve, ell: int):
        if self.delta is None:
            raise GuardExceeded("no discriminant configured for Hilbert screening")
        F = hilbert.RealQuadField(self.delta)
        pair = hilbert.split_prime(F, ell)
        if pair is None:
            return []
        beta = hilbert.small_trace_generator(F, pair[0])
        iso = None
        for cand in (beta, beta.conj()):
            path = self._data_path("hilbert-igusa", (cand.a, cand.b, self.delta))
            if path.exists():
                iso = self._screen(C, "hilbert-igusa", (cand.a, cand.b, self.delta))
                break
        if iso is None:
            raise GuardExceeded(
                f"no hilbert-igusa data file for beta over {ell}"
            )
        if not iso.tuples and not iso.degenerate:
            return []
        if self.inner is None:
            raise GuardExceeded(
                "modular equations detect an isogeny but the kernel route "
                "(explicit isogenies) is out of scope; no inner provider"
            )
        return self.inner.hilbert_kernels(C, ell)

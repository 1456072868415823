"""Modular-equation files: parsing, degree validation, evaluation, providers."""

import random
from fractions import Fraction

import pytest

from g2sea import ff, genus2, modeq, siegel
from g2sea.errors import DenominatorVanishes, GuardExceeded, ValidationError
from g2sea.ff import PrimeField

from conftest import SIEGEL_E2E_CURVES, make_curve

SIEGEL_FIXTURE_POINT = (
    Fraction(159, 239),
    Fraction(-19, 28),
    Fraction(-193, 246),
)
GUNDLACH_FIXTURE_POINT = (Fraction(-117, 64), Fraction(-199, 172))


def _interp_integer_data(kind, level, roots, planted):
    """Synthetic data with Psi_1 = prod (X - r) and planted isogenous tuples.

    planted maps each simple root r to the remaining coordinates; Psi_k is
    the interpolation of planted[r][k] * Psi_1'(r) through all roots, cleared
    to integer coefficients by a common constant denominator.
    """
    nvars = modeq.KIND_NVARS[kind]
    npsi = modeq.KIND_NPSI[kind]
    d = len(roots)
    psi1 = [Fraction(1)]
    for r in roots:
        psi1 = [  # multiply by (X - r)
            (psi1[i - 1] if i > 0 else 0) - r * (psi1[i] if i < len(psi1) else 0)
            for i in range(len(psi1) + 1)
        ]
    dpsi1 = [i * psi1[i] for i in range(1, len(psi1))]

    def eval_poly(cs, x):
        acc = Fraction(0)
        for c in reversed(cs):
            acc = acc * x + c
        return acc

    simple = [r for r in roots if roots.count(r) == 1]
    psis = [psi1]
    for k in range(2, npsi + 1):
        pts = []
        for r in set(roots):
            if r in simple:
                target = planted[r][k - 2] * eval_poly(dpsi1, r)
            else:
                target = Fraction(0)
            pts.append((Fraction(r), target))
        # pad with extra nodes so the interpolation has degree exactly d - 1
        extra = 0
        while len(pts) < d:
            extra += 1
            node = Fraction(max(roots) + extra)
            pts.append((node, Fraction((-1) ** extra * (extra + 2))))
        coeffs = [Fraction(0)] * d
        for i, (xi, yi) in enumerate(pts):
            num = [Fraction(1)]
            den = Fraction(1)
            for j, (xj, _) in enumerate(pts):
                if i == j:
                    continue
                num = [
                    (num[t - 1] if t > 0 else 0) - xj * (num[t] if t < len(num) else 0)
                    for t in range(len(num) + 1)
                ]
                den *= xi - xj
            for t in range(len(num)):
                coeffs[t] += num[t] * yi / den
        if coeffs[d - 1] == 0:
            coeffs[d - 1] = Fraction(1, 7)  # keep deg_X exactly d - 1
        psis.append(coeffs)
    denom = 1
    for cs in psis:
        for c in cs:
            denom = denom * c.denominator // ff.gcd_int(denom, c.denominator)
    nums = []
    for cs in psis:
        mono = {}
        for e, c in enumerate(cs):
            v = int(c * denom)
            if v:
                mono[(0,) * nvars + (e,)] = v
        nums.append(mono)
    den = {(0,) * nvars: denom}
    return modeq.ModEqData(kind=kind, level=level, norm=genus2.IGUSA_NORMALIZATION,
                           nums=tuple(nums), den=den).validate()


def _siegel_level2_roots():
    return list(range(1, 16))  # 15 = d(2) distinct integer roots


def test_synthetic_level2_accepted_and_roundtrip(tmp_path):
    roots = _siegel_level2_roots()
    planted = {r: (Fraction(r + 1, 2), Fraction(3 - r, 5)) for r in roots}
    data = _interp_integer_data("siegel-igusa", 2, roots, planted)
    assert data.degree() == 15 and data.deg_x(1) == 15
    text = modeq.serialize_modeq(data)
    again = modeq.parse_modeq(text)
    assert again == data
    assert modeq.serialize_modeq(again) == text  # canonical fixed point
    path = tmp_path / "siegel-igusa-2.modeq"
    modeq.save_modeq(data, path)
    assert modeq.load_modeq(path) == data


def test_degree_bound_violations_rejected():
    roots = _siegel_level2_roots()
    planted = {r: (Fraction(1), Fraction(2)) for r in roots}
    data = _interp_integer_data("siegel-igusa", 2, roots, planted)
    # drop the X^15 monomial of Psi_1: deg_X becomes 14, violating d(2) = 15
    nums = list(data.nums)
    n1 = dict(nums[0])
    n1.pop((0, 0, 0, 15))
    nums[0] = n1
    broken = modeq.ModEqData(kind=data.kind, level=2, norm=data.norm,
                             nums=tuple(nums), den=data.den)
    with pytest.raises(ValidationError, match="deg_X"):
        broken.validate()
    # a total-degree violation in the invariants: 3 * t > 5 * d for Psi_1
    n1 = dict(data.nums[0])
    n1[(26, 0, 0, 0)] = 1  # total degree 26 > 5 * 15 / 3 = 25
    broken2 = modeq.ModEqData(kind=data.kind, level=2, norm=data.norm,
                              nums=(n1,) + data.nums[1:], den=data.den)
    with pytest.raises(ValidationError, match="total degree"):
        broken2.validate()


def test_header_and_line_errors():
    with pytest.raises(ValidationError):
        modeq.parse_modeq("kind=nope;level=2;norm=x\n")
    with pytest.raises(ValidationError):
        modeq.parse_modeq("kind=siegel-igusa;level=4;norm=x\n")  # level not prime
    with pytest.raises(ValidationError):
        modeq.parse_modeq("")
    good_header = "kind=siegel-igusa;level=2;norm=icl-v1\n"
    with pytest.raises(ValidationError):
        modeq.parse_modeq(good_header + "num 1: 1 2 3 : x\n")
    with pytest.raises(ValidationError):
        modeq.parse_modeq(good_header + "num 9: 0 0 0 1 : 3\n")


def test_hilbert_gundlach_level_degrees():
    # beta = 3 + omega over delta 5 has norm 11, so d(beta) = 12
    roots = list(range(12))
    planted = {r: (Fraction(2 * r - 3, 4),) for r in roots}
    data = _interp_integer_data("hilbert-gundlach", (3, 1, 5), roots, planted)
    assert data.degree() == 12
    assert data.deg_x(1) == 12 and data.deg_x(2) == 11
    with pytest.raises(ValidationError):
        modeq.ModEqData(kind="hilbert-gundlach", level=(2, 0, 5), norm="icl-v1",
                        nums=data.nums, den=data.den).validate()  # norm 4 not prime


def test_evaluate_at_rational_fixtures():
    roots = _siegel_level2_roots()
    planted = {r: (Fraction(r), Fraction(-r)) for r in roots}
    data = _interp_integer_data("siegel-igusa", 2, roots, planted)
    ev = modeq.evaluate_at(data, SIEGEL_FIXTURE_POINT)
    assert all(isinstance(c, Fraction) for c in ev.psi[0])
    # the synthetic data has no invariant dependence, so Psi_1 is the same
    # polynomial; the fixture exercises the rational path exactly
    assert ev.psi[0][-1] != 0 and len(ev.psi[0]) == 16
    # round-trip the fixture point through the text format
    text = genus2.format_invariant_triple(SIEGEL_FIXTURE_POINT)
    assert genus2.parse_invariant_triple(text) == SIEGEL_FIXTURE_POINT

    groots = list(range(12))
    gplanted = {r: (Fraction(r + 1, 3),) for r in groots}
    gdata = _interp_integer_data("hilbert-gundlach", (3, 1, 5), groots, gplanted)
    gev = modeq.evaluate_at(gdata, GUNDLACH_FIXTURE_POINT)
    assert len(gev.psi) == 2
    assert len(gev.psi[0]) == 13


def test_evaluate_constant_fraction_is_constant():
    data = modeq.ModEqData(
        kind="siegel-igusa", level=2, norm="icl-v1",
        nums=(
            {(0, 0, 0, 15): 2, (0, 0, 0, 0): 4},
            {(0, 0, 0, 14): 6},
            {(0, 0, 0, 14): -2},
        ),
        den={(0, 0, 0): 2},
    ).validate()
    e1 = modeq.evaluate_at(data, (Fraction(1), Fraction(2), Fraction(3)))
    e2 = modeq.evaluate_at(data, SIEGEL_FIXTURE_POINT)
    assert e1.psi == e2.psi
    assert e1.psi[0][0] == 2 and e1.psi[0][15] == 1


def test_evaluate_with_invariant_dependence_and_denominator():
    data = modeq.ModEqData(
        kind="siegel-igusa", level=2, norm="icl-v1",
        nums=(
            {(1, 0, 0, 15): 1, (0, 2, 0, 0): 5},
            {(0, 0, 1, 14): 3},
            {(1, 1, 1, 14): 7},
        ),
        den={(1, 0, 0): 1},
    ).validate()
    pt = (Fraction(2), Fraction(-1), Fraction(3))
    ev = modeq.evaluate_at(data, pt)
    assert ev.psi[0][15] == Fraction(2, 2)
    assert ev.psi[0][0] == Fraction(5 * 1, 2)
    assert ev.psi[1][14] == Fraction(3 * 3, 2)
    with pytest.raises(DenominatorVanishes):
        modeq.evaluate_at(data, (Fraction(0), Fraction(1), Fraction(1)))


def test_evaluate_matches_sympy_substitution():
    sympy = pytest.importorskip("sympy")
    rng = random.Random(3)
    J1, J2, J3, X = sympy.symbols("J1 J2 J3 X")
    syms = (J1, J2, J3)
    nums = []
    for k in range(3):
        mono = {}
        want = 15 if k == 0 else 14
        mono[(0, 0, 0, want)] = rng.randrange(1, 9)
        for _ in range(6):
            exps = (rng.randrange(3), rng.randrange(3), rng.randrange(3),
                    rng.randrange(want))
            mono[exps] = mono.get(exps, 0) + rng.randrange(-9, 10)
        nums.append({e: c for e, c in mono.items() if c})
    den = {(0, 0, 0): 3, (1, 1, 0): 2}
    data = modeq.ModEqData(kind="siegel-igusa", level=2, norm="icl-v1",
                           nums=tuple(nums), den=den).validate()
    pt = (Fraction(5, 7), Fraction(-2, 3), Fraction(1, 4))
    ev = modeq.evaluate_at(data, pt)
    subs = {J1: sympy.Rational(5, 7), J2: sympy.Rational(-2, 3),
            J3: sympy.Rational(1, 4)}
    den_sym = sum(c * J1**e[0] * J2**e[1] * J3**e[2] for e, c in den.items())
    for k in range(3):
        num_sym = sum(
            c * J1**e[0] * J2**e[1] * J3**e[2] * X**e[3]
            for e, c in nums[k].items()
        )
        psi_sym = sympy.expand((num_sym / den_sym).subs(subs))
        poly = sympy.Poly(psi_sym, X)
        got = ev.psi[k]
        for e in range(len(got)):
            assert Fraction(str(poly.coeff_monomial(X**e))) == got[e]


def test_isogenous_invariants_recover_planted_set():
    p = 31
    field = PrimeField(p)
    roots = _siegel_level2_roots()
    planted = {r: (Fraction(2 * r + 1), Fraction(r * r - 3)) for r in roots}
    data = _interp_integer_data("siegel-igusa", 2, roots, planted)
    point = (field(4), field(9), field(13))  # synthetic data ignores the point
    ev = modeq.evaluate_at(data, point)
    iso = modeq.isogenous_invariants(ev)
    assert not iso.degenerate
    got = {(t[0].val, t[1].val, t[2].val) for t in iso.tuples}
    want = {
        (r % p, (2 * r + 1) % p, (r * r - 3) % p)
        for r in roots
    }
    assert got == want


def test_isogenous_invariants_double_root_degenerate():
    p = 31
    field = PrimeField(p)
    roots = [1, 1] + list(range(2, 15))  # double root at 1, 13 simple roots
    planted = {r: (Fraction(r), Fraction(r)) for r in set(roots) if roots.count(r) == 1}
    data = _interp_integer_data("siegel-igusa", 2, roots, planted)
    ev = modeq.evaluate_at(data, (field(0), field(0), field(0)))
    iso = modeq.isogenous_invariants(ev)
    assert any(r.val == 1 and m == 2 for r, m in iso.degenerate)
    assert all(t[0].val != 1 for t in iso.tuples)


def test_isogenous_invariants_no_roots_empty():
    p = 31
    field = PrimeField(p)
    # X^15 + 2 has no roots mod 31: x -> x^15 maps onto {+-1}, and -2 is not
    # in that image
    data = modeq.ModEqData(
        kind="siegel-igusa", level=2, norm="icl-v1",
        nums=(
            {(0, 0, 0, 15): 1, (0, 0, 0, 0): 2},
            {(0, 0, 0, 14): 1},
            {(0, 0, 0, 14): 1},
        ),
        den={(0, 0, 0): 1},
    ).validate()
    ev = modeq.evaluate_at(data, (field(1), field(1), field(1)))
    iso = modeq.isogenous_invariants(ev)
    assert iso.tuples == () and iso.degenerate == ()


def test_oracle_provider_caps_and_closure(oracle_provider):
    p, coeffs = SIEGEL_E2E_CURVES[0]
    C = make_curve(p, coeffs)
    for ell in (2, 3):
        kernels = oracle_provider.siegel_kernels(C, ell)
        assert 1 <= len(kernels) <= ell**3 + ell**2 + ell + 1
        for S in kernels[:3]:
            assert S.order == ell * ell
            for D in S.points:
                pD = genus2.frobenius_on_divisor(D, p)
                assert S.contains(pD)  # closed under Frobenius, pointwise
    kernels5 = oracle_provider.hilbert_kernels(C, 5)
    assert len(kernels5) <= 6
    for S in kernels5:
        assert S.order == 5 and S.galois_stable


def test_oracle_provider_empty_when_chi_irreducible(oracle_provider):
    # chi mod 5 is irreducible for this curve: no stable line or plane exists
    C = make_curve(7, [2, 1, 5, 3, 6, 1])
    chi = oracle_provider.chi(C)
    assert ff.poly_is_irreducible(chi.reduce(5))
    assert oracle_provider.hilbert_kernels(C, 5) == []


def test_screening_provider(tmp_path, oracle_provider):
    p, coeffs = SIEGEL_E2E_CURVES[0]
    C = make_curve(p, coeffs)
    # rootless file: screening reports not-Elkies (empty), pipeline skips
    rootless = modeq.ModEqData(
        kind="siegel-igusa", level=2, norm=genus2.IGUSA_NORMALIZATION,
        nums=(
            {(0, 0, 0, 15): 1, (0, 0, 0, 0): 2},
            {(0, 0, 0, 14): 1},
            {(0, 0, 0, 14): 1},
        ),
        den={(0, 0, 0): 1},
    ).validate()
    inv = genus2.igusa_invariants(C)
    ev = modeq.evaluate_at(rootless, inv.triple())
    has_roots = bool(modeq.isogenous_invariants(ev).tuples)
    modeq.save_modeq(rootless, tmp_path / "siegel-igusa-2.modeq")
    prov = modeq.ModeqScreeningProvider(tmp_path, inner=oracle_provider)
    if has_roots:
        assert prov.siegel_kernels(C, 2)
    else:
        assert prov.siegel_kernels(C, 2) == []
    with pytest.raises(GuardExceeded):
        prov.siegel_kernels(C, 3)  # no data file for level 3
    # detected roots without an inner provider: explicit skip signal
    always_roots = _interp_integer_data(
        "siegel-igusa", 2, _siegel_level2_roots(),
        {r: (Fraction(1), Fraction(1)) for r in _siegel_level2_roots()},
    )
    modeq.save_modeq(always_roots, tmp_path / "siegel-igusa-2.modeq")
    lone = modeq.ModeqScreeningProvider(tmp_path, inner=None)
    ev2 = modeq.evaluate_at(always_roots, inv.triple())
    if modeq.isogenous_invariants(ev2).tuples:
        with pytest.raises(GuardExceeded):
            lone.siegel_kernels(C, 2)


def test_screening_provider_norm_mismatch(tmp_path):
    data = modeq.ModEqData(
        kind="siegel-igusa", level=2, norm="other-norm",
        nums=(
            {(0, 0, 0, 15): 1},
            {(0, 0, 0, 14): 1},
            {(0, 0, 0, 14): 1},
        ),
        den={(0, 0, 0): 1},
    ).validate()
    modeq.save_modeq(data, tmp_path / "siegel-igusa-2.modeq")
    prov = modeq.ModeqScreeningProvider(tmp_path)
    C = make_curve(11, [3, 5, 0, 2, 0, 1])
    with pytest.raises(ValidationError, match="normalization"):
        prov.siegel_kernels(C, 2)

"""Real quadratic arithmetic, split primes, residues, CRT and reconstruction."""

import math
import random

import pytest

from g2sea import ff, hilbert
from g2sea.errors import (
    BoundNotMet,
    G2Error,
    InconsistentResidues,
    Ramified,
)
from g2sea.hilbert import RealQuadField, RMResidue

from conftest import HILBERT_E2E_CURVES, make_curve


def test_supported_fields_and_units():
    for delta in (5, 8, 13, 17):
        F = RealQuadField(delta)
        eps = F.fundamental_unit()
        assert eps.norm() == -1
        w = F.omega()
        # omega satisfies its minimal polynomial X^2 - t X - n
        assert w * w == F.elem(F.omega_n, F.omega_trace)
    with pytest.raises(G2Error):
        RealQuadField(12)  # not supported (and not fundamental with unit table)


def test_unit_is_fundamental_desk_scale():
    # no unit strictly between 1 and eps in the archimedean embedding
    for delta in (5, 8, 13, 17):
        F = RealQuadField(delta)
        eps = F.fundamental_unit()
        sq = math.sqrt(delta)
        omega_val = (1 + sq) / 2 if delta % 4 == 1 else math.sqrt(delta / 4)
        eps_val = eps.a + eps.b * omega_val
        for a in range(-40, 41):
            for b in range(-40, 41):
                u = F.elem(a, b)
                if abs(u.norm()) != 1:
                    continue
                val = a + b * omega_val
                assert not (1 + 1e-9 < val < eps_val - 1e-9)


def test_rqelem_arithmetic_random():
    rng = random.Random(1)
    for delta in (5, 8, 13, 17):
        F = RealQuadField(delta)
        for _ in range(60):
            x = F.elem(rng.randrange(-9, 10), rng.randrange(-9, 10))
            y = F.elem(rng.randrange(-9, 10), rng.randrange(-9, 10))
            assert (x * y).norm() == x.norm() * y.norm()
            assert (x + y).trace() == x.trace() + y.trace()
            assert x.conj().conj() == x
            assert (x * y).conj() == x.conj() * y.conj()
            assert x * x.conj() == F.elem(x.norm(), 0)


def test_split_prime_q5():
    F = RealQuadField(5)
    out = hilbert.split_prime(F, 11)
    assert out is not None
    beta, betabar = out
    assert beta.norm() == 11 and betabar.norm() == 11
    assert beta.is_totally_positive() and betabar.is_totally_positive()
    # same ideal as the generator 3 + omega up to units
    ref = F.elem(3, 1)
    assert ref.norm() == 11
    assert beta.divides(ref) and ref.divides(beta) or beta.conj().divides(ref)
    assert hilbert.split_prime(F, 7) is None  # 7 = +-2 mod 5 is inert
    with pytest.raises(Ramified):
        hilbert.split_prime(F, 5)


def test_split_primes_match_experiment_levels():
    # the Hilbert experiments for delta = 5 run over exactly these levels
    F = RealQuadField(5)
    split = [
        ell
        for ell in ff.primes_upto(41)
        if ell != 5 and hilbert.split_prime(F, ell) is not None
    ]
    assert split == [11, 19, 29, 31, 41]


def test_split_prime_two_in_q17():
    F = RealQuadField(17)
    out = hilbert.split_prime(F, 2)
    assert out is not None and out[0].norm() == 2
    assert RealQuadField(5) and hilbert.split_prime(RealQuadField(5), 2) is None


def test_small_trace_generator():
    F = RealQuadField(5)
    beta, _ = hilbert.split_prime(F, 11)
    best = hilbert.small_trace_generator(F, beta)
    assert best.norm() == 11 and best.is_totally_positive()
    assert hilbert.small_trace_generator(F, best) == best  # fixed point
    eps2 = F.fundamental_unit() ** 2
    moved = best * eps2
    assert hilbert.small_trace_generator(F, moved) == best  # round trip


def test_small_trace_bound_q5():
    # Tr(beta) <= 5 sqrt(ell) for all split ell <= 500 in Q(sqrt 5), checked
    # against an exhaustive unit-orbit scan
    F = RealQuadField(5)
    eps2 = F.fundamental_unit() ** 2
    for ell in ff.primes_upto(500):
        if ell == 5:
            continue
        pair = hilbert.split_prime(F, ell)
        if pair is None:
            continue
        best = hilbert.small_trace_generator(F, pair[0])
        assert best.trace() ** 2 <= 25 * ell
        # exhaustive orbit scan around the minimum
        cur = best
        for _ in range(3):
            cur = cur * eps2
            assert cur.trace() >= best.trace()
        inv = eps2.conj()
        cur = best
        for _ in range(3):
            cur = cur * inv
            assert cur.trace() >= best.trace()


def test_residue_from_eigenvalue_example():
    F = RealQuadField(5)
    beta = F.elem(3, 1)
    r = hilbert.residue_from_eigenvalue(F, 2, 13, beta)
    assert r.residue == (2 + 13 * pow(2, -1, 11)) % 11 == 3
    # lambda and q/lambda give the same residue
    lam2 = 13 * pow(2, -1, 11) % 11
    r2 = hilbert.residue_from_eigenvalue(F, lam2, 13, beta)
    assert r2.residue == r.residue


def test_residue_root_canonical():
    F = RealQuadField(5)
    beta = F.elem(3, 1)
    t = hilbert.residue_root(F, beta)
    assert (3 + t) % 11 == 0
    assert (t * t - t - 1) % 11 == 0  # omega's minimal polynomial X^2 - X - 1


def test_rm_crt_worked_example():
    F = RealQuadField(5)
    b1, b2 = F.elem(3, 1), F.elem(4, 1)
    assert b1.norm() == 11 and b2.norm() == 19
    residues = [
        RMResidue(beta=b1, ell=11, lam=None, residue=6),
        RMResidue(beta=b2, ell=19, lam=None, residue=12),
    ]
    cls = hilbert.rm_crt(F, residues)
    assert cls.modulus_norm == 209
    assert cls.reduce(b1) == 6 and cls.reduce(b2) == 12
    assert cls.same_class(F.elem(1, 2))
    assert cls.small_representative() == F.elem(1, 2)


def test_rm_crt_singleton_and_duplicates():
    F = RealQuadField(5)
    b1, _ = hilbert.split_prime(F, 11)
    r = RMResidue(beta=b1, ell=11, lam=None, residue=6)
    cls = hilbert.rm_crt(F, [r])
    assert cls.reduce(b1) == 6
    with pytest.raises(G2Error):
        hilbert.rm_crt(F, [r, RMResidue(beta=b1.conj(), ell=11, lam=None, residue=2)])


def test_rm_crt_reduce_reconstruct_roundtrip():
    rng = random.Random(4)
    for delta in (5, 8, 13, 17):
        F = RealQuadField(delta)
        betas = []
        for ell in ff.primes_upto(60):
            if delta % ell == 0:
                continue
            pair = hilbert.split_prime(F, ell)
            if pair:
                betas.append(pair[0])
            if len(betas) == 3:
                break
        for _ in range(10):
            psi = F.elem(rng.randrange(-20, 21), rng.randrange(-20, 21))
            residues = [
                RMResidue(beta=b, ell=b.norm(), lam=None,
                          residue=hilbert.reduce_mod_beta(psi, b))
                for b in betas
            ]
            cls = hilbert.rm_crt(F, residues)
            assert cls.same_class(psi)
            for b, r in zip(betas, residues):
                assert cls.reduce(b) == r.residue


def test_reconstruct_psi_worked_example():
    F = RealQuadField(5)
    residues = [
        RMResidue(beta=F.elem(3, 1), ell=11, lam=None, residue=6),
        RMResidue(beta=F.elem(4, 1), ell=19, lam=None, residue=12),
    ]
    # N(B) = 209 > 208 = 16 * 13
    psi = hilbert.reconstruct_psi(F, residues, 13)
    assert psi == F.elem(1, 2)
    assert psi.trace() == 4 and psi.trace() ** 2 <= 16 * 13
    assert psi.trace() ** 2 - 4 * psi.norm() == 20 <= 4 * 13


def test_reconstruct_psi_soundness_and_errors():
    F = RealQuadField(8)
    q = 17
    rng = random.Random(5)
    box = hilbert.weil_box(F, q)
    psi = box[len(box) // 3]
    betas = []
    nb = 1
    for ell in ff.primes_upto(80):
        if ell == 2:
            continue
        pair = hilbert.split_prime(F, ell)
        if pair is None:
            continue
        betas.append(pair[0])
        nb *= ell
        if nb > 16 * q:
            break
    residues = [
        RMResidue(beta=b, ell=b.norm(), lam=None,
                  residue=hilbert.reduce_mod_beta(psi, b))
        for b in betas
    ]
    assert hilbert.reconstruct_psi(F, residues, q) == psi
    with pytest.raises(BoundNotMet):
        hilbert.reconstruct_psi(F, residues[:1], q)
    bad = [
        RMResidue(beta=r.beta, ell=r.ell, lam=None, residue=(r.residue + 1) % r.ell)
        for r in residues
    ]
    try:
        got = hilbert.reconstruct_psi(F, bad, q)
        assert got != psi  # astronomically unlikely; shifted residues
    except InconsistentResidues:
        pass


def test_chi_from_xi():
    q = 7
    chi = hilbert.chi_from_xi(hilbert.XiPoly(0, 0), q)
    assert chi.coeffs() == [49, 0, 14, 0, 1]  # X^4 + 2q X^2 + q^2
    with pytest.raises(G2Error):
        hilbert.chi_from_xi(hilbert.XiPoly(0, 1), q)  # negative discriminant
    with pytest.raises(G2Error):
        hilbert.chi_from_xi(hilbert.XiPoly(12, 1), q)  # trace too large


def test_psi_of_fixture_curve_reduces_to_observed_residue(oracle_provider):
    # psi from the naive chi reduces mod beta (or its conjugate) to the
    # residue computed from an actual Frobenius eigenvalue
    p, coeffs, delta = HILBERT_E2E_CURVES[1]
    C = make_curve(p, coeffs)
    chi = oracle_provider.chi(C)
    F = RealQuadField(delta)
    disc = chi.s1**2 - 4 * chi.s2
    k = math.isqrt(disc // delta)
    assert k * k * delta == disc
    # psi = (s1 - k)/2 + k*omega for delta = 1 mod 4
    assert delta % 4 == 1 and (chi.s1 - k) % 2 == 0
    psi = F.elem((chi.s1 - k) // 2, k)
    assert psi.trace() == chi.s1 and psi.norm() == chi.s2
    from g2sea import kernel

    ell = 11
    beta = hilbert.small_trace_generator(F, hilbert.split_prime(F, ell)[0])
    kernels = oracle_provider.hilbert_kernels(C, ell)
    assert kernels
    lam = kernel.eigenvalue_on_kernel(C, kernels[0], p, ell)
    r = hilbert.residue_from_eigenvalue(F, lam, p, beta).residue
    assert r in (
        hilbert.reduce_mod_beta(psi, beta),
        hilbert.reduce_mod_beta(psi, beta.conj()),
    )


def test_xi_roots_match_observed_residues(oracle_provider):
    # the indirect check of the orthogonal splitting: residues from stable
    # kernels are exactly roots of xi mod ell
    from g2sea import kernel
    from g2sea.ff import PrimeField, UniPoly

    p, coeffs, delta = HILBERT_E2E_CURVES[4]  # p = 11, delta = 8
    C = make_curve(p, coeffs)
    chi = oracle_provider.chi(C)
    ell = 17
    kernels = oracle_provider.hilbert_kernels(C, ell)
    assert len(kernels) >= 2
    F = RealQuadField(delta)
    beta = hilbert.split_prime(F, ell)[0]
    residues = set()
    for S in kernels:
        lam = kernel.eigenvalue_on_kernel(C, S, p, ell)
        residues.add(hilbert.residue_from_eigenvalue(F, lam, p, beta).residue)
    Fl = PrimeField(ell)
    xi = UniPoly.from_ints(Fl, [chi.s2, -chi.s1, 1])
    xi_roots = {r.val for r in ff.poly_roots_in_field(xi)}
    assert residues == xi_roots


def test_pipeline_with_no_split_primes(oracle_provider):
    p, coeffs, delta = HILBERT_E2E_CURVES[1]
    C = make_curve(p, coeffs)
    F = RealQuadField(delta)
    report = hilbert.pipeline_count_hilbert(C, F, oracle_provider, ell_max=9)
    assert report.final is None  # smallest split prime for delta=5 is 11
    assert report.n_split == 0


def test_pipeline_end_to_end_single(oracle_provider):
    p, coeffs, delta = HILBERT_E2E_CURVES[0]
    C = make_curve(p, coeffs)
    F = RealQuadField(delta)
    report = hilbert.pipeline_count_hilbert(
        C, F, oracle_provider, ell_max=40, verify=True
    )
    assert report.final == oracle_provider.chi(C)
    assert report.elkies_fraction() is not None
    assert report.to_json()["elkies_reference"] == "1/2"

"""Groebner-shape kernel ideals: construction, Frobenius reduction, eigenvalues."""

import random

import pytest

from g2sea import ff, frobenius, genus2, kernel, siegel
from g2sea.errors import NonGeneric, NotRational
from g2sea.ff import PrimeField, UniPoly

from conftest import A3_FULL_CURVE, ORDER5_KERNEL_CURVES, make_curve


@pytest.fixture(scope="module")
def order5_subgroups(oracle_provider):
    out = []
    for p, coeffs, lam in ORDER5_KERNEL_CURVES:
        C = make_curve(p, coeffs)
        chi = oracle_provider.chi(C)
        S = frobenius.stable_eigenline(C, chi, 5, lam, seed=1)
        out.append((C, S, lam))
    return out


def test_cyclic_order5_ideal_shape(order5_subgroups):
    for C, S, _ in order5_subgroups:
        ideal = kernel.ideal_from_subgroup(S, verify=True)
        assert ideal.R1.degree == 2  # (5 - 1) / 2 pairs
        assert ideal.R0.degree < 2 and ideal.S1.degree < 2 and ideal.S0.degree < 2
        assert ideal.order == 5
        for D in S.points:
            if not D.is_identity():
                assert ideal.contains_point(D)


def test_ideal_solution_count(order5_subgroups):
    # the system has exactly |S| - 1 solutions over the closure: R1 has
    # (|S|-1)/2 simple roots and each contributes the +/- pair of V1 values
    C, S, _ = order5_subgroups[0]
    ideal = kernel.ideal_from_subgroup(S)
    K = S.curve.field
    R1K = UniPoly.from_ints(K, ideal.R1.int_coeffs())
    S1K = UniPoly.from_ints(K, ideal.S1.int_coeffs())
    roots = ff.poly_roots_in_field(R1K)
    assert len(roots) == len(set(roots)) == 2
    for r in roots:
        assert not S1K(r).is_zero()  # v1 = +/- sqrt(S1) stays a pair


def test_full_a3_ideal(oracle_provider):
    p, coeffs = A3_FULL_CURVE
    C = make_curve(p, coeffs)
    basis = oracle_provider.torsion(C, 3)
    pts = list(basis.all_points().values())
    S = kernel.SubgroupPoints(basis.curve, pts, p)
    assert S.order == 81
    assert S.galois_stable
    ideal = kernel.ideal_from_subgroup(S)
    assert ideal.R1.degree == 40  # (81 - 1) / 2
    sample = [D for D in S.points if not D.is_identity()][:10]
    for D in sample:
        assert ideal.contains_point(D)


def test_frobenius_mod_ideal_pointwise(order5_subgroups):
    for C, S, _ in order5_subgroups:
        q = C.q
        ideal = kernel.ideal_from_subgroup(S)
        images = kernel.frobenius_mod_ideal(C, ideal, q)
        for D in S.points:
            if D.is_identity():
                continue
            pD = frobenius.frobenius_on_divisor(D, q)
            u0, u1, v0, v1 = pD.coordinates()
            pu0, pu1, pv0, pv1 = images.apply_to_point(D)
            assert (pu0, pu1) == (u0, u1)
            assert (pv0, pv1) == (v0, v1)


def test_frobenius_mod_ideal_composition(order5_subgroups):
    # applying the q-power images twice equals the q^2-power images
    C, S, _ = order5_subgroups[0]
    q = C.q
    ideal = kernel.ideal_from_subgroup(S)
    im_q = kernel.frobenius_mod_ideal(C, ideal, q)
    im_q2 = kernel.frobenius_mod_ideal(C, ideal, q * q)
    R1 = ideal.R1
    t2 = im_q.u1_image.compose_mod(im_q.u1_image, R1)
    assert t2 == im_q2.u1_image
    m2 = im_q.v1_multiplier * im_q.v1_multiplier.compose_mod(im_q.u1_image, R1) % R1
    assert m2 == im_q2.v1_multiplier


def test_split_rational_subgroup_identity_images(oracle_provider):
    # pointwise rational subgroup: q-power images act as the identity
    C = make_curve(7, [5, 1, 0, 4, 4, 1])
    chi = oracle_provider.chi(C)
    S = frobenius.stable_eigenline(C, chi, 5, 1, seed=1)
    assert all(D.field.key == C.field.key for D in S.points)
    ideal = kernel.ideal_from_subgroup(S)
    images = kernel.frobenius_mod_ideal(C, ideal, C.q)
    x = UniPoly.x(ideal.field)
    assert images.u1_image == x % ideal.R1
    assert images.u0_image == ideal.R0 % ideal.R1
    assert images.v1_multiplier == UniPoly.one(ideal.field) % ideal.R1


def test_eigenvalue_dual_path(order5_subgroups):
    for C, S, lam in order5_subgroups:
        got = kernel.eigenvalue_on_kernel(C, S, C.q, 5)
        assert got == lam
        # complementary eigenvalue: rec_q(X - lam) vanishes at q/lam
        Fl = PrimeField(5)
        lin = UniPoly.from_ints(Fl, [-lam, 1])
        comp = siegel.rec_q(lin, C.q)
        qol = (C.q * pow(lam, -1, 5)) % 5
        assert comp(Fl(qol)).is_zero()
        assert (lam * qol) % 5 == C.q % 5


def test_two_torsion_rejected(oracle_provider):
    C = make_curve(11, [8, 6, 5, 5, 9, 1])
    basis = oracle_provider.torsion(C, 2)
    G = basis.points[0]
    S = kernel.SubgroupPoints(basis.curve, [G], basis.q)
    with pytest.raises(NonGeneric):
        kernel.ideal_from_subgroup(S)


def test_unstable_subgroup_fails_descent(oracle_provider):
    # a random order-3 line that is not Frobenius-stable cannot descend
    C = make_curve(13, [5, 1, 5, 4, 5, 1])
    basis = oracle_provider.torsion(C, 3)
    rng = random.Random(3)
    for _ in range(60):
        coords = tuple(rng.randrange(3) for _ in range(4))
        if all(c == 0 for c in coords):
            continue
        G = basis.combination(coords)
        S = kernel.SubgroupPoints(basis.curve, [G, genus2.negate(G)], basis.q)
        if S.galois_stable:
            continue
        with pytest.raises((NotRational, NonGeneric)):
            kernel.ideal_from_subgroup(S)
        return
    pytest.skip("all sampled lines were stable")


def test_subgroup_closure_check(oracle_provider):
    C = make_curve(7, [5, 1, 0, 4, 4, 1])
    chi = oracle_provider.chi(C)
    S = frobenius.stable_eigenline(C, chi, 5, 1, seed=1)
    assert S.is_closed()
    # dropping a point breaks closure
    broken = kernel.SubgroupPoints(
        S.curve, [D for D in S.points if not D.is_identity()][:2], S.q
    )
    assert not broken.is_closed()


def test_ideal_serialization(order5_subgroups):
    C, S, _ = order5_subgroups[0]
    ideal = kernel.ideal_from_subgroup(S)
    blob = ideal.to_json()
    assert blob["order"] == 5
    assert blob["p"] == C.field.p
    assert len(blob["R1"]) == 3
    assert blob["certificate"].startswith("generic")

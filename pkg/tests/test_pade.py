import random
from dataclasses import replace
from fractions import Fraction as F

import pytest

from gpade.errors import NonMonomialDeterminant
from gpade.pade import (
    ApproxShape,
    build_family,
    build_p,
    build_q,
    build_q_generic,
    family_det,
    family_tsv,
    oracle_solve,
    oracle_solve_generic,
    phi_coeff,
    phi_coeffs,
    series_product_coeffs,
    verify_order,
)
from gpade.params import derive_params

from conftest import make_configs, pick_alphas


@pytest.fixture(scope="module")
def half():
    gp = derive_params([F(1), F(1, 2)])
    shape = ApproxShape(n=(1,), n0=1)
    return gp, shape, build_family(gp, shape)


def test_shape_derivations():
    sh = ApproxShape(n=(2, 3), n0=4)
    assert sh.N == 5 and sh.Ntilde == 9
    assert sh.Nj == (7, 6)
    assert sh.Nij(0, 1) == 7 and sh.Nij(1, 1) == 8 and sh.Nij(2, 1) == 7
    assert sh.Nij(2, 2) == 7
    assert all(nj >= sh.N - 1 for nj in sh.Nj)
    with pytest.raises(ValueError):
        ApproxShape(n=(3,), n0=2)
    with pytest.raises(ValueError):
        ApproxShape(n=(0,), n0=1)


def test_series_specialization_is_harmonic():
    # alpha_0 = alpha_1 = 1 collapses the coefficients to 1/(n+1)
    gp = derive_params([F(1), F(1)])
    assert phi_coeffs(gp, 1, 8) == [F(1, n + 1) for n in range(9)]
    assert phi_coeff(gp, 1, 5) == F(1, 6)


def test_hand_instance_denominators(half):
    gp, shape, fam = half
    assert build_q(gp, shape, 0) == (F(-5, 3), F(1))
    assert build_q(gp, shape, 1) == (F(-7, 5), F(1))
    assert fam.q[0][-1] == 1 and fam.q[1][-1] == 1


def test_hand_instance_numerators(half):
    gp, shape, fam = half
    assert fam.p_coeffs(0, 1) == (F(-5, 3), F(4, 9))
    assert fam.p_coeffs(1, 1) == (F(-7, 5), F(8, 15), F(4, 75))
    # order-0 coefficient always equals the constant denominator coefficient
    for i in (0, 1):
        assert fam.p_coeffs(i, 1)[0] == fam.q[i][0]
    p01 = build_p(gp, shape, fam.q[0], 0, 1)
    assert p01 == fam.p_coeffs(0, 1)


def test_hand_instance_remainder(half):
    gp, shape, fam = half
    assert fam.forced_zero_coeffs(0, 1) == (F(0),)
    assert fam.remainder_coeffs(0, 1)[0] == F(-4, 105)
    assert verify_order(fam) == {(0, 1): True, (1, 1): True}


def test_perturbation_breaks_order(half):
    gp, shape, fam = half
    for i in (0, 1):
        for k in range(shape.N + 1):
            qq = list(fam.q[i])
            qq[k] += 1
            coeffs = series_product_coeffs(gp, tuple(qq), 1, fam.T)
            lo = shape.Nij(i, 1) + 1
            window = coeffs[lo : lo + shape.n[0]]
            assert any(c != 0 for c in window)


def test_oracle_matches_closed_form(half):
    gp, shape, fam = half
    assert oracle_solve(gp, shape, 0) == fam.q[0]
    assert oracle_solve(gp, shape, 1) == fam.q[1]


def test_generic_degrees_agree_with_oracle():
    # degrees beyond the standard shape: N_j = N - 1 + slack
    rng = random.Random(17)
    for _ in range(15):
        m = rng.choice([1, 2])
        gp = derive_params(pick_alphas(rng, m))
        n = tuple(rng.randint(1, 3) for _ in range(m))
        N = sum(n)
        Nlist = tuple(N - 1 + rng.randint(0, 3) for _ in range(m))
        q1 = build_q_generic(gp, n, Nlist)
        q2 = oracle_solve_generic(gp, n, Nlist)
        assert q1 == q2
        coeffs_ok = True
        for j in range(1, m + 1):
            cs = series_product_coeffs(gp, q1, j, Nlist[j - 1] + n[j - 1] + 1)
            window = cs[Nlist[j - 1] + 1 : Nlist[j - 1] + n[j - 1] + 1]
            coeffs_ok = coeffs_ok and all(c == 0 for c in window)
        assert coeffs_ok


def test_determinant_hand_instance(half):
    gp, shape, fam = half
    exponent, omega = family_det(fam)
    assert exponent == 3 and omega == F(4, 75)
    assert omega == fam.p_leading(1)


def test_determinant_by_direct_polynomial_arithmetic(half):
    # independent route: expand Q0*P11 - Q1*P01 by coefficient convolution
    gp, shape, fam = half

    def poly_mul(a, b):
        out = [F(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return out

    first = poly_mul(fam.q[0], fam.p_coeffs(1, 1))
    second = poly_mul(fam.q[1], fam.p_coeffs(0, 1))
    det = [x - y for x, y in zip(first, second + [F(0)] * (len(first) - len(second)))]
    assert det == [F(0), F(0), F(0), F(4, 75)]


def test_determinant_rejects_corruption(half):
    gp, shape, fam = half
    qq = list(list(row) for row in fam.q)
    qq[0][0] += 1
    broken = replace(fam, q=tuple(tuple(r) for r in qq))
    with pytest.raises(NonMonomialDeterminant):
        family_det(broken)


def test_numerator_degrees():
    for gp_alphas, n, n0 in [
        ([F(1), F(1, 2)], (1,), 2),
        ([F(1, 2), F(1, 3), F(3, 4)], (2, 1), 3),
    ]:
        gp = derive_params(gp_alphas)
        shape = ApproxShape(n=n, n0=n0)
        fam = build_family(gp, shape)
        for i in range(1, gp.m + 1):
            # diagonal numerator has exact degree N_i + 1
            assert fam.p_leading(i) != 0
        for i in range(gp.m + 1):
            for j in range(1, gp.m + 1):
                assert len(fam.p_coeffs(i, j)) == shape.Nij(i, j) + 1


def test_small_random_sweep():
    for gp, sh in make_configs(4242, 20, n_max=4, n0_max=5):
        fam = build_family(gp, sh)
        assert all(verify_order(fam).values())
        for i in range(gp.m + 1):
            assert oracle_solve(gp, sh, i) == fam.q[i]
            assert fam.q[i][-1] == 1  # normalized leading coefficient
        e, om = family_det(fam)
        assert e == sh.N + sum(sh.Nj) + gp.m and om != 0


def test_family_tsv(half):
    gp, shape, fam = half
    text = family_tsv(fam)
    lines = text.strip().split("\n")
    assert lines[0] == "i\tpoly\tdegree\tnumerator\tdenominator"
    assert "0\tQ\t0\t-5\t3" in lines
    assert "1\t1\t2\t4\t75" in lines
    scaled = family_tsv(fam, scale=12600)
    assert "1\t1\t2\t672\t1" in scaled.split("\n")
    with pytest.raises(ValueError):
        family_tsv(fam, scale=2)


def test_truncation_guard(half):
    gp, shape, _ = half
    with pytest.raises(ValueError):
        build_family(gp, shape, T=2)

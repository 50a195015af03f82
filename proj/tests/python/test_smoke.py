import math

import pytest

import lacunary


def test_kronecker_and_class_numbers():
    assert lacunary.kronecker(-3, 2) == -1
    assert lacunary.kronecker(-7, 2) == 1
    assert lacunary.class_number(-23) == 3
    assert lacunary.class_number(-163) == 1
    assert lacunary.is_fundamental_discriminant(-4)
    assert not lacunary.is_fundamental_discriminant(-5)


def test_l_values():
    # Class number formula: L(1, chi_{-3}) = 2 pi h / (w sqrt 3) with h = 1, w = 6.
    assert lacunary.L1_chi(-3) == pytest.approx(math.pi / (3 * math.sqrt(3)), rel=1e-13)
    assert lacunary.zeta(2).real == pytest.approx(math.pi ** 2 / 6, rel=1e-13)
    assert lacunary.functional_equation_residual(complex(0.3, 7.0), -7) < 1e-10


def test_ramanujan_sum_is_mobius_at_h_one():
    mobius = {1: 1, 2: -1, 3: -1, 4: 0, 5: -1, 6: 1, 12: 0, 30: -1}
    for c, mu in mobius.items():
        assert lacunary.ramanujan_sum(1, c) == mu


def test_coefficients_and_scan():
    # lambda0(n) = sum_{d | n} chi(d); for D = -4 this is r_2(n) / 4.
    lam = lacunary.coefficients("lambda0", -4, 10)
    assert lam == [1, 1, 0, 1, 2, 0, 0, 1, 1, 2]
    # rho is the Dirichlet inverse of lambda0.
    n_max = 60
    lam = lacunary.coefficients("lambda0", -7, n_max)
    rho = lacunary.coefficients("rho", -7, n_max)
    for n in range(1, n_max + 1):
        conv = sum(rho[d - 1] * lam[n // d - 1] for d in range(1, n + 1) if n % d == 0)
        assert conv == (1 if n == 1 else 0)
    ranked = lacunary.scan_discriminants(-50, -3)
    assert ranked[0][0] == -3
    eps = [e for _, e in ranked]
    assert eps == sorted(eps)


def test_r_tilde_one_closed_form():
    zeta2 = math.pi ** 2 / 6
    assert lacunary.R_tilde_one(-3) == pytest.approx(27 / 32 / zeta2 ** 2, rel=1e-13)


def test_identity_grid_and_errors():
    report = lacunary.identity_grid([-3], 12)
    assert report["checks"] > 0
    assert report["failures"] == 0
    with pytest.raises(ValueError):
        lacunary.L1_chi(-5)
    with pytest.raises(lacunary.DomainError):
        lacunary.coefficients("no_such_kind", -3, 5)

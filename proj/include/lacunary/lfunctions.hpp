// Complex evaluation of zeta, Dirichlet L-functions of quadratic characters, and their root factors.
#pragma once

#include "lacunary/arithmetic.hpp"
#include "lacunary/common.hpp"

namespace lacunary {

// Value together with its derivative in s.
struct ValueDeriv {
    cplx value;
    cplx deriv;
};

// Principal-branch-free log Gamma: exp(log_gamma(z)) == Gamma(z). Lanczos with reflection.
cplx log_gamma(cplx z);
cplx gamma_fn(cplx z);

// Hurwitz zeta sum_{k>=0} (k+a)^{-s} with its s-derivative, 0 < a <= 1, s != 1.
ValueDeriv hurwitz_zeta(cplx s, double a);

// Riemann zeta; throws DomainError at the pole s = 1.
cplx zeta(cplx s);
ValueDeriv zeta_with_deriv(cplx s);

// L(s, chi_D) and its derivative; entire.
cplx dirichlet_L(cplx s, const Discriminant& disc);
ValueDeriv dirichlet_L_with_deriv(cplx s, const Discriminant& disc);

// L(s) = zeta(s) L(s, chi_D); throws DomainError at s = 1.
cplx L_product(cplx s, const Discriminant& disc);
ValueDeriv L_product_with_deriv(cplx s, const Discriminant& disc);

// G(s) = L(s) + L'(s) / log N with the analytic derivative.
cplx G_fn(cplx s, const Discriminant& disc, double N);

// Root factor with L(s) = X(s) conj(L(1 - conj s)).
// The checked variant requires 0 <= Re s < 1; the unchecked one evaluates anywhere off the poles.
cplx root_factor(cplx s, const Discriminant& disc);
cplx root_factor_unchecked(cplx s, const Discriminant& disc);
// log X(s) modulo 2 pi i.
cplx log_root_factor(cplx s, const Discriminant& disc);

// Residual |L(s) - X(s) conj(L(1 - conj s))|.
double functional_equation_residual(cplx s, const Discriminant& disc);

// |X(s+z)/(X(s)(Q|s|)^{-2z}) - 1| (|s|+|z|)/|z|, and 0 at z = 0.
double stirling_residual(cplx s, cplx z, const Discriminant& disc);

// Real-valued rotations of each factor on the critical line.
double hardy_theta_zeta(double t);
double hardy_theta_chi(double t, const Discriminant& disc);
double hardy_Z_zeta(double t);
double hardy_Z_chi(double t, const Discriminant& disc);

}  // namespace lacunary

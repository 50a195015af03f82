// Shifted convolution apparatus: the test-function pair, brute-force shifted sums, the twisted Voronoi
// formula, the singular series by three routes, the kernels phi and k*, and the Dirichlet series of gamma*.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "lacunary/approxfe.hpp"

namespace lacunary {

// Even bump with Phi = 1 on [1, 2], smoothstep shoulders on [1/2, 1] and [2, 5/2], zero elsewhere on t > 0.
struct TestFunctionPair {
    double support_lo = 0.5;
    double plateau_lo = 1.0;
    double plateau_hi = 2.0;
    double support_hi = 2.5;
    int smoothness = 6;  // shoulders are C^k, so Psi decays like |z|^{-k-2}

    void validate() const;
    double Phi(double t) const;
    double Phi_prime(double t) const;
};

// j-th derivative of Psi(z) = int Phi(t) cos(t z) dt, j in {0, 1, 2}.
double psi_eval(double z, const TestFunctionPair& pair, int deriv = 0);
// Mellin transform of Psi from the regularized form s(s+1) Psi~(s) = int_0^inf Psi''(z) z^{s+1} dz, Re s > -2.
// The z-integral is cut at 400 + 100 max(0, Re s); the cut costs about 1e-7 at Re s = 1 and grows beyond.
cplx psi_mellin(cplx s, const TestFunctionPair& pair);
// Independent closed form 2 Gamma(s) cos(pi s / 2) int_0^inf Phi(t) t^{-s} dt.
cplx psi_mellin_closed(cplx s, const TestFunctionPair& pair);

struct DecayConstants {
    double A = 4.0;
    std::array<double, 3> C{};  // max of |Psi^(j)(z)| (1 + z)^A over the grid
    double z_max = 0.0;
};
DecayConstants psi_decay_constants(const TestFunctionPair& pair, double A = 4.0, double z_max = 1000.0,
                                   int points = 4001);

// phi(z) = sum_{k >= 1} Psi(k z).
double phi_route_a(double z, const TestFunctionPair& pair);
// Poisson form -Psi(0)/2 + (2 pi / z) sum_{m >= 1} Phi(2 pi m / z); finite because Phi has compact support.
double phi_route_b(double z, const TestFunctionPair& pair);
// Euler-Maclaurin form (2 pi / z) int_0^inf {t z / 2 pi} Phi'(t) dt.
double phi_route_c(double z, const TestFunctionPair& pair);
double phi_kernel(double z, const TestFunctionPair& pair);  // route B
// phi_0(z) = phi(z) + Psi(0)/2 (1 - z)^+.
double phi0_kernel(double z, const TestFunctionPair& pair);

struct PhiKernelReport {
    std::vector<double> z;
    double max_discrepancy = 0.0;  // over the three routes and the grid
    double decay_constant = 0.0;   // max |phi(z)| (1 + z)
    double phi0_constant = 0.0;    // max |phi_0(z)| (1 + z)^A / z
    double A = 4.0;
};
PhiKernelReport phi_kernel_check(const TestFunctionPair& pair, const std::vector<double>& z_grid, double A = 4.0);

// u, v coprime, h >= 1 and D odd negative squarefree with |D| dividing neither u nor v.
struct SingularInput {
    i64 u = 1;
    i64 v = 1;
    i64 h = 1;
    Discriminant disc;

    i64 w() const { return u * v; }
    // Throws DomainError on a violated invariant; w must be cubefree with no square of a ramified prime.
    void validate() const;
};

struct SeriesValue {
    double value = 0.0;
    double tail = 0.0;  // rigorous bound for the neglected c > C_max
    i64 terms = 0;
};

// xi(n) = prod_{p | n} (1 + chi(p)/p)^{-1}.
double xi_fn(i64 n, const Character& chi);

// Route 1: the c-sum of products rho(-au/(c,u), c/(c,u)) rho(av/(c,v), c/(c,v)) with the a-sum evaluated
// as a Ramanujan or Gauss-Ramanujan sum. Requires C_max >= |D| w.
SeriesValue singular_series_truncated(const SingularInput& in, i64 C_max);
// Route 2: the split S*(h) - S'(h); the third part vanishes under the input invariants.
SeriesValue singular_series_split(const SingularInput& in, i64 C_max);
// Route 3: sum_{d | h} (gamma*(d) - gamma'(d)) from the closed forms.
double singular_series_closed(const SingularInput& in);
// Bound for sum_{c > C_max} of the route-1 terms.
double singular_series_tail(const SingularInput& in, i64 C_max);

// Closed forms for gamma*(d) and gamma'(d); the input's h is ignored.
double gamma_star(i64 d, const SingularInput& in);
double gamma_prime(i64 d, const SingularInput& in);
// The defining c-series, truncated at C_max with a tail bound.
SeriesValue gamma_star_series(i64 d, const SingularInput& in, i64 C_max);
SeriesValue gamma_prime_series(i64 d, const SingularInput& in, i64 C_max);

struct SingularRow {
    i64 u = 0, v = 0, h = 0, D = 0;
    double route1 = 0.0, route2 = 0.0, route3 = 0.0;
    double tail = 0.0;
    double worst_gap = 0.0;
};

// Every valid (u, v, h, D) with u, v <= uv_max and h <= h_max.
std::vector<SingularRow> singular_series_grid(const std::vector<i64>& Ds, int uv_max, int h_max, i64 C_max,
                                              int jobs = 0);
std::string singular_rows_csv(const std::vector<SingularRow>& rows);

struct PeriodicityRow {
    i64 h = 0;
    double value = 0.0;          // S(h)
    double shifted = 0.0;        // S(h + |D|)
    bool same_sign = false;
};
std::vector<PeriodicityRow> singular_series_periodicity(const SingularInput& in, i64 h_max);

// Bessel J_0: power series below 12, Hankel asymptotic expansion from 12 on.
double bessel_j0(double x);

struct VoronoiResult {
    cplx lhs, main, dual;
    double residual = 0.0;   // |lhs - main - dual|
    double tolerance = 0.0;  // 1e-6 |lhs| + 1e-9
    int dual_terms = 0;      // m-terms summed in T(a, c)
    double dual_tail = 0.0;  // size of the last block of dual terms
};

// Smooth weight supported on [X, 2X]: exp(1 - 1/(1 - s^2)) with s = (2x - 3X)/X.
double voronoi_bump(double x, double X);

// Both sides of the twisted Voronoi formula for the bump on [X, 2X].
// Throws NumericalError when a block of 50 dual terms is still above 1e-11 max(1, |lhs|) after 50000 terms.
VoronoiResult voronoi_check(i64 a, i64 c, const Discriminant& disc, double X);

// I_h(u/v) = sum_{um - vn = h} Psi(T log(um/vn)) lambda(m) lambda(n) h(m) h(n) / sqrt(mn).
double I_h_brute(i64 u, i64 v, i64 h, double T, const Discriminant& disc, const CropProfile& profile,
                 const TestFunctionPair& pair);
// The full sum over um != vn, evaluated without any decomposition in h.
double I_full_brute(i64 u, i64 v, double T, const Discriminant& disc, const CropProfile& profile,
                    const TestFunctionPair& pair);
// Predicted main term of I_h: S(h) L(1,chi)^2 / sqrt(uv) int Psi(hT/x) h(x/u) h(x/v) dx/x.
double I_h_main_term(const SingularInput& in, double T, const CropProfile& profile, const TestFunctionPair& pair);

// z*(s) = sum_d gamma*(d) d^{-s}, truncated at d_max (w squarefree).
cplx zeta_gamma_star_direct(cplx s, const SingularInput& in, i64 d_max);
// zeta_D(2)^{-1} zeta_D(s+1) xi(w) prod_{p | w} (1 + chi(p) p^{-s}), where zeta_D drops the Euler factors at p | D.
cplx zeta_gamma_star(cplx s, const SingularInput& in);
// lambda(w) xi(w) phi(|D|) / (zeta_D(2) |D|).
double zeta_gamma_star_residue(const SingularInput& in);

// k*(y) = xi(w)/zeta_D(2) sum_{c | w} chi(c) sum_{(d,D)=1} phi(c d y)/d for squarefree w.
double k_star(double y, const SingularInput& in, const TestFunctionPair& pair);
// Small-y model lambda(w) xi(w) phi(|D|)/(2 zeta_D(2)|D|) {Psi(0) log(y sqrt w) - Psi(0) alpha(D) + alpha0}.
double k_star_small_y(double y, const SingularInput& in, const TestFunctionPair& pair, double alpha0);
// alpha0 from one reference point: solves the small-y model for alpha0 at (y, in).
double calibrate_alpha0(double y, const SingularInput& in, const TestFunctionPair& pair);
// The value the model predicts: 2 int_0^inf phi_0(z) dz/z - Psi(0)(gamma - 1).
double alpha0_predicted(const TestFunctionPair& pair);
// int_0^inf phi_0(z) dz / z.
double phi0_mellin_at_zero(const TestFunctionPair& pair);

// sum_{d < X, (d, D) = 1} (1 - d/X) / d.
double harmonic_coprime(double X, const Discriminant& disc);
// (phi(|D|)/|D|)(log X + gamma - 1 + alpha(D)).
double harmonic_coprime_main(double X, const Discriminant& disc);
// alpha(D) = sum_{p | D} log p / (p - 1).
double alpha_D(const Discriminant& disc);

struct KCoefficients {
    double A = 0.0;
    double B = 0.0;  // Psi(0) phi(|D|) / (2 |D|)
    double X = 0.0;  // T M^2
    double logN = 0.0;
};
KCoefficients k_coefficients(double T, const Discriminant& disc, const CropProfile& profile,
                             const TestFunctionPair& pair);
// K(ratio) = int_X^inf (A - B log x / log N) h(x sqrt(ratio)) h(x / sqrt(ratio)) dx / x.
double K_kernel(double ratio, const KCoefficients& k, const CropProfile& profile);

// J*(u, v) by quadrature of the c, d expansion of k*.
double J_star(const SingularInput& in, double T, const CropProfile& profile, const TestFunctionPair& pair);

// P(delta) = int_{nu+delta}^{nu} (A - B t + B delta)((1-t)^2 - (g1 - g2)^2/4) dt.
double P_delta_numeric(double delta, double A, double B, double nu, double g1_minus_g2);
// Even part of P: ((B/8)(g1-g2)^2 + ((1-nu)/2)(2A - B - B nu)) delta^2 - (B/12) delta^4.
double P_delta_even(double delta, double A, double B, double nu, double g1_minus_g2);

}  // namespace lacunary

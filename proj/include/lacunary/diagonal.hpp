// Convolution coefficients of the mollified polynomials and the diagonal sums built from them.
#pragma once

#include <vector>

#include "lacunary/approxfe.hpp"

namespace lacunary {

// Pointwise multiplicative values from the factorization of n.
i64 lambda0_at(i64 n, const Character& chi);
i64 rho_at(i64 m, const Character& chi);

// h(n) = a(log n / log N) and h*(n) = b*(log n / log N) with b*(x) = b(1 - x + delta).
double crop_h(double n, const CropProfile& p);
double crop_hstar(double n, const CropProfile& p, double delta);

// c(l) = sum_{mn=l} rho(m) lambda(n) g(m) h(n), by a divisor sum.
double conv_c(i64 l, const Discriminant& disc, const CropProfile& p);
// c*(l) with h replaced by h*; requires 0 <= delta <= log 4 / log N.
double conv_cstar(i64 l, const Discriminant& disc, const CropProfile& p, double delta);

// Sieve tables of c and c* for 1 <= l <= bound (index 0 unused). Throws CapacityError above 5e7.
std::vector<double> conv_c_table(const Discriminant& disc, const CropProfile& p, i64 bound);
std::vector<double> conv_cstar_table(const Discriminant& disc, const CropProfile& p, double delta, i64 bound);

// Coefficients c_uv(k) = sum_{mn=k} rho(m) lambda(n) g(um) h(vn) for k <= bound.
std::vector<double> conv_cuv_table(const Discriminant& disc, const CropProfile& p, i64 u, i64 v, i64 bound);

// Sums of c(l)^2 / l over X < l <= Y.
double S_sum(double X, double Y, const Discriminant& disc, const CropProfile& p);
double Sstar_sum(double X, double Y, const Discriminant& disc, const CropProfile& p, double delta);
// Restricted to squarefree l coprime to q.
double Sflat_sum(double X, double Y, i64 q, const Discriminant& disc, const CropProfile& p);

struct SieveConfig {
    Discriminant disc;
    CropProfile profile;
    i64 q = 1;  // squarefree sieve modulus
    int r = 3;  // phi(p) = r/p for p not dividing q

    // q squarefree and divisible by every prime p <= r^2.
    void validate() const;
};

// Completely multiplicative phi with phi(p) = 0 for p | q and r/p otherwise.
double phi_weight(i64 l, const SieveConfig& cfg);

// theta(l) = sum_{m | l} mu(m) g(m) h(l/m); the operation requires squarefree l.
double theta_weight(i64 l, const CropProfile& p);
// The same convolution for every l <= bound, without the squarefree restriction.
std::vector<double> theta_table(const CropProfile& p, i64 bound);
// T(X, Y) = sum_{X < l <= Y} phi(l) theta(l)^2.
double T_sum(double X, double Y, const SieveConfig& cfg);

// Dirichlet coefficient of (-1)^j L^(j)/L at n, scaled by (log M)^{-j}.
double gen_vonmangoldt(int j, i64 n, const Discriminant& disc, double scaleM);

struct SupportReport {
    i64 checked = 0;            // l <= M with omega(l) > r
    i64 violations = 0;         // of those, |c(l)| > 1e-12
    i64 first_violation = 0;    // smallest violating l, 0 if none
    double max_abs = 0.0;       // largest |c(l)| among the checked l
    i64 checked_wide = 0;       // l <= M with omega(l) > r + 1
    i64 violations_wide = 0;
};

// Checks that c(l) vanishes for l <= M with more than r distinct prime factors, and separately for
// more than r + 1. The profile's M and r are used.
SupportReport lemma71_support_check(const Discriminant& disc, const CropProfile& p);

// sum_{X <= m <= Xmax, (m,k) = 1} mu(m) tau_r(m) (log m)^a / m
double moebius_partial(i64 X, i64 Xmax, i64 k = 1, int r = 1, int a = 0);

struct PhiCountResult {
    double value = 0.0;               // sum_{l <= x} phi(l)
    std::vector<double> coefficients;  // least-squares P(log x), ascending powers
    std::vector<double> grid;         // geometric x-grid of the fit
    std::vector<double> residuals;    // value - P(log x) on the grid
    double leading_term = 0.0;        // top coefficient times (log x)^r
    double fit_residual = 0.0;        // |value - P(log x)| at x
    double leading_constant = 0.0;    // the residue prediction of the top coefficient
};

// Sum of phi over l <= x with a degree-r fit in log x on `points` geometric grid points from 10 to x.
PhiCountResult phi_count(double x, const SieveConfig& cfg, int points = 40);

struct SflatDecomposition {
    double S = 0.0;          // S(X, Y)
    double regrouped = 0.0;  // sum over every d of sum_k c(dk)^2 / dk, equal to S
    double bound = 0.0;      // sum_{d <= U} tau(d)^6 / d sum_{uv=d} Sflat_uv(X/d, Y/d)
    double tail_bound = 0.0;  // U^{-1} (log Y)^48
    double U = 0.0;
    i64 d_count = 0;          // admissible d <= U that were used
};

// Decomposition l = d k with k squarefree and (k, dq) = 1; U <= 0 selects min((log Y)^50, Y).
SflatDecomposition sflat_decomposition(double X, double Y, const SieveConfig& cfg, double U = 0.0);

}  // namespace lacunary

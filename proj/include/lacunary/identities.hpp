// Exact lambda-function identities, the E_00 / E_ab triple sums and the reconstruction of E_00 from the
// lacunary sum W.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "lacunary/approxfe.hpp"

namespace lacunary {

// u, v coprime with w = uv squarefree and lambda(w) != 0.
struct LambdaContext {
    i64 u = 1;
    i64 v = 1;
    Discriminant disc;

    i64 w() const { return u * v; }
    void validate() const;  // DomainError on a violated invariant
};

// lambda(u, v) = sum_{c | uv} chi(c) log(c/u) log(c/v).
double lambda_uv(i64 u, i64 v, const Discriminant& disc);
// lambda_j(w) = sum_{c | w} chi(c) (log(c / sqrt w))^j.
double lambda_j(i64 w, int j, const Discriminant& disc);
// Lambda_j(q) = sum_{d | q} mu(d) log(q/d)^j; Lambda_0 = [q = 1], Lambda_1 = von Mangoldt.
double mangoldt_power(i64 q, int j);
// Lambda*_j(q) = tau((q,D)) / (2^j tau(q)) sum_{mn = q} chi(m) sum_{a+b=j} C(j,a) (-1)^b Lambda_a(m) Lambda_b(n).
double lambda_star(i64 q, int j, const Discriminant& disc);

struct IdentityCheck {
    std::string name;
    i64 u = 0, v = 0, D = 0, q = 0;
    double lhs = 0.0, rhs = 0.0;
};

struct IdentityReport {
    int checks = 0;
    double worst = 0.0;  // largest |lhs - rhs| / max(1, |lhs|, |rhs|)
    std::vector<IdentityCheck> failures;
    bool ok() const { return failures.empty(); }
};

// All identities for one (u, v, D): the lambda(u,v) split, the binomial product rule and its j = 2, 4 cases,
// the log^2 expansion, the Lambda* divisor formula for j in {2, 4}, the Lambda* form of lambda(u,v), and the
// complementary-divisor vanishing when chi(w) = 1. The even-only product forms and the Lambda* form of
// lambda(u,v) assume the odd moments of u or v vanish, so they are checked only when u or v is coprime to D.
IdentityReport identity_suite(const LambdaContext& ctx, double tol = 1e-10);
// identity_suite over every valid coprime squarefree u, v <= uv_max for each D.
IdentityReport identity_grid(const std::vector<i64>& Ds, i64 uv_max, int jobs = 0, double tol = 1e-10);
// |Lambda*_j(q)| <= 2^{-j} Lambda_j(q) for 1 <= q <= q_max and the listed j.
IdentityReport lambda_star_bound_check(const Discriminant& disc, i64 q_max, const std::vector<int>& js);
// Throws IdentityFailure naming the first offending check.
void require_identities(const IdentityReport& report);

// E_00 = sum_e sum_{(u,v)=1} rho(eu) rho(ev) / (euv) g(eu) g(ev) lambda(uv) xi(uv) over squarefree eu, ev.
// profile supplies M and r.
double E00_sum(const Discriminant& disc, const CropProfile& profile);
// E_00 with the roles of u and v exchanged in the loop order.
double E00_sum_swapped(const Discriminant& disc, const CropProfile& profile);
// E_00(q, r): crops g(equ), g(erv) and e u v coprime to q r.
double E00_scaled(const Discriminant& disc, const CropProfile& profile, i64 q, i64 r);
// E_ab with the inner sums sum_{q | u} Lambda*_a(q) sum_{r | v} Lambda*_b(r).
double E_ab_sum(const Discriminant& disc, const CropProfile& profile, int a, int b);
// E_ab regrouped by (q, r) over E00_scaled.
double E_ab_scaled(const Discriminant& disc, const CropProfile& profile, int a, int b);

// tilde-lambda(p) = (1 + chi(p))^2 (1 + chi(p)/p)^{-2}.
double lambda_tilde_prime(i64 p, const Character& chi);
// R~(1) by its Euler product over p <= P. tail bounds |R~(1) - value|.
struct EulerProduct {
    double value = 0.0;
    double tail = 0.0;
};
EulerProduct R_tilde_one(const Discriminant& disc, i64 P);
// zeta(2)^{-2} prod_{p | D} (1 - 1/p) / (1 - p^{-2})^2.
double R_tilde_one_closed(const Discriminant& disc);

// W over (N^e0, N^e1] minus W over (N^e1, N^e2]. The exponents must be an arithmetic progression.
struct WConfig {
    Discriminant disc;
    double N = 1e3;
    CropProfile profile;  // M and r of the mollifier crop
    std::array<double, 3> exponents{1.0, 2.0, 3.0};
    int jobs = 0;
    void validate() const;  // DomainError; CapacityError when N^e2 > 1e9
};
struct WBlocks {
    double lower = 0.0;  // sum over (N^e0, N^e1]
    double upper = 0.0;  // sum over (N^e1, N^e2]
};
// Each block in its own sieve pass.
WBlocks W_blocks(const WConfig& cfg);
// One signed pass over (N^e0, N^e2].
double W_sum(const WConfig& cfg);
// The same W from the divisor pairs (m1, m2) and partial sums of tilde-lambda(k)/k.
double W_from_pairs(const WConfig& cfg);
// E_00 from the (m1, m2) pairs: sum mu mu g g / (xi xi) tilde-lambda([m1,m2]) / [m1,m2].
double E00_from_pairs(const Discriminant& disc, const CropProfile& profile);

struct ReconstructionReport {
    i64 D = 0;
    double M = 0.0;
    int r = 0;
    std::array<double, 3> exponents{};
    std::vector<double> N_grid;
    double E00 = 0.0;
    double R1 = 0.0;
    double L1 = 0.0;
    std::vector<double> W;
    std::vector<double> predicted;  // -R~(1) (L(1,chi) d log N)^2 E_00 with d the exponent step
    std::vector<double> residuals;
    double fitted_decay_exponent = 0.0;  // least-squares slope of log residual against log N
    double quarter_constant = 0.0;       // max residual N^{1/4}
    bool monotone = false;
    std::string to_json() const;
};
ReconstructionReport reconstruction_check(const Discriminant& disc, const std::vector<double>& N_grid,
                                          const CropProfile& profile, std::array<double, 3> exponents = {1, 2, 3},
                                          int jobs = 0);

// theta_a(l) = sum_{m | l} g(m) mu(m) / xi(m) (log m / log N)^a.
double theta_a(i64 l, int a, const Discriminant& disc, const CropProfile& profile);
// theta_a(l; x) with the extra factor h(x/m).
double theta_a_x(i64 l, int a, double x, const Discriminant& disc, const CropProfile& profile);

}  // namespace lacunary

#include "lacunary/diagonal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lacunary {

namespace {

constexpr i64 kMaxTable = 50'000'000;

void check_capacity(i64 bound) {
    if (bound > kMaxTable) throw CapacityError("table bound exceeds the desk limit of 5e7");
}

i64 floor_bound(double Y) { return static_cast<i64>(std::floor(Y + 1e-9)); }

// Generic sieve convolution sum_{mn=l} left(m) right(n) for l <= bound.
template <class L, class R>
std::vector<double> convolve(i64 left_max, i64 right_max, i64 bound, L&& left, R&& right) {
    check_capacity(bound);
    std::vector<double> rv(static_cast<std::size_t>(std::min(right_max, bound) + 1), 0.0);
    for (i64 n = 1; n < static_cast<i64>(rv.size()); ++n) rv[n] = right(n);
    std::vector<double> out(static_cast<std::size_t>(bound + 1), 0.0);
    const i64 mmax = std::min(left_max, bound);
    for (i64 m = 1; m <= mmax; ++m) {
        const double lm = left(m);
        if (lm == 0.0) continue;
        const i64 nmax = std::min<i64>(static_cast<i64>(rv.size()) - 1, bound / m);
        for (i64 n = 1; n <= nmax; ++n)
            if (rv[n] != 0.0) out[m * n] += lm * rv[n];
    }
    return out;
}

i64 mollifier_max(const CropProfile& p) { return std::max<i64>(1, static_cast<i64>(std::floor(p.M))); }

i64 h_max(const CropProfile& p) {
    return static_cast<i64>(std::floor(std::exp(p.alpha * std::log(p.N)))) + 1;
}

bool coprime(i64 a, i64 b) { return std::gcd(a, b) == 1; }

// Solves the small dense system A x = b by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        if (A[c][c] == 0.0) throw NumericalError("singular least-squares system");
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = A[r][c] / A[c][c];
            for (std::size_t k = c; k < n; ++k) A[r][k] -= f * A[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
        x[i] = s / A[i][i];
    }
    return x;
}

// phi(l) for all l <= bound through the smallest-prime-factor sieve.
std::vector<double> phi_table(i64 bound, const SieveConfig& cfg) {
    const auto spf = smallest_prime_factor_table(bound);
    std::vector<double> phi(static_cast<std::size_t>(bound + 1), 0.0);
    if (bound >= 1) phi[1] = 1.0;
    for (i64 l = 2; l <= bound; ++l) {
        const i64 p = spf[l];
        phi[l] = (cfg.q % p == 0) ? 0.0 : phi[l / p] * cfg.r / static_cast<double>(p);
    }
    return phi;
}

}  // namespace

i64 lambda0_at(i64 n, const Character& chi) {
    i64 v = 1;
    for (auto [p, a] : factorize(n)) {
        const int x = chi(p);
        if (x == 1) v *= a + 1;
        else if (x == -1) v *= (a % 2 == 0) ? 1 : 0;
    }
    return v;
}

i64 rho_at(i64 m, const Character& chi) {
    i64 v = 1;
    for (auto [p, a] : factorize(m)) {
        const int x = chi(p);
        if (a == 1) v *= -(1 + x);
        else if (a == 2) v *= x;
        else return 0;
    }
    return v;
}

double crop_h(double n, const CropProfile& p) { return crop_a(std::log(n) / std::log(p.N), p); }

double crop_hstar(double n, const CropProfile& p, double delta) {
    return crop_b(1.0 - std::log(n) / std::log(p.N) + delta, p);
}

double conv_c(i64 l, const Discriminant& disc, const CropProfile& p) {
    if (l < 1) throw DomainError("conv_c requires l >= 1");
    const Character chi(disc.D);
    KahanSum<double> acc;
    for (i64 m : divisors(l)) {
        const double g = crop_g(static_cast<double>(m), p);
        if (g == 0.0) continue;
        const i64 n = l / m;
        acc += rho_at(m, chi) * lambda0_at(n, chi) * g * crop_h(static_cast<double>(n), p);
    }
    return acc.value();
}

double conv_cstar(i64 l, const Discriminant& disc, const CropProfile& p, double delta) {
    if (l < 1) throw DomainError("conv_cstar requires l >= 1");
    if (delta < 0.0 || delta > std::log(4.0) / std::log(p.N) + 1e-15)
        throw DomainError("conv_cstar requires 0 <= delta <= log 4 / log N");
    const Character chi(disc.D);
    KahanSum<double> acc;
    for (i64 m : divisors(l)) {
        const double g = crop_g(static_cast<double>(m), p);
        if (g == 0.0) continue;
        const i64 n = l / m;
        acc += rho_at(m, chi) * lambda0_at(n, chi) * g * crop_hstar(static_cast<double>(n), p, delta);
    }
    return acc.value();
}

std::vector<double> conv_c_table(const Discriminant& disc, const CropProfile& p, i64 bound) {
    return conv_cuv_table(disc, p, 1, 1, bound);
}

std::vector<double> conv_cstar_table(const Discriminant& disc, const CropProfile& p, double delta, i64 bound) {
    if (delta < 0.0 || delta > std::log(4.0) / std::log(p.N) + 1e-15)
        throw DomainError("conv_cstar requires 0 <= delta <= log 4 / log N");
    check_capacity(bound);
    const Character chi(disc.D);
    const i64 mmax = std::min(mollifier_max(p), bound);
    const auto rho = rho_table(chi, mmax);
    const auto lam = lambda0_table(chi, bound);
    return convolve(
        mmax, bound, bound, [&](i64 m) { return rho[m] * crop_g(static_cast<double>(m), p); },
        [&](i64 n) { return lam[n] == 0 ? 0.0 : lam[n] * crop_hstar(static_cast<double>(n), p, delta); });
}

std::vector<double> conv_cuv_table(const Discriminant& disc, const CropProfile& p, i64 u, i64 v, i64 bound) {
    if (u < 1 || v < 1) throw DomainError("conv_cuv_table requires u, v >= 1");
    check_capacity(bound);
    const Character chi(disc.D);
    const i64 mmax = std::min(mollifier_max(p) / u, bound);
    const i64 nmax = std::min(h_max(p) / v + 1, bound);
    const auto rho = rho_table(chi, std::max<i64>(mmax, 1));
    const auto lam = lambda0_table(chi, std::max<i64>(nmax, 1));
    return convolve(
        mmax, nmax, bound, [&](i64 m) { return rho[m] * crop_g(static_cast<double>(u * m), p); },
        [&](i64 n) { return lam[n] == 0 ? 0.0 : lam[n] * crop_h(static_cast<double>(v * n), p); });
}

double S_sum(double X, double Y, const Discriminant& disc, const CropProfile& p) {
    if (!(X >= 1.0 && X <= Y)) throw DomainError("S requires 1 <= X <= Y");
    const i64 hi = floor_bound(Y), lo = floor_bound(X);
    if (hi <= lo) return 0.0;
    const auto c = conv_c_table(disc, p, hi);
    KahanSum<double> acc;
    for (i64 l = lo + 1; l <= hi; ++l) acc += c[l] * c[l] / static_cast<double>(l);
    return acc.value();
}

double Sstar_sum(double X, double Y, const Discriminant& disc, const CropProfile& p, double delta) {
    if (!(X >= 1.0 && X <= Y)) throw DomainError("S* requires 1 <= X <= Y");
    const i64 hi = floor_bound(Y), lo = floor_bound(X);
    if (hi <= lo) return 0.0;
    const auto c = conv_cstar_table(disc, p, delta, hi);
    KahanSum<double> acc;
    for (i64 l = lo + 1; l <= hi; ++l) acc += c[l] * c[l] / static_cast<double>(l);
    return acc.value();
}

double Sflat_sum(double X, double Y, i64 q, const Discriminant& disc, const CropProfile& p) {
    if (!(X >= 1.0 && X <= Y)) throw DomainError("S-flat requires 1 <= X <= Y");
    if (q < 1 || !is_squarefree(q)) throw DomainError("S-flat requires a squarefree q");
    const i64 hi = floor_bound(Y), lo = floor_bound(X);
    if (hi <= lo) return 0.0;
    const auto c = conv_c_table(disc, p, hi);
    const auto mu = mobius_table(hi);
    KahanSum<double> acc;
    for (i64 l = lo + 1; l <= hi; ++l)
        if (mu[l] != 0 && coprime(l, q)) acc += c[l] * c[l] / static_cast<double>(l);
    return acc.value();
}

void SieveConfig::validate() const {
    profile.validate();
    if (q < 1 || !is_squarefree(q)) throw DomainError("sieve modulus q must be squarefree");
    if (r < 1) throw DomainError("sieve dimension r must be >= 1");
    for (i64 p : primes_up_to(static_cast<i64>(r) * r))
        if (q % p != 0) throw DomainError("sieve modulus q must be divisible by every prime p <= r^2");
}

double phi_weight(i64 l, const SieveConfig& cfg) {
    if (l < 1) throw DomainError("phi requires l >= 1");
    double v = 1.0;
    for (auto [p, a] : factorize(l)) {
        if (cfg.q % p == 0) return 0.0;
        v *= std::pow(cfg.r / static_cast<double>(p), a);
    }
    return v;
}

double theta_weight(i64 l, const CropProfile& p) {
    if (l < 1 || !is_squarefree(l)) throw DomainError("theta requires squarefree l >= 1");
    KahanSum<double> acc;
    for (i64 m : divisors(l)) {
        const double g = crop_g(static_cast<double>(m), p);
        if (g == 0.0) continue;
        acc += mobius(m) * g * crop_h(static_cast<double>(l / m), p);
    }
    return acc.value();
}

std::vector<double> theta_table(const CropProfile& p, i64 bound) {
    check_capacity(bound);
    const i64 mmax = std::min(mollifier_max(p), bound);
    const auto mu = mobius_table(std::max<i64>(mmax, 1));
    return convolve(
        mmax, std::min(h_max(p), bound), bound,
        [&](i64 m) { return mu[m] * crop_g(static_cast<double>(m), p); },
        [&](i64 n) { return crop_h(static_cast<double>(n), p); });
}

double T_sum(double X, double Y, const SieveConfig& cfg) {
    cfg.validate();
    if (!(X >= 1.0 && X <= Y)) throw DomainError("T requires 1 <= X <= Y");
    const i64 hi = floor_bound(Y), lo = floor_bound(X);
    if (hi <= lo) return 0.0;
    const auto th = theta_table(cfg.profile, hi);
    const auto phi = phi_table(hi, cfg);
    KahanSum<double> acc;
    for (i64 l = lo + 1; l <= hi; ++l)
        if (phi[l] != 0.0) acc += phi[l] * th[l] * th[l];
    return acc.value();
}

double gen_vonmangoldt(int j, i64 n, const Discriminant& disc, double scaleM) {
    if (j < 0) throw DomainError("von Mangoldt degree must be >= 0");
    if (n < 1) throw DomainError("von Mangoldt index must be >= 1");
    if (!(scaleM > 1.0)) throw DomainError("von Mangoldt scale M must exceed 1");
    const Character chi(disc.D);
    const double lm = std::log(scaleM);
    KahanSum<double> acc;
    for (i64 d : divisors(n)) {
        const i64 r = rho_at(d, chi);
        if (r == 0) continue;
        const i64 e = n / d;
        const i64 lam = lambda0_at(e, chi);
        if (lam == 0) continue;
        acc += static_cast<double>(r * lam) * std::pow(std::log(static_cast<double>(e)) / lm, j);
    }
    return acc.value();
}

SupportReport lemma71_support_check(const Discriminant& disc, const CropProfile& p) {
    const i64 bound = mollifier_max(p);
    const auto c = conv_c_table(disc, p, bound);
    const auto spf = smallest_prime_factor_table(bound);
    SupportReport rep;
    for (i64 l = 2; l <= bound; ++l) {
        int w = 0;
        for (i64 x = l; x > 1;) {
            const i64 q = spf[x];
            ++w;
            while (x % q == 0) x /= q;
        }
        if (w <= p.r) continue;
        ++rep.checked;
        rep.max_abs = std::max(rep.max_abs, std::abs(c[l]));
        const bool bad = std::abs(c[l]) > 1e-12;
        if (bad) {
            ++rep.violations;
            if (rep.first_violation == 0) rep.first_violation = l;
        }
        if (w > p.r + 1) {
            ++rep.checked_wide;
            if (bad) ++rep.violations_wide;
        }
    }
    return rep;
}

double moebius_partial(i64 X, i64 Xmax, i64 k, int r, int a) {
    if (X < 1 || Xmax < X) throw DomainError("moebius_partial requires 1 <= X <= Xmax");
    if (r < 1 || a < 0 || k < 1) throw DomainError("moebius_partial requires r >= 1, a >= 0, k >= 1");
    check_capacity(Xmax);
    const auto mu = mobius_table(Xmax);
    std::vector<i64> tr;
    if (r > 1) tr = tau_r_table(Xmax, r);
    KahanSum<double> acc;
    for (i64 m = X; m <= Xmax; ++m) {
        if (mu[m] == 0 || !coprime(m, k)) continue;
        const double t = r > 1 ? static_cast<double>(tr[m]) : 1.0;
        const double lg = a > 0 ? std::pow(std::log(static_cast<double>(m)), a) : 1.0;
        acc += mu[m] * t * lg / static_cast<double>(m);
    }
    return acc.value();
}

PhiCountResult phi_count(double x, const SieveConfig& cfg, int points) {
    cfg.validate();
    if (!(x >= 10.0)) throw DomainError("phi_count requires x >= 10");
    if (points < cfg.r + 2) throw DomainError("phi_count needs more grid points than fit coefficients");
    const i64 bound = floor_bound(x);
    check_capacity(bound);
    const auto phi = phi_table(bound, cfg);
    std::vector<double> prefix(static_cast<std::size_t>(bound + 1), 0.0);
    KahanSum<double> run;
    for (i64 l = 1; l <= bound; ++l) {
        run += phi[l];
        prefix[l] = run.value();
    }
    PhiCountResult res;
    res.value = prefix[bound];
    const int deg = cfg.r;
    const double lx = std::log(x);
    std::vector<double> values;
    for (int i = 0; i < points; ++i) {
        const double xi = std::exp(std::log(10.0) + (lx - std::log(10.0)) * i / (points - 1));
        res.grid.push_back(xi);
        values.push_back(prefix[std::min(bound, floor_bound(xi))]);
    }
    // Least squares in the scaled variable L / log x for conditioning.
    std::vector<std::vector<double>> A(deg + 1, std::vector<double>(deg + 1, 0.0));
    std::vector<double> b(deg + 1, 0.0);
    for (int i = 0; i < points; ++i) {
        const double u = std::log(res.grid[i]) / lx;
        std::vector<double> pw(deg + 1, 1.0);
        for (int k = 1; k <= deg; ++k) pw[k] = pw[k - 1] * u;
        for (int j = 0; j <= deg; ++j) {
            b[j] += pw[j] * values[i];
            for (int k = 0; k <= deg; ++k) A[j][k] += pw[j] * pw[k];
        }
    }
    std::vector<double> scaled = solve_dense(A, b);
    res.coefficients.resize(deg + 1);
    for (int k = 0; k <= deg; ++k) res.coefficients[k] = scaled[k] / std::pow(lx, k);
    auto poly = [&](double L) {
        double s = 0.0;
        for (int k = deg; k >= 0; --k) s = s * L + res.coefficients[k];
        return s;
    };
    for (int i = 0; i < points; ++i) res.residuals.push_back(values[i] - poly(std::log(res.grid[i])));
    res.leading_term = res.coefficients[deg] * std::pow(lx, deg);
    res.fit_residual = std::abs(res.value - poly(lx));
    // Top coefficient predicted by the pole of order r of the generating series at s = 1.
    double C = 1.0;
    double fact = 1.0;
    for (int k = 2; k <= deg; ++k) fact *= k;
    for (i64 p : primes_up_to(2'000'000)) {
        const double pd = static_cast<double>(p);
        C *= std::pow(1.0 - 1.0 / pd, deg);
        if (cfg.q % p != 0) C /= 1.0 - deg / pd;
    }
    res.leading_constant = C / fact;
    return res;
}

SflatDecomposition sflat_decomposition(double X, double Y, const SieveConfig& cfg, double U) {
    cfg.validate();
    if (!(X >= 1.0 && X < Y)) throw DomainError("decomposition requires 1 <= X < Y");
    const Discriminant& disc = cfg.disc;
    const CropProfile& p = cfg.profile;
    const i64 hi = floor_bound(Y), lo = floor_bound(X);
    SflatDecomposition res;
    res.S = S_sum(X, Y, disc, p);
    const double logY = std::log(Y);
    res.U = U > 0.0 ? U : std::min(std::pow(logY, 50.0), Y);
    res.tail_bound = std::pow(logY, 48.0) / res.U;

    const Character chi(disc.D);
    const auto mu = mobius_table(hi);
    KahanSum<double> regrouped, bound_sum;
    for (i64 d = 1; d <= hi; ++d) {
        // admissible d: every prime of d outside q divides d at least twice
        bool ok = true;
        for (auto [pr, a] : factorize(d))
            if (cfg.q % pr != 0 && a < 2) ok = false;
        if (!ok) continue;
        const i64 kmax = hi / d;
        if (kmax < 1) continue;
        const i64 kmin = lo / d;  // k > X/d
        std::vector<std::pair<double, std::vector<double>>> parts;  // rho(u) lambda(v), c_uv
        for (i64 u : divisors(d)) {
            const i64 v = d / u;
            const double w = static_cast<double>(rho_at(u, chi) * lambda0_at(v, chi));
            parts.emplace_back(w, conv_cuv_table(disc, p, u, v, kmax));
        }
        const bool in_bound = static_cast<double>(d) <= res.U;
        if (in_bound) ++res.d_count;
        const double tau6 = std::pow(static_cast<double>(tau(d)), 6);
        for (i64 k = kmin + 1; k <= kmax; ++k) {
            if (d * k <= lo) continue;
            if (mu[k] == 0 || !coprime(k, d * cfg.q)) continue;
            double c = 0.0, sq = 0.0;
            for (const auto& [w, t] : parts) {
                c += w * t[k];
                sq += t[k] * t[k];
            }
            regrouped += c * c / static_cast<double>(d * k);
            if (in_bound) bound_sum += tau6 * sq / static_cast<double>(d * k);
        }
    }
    res.regrouped = regrouped.value();
    res.bound = bound_sum.value();
    return res;
}

}  // namespace lacunary

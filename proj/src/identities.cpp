#include "lacunary/identities.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "lacunary/diagonal.hpp"
#include "lacunary/offdiagonal.hpp"
#include "lacunary/parallel.hpp"

namespace lacunary {

namespace {

double binom(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

double ipow(double x, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= x;
    return r;
}

// lambda = 1 * chi evaluated as a real.
double lam(i64 n, const Character& chi) { return static_cast<double>(lambda0_at(n, chi)); }

struct Checker {
    IdentityReport& rep;
    double tol;
    i64 u, v, D;
    void operator()(const char* name, double lhs, double rhs, i64 q = 0) {
        ++rep.checks;
        const double err = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
        rep.worst = std::max(rep.worst, err);
        if (err > tol) rep.failures.push_back({name, u, v, D, q, lhs, rhs});
    }
};

void merge(IdentityReport& into, const IdentityReport& from) {
    into.checks += from.checks;
    into.worst = std::max(into.worst, from.worst);
    into.failures.insert(into.failures.end(), from.failures.begin(), from.failures.end());
}

// sum_{q | n} f(q)
template <class F>
double divisor_sum(i64 n, F&& f) {
    KahanSum<double> acc;
    for (i64 q : divisors(n)) acc += f(q);
    return acc.value();
}

}  // namespace

void LambdaContext::validate() const {
    if (u < 1 || v < 1) throw DomainError("lambda context requires u, v >= 1");
    if (std::gcd(u, v) != 1) throw DomainError("lambda context requires (u, v) = 1");
    if (!is_squarefree(w())) throw DomainError("lambda context requires uv squarefree");
    if (lambda0_at(w(), Character(disc.D)) == 0) throw DomainError("lambda context requires lambda(uv) != 0");
}

double lambda_uv(i64 u, i64 v, const Discriminant& disc) {
    const Character chi(disc.D);
    const double lu = std::log(static_cast<double>(u)), lv = std::log(static_cast<double>(v));
    return divisor_sum(u * v, [&](i64 c) {
        const double lc = std::log(static_cast<double>(c));
        return chi(c) * (lc - lu) * (lc - lv);
    });
}

double lambda_j(i64 w, int j, const Discriminant& disc) {
    if (j < 0) throw DomainError("lambda_j requires j >= 0");
    const Character chi(disc.D);
    const double half = 0.5 * std::log(static_cast<double>(w));
    return divisor_sum(w, [&](i64 c) { return chi(c) * ipow(std::log(static_cast<double>(c)) - half, j); });
}

double mangoldt_power(i64 q, int j) {
    if (q < 1 || j < 0) throw DomainError("Lambda_j requires q >= 1 and j >= 0");
    if (j == 0) return q == 1 ? 1.0 : 0.0;
    return divisor_sum(q, [&](i64 d) {
        const int m = mobius(d);
        return m == 0 ? 0.0 : m * ipow(std::log(static_cast<double>(q / d)), j);
    });
}

double lambda_star(i64 q, int j, const Discriminant& disc) {
    if (q < 1 || j < 0) throw DomainError("Lambda*_j requires q >= 1 and j >= 0");
    const Character chi(disc.D);
    const double inner = divisor_sum(q, [&](i64 m) {
        const i64 n = q / m;
        double s = 0.0;
        for (int a = 0; a <= j; ++a) {
            const int b = j - a;
            s += binom(j, a) * (b % 2 ? -1.0 : 1.0) * mangoldt_power(m, a) * mangoldt_power(n, b);
        }
        return chi(m) * s;
    });
    return static_cast<double>(tau(std::gcd(q, disc.absD))) / (std::ldexp(1.0, j) * static_cast<double>(tau(q))) *
           inner;
}

// ---------------------------------------------------------------------------
// Identity suite

IdentityReport identity_suite(const LambdaContext& ctx, double tol) {
    ctx.validate();
    IdentityReport rep;
    const i64 u = ctx.u, v = ctx.v, w = ctx.w();
    const Discriminant& disc = ctx.disc;
    const Character chi(disc.D);
    Checker check{rep, tol, u, v, disc.D};

    double lu[5], lv[5], lw[5];
    for (int j = 0; j <= 4; ++j) {
        lu[j] = lambda_j(u, j, disc);
        lv[j] = lambda_j(v, j, disc);
        lw[j] = lambda_j(w, j, disc);
    }
    const double lam_u = lam(u, chi), lam_v = lam(v, chi), lam_w = lam(w, chi);
    const double luv = lambda_uv(u, v, disc);
    const double half_log_ratio = 0.5 * std::log(static_cast<double>(u) / static_cast<double>(v));

    check("lambda(u,v) split", luv, lw[2] - lam_w * half_log_ratio * half_log_ratio);
    for (int j = 1; j <= 4; ++j) {
        double rhs = 0.0;
        for (int a = 0; a <= j; ++a) rhs += binom(j, a) * lu[a] * lv[j - a];
        check("binomial product rule", lw[j], rhs, j);
    }
    // The even-only forms drop lambda_1(u) lambda_1(v) and lambda_3 cross terms. These vanish when u or v is
    // coprime to D (then chi = 1 on it), which always holds for prime |D|.
    const bool odd_free = std::gcd(u, disc.absD) == 1 || std::gcd(v, disc.absD) == 1;
    if (odd_free) {
        check("lambda_2 product", lw[2], lam_v * lu[2] + lam_u * lv[2]);
        check("lambda_4 product", lw[4], lam_v * lu[4] + 6.0 * lu[2] * lv[2] + lam_u * lv[4]);
    }

    auto sum_over = [](i64 n, auto&& f) { return divisor_sum(n, f); };
    const double L2u = sum_over(u, [](i64 q) { return mangoldt_power(q, 2); });
    const double L2v = sum_over(v, [](i64 q) { return mangoldt_power(q, 2); });
    const double L1u = sum_over(u, [](i64 q) { return mangoldt_power(q, 1); });
    const double L1v = sum_over(v, [](i64 q) { return mangoldt_power(q, 1); });
    const double lr = std::log(static_cast<double>(u) / static_cast<double>(v));
    check("log^2 expansion", lr * lr, L2u - 2.0 * L1u * L1v + L2v);

    double star_u[5], star_v[5];
    for (int j = 0; j <= 4; ++j) {
        star_u[j] = sum_over(u, [&](i64 q) { return lambda_star(q, j, disc); });
        star_v[j] = sum_over(v, [&](i64 q) { return lambda_star(q, j, disc); });
    }
    for (int j : {2, 4}) {
        check("Lambda* divisor formula (u)", lu[j], lam_u * star_u[j], j);
        check("Lambda* divisor formula (v)", lv[j], lam_v * star_v[j], j);
        double s = 0.0;
        for (int a = 0; a <= j; ++a) s += binom(j, a) * star_u[a] * star_v[j - a];
        check("Lambda* product formula", lw[j], lam_w * s, j);
    }
    if (odd_free) {
        const double lemma = lam_w * ((star_u[2] - 0.25 * L2u) + (star_v[2] - 0.25 * L2v) + 0.5 * L1u * L1v);
        check("lambda(u,v) via Lambda*", luv, lemma);
    }

    if (chi(w) == 1) {
        check("complementary-divisor vanishing", lw[1], 0.0);
        check("odd lambda_3 vanishing", lw[3], 0.0);
    }
    return rep;
}

IdentityReport identity_grid(const std::vector<i64>& Ds, i64 uv_max, int jobs, double tol) {
    std::vector<LambdaContext> ctxs;
    for (i64 D : Ds) {
        const Discriminant disc = Discriminant::make(D);
        for (i64 u = 1; u <= uv_max; ++u)
            for (i64 v = 1; v <= uv_max; ++v) {
                LambdaContext c{u, v, disc};
                try {
                    c.validate();
                } catch (const DomainError&) {
                    continue;
                }
                ctxs.push_back(c);
            }
    }
    const auto parts = parallel_map(ctxs.size(), jobs, [&](std::size_t i) { return identity_suite(ctxs[i], tol); });
    IdentityReport rep;
    for (const auto& p : parts) merge(rep, p);
    return rep;
}

IdentityReport lambda_star_bound_check(const Discriminant& disc, i64 q_max, const std::vector<int>& js) {
    IdentityReport rep;
    for (int j : js)
        for (i64 q = 1; q <= q_max; ++q) {
            const double star = lambda_star(q, j, disc), bound = std::ldexp(mangoldt_power(q, j), -j);
            ++rep.checks;
            const double excess = std::abs(star) - bound;
            // Both sides vanish exactly off the support; allow round-off relative to the bound.
            if (excess > 1e-10 * std::max(1.0, bound)) rep.failures.push_back({"Lambda* bound", 0, 0, disc.D, q, star, bound});
            rep.worst = std::max(rep.worst, std::max(0.0, excess) / std::max(1.0, bound));
        }
    return rep;
}

void require_identities(const IdentityReport& report) {
    if (report.ok()) return;
    const IdentityCheck& f = report.failures.front();
    std::ostringstream os;
    os.precision(17);
    os << f.name << " failed at u=" << f.u << " v=" << f.v << " D=" << f.D << " q=" << f.q << ": " << f.lhs
       << " vs " << f.rhs << " (" << report.failures.size() << " failures in " << report.checks << " checks)";
    throw IdentityFailure(os.str());
}

// ---------------------------------------------------------------------------
// E_00 and E_ab

namespace {

struct Weights {
    Character chi;
    i64 M;  // crop support bound: g(m) = 0 for m >= M
    std::vector<double> g;
    explicit Weights(const Discriminant& disc, const CropProfile& p)
        : chi(disc.D), M(static_cast<i64>(std::ceil(p.M))) {
        g.assign(static_cast<std::size_t>(M + 1), 0.0);
        for (i64 m = 1; m <= M; ++m) g[m] = crop_g(static_cast<double>(m), p);
    }
    double crop(i64 m) const { return m <= M ? g[m] : 0.0; }
    double rho(i64 m) const { return static_cast<double>(rho_at(m, chi)); }
    double lamxi(i64 n) const { return lam(n, chi) * xi_fn(n, chi); }
};

// Sum over e, u, v with g(equ) g(erv) != 0, eu and ev squarefree, (u,v) = 1 and euv coprime to qr.
template <class F>
double triple_sum(const Weights& W, i64 q, i64 r, bool swap, F&& extra) {
    const i64 qr = q * r;
    KahanSum<double> acc;
    for (i64 e = 1; e * q <= W.M || e * r <= W.M; ++e) {
        if (!is_squarefree(e) || std::gcd(e, qr) != 1) continue;
        for (i64 a = 1; e * q * a <= W.M; ++a) {
            const double ga = W.crop(e * q * a);
            if (ga == 0.0 || std::gcd(a, qr) != 1 || !is_squarefree(e * a)) continue;
            for (i64 b = 1; e * r * b <= W.M; ++b) {
                const double gb = W.crop(e * r * b);
                if (gb == 0.0 || std::gcd(b, qr) != 1 || std::gcd(a, b) != 1 || !is_squarefree(e * b)) continue;
                const i64 u = swap ? b : a, v = swap ? a : b;
                const double rr = W.rho(e * u) * W.rho(e * v);
                if (rr == 0.0) continue;
                const double lx = W.lamxi(u * v);
                if (lx == 0.0) continue;
                acc += rr * (ga * gb) / static_cast<double>(e * u * v) * lx * extra(u, v);
            }
        }
    }
    return acc.value();
}

}  // namespace

double E00_sum(const Discriminant& disc, const CropProfile& profile) {
    const Weights W(disc, profile);
    return triple_sum(W, 1, 1, false, [](i64, i64) { return 1.0; });
}

double E00_sum_swapped(const Discriminant& disc, const CropProfile& profile) {
    const Weights W(disc, profile);
    return triple_sum(W, 1, 1, true, [](i64, i64) { return 1.0; });
}

double E00_scaled(const Discriminant& disc, const CropProfile& profile, i64 q, i64 r) {
    if (q < 1 || r < 1) throw DomainError("E00_scaled requires q, r >= 1");
    const Weights W(disc, profile);
    return triple_sum(W, q, r, false, [](i64, i64) { return 1.0; });
}

double E_ab_sum(const Discriminant& disc, const CropProfile& profile, int a, int b) {
    if (a < 0 || b < 0) throw DomainError("E_ab requires a, b >= 0");
    const Weights W(disc, profile);
    return triple_sum(W, 1, 1, false, [&](i64 u, i64 v) {
        const double su = divisor_sum(u, [&](i64 q) { return lambda_star(q, a, disc); });
        const double sv = su == 0.0 ? 0.0 : divisor_sum(v, [&](i64 r) { return lambda_star(r, b, disc); });
        return su * sv;
    });
}

double E_ab_scaled(const Discriminant& disc, const CropProfile& profile, int a, int b) {
    if (a < 0 || b < 0) throw DomainError("E_ab requires a, b >= 0");
    const Weights W(disc, profile);
    KahanSum<double> acc;
    for (i64 q = 1; q <= W.M; ++q) {
        if (W.crop(q) == 0.0 || !is_squarefree(q)) continue;
        const double sa = lambda_star(q, a, disc);
        if (sa == 0.0) continue;
        for (i64 r = 1; r <= W.M; ++r) {
            if (W.crop(r) == 0.0 || !is_squarefree(r) || std::gcd(q, r) != 1) continue;
            const double sb = lambda_star(r, b, disc);
            if (sb == 0.0) continue;
            const double pref = sa * sb * W.rho(q) * W.rho(r) / static_cast<double>(q * r) * W.lamxi(q * r);
            if (pref == 0.0) continue;
            acc += pref * triple_sum(W, q, r, false, [](i64, i64) { return 1.0; });
        }
    }
    return acc.value();
}

// ---------------------------------------------------------------------------
// tilde-lambda and R~(1)

double lambda_tilde_prime(i64 p, const Character& chi) {
    const double x = chi(p);
    const double f = (1.0 + x) / (1.0 + x / static_cast<double>(p));
    return f * f;
}

EulerProduct R_tilde_one(const Discriminant& disc, i64 P) {
    if (P < 2) throw DomainError("R~(1) needs P >= 2");
    if (P > 100000000) throw CapacityError("R~(1) Euler product is limited to P <= 1e8");
    const Character chi(disc.D);
    double logprod = 0.0;
    for (i64 p : primes_up_to(P)) {
        const double x = 1.0 / static_cast<double>(p);
        const double local =
            (1.0 - x) * (1.0 - x) * (1.0 - chi(p) * x) * (1.0 - chi(p) * x) / (1.0 - lambda_tilde_prime(p, chi) * x);
        logprod += std::log(local);
    }
    EulerProduct e;
    e.value = std::exp(logprod);
    // Beyond P every factor is (1 - p^{-2})^2 (no p > P divides D), and sum_{n > P} 2.01 n^{-2} < 2.01 / P.
    e.tail = e.value * (1.0 - std::exp(-2.01 / static_cast<double>(P)));
    return e;
}

double R_tilde_one_closed(const Discriminant& disc) {
    const double z2 = kPi * kPi / 6.0;
    double r = 1.0 / (z2 * z2);
    for (auto [p, e] : factorize(disc.absD)) {
        const double x = 1.0 / static_cast<double>(p);
        r *= (1.0 - x) / ((1.0 - x * x) * (1.0 - x * x));
    }
    return r;
}

// ---------------------------------------------------------------------------
// W by a segmented sieve

namespace {

constexpr double kSieveCap = 1e9;
constexpr i64 kSegment = 1 << 16;

i64 power_floor(double N, double e) {
    const double x = std::pow(N, e);
    const double r = std::round(x);
    return static_cast<i64>(std::abs(x - r) <= 1e-9 * x ? r : std::floor(x));
}

struct SieveData {
    Character chi;
    std::vector<i64> primes;
    std::vector<double> lp;
    std::vector<std::pair<i64, double>> coef;  // (m, mu(m) g(m) / xi(m)) with g(m) != 0

    SieveData(const Discriminant& disc, const CropProfile& profile, i64 top) : chi(disc.D) {
        primes = primes_up_to(static_cast<i64>(std::sqrt(static_cast<double>(top))) + 1);
        for (i64 p : primes) lp.push_back(lambda_tilde_prime(p, chi));
        for (i64 m = 1; m <= static_cast<i64>(std::ceil(profile.M)); ++m) {
            const double g = crop_g(static_cast<double>(m), profile);
            const int mu = mobius(m);
            if (g != 0.0 && mu != 0) coef.emplace_back(m, mu * g / xi_fn(m, chi));
        }
    }
};

// sum over l in [lo, hi) of sign(l) tilde-lambda(l) / l (sum_{m | l} coef(m))^2, sign = +1 for l <= split.
double segment_sum(const SieveData& S, i64 lo, i64 hi, i64 split) {
    const std::size_t len = static_cast<std::size_t>(hi - lo);
    std::vector<double> val(len, 1.0), inner(len, 0.0);
    std::vector<i64> prod(len, 1);
    for (std::size_t k = 0; k < S.primes.size(); ++k) {
        const i64 p = S.primes[k];
        if (p * p >= hi) break;
        const double l = S.lp[k];
        for (i64 pk = p; pk < hi; pk *= p) {
            for (i64 x = (lo + pk - 1) / pk * pk; x < hi; x += pk) {
                val[x - lo] *= l;
                prod[x - lo] *= p;
            }
            if (pk > hi / p) break;
        }
    }
    for (const auto& [m, c] : S.coef)
        for (i64 x = (lo + m - 1) / m * m; x < hi; x += m) inner[x - lo] += c;
    KahanSum<double> acc;
    for (std::size_t i = 0; i < len; ++i) {
        if (val[i] == 0.0 || inner[i] == 0.0) continue;
        const i64 l = lo + static_cast<i64>(i);
        double v = val[i];
        if (prod[i] != l) v *= lambda_tilde_prime(l / prod[i], S.chi);  // one prime above the sieve limit
        const double term = v * inner[i] * inner[i] / static_cast<double>(l);
        acc += l <= split ? term : -term;
    }
    return acc.value();
}

// Signed sum over (a, b] with the sign switching after split; segments reduced in a fixed order.
double sieve_range(const SieveData& S, i64 a, i64 b, i64 split, int jobs) {
    if (b <= a) return 0.0;
    const i64 first = a + 1, count = (b - a + kSegment - 1) / kSegment;
    const auto parts = parallel_map(static_cast<std::size_t>(count), jobs, [&](std::size_t s) {
        const i64 lo = first + static_cast<i64>(s) * kSegment;
        return segment_sum(S, lo, std::min(lo + kSegment, b + 1), split);
    });
    KahanSum<double> acc;
    for (double p : parts) acc += p;
    return acc.value();
}

}  // namespace

void WConfig::validate() const {
    profile.validate();
    if (!(N >= 2.0)) throw DomainError("W requires N >= 2");
    const auto& e = exponents;
    if (!(0.0 < e[0] && e[0] < e[1] && e[1] < e[2])) throw DomainError("W exponents must increase from a positive start");
    if (std::abs((e[1] - e[0]) - (e[2] - e[1])) > 1e-12) throw DomainError("W exponents must be an arithmetic progression");
    if (std::pow(N, e[2]) > kSieveCap * (1 + 1e-12)) throw CapacityError("W sieve is limited to N^e2 <= 1e9");
}

WBlocks W_blocks(const WConfig& cfg) {
    cfg.validate();
    const i64 a = power_floor(cfg.N, cfg.exponents[0]), b = power_floor(cfg.N, cfg.exponents[1]),
              c = power_floor(cfg.N, cfg.exponents[2]);
    const SieveData S(cfg.disc, cfg.profile, c);
    WBlocks w;
    w.lower = sieve_range(S, a, b, b, cfg.jobs);
    w.upper = sieve_range(S, b, c, c, cfg.jobs);
    return w;
}

double W_sum(const WConfig& cfg) {
    cfg.validate();
    const i64 a = power_floor(cfg.N, cfg.exponents[0]), b = power_floor(cfg.N, cfg.exponents[1]),
              c = power_floor(cfg.N, cfg.exponents[2]);
    const SieveData S(cfg.disc, cfg.profile, c);
    return sieve_range(S, a, c, b, cfg.jobs);
}

double W_from_pairs(const WConfig& cfg) {
    cfg.validate();
    const i64 a = power_floor(cfg.N, cfg.exponents[0]), b = power_floor(cfg.N, cfg.exponents[1]),
              c = power_floor(cfg.N, cfg.exponents[2]);
    if (c > 20000000) throw CapacityError("W_from_pairs tabulates tilde-lambda only up to 2e7");
    const auto table = coeff_table(CoeffKind::lambda_tilde, cfg.disc, c).values;
    std::vector<double> prefix(table.size(), 0.0);
    KahanSum<double> run;
    for (std::size_t k = 1; k < table.size(); ++k) {
        run += table[k] / static_cast<double>(k);
        prefix[k] = run.value();
    }
    const SieveData S(cfg.disc, cfg.profile, 4);
    KahanSum<double> acc;
    for (const auto& [m1, c1] : S.coef)
        for (const auto& [m2, c2] : S.coef) {
            const i64 L = std::lcm(m1, m2);
            const double block = 2.0 * prefix[b / L] - prefix[a / L] - prefix[c / L];
            acc += c1 * c2 * table[L] / static_cast<double>(L) * block;
        }
    return acc.value();
}

double E00_from_pairs(const Discriminant& disc, const CropProfile& profile) {
    const SieveData S(disc, profile, 4);
    KahanSum<double> acc;
    for (const auto& [m1, c1] : S.coef)
        for (const auto& [m2, c2] : S.coef) {
            const i64 L = std::lcm(m1, m2);
            double lt = 1.0;
            for (auto [p, e] : factorize(L)) lt *= lambda_tilde_prime(p, S.chi);
            acc += c1 * c2 * lt / static_cast<double>(L);
        }
    return acc.value();
}

// ---------------------------------------------------------------------------
// Reconstruction

ReconstructionReport reconstruction_check(const Discriminant& disc, const std::vector<double>& N_grid,
                                          const CropProfile& profile, std::array<double, 3> exponents, int jobs) {
    if (N_grid.size() < 2) throw DomainError("reconstruction needs at least two N values");
    ReconstructionReport rep;
    rep.D = disc.D;
    rep.M = profile.M;
    rep.r = profile.r;
    rep.exponents = exponents;
    rep.N_grid = N_grid;
    rep.E00 = E00_sum(disc, profile);
    rep.R1 = R_tilde_one_closed(disc);
    rep.L1 = L1_chi(disc);
    const double d = exponents[1] - exponents[0];
    for (double N : N_grid) {
        WConfig cfg{disc, N, profile, exponents, jobs};
        const double W = W_sum(cfg);
        const double scale = rep.L1 * d * std::log(N);
        const double pred = -rep.R1 * scale * scale * rep.E00;
        rep.W.push_back(W);
        rep.predicted.push_back(pred);
        rep.residuals.push_back(std::abs(W - pred));
    }
    // Least-squares slope of log residual against log N.
    const std::size_t n = N_grid.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(N_grid[i]), y = std::log(std::max(rep.residuals[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.fitted_decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.monotone = true;
    for (std::size_t i = 0; i < n; ++i) {
        rep.quarter_constant = std::max(rep.quarter_constant, rep.residuals[i] * std::pow(N_grid[i], 0.25));
        if (i > 0 && !(rep.residuals[i] < rep.residuals[i - 1])) rep.monotone = false;
    }
    return rep;
}

std::string ReconstructionReport::to_json() const {
    nlohmann::ordered_json j;
    j["D"] = D;
    j["M"] = M;
    j["r"] = r;
    j["exponents"] = exponents;
    j["N_grid"] = N_grid;
    j["E00"] = E00;
    j["R_tilde_1"] = R1;
    j["L1"] = L1;
    j["W"] = W;
    j["predicted"] = predicted;
    j["residuals"] = residuals;
    j["fitted_decay_exponent"] = fitted_decay_exponent;
    j["quarter_constant"] = quarter_constant;
    j["monotone"] = monotone;
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Sifting weights

double theta_a(i64 l, int a, const Discriminant& disc, const CropProfile& profile) {
    if (l < 1 || a < 0) throw DomainError("theta_a requires l >= 1 and a >= 0");
    const Character chi(disc.D);
    const double logN = std::log(profile.N);
    return divisor_sum(l, [&](i64 m) {
        const int mu = mobius(m);
        if (mu == 0) return 0.0;
        return crop_g(static_cast<double>(m), profile) * mu / xi_fn(m, chi) *
               ipow(std::log(static_cast<double>(m)) / logN, a);
    });
}

double theta_a_x(i64 l, int a, double x, const Discriminant& disc, const CropProfile& profile) {
    if (l < 1 || a < 0) throw DomainError("theta_a requires l >= 1 and a >= 0");
    const Character chi(disc.D);
    const double logN = std::log(profile.N);
    return divisor_sum(l, [&](i64 m) {
        const int mu = mobius(m);
        if (mu == 0) return 0.0;
        return crop_g(static_cast<double>(m), profile) * mu / xi_fn(m, chi) *
               ipow(std::log(static_cast<double>(m)) / logN, a) * crop_h(x / static_cast<double>(m), profile);
    });
}

}  // namespace lacunary

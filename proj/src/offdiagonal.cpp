#include "lacunary/offdiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>

#include "lacunary/diagonal.hpp"
#include "lacunary/parallel.hpp"

namespace lacunary {

namespace {

constexpr double kZeta2 = kPi * kPi / 6.0;

i64 gcd64(i64 a, i64 b) { return std::gcd(a, b); }

// Sum over reduced residues of e(ah/c), from the divisors of h.
double ramanujan_from(i64 c, const std::vector<i64>& hdiv, const std::vector<int>& mu) {
    double s = 0.0;
    for (i64 d : hdiv)
        if (c % d == 0) s += static_cast<double>(d) * mu[static_cast<std::size_t>(c / d)];
    return s;
}

// sum_{c > C, L | c} 1/c^2.
double inverse_square_tail(i64 C, i64 L) {
    const i64 K = C / L;
    const double l2 = static_cast<double>(L) * static_cast<double>(L);
    return (K >= 1 ? 1.0 / static_cast<double>(K) : kZeta2) / l2;
}

// Bound for sum_{c > C, m | c} (c, w) sigma((c, h)) / c^2, via (c,w) = sum_{a | (c,w)} phi(a) and
// sigma((c,h)) = sum_{b | (c,h)} b.
double gcd_sigma_tail(i64 C, i64 w, i64 h, i64 m) {
    double t = 0.0;
    for (i64 a : divisors(w))
        for (i64 b : divisors(h)) {
            const i64 ab = std::lcm(a, b);
            t += static_cast<double>(euler_phi(a)) * static_cast<double>(b) * inverse_square_tail(C, std::lcm(ab, m));
        }
    return t;
}

double zeta_q2(i64 q) {
    double z = kZeta2;
    for (auto [p, e] : factorize(q)) z *= 1.0 - 1.0 / static_cast<double>(p * p);
    return z;
}

i64 inverse_mod(i64 a, i64 m) {
    if (m == 1) return 0;
    i64 g = m, x = 0, x1 = 1, r = ((a % m) + m) % m;
    while (r != 0) {
        const i64 q = g / r;
        std::tie(g, r) = std::make_pair(r, g - q * r);
        std::tie(x, x1) = std::make_pair(x1, x - q * x1);
    }
    if (g != 1) throw DomainError("no inverse modulo " + std::to_string(m));
    return ((x % m) + m) % m;
}

// Shoulder derivative bound: |Psi(z)| <= psi_tail_constant / z^{k+2}.
double psi_tail_constant(const TestFunctionPair& pair) {
    const int k = pair.smoothness;
    const double wl = pair.plateau_lo - pair.support_lo, wr = pair.support_hi - pair.plateau_hi;
    double jumps = 0.0, integral = 0.0;
    for (double w : {wl, wr}) {
        const double scale = std::pow(w, -(k + 1));
        jumps += (std::abs(smoothstep(0.0, k, k + 1)) + std::abs(smoothstep(1.0, k, k + 1))) * scale;
        integral += integrate_gl([&](double v) { return std::abs(smoothstep(v, k, k + 2)); }, 0.0, 1.0, 64, 20) *
                    scale / w;
    }
    return 2.0 * (jumps + integral);
}

}  // namespace

// ---------------------------------------------------------------------------
// Test-function pair

void TestFunctionPair::validate() const {
    if (!(0.0 < support_lo && support_lo < plateau_lo && plateau_lo <= plateau_hi && plateau_hi < support_hi))
        throw DomainError("test function requires 0 < support_lo < plateau_lo <= plateau_hi < support_hi");
    if (smoothness < 2) throw DomainError("test function smoothness must be at least 2");
}

double TestFunctionPair::Phi(double t) const {
    t = std::abs(t);
    if (t <= support_lo || t >= support_hi) return 0.0;
    if (t < plateau_lo) return smoothstep((t - support_lo) / (plateau_lo - support_lo), smoothness);
    if (t <= plateau_hi) return 1.0;
    return smoothstep((support_hi - t) / (support_hi - plateau_hi), smoothness);
}

double TestFunctionPair::Phi_prime(double t) const {
    const double sg = t < 0 ? -1.0 : 1.0;
    t = std::abs(t);
    if (t <= support_lo || t >= support_hi) return 0.0;
    if (t < plateau_lo) {
        const double w = plateau_lo - support_lo;
        return sg * smoothstep((t - support_lo) / w, smoothness, 1) / w;
    }
    if (t <= plateau_hi) return 0.0;
    const double w = support_hi - plateau_hi;
    return -sg * smoothstep((support_hi - t) / w, smoothness, 1) / w;
}

namespace {

// Phi is a polynomial on each of its three pieces, so int t^deriv Phi(t) e^{izt} dt is a finite sum of boundary
// terms sum_j (-1)^j g^(j) e^{izt} / (iz)^{j+1}. The terms grow like z^{-j-1} times the derivatives, so this is
// used only for large |z|, where it is exact up to rounding.
constexpr double kPsiClosedFormMin = 30.0;

double psi_by_parts(double z, const TestFunctionPair& pair, int deriv) {
    const int k = pair.smoothness;
    const int degree = 2 * k + 1 + deriv;
    struct Piece {
        double a, b;
        double v0, dv;  // v = v0 + dv t is the smoothstep argument; dv = 0 marks the plateau
    };
    const double wl = pair.plateau_lo - pair.support_lo, wr = pair.support_hi - pair.plateau_hi;
    const Piece pieces[3] = {{pair.support_lo, pair.plateau_lo, -pair.support_lo / wl, 1.0 / wl},
                             {pair.plateau_lo, pair.plateau_hi, 0.0, 0.0},
                             {pair.plateau_hi, pair.support_hi, pair.support_hi / wr, -1.0 / wr}};
    // j-th derivative of t^deriv S(v0 + dv t) by Leibniz.
    auto gderiv = [&](const Piece& pc, double t, int j) {
        double s = 0.0;
        for (int i = 0; i <= std::min(j, deriv); ++i) {
            double mono = 1.0;  // (t^deriv)^(i)
            for (int q = 0; q < i; ++q) mono *= deriv - q;
            mono *= std::pow(t, deriv - i);
            const int m = j - i;
            double phi_m;
            if (pc.dv == 0.0)
                phi_m = m == 0 ? 1.0 : 0.0;
            else
                phi_m = smoothstep(pc.v0 + pc.dv * t, k, m) * std::pow(pc.dv, m);
            double binom = 1.0;
            for (int q = 1; q <= i; ++q) binom = binom * (j - i + q) / q;
            s += binom * mono * phi_m;
        }
        return s;
    };
    const cplx iz(0.0, z);
    cplx total = 0.0;
    for (const Piece& pc : pieces) {
        cplx inv = 1.0 / iz;  // (iz)^{-(j+1)}
        for (int j = 0; j <= degree; ++j) {
            const double sign = j % 2 ? -1.0 : 1.0;
            const cplx eb = std::exp(iz * pc.b), ea = std::exp(iz * pc.a);
            total += sign * inv * (gderiv(pc, pc.b, j) * eb - gderiv(pc, pc.a, j) * ea);
            inv /= iz;
        }
    }
    // Psi^(d)(z) = 2 int_0^inf Phi(t) d^d/dz^d cos(tz) dt.
    switch (deriv) {
        case 0: return 2.0 * total.real();
        case 1: return -2.0 * total.imag();
        default: return -2.0 * total.real();
    }
}

}  // namespace

double psi_eval(double z, const TestFunctionPair& pair, int deriv) {
    if (deriv < 0 || deriv > 2) throw DomainError("psi_eval supports derivatives of order 0, 1, 2");
    if (std::abs(z) >= kPsiClosedFormMin) {
        // Psi and Psi'' are even in z, Psi' is odd.
        const double v = psi_by_parts(std::abs(z), pair, deriv);
        return (deriv == 1 && z < 0) ? -v : v;
    }
    auto kernel = [&](double t) {
        const double phi = pair.Phi(t);
        switch (deriv) {
            case 0: return phi * std::cos(t * z);
            case 1: return -t * phi * std::sin(t * z);
            default: return -t * t * phi * std::cos(t * z);
        }
    };
    const double cuts[4] = {pair.support_lo, pair.plateau_lo, pair.plateau_hi, pair.support_hi};
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        // At most two radians of phase per 20-point panel.
        const int panels = 1 + static_cast<int>(std::ceil(std::abs(z) * len / 2.0));
        total += integrate_gl(kernel, cuts[i], cuts[i + 1], panels, 20);
    }
    return 2.0 * total;
}

cplx psi_mellin(cplx s, const TestFunctionPair& pair) {
    if (!(s.real() > -2.0)) throw DomainError("psi_mellin requires Re s > -2");
    if (std::abs(s) < 1e-14 || std::abs(s + 1.0) < 1e-14)
        throw DomainError("psi_mellin: s = 0 is a pole and s = -1 needs the limit");
    const double p2_0 = psi_eval(0.0, pair, 2);
    // On [0,1] subtract Psi''(0), which is integrated exactly; Psi'' - Psi''(0) = O(z^2) keeps the rest regular.
    auto near = [&](double z) {
        return (psi_eval(z, pair, 2) - p2_0) * std::exp((s + 1.0) * std::log(z));
    };
    cplx total = integrate_gl(near, 0.0, 1.0, 8, 20) + p2_0 / (s + 2.0);
    const double zmax = 400.0 + 100.0 * std::max(0.0, s.real());
    auto far = [&](double z) { return psi_eval(z, pair, 2) * std::exp((s + 1.0) * std::log(z)); };
    total += integrate_gl(far, 1.0, zmax, static_cast<int>(zmax), 20);
    return total / (s * (s + 1.0));
}

cplx psi_mellin_closed(cplx s, const TestFunctionPair& pair) {
    auto f = [&](double t) { return pair.Phi(t) * std::exp(-s * std::log(t)); };
    const cplx mass = integrate_gl(f, pair.support_lo, pair.plateau_lo, 8, 20) +
                      integrate_gl(f, pair.plateau_lo, pair.plateau_hi, 8, 20) +
                      integrate_gl(f, pair.plateau_hi, pair.support_hi, 8, 20);
    return 2.0 * gamma_fn(s) * std::cos(kPi * s / 2.0) * mass;
}

DecayConstants psi_decay_constants(const TestFunctionPair& pair, double A, double z_max, int points) {
    DecayConstants dc;
    dc.A = A;
    dc.z_max = z_max;
    for (int i = 0; i < points; ++i) {
        const double z = z_max * i / (points - 1);
        const double wgt = std::pow(1.0 + z, A);
        for (int j = 0; j < 3; ++j) dc.C[j] = std::max(dc.C[j], std::abs(psi_eval(z, pair, j)) * wgt);
    }
    return dc;
}

// ---------------------------------------------------------------------------
// phi(z)

double phi_route_a(double z, const TestFunctionPair& pair) {
    if (!(z > 0.0)) throw DomainError("phi requires z > 0");
    const int k = pair.smoothness;
    const double C = psi_tail_constant(pair);
    const double expo = k + 2.0;
    KahanSum<double> acc;
    for (long K = 1;; ++K) {
        acc += psi_eval(K * z, pair);
        // sum_{k > K} C (k z)^{-expo} <= C / ((expo - 1) z^expo K^{expo-1})
        const double tail = C / ((expo - 1.0) * std::pow(z, expo) * std::pow(static_cast<double>(K), expo - 1.0));
        if (tail < 1e-13) break;
        if (K > 10000000) throw NumericalError("phi route A did not reach its tail bound");
    }
    return acc.value();
}

double phi_route_b(double z, const TestFunctionPair& pair) {
    if (!(z > 0.0)) throw DomainError("phi requires z > 0");
    const double step = 2.0 * kPi / z;
    const long m0 = static_cast<long>(std::ceil(pair.support_lo / step));
    const long m1 = static_cast<long>(std::floor(pair.support_hi / step));
    KahanSum<double> acc;
    for (long m = std::max(1L, m0); m <= m1; ++m) acc += pair.Phi(m * step);
    return -0.5 * psi_eval(0.0, pair) + step * acc.value();
}

double phi_route_c(double z, const TestFunctionPair& pair) {
    if (!(z > 0.0)) throw DomainError("phi requires z > 0");
    const double step = 2.0 * kPi / z;
    // Split each shoulder at t = 2 pi m / z, where the sawtooth jumps; on each piece the integrand is a polynomial.
    auto piece = [&](double lo, double hi) {
        std::vector<double> cuts{lo};
        for (long m = static_cast<long>(std::floor(lo / step)) + 1; m * step < hi; ++m) cuts.push_back(m * step);
        cuts.push_back(hi);
        KahanSum<double> acc;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double a = cuts[i], b = cuts[i + 1];
            if (b <= a) continue;
            const double base = std::floor(0.5 * (a + b) / step);
            acc += integrate_gl([&](double t) { return (t / step - base) * pair.Phi_prime(t); }, a, b, 1, 20);
        }
        return acc.value();
    };
    return step * (piece(pair.support_lo, pair.plateau_lo) + piece(pair.plateau_hi, pair.support_hi));
}

double phi_kernel(double z, const TestFunctionPair& pair) { return phi_route_b(z, pair); }

double phi0_kernel(double z, const TestFunctionPair& pair) {
    return phi_kernel(z, pair) + 0.5 * psi_eval(0.0, pair) * std::max(0.0, 1.0 - z);
}

PhiKernelReport phi_kernel_check(const TestFunctionPair& pair, const std::vector<double>& z_grid, double A) {
    PhiKernelReport rep;
    rep.z = z_grid;
    rep.A = A;
    const double half = 0.5 * psi_eval(0.0, pair);
    for (double z : z_grid) {
        const double a = phi_route_a(z, pair), b = phi_route_b(z, pair), c = phi_route_c(z, pair);
        rep.max_discrepancy = std::max({rep.max_discrepancy, std::abs(a - b), std::abs(a - c), std::abs(b - c)});
        rep.decay_constant = std::max(rep.decay_constant, std::abs(b) * (1.0 + z));
        const double p0 = b + half * std::max(0.0, 1.0 - z);
        rep.phi0_constant = std::max(rep.phi0_constant, std::abs(p0) * std::pow(1.0 + z, A) / z);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Singular series

void SingularInput::validate() const {
    if (u < 1 || v < 1 || h < 1) throw DomainError("singular series requires u, v, h >= 1");
    if (disc.D >= 0 || disc.D % 4 == 0) throw DomainError("singular series requires an odd negative discriminant");
    if (gcd64(u, v) != 1) throw DomainError("singular series requires (u, v) = 1");
    if (u % disc.absD == 0 || v % disc.absD == 0) throw DomainError("singular series requires |D| to divide neither u nor v");
    if (!is_cubefree(u * v)) throw DomainError("singular series requires w = uv cubefree");
    for (auto [p, e] : factorize(disc.absD))
        if ((u % (p * p)) == 0 || (v % (p * p)) == 0)
            throw DomainError("singular series excludes squares of ramified primes in u, v");
}

double xi_fn(i64 n, const Character& chi) {
    double x = 1.0;
    for (auto [p, e] : factorize(n)) x /= 1.0 + chi(p) / static_cast<double>(p);
    return x;
}

double singular_series_tail(const SingularInput& in, i64 C_max) {
    const i64 w = in.w();
    return gcd_sigma_tail(C_max, w, in.h, 1) +
           static_cast<double>(in.disc.absD - 1) * gcd_sigma_tail(C_max, w, in.h, in.disc.absD);
}

SeriesValue singular_series_truncated(const SingularInput& in, i64 C_max) {
    in.validate();
    const i64 w = in.w(), aD = in.disc.absD;
    if (C_max < aD * w) throw DomainError("singular series truncation requires C_max >= |D| w");
    const Character chi(in.disc.D);
    const auto mu = mobius_table(C_max);
    const auto hdiv = divisors(in.h);
    const cplx tau = gauss_sum(in.disc);
    const int chim1 = chi(-1);
    KahanSum<cplx> acc;
    for (i64 c = 1; c <= C_max; ++c) {
        const i64 cu = gcd64(c, in.u), cv = gcd64(c, in.v);
        const i64 c1 = c / cu, c2 = c / cv;
        const bool r1 = c1 % aD == 0, r2 = c2 % aD == 0;
        const double denom = static_cast<double>(c1) * static_cast<double>(c2);
        cplx term;
        if (!r1 && !r2) {
            const int x = chi(c1) * chi(c2);
            if (x == 0) continue;
            term = x * ramanujan_from(c, hdiv, mu) / denom;
        } else if (r1 && r2) {
            // chi(-a u/(c,u)) chi(a v/(c,v)) = chi(-1) chi(u/(c,u)) chi(v/(c,v)) for a coprime to c.
            const int x = chim1 * chi(in.u / cu) * chi(in.v / cv);
            if (x == 0) continue;
            term = static_cast<double>(x) * tau * tau * ramanujan_from(c, hdiv, mu) / denom;
        } else if (r1) {
            const int x = chim1 * chi(in.u / cu) * chi(c2);
            if (x == 0) continue;
            term = static_cast<double>(x) * tau * gauss_ramanujan(in.h, c, in.disc) / denom;
        } else {
            const int x = chi(in.v / cv) * chi(c1);
            if (x == 0) continue;
            term = static_cast<double>(x) * tau * gauss_ramanujan(in.h, c, in.disc) / denom;
        }
        acc += term;
    }
    const cplx v = acc.value();
    if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real())))
        throw NumericalError("singular series has a non-real partial sum");
    return {v.real(), singular_series_tail(in, C_max), C_max};
}

SeriesValue singular_series_split(const SingularInput& in, i64 C_max) {
    in.validate();
    const i64 w = in.w(), aD = in.disc.absD;
    if (C_max < aD * w) throw DomainError("singular series truncation requires C_max >= |D| w");
    const Character chi(in.disc.D);
    const auto mu = mobius_table(C_max);
    const auto hdiv = divisors(in.h);
    const i64 step = gcd64(aD, w) * aD;
    KahanSum<double> star, prime;
    for (i64 c = 1; c <= C_max; ++c) {
        const i64 g = gcd64(c, w);
        if (gcd64(c, aD) == 1) {
            const int x = chi(g);
            if (x != 0) star += x * ramanujan_from(c, hdiv, mu) * static_cast<double>(g) / (double(c) * double(c));
        }
        if (c % step == 0) {
            const int x = chi(w / g);
            if (x != 0) prime += x * ramanujan_from(c, hdiv, mu) * static_cast<double>(g) / (double(c) * double(c));
        }
    }
    // S'(h) carries the factor tau(chi)^2 = D, which is negative.
    return {star.value() - static_cast<double>(in.disc.D) * prime.value(), singular_series_tail(in, C_max), C_max};
}

double gamma_star(i64 d, const SingularInput& in) {
    if (d < 1) throw DomainError("gamma* requires d >= 1");
    const i64 w = in.w();
    if (gcd64(d, in.disc.absD) != 1) return 0.0;
    const Character chi(in.disc.D);
    const i64 g = gcd64(d, w);
    return static_cast<double>(g) / (zeta_q2(in.disc.absD) * static_cast<double>(d)) * chi(g) * xi_fn(w / g, chi);
}

double gamma_prime(i64 d, const SingularInput& in) {
    if (d < 1) throw DomainError("gamma' requires d >= 1");
    const i64 w = in.w(), aD = in.disc.absD;
    const i64 gDw = gcd64(aD, w);
    if (d % gDw != 0) return 0.0;
    const Character chi(in.disc.D);
    const i64 w1 = w / gDw, d1 = d / gDw;
    const i64 q = aD / gcd64(aD, d1);
    const int mq = mobius(q);
    if (mq == 0) return 0.0;
    const i64 g1 = gcd64(d1, w1), gD = gcd64(d1, aD);
    const i64 n = w1 / g1;
    return mq / zeta_q2(q) * static_cast<double>(g1) * static_cast<double>(gD) * static_cast<double>(gD) /
           (static_cast<double>(d) * static_cast<double>(in.disc.D)) * chi(n) * xi_fn(n, chi);
}

SeriesValue gamma_star_series(i64 d, const SingularInput& in, i64 C_max) {
    const i64 w = in.w(), aD = in.disc.absD;
    const Character chi(in.disc.D);
    const auto mu = mobius_table(C_max);
    KahanSum<double> acc;
    for (i64 c = 1; c <= C_max; ++c) {
        if (mu[c] == 0 || gcd64(c * d, aD) != 1) continue;
        const i64 g = gcd64(c * d, w);
        acc += chi(g) * static_cast<double>(g) * mu[c] / (double(c) * double(c));
    }
    const double scale = static_cast<double>(gcd64(d, w)) / static_cast<double>(d);
    return {acc.value() / static_cast<double>(d), scale * gcd_sigma_tail(C_max, w, 1, 1), C_max};
}

SeriesValue gamma_prime_series(i64 d, const SingularInput& in, i64 C_max) {
    const i64 w = in.w(), aD = in.disc.absD;
    const Character chi(in.disc.D);
    const auto mu = mobius_table(C_max);
    const i64 step = gcd64(aD, w) * aD;
    KahanSum<double> acc;
    for (i64 c = 1; c <= C_max; ++c) {
        if (mu[c] == 0 || (c * d) % step != 0) continue;
        const i64 g = gcd64(c * d, w);
        acc += chi(w / g) * static_cast<double>(g) * mu[c] / (double(c) * double(c));
    }
    const double scale = static_cast<double>(aD * gcd64(d, w)) / static_cast<double>(d);
    return {static_cast<double>(in.disc.D) * acc.value() / static_cast<double>(d), scale * gcd_sigma_tail(C_max, w, 1, 1),
            C_max};
}

double singular_series_closed(const SingularInput& in) {
    in.validate();
    KahanSum<double> acc;
    for (i64 d : divisors(in.h)) acc += gamma_star(d, in) - gamma_prime(d, in);
    return acc.value();
}

std::vector<SingularRow> singular_series_grid(const std::vector<i64>& Ds, int uv_max, int h_max, i64 C_max,
                                              int jobs) {
    std::vector<SingularInput> inputs;
    for (i64 D : Ds) {
        const Discriminant disc = Discriminant::make(D);
        for (i64 u = 1; u <= uv_max; ++u)
            for (i64 v = 1; v <= uv_max; ++v)
                for (i64 h = 1; h <= h_max; ++h) {
                    SingularInput in{u, v, h, disc};
                    try {
                        in.validate();
                    } catch (const DomainError&) {
                        continue;
                    }
                    inputs.push_back(in);
                }
    }
    return parallel_map(inputs.size(), jobs, [&](std::size_t i) {
        const SingularInput& in = inputs[i];
        const i64 C = std::max(C_max, in.disc.absD * in.w());
        SingularRow row;
        row.u = in.u;
        row.v = in.v;
        row.h = in.h;
        row.D = in.disc.D;
        const SeriesValue r1 = singular_series_truncated(in, C);
        row.route1 = r1.value;
        row.route2 = singular_series_split(in, C).value;
        row.route3 = singular_series_closed(in);
        row.tail = r1.tail;
        row.worst_gap = std::max({std::abs(row.route1 - row.route3), std::abs(row.route2 - row.route3),
                                  std::abs(row.route1 - row.route2)});
        return row;
    });
}

std::string singular_rows_csv(const std::vector<SingularRow>& rows) {
    std::ostringstream os;
    os.precision(17);
    os << "u,v,h,D,route1,route2,route3,tail,worst_gap\n";
    for (const auto& r : rows)
        os << r.u << ',' << r.v << ',' << r.h << ',' << r.D << ',' << r.route1 << ',' << r.route2 << ',' << r.route3
           << ',' << r.tail << ',' << r.worst_gap << '\n';
    return os.str();
}

std::vector<PeriodicityRow> singular_series_periodicity(const SingularInput& in, i64 h_max) {
    std::vector<PeriodicityRow> out;
    for (i64 h = 1; h <= h_max; ++h) {
        SingularInput a = in, b = in;
        a.h = h;
        b.h = h + in.disc.absD;
        PeriodicityRow r;
        r.h = h;
        r.value = singular_series_closed(a);
        r.shifted = singular_series_closed(b);
        r.same_sign = (r.value > 0) == (r.shifted > 0);
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Voronoi formula

double bessel_j0(double x) {
    x = std::abs(x);
    if (x < 12.0) {
        const long double q = static_cast<long double>(x) * x / 4.0L;
        long double term = 1.0L, sum = 1.0L;
        for (int k = 1; k < 200; ++k) {
            term *= -q / (static_cast<long double>(k) * k);
            sum += term;
            if (std::abs(term) < 1e-22L * std::max(1.0L, std::abs(sum))) break;
        }
        return static_cast<double>(sum);
    }
    // Hankel expansion: t_k = a_k / x^k with a_k = prod_{j<=k} (2j-1)^2 / (k! 8^k); stop at the smallest term.
    double P = 1.0, Q = 0.0, t = 1.0, prev = 1.0;
    for (int k = 1; k < 100; ++k) {
        t *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        if (t > prev) break;
        prev = t;
        const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0)
            P += sgn * t;
        else
            Q -= (((k - 1) / 2) % 2 == 0 ? 1.0 : -1.0) * t;
        if (t < 1e-17) break;
    }
    const double chi = x - kPi / 4.0;
    return std::sqrt(2.0 / (kPi * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

double voronoi_bump(double x, double X) {
    const double s = (2.0 * x - 3.0 * X) / X;
    if (std::abs(s) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

VoronoiResult voronoi_check(i64 a, i64 c, const Discriminant& disc, double X) {
    if (c < 1 || gcd64(a, c) != 1) throw DomainError("Voronoi check requires c >= 1 and (a, c) = 1");
    if (disc.D >= 0 || disc.D % 4 == 0) throw DomainError("Voronoi check requires an odd negative discriminant");
    if (!(X >= 2.0)) throw DomainError("Voronoi check requires X >= 2");
    if (2.0 * X > 5e7) throw CapacityError("Voronoi check is limited to X <= 2.5e7");
    const Character chi(disc.D);
    const i64 aD = disc.absD;
    auto e = [](double frac) { return std::polar(1.0, 2.0 * kPi * frac); };

    VoronoiResult res;
    const i64 lo = static_cast<i64>(std::ceil(X)), hi = static_cast<i64>(std::floor(2.0 * X));
    const auto lam = lambda0_table(chi, hi);
    KahanSum<cplx> lhs;
    for (i64 m = lo; m <= hi; ++m) {
        const double g = voronoi_bump(static_cast<double>(m), X);
        if (g != 0.0 && lam[m] != 0)
            lhs += static_cast<double>(lam[m]) * g * e(static_cast<double>((a % c) * (m % c) % c) / c);
    }
    res.lhs = lhs.value();

    const double mass = integrate_gl([&](double x) { return voronoi_bump(x, X); }, X, 2.0 * X, 64, 20);
    const cplx rho = (c % aD == 0) ? static_cast<double>(chi(a)) * gauss_sum(disc) / static_cast<double>(c)
                                   : cplx(chi(c) / static_cast<double>(c), 0.0);
    res.main = rho * L1_chi(disc) * mass;

    // chi = chi1 chi2 with chi1 of conductor (c, |D|) and chi2 of conductor |D| / (c, |D|).
    const i64 g = gcd64(c, aD);
    const i64 D1 = (g % 4 == 1) ? g : -g;
    const i64 D2 = disc.D / D1;
    auto chi1 = [&](i64 n) { return kronecker(D1, n); };
    auto chi2 = [&](i64 n) { return kronecker(D2, n); };
    // The dual term carries 2 pi for an even chi1 (including c coprime to D) and 2 pi i for an odd chi1.
    const cplx parity = chi1(-1) == 1 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
    const cplx pref = 2.0 * kPi * parity * static_cast<double>(chi1(a) * chi2(c)) *
                      std::sqrt(static_cast<double>(g)) / (static_cast<double>(c) * std::sqrt(static_cast<double>(aD)));
    const i64 abar = inverse_mod(((a % c) * ((disc.D / g) % c)) % c, c);
    const double sx0 = std::sqrt(X), sx1 = std::sqrt(2.0 * X);
    KahanSum<cplx> dual;
    double block = 0.0;
    const double stop = 1e-11 * std::max(1.0, std::abs(res.lhs));
    int m = 1;
    for (;; ++m) {
        if (m > 50000) throw NumericalError("Voronoi dual sum did not decay within 50000 terms");
        long conv = 0;
        for (i64 d : divisors(m)) conv += chi1(d) * chi2(m / d);
        if (conv != 0) {
            const double kappa = 4.0 * kPi * std::sqrt(static_cast<double>(g) * m) /
                                 (static_cast<double>(c) * std::sqrt(static_cast<double>(aD)));
            // In y = sqrt x the Bessel phase is linear: kappa y over [sqrt X, sqrt 2X].
            const int panels = 16 + static_cast<int>(std::ceil(kappa * (sx1 - sx0) / 1.5));
            const double integral = integrate_gl(
                [&](double y) { return voronoi_bump(y * y, X) * bessel_j0(kappa * y) * 2.0 * y; }, sx0, sx1, panels,
                20);
            const cplx term = pref * static_cast<double>(conv) * integral *
                              e(static_cast<double>((abar * (m % c)) % c) / c);
            dual += term;
            block += std::abs(term);
        }
        if (m % 50 == 0) {
            if (block < stop) break;
            block = 0.0;
        }
    }
    res.dual = dual.value();
    res.dual_terms = m;
    res.dual_tail = block;
    res.residual = std::abs(res.lhs - res.main - res.dual);
    res.tolerance = 1e-6 * std::abs(res.lhs) + 1e-9;
    return res;
}

// ---------------------------------------------------------------------------
// Shifted convolution sums

double I_h_brute(i64 u, i64 v, i64 h, double T, const Discriminant& disc, const CropProfile& profile,
                 const TestFunctionPair& pair) {
    if (u < 1 || v < 1 || h < 1 || !(T > 0.0)) throw DomainError("I_h requires u, v, h >= 1 and T > 0");
    const double top = std::pow(profile.N, profile.alpha);
    if (top > 5e7) throw CapacityError("I_h brute force is limited to N^alpha <= 5e7");
    const i64 nmax = static_cast<i64>(std::floor(top));
    const auto lam = lambda0_table(Character(disc.D), std::max<i64>(nmax, 1));
    KahanSum<double> acc;
    for (i64 n = 1; n <= nmax; ++n) {
        const i64 num = v * n + h;
        if (num % u != 0) continue;
        const i64 m = num / u;
        if (m > nmax) break;
        if (lam[m] == 0 || lam[n] == 0) continue;
        const double hm = crop_h(static_cast<double>(m), profile), hn = crop_h(static_cast<double>(n), profile);
        if (hm == 0.0 || hn == 0.0) continue;
        const double arg = T * std::log1p(static_cast<double>(h) / static_cast<double>(v * n));
        acc += psi_eval(arg, pair) * static_cast<double>(lam[m] * lam[n]) * hm * hn /
               std::sqrt(static_cast<double>(m) * static_cast<double>(n));
    }
    return acc.value();
}

double I_full_brute(i64 u, i64 v, double T, const Discriminant& disc, const CropProfile& profile,
                    const TestFunctionPair& pair) {
    if (u < 1 || v < 1 || !(T > 0.0)) throw DomainError("I requires u, v >= 1 and T > 0");
    const double top = std::pow(profile.N, profile.alpha);
    if (top > 2e4) throw CapacityError("the full double sum is limited to N^alpha <= 2e4");
    const i64 nmax = static_cast<i64>(std::floor(top));
    const auto lam = lambda0_table(Character(disc.D), std::max<i64>(nmax, 1));
    KahanSum<double> acc;
    for (i64 m = 1; m <= nmax; ++m) {
        if (lam[m] == 0) continue;
        const double hm = crop_h(static_cast<double>(m), profile);
        if (hm == 0.0) continue;
        for (i64 n = 1; n <= nmax; ++n) {
            if (u * m == v * n || lam[n] == 0) continue;
            const double hn = crop_h(static_cast<double>(n), profile);
            if (hn == 0.0) continue;
            const double arg = T * std::log(static_cast<double>(u * m) / static_cast<double>(v * n));
            acc += psi_eval(arg, pair) * static_cast<double>(lam[m] * lam[n]) * hm * hn /
                   std::sqrt(static_cast<double>(m) * static_cast<double>(n));
        }
    }
    return acc.value();
}

double I_h_main_term(const SingularInput& in, double T, const CropProfile& profile, const TestFunctionPair& pair) {
    const double S = singular_series_closed(in);
    const double L1 = L1_chi(in.disc);
    const double hT = static_cast<double>(in.h) * T;
    // Integrate in t = log x from where Psi(hT/x) is negligible to the end of the crop support.
    const double t0 = std::log(hT / 400.0);
    const double t1 = profile.alpha * std::log(profile.N) + std::log(static_cast<double>(std::min(in.u, in.v)));
    if (t1 <= t0) return 0.0;
    auto f = [&](double t) {
        const double x = std::exp(t);
        return psi_eval(hT / x, pair) * crop_h(x / in.u, profile) * crop_h(x / in.v, profile);
    };
    const double integral = integrate_gl(f, t0, t1, 400, 20);
    return S * L1 * L1 / std::sqrt(static_cast<double>(in.w())) * integral;
}

// ---------------------------------------------------------------------------
// Dirichlet series of gamma* and the kernel k*

cplx zeta_gamma_star_direct(cplx s, const SingularInput& in, i64 d_max) {
    KahanSum<cplx> acc;
    for (i64 d = 1; d <= d_max; ++d) {
        const double g = gamma_star(d, in);
        if (g != 0.0) acc += g * std::exp(-s * std::log(static_cast<double>(d)));
    }
    return acc.value();
}

cplx zeta_gamma_star(cplx s, const SingularInput& in) {
    const Character chi(in.disc.D);
    cplx z = zeta(s + 1.0);
    for (auto [p, e] : factorize(in.disc.absD)) z *= 1.0 - std::exp(-(s + 1.0) * std::log(static_cast<double>(p)));
    for (auto [p, e] : factorize(in.w())) z *= 1.0 + static_cast<double>(chi(p)) * std::exp(-s * std::log(double(p)));
    return z * xi_fn(in.w(), chi) / zeta_q2(in.disc.absD);
}

double zeta_gamma_star_residue(const SingularInput& in) {
    const Character chi(in.disc.D);
    double lam = 0.0;
    for (i64 c : divisors(in.w())) lam += chi(c);
    const double aD = static_cast<double>(in.disc.absD);
    return lam * xi_fn(in.w(), chi) * static_cast<double>(euler_phi(in.disc.absD)) / (zeta_q2(in.disc.absD) * aD);
}

namespace {

// Beyond Z the d-sum of |phi(d y)|/d is below 1e-14: sum_{d y > Z} C (d y)^{-expo} / d < C Z^{-expo} / expo.
double phi_negligible_z(const TestFunctionPair& pair) {
    const double C = psi_tail_constant(pair) * 1.01;  // zeta(k+2) < 1.01 covers phi <= sum_k Psi(kz)
    const double expo = pair.smoothness + 2.0;
    return std::max(2.0 * kPi / pair.support_hi, std::pow(C / (expo * 1e-14), 1.0 / expo));
}

// sum_{(d, D) = 1} phi(d y) / d. Below z = 2 pi / support_hi the kernel equals -Psi(0)/2 exactly.
double coprime_phi_sum(double y, i64 absD, const TestFunctionPair& pair) {
    const double psi0 = psi_eval(0.0, pair);
    const double z_flat = 2.0 * kPi / pair.support_hi;
    const double Z = phi_negligible_z(pair);
    if (Z / y > 5e8) throw CapacityError("k* is limited to y >= Z / 5e8");
    KahanSum<double> flat, rest;
    const i64 dmax = static_cast<i64>(std::floor(Z / y)) + 1;
    for (i64 d = 1; d <= dmax; ++d) {
        if (std::gcd(d, absD) != 1) continue;
        const double z = d * y;
        if (z < z_flat)
            flat += 1.0 / static_cast<double>(d);
        else
            rest += phi_route_b(z, pair) / static_cast<double>(d);
    }
    return -0.5 * psi0 * flat.value() + rest.value();
}

void require_squarefree_w(const SingularInput& in) {
    in.validate();
    if (!is_squarefree(in.w())) throw DomainError("k* and z* require w squarefree");
}

}  // namespace

double k_star(double y, const SingularInput& in, const TestFunctionPair& pair) {
    if (!(y > 0.0)) throw DomainError("k* requires y > 0");
    require_squarefree_w(in);
    const Character chi(in.disc.D);
    KahanSum<double> acc;
    for (i64 c : divisors(in.w())) {
        const int x = chi(c);
        if (x != 0) acc += x * coprime_phi_sum(static_cast<double>(c) * y, in.disc.absD, pair);
    }
    return xi_fn(in.w(), chi) / zeta_q2(in.disc.absD) * acc.value();
}

double alpha_D(const Discriminant& disc) {
    double a = 0.0;
    for (auto [p, e] : factorize(disc.absD)) a += std::log(static_cast<double>(p)) / (static_cast<double>(p) - 1.0);
    return a;
}

double k_star_small_y(double y, const SingularInput& in, const TestFunctionPair& pair, double alpha0) {
    require_squarefree_w(in);
    const double psi0 = psi_eval(0.0, pair);
    const double pre = 0.5 * zeta_gamma_star_residue(in);
    return pre * (psi0 * std::log(y * std::sqrt(static_cast<double>(in.w()))) - psi0 * alpha_D(in.disc) + alpha0);
}

double calibrate_alpha0(double y, const SingularInput& in, const TestFunctionPair& pair) {
    const double pre = 0.5 * zeta_gamma_star_residue(in);
    if (pre == 0.0) throw DomainError("alpha0 calibration needs lambda(w) != 0");
    return (k_star(y, in, pair) - k_star_small_y(y, in, pair, 0.0)) / pre;
}

double phi0_mellin_at_zero(const TestFunctionPair& pair) {
    // phi_0(z) = -Psi(0) z / 2 on the flat range, so phi_0(z)/z is constant there.
    const double psi0 = psi_eval(0.0, pair);
    const double z_flat = 2.0 * kPi / pair.support_hi;
    if (!(z_flat > 1.0)) throw DomainError("phi_0 Mellin value assumes support_hi < 2 pi");
    // [0, 1] contributes -Psi(0)/2; on [1, z_flat] phi_0 = phi = -Psi(0)/2.
    double total = -0.5 * psi0 - 0.5 * psi0 * std::log(z_flat);
    const double Z = phi_negligible_z(pair);
    const int panels = static_cast<int>(std::ceil((Z - z_flat) * 4.0));
    total += integrate_gl([&](double z) { return phi_route_b(z, pair) / z; }, z_flat, Z, panels, 20);
    return total;
}

double alpha0_predicted(const TestFunctionPair& pair) {
    return 2.0 * phi0_mellin_at_zero(pair) - psi_eval(0.0, pair) * (kEulerGamma - 1.0);
}

double harmonic_coprime(double X, const Discriminant& disc) {
    if (X <= 1.0) return 0.0;
    if (X > 5e8) throw CapacityError("harmonic_coprime is limited to X <= 5e8");
    KahanSum<double> acc;
    const i64 top = static_cast<i64>(std::ceil(X)) - 1;
    for (i64 d = 1; d <= top; ++d)
        if (std::gcd(d, disc.absD) == 1) acc += (1.0 - d / X) / static_cast<double>(d);
    return acc.value();
}

double harmonic_coprime_main(double X, const Discriminant& disc) {
    const double ratio = static_cast<double>(euler_phi(disc.absD)) / static_cast<double>(disc.absD);
    return ratio * (std::log(X) + kEulerGamma - 1.0 + alpha_D(disc));
}

// ---------------------------------------------------------------------------
// J*, K and P(delta)

KCoefficients k_coefficients(double T, const Discriminant& disc, const CropProfile& profile,
                             const TestFunctionPair& pair) {
    KCoefficients k;
    const double ratio = static_cast<double>(euler_phi(disc.absD)) / static_cast<double>(disc.absD);
    const double psi0 = psi_eval(0.0, pair);
    k.B = psi0 * ratio / 2.0;
    k.logN = std::log(profile.N);
    k.X = T * profile.M * profile.M;
    k.A = (ratio * phi0_mellin_at_zero(pair) + k.B * (std::log(T) - kEulerGamma + 1.0 - alpha_D(disc))) / k.logN;
    return k;
}

double K_kernel(double ratio, const KCoefficients& k, const CropProfile& profile) {
    if (!(ratio > 0.0)) throw DomainError("K requires a positive ratio");
    const double eta = 0.5 * std::log(ratio) / k.logN;
    const double t0 = std::log(k.X) / k.logN;
    const double t1 = profile.alpha + std::abs(eta);
    if (t1 <= t0) return 0.0;
    std::vector<double> cuts{t0, t1};
    for (double b : {profile.beta - eta, profile.beta + eta, profile.alpha - eta, profile.alpha + eta})
        if (b > t0 && b < t1) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    auto f = [&](double t) { return (k.A - k.B * t) * crop_a(t + eta, profile) * crop_a(t - eta, profile); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate_gl(f, cuts[i], cuts[i + 1], 8, 20);
    return total * k.logN;
}

double J_star(const SingularInput& in, double T, const CropProfile& profile, const TestFunctionPair& pair) {
    require_squarefree_w(in);
    const Character chi(in.disc.D);
    const double logN = std::log(profile.N);
    // Below x = T / Z every phi(d T / x) is negligible.
    const double t0 = std::log(T / phi_negligible_z(pair)) / logN;
    KahanSum<double> acc;
    for (i64 c : divisors(in.w())) {
        const int x = chi(c);
        if (x == 0) continue;
        // In t = log x / log N the crop factors vanish beyond alpha + log(min(u,v)/c)/log N.
        const double cd = static_cast<double>(c);
        const double t1 = profile.alpha + std::log(static_cast<double>(std::min(in.u, in.v)) / cd) / logN;
        if (t1 <= t0) continue;
        auto f = [&](double t) {
            const double xx = std::exp(t * logN);
            const double hh = crop_h(cd * xx / in.u, profile) * crop_h(cd * xx / in.v, profile);
            if (hh == 0.0) return 0.0;
            return coprime_phi_sum(T / xx, in.disc.absD, pair) * hh;
        };
        acc += x * integrate_gl(f, t0, t1, 24, 20) * logN;
    }
    return xi_fn(in.w(), chi) / zeta_q2(in.disc.absD) * acc.value();
}

double P_delta_numeric(double delta, double A, double B, double nu, double g12) {
    auto f = [&](double t) { return (A - B * t + B * delta) * ((1 - t) * (1 - t) - 0.25 * g12 * g12); };
    return -integrate_gl(f, nu, nu + delta, 1, 20);
}

double P_delta_even(double delta, double A, double B, double nu, double g12) {
    const double c2 = B / 8.0 * g12 * g12 + 0.5 * (1.0 - nu) * (2.0 * A - B - B * nu);
    return c2 * delta * delta - B / 12.0 * std::pow(delta, 4);
}

}  // namespace lacunary

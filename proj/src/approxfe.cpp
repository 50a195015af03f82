#include "lacunary/approxfe.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace lacunary {

namespace {

// Monomial coefficients of the order-k smoothstep.
const std::vector<double>& smoothstep_coeffs(int k) {
    static std::mutex mu;
    static std::map<int, std::vector<double>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    std::vector<double> c(static_cast<std::size_t>(2 * k + 2), 0.0);
    auto binom = [](int n, int r) {
        double b = 1;
        for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
        return b;
    };
    for (int n = 0; n <= k; ++n)
        c[k + 1 + n] = binom(k + n, n) * binom(2 * k + 1, k - n) * ((n % 2) ? -1.0 : 1.0);
    return cache.emplace(k, std::move(c)).first->second;
}

// Derivative of order j of a''(u) on the transition, expressed through v = (u - beta)/w.
double a2_deriv(double u, int j, const CropProfile& p) {
    const double w = p.alpha - p.beta;
    const double v = (u - p.beta) / w;
    const int k = p.smoothness;
    return std::pow(w, -j) *
           (-(1.0 - u) * smoothstep(v, k, j + 2) / (w * w) + (j + 2) * smoothstep(v, k, j + 1) / w);
}

cplx f_times_logN(cplx z, const CropProfile& p) {
    const double ell = std::log(p.N);
    const double w = p.alpha - p.beta;
    const cplx c = z * ell;
    if (std::abs(c) * w > 2.0) {
        // Exact antiderivative of polynomial times exponential; a'' and its first two derivatives vanish at both ends.
        const int deg = 2 * p.smoothness;
        cplx acc = 0.0;
        cplx cpow = c * c * c * c;  // c^{j+1} for j = 3
        double sgn = -1.0;
        const cplx ea = std::exp(c * p.alpha), eb = std::exp(c * p.beta);
        for (int j = 3; j <= deg; ++j) {
            acc += sgn * (a2_deriv(p.alpha, j, p) * ea - a2_deriv(p.beta, j, p) * eb) / cpow;
            cpow *= c;
            sgn = -sgn;
        }
        return acc;
    }
    return integrate_gl([&](double u) { return crop_a_second_derivative(u, p) * std::exp(c * u); }, p.beta,
                        p.alpha, 2, 20);
}

}  // namespace

void CropProfile::validate() const {
    if (!(0.5 < beta && beta < alpha && alpha < 1.0)) throw DomainError("crop profile requires 1/2 < beta < alpha < 1");
    if (!(N >= 2.0)) throw DomainError("crop profile requires N >= 2");
    if (!(M >= 1.0)) throw DomainError("crop profile requires M >= 1");
    if (smoothness < 4) throw DomainError("crop profile requires smoothness >= 4");
    if (r < 1) throw DomainError("crop profile requires r >= 1");
}

CropProfile profile_for_height(const Discriminant& disc, double T, double alpha, double beta) {
    CropProfile p;
    p.alpha = alpha;
    p.beta = beta;
    p.N = disc.Q * disc.Q * T * T;
    p.validate();
    return p;
}

double smoothstep(double v, int k, int deriv) {
    // Outside [0,1] the step is constant; at the end points the polynomial gives the inner one-sided derivatives.
    if (v < 0.0 || v > 1.0) {
        if (deriv > 0) return 0.0;
        return v < 0.0 ? 0.0 : 1.0;
    }
    const auto& c = smoothstep_coeffs(k);
    double s = 0.0;
    for (int n = static_cast<int>(c.size()) - 1; n >= deriv; --n) {
        double f = c[n];
        for (int i = 0; i < deriv; ++i) f *= (n - i);
        s = s * v + f;
    }
    return s;
}

double crop_a(double x, const CropProfile& p) {
    if (x <= p.beta) return 1.0 - x;
    if (x >= p.alpha) return 0.0;
    return (1.0 - x) * (1.0 - smoothstep((x - p.beta) / (p.alpha - p.beta), p.smoothness));
}

double crop_b(double x, const CropProfile& p) {
    if (x <= p.beta) return 0.0;
    if (x >= p.alpha) return 1.0 - x;
    return (1.0 - x) * smoothstep((x - p.beta) / (p.alpha - p.beta), p.smoothness);
}

double crop_a_second_derivative(double u, const CropProfile& p) {
    if (u <= p.beta || u >= p.alpha) return 0.0;
    return a2_deriv(u, 0, p);
}

double crop_g(double m, const CropProfile& p) {
    if (m < 1.0 || m > p.M) return 0.0;
    if (p.M <= 1.0) return 1.0;
    return std::pow(1.0 - std::log(m) / std::log(p.M), p.r);
}

cplx f_of_z(cplx z, const CropProfile& p) { return f_times_logN(z, p) / std::log(p.N); }

double crop_a_via_mellin(double y, const CropProfile& p) {
    // Conjugate symmetry in Im z halves the range; the integrand decays like |z|^{-2} times f.
    const double ly = std::log(y);
    auto integrand = [&](double tau) {
        const cplx z(1.0, tau);
        return (f_of_z(z, p) * std::exp(-z * ly) / (z * z)).real();
    };
    KahanSum<double> acc;
    const double width = 2.0;
    for (int k = 0; k < 4000; ++k) acc += integrate_gl(integrand, k * width, (k + 1) * width, 1, 24);
    return acc.value() / kPi;
}

double delta_of_s(cplx s, const Discriminant& disc, const CropProfile& p) {
    const double T = std::sqrt(p.N) / disc.Q;
    return 2.0 * std::log(std::abs(s) / T) / std::log(p.N);
}

cplx A_poly(cplx s, const Discriminant& disc, const CropProfile& p) {
    const double ell = std::log(p.N);
    const i64 nmax = static_cast<i64>(std::floor(std::pow(p.N, p.alpha)));
    const auto lam = lambda0_table(Character(disc.D), std::max<i64>(nmax, 1));
    KahanSum<cplx> acc;
    for (i64 n = 1; n <= nmax; ++n) {
        if (!lam[n]) continue;
        const double ln = std::log(static_cast<double>(n));
        const double a = crop_a(ln / ell, p);
        if (a != 0.0) acc += a * lam[n] * std::exp(-s * ln);
    }
    return acc.value();
}

cplx B_poly(cplx s, const Discriminant& disc, const CropProfile& p) {
    if (std::abs(s.real() - 0.5) > 1e-12) throw DomainError("B_poly conjugate form requires Re s = 1/2");
    const double ell = std::log(p.N);
    const double delta = delta_of_s(s, disc, p);
    if (delta < -1e-12 || delta > std::log(4.0) / ell + 1e-12)
        throw DomainError("delta(s) outside [0, log 4 / log N]: s is off the segment");
    // b*(x) = b(1 - x + delta) vanishes for x >= 1 - beta + delta
    const i64 nmax = static_cast<i64>(std::floor(std::exp((1.0 - p.beta + delta) * ell)));
    const auto lam = lambda0_table(Character(disc.D), std::max<i64>(nmax, 1));
    KahanSum<cplx> acc;
    for (i64 n = 1; n <= nmax; ++n) {
        if (!lam[n]) continue;
        const double ln = std::log(static_cast<double>(n));
        const double b = crop_b(1.0 - ln / ell + delta, p);
        if (b != 0.0) acc += b * lam[n] * std::exp(-s * ln);
    }
    return std::conj(acc.value());
}

cplx B_poly_direct(cplx s, const Discriminant& disc, const CropProfile& p) {
    const double ell = std::log(p.N);
    const double lq = std::log(disc.Q * disc.Q * std::norm(s));
    const i64 nmax = static_cast<i64>(std::floor(std::exp(lq - p.beta * ell)));
    if (nmax < 1) return 0.0;
    const auto lam = lambda0_table(Character(disc.D), nmax);
    KahanSum<cplx> acc;
    for (i64 n = 1; n <= nmax; ++n) {
        if (!lam[n]) continue;
        const double ln = std::log(static_cast<double>(n));
        const double b = crop_b((lq - ln) / ell, p);
        if (b != 0.0) acc += b * lam[n] * std::exp((s - 1.0) * ln);
    }
    return acc.value();
}

cplx eta(cplx s, cplx z, const Discriminant& disc) {
    const cplx lr = log_root_factor(s + z, disc) - log_root_factor(s, disc) + 2.0 * z * std::log(disc.Q * std::abs(s));
    return (std::exp(lr) - 1.0) / (z * z);
}

ContourResult R_term(cplx s, const Discriminant& disc, const CropProfile& p, double tol) {
    const double lqs = std::log(disc.Q * std::abs(s));
    if (!(lqs > 0.0)) throw DomainError("R_term requires Q|s| > 1");
    const double eps = 1.0 / lqs;
    auto integrand = [&](double tau) {
        const cplx z(-eps, tau);
        return L_product(1.0 - s - z, disc) * std::exp(-2.0 * z * lqs) * f_of_z(z, p) * eta(s, z, disc);
    };
    KahanSum<cplx> acc;
    ContourResult res;
    const int min_panels = 40, max_panels = 1000, window = 10;
    std::vector<double> recent;
    int k = 0;
    for (; k < max_panels; ++k) {
        const cplx up = integrate_gl(integrand, k, k + 1.0, 1, 32);
        const cplx dn = integrate_gl(integrand, -k - 1.0, -static_cast<double>(k), 1, 32);
        acc += up;
        acc += dn;
        recent.push_back(std::abs(up) + std::abs(dn));
        if (k + 1 >= min_panels && static_cast<int>(recent.size()) >= window) {
            double last = 0;
            for (std::size_t i = recent.size() - window; i < recent.size(); ++i) last += recent[i];
            if (last / (2.0 * kPi) < tol) {
                res.tail_estimate = last / (2.0 * kPi);
                break;
            }
        }
    }
    if (k == max_panels) throw NumericalError("R_term contour did not converge within |Im z| <= 1000");
    res.truncation = k + 1.0;
    res.value = acc.value() / (2.0 * kPi);
    return res;
}

cplx R_crossing_residue(cplx s, const Discriminant& disc, const CropProfile& p) {
    const double lqs = std::log(disc.Q * std::abs(s));
    const double eps = 1.0 / lqs;
    // The pole z = -s lies strictly between Re z = -1 and Re z = -eps only when eps < Re s < 1.
    if (!(s.real() > eps && s.real() < 1.0)) return 0.0;
    const double Rres = L1_chi(disc);
    // L(1-s-z) ~ -Rres/(z+s), eta(s,-s) = -1/s^2 since X(0) = 0
    return Rres * std::exp(2.0 * s * lqs) * f_of_z(-s, p) / (s * s);
}

PartitionTerms partition_terms(cplx s, const Discriminant& disc, const CropProfile& p) {
    PartitionTerms t;
    t.G = G_fn(s, disc, p.N);
    t.A = A_poly(s, disc, p);
    t.B = B_poly(s, disc, p);
    t.X = root_factor(s, disc);
    const ContourResult R = R_term(s, disc, p);
    t.R = R.value;
    t.R_tail = R.tail_estimate;
    const cplx one_minus_s = 1.0 - s;
    t.polar = L1_chi(disc) * f_of_z(one_minus_s, p) / (one_minus_s * one_minus_s);
    t.crossing = R_crossing_residue(s, disc, p);
    t.residual = std::abs(t.G - t.A - t.X * t.B + t.X * t.R - t.X * t.crossing + t.polar);
    t.printed_residual = std::abs(t.G - t.A - t.X * t.B - t.X * t.R - t.polar);
    t.corollary_gap = std::abs(t.G - t.A - t.X * t.B);
    return t;
}

double partition_residual(cplx s, const Discriminant& disc, const CropProfile& p) {
    return partition_terms(s, disc, p).residual;
}

}  // namespace lacunary

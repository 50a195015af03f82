#include "lacunary/lfunctions.hpp"

#include <array>
#include <cmath>

namespace lacunary {

namespace {

constexpr double kLanczosG = 607.0 / 128.0;
constexpr std::array<double, 15> kLanczosC = {
    0.99999999999999709182,     57.156235665862923517,      -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,    .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4,  .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,   -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4,  .36899182659531622704e-5};

const cplx I(0.0, 1.0);

// log(sin(pi z)) modulo 2 pi i, stable for large |Im z|.
cplx log_sin_pi(cplx z) {
    if (std::abs(z.imag()) < 20.0) return std::log(std::sin(kPi * z));
    if (z.imag() > 0) {
        // sin(pi z) = e^{-i pi z} (e^{2 pi i z} - 1) / (2i)
        return -I * kPi * z + std::log((std::exp(2.0 * kPi * I * z) - 1.0) / (2.0 * I));
    }
    return I * kPi * z + std::log((1.0 - std::exp(-2.0 * kPi * I * z)) / (2.0 * I));
}

// (e^w - 1)/w and its derivative in w.
cplx phi1(cplx w) {
    if (std::abs(w) < 0.5) {
        cplx term = 1.0, s = 1.0;
        for (int k = 2; k < 30; ++k) {
            term *= w / static_cast<double>(k);
            s += term;
        }
        return s;
    }
    return (std::exp(w) - 1.0) / w;
}

cplx phi1_prime(cplx w) {
    if (std::abs(w) < 0.5) {
        // sum_{k>=1} k w^{k-1} / (k+1)!
        cplx pw = 1.0, s = 0.0;
        double fact = 2.0;
        for (int k = 1; k < 30; ++k) {
            s += static_cast<double>(k) * pw / fact;
            pw *= w;
            fact *= (k + 2);
        }
        return s;
    }
    const cplx e = std::exp(w);
    return (w * e - (e - 1.0)) / (w * w);
}

int em_shift(cplx s) { return static_cast<int>(std::max(20.0, std::ceil(2.0 * std::abs(s.imag())))); }

constexpr int kBernoulliTerms = 6;

// Hurwitz zeta without the x^{1-s}/(s-1) tail term, x = M + a.
ValueDeriv hurwitz_regular_part(cplx s, double a, int M) {
    KahanSum<cplx> v, d;
    for (int k = 0; k < M; ++k) {
        const double x = k + a;
        const double lx = std::log(x);
        const cplx t = std::exp(-s * lx);
        v += t;
        d += -lx * t;
    }
    const double x = M + a;
    const double lx = std::log(x);
    const cplx xs = std::exp(-s * lx);  // x^{-s}
    v += 0.5 * xs;
    d += -0.5 * lx * xs;
    // Bernoulli corrections B_{2j}/(2j)! P_j(s) x^{-s-2j+1}, P_j = s (s+1) ... (s+2j-2)
    const auto& B = bernoulli_even();
    cplx P = s, dP = 1.0;
    double fact = 2.0;  // (2j)!
    double xpow = 1.0 / x;  // x^{-2j+1}
    for (int j = 1; j <= kBernoulliTerms; ++j) {
        const cplx base = xs * xpow;
        const double c = B[j - 1] / fact;
        v += c * P * base;
        d += c * (dP * base - lx * P * base);
        const cplx f1 = s + static_cast<double>(2 * j - 1);
        const cplx f2 = s + static_cast<double>(2 * j);
        dP = dP * f1 * f2 + P * (f1 + f2);
        P = P * f1 * f2;
        fact *= (2.0 * j + 1) * (2.0 * j + 2);
        xpow /= x * x;
    }
    return {v.value(), d.value()};
}

}  // namespace

cplx log_gamma(cplx z) {
    if (z.real() < 0.5) return std::log(kPi) - log_sin_pi(z) - log_gamma(1.0 - z);
    z -= 1.0;
    cplx x = kLanczosC[0];
    for (std::size_t k = 1; k < kLanczosC.size(); ++k) x += kLanczosC[k] / (z + static_cast<double>(k));
    const cplx t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

cplx gamma_fn(cplx z) { return std::exp(log_gamma(z)); }

cplx log_root_factor(cplx s, const Discriminant& disc) {
    if (disc.D < 0) return (1.0 - 2.0 * s) * std::log(disc.Q) + log_gamma(1.0 - s) - log_gamma(s);
    return (1.0 - 2.0 * s) * std::log(2.0 * disc.Q) + 2.0 * log_gamma((1.0 - s) / 2.0) -
           2.0 * log_gamma(s / 2.0);
}


ValueDeriv hurwitz_zeta(cplx s, double a) {
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("hurwitz_zeta requires 0 < a <= 1");
    if (s == cplx(1.0, 0.0)) throw DomainError("hurwitz_zeta has a pole at s = 1");
    const int M = em_shift(s);
    ValueDeriv r = hurwitz_regular_part(s, a, M);
    const double x = M + a;
    const double lx = std::log(x);
    const cplx xp = std::exp((1.0 - s) * lx);
    const cplx u = s - 1.0;
    r.value += xp / u;
    r.deriv += -lx * xp / u - xp / (u * u);
    return r;
}

cplx zeta(cplx s) { return hurwitz_zeta(s, 1.0).value; }
ValueDeriv zeta_with_deriv(cplx s) { return hurwitz_zeta(s, 1.0); }

ValueDeriv dirichlet_L_with_deriv(cplx s, const Discriminant& disc) {
    const i64 q = disc.absD;
    Character chi(disc.D);
    const int M = em_shift(s);
    KahanSum<cplx> H, dH;
    for (i64 a = 1; a <= q; ++a) {
        const int x = chi(a);
        if (x == 0) continue;
        const double alpha = static_cast<double>(a) / q;
        ValueDeriv part = hurwitz_regular_part(s, alpha, M);
        // (y^{1-s} - 1)/(s - 1) = -log y * phi1(w), w = (1 - s) log y; the constants cancel in the character sum.
        const double ly = std::log(M + alpha);
        const cplx w = (1.0 - s) * ly;
        part.value += -ly * phi1(w);
        part.deriv += ly * ly * phi1_prime(w);
        H += static_cast<double>(x) * part.value;
        dH += static_cast<double>(x) * part.deriv;
    }
    const double lq = std::log(static_cast<double>(q));
    const cplx qs = std::exp(-s * lq);
    return {qs * H.value(), qs * (dH.value() - lq * H.value())};
}

cplx dirichlet_L(cplx s, const Discriminant& disc) { return dirichlet_L_with_deriv(s, disc).value; }

ValueDeriv L_product_with_deriv(cplx s, const Discriminant& disc) {
    const ValueDeriv z = zeta_with_deriv(s);
    const ValueDeriv l = dirichlet_L_with_deriv(s, disc);
    return {z.value * l.value, z.deriv * l.value + z.value * l.deriv};
}

cplx L_product(cplx s, const Discriminant& disc) { return L_product_with_deriv(s, disc).value; }

cplx G_fn(cplx s, const Discriminant& disc, double N) {
    if (!(N >= 2.0)) throw DomainError("G requires level N >= 2");
    const ValueDeriv L = L_product_with_deriv(s, disc);
    return L.value + L.deriv / std::log(N);
}

cplx root_factor_unchecked(cplx s, const Discriminant& disc) {
    if (disc.D < 0 && s == cplx(0.0, 0.0)) return 0.0;
    return std::exp(log_root_factor(s, disc));
}

cplx root_factor(cplx s, const Discriminant& disc) {
    if (!(s.real() >= 0.0 && s.real() < 1.0)) throw DomainError("root factor requires 0 <= Re s < 1");
    return root_factor_unchecked(s, disc);
}

double functional_equation_residual(cplx s, const Discriminant& disc) {
    const cplx lhs = L_product(s, disc);
    const cplx rhs = root_factor(s, disc) * std::conj(L_product(1.0 - std::conj(s), disc));
    return std::abs(lhs - rhs);
}

double stirling_residual(cplx s, cplx z, const Discriminant& disc) {
    if (z == cplx(0.0, 0.0)) return 0.0;
    const cplx lr = log_root_factor(s + z, disc) - log_root_factor(s, disc) +
                    2.0 * z * std::log(disc.Q * std::abs(s));
    return std::abs(std::exp(lr) - 1.0) * (std::abs(s) + std::abs(z)) / std::abs(z);
}

double hardy_theta_zeta(double t) {
    return log_gamma(cplx(0.25, 0.5 * t)).imag() - 0.5 * t * std::log(kPi);
}

double hardy_theta_chi(double t, const Discriminant& disc) {
    const double kappa = disc.D < 0 ? 1.0 : 0.0;
    return log_gamma(cplx(0.25 + 0.5 * kappa, 0.5 * t)).imag() +
           0.5 * t * std::log(static_cast<double>(disc.absD) / kPi);
}

double hardy_Z_zeta(double t) {
    const double th = hardy_theta_zeta(t);
    return (cplx(std::cos(th), std::sin(th)) * zeta(cplx(0.5, t))).real();
}

double hardy_Z_chi(double t, const Discriminant& disc) {
    const double th = hardy_theta_chi(t, disc);
    return (cplx(std::cos(th), std::sin(th)) * dirichlet_L(cplx(0.5, t), disc)).real();
}

}  // namespace lacunary

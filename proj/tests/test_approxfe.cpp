#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "lacunary/approxfe.hpp"

using namespace lacunary;

namespace {

// A transition wide enough that f(z) decays within a few hundred units of Im z.
CropProfile wide_profile(const Discriminant& d, double T) { return profile_for_height(d, T, 0.75, 0.55); }

}  // namespace

TEST_CASE("crop pair partitions 1 - x") {
    CropProfile p;
    p.N = 1e4;
    double worst = 0;
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        worst = std::max(worst, std::abs(crop_a(x, p) + crop_b(x, p) - (1 - x)));
    }
    CHECK(worst < 1e-12);
    CHECK(crop_a(0.55, p) + crop_b(0.55, p) == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(crop_a(0.0, p) == 1.0);
    CHECK(crop_a(p.alpha, p) == 0.0);
    CHECK(crop_b(p.beta, p) == 0.0);
    CHECK(crop_b(0.9, p) == doctest::Approx(0.1));
    CHECK(crop_a_second_derivative(0.3, p) == 0.0);
    // a'' by central differences inside the transition
    for (double u : {0.506, 0.5075, 0.509}) {
        const double h = 1e-6;
        const double fd = (crop_a(u + h, p) - 2 * crop_a(u, p) + crop_a(u - h, p)) / (h * h);
        CHECK(crop_a_second_derivative(u, p) == doctest::Approx(fd).epsilon(1e-3));
    }
}

TEST_CASE("mollifier crop") {
    CropProfile p;
    p.M = 50;
    p.r = 3;
    CHECK(crop_g(1.0, p) == 1.0);
    CHECK(crop_g(50.0, p) == doctest::Approx(0.0));
    CHECK(crop_g(51.0, p) == 0.0);
    // vanishing to order r at M: g(M e^{-h}) ~ (h / log M)^r
    const double h = 1e-3;
    CHECK(crop_g(50.0 * std::exp(-h), p) == doctest::Approx(std::pow(h / std::log(50.0), 3)).epsilon(1e-9));
}

TEST_CASE("profile validation") {
    CropProfile p;
    p.alpha = 0.5;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = CropProfile{};
    p.smoothness = 3;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = CropProfile{};
    p.N = 1.5;
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK_NOTHROW(CropProfile{}.validate());
}

TEST_CASE("entire kernel f") {
    CropProfile p;
    p.N = 9e3;
    const double ell = std::log(p.N);
    CHECK(std::abs(f_of_z(0.0, p) - 1.0 / ell) < 1e-11);
    const double h = 1e-5;
    const cplx fd = (f_of_z(h, p) - f_of_z(-h, p)) / (2 * h);
    CHECK(std::abs(fd - 1.0) < 1e-7);

    // Closed form (large |z|) against direct quadrature with many panels.
    for (cplx z : {cplx(0.0, 60.0), cplx(-0.2, 150.0), cplx(1.0, -400.0)}) {
        const cplx c = z * ell;
        const cplx direct = integrate_gl([&](double u) { return crop_a_second_derivative(u, p) * std::exp(c * u); },
                                         p.beta, p.alpha, 64, 20) /
                            ell;
        CHECK(std::abs(f_of_z(z, p) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
    }

    // Derivative by Cauchy's integral on a circle against a central difference.
    for (cplx z0 : {cplx(0.1, 0.3), cplx(-0.05, 2.0)}) {
        const double rad = 0.05;
        const int n = 64;
        cplx acc = 0;
        for (int k = 0; k < n; ++k) {
            const cplx w = std::polar(1.0, 2 * kPi * k / n);
            acc += f_of_z(z0 + rad * w, p) / (rad * w);
        }
        const cplx cauchy = acc / double(n);
        const cplx central = (f_of_z(z0 + 1e-5, p) - f_of_z(z0 - 1e-5, p)) / 2e-5;
        CHECK(std::abs(cauchy - central) < 1e-8 * std::max(1.0, std::abs(central)));
    }
}

TEST_CASE("Mellin inversion of f reproduces the crop") {
    CropProfile p;
    p.N = 1e4;
    CHECK(crop_a_via_mellin(std::sqrt(p.N), p) == doctest::Approx(crop_a(0.5, p)).epsilon(1e-6));
    CropProfile w;
    w.alpha = 0.75;
    w.beta = 0.55;
    w.N = 1e4;
    for (double x : {0.3, 0.6, 0.7}) {
        const double y = std::exp(x * std::log(w.N));
        CHECK(std::abs(crop_a_via_mellin(y, w) - crop_a(x, w)) < 1e-6);
    }
}

TEST_CASE("Dirichlet polynomials A and B") {
    auto d = Discriminant::make(-3);
    const CropProfile p = profile_for_height(d, 30.0);
    // A at large real s is dominated by n = 1 with weight a(0) = 1.
    CHECK(std::abs(A_poly(60.0, d, p) - 1.0) < 1e-15);

    for (double t : {30.0, 42.0, 59.0}) {
        const cplx s(0.5, t);
        const cplx b1 = B_poly(s, d, p);
        const cplx b2 = B_poly_direct(s, d, p);
        CHECK(std::abs(b1 - b2) < 1e-10 * std::max(1.0, std::abs(b2)));
        const double delta = delta_of_s(s, d, p);
        CHECK(delta >= 0.0);
        CHECK(delta <= std::log(4.0) / std::log(p.N));
    }
    CHECK_THROWS_AS(B_poly(cplx(0.5, 10.0), d, p), DomainError);
    CHECK_THROWS_AS(B_poly(cplx(0.5, 70.0), d, p), DomainError);
    CHECK_THROWS_AS(B_poly(cplx(0.6, 40.0), d, p), DomainError);

    // b*(x) = x - delta on the leading range and zero beyond 4 N^{1 - beta}.
    const cplx s(0.5, 45.0);
    const double ell = std::log(p.N);
    const double delta = delta_of_s(s, d, p);
    for (double n : {1.0, 2.0, std::floor(std::pow(p.N, 1 - p.alpha))}) {
        const double x = std::log(n) / ell;
        CHECK(crop_b(1 - x + delta, p) == doctest::Approx(x - delta).epsilon(1e-14));
    }
    const double cut = 4 * std::pow(p.N, 1 - p.beta);
    for (double n = std::ceil(cut) + 1; n < cut + 50; n += 7) CHECK(crop_b(1 - std::log(n) / ell + delta, p) == 0.0);

    // delta grows with |s|
    double prev = -1;
    for (double t = 30; t <= 60; t += 2.5) {
        const double dl = delta_of_s(cplx(0.5, t), d, p);
        CHECK(dl > prev);
        prev = dl;
    }
}

TEST_CASE("eta is regular at z = 0 once its simple pole is removed") {
    // eta(s,z) = c/z + O(1) with c = d/dz [log X(s+z) + 2 z log(Q|s|)] at z = 0, which is O(|s|^{-2}).
    for (i64 D : {-3, -7}) {
        auto d = Discriminant::make(D);
        for (double t : {20.0, 40.0}) {
            const cplx s(0.5, t);
            const double h = 1e-5;
            const cplx c = (log_root_factor(s + h, d) - log_root_factor(s - h, d)) / (2 * h) +
                           2.0 * std::log(d.Q * std::abs(s));
            CHECK(std::abs(c) < 1.0 / (t * t));
            const cplx e3 = eta(s, 1e-3, d) - c / 1e-3;
            const cplx e4 = eta(s, 1e-4, d) - c / 1e-4;
            CHECK(std::isfinite(std::abs(e3)));
            CHECK(std::abs(e3 - e4) < 1e-2 * std::max(1.0, std::abs(e4)));
            const cplx ei = eta(s, cplx(0, 1e-3), d) - c / cplx(0, 1e-3);
            CHECK(std::abs(ei - e4) < 1e-2 * std::max(1.0, std::abs(e4)));
        }
    }
}

TEST_CASE("correction integral R decreases with height") {
    auto d = Discriminant::make(-3);
    double prev = 1e300;
    for (double t : {20.0, 40.0, 80.0}) {
        const CropProfile p = wide_profile(d, t / 1.5);
        const ContourResult r = R_term(cplx(0.5, t), d, p);
        std::printf("R(1/2+%gi): |R| = %.6e, |Im z| <= %g, tail %.2e\n", t, std::abs(r.value), r.truncation,
                    r.tail_estimate);
        CHECK(std::isfinite(std::abs(r.value)));
        CHECK(std::abs(r.value) < prev);
        prev = std::abs(r.value);
    }
}

TEST_CASE("partition of G into A, B and the correction terms") {
    struct Pt {
        i64 D;
        double T, t;
    };
    for (Pt pt : {Pt{-3, 30, 35}, Pt{-7, 20, 25}}) {
        auto d = Discriminant::make(pt.D);
        const CropProfile p = wide_profile(d, pt.T);
        const PartitionTerms terms = partition_terms(cplx(0.5, pt.t), d, p);
        INFO("D = " << pt.D << " t = " << pt.t);
        CHECK(terms.residual < 1e-5);
        // The arrangement with every correction added does not balance.
        CHECK(terms.printed_residual > 1e-3);
        // The gap left by the two polynomials is carried by the correction terms.
        const double corr = std::abs(-terms.X * terms.R + terms.X * terms.crossing - terms.polar);
        CHECK(std::abs(terms.corollary_gap - corr) < 1e-5);
    }
}

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "doctest.h"
#include "lacunary/diagonal.hpp"
#include "lacunary/offdiagonal.hpp"

using namespace lacunary;

namespace {

const TestFunctionPair kPair{};

double zeta_d2(i64 absD) {
    double z = kPi * kPi / 6.0;
    for (auto [p, e] : factorize(absD)) z *= 1.0 - 1.0 / double(p * p);
    return z;
}

CropProfile small_profile(double N) {
    CropProfile p;
    p.N = N;
    p.M = 10;
    p.r = 3;
    p.validate();
    return p;
}

}  // namespace

TEST_CASE("test function pair: symmetry, plateau and Psi(0)") {
    kPair.validate();
    CHECK(kPair.Phi(0.0) == 0.0);
    for (double t : {0.6, 0.9, 1.0, 1.5, 2.0, 2.3}) CHECK(kPair.Phi(t) == kPair.Phi(-t));
    for (double t : {1.0, 1.25, 1.75, 2.0}) CHECK(kPair.Phi(t) == 1.0);
    CHECK(kPair.Phi(0.5) == 0.0);
    CHECK(kPair.Phi(2.5) == 0.0);
    // Psi(0) is the mass of Phi; each symmetric smoothstep shoulder of width 1/2 carries 1/4.
    const double mass = integrate_gl([](double t) { return kPair.Phi(t); }, 0.5, 2.5, 64, 20);
    CHECK(psi_eval(0.0, kPair) == doctest::Approx(2.0 * mass).epsilon(1e-13));
    CHECK(psi_eval(0.0, kPair) == doctest::Approx(3.0).epsilon(1e-12));
    for (double z : {0.3, 7.0, 41.5}) CHECK(psi_eval(z, kPair) == doctest::Approx(psi_eval(-z, kPair)).epsilon(1e-14));
    // Derivatives against central differences.
    for (double z : {0.7, 5.0}) {
        const double h = 1e-4;
        const double d1 = (psi_eval(z + h, kPair) - psi_eval(z - h, kPair)) / (2 * h);
        CHECK(psi_eval(z, kPair, 1) == doctest::Approx(d1).epsilon(1e-7));
        const double d2 = (psi_eval(z + h, kPair, 1) - psi_eval(z - h, kPair, 1)) / (2 * h);
        CHECK(psi_eval(z, kPair, 2) == doctest::Approx(d2).epsilon(1e-7));
    }
    TestFunctionPair bad;
    bad.plateau_lo = 0.4;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("Psi at large arguments matches direct quadrature") {
    const double cuts[4] = {kPair.support_lo, kPair.plateau_lo, kPair.plateau_hi, kPair.support_hi};
    for (double z = 30.0; z < 3000.0; z *= 1.07)
        for (int d = 0; d <= 2; ++d) {
            auto kernel = [&](double t) {
                const double ph = kPair.Phi(t);
                return d == 0 ? ph * std::cos(t * z) : d == 1 ? -t * ph * std::sin(t * z) : -t * t * ph * std::cos(t * z);
            };
            double q = 0.0;
            for (int i = 0; i < 3; ++i)
                q += integrate_gl(kernel, cuts[i], cuts[i + 1], 1 + int(z * (cuts[i + 1] - cuts[i])), 20);
            CHECK(std::abs(psi_eval(z, kPair, d) - 2.0 * q) < 1e-12);
        }
    CHECK(psi_eval(-40.0, kPair, 1) == -psi_eval(40.0, kPair, 1));
    CHECK(psi_eval(-40.0, kPair, 2) == psi_eval(40.0, kPair, 2));
}

TEST_CASE("Psi decay constants for A = 4") {
    const DecayConstants dc = psi_decay_constants(kPair, 4.0, 1000.0, 2001);
    const DecayConstants again = psi_decay_constants(kPair, 4.0, 1000.0, 2001);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::isfinite(dc.C[j]));
        CHECK(dc.C[j] > 0.0);
        CHECK(dc.C[j] == again.C[j]);
    }
    // Off-grid points respect the recorded bound up to the grid resolution.
    for (double z : {0.123, 13.37, 333.3, 871.9})
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(psi_eval(z, kPair, j)) * std::pow(1 + z, 4.0) <= 1.05 * dc.C[j]);
}

TEST_CASE("Mellin transform of Psi: regularized form, pole and zero") {
    for (cplx s : {cplx(0.5, 0), cplx(0.3, 2.0), cplx(-0.5, 0)}) {
        const cplx reg = psi_mellin(s, kPair), closed = psi_mellin_closed(s, kPair);
        CHECK(std::abs(reg - closed) <= 1e-7 * std::max(1.0, std::abs(closed)));
    }
    // The zero at s = 1 cancels the pole of zeta(s).
    CHECK(std::abs(psi_mellin(1.0, kPair)) < 1e-6);
    // Residue Psi(0) at s = 0; the symmetric average removes the O(s) term.
    const double s = 1e-3;
    const double res = 0.5 * (s * psi_mellin(s, kPair) - s * psi_mellin(-s, kPair)).real();
    CHECK(res == doctest::Approx(psi_eval(0.0, kPair)).epsilon(1e-5));
    CHECK_THROWS_AS(psi_mellin(-2.5, kPair), DomainError);
}

TEST_CASE("phi kernel: three routes, decay and phi_0") {
    const std::vector<double> grid{0.1, 0.3, 1.0, 2.0, 2.6, 3.0, 5.0, 10.0, 31.4, 100.0, 333.0, 1000.0};
    const PhiKernelReport rep = phi_kernel_check(kPair, grid);
    CHECK(rep.max_discrepancy < 1e-9);
    CHECK(rep.decay_constant < 10.0);
    CHECK(std::isfinite(rep.phi0_constant));
    // Below 2 pi / 2.5 no Poisson term survives.
    for (double z : {0.05, 1.0, 2.5}) CHECK(phi_route_b(z, kPair) == doctest::Approx(-0.5 * psi_eval(0.0, kPair)).epsilon(1e-15));
    CHECK(phi_kernel(7.0, kPair) == phi_route_b(7.0, kPair));
    CHECK(phi0_kernel(0.5, kPair) == doctest::Approx(phi_kernel(0.5, kPair) + 0.5 * psi_eval(0.0, kPair) * 0.5).epsilon(1e-14));
    CHECK(phi0_kernel(3.0, kPair) == phi_kernel(3.0, kPair));
    CHECK_THROWS_AS(phi_route_a(0.0, kPair), DomainError);
}

TEST_CASE("Bessel J0 against the reference implementation") {
    double worst = 0.0;
    for (double x = 0.0; x <= 60.0; x += 0.173) worst = std::max(worst, std::abs(bessel_j0(x) - boost::math::cyl_bessel_j(0, x)));
    CHECK(worst < 1e-12);
    for (double x : {11.999999, 12.0, 12.000001})
        CHECK(std::abs(bessel_j0(x) - boost::math::cyl_bessel_j(0, x)) < 1e-12);
    CHECK(bessel_j0(-3.3) == bessel_j0(3.3));
}

TEST_CASE("singular input invariants") {
    auto d7 = Discriminant::make(-7);
    CHECK_NOTHROW(SingularInput{2, 3, 5, d7}.validate());
    CHECK_THROWS_AS((SingularInput{2, 4, 1, d7}.validate()), DomainError);   // not coprime
    CHECK_THROWS_AS((SingularInput{7, 1, 1, d7}.validate()), DomainError);   // |D| divides u
    CHECK_THROWS_AS((SingularInput{8, 1, 1, d7}.validate()), DomainError);   // w not cubefree
    CHECK_THROWS_AS((SingularInput{0, 1, 1, d7}.validate()), DomainError);
}

TEST_CASE("gamma closed forms against their defining series") {
    for (i64 D : {-3, -7, -11}) {
        auto disc = Discriminant::make(D);
        const Character chi(D);
        for (auto [u, v] : std::vector<std::pair<i64, i64>>{{1, 1}, {1, 2}, {2, 5}, {3, 4}}) {
            SingularInput in{u, v, 1, disc};
            try {
                in.validate();
            } catch (const DomainError&) {
                continue;
            }
            CHECK(gamma_star(1, in) == doctest::Approx(xi_fn(u * v, chi) / zeta_d2(disc.absD)).epsilon(1e-14));
            for (i64 d : {1, 2, 3, 5, 6, 10, 12}) {
                if (std::gcd(d, disc.absD) > 1) CHECK(gamma_star(d, in) == 0.0);
                const SeriesValue s = gamma_star_series(d, in, 20000);
                CHECK(std::abs(s.value - gamma_star(d, in)) <= s.tail);
            }
            for (i64 m : {1, 2, 3, 4, 5, 6}) {
                const i64 d = m * disc.absD;
                const SeriesValue s = gamma_prime_series(d, in, 20000);
                CHECK(std::abs(s.value - gamma_prime(d, in)) <= s.tail);
                // With d/|D| coprime to D, gamma'(d) is a rescaled gamma*(d/|D|).
                if (std::gcd(m, disc.absD) == 1) {
                    const double pred = -chi(u * v) * zeta_d2(disc.absD) / (kPi * kPi / 6.0) * gamma_star(m, in);
                    CHECK(gamma_prime(d, in) == doctest::Approx(pred).epsilon(1e-13));
                }
            }
        }
    }
}

TEST_CASE("singular series: three routes over the desk grid") {
    const auto rows = singular_series_grid({-3, -7, -11, -19}, 12, 24, 20000);
    REQUIRE(rows.size() > 1000);
    double worst_ratio = 0.0, worst_12 = 0.0;
    for (const auto& r : rows) {
        CHECK(r.worst_gap <= r.tail);
        worst_ratio = std::max(worst_ratio, r.worst_gap / r.tail);
        worst_12 = std::max(worst_12, std::abs(r.route1 - r.route2));
    }
    MESSAGE("worst gap / tail = " << worst_ratio);
    CHECK(worst_12 < 1e-9);
    const std::string csv = singular_rows_csv(rows);
    CHECK(csv.rfind("u,v,h,D,route1,route2,route3,tail,worst_gap\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == rows.size() + 1);
}

TEST_CASE("singular series: tail consistency, h = 1 and periodicity report") {
    auto d3 = Discriminant::make(-3);
    SingularInput in{1, 1, 1, d3};
    const SeriesValue a = singular_series_truncated(in, 4000), b = singular_series_truncated(in, 8000);
    CHECK(std::abs(a.value - b.value) <= a.tail);
    CHECK(b.tail < a.tail);
    CHECK(singular_series_closed(in) == doctest::Approx(gamma_star(1, in) - gamma_prime(1, in)).epsilon(1e-15));
    CHECK(std::abs(singular_series_tail(in, 4000) - a.tail) <= 1e-15);
    const auto rows = singular_series_periodicity(SingularInput{1, 2, 1, d3}, 12);
    CHECK(rows.size() == 12);
    int same = 0;
    for (const auto& r : rows) same += r.same_sign;
    MESSAGE("sign kept under h -> h + |D| for " << same << " of 12 shifts");
}

TEST_CASE("twisted Voronoi formula") {
    struct Case {
        i64 a, c, D;
        double X;
        double bound;
    };
    const std::vector<Case> cases{{1, 1, -3, 1e3, 1e-8},  {1, 2, -7, 1e3, -1},  {1, 3, -3, 1e3, -1},
                                  {2, 5, -15, 300, -1},   {3, 7, -7, 500, -1}, {1, 11, -11, 300, -1}};
    for (const auto& cs : cases) {
        const VoronoiResult r = voronoi_check(cs.a, cs.c, Discriminant::make(cs.D), cs.X);
        CAPTURE(cs.c);
        CAPTURE(cs.D);
        CHECK(r.residual <= r.tolerance);
        if (cs.bound > 0) CHECK(r.residual < cs.bound);
        CHECK(std::abs(r.dual) > 10 * r.tolerance);  // the dual side is not negligible
    }
    CHECK(voronoi_bump(1000.0, 1000.0) == 0.0);
    CHECK(voronoi_bump(1500.0, 1000.0) == doctest::Approx(1.0));
}

TEST_CASE("shifted sums: empty window, symmetry and aggregation") {
    auto d3 = Discriminant::make(-3);
    const CropProfile p = small_profile(1e6);
    CHECK(I_h_brute(1, 1, 100000, 10, d3, p, kPair) == 0.0);
    const double f12 = I_full_brute(1, 2, 10, d3, p, kPair), f21 = I_full_brute(2, 1, 10, d3, p, kPair);
    CHECK(f12 == doctest::Approx(f21).epsilon(1e-12));
    // Every pair with um != vn has um - vn = h or vn - um = h for some h below 2 N^alpha.
    double agg = 0.0;
    for (i64 h = 1; h <= 2500; ++h) agg += I_h_brute(1, 2, h, 10, d3, p, kPair) + I_h_brute(2, 1, h, 10, d3, p, kPair);
    CHECK(agg == doctest::Approx(f12).epsilon(1e-11));
    CHECK_THROWS_AS(I_full_brute(1, 1, 10, d3, small_profile(1e10), kPair), CapacityError);
}

TEST_CASE("shifted sum u = v = h = 1 against its main term") {
    auto d3 = Discriminant::make(-3);
    SingularInput in{1, 1, 1, d3};
    double prev = 1.0;
    for (double N : {1e8, 1e10, 1e12}) {
        const CropProfile p = small_profile(N);
        const double brute = I_h_brute(1, 1, 1, 100, d3, p, kPair), main = I_h_main_term(in, 100, p, kPair);
        const double rel = std::abs(brute - main) / std::abs(main);
        MESSAGE("N = " << N << ": brute " << brute << ", main " << main);
        CHECK(rel < 0.05);
        CHECK(rel < prev);
        prev = rel;
    }
}

TEST_CASE("Dirichlet series of gamma*") {
    auto d7 = Discriminant::make(-7);
    SingularInput in{2, 3, 1, d7};
    const cplx direct = zeta_gamma_star_direct(2.0, in, 1000000), closed = zeta_gamma_star(2.0, in);
    CHECK(std::abs(direct - closed) <= 1e-6 * std::abs(closed));
    // lambda(6) = 0 for D = -7, so s z*(s) vanishes linearly.
    CHECK(zeta_gamma_star_residue(in) == 0.0);
    CHECK(std::abs((1e-3 * zeta_gamma_star(1e-3, in)).real()) < 2e-3);
    // A pole: w = 2, chi_{-7}(2) = 1.
    SingularInput pole{1, 2, 1, d7};
    const double res = zeta_gamma_star_residue(pole);
    CHECK(res > 0.0);
    const double avg = 0.5 * (1e-3 * zeta_gamma_star(1e-3, pole) - 1e-3 * zeta_gamma_star(-1e-3, pole)).real();
    CHECK(avg == doctest::Approx(res).epsilon(1e-5));
    const Character chi(-7);
    CHECK(res == doctest::Approx(2.0 * xi_fn(2, chi) * 6.0 / (zeta_d2(7) * 7.0)).epsilon(1e-14));
}

TEST_CASE("harmonic sums coprime to D") {
    auto d3 = Discriminant::make(-3);
    CHECK(harmonic_coprime(1.0, d3) == 0.0);
    CHECK(harmonic_coprime(0.5, d3) == 0.0);
    CHECK(std::abs(harmonic_coprime(1e6, d3) - harmonic_coprime_main(1e6, d3)) < 1e-4);
    auto d7 = Discriminant::make(-7);
    CHECK(alpha_D(d7) == doctest::Approx(std::log(7.0) / 6.0).epsilon(1e-15));
    CHECK(alpha_D(d7) < std::log(7.0));
    for (i64 D : {-3, -15, -23, -35}) CHECK(alpha_D(Discriminant::make(D)) <= std::log(double(-D)));
}

TEST_CASE("k* at small y: slope, calibrated alpha0 and its prediction") {
    auto d3 = Discriminant::make(-3);
    SingularInput in{1, 7, 1, d3};  // chi_{-3}(7) = 1
    const double k1 = k_star(1e-3, in, kPair), k2 = k_star(2e-3, in, kPair);
    const double slope = (k2 - k1) / std::log(2.0);
    const double expect = 0.5 * zeta_gamma_star_residue(in) * psi_eval(0.0, kPair);
    CHECK(slope == doctest::Approx(expect).epsilon(1e-6));
    // Calibrate once, then freeze.
    const double alpha0 = calibrate_alpha0(1e-3, in, kPair);
    const double predicted = alpha0_predicted(kPair);
    MESSAGE("alpha0 calibrated " << alpha0 << ", predicted " << predicted);
    CHECK(alpha0 == doctest::Approx(predicted).epsilon(1e-6));
    SingularInput other{1, 2, 1, Discriminant::make(-7)};
    CHECK(k_star(1e-3, other, kPair) ==
          doctest::Approx(k_star_small_y(1e-3, other, kPair, alpha0)).epsilon(1e-7));
    CHECK_THROWS_AS(k_star(1e-3, SingularInput{1, 4, 1, d3}, kPair), DomainError);
}

TEST_CASE("K kernel, B coefficient, J* and the P(delta) even part") {
    auto d3 = Discriminant::make(-3);
    const CropProfile q = small_profile(1e10);
    const KCoefficients k = k_coefficients(100, d3, q, kPair);
    CHECK(k.B == doctest::Approx(psi_eval(0.0, kPair) * 2.0 / (2.0 * 3.0)).epsilon(1e-14));
    CHECK(k.X == 100.0 * 10 * 10);
    CHECK(K_kernel(2.0 / 3.0, k, q) == K_kernel(4.0 / 6.0, k, q));
    CHECK(K_kernel(2.0 / 3.0, k, q) == doctest::Approx(K_kernel(1.5, k, q)).epsilon(1e-12));

    const CropProfile p = small_profile(1e6);
    SingularInput in{1, 7, 1, d3};
    const double J = J_star(in, 100, p, kPair);
    // Oracle: the k* form of the same integral in log x.
    auto f = [&](double s) {
        const double x = std::exp(s);
        const double hh = crop_h(x, p) * crop_h(x / 7.0, p);
        return hh == 0.0 ? 0.0 : k_star(100.0 / x, in, kPair) * hh;
    };
    const double oracle = integrate_gl(f, std::log(100.0 / 300.0), std::log(std::pow(1e6, p.alpha)), 30, 20);
    CHECK(J == doctest::Approx(oracle).epsilon(1e-4));

    for (double delta : {0.01, -0.01, 0.003}) {
        const double num = P_delta_numeric(delta, 0.7, 0.4, 0.3, 0.2), neg = P_delta_numeric(-delta, 0.7, 0.4, 0.3, 0.2);
        CHECK(std::abs(0.5 * (num + neg) - P_delta_even(delta, 0.7, 0.4, 0.3, 0.2)) < 1e-9);
    }
}

#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "lacunary/arithmetic.hpp"

using namespace lacunary;

namespace {

// Euler's criterion for an odd prime p not dividing D.
int euler_criterion(i64 D, i64 p) {
    i64 base = ((D % p) + p) % p, e = (p - 1) / 2, r = 1;
    while (e) {
        if (e & 1) r = r * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return r == 1 ? 1 : (r == 0 ? 0 : -1);
}

double exp_sum_ramanujan(i64 h, i64 c) {
    double s = 0;
    for (i64 a = 1; a <= c; ++a)
        if (std::gcd(a, c) == 1) s += std::cos(2 * kPi * double((a * h) % c) / c);
    return s;
}

i64 lambda0_bruteforce(i64 D, i64 n) {
    i64 s = 0;
    for (i64 d = 1; d <= n; ++d)
        if (n % d == 0) s += kronecker(D, d);
    return s;
}

}  // namespace

TEST_CASE("kronecker symbol basics and Euler criterion") {
    CHECK(kronecker(-3, 1) == 1);
    CHECK(kronecker(-3, 2) == -1);
    CHECK(kronecker(-4, 2) == 0);
    CHECK_THROWS_AS(kronecker(0, 5), DomainError);
    for (i64 D : {-3, -4, -7, -8, 5, 8, 12, -15, -20, 13})
        for (i64 p : primes_up_to(200)) {
            if (p == 2 || std::abs(D) % p == 0) continue;
            CHECK(kronecker(D, p) == euler_criterion(D, p));
        }
}

TEST_CASE("characters are periodic and completely multiplicative") {
    for (i64 D = -100; D <= 100; ++D) {
        if (!is_fundamental_discriminant(D)) continue;
        Character chi(D);
        const i64 q = std::abs(D);
        CHECK(chi(-1) == (D < 0 ? -1 : 1));
        for (i64 n = 1; n <= 2000; ++n) {
            REQUIRE(kronecker(D, n) == kronecker(D, n + q));
            REQUIRE(chi(n) == kronecker(D, n));
            REQUIRE((kronecker(D, n) == 0) == (std::gcd(n, q) > 1));
        }
        for (i64 m = 1; m <= 60; ++m)
            for (i64 n = 1; n <= 60; ++n) REQUIRE(chi(m * n) == chi(m) * chi(n));
    }
}

TEST_CASE("Discriminant validation") {
    CHECK_NOTHROW(Discriminant::make(-3));
    CHECK_NOTHROW(Discriminant::make(-4));
    CHECK_NOTHROW(Discriminant::make(12));
    CHECK_THROWS_AS(Discriminant::make(-12), DomainError);
    CHECK_THROWS_AS(Discriminant::make(-16), DomainError);
    CHECK_THROWS_AS(Discriminant::make(1), DomainError);
    auto d = Discriminant::make(-163);
    CHECK(d.Q * d.Q * 4 * kPi * kPi == doctest::Approx(163.0).epsilon(1e-15));
}

TEST_CASE("ramanujan sums: divisor formula equals exponential sum") {
    CHECK(ramanujan_sum(6, 4) == -2);
    for (i64 c = 1; c <= 200; ++c) CHECK(ramanujan_sum(1, c) == mobius(c));
    for (i64 h = 1; h <= 50; ++h)
        for (i64 c = 1; c <= 200; ++c) {
            const double e = exp_sum_ramanujan(h, c);
            REQUIRE(std::abs(e - std::round(e)) < 1e-8);
            REQUIRE(ramanujan_sum(h, c) == static_cast<i64>(std::llround(e)));
        }
}

TEST_CASE("gauss-ramanujan sums") {
    auto d3 = Discriminant::make(-3);
    auto g = gauss_ramanujan(1, 3, d3);
    CHECK(g.real() == doctest::Approx(0).scale(1));
    CHECK(g.imag() == doctest::Approx(std::sqrt(3.0)));
    CHECK(std::abs(gauss_ramanujan(3, 3, d3)) < 1e-14);
    for (i64 D : {-3, -4, -7, -8, 5, 12})
        CHECK(std::abs(gauss_ramanujan(0, std::abs(D), Discriminant::make(D))) < 1e-12);
    CHECK_THROWS_AS(gauss_ramanujan(1, 4, d3), DomainError);
    // |tau(chi)|^2 = |D| for primitive characters
    for (i64 D : {-3, -4, -7, -8, -11, 5, 8, 12, 13})
        CHECK(std::norm(gauss_sum(Discriminant::make(D))) == doctest::Approx(std::abs(D)));
}

TEST_CASE("class numbers and reduced forms") {
    CHECK(class_number(-3) == 1);
    CHECK(class_number(-4) == 1);
    CHECK(class_number(-23) == 3);
    CHECK(class_number(-163) == 1);
    CHECK(class_number(-47) == 5);
    CHECK(class_number(-84) == 4);
    CHECK(class_number(-71) == 7);
    CHECK_THROWS_AS(class_number(5), DomainError);
    auto f = reduced_forms(-23);
    REQUIRE(f.size() == 3);
    CHECK(f[0] == Form{1, 1, 6});
    CHECK(f[1] == Form{2, -1, 3});
    CHECK(f[2] == Form{2, 1, 3});
}

TEST_CASE("class group axioms and characters") {
    for (i64 D : {-23, -47, -84, -71, -260, -420, -151}) {
        ClassGroup G(D);
        const int h = G.order();
        CHECK(h == class_number(D));
        for (int i = 0; i < h; ++i) {
            CHECK(G.multiply(0, i) == i);
            CHECK(G.multiply(i, G.inverse(i)) == 0);
            for (int j = 0; j < h; ++j) {
                CHECK(G.multiply(i, j) == G.multiply(j, i));
                for (int k = 0; k < h; ++k)
                    REQUIRE(G.multiply(G.multiply(i, j), k) == G.multiply(i, G.multiply(j, k)));
            }
        }
        // inverse of (a,b,c) is (a,-b,c) after reduction
        for (int i = 0; i < h; ++i) {
            Form f = G.forms()[i];
            CHECK(G.inverse(i) == G.index_of(reduce_form({f.a, -f.b, f.c})));
        }
        REQUIRE(G.character_count() == h);
        for (int k = 0; k < h; ++k)
            for (int l = 0; l < h; ++l) {
                cplx s = 0;
                for (int i = 0; i < h; ++i) s += G.character(k, i) * std::conj(G.character(l, i));
                CHECK(std::abs(s - cplx(k == l ? h : 0)) < 1e-9);
            }
    }
}

TEST_CASE("L(1,chi) by two routes") {
    CHECK(L1_chi(Discriminant::make(-3)) == doctest::Approx(kPi / (3 * std::sqrt(3.0))).epsilon(1e-12));
    CHECK(L1_chi(Discriminant::make(-4)) == doctest::Approx(kPi / 4).epsilon(1e-12));
    CHECK(L1_chi(Discriminant::make(-163)) == doctest::Approx(kPi / std::sqrt(163.0)).epsilon(1e-12));
    for (i64 D = -499; D < 0; ++D) {
        if (!is_fundamental_discriminant(D)) continue;
        auto d = Discriminant::make(D);
        CHECK(L1_chi_series(d) == doctest::Approx(L1_chi_class_number(d)).epsilon(1e-8));
    }
    // Q(sqrt 5): L(1,chi_5) = 2 log(golden ratio) / sqrt 5
    CHECK(L1_chi(Discriminant::make(5)) ==
          doctest::Approx(2 * std::log((1 + std::sqrt(5.0)) / 2) / std::sqrt(5.0)).epsilon(1e-10));
}

TEST_CASE("epsilon and scan ordering") {
    CHECK(epsilon_of_D(Discriminant::make(-3)) == doctest::Approx(0.604599788 * std::log(3.0)).epsilon(1e-8));
    CHECK(epsilon_of_D(Discriminant::make(-4)) == doctest::Approx(kPi / 4 * std::log(4.0)));
    auto s = scan_discriminants(-4, -3);
    REQUIRE(s.size() == 2);
    CHECK(s[0].first == -3);
    CHECK(s[1].first == -4);
    auto big = scan_discriminants(-200, -3);
    for (std::size_t i = 1; i < big.size(); ++i) CHECK(big[i - 1].second <= big[i].second);
}

TEST_CASE("lambda0 and rho tables") {
    for (i64 D : {-3, -4, -7, 5, -23}) {
        Character chi(D);
        auto lam = lambda0_table(chi, 10000);
        auto rho = rho_table(chi, 10000);
        for (i64 n = 1; n <= 1000; ++n) {
            REQUIRE(lam[n] == lambda0_bruteforce(D, n));
            REQUIRE(std::abs(lam[n]) <= tau(n));
        }
        for (i64 m = 1; m <= 100; ++m)
            for (i64 n = 1; n <= 100; ++n)
                if (std::gcd(m, n) == 1) REQUIRE(lam[m * n] == lam[m] * lam[n]);
        // Dirichlet inverse
        std::vector<i64> conv(10001, 0);
        for (i64 d = 1; d <= 10000; ++d)
            for (i64 e = 1; d * e <= 10000; ++e) conv[d * e] += rho[d] * lam[e];
        for (i64 n = 1; n <= 10000; ++n) REQUIRE(conv[n] == (n == 1 ? 1 : 0));
        for (i64 p : primes_up_to(20)) {
            CHECK(rho[p] == -lam[p]);
            CHECK(rho[p * p] == chi(p));
            CHECK(rho[p * p * p] == 0);
        }
        for (i64 m = 1; m <= 2000; ++m)
            if (is_squarefree(m)) REQUIRE(rho[m] == mobius(m) * lam[m]);
    }
    auto t = coeff_table(CoeffKind::lambda0, Discriminant::make(-4), 10);
    CHECK(t[5] == 2);
}

TEST_CASE("lambda_psi: trivial character matches lambda0, others multiplicative") {
    for (i64 D : {-23, -84, -47}) {
        ClassGroup G(D);
        auto lam = lambda0_table(Character(D), 500);
        auto triv = lambda_psi_table(G, 0, 500);
        for (i64 n = 1; n <= 500; ++n) REQUIRE(triv[n] == doctest::Approx(double(lam[n])));
        for (int k = 1; k < G.character_count(); ++k) {
            auto lp = lambda_psi_table(G, k, 500);
            for (i64 m = 1; m <= 22; ++m)
                for (i64 n = 1; n <= 22; ++n)
                    if (std::gcd(m, n) == 1)
                        REQUIRE(lp[m * n] == doctest::Approx(lp[m] * lp[n]).epsilon(1e-9).scale(1));
        }
    }
    CHECK_THROWS_AS(coeff_table(CoeffKind::lambda_psi, Discriminant::make(5), 10), DomainError);
}

TEST_CASE("lambda_tilde and von Mangoldt tables") {
    auto d = Discriminant::make(-3);
    auto lt = coeff_table(CoeffKind::lambda_tilde, d, 1000);
    Character chi(-3);
    for (i64 p : primes_up_to(1000)) {
        const int x = chi(p);
        if (x == -1) CHECK(lt[p] == 0.0);
        if (x == 1) CHECK(lt[p] == doctest::Approx(4.0 / ((1 + 1.0 / p) * (1 + 1.0 / p))));
        if (x == 0) CHECK(lt[p] == 1.0);
    }
    CHECK(lt[7 * 7 * 13] == doctest::Approx(lt[7] * lt[7] * lt[13]));

    const double logM = std::log(100.0);
    CoeffParams p1;
    p1.degree = 1;
    p1.log_scale = logM;
    auto v1 = coeff_table(CoeffKind::vonmangoldt_j, d, 2000, p1);
    auto lam = lambda0_table(chi, 2000);
    for (i64 p : primes_up_to(2000)) CHECK(v1[p] == doctest::Approx(lam[p] * std::log(double(p)) / logM));
    for (i64 n = 2; n <= 2000; ++n)
        if (omega(n) >= 2) REQUIRE(std::abs(v1[n]) < 1e-12);
    CoeffParams p0;
    auto v0 = coeff_table(CoeffKind::vonmangoldt_j, d, 200, p0);
    for (i64 n = 1; n <= 200; ++n) CHECK(v0[n] == doctest::Approx(n == 1 ? 1.0 : 0.0));
}

TEST_CASE("coefficient cache round trip") {
    auto dir = std::filesystem::temp_directory_path() / "lacunary_cache_test";
    std::filesystem::remove_all(dir);
    auto d = Discriminant::make(-7);
    CoeffParams p;
    p.degree = 2;
    p.log_scale = 3.0;
    auto a = cached_coeff_table(dir, CoeffKind::vonmangoldt_j, d, 300, p);
    auto path = coeff_cache_path(dir, CoeffKind::vonmangoldt_j, p, -7, 300);
    CHECK(std::filesystem::exists(path));
    CHECK(path.filename().string() == "vonmangoldt_j2--7-300.bin");
    auto b = cached_coeff_table(dir, CoeffKind::vonmangoldt_j, d, 300, p);
    auto direct = coeff_table(CoeffKind::vonmangoldt_j, d, 300, p);
    for (i64 n = 1; n <= 300; ++n) {
        CHECK(a[n] == b[n]);
        CHECK(a[n] == doctest::Approx(direct[n]).epsilon(1e-13).scale(1));
    }
    auto raw = load_coeff_table(path);
    REQUIRE(raw.has_value());
    CHECK(raw->bound == 300);
    std::filesystem::remove_all(dir);
}

TEST_CASE("lacunarity sum") {
    auto d = Discriminant::make(-3);
    CHECK(lacunarity_sum(d, 5, 5).sum == 0.0);
    double s = 0;
    for (i64 n = 2; n <= 10; ++n) s += double(lambda0_bruteforce(-3, n)) / n;
    CHECK(lacunarity_sum(d, 1, 10).sum == doctest::Approx(s).epsilon(1e-15));
    CHECK_THROWS_AS(lacunarity_sum(d, 0.5, 10), DomainError);
}

TEST_CASE("multiplicative helpers") {
    CHECK(tau_r(12, 3) == 18);
    auto t3 = tau_r_table(100, 3);
    for (i64 n = 1; n <= 100; ++n) {
        i64 brute = 0;
        for (i64 a = 1; a <= n; ++a)
            if (n % a == 0) brute += tau(n / a);
        CHECK(t3[n] == brute);
    }
    auto mu = mobius_table(1000);
    for (i64 n = 1; n <= 1000; ++n) CHECK(mu[n] == mobius(n));
    CHECK(sigma(12) == 28);
    CHECK(euler_phi(36) == 12);
}

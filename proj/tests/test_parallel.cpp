#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "lacunary/identities.hpp"
#include "lacunary/offdiagonal.hpp"
#include "lacunary/parallel.hpp"

using namespace lacunary;

TEST_CASE("parallel_map keeps index order") {
    for (int jobs : {0, 1, 2, 5, 64}) {
        const auto out = parallel_map(100, jobs, [](std::size_t i) { return static_cast<int>(i * i); });
        REQUIRE(out.size() == 100);
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
    }
    CHECK(parallel_map(0, 4, [](std::size_t) { return 1; }).empty());
    CHECK(default_jobs() >= 1);
}

TEST_CASE("parallel_map reports the lowest failing index") {
    for (int jobs : {1, 3, 8}) {
        try {
            parallel_map(50, jobs, [](std::size_t i) {
                if (i % 7 == 3) throw std::runtime_error("index " + std::to_string(i));
                return i;
            });
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "index 3");
        }
    }
}

TEST_CASE("library results do not depend on the worker count") {
    const auto grid1 = identity_grid({-3, -7}, 30, 1);
    const auto grid4 = identity_grid({-3, -7}, 30, 4);
    CHECK(grid1.checks == grid4.checks);
    CHECK(grid1.worst == grid4.worst);

    auto d = Discriminant::make(-3);
    CropProfile p;
    p.M = 30;
    p.r = 3;
    WConfig c{d, 2000.0, p, {1.0, 1.4, 1.8}, 1};
    const double w1 = W_sum(c);
    c.jobs = 4;
    CHECK(W_sum(c) == w1);

    const auto rows1 = singular_series_grid({-3, -7}, 6, 8, 2000, 1);
    const auto rows3 = singular_series_grid({-3, -7}, 6, 8, 2000, 3);
    CHECK(singular_rows_csv(rows1) == singular_rows_csv(rows3));
}

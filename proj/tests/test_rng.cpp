#include "puforge/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace puforge;

TEST_SUITE("rng") {

TEST_CASE("splitmix64 matches the reference sequence") {
    // first outputs of the Steele/Lea/Vigna reference with state 0
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xe220a8397b1dcdafull);
    CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ull);
    CHECK(splitmix64(state) == 0x06c45d188009454full);
}

TEST_CASE("streams are deterministic per seed and differ across seeds") {
    Rng a(123), b(123), c(124);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_diff = any_diff || va != c.next_u64();
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("next_double stays in [0, 1) with sane moments") {
    Rng rng(7);
    double sum = 0.0, sum2 = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.next_double();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("next_below covers the full range without bias") {
    Rng rng(99);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto v = rng.next_below(7);
        REQUIRE(v < 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);
}

TEST_CASE("next_normal has standard moments") {
    Rng rng(5);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = rng.next_normal();
        sum += v;
        sum2 += v * v;
    }
    CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02));
    CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("derive_seed separates stages and indices") {
    const std::uint64_t base = 42;
    CHECK(derive_seed(base, SeedStage::Member, 0) != derive_seed(base, SeedStage::Member, 1));
    CHECK(derive_seed(base, SeedStage::Member, 0) != derive_seed(base, SeedStage::Folds, 0));
    CHECK(derive_seed(base, SeedStage::Member, 3) == derive_seed(base, SeedStage::Member, 3));
}

} // TEST_SUITE

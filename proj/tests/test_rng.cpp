#include "openmax/rng.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

using namespace openmax;

TEST_CASE("generator is the standard 64-bit Mersenne Twister")
{
    // The tenth thousandth output of the default-seeded engine is fixed by
    // the C++ standard.
    Rng rng(5489);
    std::uint64_t v = 0;
    for (int k = 0; k < 10000; ++k)
    {
        v = rng.next();
    }
    CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("equal seeds replay, different seeds diverge")
{
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int k = 0; k < 100; ++k)
    {
        const auto va = a.next();
        CHECK(va == b.next());
        differs = differs || va != c.next();
    }
    CHECK(differs);
}

TEST_CASE("below stays in range and covers it")
{
    Rng rng(1);
    CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
    CHECK(rng.below(1) == 0);
    std::vector<int> seen(7, 0);
    for (int k = 0; k < 7000; ++k)
    {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        ++seen[v];
    }
    for (int c : seen)
    {
        CHECK(c > 850);
        CHECK(c < 1150);
    }
}

TEST_CASE("between is inclusive and handles negative bounds")
{
    Rng rng(2);
    bool lo = false, hi = false;
    for (int k = 0; k < 2000; ++k)
    {
        const auto v = rng.between(-3, 3);
        REQUIRE(v >= -3);
        REQUIRE(v <= 3);
        lo = lo || v == -3;
        hi = hi || v == 3;
    }
    CHECK(lo);
    CHECK(hi);
    CHECK(rng.between(5, 5) == 5);
    CHECK_THROWS_AS(rng.between(2, 1), std::invalid_argument);
}

TEST_CASE("unit lies in [0, 1) with the expected mean")
{
    Rng rng(3);
    double sum = 0.0;
    for (int k = 0; k < 100000; ++k)
    {
        const double u = rng.unit();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000.0 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("draws are pinned for replay")
{
    // Golden values: changing the distributions breaks recorded traces.
    Rng rng(7);
    std::vector<std::uint64_t> got;
    for (int k = 0; k < 5; ++k)
    {
        got.push_back(rng.below(25));
    }
    std::mt19937_64 eng(7);
    std::vector<std::uint64_t> want;
    while (want.size() < 5)
    {
        const auto c = eng() & 31;
        if (c < 25)
        {
            want.push_back(c);
        }
    }
    CHECK(got == want);
}

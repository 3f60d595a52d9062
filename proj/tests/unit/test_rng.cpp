#include <catch_amalgamated.hpp>

#include <cmath>

#include "tfluct/rng.hpp"

using namespace tfluct;

// Known-answer vectors from the Random123 distribution (philox4x32, 10 rounds).
TEST_CASE("Philox4x32-10 known answers", "[rng]")
{
    const Philox4x32 zero(0);
    CHECK(zero({0, 0, 0, 0}) == Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const Philox4x32 ones(0xffffffffffffffffull);
    CHECK(ones({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
          Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    // key words {0xa4093822, 0x299f31d0} as (lo, hi)
    const Philox4x32 pi_key(0x299f31d0a4093822ull);
    CHECK(pi_key({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
          Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("unit conversion stays in (0, 1]", "[rng]")
{
    CHECK(to_unit_open_closed(0, 0) > 0.0);
    CHECK(to_unit_open_closed(0xffffffffu, 0xffffffffu) == 1.0);
}

TEST_CASE("streams are reproducible and distinct", "[rng]")
{
    PhiloxStream a(7, 1), b(7, 1), c(7, 2);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        differs = differs || x != c.uniform();
    }
    CHECK(differs);
}

TEST_CASE("uniform moments", "[rng]")
{
    PhiloxStream s(11, 0);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform(-1.0, 1.0);
        REQUIRE(u >= -1.0);
        REQUIRE(u <= 1.0);
        sum += u;
        sq += u * u;
    }
    CHECK(std::abs(sum / n) < 4.0 * std::sqrt(1.0 / 3.0 / n));
    CHECK(std::abs(sq / n - 1.0 / 3.0) < 4.0 * std::sqrt(4.0 / 45.0 / n));
}

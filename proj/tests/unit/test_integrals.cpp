#include <catch_amalgamated.hpp>

#include <cmath>

#include "tfluct/integrals.hpp"

using namespace tfluct;

namespace {

constexpr std::uint64_t kBudget = 200000;

bool within(const McEstimate& e, double expected, double sigmas = 3.0)
{
    return std::abs(e.estimate - expected) <= sigmas * e.stderr_ + 1e-12;
}

// Analytic oracle for the two 2-cross pairings of [4] at p = q = 2, t1 = t2 = 1:
// the x1 integral of (1 - b|x1|)^2 over [-1, 1].
double two_cross_oracle(double b) { return 2.0 * (1.0 - b + b * b / 3.0); }

} // namespace

TEST_CASE("type I closed form", "[integrals]")
{
    CHECK(f_type1_closed(3, 3, 3, 0.5, 1.0) == Catch::Approx(4.0 * 0.25));
    CHECK(f_type1_closed(2, 2, 2, 0.7, 1.0) == Catch::Approx(2.0 * 0.7));
    CHECK(f_type1_closed(4, 2, 2, 1.0, 1.0) == Catch::Approx(4.0));
    CHECK_THROWS_AS(f_type1_closed(3, 3, 3, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(f_type1_closed(3, 3, 2, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("type II closed form", "[integrals]")
{
    CHECK(f_type2_closed(2, 2, 0.3, 1.0) == Catch::Approx(0.6));
    CHECK(f_type2_closed(2, 2, 1.0, 1.0) == Catch::Approx(2.0));
    CHECK(f_type2_closed(4, 2, 1.0, 2.0) == Catch::Approx(4.0));
    CHECK_THROWS_AS(f_type2_closed(3, 3, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("centred slice volumes", "[integrals]")
{
    // 2^{k-1} times the central Irwin-Hall density.
    CHECK(centered_slice_volume(1) == Catch::Approx(1.0));
    CHECK(centered_slice_volume(2) == Catch::Approx(2.0));
    CHECK(centered_slice_volume(3) == Catch::Approx(3.0));
    CHECK(centered_slice_volume(4) == Catch::Approx(16.0 / 3.0));
    CHECK(centered_slice_volume(5) == Catch::Approx(115.0 / 12.0));
    CHECK(f_type1_exact_b0(2, 2, 2, 1.0, 1.0) == Catch::Approx(f_type1_closed(2, 2, 2, 1.0, 1.0)));
    CHECK(f_type1_exact_b0(3, 3, 3, 1.0, 1.0) == Catch::Approx(3.0));
}

TEST_CASE("type I numeric at b = 0", "[integrals]")
{
    const PairPartition two({{1, 3}, {2, 4}});
    const auto e = f_type1_numeric({two, 2, 2, 1.0, 1.0, 0.0, Sign::Minus}, kBudget, 5);
    CHECK(within(e, 2.0));
    CHECK(e.samples == kBudget);

    // Three crosses: the sampled integral is the exact slice volume 3, not the closed form 4.
    const PairPartition three({{1, 4}, {2, 5}, {3, 6}});
    const auto e3 = f_type1_numeric({three, 3, 3, 1.0, 1.0, 0.0, Sign::Minus}, kBudget, 6);
    CHECK(within(e3, f_type1_exact_b0(3, 3, 3, 1.0, 1.0)));
    CHECK(f_type1_closed(3, 3, 3, 1.0, 1.0) == Catch::Approx(4.0));
}

TEST_CASE("type I numeric against the analytic b > 0 oracle", "[integrals]")
{
    for (const PairPartition& pi : {PairPartition({{1, 3}, {2, 4}}), PairPartition({{1, 4}, {2, 3}})}) {
        for (double b : {0.25, 0.5}) {
            for (Sign s : {Sign::Plus, Sign::Minus}) {
                const auto e = f_type1_numeric({pi, 2, 2, 1.0, 1.0, b, s}, kBudget, 9);
                INFO(pi.to_string() << " b=" << b);
                CHECK(within(e, two_cross_oracle(b), 4.0));
            }
        }
    }
}

TEST_CASE("signs agree at b = 0 and estimates shrink with b", "[integrals]")
{
    const PairPartition pi({{1, 4}, {2, 6}, {3, 5}});
    const auto minus = f_type1_numeric({pi, 3, 3, 0.5, 1.0, 0.0, Sign::Minus}, kBudget, 1);
    const auto plus = f_type1_numeric({pi, 3, 3, 0.5, 1.0, 0.0, Sign::Plus}, kBudget, 2);
    CHECK(std::abs(minus.estimate - plus.estimate) <= 3.0 * std::hypot(minus.stderr_, plus.stderr_));

    double previous = INFINITY;
    double previous_se = 0.0;
    for (double b : {0.0, 0.25, 0.5}) {
        const auto e = f_type1_numeric({pi, 3, 3, 1.0, 1.0, b, Sign::Minus}, kBudget, 3);
        CHECK(e.estimate >= 0.0);
        CHECK(std::isfinite(e.estimate));
        CHECK(e.estimate <= previous + 3.0 * std::hypot(e.stderr_, previous_se));
        previous = e.estimate;
        previous_se = e.stderr_;
    }
}

TEST_CASE("type II numeric", "[integrals]")
{
    const MixedPartition24 pi(2, 2, {1, 2, 3, 4}, {});
    CHECK(within(f_type2_numeric({pi, 2, 2, 1.0, 1.0, 0.0, Sign::Minus}, kBudget, 4), 2.0));
    const MixedPartition24 wide(4, 2, {1, 4, 5, 6}, {{2, 3}});
    CHECK(within(f_type2_numeric({wide, 4, 2, 1.0, 2.0, 0.0, Sign::Plus}, kBudget, 4), 4.0));
}

TEST_CASE("numeric integral preconditions", "[integrals]")
{
    const PairPartition none({{1, 2}, {3, 4}});
    CHECK_THROWS_AS(f_type1_numeric({none, 2, 2, 1.0, 1.0, 0.0, Sign::Minus}, kBudget, 1), std::invalid_argument);
    const PairPartition two({{1, 3}, {2, 4}});
    CHECK_THROWS_AS(f_type1_numeric({two, 2, 2, 1.0, 1.0, 0.0, Sign::Minus}, 9999, 1), std::invalid_argument);
    CHECK_THROWS_AS(f_type1_numeric({two, 2, 2, 1.0, 2.5, 0.5, Sign::Minus}, kBudget, 1), std::invalid_argument);
    CHECK_THROWS_AS(f_type1_numeric({two, 2, 2, 1.0, 0.5, 0.0, Sign::Minus}, kBudget, 1), std::invalid_argument);
}

TEST_CASE("numeric integrals are reproducible", "[integrals]")
{
    const PairPartition two({{1, 3}, {2, 4}});
    const IntegralQuery q{two, 2, 2, 1.0, 1.0, 0.3, Sign::Plus};
    const auto a = f_type1_numeric(q, 20000, 77);
    const auto b = f_type1_numeric(q, 20000, 77);
    CHECK(a.estimate == b.estimate);
    CHECK(a.stderr_ == b.stderr_);
}

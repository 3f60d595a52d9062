#pragma once

#include <cstdint>
#include <variant>

#include "tfluct/combinatorics.hpp"

namespace tfluct {

/// Which indicator product the second trace uses: plus tests
/// y0 - b*partial sums, minus tests y0 + b*partial sums.
enum class Sign { Plus, Minus };

struct IntegralQuery {
    std::variant<PairPartition, MixedPartition24> pi;
    int p = 0;
    int q = 0;
    double t1 = 1.0;
    double t2 = 1.0;
    double b = 0.0;
    Sign sign = Sign::Minus;
};

struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t samples = 0;
};

inline constexpr std::uint64_t kMinIntegralBudget = 10000;

/// Type-I integral at b = 0 for a pairing with k crosses:
/// 2^{(p+q)/2-1} t1^{(p+k)/2-1} t2^{(q-k)/2}.
double f_type1_closed(int p, int q, int k, double t1, double t2);

/// Type-II integral at b = 0: 2^{(p+q)/2-1} t1^{p/2} t2^{q/2-1}.
double f_type2_closed(int p, int q, double t1, double t2);

/// (k-1)-dimensional volume of {x in [-1,1]^k : x_1 + ... + x_k = 0},
/// i.e. 2^{k-1} times the Irwin-Hall density of order k at k/2.
/// Equals 2^{k-1} only for k <= 2 (k=3: 3, k=4: 16/3).
double centered_slice_volume(int k);

/// Type-I integral at b = 0 with the cross-variable slice measured exactly:
/// (2 t2)^{(q-k)/2} (2 t1)^{(p-k)/2} t1^{k-1} centered_slice_volume(k).
/// Agrees with f_type1_closed for k <= 2 and is smaller for k >= 3.
double f_type1_exact_b0(int p, int q, int k, double t1, double t2);

/// Monte Carlo estimate of the type-I integral for a pairing with at least
/// one cross. The last cross variable is solved from the delta constraint;
/// samples where it leaves [-t1, t1] contribute zero.
McEstimate f_type1_numeric(const IntegralQuery& query, std::uint64_t budget, std::uint64_t seed);

/// Monte Carlo estimate of the type-II integral for an element of P24.
McEstimate f_type2_numeric(const IntegralQuery& query, std::uint64_t budget, std::uint64_t seed);

} // namespace tfluct

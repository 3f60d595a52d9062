#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tfluct/work_cap.hpp"

namespace tfluct {

using Pair = std::array<int, 2>;
using Quad = std::array<int, 4>;

/// A pairing of {1, ..., 2k}. Blocks are stored sorted internally and ordered
/// by their least element, so two equal pairings compare equal.
class PairPartition {
public:
    PairPartition() = default;

    /// Validates and canonicalises; throws std::invalid_argument unless the
    /// blocks are disjoint 2-sets covering {1, ..., 2k}.
    explicit PairPartition(std::vector<Pair> blocks);

    int k() const { return static_cast<int>(blocks_.size()); }
    int size() const { return 2 * k(); }
    const std::vector<Pair>& blocks() const { return blocks_; }

    /// Element paired with i (1-based).
    int partner(int i) const;
    /// 0-based index of the block containing i.
    int block_of(int i) const;

    std::string to_string() const;

    friend bool operator==(const PairPartition&, const PairPartition&) = default;
    friend auto operator<=>(const PairPartition&, const PairPartition&) = default;

private:
    std::vector<Pair> blocks_;
};

/// A partition of {1, ..., p+q} into one 4-element block straddling the split
/// (two elements <= p, two > p) and 2-element blocks on one side each.
class MixedPartition24 {
public:
    MixedPartition24() = default;
    MixedPartition24(int p, int q, Quad quad, std::vector<Pair> pairs);

    int p() const { return p_; }
    int q() const { return q_; }
    const Quad& quad_block() const { return quad_; }
    const std::vector<Pair>& pair_blocks() const { return pairs_; }

    std::string to_string() const;

    friend bool operator==(const MixedPartition24&, const MixedPartition24&) = default;

private:
    int p_ = 0;
    int q_ = 0;
    Quad quad_{};
    std::vector<Pair> pairs_;
};

struct PartitionClassQuery {
    int p = 2;
    int q = 2;
    int min_crosses = 1;
};

/// m!! with (-1)!! = 0!! = 1. Throws for m < -1 or when the result overflows.
std::uint64_t double_factorial(int m);

std::uint64_t binomial(int n, int k);

/// All (2k-1)!! pairings of [2k] in lexicographic order of their block lists.
std::vector<PairPartition> enumerate_pair_partitions(int k, const WorkCap& cap = default_work_cap());

/// Blocks with one element <= p and the other > p.
int count_crosses(const PairPartition& pi, int p);

/// Pairings of [p+q] with at least query.min_crosses crosses; empty when p+q is odd.
std::vector<PairPartition> enumerate_class(const PartitionClassQuery& query,
                                           const WorkCap& cap = default_work_cap());

/// Elements of P_{2,4}(p,q); empty unless p and q are both even.
std::vector<MixedPartition24> enumerate_p24(int p, int q, const WorkCap& cap = default_work_cap());

// Closed-form counts. All exact; r1 is total (0 on infeasible parity).
std::uint64_t r1(int p, int q, int k);
std::uint64_t r2(int p, int q);
std::int64_t r3(int p, int r);
std::int64_t r4(int p, int r);
std::int64_t card_p2tilde_even(int p, int r);

/// Sum over pairings of the selected variables of products of covariances.
/// `indices` picks rows/columns of `cov` (repetition allowed); empty means
/// all of them in order. Zero for an odd number of variables.
double wick_sum(const Eigen::MatrixXd& cov, std::span<const int> indices = {});

} // namespace tfluct

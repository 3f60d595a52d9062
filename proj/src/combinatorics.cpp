#include "tfluct/combinatorics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tfluct {

namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    if (a != 0 && b > kMax / a) {
        throw std::overflow_error("exact count overflows 64 bits");
    }
    return a * b;
}

Pair sorted_pair(Pair b)
{
    if (b[0] > b[1]) {
        std::swap(b[0], b[1]);
    }
    return b;
}

std::string blocks_to_string(const std::vector<Pair>& blocks)
{
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        os << (i ? "," : "") << '{' << blocks[i][0] << ',' << blocks[i][1] << '}';
    }
    os << '}';
    return os.str();
}

// Pairs up `elems` (sorted) recursively: the least unpaired element takes
// each later unpaired element in turn.
template <typename Visit>
void for_each_pairing(std::vector<int>& elems, std::vector<Pair>& acc, Visit&& visit)
{
    if (elems.empty()) {
        visit(acc);
        return;
    }
    const int first = elems.front();
    for (std::size_t j = 1; j < elems.size(); ++j) {
        const int second = elems[j];
        std::vector<int> rest;
        rest.reserve(elems.size() - 2);
        for (std::size_t i = 1; i < elems.size(); ++i) {
            if (i != j) {
                rest.push_back(elems[i]);
            }
        }
        acc.push_back({first, second});
        for_each_pairing(rest, acc, visit);
        acc.pop_back();
    }
}

std::vector<std::vector<Pair>> all_pairings(std::vector<int> elems)
{
    std::vector<std::vector<Pair>> out;
    std::vector<Pair> acc;
    for_each_pairing(elems, acc, [&](const std::vector<Pair>& blocks) { out.push_back(blocks); });
    return out;
}

std::vector<int> iota_range(int lo, int hi)
{
    std::vector<int> v;
    for (int i = lo; i <= hi; ++i) {
        v.push_back(i);
    }
    return v;
}

} // namespace

PairPartition::PairPartition(std::vector<Pair> blocks)
{
    const int n = 2 * static_cast<int>(blocks.size());
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    for (auto& b : blocks) {
        b = sorted_pair(b);
        for (int e : b) {
            if (e < 1 || e > n || seen[static_cast<std::size_t>(e)]) {
                throw std::invalid_argument("pair partition blocks must be disjoint pairs covering {1..2k}");
            }
            seen[static_cast<std::size_t>(e)] = 1;
        }
    }
    std::sort(blocks.begin(), blocks.end());
    blocks_ = std::move(blocks);
}

int PairPartition::partner(int i) const
{
    for (const auto& b : blocks_) {
        if (b[0] == i) {
            return b[1];
        }
        if (b[1] == i) {
            return b[0];
        }
    }
    throw std::out_of_range("element not in pair partition");
}

int PairPartition::block_of(int i) const
{
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        if (blocks_[j][0] == i || blocks_[j][1] == i) {
            return static_cast<int>(j);
        }
    }
    throw std::out_of_range("element not in pair partition");
}

std::string PairPartition::to_string() const { return blocks_to_string(blocks_); }

MixedPartition24::MixedPartition24(int p, int q, Quad quad, std::vector<Pair> pairs) : p_(p), q_(q)
{
    std::sort(quad.begin(), quad.end());
    if (!(quad[1] <= p && quad[2] > p)) {
        throw std::invalid_argument("4-block must take two elements from each side");
    }
    std::vector<char> seen(static_cast<std::size_t>(p + q) + 1, 0);
    auto mark = [&](int e) {
        if (e < 1 || e > p + q || seen[static_cast<std::size_t>(e)]) {
            throw std::invalid_argument("blocks of a P24 partition must be disjoint and cover {1..p+q}");
        }
        seen[static_cast<std::size_t>(e)] = 1;
    };
    for (int e : quad) {
        mark(e);
    }
    for (auto& b : pairs) {
        b = sorted_pair(b);
        mark(b[0]);
        mark(b[1]);
        if ((b[0] <= p) != (b[1] <= p)) {
            throw std::invalid_argument("pair blocks of a P24 partition must not straddle the split");
        }
    }
    if (2 * pairs.size() + 4 != static_cast<std::size_t>(p + q)) {
        throw std::invalid_argument("P24 partition does not cover {1..p+q}");
    }
    std::sort(pairs.begin(), pairs.end());
    quad_ = quad;
    pairs_ = std::move(pairs);
}

std::string MixedPartition24::to_string() const
{
    std::ostringstream os;
    os << "{{" << quad_[0] << ',' << quad_[1] << ',' << quad_[2] << ',' << quad_[3] << '}';
    for (const auto& b : pairs_) {
        os << ",{" << b[0] << ',' << b[1] << '}';
    }
    os << '}';
    return os.str();
}

std::uint64_t double_factorial(int m)
{
    if (m < -1) {
        throw std::invalid_argument("double factorial needs m >= -1");
    }
    std::uint64_t r = 1;
    for (int i = m; i > 1; i -= 2) {
        r = checked_mul(r, static_cast<std::uint64_t>(i));
    }
    return r;
}

std::uint64_t binomial(int n, int k)
{
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = checked_mul(r, static_cast<std::uint64_t>(n - k + i)) / static_cast<std::uint64_t>(i);
    }
    return r;
}

std::vector<PairPartition> enumerate_pair_partitions(int k, const WorkCap& cap)
{
    if (k < 1) {
        throw std::invalid_argument("enumerate_pair_partitions needs k >= 1");
    }
    require_within_cap(double_factorial(2 * k - 1), cap.partitions, "pairings of [" + std::to_string(2 * k) + "]");
    std::vector<PairPartition> out;
    out.reserve(double_factorial(2 * k - 1));
    for (auto& blocks : all_pairings(iota_range(1, 2 * k))) {
        out.emplace_back(std::move(blocks));
    }
    return out;
}

int count_crosses(const PairPartition& pi, int p)
{
    if (p < 1 || p > pi.size() - 1) {
        throw std::invalid_argument("split point p must lie in 1..2k-1");
    }
    return static_cast<int>(std::count_if(pi.blocks().begin(), pi.blocks().end(),
                                          [p](const Pair& b) { return b[0] <= p && b[1] > p; }));
}

std::vector<PairPartition> enumerate_class(const PartitionClassQuery& query, const WorkCap& cap)
{
    if (query.p < 1 || query.q < 1 || query.min_crosses < 0) {
        throw std::invalid_argument("partition class needs p, q >= 1 and min_crosses >= 0");
    }
    if ((query.p + query.q) % 2 != 0) {
        return {};
    }
    std::vector<PairPartition> out;
    for (auto& pi : enumerate_pair_partitions((query.p + query.q) / 2, cap)) {
        if (count_crosses(pi, query.p) >= query.min_crosses) {
            out.push_back(std::move(pi));
        }
    }
    return out;
}

std::vector<MixedPartition24> enumerate_p24(int p, int q, const WorkCap& cap)
{
    if (p < 2 || q < 2 || p % 2 != 0 || q % 2 != 0) {
        return {};
    }
    require_within_cap(r2(p, q), cap.partitions, "P24(" + std::to_string(p) + "," + std::to_string(q) + ")");
    std::vector<MixedPartition24> out;
    for (int a = 1; a <= p; ++a) {
        for (int b = a + 1; b <= p; ++b) {
            for (int c = p + 1; c <= p + q; ++c) {
                for (int d = c + 1; d <= p + q; ++d) {
                    std::vector<int> left;
                    std::vector<int> right;
                    for (int e = 1; e <= p; ++e) {
                        if (e != a && e != b) {
                            left.push_back(e);
                        }
                    }
                    for (int e = p + 1; e <= p + q; ++e) {
                        if (e != c && e != d) {
                            right.push_back(e);
                        }
                    }
                    const auto lp = all_pairings(left);
                    const auto rp = all_pairings(right);
                    for (const auto& l : lp) {
                        for (const auto& r : rp) {
                            std::vector<Pair> pairs = l;
                            pairs.insert(pairs.end(), r.begin(), r.end());
                            out.emplace_back(p, q, Quad{a, b, c, d}, std::move(pairs));
                        }
                    }
                }
            }
        }
    }
    return out;
}

std::uint64_t r1(int p, int q, int k)
{
    if (k < 0 || k > std::min(p, q) || (p - k) % 2 != 0 || (q - k) % 2 != 0) {
        return 0;
    }
    std::uint64_t r = checked_mul(binomial(p, k), binomial(q, k));
    for (int i = 2; i <= k; ++i) {
        r = checked_mul(r, static_cast<std::uint64_t>(i));
    }
    r = checked_mul(r, double_factorial(p - k - 1));
    return checked_mul(r, double_factorial(q - k - 1));
}

std::uint64_t r2(int p, int q)
{
    if (p < 2 || q < 2 || p % 2 != 0 || q % 2 != 0) {
        throw std::invalid_argument("r2 needs even p, q >= 2");
    }
    // pq/4 is an integer for even p, q.
    const auto quarter = static_cast<std::uint64_t>((p / 2) * (q / 2));
    return checked_mul(checked_mul(quarter, double_factorial(p - 1)), double_factorial(q - 1));
}

std::int64_t r3(int p, int r)
{
    if (p < 2 || r < 2 || p % 2 != 0 || r % 2 != 0) {
        throw std::invalid_argument("r3 needs even p, r >= 2");
    }
    return static_cast<std::int64_t>(double_factorial(p + r - 1)) -
           static_cast<std::int64_t>(double_factorial(p - 1) * double_factorial(r - 1));
}

std::int64_t r4(int p, int r)
{
    if (p < 3 || r < 3 || p % 2 == 0 || r % 2 == 0) {
        throw std::invalid_argument("r4 needs odd p, r >= 3");
    }
    return static_cast<std::int64_t>(double_factorial(p + r - 1)) -
           static_cast<std::int64_t>(static_cast<std::uint64_t>(p * r) * double_factorial(p - 2) *
                                     double_factorial(r - 2));
}

std::int64_t card_p2tilde_even(int p, int r)
{
    if (p < 2 || r < 2 || p % 2 != 0 || r % 2 != 0) {
        throw std::invalid_argument("card_p2tilde_even needs even p, r >= 2");
    }
    const auto base = static_cast<std::int64_t>(double_factorial(p - 1) * double_factorial(r - 1));
    return static_cast<std::int64_t>(double_factorial(p + r - 1)) - (1 + p * r / 2) * base;
}

namespace {

double wick_recurse(const Eigen::MatrixXd& cov, std::vector<int>& vars)
{
    if (vars.empty()) {
        return 1.0;
    }
    const int first = vars.front();
    double total = 0.0;
    for (std::size_t j = 1; j < vars.size(); ++j) {
        const double c = cov(first, vars[j]);
        if (c == 0.0) {
            continue;
        }
        std::vector<int> rest;
        rest.reserve(vars.size() - 2);
        for (std::size_t i = 1; i < vars.size(); ++i) {
            if (i != j) {
                rest.push_back(vars[i]);
            }
        }
        total += c * wick_recurse(cov, rest);
    }
    return total;
}

} // namespace

double wick_sum(const Eigen::MatrixXd& cov, std::span<const int> indices)
{
    if (cov.rows() != cov.cols()) {
        throw std::invalid_argument("wick_sum needs a square covariance matrix");
    }
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            if (cov(i, j) != cov(j, i)) {
                throw std::invalid_argument("wick_sum needs a symmetric covariance matrix");
            }
        }
    }
    std::vector<int> vars;
    if (indices.empty()) {
        for (int i = 0; i < cov.rows(); ++i) {
            vars.push_back(i);
        }
    } else {
        for (int i : indices) {
            if (i < 0 || i >= cov.rows()) {
                throw std::out_of_range("wick_sum index outside covariance matrix");
            }
            vars.push_back(i);
        }
    }
    if (vars.size() % 2 != 0) {
        return 0.0;
    }
    return wick_recurse(cov, vars);
}

} // namespace tfluct

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tfluct/work_cap.hpp"

namespace tfluct {

/// Non-zero integer components summing to zero.
class BalancedVector {
public:
    BalancedVector() = default;
    /// Throws std::invalid_argument for a zero component or a non-zero sum.
    explicit BalancedVector(std::vector<int> components);

    std::size_t size() const { return c_.size(); }
    int operator[](std::size_t i) const { return c_[i]; }
    const std::vector<int>& components() const { return c_; }
    /// Largest absolute component (0 when empty).
    int max_abs() const;

    BalancedVector negated() const;
    std::string to_string() const;

    friend bool operator==(const BalancedVector&, const BalancedVector&) = default;
    friend auto operator<=>(const BalancedVector&, const BalancedVector&) = default;

private:
    std::vector<int> c_;
};

/// Absolute values with multiplicity, ascending.
std::vector<int> support_multiset(const BalancedVector& v);

bool correlated(const BalancedVector& a, const BalancedVector& b);

/// Connected components of the correlation graph. Each cluster lists
/// 0-based vector indices ascending; clusters are ordered by least index.
using ClusterDecomposition = std::vector<std::vector<std::size_t>>;
ClusterDecomposition cluster_decompose(std::span<const BalancedVector> vs);

struct Reduction {
    BalancedVector merged;
    bool negated = false;
};

/// Splices jp into j at their first joint point. The joint point is the
/// lowest-index component of j whose absolute value occurs in jp; the match
/// is the lowest-index such component of jp. When the two agree in sign, jp is
/// negated first. Throws when the vectors are not correlated.
Reduction reduce_pair(const BalancedVector& j, const BalancedVector& jp);

struct Preimage {
    BalancedVector first;
    BalancedVector second;
};

/// Every ordered pair (J, J') of balanced vectors with lengths p, q and
/// components in [-bound, bound] \ {0} whose reduction is l. Both J' and -J'
/// are listed. Throws when l.size() != p + q - 2.
std::vector<Preimage> enumerate_preimages(const BalancedVector& l, int p, int q, int bound);

/// All balanced vectors of the given length with components in [-bound, bound] \ {0},
/// in lexicographic order.
std::vector<BalancedVector> balanced_vectors(int length, int bound, const WorkCap& cap = default_work_cap());

/// Number of tuples (J_1, ..., J_l) with lengths `lengths`, components in
/// [-bound, bound] \ {0}, every absolute value occurring at least twice over
/// the tuple, and forming a single cluster. Needs l >= 3; the product of the
/// per-length balanced-vector counts is capped by cap.cluster_tuples.
std::uint64_t count_cluster_set(int l, std::span<const int> lengths, int bound,
                                const WorkCap& cap = default_work_cap());

} // namespace tfluct

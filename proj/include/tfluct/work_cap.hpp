#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tfluct {

/// Thrown when an exhaustive enumeration would exceed its configured budget.
class WorkCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Limits on exhaustive enumerations. Every field counts enumerated objects
/// (pairings, index tuples, vector tuples), never wall time.
struct WorkCap {
    std::uint64_t partitions = 2027025;      // 15!!, i.e. pairings of [2k] with 2k <= 16
    std::uint64_t trace_terms = 100000000;   // index vectors visited by the trace formula
    std::uint64_t cluster_tuples = 50000000; // vector tuples visited by count_cluster_set
    std::uint64_t vector_pairs = 200000000;  // (J, J') pairs in the commutativity sums
};

/// Default caps, with every field replaced by TOEPLITZ_FLUCT_WORKCAP when set.
WorkCap default_work_cap();

inline void require_within_cap(std::uint64_t needed, std::uint64_t cap, const std::string& what)
{
    if (needed > cap) {
        throw WorkCapExceeded(what + ": " + std::to_string(needed) + " items exceeds work cap " +
                              std::to_string(cap));
    }
}

} // namespace tfluct

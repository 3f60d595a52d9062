#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tfluct::verify {

/// Outcome of one oracle suite: a verdict plus human-readable detail lines.
struct SuiteReport {
    std::string name;
    bool passed = true;
    std::vector<std::string> details;
};

/// Trace formula against repeated band multiplication on random cases.
SuiteReport trace(int cases = 100, std::uint64_t seed = 1);
/// Enumerated class sizes against the closed-form counts for p, q <= max_pq.
SuiteReport enumeration(int max_pq = 6);
/// Pre-image bound and reduction round trip for p, q <= max_pq, bounds <= max_bound.
SuiteReport reduction(int max_pq = 4, int max_bound = 4);
/// Cluster counts for three length-2 vectors at bounds 4, 16, 64.
SuiteReport clusters();
/// Numeric integrals at b = 0 against the closed forms for p + q <= max_total.
SuiteReport integrals(std::uint64_t budget = 100000, int max_total = 8, std::uint64_t seed = 1);
/// Exact commutativity gap at (n, bn) = (64, 4) and (256, 8).
SuiteReport commutativity();

std::vector<SuiteReport> all(std::uint64_t integral_budget = 100000);

} // namespace tfluct::verify

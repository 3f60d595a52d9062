#include "tfluct/work_cap.hpp"

#include <cstdlib>

namespace tfluct {

WorkCap default_work_cap()
{
    WorkCap cap;
    if (const char* env = std::getenv("TOEPLITZ_FLUCT_WORKCAP"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != nullptr && *end == '\0' && v > 0) {
            cap.partitions = v;
            cap.trace_terms = v;
            cap.cluster_tuples = v;
            cap.vector_pairs = v;
        }
    }
    return cap;
}

} // namespace tfluct

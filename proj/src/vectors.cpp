#include "tfluct/vectors.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace tfluct {

BalancedVector::BalancedVector(std::vector<int> components) : c_(std::move(components))
{
    long long sum = 0;
    for (int x : c_) {
        if (x == 0) {
            throw std::invalid_argument("balanced vector components must be non-zero");
        }
        sum += x;
    }
    if (sum != 0) {
        throw std::invalid_argument("balanced vector components must sum to zero");
    }
}

int BalancedVector::max_abs() const
{
    int m = 0;
    for (int x : c_) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

BalancedVector BalancedVector::negated() const
{
    BalancedVector out;
    out.c_.reserve(c_.size());
    for (int x : c_) {
        out.c_.push_back(-x);
    }
    return out;
}

std::string BalancedVector::to_string() const
{
    std::string out = "(";
    for (std::size_t i = 0; i < c_.size(); ++i) {
        out += (i ? "," : "") + std::to_string(c_[i]);
    }
    return out + ")";
}

std::vector<int> support_multiset(const BalancedVector& v)
{
    std::vector<int> out;
    out.reserve(v.size());
    for (int x : v.components()) {
        out.push_back(std::abs(x));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

bool contains_abs(const BalancedVector& v, int value)
{
    return std::any_of(v.components().begin(), v.components().end(), [&](int x) { return std::abs(x) == value; });
}

} // namespace

bool correlated(const BalancedVector& a, const BalancedVector& b)
{
    return std::any_of(a.components().begin(), a.components().end(),
                       [&](int x) { return contains_abs(b, std::abs(x)); });
}

ClusterDecomposition cluster_decompose(std::span<const BalancedVector> vs)
{
    std::vector<std::size_t> parent(vs.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            if (correlated(vs[i], vs[j])) {
                const std::size_t a = find(i);
                const std::size_t b = find(j);
                parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    ClusterDecomposition out;
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const std::size_t root = find(i);
        auto [it, fresh] = slot.try_emplace(root, out.size());
        if (fresh) {
            out.emplace_back();
        }
        out[it->second].push_back(i);
    }
    return out;
}

Reduction reduce_pair(const BalancedVector& j, const BalancedVector& jp)
{
    for (std::size_t u = 0; u < j.size(); ++u) {
        const int ju = j[u];
        for (std::size_t v = 0; v < jp.size(); ++v) {
            if (std::abs(jp[v]) != std::abs(ju)) {
                continue;
            }
            const bool negate = jp[v] == ju;
            const int sign = negate ? -1 : 1;
            std::vector<int> merged;
            merged.reserve(j.size() + jp.size() - 2);
            merged.insert(merged.end(), j.components().begin(), j.components().begin() + static_cast<long>(u));
            for (std::size_t i = 0; i < jp.size(); ++i) {
                if (i != v) {
                    merged.push_back(sign * jp[i]);
                }
            }
            merged.insert(merged.end(), j.components().begin() + static_cast<long>(u) + 1, j.components().end());
            return {BalancedVector(std::move(merged)), negate};
        }
    }
    throw std::invalid_argument("reduce_pair needs correlated vectors");
}

std::vector<Preimage> enumerate_preimages(const BalancedVector& l, int p, int q, int bound)
{
    if (p < 1 || q < 1 || static_cast<int>(l.size()) != p + q - 2) {
        throw std::invalid_argument("enumerate_preimages needs a vector of length p + q - 2");
    }
    const auto& c = l.components();
    std::vector<Preimage> out;
    auto emit = [&](BalancedVector a, BalancedVector b) {
        for (const auto& e : out) {
            if (e.first == a && e.second == b) {
                return;
            }
        }
        out.push_back({std::move(a), std::move(b)});
    };
    for (int u = 0; u < p; ++u) {
        int s = 0;
        for (int i = u; i <= u + q - 2; ++i) {
            s += c[static_cast<std::size_t>(i)];
        }
        if (s == 0 || std::abs(s) > bound) {
            continue;
        }
        // The spliced value must not already occur earlier in J.
        bool clash = false;
        for (int i = 0; i < u; ++i) {
            clash = clash || std::abs(c[static_cast<std::size_t>(i)]) == std::abs(s);
        }
        if (clash) {
            continue;
        }
        std::vector<int> jv(c.begin(), c.begin() + u);
        jv.push_back(s);
        jv.insert(jv.end(), c.begin() + u + q - 1, c.end());
        const BalancedVector jvec(std::move(jv));
        for (int v = 0; v < q; ++v) {
            bool early = false;
            for (int i = u; i < u + v; ++i) {
                early = early || std::abs(c[static_cast<std::size_t>(i)]) == std::abs(s);
            }
            if (early) {
                continue;
            }
            std::vector<int> jpv(c.begin() + u, c.begin() + u + v);
            jpv.push_back(-s);
            jpv.insert(jpv.end(), c.begin() + u + v, c.begin() + u + q - 1);
            const BalancedVector jpvec(std::move(jpv));
            for (const auto& candidate : {jpvec, jpvec.negated()}) {
                if (reduce_pair(jvec, candidate).merged == l) {
                    emit(jvec, candidate);
                }
            }
        }
    }
    return out;
}

namespace {

void balanced_rec(int remaining, int bound, int partial, std::vector<int>& cur, std::vector<BalancedVector>& out)
{
    if (remaining == 0) {
        if (partial == 0) {
            out.emplace_back(cur);
        }
        return;
    }
    for (int x = -bound; x <= bound; ++x) {
        if (x == 0) {
            continue;
        }
        const int next = partial + x;
        if (std::abs(next) > (remaining - 1) * bound) {
            continue;
        }
        cur.push_back(x);
        balanced_rec(remaining - 1, bound, next, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<BalancedVector> balanced_vectors(int length, int bound, const WorkCap& cap)
{
    if (length < 1 || bound < 1) {
        throw std::invalid_argument("balanced_vectors needs length >= 1 and bound >= 1");
    }
    std::uint64_t space = 1;
    for (int i = 0; i + 1 < length; ++i) {
        space = space > cap.cluster_tuples ? space : space * static_cast<std::uint64_t>(2 * bound);
    }
    require_within_cap(space, cap.cluster_tuples, "balanced vector enumeration");
    std::vector<BalancedVector> out;
    std::vector<int> cur;
    balanced_rec(length, bound, 0, cur, out);
    return out;
}

std::uint64_t count_cluster_set(int l, std::span<const int> lengths, int bound, const WorkCap& cap)
{
    if (l < 3 || static_cast<int>(lengths.size()) != l) {
        throw std::invalid_argument("count_cluster_set needs l >= 3 lengths");
    }
    std::vector<std::vector<BalancedVector>> pools;
    std::uint64_t tuples = 1;
    for (int len : lengths) {
        if (len < 2 || len % 2 != 0) {
            throw std::invalid_argument("cluster lengths must be even and >= 2");
        }
        pools.push_back(balanced_vectors(len, bound, cap));
        const auto sz = static_cast<std::uint64_t>(pools.back().size());
        tuples = (sz != 0 && tuples > cap.cluster_tuples / sz) ? cap.cluster_tuples + 1 : tuples * sz;
    }
    require_within_cap(tuples, cap.cluster_tuples, "cluster tuple enumeration");

    std::vector<int> multiplicity(static_cast<std::size_t>(bound) + 1, 0);
    std::vector<BalancedVector> chosen(static_cast<std::size_t>(l));
    std::uint64_t count = 0;
    auto accept = [&] {
        for (int value = 1; value <= bound; ++value) {
            if (multiplicity[static_cast<std::size_t>(value)] == 1) {
                return false;
            }
        }
        return cluster_decompose(chosen).size() == 1;
    };
    auto rec = [&](auto&& self, std::size_t depth) -> void {
        if (depth == pools.size()) {
            count += accept() ? 1 : 0;
            return;
        }
        for (const auto& v : pools[depth]) {
            for (int x : v.components()) {
                ++multiplicity[static_cast<std::size_t>(std::abs(x))];
            }
            chosen[depth] = v;
            self(self, depth + 1);
            for (int x : v.components()) {
                --multiplicity[static_cast<std::size_t>(std::abs(x))];
            }
        }
    };
    rec(rec, 0);
    return count;
}

} // namespace tfluct

#include "tfluct/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tfluct/combinatorics.hpp"
#include "tfluct/ensembles.hpp"
#include "tfluct/experiments.hpp"
#include "tfluct/integrals.hpp"
#include "tfluct/rng.hpp"
#include "tfluct/vectors.hpp"

namespace tfluct::verify {

namespace {

std::string fmt(const char* spec, double x)
{
    char buf[96];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

void fail(SuiteReport& rep, std::string line)
{
    rep.passed = false;
    rep.details.push_back("FAIL " + std::move(line));
}

} // namespace

SuiteReport trace(int cases, std::uint64_t seed)
{
    SuiteReport rep{"trace", true, {}};
    PhiloxStream rng(seed, 0x7ACEull);
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>((hi - lo + 1) * (1.0 - rng.uniform())); };
    double worst = 0.0;
    for (int c = 0; c < cases; ++c) {
        const int n = pick(2, 64);
        const int p = pick(1, 5);
        const int wmax = std::min(6, n - 1);
        const bool mixed = c % 2 == 1;
        const int common = pick(0, wmax);
        std::vector<std::vector<double>> coeffs;
        std::vector<int> widths;
        BandMatrix product;
        for (int l = 0; l < p; ++l) {
            const int w = mixed ? pick(0, wmax) : common;
            std::vector<double> a(static_cast<std::size_t>(w) + 1);
            for (auto& x : a) {
                x = rng.uniform(-1.0, 1.0);
            }
            const BandMatrix m = toeplitz_band(n, a, w);
            product = l == 0 ? m : multiply(product, m);
            coeffs.push_back(std::move(a));
            widths.push_back(w);
        }
        double dense = 0.0;
        for (int i = 0; i < n; ++i) {
            dense += product(i, i);
        }
        const double formula = trace_product_formula(coeffs, widths, n);
        const double err = std::abs(formula - dense) / std::max(1.0, std::abs(dense));
        worst = std::max(worst, err);
        if (err > 1e-9) {
            fail(rep, "case " + std::to_string(c) + ": formula " + fmt("%.15g", formula) + " vs dense " +
                          fmt("%.15g", dense));
        }
    }
    rep.details.push_back(std::to_string(cases) + " cases, max relative error " + fmt("%.3g", worst));
    return rep;
}

SuiteReport enumeration(int max_pq)
{
    SuiteReport rep{"enumeration", true, {}};
    int checked = 0;
    for (int p = 1; p <= max_pq; ++p) {
        for (int q = 1; q <= max_pq; ++q) {
            if ((p + q) % 2 != 0) {
                continue;
            }
            const auto all = enumerate_pair_partitions((p + q) / 2);
            std::vector<std::uint64_t> by_k(static_cast<std::size_t>(std::min(p, q)) + 1, 0);
            for (const auto& pi : all) {
                ++by_k[static_cast<std::size_t>(count_crosses(pi, p))];
            }
            for (int k = 0; k <= std::min(p, q); ++k) {
                ++checked;
                if (by_k[static_cast<std::size_t>(k)] != r1(p, q, k)) {
                    fail(rep, "crosses p=" + std::to_string(p) + " q=" + std::to_string(q) + " k=" +
                                  std::to_string(k) + ": " + std::to_string(by_k[static_cast<std::size_t>(k)]) +
                                  " vs r1 " + std::to_string(r1(p, q, k)));
                }
            }
            if (p < 2 || q < 2) {
                continue;
            }
            const auto tilde = static_cast<std::int64_t>(enumerate_class({p, q, 3}).size());
            const std::int64_t closed = p % 2 == 0 ? card_p2tilde_even(p, q) : r4(p, q);
            ++checked;
            if (tilde != closed) {
                fail(rep, "p2tilde p=" + std::to_string(p) + " q=" + std::to_string(q) + ": " +
                              std::to_string(tilde) + " vs " + std::to_string(closed));
            }
            if (p % 2 == 0) {
                const auto mixed = static_cast<std::uint64_t>(enumerate_p24(p, q).size());
                ++checked;
                if (mixed != r2(p, q)) {
                    fail(rep, "p24 p=" + std::to_string(p) + " q=" + std::to_string(q) + ": " +
                                  std::to_string(mixed) + " vs r2 " + std::to_string(r2(p, q)));
                }
            }
        }
    }
    rep.details.push_back(std::to_string(checked) + " counts compared for p, q <= " + std::to_string(max_pq));
    return rep;
}

SuiteReport reduction(int max_pq, int max_bound)
{
    SuiteReport rep{"reduction", true, {}};
    std::size_t vectors = 0;
    std::size_t worst_ratio_num = 0;
    std::size_t empty = 0; // a zero or out-of-range spliced value leaves no pre-image
    for (int bound = 1; bound <= max_bound; ++bound) {
        for (int p = 2; p <= max_pq; ++p) {
            for (int q = 2; q <= max_pq; ++q) {
                const auto limit = static_cast<std::size_t>(2 * p * q);
                for (const auto& l : balanced_vectors(p + q - 2, bound)) {
                    ++vectors;
                    const auto pre = enumerate_preimages(l, p, q, bound);
                    worst_ratio_num = std::max(worst_ratio_num, pre.size());
                    empty += pre.empty() ? 1 : 0;
                    if (pre.size() > limit) {
                        fail(rep, "L=" + l.to_string() + " p=" + std::to_string(p) + " q=" + std::to_string(q) +
                                      ": " + std::to_string(pre.size()) + " pre-images");
                    }
                    for (const auto& pair : pre) {
                        if (!(reduce_pair(pair.first, pair.second).merged == l)) {
                            fail(rep, "round trip broke for L=" + l.to_string());
                        }
                    }
                }
            }
        }
    }
    rep.details.push_back(std::to_string(vectors) + " reduced vectors checked, largest pre-image list " +
                          std::to_string(worst_ratio_num) + ", " + std::to_string(empty) +
                          " without any pre-image");
    return rep;
}

SuiteReport clusters()
{
    SuiteReport rep{"clusters", true, {}};
    const int lengths[3] = {2, 2, 2};
    double previous = INFINITY;
    for (int bound : {4, 16, 64}) {
        const std::uint64_t count = count_cluster_set(3, lengths, bound);
        const double ratio = static_cast<double>(count) / std::pow(bound, 1.5);
        rep.details.push_back("B=" + std::to_string(bound) + ": count " + std::to_string(count) + ", ratio " +
                              fmt("%.6g", ratio));
        if (count != static_cast<std::uint64_t>(8 * bound)) {
            fail(rep, "count at B=" + std::to_string(bound) + " is not 8B");
        }
        if (!(ratio < previous)) {
            fail(rep, "ratio not decreasing at B=" + std::to_string(bound));
        }
        previous = ratio;
    }
    return rep;
}

SuiteReport integrals(std::uint64_t budget, int max_total, std::uint64_t seed)
{
    SuiteReport rep{"integrals", true, {}};
    std::uint64_t term = 0;
    int checked = 0;
    int failed = 0;
    auto judge = [&](const std::string& what, const McEstimate& est, double closed, double exact) {
        ++checked;
        const double tol = std::max(3.0 * est.stderr_, 0.01 * std::abs(closed));
        if (std::abs(est.estimate - closed) > tol) {
            ++failed;
            fail(rep, what + ": numeric " + fmt("%.6g", est.estimate) + " +- " + fmt("%.2g", est.stderr_) +
                          " vs closed " + fmt("%.6g", closed) + " (exact slice " + fmt("%.6g", exact) + ")");
        }
    };
    const double grid[2][2] = {{1.0, 1.0}, {0.5, 1.0}};
    for (const auto& tt : grid) {
        for (int total = 2; total <= max_total; total += 2) {
            for (int p = 1; p < total; ++p) {
                const int q = total - p;
                for (const auto& pi : enumerate_class({p, q, 1})) {
                    const int k = count_crosses(pi, p);
                    const IntegralQuery query{pi, p, q, tt[0], tt[1], 0.0, Sign::Minus};
                    judge("type I " + pi.to_string() + " p=" + std::to_string(p) + " t1=" + fmt("%g", tt[0]),
                          f_type1_numeric(query, budget, seed + (++term)), f_type1_closed(p, q, k, tt[0], tt[1]),
                          f_type1_exact_b0(p, q, k, tt[0], tt[1]));
                }
                if (p % 2 == 0 && q % 2 == 0) {
                    for (const auto& pi : enumerate_p24(p, q)) {
                        const IntegralQuery query{pi, p, q, tt[0], tt[1], 0.0, Sign::Minus};
                        const double closed = f_type2_closed(p, q, tt[0], tt[1]);
                        judge("type II " + pi.to_string() + " t1=" + fmt("%g", tt[0]),
                              f_type2_numeric(query, budget, seed + (++term)), closed, closed);
                    }
                }
            }
        }
    }
    rep.details.insert(rep.details.begin(), std::to_string(checked) + " integrals at budget " +
                                                std::to_string(budget) + ", " + std::to_string(failed) +
                                                " outside max(3 stderr, 1%)");
    return rep;
}

SuiteReport commutativity()
{
    SuiteReport rep{"commutativity", true, {}};
    double previous = INFINITY;
    for (const auto& [n, bn] : {std::pair{64, 4}, std::pair{256, 8}}) {
        ExperimentConfig config;
        config.model = Model::B;
        config.n = n;
        config.bn = bn;
        config.replicas = 200;
        const CommutativityReport r = commutativity_check(config, 2, 2, 1.0, 2.0);
        rep.details.push_back("n=" + std::to_string(n) + " bn=" + std::to_string(bn) + ": direct " +
                              fmt("%.9g", r.exact_direct) + ", decomposed " + fmt("%.9g", r.exact_decomposed) +
                              ", difference " + fmt("%.3g", r.exact_difference));
        if (!(std::abs(r.exact_difference) < previous)) {
            fail(rep, "difference did not shrink at n=" + std::to_string(n));
        }
        previous = std::abs(r.exact_difference);
    }
    return rep;
}

std::vector<SuiteReport> all(std::uint64_t integral_budget)
{
    return {trace(), enumeration(), reduction(), clusters(), integrals(integral_budget), commutativity()};
}

} // namespace tfluct::verify

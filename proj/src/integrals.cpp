#include "tfluct/integrals.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tfluct/rng.hpp"

namespace tfluct {

namespace {

void check_times(double t1, double t2)
{
    if (!(t1 > 0.0) || !(t2 > 0.0)) {
        throw std::invalid_argument("times must be positive");
    }
    if (t1 > t2) {
        throw std::invalid_argument("integrals need t1 <= t2");
    }
}

void check_query(const IntegralQuery& q, std::uint64_t budget)
{
    check_times(q.t1, q.t2);
    if (q.b < 0.0 || q.b > 1.0) {
        throw std::invalid_argument("b must lie in [0, 1]");
    }
    if (q.b > 0.0 && q.t2 >= 1.0 / q.b) {
        throw std::invalid_argument("times must lie in (0, 1/b)");
    }
    if (budget < kMinIntegralBudget) {
        throw std::invalid_argument("integral budget below the 1e4 sample floor");
    }
}

// Integration variable per block: its half-width and the signed map to y.
struct Layout {
    std::vector<double> half_width;  // per block
    std::vector<int> block;          // y_i -> block (1-based i, index i-1)
    std::vector<int> sign;           // y_i = sign * x_block
    int solved = -1;                 // block eliminated by the delta constraint
    std::vector<int> cross_free;     // other cross blocks
};

double indicator_product(const Layout& lay, const std::vector<double>& x, int p, int q, double b, Sign sign,
                         double x0, double y0)
{
    double partial = 0.0;
    for (int i = 0; i < p; ++i) {
        partial += lay.sign[i] * x[lay.block[i]];
        const double v = x0 + b * partial;
        if (v < 0.0 || v > 1.0) {
            return 0.0;
        }
    }
    partial = 0.0;
    const double s = sign == Sign::Plus ? -1.0 : 1.0;
    for (int i = p; i < p + q; ++i) {
        partial += lay.sign[i] * x[lay.block[i]];
        const double v = y0 + s * b * partial;
        if (v < 0.0 || v > 1.0) {
            return 0.0;
        }
    }
    return 1.0;
}

McEstimate run(const Layout& lay, const IntegralQuery& q, std::uint64_t budget, std::uint64_t seed, bool constrained)
{
    double volume = 1.0;
    for (std::size_t blk = 0; blk < lay.half_width.size(); ++blk) {
        if (static_cast<int>(blk) != lay.solved) {
            volume *= 2.0 * lay.half_width[blk];
        }
    }
    PhiloxStream rng(seed, 0x1A7E6Aull);
    std::vector<double> x(lay.half_width.size(), 0.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::uint64_t s = 0; s < budget; ++s) {
        for (std::size_t blk = 0; blk < x.size(); ++blk) {
            if (static_cast<int>(blk) != lay.solved) {
                x[blk] = rng.uniform(-lay.half_width[blk], lay.half_width[blk]);
            }
        }
        double value = 1.0;
        if (constrained) {
            double acc = 0.0;
            for (int c : lay.cross_free) {
                acc += x[c];
            }
            x[lay.solved] = -acc;
            if (std::abs(acc) > lay.half_width[lay.solved]) {
                value = 0.0;
            }
        }
        if (value != 0.0 && q.b > 0.0) {
            const double x0 = rng.uniform();
            const double y0 = rng.uniform();
            value = indicator_product(lay, x, q.p, q.q, q.b, q.sign, x0, y0);
        }
        sum += value;
        sum_sq += value * value;
    }
    const auto n = static_cast<double>(budget);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {volume * mean, volume * std::sqrt(var / n), budget};
}

} // namespace

double f_type1_closed(int p, int q, int k, double t1, double t2)
{
    check_times(t1, t2);
    if (k < 1 || k > std::min(p, q) || (p - k) % 2 != 0 || (q - k) % 2 != 0) {
        throw std::invalid_argument("infeasible cross count for type-I integral");
    }
    return std::pow(2.0, (p + q) / 2 - 1) * std::pow(t1, (p + k) / 2 - 1) * std::pow(t2, (q - k) / 2);
}

double f_type2_closed(int p, int q, double t1, double t2)
{
    check_times(t1, t2);
    if (p < 2 || q < 2 || p % 2 != 0 || q % 2 != 0) {
        throw std::invalid_argument("type-II integral needs even p, q >= 2");
    }
    return std::pow(2.0, (p + q) / 2 - 1) * std::pow(t1, p / 2) * std::pow(t2, q / 2 - 1);
}

double centered_slice_volume(int k)
{
    if (k < 1) {
        throw std::invalid_argument("slice volume needs k >= 1");
    }
    if (k == 1) {
        return 1.0; // the point x = 0
    }
    // Irwin-Hall density of order k at k/2: sum_j (-1)^j C(k,j) (k/2 - j)^{k-1} / (k-1)!
    const double x = 0.5 * k;
    double density = 0.0;
    for (int j = 0; j <= k / 2 && j < x; ++j) {
        const double term = static_cast<double>(binomial(k, j)) * std::pow(x - j, k - 1);
        density += (j % 2 == 0) ? term : -term;
    }
    double fact = 1.0;
    for (int i = 2; i < k; ++i) {
        fact *= i;
    }
    return std::ldexp(density / fact, k - 1);
}

double f_type1_exact_b0(int p, int q, int k, double t1, double t2)
{
    // Validates arguments the same way as the closed form.
    (void)f_type1_closed(p, q, k, t1, t2);
    return std::pow(2.0 * t2, (q - k) / 2) * std::pow(2.0 * t1, (p - k) / 2) * std::pow(t1, k - 1) *
           centered_slice_volume(k);
}

McEstimate f_type1_numeric(const IntegralQuery& query, std::uint64_t budget, std::uint64_t seed)
{
    const auto* pi = std::get_if<PairPartition>(&query.pi);
    if (pi == nullptr) {
        throw std::invalid_argument("type-I integral needs a pair partition");
    }
    if (pi->size() != query.p + query.q) {
        throw std::invalid_argument("pair partition size must equal p + q");
    }
    check_query(query, budget);
    const int p = query.p;
    Layout lay;
    lay.half_width.resize(static_cast<std::size_t>(pi->k()));
    lay.block.resize(static_cast<std::size_t>(pi->size()));
    lay.sign.resize(static_cast<std::size_t>(pi->size()));
    std::vector<int> crosses;
    for (int blk = 0; blk < pi->k(); ++blk) {
        const Pair& b = pi->blocks()[static_cast<std::size_t>(blk)];
        lay.half_width[static_cast<std::size_t>(blk)] = b[0] <= p ? query.t1 : query.t2;
        // The least element of a block carries +x, the other -x.
        lay.block[static_cast<std::size_t>(b[0] - 1)] = blk;
        lay.block[static_cast<std::size_t>(b[1] - 1)] = blk;
        lay.sign[static_cast<std::size_t>(b[0] - 1)] = 1;
        lay.sign[static_cast<std::size_t>(b[1] - 1)] = -1;
        if (b[0] <= p && b[1] > p) {
            crosses.push_back(blk);
        }
    }
    if (crosses.empty()) {
        throw std::invalid_argument("type-I integral needs a pairing with at least one cross");
    }
    // The constraint sum_{i<=p} y_i = 0 reduces to: sum of cross variables = 0.
    lay.solved = crosses.back();
    lay.cross_free.assign(crosses.begin(), crosses.end() - 1);
    return run(lay, query, budget, seed, true);
}

McEstimate f_type2_numeric(const IntegralQuery& query, std::uint64_t budget, std::uint64_t seed)
{
    const auto* pi = std::get_if<MixedPartition24>(&query.pi);
    if (pi == nullptr) {
        throw std::invalid_argument("type-II integral needs a P24 partition");
    }
    if (pi->p() != query.p || pi->q() != query.q) {
        throw std::invalid_argument("P24 partition sides must equal (p, q)");
    }
    check_query(query, budget);
    const int n = query.p + query.q;
    Layout lay;
    lay.block.resize(static_cast<std::size_t>(n));
    lay.sign.resize(static_cast<std::size_t>(n));
    // Block 0 is the 4-block: outer elements +x, inner elements -x.
    lay.half_width.push_back(query.t1);
    const Quad& quad = pi->quad_block();
    for (int j = 0; j < 4; ++j) {
        lay.block[static_cast<std::size_t>(quad[j] - 1)] = 0;
        lay.sign[static_cast<std::size_t>(quad[j] - 1)] = (j == 0 || j == 3) ? 1 : -1;
    }
    for (const Pair& b : pi->pair_blocks()) {
        const int blk = static_cast<int>(lay.half_width.size());
        lay.half_width.push_back(b[0] <= query.p ? query.t1 : query.t2);
        lay.block[static_cast<std::size_t>(b[0] - 1)] = blk;
        lay.block[static_cast<std::size_t>(b[1] - 1)] = blk;
        lay.sign[static_cast<std::size_t>(b[0] - 1)] = 1;
        lay.sign[static_cast<std::size_t>(b[1] - 1)] = -1;
    }
    return run(lay, query, budget, seed, false);
}

} // namespace tfluct

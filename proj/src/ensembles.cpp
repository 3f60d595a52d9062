#include "tfluct/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfluct/rng.hpp"

namespace tfluct {

EntryModel EntryModel::custom(double kappa, Model mode)
{
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
        throw std::invalid_argument("custom entry law needs finite kappa >= 1");
    }
    return {EntryFamily::CustomMoments, kappa, mode};
}

EntryModel EntryModel::from_name(const std::string& name, double kappa, Model mode)
{
    if (name == "gaussian") {
        return gaussian(mode);
    }
    if (name == "rademacher") {
        return rademacher(mode);
    }
    if (name == "uniform") {
        return uniform(mode);
    }
    if (name == "custom") {
        return custom(kappa, mode);
    }
    throw std::invalid_argument("unknown entry family '" + name + "'");
}

std::string EntryModel::family_name() const
{
    switch (family) {
    case EntryFamily::Gaussian: return "gaussian";
    case EntryFamily::Rademacher: return "rademacher";
    case EntryFamily::UniformScaled: return "uniform";
    case EntryFamily::CustomMoments: return "custom";
    }
    return "unknown";
}

int scaled_bandwidth(int bn, double t)
{
    const double prod = static_cast<double>(bn) * t;
    const double nearest = std::round(prod);
    if (std::abs(prod - nearest) <= 1e-9 * std::max(1.0, std::abs(prod))) {
        return static_cast<int>(nearest);
    }
    return static_cast<int>(std::floor(prod));
}

int MatrixSpec::bandwidth() const { return model == Model::A ? scaled_bandwidth(bn, t) : bn; }

const std::vector<double>& SamplePath::at_time(double t) const
{
    if (model == Model::A) {
        return values.front();
    }
    for (std::size_t m = 0; m < times.size(); ++m) {
        if (times[m] == t) {
            return values[m];
        }
    }
    throw std::invalid_argument("sample path has no values at the requested time");
}

namespace {

double draw_entry(const EntryModel& model, const Philox4x32::Counter& words)
{
    const double u1 = to_unit_open_closed(words[0], words[1]);
    const double u2 = to_unit_open_closed(words[2], words[3]);
    switch (model.family) {
    case EntryFamily::Gaussian:
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    case EntryFamily::Rademacher:
        return (words[0] & 1u) ? 1.0 : -1.0;
    case EntryFamily::UniformScaled:
        return std::numbers::sqrt3 * (2.0 * u1 - 1.0);
    case EntryFamily::CustomMoments:
        if (u1 > 1.0 / model.kappa) {
            return 0.0;
        }
        return u2 <= 0.5 ? std::sqrt(model.kappa) : -std::sqrt(model.kappa);
    }
    return 0.0;
}

} // namespace

SamplePath sample_path(const EntryModel& model, int lags, std::span<const double> times, std::uint64_t seed,
                       std::uint64_t replica)
{
    if (lags < 0) {
        throw std::invalid_argument("lag count must be non-negative");
    }
    for (std::size_t m = 0; m < times.size(); ++m) {
        if (!(times[m] > 0.0) || (m > 0 && !(times[m] > times[m - 1]))) {
            throw std::invalid_argument("times must be positive and strictly increasing");
        }
    }
    const Philox4x32 gen(seed);
    auto counter = [&](int lag, std::size_t time_index) {
        return Philox4x32::Counter{static_cast<std::uint32_t>(lag), static_cast<std::uint32_t>(time_index),
                                   static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)};
    };
    SamplePath path;
    path.model = model.mode;
    path.times.assign(times.begin(), times.end());
    if (model.mode == Model::A) {
        std::vector<double> row(static_cast<std::size_t>(lags) + 1, 0.0);
        for (int lag = 1; lag <= lags; ++lag) {
            row[static_cast<std::size_t>(lag)] = draw_entry(model, gen(counter(lag, 0)));
        }
        path.values.push_back(std::move(row));
        return path;
    }
    if (times.empty()) {
        throw std::invalid_argument("Brownian sample path needs at least one time");
    }
    // Brownian paths always use Gaussian increments, whatever the family.
    const EntryModel increments = EntryModel::gaussian(Model::B);
    std::vector<double> current(static_cast<std::size_t>(lags) + 1, 0.0);
    double prev = 0.0;
    for (std::size_t m = 0; m < times.size(); ++m) {
        const double scale = std::sqrt(times[m] - prev);
        for (int lag = 1; lag <= lags; ++lag) {
            current[static_cast<std::size_t>(lag)] += scale * draw_entry(increments, gen(counter(lag, m)));
        }
        path.values.push_back(current);
        prev = times[m];
    }
    return path;
}

BandMatrix toeplitz_band(int n, std::span<const double> coeffs, int bandwidth, double scale)
{
    if (bandwidth > n - 1) {
        throw std::invalid_argument("bandwidth exceeds n - 1");
    }
    if (static_cast<int>(coeffs.size()) <= bandwidth) {
        throw std::invalid_argument("not enough lag coefficients for the bandwidth");
    }
    BandMatrix m(n, bandwidth);
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(0, i - bandwidth); j <= std::min(n - 1, i + bandwidth); ++j) {
            m.at(i, j) = scale * coeffs[static_cast<std::size_t>(std::abs(i - j))];
        }
    }
    return m;
}

BandMatrix build_matrix(const MatrixSpec& spec, const SamplePath& path)
{
    if (spec.n < 1 || spec.bn < 1 || spec.bn > spec.n) {
        throw std::invalid_argument("matrix spec needs 1 <= bn <= n");
    }
    if (spec.model != path.model) {
        throw std::invalid_argument("matrix spec and sample path use different models");
    }
    const int bw = spec.bandwidth();
    if (bw > spec.n - 1) {
        throw std::invalid_argument("bandwidth " + std::to_string(bw) + " exceeds n - 1");
    }
    const auto& row = path.at_time(spec.t);
    std::vector<double> coeffs(row.begin(), row.end());
    coeffs[0] = 0.0;
    return toeplitz_band(spec.n, coeffs, bw, 1.0 / std::sqrt(static_cast<double>(spec.bn)));
}

std::vector<double> trace_powers(const BandMatrix& m, int max_p)
{
    if (max_p < 1) {
        throw std::invalid_argument("trace power needs p >= 1");
    }
    std::vector<double> out(static_cast<std::size_t>(max_p), 0.0);
    double tr = 0.0;
    for (int i = 0; i < m.n(); ++i) {
        tr += m(i, i);
    }
    out[0] = tr;
    if (max_p == 1) {
        return out;
    }
    // powers[k] = M^{k+1}; tr(M^p) = <M^a, M^b> with a + b = p, using symmetry.
    std::vector<BandMatrix> powers{m};
    const int half = (max_p + 1) / 2;
    while (static_cast<int>(powers.size()) < half) {
        powers.push_back(multiply(powers.back(), m));
    }
    for (int p = 2; p <= max_p; ++p) {
        const int a = (p + 1) / 2;
        const int b = p / 2;
        out[static_cast<std::size_t>(p - 1)] =
            frobenius_inner(powers[static_cast<std::size_t>(a - 1)], powers[static_cast<std::size_t>(b - 1)]);
    }
    return out;
}

double trace_power_dense(const BandMatrix& m, int p)
{
    if (p < 1) {
        throw std::invalid_argument("trace power needs p >= 1");
    }
    BandMatrix acc = m;
    for (int k = 1; k < p; ++k) {
        acc = multiply(acc, m);
    }
    double tr = 0.0;
    for (int i = 0; i < acc.n(); ++i) {
        tr += acc(i, i);
    }
    return tr;
}

namespace {

struct TraceWalker {
    std::span<const std::vector<double>> coeffs;
    std::span<const int> bw;
    int n;
    double total = 0.0;

    void walk(std::size_t l, int partial, int lo, int hi, double weight)
    {
        const std::size_t p = bw.size();
        if (l + 1 == p) {
            // Last step closes the loop: j_p = -partial.
            const int j = -partial;
            if (std::abs(j) > bw[l]) {
                return;
            }
            const double a = coeffs[l][static_cast<std::size_t>(std::abs(j))];
            const int rows = n - (hi - lo);
            if (a != 0.0 && rows > 0) {
                total += weight * a * rows;
            }
            return;
        }
        for (int j = -bw[l]; j <= bw[l]; ++j) {
            const double a = coeffs[l][static_cast<std::size_t>(std::abs(j))];
            if (a == 0.0) {
                continue;
            }
            const int next = partial + j;
            const int nlo = std::min(lo, next);
            const int nhi = std::max(hi, next);
            if (nhi - nlo >= n) {
                continue;
            }
            walk(l + 1, next, nlo, nhi, weight * a);
        }
    }
};

} // namespace

double trace_product_formula(std::span<const std::vector<double>> entry_vectors, std::span<const int> bandwidths,
                             int n, const WorkCap& cap)
{
    if (entry_vectors.empty() || entry_vectors.size() != bandwidths.size()) {
        throw std::invalid_argument("trace formula needs one bandwidth per factor and p >= 1");
    }
    std::uint64_t work = 1;
    for (std::size_t l = 0; l < bandwidths.size(); ++l) {
        if (bandwidths[l] < 0 || bandwidths[l] > n - 1) {
            throw std::invalid_argument("bandwidths must lie in 0..n-1");
        }
        if (static_cast<int>(entry_vectors[l].size()) <= bandwidths[l]) {
            throw std::invalid_argument("coefficient vector shorter than its bandwidth");
        }
        if (l + 1 < bandwidths.size()) {
            const auto width = static_cast<std::uint64_t>(2 * bandwidths[l] + 1);
            work = work > cap.trace_terms / width ? cap.trace_terms + 1 : work * width;
        }
    }
    require_within_cap(work, cap.trace_terms, "trace formula index vectors");
    TraceWalker walker{entry_vectors, bandwidths, n};
    walker.walk(0, 0, 0, 0, 1.0);
    return walker.total;
}

double symbol_constant_term(std::span<const double> coeffs, int bandwidth, int p)
{
    if (p < 1 || bandwidth < 0 || static_cast<int>(coeffs.size()) <= bandwidth) {
        throw std::invalid_argument("symbol power needs p >= 1 and coefficients up to the bandwidth");
    }
    // Laurent polynomial with offset: index d holds the coefficient of e^{i (d - deg) theta}.
    const int w = bandwidth;
    std::vector<double> symbol(static_cast<std::size_t>(2 * w + 1));
    for (int j = -w; j <= w; ++j) {
        symbol[static_cast<std::size_t>(j + w)] = coeffs[static_cast<std::size_t>(std::abs(j))];
    }
    std::vector<double> acc = symbol;
    for (int k = 1; k < p; ++k) {
        std::vector<double> next(acc.size() + symbol.size() - 1, 0.0);
        for (std::size_t a = 0; a < acc.size(); ++a) {
            if (acc[a] == 0.0) {
                continue;
            }
            for (std::size_t b = 0; b < symbol.size(); ++b) {
                next[a + b] += acc[a] * symbol[b];
            }
        }
        acc = std::move(next);
    }
    return acc[(acc.size() - 1) / 2];
}

std::vector<double> omega_statistics(std::span<const double> traces, int n, int bn)
{
    if (traces.size() < 2) {
        throw std::invalid_argument("omega statistics need at least 2 replicas");
    }
    double mean = 0.0;
    for (double t : traces) {
        mean += t;
    }
    mean /= static_cast<double>(traces.size());
    const double scale = std::sqrt(static_cast<double>(bn)) / static_cast<double>(n);
    std::vector<double> out;
    out.reserve(traces.size());
    for (double t : traces) {
        out.push_back(scale * (t - mean));
    }
    return out;
}

} // namespace tfluct

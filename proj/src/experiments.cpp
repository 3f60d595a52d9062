#include "tfluct/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tfluct/combinatorics.hpp"
#include "tfluct/vectors.hpp"

namespace tfluct {

using nlohmann::json;

std::string model_name(Model model) { return model == Model::A ? "A" : "B"; }

namespace {

std::string fmt(const char* spec, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

// Runs fn(i) for i in [0, count) on `workers` threads, i = w, w + W, ...
// Each index writes its own output slot, so results never depend on W.
template <class F>
void parallel_for(int count, int workers, F fn)
{
    if (workers <= 0) {
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) {
                    fn(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

double gaussian_moment(double variance, int k)
{
    if (k % 2 == 1) {
        return 0.0;
    }
    return std::pow(variance, k / 2) * static_cast<double>(double_factorial(k - 1));
}

std::vector<double> distinct_times(std::span<const TimedPower> targets)
{
    std::set<double> times;
    for (const auto& t : targets) {
        times.insert(t.t);
    }
    return {times.begin(), times.end()};
}

} // namespace

void ExperimentConfig::validate() const
{
    if (n < 2) {
        throw ConfigError("n must be at least 2");
    }
    if (bn < 1 || bn > n) {
        throw ConfigError("bn must lie in 1..n");
    }
    if (model == Model::B && bn > n - 1) {
        throw ConfigError("model B bandwidth bn must be at most n - 1");
    }
    if (replicas < 100) {
        throw ConfigError("replicas must be at least 100");
    }
    if (workers < 0) {
        throw ConfigError("workers must be non-negative");
    }
    if (!(threshold > 0.0) || !(relative_tolerance >= 0.0)) {
        throw ConfigError("threshold must be positive and relative_tolerance non-negative");
    }
    if (!(entries.kappa >= 1.0)) {
        throw ConfigError("kappa must be at least 1");
    }
    for (const auto& t : targets) {
        if (t.p < 1 || t.p > 16) {
            throw ConfigError("target powers must lie in 1..16");
        }
        if (!(t.t > 0.0) || !std::isfinite(t.t)) {
            throw ConfigError("target times must be positive");
        }
        if (model == Model::A && scaled_bandwidth(bn, t.t) > n - 1) {
            throw ConfigError("model A bandwidth floor(bn * t) = " + std::to_string(scaled_bandwidth(bn, t.t)) +
                              " exceeds n - 1 at t = " + fmt("%.12g", t.t));
        }
    }
    const auto count = static_cast<int>(targets.size());
    auto check_index = [&](int i) {
        if (i < 0 || i >= count) {
            throw ConfigError("target index " + std::to_string(i) + " out of range");
        }
    };
    for (const auto& pair : covariances) {
        if (pair.size() != 2) {
            throw ConfigError("covariance entries must list two target indices");
        }
        for (int i : pair) {
            check_index(i);
        }
        if (targets[static_cast<std::size_t>(pair[0])].t > targets[static_cast<std::size_t>(pair[1])].t) {
            throw ConfigError("covariance pairs must list the earlier time first");
        }
    }
    for (const auto& list : joint_moments) {
        if (list.empty() || list.size() > 6) {
            throw ConfigError("joint moments take between 1 and 6 targets");
        }
        for (int i : list) {
            check_index(i);
        }
    }
}

ExperimentConfig config_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const std::set<std::string> known{"model",    "n",    "bn",      "entries",   "targets",
                                             "covariances", "joint_moments", "replicas", "seed",
                                             "workers",  "threshold", "relative_tolerance", "output"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    ExperimentConfig c;
    try {
        const std::string model = doc.value("model", std::string("B"));
        if (model != "A" && model != "B") {
            throw ConfigError("model must be \"A\" or \"B\"");
        }
        c.model = model == "A" ? Model::A : Model::B;
        c.n = doc.value("n", c.n);
        c.bn = doc.value("bn", c.bn);
        std::string family = "gaussian";
        double kappa = 3.0;
        if (doc.contains("entries")) {
            const auto& e = doc.at("entries");
            family = e.value("family", family);
            kappa = e.value("kappa", kappa);
        }
        c.entries = EntryModel::from_name(family, kappa, c.model);
        for (const auto& t : doc.value("targets", json::array())) {
            c.targets.push_back({t.at("p").get<int>(), t.at("t").get<double>()});
        }
        c.covariances = doc.value("covariances", c.covariances);
        c.joint_moments = doc.value("joint_moments", c.joint_moments);
        c.replicas = doc.value("replicas", c.replicas);
        c.seed = doc.value("seed", c.seed);
        c.workers = doc.value("workers", c.workers);
        c.threshold = doc.value("threshold", c.threshold);
        c.relative_tolerance = doc.value("relative_tolerance", c.relative_tolerance);
        c.output = doc.value("output", c.output);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig c = config_from_json(buf.str());
    if (c.output.empty()) {
        c.output = (path.parent_path() / (path.stem().string() + "_results.csv")).string();
    }
    return c;
}

std::string config_to_json(const ExperimentConfig& c)
{
    json doc;
    doc["model"] = model_name(c.model);
    doc["n"] = c.n;
    doc["bn"] = c.bn;
    doc["entries"] = {{"family", c.entries.family_name()}, {"kappa", c.entries.kappa}};
    doc["targets"] = json::array();
    for (const auto& t : c.targets) {
        doc["targets"].push_back({{"p", t.p}, {"t", t.t}});
    }
    doc["covariances"] = c.covariances;
    doc["joint_moments"] = c.joint_moments;
    doc["replicas"] = c.replicas;
    doc["seed"] = c.seed;
    doc["workers"] = c.workers;
    doc["threshold"] = c.threshold;
    doc["relative_tolerance"] = c.relative_tolerance;
    doc["output"] = c.output;
    return doc.dump(2);
}

bool EstimateResult::passes(double threshold, double rel_tol) const
{
    if (!theory) {
        return true;
    }
    const double allowed = std::max(threshold * stderr_, rel_tol * std::abs(*theory));
    return std::abs(estimate - *theory) <= allowed;
}

OmegaTable simulate_omegas(const ExperimentConfig& config)
{
    const auto start = std::chrono::steady_clock::now();
    if (config.replicas < 2) {
        throw std::invalid_argument("simulation needs at least 2 replicas");
    }
    OmegaTable table;
    table.targets = config.targets;
    const std::vector<double> times = distinct_times(config.targets);
    // Highest power needed at each distinct time.
    std::vector<int> max_power(times.size(), 0);
    for (const auto& t : config.targets) {
        const auto slot = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t.t) - times.begin());
        max_power[slot] = std::max(max_power[slot], t.p);
    }
    int lags = config.bn;
    if (config.model == Model::A) {
        lags = 0;
        for (double t : times) {
            lags = std::max(lags, scaled_bandwidth(config.bn, t));
        }
    }
    EntryModel entries = config.entries;
    entries.mode = config.model;

    const auto R = static_cast<std::size_t>(config.replicas);
    std::vector<std::vector<double>> per_time(times.size() * R);
    parallel_for(config.replicas, config.workers, [&](int r) {
        const SamplePath path = sample_path(entries, lags, times, config.seed, static_cast<std::uint64_t>(r));
        for (std::size_t m = 0; m < times.size(); ++m) {
            const BandMatrix mat = build_matrix({config.n, config.bn, times[m], config.model}, path);
            per_time[m * R + static_cast<std::size_t>(r)] = trace_powers(mat, max_power[m]);
        }
    });

    for (const auto& t : config.targets) {
        const auto slot = static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t.t) - times.begin());
        std::vector<double> traces(R);
        for (std::size_t r = 0; r < R; ++r) {
            traces[r] = per_time[slot * R + r][static_cast<std::size_t>(t.p - 1)];
        }
        table.omegas.push_back(omega_statistics(traces, config.n, config.bn));
        table.traces.push_back(std::move(traces));
    }
    table.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return table;
}

double Jackknife::stderr_() const
{
    const auto m = static_cast<double>(leave_one_out.size());
    if (m < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (double x : leave_one_out) {
        mean += x;
    }
    mean /= m;
    double ss = 0.0;
    for (double x : leave_one_out) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt((m - 1.0) / m * ss);
}

Jackknife jackknife_centered_moment(std::span<const std::vector<double>> columns, bool unbiased)
{
    if (columns.empty()) {
        throw std::invalid_argument("jackknife needs at least one column");
    }
    const std::size_t R = columns.front().size();
    for (const auto& c : columns) {
        if (c.size() != R) {
            throw std::invalid_argument("jackknife columns must have equal length");
        }
    }
    if (R < 3) {
        throw std::invalid_argument("jackknife needs at least 3 replicas");
    }
    const std::size_t k = columns.size();
    std::vector<double> sums(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (double x : columns[i]) {
            sums[i] += x;
        }
    }
    const double shift = unbiased ? 1.0 : 0.0;
    auto moment = [&](std::size_t skip, const std::vector<double>& means, double count) {
        double acc = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
            if (r == skip) {
                continue;
            }
            double prod = 1.0;
            for (std::size_t i = 0; i < k; ++i) {
                prod *= columns[i][r] - means[i];
            }
            acc += prod;
        }
        return acc / (count - shift);
    };
    Jackknife out;
    std::vector<double> means(k);
    for (std::size_t i = 0; i < k; ++i) {
        means[i] = sums[i] / static_cast<double>(R);
    }
    out.estimate = moment(R, means, static_cast<double>(R));
    out.leave_one_out.resize(R);
    for (std::size_t s = 0; s < R; ++s) {
        for (std::size_t i = 0; i < k; ++i) {
            means[i] = (sums[i] - columns[i][s]) / static_cast<double>(R - 1);
        }
        out.leave_one_out[s] = moment(s, means, static_cast<double>(R - 1));
    }
    return out;
}

namespace {

void attach_theory(EstimateResult& res, std::optional<double> theory, std::optional<double> exact)
{
    res.theory = theory;
    res.theory_exact = exact;
    if (!theory) {
        return;
    }
    const double diff = res.estimate - *theory;
    if (res.stderr_ > 0.0) {
        res.z = diff / res.stderr_;
    } else {
        res.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
}

EstimateResult base_result(const ExperimentConfig& config, const OmegaTable& table, std::span<const int> indices)
{
    EstimateResult res;
    res.model = config.model;
    res.n = config.n;
    res.bn = config.bn;
    res.kappa = config.entries.kappa;
    res.replicas = config.replicas;
    res.seed = config.seed;
    res.wall_seconds = table.wall_seconds;
    for (int i : indices) {
        const auto& t = table.targets.at(static_cast<std::size_t>(i));
        res.powers.push_back(t.p);
        res.times.push_back(t.t);
    }
    if (config.model == Model::A && static_cast<double>(config.bn) / config.n > 0.05) {
        res.warning = "bn/n = " + fmt("%.3g", static_cast<double>(config.bn) / config.n) +
                      " is not small; the b = 0 closed forms may not apply";
    }
    return res;
}

std::optional<double> wick_theory(const ExperimentConfig& config, std::span<const TimedPower> targets, bool exact)
{
    for (const auto& t : targets) {
        if (t.p < 2) {
            return 0.0; // tr M = 0, so omega_1 vanishes identically
        }
    }
    return wick_joint_prediction(targets, config.model, 0.0, config.entries.kappa, exact);
}

} // namespace

EstimateResult covariance_result(const ExperimentConfig& config, const OmegaTable& table, int i, int j)
{
    const int idx[2] = {i, j};
    EstimateResult res = base_result(config, table, idx);
    const std::vector<double> cols[2] = {table.omegas.at(static_cast<std::size_t>(i)),
                                         table.omegas.at(static_cast<std::size_t>(j))};
    const Jackknife jk = jackknife_centered_moment(cols, true);
    res.estimate = jk.estimate;
    res.stderr_ = jk.stderr_();
    const TimedPower pair[2] = {table.targets[static_cast<std::size_t>(i)], table.targets[static_cast<std::size_t>(j)]};
    res.label = "cov(omega_" + std::to_string(pair[0].p) + "(" + fmt("%.12g", pair[0].t) + "), omega_" +
                std::to_string(pair[1].p) + "(" + fmt("%.12g", pair[1].t) + "))";
    attach_theory(res, wick_theory(config, pair, false), wick_theory(config, pair, true));
    return res;
}

EstimateResult joint_moment_result(const ExperimentConfig& config, const OmegaTable& table,
                                   std::span<const int> indices)
{
    if (indices.empty() || indices.size() > 6) {
        throw std::invalid_argument("joint moments take between 1 and 6 targets");
    }
    EstimateResult res = base_result(config, table, indices);
    std::vector<std::vector<double>> cols;
    std::vector<TimedPower> targets;
    res.label = "E[";
    for (int i : indices) {
        cols.push_back(table.omegas.at(static_cast<std::size_t>(i)));
        const auto& t = table.targets[static_cast<std::size_t>(i)];
        targets.push_back(t);
        res.label += (targets.size() > 1 ? " " : "") + std::string("omega_") + std::to_string(t.p) + "(" +
                     fmt("%.12g", t.t) + ")";
    }
    res.label += "]";
    if (cols.size() == 1) {
        // A single centred statistic has sample mean exactly 0.
        res.estimate = 0.0;
        res.stderr_ = 0.0;
    } else {
        const Jackknife jk = jackknife_centered_moment(cols, cols.size() == 2);
        res.estimate = jk.estimate;
        res.stderr_ = jk.stderr_();
    }
    attach_theory(res, wick_theory(config, targets, false), wick_theory(config, targets, true));
    return res;
}

EstimateResult estimate_covariance(const ExperimentConfig& config, TimedPower first, TimedPower second)
{
    if (first.t > second.t) {
        throw std::invalid_argument("estimate_covariance needs t1 <= t2");
    }
    ExperimentConfig c = config;
    c.targets = {first, second};
    c.covariances = {{0, 1}};
    c.joint_moments.clear();
    c.validate();
    const OmegaTable table = simulate_omegas(c);
    return covariance_result(c, table, 0, 1);
}

EstimateResult estimate_joint_moment(const ExperimentConfig& config, std::span<const TimedPower> targets)
{
    if (targets.empty() || targets.size() > 6) {
        throw std::invalid_argument("joint moments take between 1 and 6 targets");
    }
    ExperimentConfig c = config;
    c.targets.assign(targets.begin(), targets.end());
    c.covariances.clear();
    std::vector<int> idx(targets.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = static_cast<int>(i);
    }
    c.joint_moments = {idx};
    c.validate();
    const OmegaTable table = simulate_omegas(c);
    return joint_moment_result(c, table, idx);
}

namespace {

struct LagProfile {
    std::vector<int> lags;   // distinct |j|
    std::vector<int> counts; // multiplicity per distinct lag
    double boundary = 0.0;   // rows keeping the path inside [1, n], divided by n
};

LagProfile profile(const BalancedVector& v, int n)
{
    LagProfile out;
    std::map<int, int> m;
    int partial = 0;
    int lo = 0;
    int hi = 0;
    for (int x : v.components()) {
        ++m[std::abs(x)];
        partial += x;
        lo = std::min(lo, partial);
        hi = std::max(hi, partial);
    }
    for (const auto& [lag, c] : m) {
        out.lags.push_back(lag);
        out.counts.push_back(c);
    }
    out.boundary = static_cast<double>(std::max(0, n - (hi - lo))) / n;
    return out;
}

int count_of(const LagProfile& prof, int lag)
{
    for (std::size_t i = 0; i < prof.lags.size(); ++i) {
        if (prof.lags[i] == lag) {
            return prof.counts[i];
        }
    }
    return 0;
}

} // namespace

CommutativityReport commutativity_check(const ExperimentConfig& config, int p, int q, double t1, double t2,
                                        const WorkCap& cap)
{
    if (config.model != Model::B) {
        throw std::invalid_argument("commutativity_check needs model B");
    }
    if (p < 2 || q < 2) {
        throw std::invalid_argument("commutativity_check needs p, q >= 2");
    }
    if (!(t1 > 0.0) || t1 > t2) {
        throw std::invalid_argument("commutativity_check needs 0 < t1 <= t2");
    }
    if (config.n < 2 || config.bn < 1 || config.bn > config.n - 1 || config.replicas < 3) {
        throw std::invalid_argument("commutativity_check needs 1 <= bn < n and at least 3 replicas");
    }
    CommutativityReport rep;
    rep.p = p;
    rep.q = q;
    rep.t1 = t1;
    rep.t2 = t2;
    rep.n = config.n;
    rep.bn = config.bn;
    rep.replicas = config.replicas;
    rep.seed = config.seed;

    // Exact side: Gaussian u ~ N(0, t1) and v ~ N(0, t2 - t1), independent per lag.
    const int b = config.bn;
    const auto js = balanced_vectors(p, b, cap);
    const auto jps = balanced_vectors(q, b, cap);
    require_within_cap(static_cast<std::uint64_t>(js.size()) * jps.size(), cap.vector_pairs,
                       "commutativity index pairs");
    std::vector<LagProfile> pj;
    std::vector<LagProfile> pjp;
    for (const auto& v : js) {
        pj.push_back(profile(v, config.n));
    }
    for (const auto& v : jps) {
        pjp.push_back(profile(v, config.n));
    }
    const double dv = t2 - t1;
    auto mixed_moment = [&](int alpha, int beta) {
        // E[u^alpha (u + v)^beta]
        double s = 0.0;
        for (int k = 0; k <= beta; ++k) {
            s += static_cast<double>(binomial(beta, k)) * gaussian_moment(t1, alpha + k) *
                 gaussian_moment(dv, beta - k);
        }
        return s;
    };
    const double norm = std::pow(static_cast<double>(b), -(p + q) / 2.0 + 1.0);
    rep.exact_terms.assign(static_cast<std::size_t>(q) + 1, 0.0);
    double direct = 0.0;
    for (std::size_t a = 0; a < js.size(); ++a) {
        const LagProfile& x = pj[a];
        double eu = 1.0;
        for (int c : x.counts) {
            eu *= gaussian_moment(t1, c);
        }
        for (std::size_t c = 0; c < jps.size(); ++c) {
            const LagProfile& y = pjp[c];
            bool shared = false;
            for (int lag : x.lags) {
                shared = shared || count_of(y, lag) > 0;
            }
            if (!shared) {
                continue; // independent words
            }
            // Direct covariance with boundary counts.
            double joint = 1.0;
            double ew = 1.0;
            for (std::size_t i = 0; i < y.lags.size(); ++i) {
                joint *= mixed_moment(count_of(x, y.lags[i]), y.counts[i]);
                ew *= gaussian_moment(t2, y.counts[i]);
            }
            for (std::size_t i = 0; i < x.lags.size(); ++i) {
                if (count_of(y, x.lags[i]) == 0) {
                    joint *= gaussian_moment(t1, x.counts[i]);
                }
            }
            direct += (joint - eu * ew) * x.boundary * y.boundary;

            // Decomposition: first r letters of J' from u, the rest from v.
            const auto& jp = jps[c].components();
            for (int r = 0; r <= q; ++r) {
                std::map<int, std::pair<int, int>> uv; // lag -> (u count in J', v count)
                for (int i = 0; i < q; ++i) {
                    auto& slot = uv[std::abs(jp[static_cast<std::size_t>(i)])];
                    (i < r ? slot.first : slot.second) += 1;
                }
                double joint_r = 1.0;
                double second = 1.0;
                for (const auto& [lag, cnt] : uv) {
                    joint_r *= gaussian_moment(t1, count_of(x, lag) + cnt.first) * gaussian_moment(dv, cnt.second);
                    second *= gaussian_moment(t1, cnt.first) * gaussian_moment(dv, cnt.second);
                }
                for (std::size_t i = 0; i < x.lags.size(); ++i) {
                    if (!uv.count(x.lags[i])) {
                        joint_r *= gaussian_moment(t1, x.counts[i]);
                    }
                }
                rep.exact_terms[static_cast<std::size_t>(r)] +=
                    static_cast<double>(binomial(q, r)) * (joint_r - eu * second);
            }
        }
    }
    rep.exact_direct = norm * direct;
    for (auto& term : rep.exact_terms) {
        term *= norm;
        rep.exact_decomposed += term;
    }
    rep.exact_difference = rep.exact_direct - rep.exact_decomposed;

    // Monte Carlo side on shared replicas.
    const auto R = static_cast<std::size_t>(config.replicas);
    std::vector<double> times{t1};
    if (t2 > t1) {
        times.push_back(t2);
    }
    std::vector<double> tr_p(R), tr_q(R), sym_p(R), sym_q(R);
    parallel_for(config.replicas, config.workers, [&](int r) {
        const SamplePath path =
            sample_path(EntryModel::gaussian(Model::B), b, times, config.seed, static_cast<std::uint64_t>(r));
        const auto& early = path.at_time(t1);
        const auto& late = path.at_time(t2);
        const auto i = static_cast<std::size_t>(r);
        const double scale = 1.0 / std::sqrt(static_cast<double>(b));
        tr_p[i] = trace_powers(toeplitz_band(config.n, early, b, scale), p).back();
        tr_q[i] = trace_powers(toeplitz_band(config.n, late, b, scale), q).back();
        sym_p[i] = config.n * std::pow(scale, p) * symbol_constant_term(early, b, p);
        sym_q[i] = config.n * std::pow(scale, q) * symbol_constant_term(late, b, q);
    });
    const std::vector<double> direct_cols[2] = {omega_statistics(tr_p, config.n, b),
                                                omega_statistics(tr_q, config.n, b)};
    const std::vector<double> decomposed_cols[2] = {omega_statistics(sym_p, config.n, b),
                                                    omega_statistics(sym_q, config.n, b)};
    const Jackknife jd = jackknife_centered_moment(direct_cols, true);
    const Jackknife jc = jackknife_centered_moment(decomposed_cols, true);
    Jackknife diff;
    diff.estimate = jd.estimate - jc.estimate;
    for (std::size_t i = 0; i < R; ++i) {
        diff.leave_one_out.push_back(jd.leave_one_out[i] - jc.leave_one_out[i]);
    }
    rep.mc_direct = jd.estimate;
    rep.mc_decomposed = jc.estimate;
    rep.mc_difference = diff.estimate;
    rep.mc_difference_stderr = diff.stderr_();
    return rep;
}

std::vector<EstimateResult> run_experiment(const ExperimentConfig& config)
{
    config.validate();
    std::vector<std::vector<int>> pairs = config.covariances;
    if (pairs.empty() && config.joint_moments.empty()) {
        for (int i = 0; i < static_cast<int>(config.targets.size()); ++i) {
            for (int j = i; j < static_cast<int>(config.targets.size()); ++j) {
                const bool ordered = config.targets[static_cast<std::size_t>(i)].t <=
                                     config.targets[static_cast<std::size_t>(j)].t;
                pairs.push_back(ordered ? std::vector<int>{i, j} : std::vector<int>{j, i});
            }
        }
    }
    std::vector<EstimateResult> out;
    if (config.targets.empty()) {
        return out;
    }
    const OmegaTable table = simulate_omegas(config);
    for (const auto& pr : pairs) {
        out.push_back(covariance_result(config, table, pr[0], pr[1]));
    }
    for (const auto& list : config.joint_moments) {
        out.push_back(joint_moment_result(config, table, list));
    }
    return out;
}

namespace {

std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i ? ";" : "") + parts[i];
    }
    return out;
}

std::string opt17(const std::optional<double>& x) { return x ? fmt("%.17g", *x) : std::string(); }

} // namespace

std::string results_csv(std::span<const EstimateResult> results)
{
    std::string out = "model,p,q,t1,t2,n,b_n,kappa,replicas,estimate,stderr,theory,z,seed\n";
    for (const auto& r : results) {
        std::string p, q, t1, t2;
        if (r.powers.size() == 2) {
            p = std::to_string(r.powers[0]);
            q = std::to_string(r.powers[1]);
            t1 = fmt("%.12g", r.times[0]);
            t2 = fmt("%.12g", r.times[1]);
        } else {
            std::vector<std::string> ps, ts;
            for (std::size_t i = 0; i < r.powers.size(); ++i) {
                ps.push_back(std::to_string(r.powers[i]));
                ts.push_back(fmt("%.12g", r.times[i]));
            }
            p = join(ps);
            t1 = join(ts);
        }
        out += model_name(r.model) + "," + p + "," + q + "," + t1 + "," + t2 + "," + std::to_string(r.n) + "," +
               std::to_string(r.bn) + "," + fmt("%.12g", r.kappa) + "," + std::to_string(r.replicas) + "," +
               fmt("%.17g", r.estimate) + "," + fmt("%.17g", r.stderr_) + "," + opt17(r.theory) + "," +
               (r.theory ? fmt("%.17g", r.z) : std::string()) + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

std::string results_json(std::span<const EstimateResult> results)
{
    json arr = json::array();
    for (const auto& r : results) {
        json o;
        o["label"] = r.label;
        o["model"] = model_name(r.model);
        o["powers"] = r.powers;
        o["times"] = r.times;
        o["n"] = r.n;
        o["b_n"] = r.bn;
        o["kappa"] = r.kappa;
        o["replicas"] = r.replicas;
        o["estimate"] = r.estimate;
        o["stderr"] = r.stderr_;
        o["theory"] = r.theory ? json(*r.theory) : json(nullptr);
        o["theory_exact"] = r.theory_exact ? json(*r.theory_exact) : json(nullptr);
        o["z"] = r.theory && std::isfinite(r.z) ? json(r.z) : json(nullptr);
        o["seed"] = r.seed;
        o["wall_seconds"] = r.wall_seconds;
        if (!r.warning.empty()) {
            o["warning"] = r.warning;
        }
        arr.push_back(std::move(o));
    }
    return arr.dump(2);
}

int run_suite(const std::filesystem::path& config_path, std::ostream& diag)
{
    ExperimentConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        diag << "configuration error: " << e.what() << "\n";
        return 2;
    }
    const std::vector<EstimateResult> results = run_experiment(config);
    std::filesystem::path csv_path(config.output);
    std::ofstream csv(csv_path);
    std::ofstream js(std::filesystem::path(csv_path).replace_extension(".json"));
    if (!csv || !js) {
        diag << "configuration error: cannot write results to " << csv_path.string() << "\n";
        return 2;
    }
    csv << results_csv(results);
    js << results_json(results) << "\n";
    bool ok = true;
    for (const auto& r : results) {
        if (!r.passes(config.threshold, config.relative_tolerance)) {
            diag << "FAIL " << r.label << ": estimate " << fmt("%.6g", r.estimate) << " +- "
                 << fmt("%.3g", r.stderr_) << " vs theory " << fmt("%.6g", r.theory.value_or(0.0)) << "\n";
            ok = false;
        }
        if (!r.warning.empty()) {
            diag << "warning: " << r.warning << "\n";
        }
    }
    return ok ? 0 : 1;
}

} // namespace tfluct

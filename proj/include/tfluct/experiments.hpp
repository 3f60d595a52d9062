#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfluct/ensembles.hpp"
#include "tfluct/theory.hpp"

namespace tfluct {

/// Invalid experiment configuration (maps to exit status 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    Model model = Model::B;
    int n = 4096;
    int bn = 64;
    EntryModel entries = EntryModel::gaussian();
    std::vector<TimedPower> targets;
    /// Index pairs into targets. Empty, with no joint moments either, means every pair i <= j.
    std::vector<std::vector<int>> covariances;
    /// Index lists into targets, at most 6 each.
    std::vector<std::vector<int>> joint_moments;
    int replicas = 2000;
    std::uint64_t seed = 1;
    int workers = 1; // 0 picks the hardware concurrency
    double threshold = 3.0;
    double relative_tolerance = 0.1;
    std::string output; // CSV path; the JSON report goes next to it

    /// Throws ConfigError on any violated precondition.
    void validate() const;
};

/// Reads the JSON form. Throws ConfigError on malformed input.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

struct EstimateResult {
    std::string label;
    Model model = Model::B;
    std::vector<int> powers;
    std::vector<double> times;
    int n = 0;
    int bn = 0;
    double kappa = 3.0;
    int replicas = 0;
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::optional<double> theory;
    /// Theory with exact slice volumes, when it differs from `theory`'s source.
    std::optional<double> theory_exact;
    double z = 0.0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    std::string warning;

    /// |estimate - theory| <= max(threshold * stderr, rel_tol * |theory|).
    bool passes(double threshold, double rel_tol) const;
};

/// Per-target traces and fluctuation statistics across replicas.
struct OmegaTable {
    std::vector<TimedPower> targets;
    std::vector<std::vector<double>> traces; // [target][replica]
    std::vector<std::vector<double>> omegas; // [target][replica]
    double wall_seconds = 0.0;
};

/// Samples every replica (in parallel, bit-identical for any worker count)
/// and computes traces of the requested powers.
OmegaTable simulate_omegas(const ExperimentConfig& config);

struct Jackknife {
    double estimate = 0.0;
    std::vector<double> leave_one_out;

    double stderr_() const;
};

/// Mean of prod_i (x_i - mean x_i) with every column re-centred, divided by
/// R - 1 when `unbiased` (sample covariance) and by R otherwise, plus its
/// leave-one-out replicates.
Jackknife jackknife_centered_moment(std::span<const std::vector<double>> columns, bool unbiased);

/// Covariance of two rows of `table`.
EstimateResult covariance_result(const ExperimentConfig& config, const OmegaTable& table, int i, int j);
EstimateResult joint_moment_result(const ExperimentConfig& config, const OmegaTable& table,
                                   std::span<const int> indices);

/// Sample covariance of omega_p(t1) and omega_q(t2); requires t1 <= t2.
EstimateResult estimate_covariance(const ExperimentConfig& config, TimedPower first, TimedPower second);

/// Sample mean of prod omega_{p_i}(t_i); r <= 6.
EstimateResult estimate_joint_moment(const ExperimentConfig& config, std::span<const TimedPower> targets);

struct CommutativityReport {
    int p = 2;
    int q = 2;
    double t1 = 1.0;
    double t2 = 2.0;
    int n = 0;
    int bn = 0;
    // Exhaustive Gaussian-moment sums.
    double exact_direct = 0.0;
    double exact_decomposed = 0.0;
    std::vector<double> exact_terms; // index r = 0..q
    double exact_difference = 0.0;
    // Monte Carlo on shared replicas.
    double mc_direct = 0.0;
    double mc_decomposed = 0.0;
    double mc_difference = 0.0;
    double mc_difference_stderr = 0.0;
    int replicas = 0;
    std::uint64_t seed = 0;
};

/// Compares the finite-n covariance E[omega_p(t1) omega_q(t2)] of model B
/// with the binomial split into u-words (a(t1)) and v-words (a(t2) - a(t1))
/// summed without boundary counts. Needs model B and t1 <= t2. The exact
/// side visits every pair of balanced index vectors (cap.vector_pairs).
CommutativityReport commutativity_check(const ExperimentConfig& config, int p, int q, double t1, double t2,
                                        const WorkCap& cap = default_work_cap());

/// Estimates for every covariance and joint moment in the config.
std::vector<EstimateResult> run_experiment(const ExperimentConfig& config);

std::string results_csv(std::span<const EstimateResult> results);
std::string results_json(std::span<const EstimateResult> results);

/// Loads, runs, writes CSV (and JSON beside it) to the configured output.
/// Returns 0 when every result passes, 1 on any failure, 2 on a
/// configuration error (diagnostic written to `diag`).
int run_suite(const std::filesystem::path& config_path, std::ostream& diag);

std::string model_name(Model model);

} // namespace tfluct

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tfluct/ensembles.hpp"
#include "tfluct/integrals.hpp"

namespace tfluct {

struct CovarianceQuery {
    Model model = Model::A;
    int p = 2;
    int q = 2;
    double t1 = 1.0;
    double t2 = 1.0;
    double b = 0.0;     // model A only
    double kappa = 3.0; // model A only
};

/// Limiting covariance of the model-A fluctuations at b = 0.
/// Requires p, q >= 2 and 0 < t1 <= t2; mixed parity gives 0.
double cov_model_a_b0(int p, int q, double t1, double t2, double kappa);

/// Same sum with every type-I integral replaced by f_type1_exact_b0.
double cov_model_a_b0_exact(int p, int q, double t1, double t2, double kappa);

/// Model A covariance for any b in [0, 1]. At b = 0 the closed forms are
/// returned with zero stderr; for b > 0 every integral is estimated with
/// `budget` samples and the stderrs are pooled. Requires p + q <= 12.
McEstimate cov_model_a_general(const CovarianceQuery& query, std::uint64_t budget, std::uint64_t seed = 1);

/// cov_model_a_general at p = q, t1 = t2 = 1.
McEstimate sigma2(int p, double kappa, double b, std::uint64_t budget, std::uint64_t seed = 1);

/// Limiting covariance of the model-B fluctuations; (p, t1) is the earlier time.
double cov_model_b(int p, int q, double t1, double t2);

/// Model B decomposition with the exact type-I slice volumes.
double cov_model_b_exact(int p, int q, double t1, double t2);

struct TimedPower {
    int p = 2;
    double t = 1.0;
};

/// Covariance of two fluctuations in either time order.
double pair_covariance(Model model, TimedPower x, TimedPower y, double kappa, bool exact = false);

/// Wick prediction for E[omega_{p_1}(t_1) ... omega_{p_r}(t_r)] at b = 0.
double wick_joint_prediction(std::span<const TimedPower> targets, Model model, double b, double kappa,
                             bool exact = false);

/// One monomial of a closed-form covariance:
/// coefficient * (kappa - 1)^{kappa_power} * t1^{t1_power} * t2^{t2_power} * (t2 - t1)^{gap_power}.
struct CovarianceTerm {
    std::int64_t coefficient = 0;
    int kappa_power = 0;
    int t1_power = 0;
    int t2_power = 0;
    int gap_power = 0;

    std::string to_string() const;
};

std::vector<CovarianceTerm> cov_model_a_b0_terms(int p, int q);
std::vector<CovarianceTerm> cov_model_b_terms(int p, int q);

} // namespace tfluct

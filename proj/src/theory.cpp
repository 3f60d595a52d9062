#include "tfluct/theory.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

#include "tfluct/combinatorics.hpp"

namespace tfluct {

namespace {

void check_powers(int p, int q)
{
    if (p < 2 || q < 2) {
        throw std::invalid_argument("covariance needs p, q >= 2");
    }
}

void check_times(double t1, double t2)
{
    if (!(t1 > 0.0) || !std::isfinite(t2)) {
        throw std::invalid_argument("times must be positive and finite");
    }
    if (t1 > t2) {
        throw std::invalid_argument("covariance needs t1 <= t2; pass the earlier time first");
    }
}

bool same_parity(int p, int q) { return (p - q) % 2 == 0; }

double ipow(double x, int e) { return e == 0 ? 1.0 : std::pow(x, e); }

// Model-B coefficient of t1^{(p+r)/2} after factoring out the increments:
// the model-A sum at t1 = t2 = 1 and kappa = 3 with exact slice volumes.
double model_b_block_exact(int p, int r) { return cov_model_a_b0_exact(p, r, 1.0, 1.0, 3.0); }

} // namespace

double cov_model_a_b0(int p, int q, double t1, double t2, double kappa)
{
    check_powers(p, q);
    check_times(t1, t2);
    if (!same_parity(p, q)) {
        return 0.0;
    }
    const int half = (p + q) / 2;
    const double scale = ipow(2.0, half);
    double sum = 0.0;
    for (int k = p % 2 == 1 ? 3 : 4; k <= std::min(p, q); k += 2) {
        sum += static_cast<double>(r1(p, q, k)) * ipow(t1, (p + k) / 2 - 1) * ipow(t2, (q - k) / 2) * scale;
    }
    if (p % 2 == 0) {
        sum += (kappa - 1.0) * static_cast<double>(r2(p, q)) * ipow(t1, p / 2) * ipow(t2, q / 2 - 1) * scale;
    }
    return sum;
}

double cov_model_a_b0_exact(int p, int q, double t1, double t2, double kappa)
{
    check_powers(p, q);
    check_times(t1, t2);
    if (!same_parity(p, q)) {
        return 0.0;
    }
    double sum = 0.0;
    for (int k = p % 2 == 1 ? 3 : 4; k <= std::min(p, q); k += 2) {
        sum += static_cast<double>(r1(p, q, k)) * 2.0 * f_type1_exact_b0(p, q, k, t1, t2);
    }
    if (p % 2 == 0) {
        sum += (kappa - 1.0) * static_cast<double>(r2(p, q)) * 2.0 * f_type2_closed(p, q, t1, t2);
    }
    return sum;
}

McEstimate cov_model_a_general(const CovarianceQuery& query, std::uint64_t budget, std::uint64_t seed)
{
    if (query.model != Model::A) {
        throw std::invalid_argument("cov_model_a_general needs a model-A query");
    }
    check_powers(query.p, query.q);
    check_times(query.t1, query.t2);
    if (!(query.b >= 0.0 && query.b <= 1.0)) {
        throw std::invalid_argument("b must lie in [0, 1]");
    }
    if (query.p + query.q > 12) {
        throw WorkCapExceeded("cov_model_a_general supports p + q <= 12");
    }
    if (query.b > 0.0 && query.t2 >= 1.0 / query.b) {
        throw std::invalid_argument("times must lie in (0, 1/b)");
    }
    if (!same_parity(query.p, query.q)) {
        return {0.0, 0.0, 0};
    }
    if (query.b == 0.0) {
        return {cov_model_a_b0(query.p, query.q, query.t1, query.t2, query.kappa), 0.0, 0};
    }

    McEstimate total;
    double variance = 0.0;
    std::uint64_t term = 0;
    auto add = [&](const McEstimate& e, double weight) {
        total.estimate += weight * e.estimate;
        variance += weight * weight * e.stderr_ * e.stderr_;
        total.samples += e.samples;
    };
    auto term_seed = [&] { return seed * 0x9E3779B97F4A7C15ull + (++term); };

    for (const auto& pi : enumerate_class({query.p, query.q, 3})) {
        for (Sign sign : {Sign::Minus, Sign::Plus}) {
            IntegralQuery iq{pi, query.p, query.q, query.t1, query.t2, query.b, sign};
            add(f_type1_numeric(iq, budget, term_seed()), 1.0);
        }
    }
    if (query.p % 2 == 0 && query.kappa != 1.0) {
        for (const auto& pi : enumerate_p24(query.p, query.q)) {
            for (Sign sign : {Sign::Minus, Sign::Plus}) {
                IntegralQuery iq{pi, query.p, query.q, query.t1, query.t2, query.b, sign};
                add(f_type2_numeric(iq, budget, term_seed()), query.kappa - 1.0);
            }
        }
    }
    total.stderr_ = std::sqrt(variance);
    return total;
}

McEstimate sigma2(int p, double kappa, double b, std::uint64_t budget, std::uint64_t seed)
{
    return cov_model_a_general({Model::A, p, p, 1.0, 1.0, b, kappa}, budget, seed);
}

double cov_model_b(int p, int q, double t1, double t2)
{
    check_powers(p, q);
    check_times(t1, t2);
    if (!same_parity(p, q)) {
        return 0.0;
    }
    const double scale = ipow(2.0, (p + q) / 2);
    const bool even = p % 2 == 0;
    double sum = 0.0;
    for (int r = even ? 2 : 3; r <= q; r += 2) {
        const double coeff = static_cast<double>(even ? r3(p, r) : r4(p, r));
        sum += static_cast<double>(binomial(q, r)) * ipow(t1, (p + r) / 2) * coeff *
               static_cast<double>(double_factorial(q - r - 1)) * ipow(t2 - t1, (q - r) / 2) * scale;
    }
    return sum;
}

double cov_model_b_exact(int p, int q, double t1, double t2)
{
    check_powers(p, q);
    check_times(t1, t2);
    if (!same_parity(p, q)) {
        return 0.0;
    }
    const bool even = p % 2 == 0;
    double sum = 0.0;
    for (int r = even ? 2 : 3; r <= q; r += 2) {
        sum += static_cast<double>(binomial(q, r)) * ipow(t1, (p + r) / 2) * model_b_block_exact(p, r) *
               static_cast<double>(double_factorial(q - r - 1)) * ipow(2.0 * (t2 - t1), (q - r) / 2);
    }
    return sum;
}

double pair_covariance(Model model, TimedPower x, TimedPower y, double kappa, bool exact)
{
    if (x.t > y.t) {
        std::swap(x, y);
    }
    if (model == Model::A) {
        return exact ? cov_model_a_b0_exact(x.p, y.p, x.t, y.t, kappa) : cov_model_a_b0(x.p, y.p, x.t, y.t, kappa);
    }
    return exact ? cov_model_b_exact(x.p, y.p, x.t, y.t) : cov_model_b(x.p, y.p, x.t, y.t);
}

double wick_joint_prediction(std::span<const TimedPower> targets, Model model, double b, double kappa, bool exact)
{
    if (b != 0.0) {
        throw std::invalid_argument("Wick predictions are available at b = 0 only");
    }
    const auto r = static_cast<Eigen::Index>(targets.size());
    if (r == 0) {
        return 1.0;
    }
    if (r % 2 == 1) {
        return 0.0;
    }
    Eigen::MatrixXd cov(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            cov(i, j) = cov(j, i) = pair_covariance(model, targets[static_cast<std::size_t>(i)],
                                                    targets[static_cast<std::size_t>(j)], kappa, exact);
        }
    }
    return wick_sum(cov);
}

std::string CovarianceTerm::to_string() const
{
    std::string out = std::to_string(coefficient);
    if (kappa_power > 0) {
        out += "*(kappa-1)";
    }
    auto factor = [&](const char* name, int e) {
        if (e == 1) {
            out += std::string("*") + name;
        } else if (e > 1) {
            out += std::string("*") + name + "^" + std::to_string(e);
        }
    };
    factor("t1", t1_power);
    factor("t2", t2_power);
    factor("(t2-t1)", gap_power);
    return out;
}

std::vector<CovarianceTerm> cov_model_a_b0_terms(int p, int q)
{
    check_powers(p, q);
    std::vector<CovarianceTerm> terms;
    if (!same_parity(p, q)) {
        return terms;
    }
    const auto scale = static_cast<std::int64_t>(1) << ((p + q) / 2);
    for (int k = p % 2 == 1 ? 3 : 4; k <= std::min(p, q); k += 2) {
        terms.push_back({static_cast<std::int64_t>(r1(p, q, k)) * scale, 0, (p + k) / 2 - 1, (q - k) / 2, 0});
    }
    if (p % 2 == 0) {
        terms.push_back({static_cast<std::int64_t>(r2(p, q)) * scale, 1, p / 2, q / 2 - 1, 0});
    }
    return terms;
}

std::vector<CovarianceTerm> cov_model_b_terms(int p, int q)
{
    check_powers(p, q);
    std::vector<CovarianceTerm> terms;
    if (!same_parity(p, q)) {
        return terms;
    }
    const auto scale = static_cast<std::int64_t>(1) << ((p + q) / 2);
    const bool even = p % 2 == 0;
    for (int r = even ? 2 : 3; r <= q; r += 2) {
        const std::int64_t coeff = static_cast<std::int64_t>(binomial(q, r)) * (even ? r3(p, r) : r4(p, r)) *
                                   static_cast<std::int64_t>(double_factorial(q - r - 1)) * scale;
        terms.push_back({coeff, 0, (p + r) / 2, 0, (q - r) / 2});
    }
    return terms;
}

} // namespace tfluct

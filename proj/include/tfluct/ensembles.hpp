#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tfluct/band_matrix.hpp"
#include "tfluct/work_cap.hpp"

namespace tfluct {

enum class Model { A, B };

enum class EntryFamily { Gaussian, Rademacher, UniformScaled, CustomMoments };

/// Law of the Toeplitz entries a_1, a_2, ... (a_0 = 0, a_{-i} = a_i). Every
/// family is centred with unit variance; kappa is the fourth moment.
/// In Brownian mode the family is ignored: paths are standard Brownian motions.
struct EntryModel {
    EntryFamily family = EntryFamily::Gaussian;
    double kappa = 3.0;
    Model mode = Model::A;

    static EntryModel gaussian(Model mode = Model::A) { return {EntryFamily::Gaussian, 3.0, mode}; }
    static EntryModel rademacher(Model mode = Model::A) { return {EntryFamily::Rademacher, 1.0, mode}; }
    static EntryModel uniform(Model mode = Model::A) { return {EntryFamily::UniformScaled, 1.8, mode}; }
    /// Symmetric three-point law: 0 w.p. 1 - 1/kappa, +-sqrt(kappa) w.p. 1/(2 kappa).
    static EntryModel custom(double kappa, Model mode = Model::A);

    /// Parses "gaussian", "rademacher", "uniform", "custom".
    static EntryModel from_name(const std::string& name, double kappa, Model mode);
    std::string family_name() const;
};

struct MatrixSpec {
    int n = 0;
    int bn = 0;
    double t = 1.0;
    Model model = Model::A;

    /// floor(bn * t) for model A, bn for model B.
    int bandwidth() const;
};

/// floor(bn * t), snapping to the nearest integer when within 1e-9 relative
/// so decimal times do not lose a lag to binary rounding.
int scaled_bandwidth(int bn, double t);

/// Entry values of one replica. values[m][lag] for lag 0..lags, with
/// values[m][0] = 0. Model A has a single row shared by every time; model B
/// has one row per requested time.
struct SamplePath {
    Model model = Model::A;
    std::vector<double> times;
    std::vector<std::vector<double>> values;

    const std::vector<double>& at_time(double t) const;
};

/// Draws one replica. Entry (lag, time index) comes from its own Philox
/// counter keyed by seed, so the result depends on (seed, replica) only.
SamplePath sample_path(const EntryModel& model, int lags, std::span<const double> times, std::uint64_t seed,
                       std::uint64_t replica);

/// (1/sqrt(bn)) (a_{i-j} [|i-j| <= bandwidth]) as a band matrix.
BandMatrix build_matrix(const MatrixSpec& spec, const SamplePath& path);

/// Band Toeplitz matrix from lag coefficients (coeffs[0] on the diagonal).
BandMatrix toeplitz_band(int n, std::span<const double> coeffs, int bandwidth, double scale = 1.0);

/// tr(M^p) by repeated band multiplication.
double trace_power_dense(const BandMatrix& m, int p);

/// tr(M^1), ..., tr(M^max_p) for symmetric M, sharing the powers.
std::vector<double> trace_powers(const BandMatrix& m, int max_p);

/// tr(T_1 ... T_p) by the index-vector summation: sum over J with
/// |j_l| <= b_l and sum j_l = 0 of prod a_{l, j_l} times the number of rows i
/// keeping every partial path inside [1, n]. Coefficient vectors are lag
/// indexed with a_{l,-j} = a_{l,j}.
double trace_product_formula(std::span<const std::vector<double>> entry_vectors, std::span<const int> bandwidths,
                             int n, const WorkCap& cap = default_work_cap());

/// Sum over J in [-bandwidth, bandwidth]^p with zero sum of prod a_{|j_l|}:
/// the trace formula with every boundary count replaced by 1, i.e. the
/// constant Fourier coefficient of the p-th power of the symbol.
double symbol_constant_term(std::span<const double> coeffs, int bandwidth, int p);

/// (sqrt(bn)/n)(tr_r - mean tr) for each replica r.
std::vector<double> omega_statistics(std::span<const double> traces, int n, int bn);

} // namespace tfluct

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Pass `--quick` to shrink the Monte Carlo workloads for a smoke run; the
// verdicts printed then are not the acceptance verdicts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tfluct/cli.hpp"
#include "tfluct/combinatorics.hpp"
#include "tfluct/ensembles.hpp"
#include "tfluct/experiments.hpp"
#include "tfluct/integrals.hpp"
#include "tfluct/rng.hpp"
#include "tfluct/theory.hpp"
#include "tfluct/vectors.hpp"
#include "tfluct/verify.hpp"

using namespace tfluct;

namespace {

// Pinned tolerances.
constexpr double kSigmas = 3.0;
constexpr double kMcRelative = 0.10;        // Monte Carlo covariance and Wick checks
constexpr double kIntegralRelative = 0.01;  // numeric integrals against closed forms
constexpr double kTraceRelative = 1e-9;
constexpr double kIdentityRelative = 1e-12;

// Pinned workloads.
constexpr std::uint64_t kIntegralBudget = 1000000;
constexpr int kReplicas = 2000;
constexpr int kCommutativitySeeds = 10;
constexpr int kCommutativityReplicas = 1000;

// Runtime ceilings in seconds.
constexpr double kLimitCombinatorics = 10.0;
constexpr double kLimitTrace = 30.0;
constexpr double kLimitIntegrals = 120.0;
constexpr double kLimitSimulation = 600.0;
constexpr double kLimitReduction = 60.0;

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;
    void note(const std::string& s) { notes.push_back(s); }
    void require(bool ok, const std::string& s)
    {
        if (!ok) {
            pass = false;
            notes.push_back("violated: " + s);
        }
    }
};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string describe(const EstimateResult& r)
{
    std::string s = r.label + " = " + fmt("%.4g", r.estimate) + " +- " + fmt("%.3g", r.stderr_);
    if (r.theory) {
        s += ", theory " + fmt("%.6g", *r.theory);
    }
    if (r.theory_exact && (!r.theory || *r.theory_exact != *r.theory)) {
        s += " (true slice volumes give " + fmt("%.6g", *r.theory_exact) + ")";
    }
    return s;
}

bool near_zero(const EstimateResult& r) { return std::abs(r.estimate) <= kSigmas * r.stderr_; }

bool quick = false;
int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.pass = false;
        out.note(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) {
        ++failures;
    }
    std::cout << (out.pass ? "PASS" : "FAIL") << "  " << id << ". " << title << " [" << fmt("%.1f", secs) << " s]\n";
    for (const auto& n : out.notes) {
        std::cout << "        " << n << "\n";
    }
    std::cout.flush();
}

double since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ExperimentConfig large_run(Model model, int bn, std::vector<TimedPower> targets, std::uint64_t seed)
{
    ExperimentConfig c;
    c.model = model;
    c.n = quick ? 1024 : 4096;
    c.bn = quick ? bn / 2 : bn;
    c.replicas = quick ? 200 : kReplicas;
    c.seed = seed;
    c.workers = 0;
    c.targets = std::move(targets);
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    for (int i = 1; i < argc; ++i) {
        quick = quick || std::string(argv[i]) == "--quick";
    }
    if (quick) {
        std::cout << "quick mode: reduced workloads, verdicts are indicative only\n";
    }

    criterion(1, "exact combinatorial counts equal closed forms for p, q <= 6", [] {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        const auto rep = verify::enumeration(6);
        const double secs = since(start);
        o.require(rep.passed, "every enumerated count equals its closed form");
        o.require(secs < kLimitCombinatorics, "runtime under 10 s");
        for (const auto& d : rep.details) {
            o.note(d);
        }
        return o;
    });

    criterion(2, "trace formula equals dense traces on 100 random band Toeplitz cases", [] {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        PhiloxStream rng(2, 0xACCE);
        auto pick = [&](int lo, int hi) { return lo + static_cast<int>((hi - lo + 1) * (1.0 - rng.uniform())); };
        double worst = 0.0;
        for (int c = 0; c < 100; ++c) {
            const int n = pick(2, 64);
            const int p = pick(1, 5);
            const int wmax = std::min(6, n - 1);
            std::vector<std::vector<double>> coeffs;
            std::vector<int> widths;
            double dense = 0.0;
            if (c % 2 == 0) {
                // One matrix raised to the p-th power.
                const int w = pick(0, wmax);
                std::vector<double> a(static_cast<std::size_t>(w) + 1);
                for (auto& x : a) {
                    x = rng.uniform(-1.0, 1.0);
                }
                coeffs.assign(static_cast<std::size_t>(p), a);
                widths.assign(static_cast<std::size_t>(p), w);
                dense = trace_power_dense(toeplitz_band(n, a, w), p);
            } else {
                // Mixed bandwidths: dense product of the factors.
                BandMatrix product;
                for (int l = 0; l < p; ++l) {
                    const int w = pick(0, wmax);
                    std::vector<double> a(static_cast<std::size_t>(w) + 1);
                    for (auto& x : a) {
                        x = rng.uniform(-1.0, 1.0);
                    }
                    const BandMatrix m = toeplitz_band(n, a, w);
                    product = l == 0 ? m : multiply(product, m);
                    coeffs.push_back(std::move(a));
                    widths.push_back(w);
                }
                for (int i = 0; i < n; ++i) {
                    dense += product(i, i);
                }
            }
            const double formula = trace_product_formula(coeffs, widths, n);
            worst = std::max(worst, std::abs(formula - dense) / std::max(1.0, std::abs(dense)));
        }
        const double secs = since(start);
        o.note("max relative error " + fmt("%.3g", worst));
        o.require(worst <= kTraceRelative, "relative error <= 1e-9");
        o.require(secs < kLimitTrace, "runtime under 30 s");
        return o;
    });

    criterion(3, "numeric integrals at b = 0 match the closed forms for p + q <= 8", [] {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        const std::uint64_t budget = quick ? 100000 : kIntegralBudget;
        int checked = 0, failed = 0, failed_match_exact = 0;
        std::uint64_t term = 0;
        auto judge = [&](const McEstimate& est, double closed, double exact) {
            ++checked;
            const double tol = std::max(kSigmas * est.stderr_, kIntegralRelative * std::abs(closed));
            if (std::abs(est.estimate - closed) > tol) {
                ++failed;
                const double tol_exact = std::max(kSigmas * est.stderr_, kIntegralRelative * std::abs(exact));
                failed_match_exact += std::abs(est.estimate - exact) <= tol_exact ? 1 : 0;
            }
        };
        for (const auto& [t1, t2] : {std::pair{1.0, 1.0}, std::pair{0.5, 1.0}}) {
            for (int total = 2; total <= 8; total += 2) {
                for (int p = 1; p < total; ++p) {
                    const int q = total - p;
                    for (const auto& pi : enumerate_class({p, q, 1})) {
                        const int k = count_crosses(pi, p);
                        judge(f_type1_numeric({pi, p, q, t1, t2, 0.0, Sign::Minus}, budget, 3000 + (++term)),
                              f_type1_closed(p, q, k, t1, t2), f_type1_exact_b0(p, q, k, t1, t2));
                    }
                    if (p % 2 == 0 && q % 2 == 0) {
                        for (const auto& pi : enumerate_p24(p, q)) {
                            const double closed = f_type2_closed(p, q, t1, t2);
                            judge(f_type2_numeric({pi, p, q, t1, t2, 0.0, Sign::Minus}, budget, 3000 + (++term)),
                                  closed, closed);
                        }
                    }
                }
            }
        }
        const double secs = since(start);
        o.note(std::to_string(checked) + " integrals at budget " + std::to_string(budget) + ", " +
               std::to_string(failed) + " outside max(3 stderr, 1%) of the closed form");
        if (failed > 0) {
            o.note(std::to_string(failed_match_exact) + " of those agree with the true zero-sum slice volume " +
                   "(3 for three crosses, 16/3 for four) instead of 2^(k-1)");
        }
        o.require(failed == 0, "every integral within tolerance of its closed form");
        o.require(secs < kLimitIntegrals, "runtime under 2 min");
        return o;
    });

    // One model B run feeds criteria 4, 5, 7 and 8.
    const auto b_start = std::chrono::steady_clock::now();
    ExperimentConfig model_b = large_run(Model::B, 64, {{2, 1.0}, {3, 1.0}}, 20241);
    OmegaTable b_table;
    std::string b_error;
    try {
        b_table = simulate_omegas(model_b);
    } catch (const std::exception& e) {
        b_error = e.what();
    }
    const double b_secs = since(b_start);
    auto with_b = [&](const std::function<void(Outcome&)>& body) {
        return [&, body] {
            Outcome o;
            if (!b_error.empty()) {
                o.require(false, "model B simulation failed: " + b_error);
                return o;
            }
            body(o);
            return o;
        };
    };

    criterion(4, "model B second-power covariance reproduces 8 t^2", with_b([&](Outcome& o) {
                  const auto r = covariance_result(model_b, b_table, 0, 0);
                  o.note(describe(r) + "; n=" + std::to_string(model_b.n) + " bn=" + std::to_string(model_b.bn) +
                         " replicas=" + std::to_string(model_b.replicas) + ", simulated in " + fmt("%.1f", b_secs) + " s");
                  o.require(r.passes(kSigmas, kMcRelative), "within max(3 stderr, 10%) of 8");
                  o.require(b_secs < kLimitSimulation, "simulation under 10 min (took " + fmt("%.0f", b_secs) + " s)");
              }));

    criterion(5, "model B third-power covariance reproduces 48 t^3", with_b([&](Outcome& o) {
                  const auto r = covariance_result(model_b, b_table, 1, 1);
                  o.note(describe(r));
                  o.require(r.passes(kSigmas, kMcRelative), "within max(3 stderr, 10%) of 48");
              }));

    criterion(6, "model A at b = 0: third powers give 12, Rademacher second powers give 0", [&] {
        Outcome o;
        ExperimentConfig gauss = large_run(Model::A, 48, {{3, 0.5}, {3, 1.0}}, 20242);
        const OmegaTable table = simulate_omegas(gauss);
        const auto r = covariance_result(gauss, table, 0, 1);
        o.note(describe(r));
        o.require(r.passes(kSigmas, kMcRelative), "Gaussian estimate within max(3 stderr, 10%) of 12");

        ExperimentConfig rad = large_run(Model::A, 48, {{2, 1.0}}, 20243);
        rad.entries = EntryModel::rademacher();
        const OmegaTable rad_table = simulate_omegas(rad);
        const auto z = covariance_result(rad, rad_table, 0, 0);
        o.note("Rademacher " + describe(z));
        o.require(near_zero(z), "Rademacher estimate within 3 stderr of 0");
        return o;
    });

    criterion(7, "mixed parity (2, 3) covariances vanish in both models", with_b([&](Outcome& o) {
                  const auto rb = covariance_result(model_b, b_table, 0, 1);
                  o.note("model B " + describe(rb));
                  o.require(near_zero(rb), "model B within 3 stderr of 0");
                  ExperimentConfig a = large_run(Model::A, 48, {{2, 1.0}, {3, 1.0}}, 20244);
                  const OmegaTable table = simulate_omegas(a);
                  const auto ra = covariance_result(a, table, 0, 1);
                  o.note("model A " + describe(ra));
                  o.require(near_zero(ra), "model A within 3 stderr of 0");
              }));

    criterion(8, "Wick moments of the second-power statistic in model B", with_b([&](Outcome& o) {
                  const std::vector<int> four{0, 0, 0, 0};
                  const std::vector<int> three{0, 0, 0};
                  const auto m4 = joint_moment_result(model_b, b_table, four);
                  const auto m3 = joint_moment_result(model_b, b_table, three);
                  o.note("fourth " + describe(m4));
                  o.note("third " + describe(m3));
                  // omega_2(1) = (2/sqrt(bn)) sum_m (1 - m/n)(a_m^2 - 1) and E(a^2 - 1)^3 = 8.
                  double skew = 0.0;
                  for (int m = 1; m <= model_b.bn; ++m) {
                      skew += std::pow(1.0 - static_cast<double>(m) / model_b.n, 3);
                  }
                  skew *= 64.0 / std::pow(model_b.bn, 1.5);
                  o.note("exact third moment at this bandwidth " + fmt("%.4g", skew) + ", vanishing like bn^(-1/2)");
                  o.require(m4.passes(kSigmas, kMcRelative), "fourth moment within max(3 stderr, 10%) of 192");
                  o.require(near_zero(m3), "third moment within 3 stderr of 0");
              }));

    criterion(9, "third-power model A covariance equals six second-power model B covariances", [] {
        Outcome o;
        const double t1s[] = {0.1, 0.25, 0.5, 1.0, 2.0};
        const double gaps[] = {0.0, 0.3, 1.0, 2.5};
        int pairs = 0;
        double worst = 0.0;
        for (double t1 : t1s) {
            for (double gap : gaps) {
                for (double kappa : {1.0, 3.0}) {
                    const double lhs = cov_model_a_b0(3, 3, t1, t1 + gap, kappa);
                    const double rhs = 6.0 * cov_model_b(2, 2, t1, t1 + gap);
                    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
                }
                ++pairs;
            }
        }
        o.note(std::to_string(pairs) + " time pairs, max relative difference " + fmt("%.3g", worst));
        o.require(pairs == 20 && worst <= kIdentityRelative, "relative difference <= 1e-12");
        return o;
    });

    criterion(10, "pre-image lists stay within 2pq and reduce back to L", [] {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        const auto rep = verify::reduction(4, 4);
        const double secs = since(start);
        for (const auto& d : rep.details) {
            o.note(d);
        }
        o.require(rep.passed, "bound and round trip hold for p, q <= 4, B <= 4");
        o.require(secs < kLimitReduction, "runtime under 1 min");
        return o;
    });

    criterion(11, "cluster counts equal 8B and their B^(3/2) ratio decreases", [] {
        Outcome o;
        const std::vector<int> lengths{2, 2, 2};
        double previous = INFINITY;
        for (int b : {4, 16, 64}) {
            const auto count = count_cluster_set(3, lengths, b);
            const double ratio = static_cast<double>(count) / std::pow(b, 1.5);
            o.note("B=" + std::to_string(b) + ": " + std::to_string(count) + ", ratio " + fmt("%.4g", ratio));
            o.require(count == static_cast<std::uint64_t>(8 * b), "count equals 8B at B=" + std::to_string(b));
            o.require(ratio < previous, "ratio strictly decreasing at B=" + std::to_string(b));
            previous = ratio;
        }
        return o;
    });

    criterion(12, "commutativity gap shrinks from (64, 4) to (256, 8)", [] {
        Outcome o;
        double mean_abs[2] = {0.0, 0.0};
        const std::pair<int, int> sizes[2] = {{64, 4}, {256, 8}};
        for (int s = 0; s < 2; ++s) {
            double exact = 0.0;
            for (int seed = 1; seed <= kCommutativitySeeds; ++seed) {
                ExperimentConfig c;
                c.model = Model::B;
                c.n = sizes[s].first;
                c.bn = sizes[s].second;
                c.replicas = quick ? 200 : kCommutativityReplicas;
                c.seed = static_cast<std::uint64_t>(seed);
                const auto r = commutativity_check(c, 2, 2, 1.0, 2.0);
                mean_abs[s] += std::abs(r.mc_difference) / kCommutativitySeeds;
                exact = r.exact_difference;
            }
            o.note("n=" + std::to_string(sizes[s].first) + " bn=" + std::to_string(sizes[s].second) +
                   ": mean |difference| over " + std::to_string(kCommutativitySeeds) + " seeds " +
                   fmt("%.4g", mean_abs[s]) + " (exhaustive " + fmt("%.4g", exact) + ")");
        }
        o.require(mean_abs[1] < mean_abs[0], "finer size has the smaller mean difference");
        return o;
    });

    criterion(13, "simulate CSV is bit-identical for 1, 4 and 8 workers", [] {
        Outcome o;
        const auto dir = std::filesystem::temp_directory_path() / "tfluct_acceptance";
        std::filesystem::create_directories(dir);
        std::string reference;
        for (const char* workers : {"1", "4", "8"}) {
            const auto path = dir / (std::string("workers") + workers + ".csv");
            const std::vector<std::string> args{"toeplitz_fluct", "simulate", "--model", "B", "--n", "1024",
                                                "--bn", "32", "--target", "2:0.5", "--target", "3:1",
                                                "--target", "4:1.5", "--replicas", "300", "--seed", "77",
                                                "--workers", workers, "--out", path.string()};
            std::vector<const char*> argv;
            for (const auto& a : args) {
                argv.push_back(a.c_str());
            }
            std::ostringstream out, err;
            const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
            o.require(code != 2, std::string("simulate ran with ") + workers + " workers: " + err.str());
            std::ifstream in(path, std::ios::binary);
            std::stringstream bytes;
            bytes << in.rdbuf();
            if (reference.empty()) {
                reference = bytes.str();
                o.note(std::to_string(std::count(reference.begin(), reference.end(), '\n') - 1) + " result rows");
            }
            o.require(!bytes.str().empty() && bytes.str() == reference,
                      std::string("CSV with ") + workers + " workers matches the 1-worker bytes");
        }
        return o;
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}

#include "tfluct/cli.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfluct/combinatorics.hpp"
#include "tfluct/experiments.hpp"
#include "tfluct/theory.hpp"
#include "tfluct/verify.hpp"

namespace tfluct::cli {

using nlohmann::json;

std::string format_value(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) {
        s += ".0";
    }
    return s;
}

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    int p = 2;
    int q = 2;
    int k = 0;
    double t1 = 1.0;
    double t2 = 1.0;
    double kappa = 3.0;
    double b = 0.0;
    int n = 4096;
    int bn = 64;
    int replicas = 2000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::uint64_t budget = 100000;
    std::string format = "table";
    std::string config;
    std::string out;
    std::string model = "B";
    std::string family = "gaussian";
    std::vector<std::string> targets;
    bool exact = false;
};

void add_format(CLI::App* app, Options& o)
{
    app->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));
}

// Puts (p, t1) on the earlier time, reporting a swap.
void order_times(Options& o, std::ostream& err)
{
    if (o.t1 > o.t2) {
        std::swap(o.t1, o.t2);
        std::swap(o.p, o.q);
        err << "notice: t1 > t2, evaluating with (p, t1) and (q, t2) swapped\n";
    }
}

void emit_scalar(std::ostream& out, const Options& o, const std::string& name, const std::string& value,
                 const json& args, const std::vector<std::string>& extra = {})
{
    if (o.format == "json") {
        json doc = {{"query", name}, {"args", args}, {"value", json::parse(value)}};
        if (!extra.empty()) {
            doc["expansion"] = extra;
        }
        out << doc.dump(2) << "\n";
    } else if (o.format == "csv") {
        out << "query,value\n" << name << "," << value << "\n";
    } else {
        out << value << "\n";
        for (const auto& line : extra) {
            out << line << "\n";
        }
    }
}

std::string join_terms(const std::vector<CovarianceTerm>& terms)
{
    if (terms.empty()) {
        return "= 0";
    }
    std::string s = "=";
    for (std::size_t i = 0; i < terms.size(); ++i) {
        s += (i ? " + " : " ") + terms[i].to_string();
    }
    return s;
}

int run_count(const std::string& what, Options& o, std::ostream& out)
{
    const json args = {{"p", o.p}, {"q", o.q}, {"k", o.k}};
    std::string value;
    if (what == "pairings") {
        value = std::to_string(enumerate_pair_partitions(o.k).size());
    } else if (what == "p2") {
        value = std::to_string(enumerate_class({o.p, o.q, 1}).size());
    } else if (what == "p2tilde") {
        value = std::to_string(enumerate_class({o.p, o.q, 3}).size());
    } else if (what == "p24") {
        value = std::to_string(enumerate_p24(o.p, o.q).size());
    } else if (what == "crosses") {
        std::uint64_t c = 0;
        for (const auto& pi : enumerate_class({o.p, o.q, 0})) {
            c += count_crosses(pi, o.p) == o.k ? 1 : 0;
        }
        value = std::to_string(c);
    } else if (what == "r1") {
        value = std::to_string(r1(o.p, o.q, o.k));
    } else if (what == "r2") {
        value = std::to_string(r2(o.p, o.q));
    } else if (what == "r3") {
        value = std::to_string(r3(o.p, o.q));
    } else if (what == "r4") {
        value = std::to_string(r4(o.p, o.q));
    } else if (what == "p2tilde-closed") {
        value = std::to_string(o.p % 2 == 0 ? card_p2tilde_even(o.p, o.q) : r4(o.p, o.q));
    } else if (what == "double-factorial") {
        value = std::to_string(double_factorial(o.k));
    } else {
        throw UsageError("unknown count query '" + what + "'");
    }
    emit_scalar(out, o, what, value, args);
    return 0;
}

TimedPower parse_target(const std::string& s)
{
    const auto colon = s.find(':');
    if (colon == std::string::npos) {
        throw UsageError("targets are written p:t, got '" + s + "'");
    }
    try {
        return {std::stoi(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
    } catch (const std::exception&) {
        throw UsageError("bad target '" + s + "'");
    }
}

Model parse_model(const std::string& m)
{
    if (m == "A" || m == "a") {
        return Model::A;
    }
    if (m == "B" || m == "b") {
        return Model::B;
    }
    throw UsageError("model must be A or B");
}

int run_theory(const std::string& what, Options& o, std::ostream& out, std::ostream& err)
{
    if (what == "wick") {
        std::vector<TimedPower> targets;
        for (const auto& s : o.targets) {
            targets.push_back(parse_target(s));
        }
        const double v = wick_joint_prediction(targets, parse_model(o.model), o.b, o.kappa, o.exact);
        emit_scalar(out, o, what, format_value(v), {{"targets", o.targets}, {"model", o.model}, {"kappa", o.kappa}});
        return 0;
    }
    if (what == "sigma2") {
        const McEstimate e = sigma2(o.p, o.kappa, o.b, o.budget, o.seed);
        std::vector<std::string> extra;
        if (o.b == 0.0) {
            extra.push_back(join_terms(cov_model_a_b0_terms(o.p, o.p)));
        } else {
            extra.push_back("+- " + format_value(e.stderr_));
        }
        emit_scalar(out, o, what, format_value(e.estimate), {{"p", o.p}, {"kappa", o.kappa}, {"b", o.b}}, extra);
        return 0;
    }
    order_times(o, err);
    const json args = {{"p", o.p}, {"q", o.q}, {"t1", o.t1}, {"t2", o.t2}, {"kappa", o.kappa}, {"b", o.b}};
    if (what == "cov-a") {
        const double v = o.exact ? cov_model_a_b0_exact(o.p, o.q, o.t1, o.t2, o.kappa)
                                 : cov_model_a_b0(o.p, o.q, o.t1, o.t2, o.kappa);
        std::vector<std::string> extra;
        if (!o.exact) {
            extra.push_back(join_terms(cov_model_a_b0_terms(o.p, o.q)));
        }
        emit_scalar(out, o, what, format_value(v), args, extra);
    } else if (what == "cov-b") {
        const double v = o.exact ? cov_model_b_exact(o.p, o.q, o.t1, o.t2) : cov_model_b(o.p, o.q, o.t1, o.t2);
        std::vector<std::string> extra;
        if (!o.exact) {
            extra.push_back(join_terms(cov_model_b_terms(o.p, o.q)));
        }
        emit_scalar(out, o, what, format_value(v), args, extra);
    } else if (what == "cov-a-general") {
        const McEstimate e = cov_model_a_general({Model::A, o.p, o.q, o.t1, o.t2, o.b, o.kappa}, o.budget, o.seed);
        emit_scalar(out, o, what, format_value(e.estimate), args, {"+- " + format_value(e.stderr_)});
    } else {
        throw UsageError("unknown theory query '" + what + "'");
    }
    return 0;
}

int run_simulate(Options& o, bool workers_set, bool seed_set, bool out_set, std::ostream& out, std::ostream& err)
{
    ExperimentConfig config;
    if (!o.config.empty()) {
        config = load_config(o.config);
        if (!out_set) {
            config.output.clear();
        }
    } else {
        order_times(o, err);
        config.model = parse_model(o.model);
        config.n = o.n;
        config.bn = o.bn;
        try {
            config.entries = EntryModel::from_name(o.family, o.kappa, config.model);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        config.replicas = o.replicas;
        if (o.targets.empty()) {
            config.targets = {{o.p, o.t1}, {o.q, o.t2}};
            config.covariances = {{0, 1}};
        } else {
            for (const auto& s : o.targets) {
                config.targets.push_back(parse_target(s));
            }
        }
    }
    if (workers_set || o.config.empty()) {
        config.workers = o.workers;
    }
    if (seed_set || o.config.empty()) {
        config.seed = o.seed;
    }
    if (out_set) {
        config.output = o.out;
    }
    config.validate();
    const std::vector<EstimateResult> results = run_experiment(config);
    if (!config.output.empty()) {
        std::ofstream csv(config.output);
        std::ofstream js(std::filesystem::path(config.output).replace_extension(".json"));
        if (!csv || !js) {
            throw ConfigError("cannot write results to " + config.output);
        }
        csv << results_csv(results);
        js << results_json(results) << "\n";
    }
    bool ok = true;
    for (const auto& r : results) {
        ok = ok && r.passes(config.threshold, config.relative_tolerance);
        if (!r.warning.empty()) {
            err << "warning: " << r.warning << "\n";
        }
    }
    if (o.format == "csv") {
        out << results_csv(results);
    } else if (o.format == "json") {
        out << results_json(results) << "\n";
    } else {
        for (const auto& r : results) {
            out << r.label << " = " << format_value(r.estimate) << " +- " << format_value(r.stderr_);
            if (r.theory) {
                out << "  theory " << format_value(*r.theory);
                if (r.theory_exact && *r.theory_exact != *r.theory) {
                    out << " (exact slices " << format_value(*r.theory_exact) << ")";
                }
                out << "  z " << format_value(r.z) << "  "
                    << (r.passes(config.threshold, config.relative_tolerance) ? "PASS" : "FAIL");
            }
            out << "\n";
        }
    }
    return ok ? 0 : 1;
}

int run_verify(const std::string& what, Options& o, std::ostream& out)
{
    std::vector<verify::SuiteReport> reports;
    if (what == "all") {
        reports = verify::all(o.budget);
    } else if (what == "trace") {
        reports.push_back(verify::trace(100, o.seed));
    } else if (what == "enumeration") {
        reports.push_back(verify::enumeration());
    } else if (what == "reduction") {
        reports.push_back(verify::reduction());
    } else if (what == "clusters") {
        reports.push_back(verify::clusters());
    } else if (what == "integrals") {
        reports.push_back(verify::integrals(o.budget, 8, o.seed));
    } else if (what == "commutativity") {
        reports.push_back(verify::commutativity());
    } else {
        throw UsageError("unknown verify suite '" + what + "'");
    }
    bool ok = true;
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& r : reports) {
            arr.push_back({{"suite", r.name}, {"passed", r.passed}, {"details", r.details}});
        }
        out << arr.dump(2) << "\n";
    } else if (o.format == "csv") {
        out << "suite,passed\n";
        for (const auto& r : reports) {
            out << r.name << "," << (r.passed ? "true" : "false") << "\n";
        }
    }
    for (const auto& r : reports) {
        ok = ok && r.passed;
        if (o.format == "table") {
            out << (r.passed ? "PASS " : "FAIL ") << r.name << "\n";
            for (const auto& d : r.details) {
                out << "  " << d << "\n";
            }
        }
    }
    return ok ? 0 : 1;
}

} // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Fluctuations of random band Toeplitz matrices: exact counts, limiting covariances, "
                 "Monte Carlo estimates and oracle suites.\nTOEPLITZ_FLUCT_WORKCAP overrides every enumeration cap.",
                 "toeplitz_fluct"};
    app.require_subcommand(1, 1);

    std::string count_what, theory_what, verify_what;
    auto* count = app.add_subcommand("count", "Exact combinatorial counts");
    count->add_option("what", count_what,
                      "pairings | p2 | p2tilde | p24 | crosses | r1 | r2 | r3 | r4 | p2tilde-closed | double-factorial")
        ->required();
    count->add_option("--p", o.p, "Size of the first block");
    count->add_option("--q", o.q, "Size of the second block");
    count->add_option("--k", o.k, "Cross count, pairing half-size, or double-factorial argument");
    add_format(count, o);

    auto* theory = app.add_subcommand("theory", "Limiting covariances");
    theory->add_option("what", theory_what, "cov-a | cov-b | cov-a-general | sigma2 | wick")->required();
    theory->add_option("--p", o.p, "Power at the first time");
    theory->add_option("--q", o.q, "Power at the second time");
    theory->add_option("--t1", o.t1, "First time");
    theory->add_option("--t2", o.t2, "Second time");
    theory->add_option("--kappa", o.kappa, "Fourth moment of the entries");
    theory->add_option("--b", o.b, "Limit of bn/n (model A)");
    theory->add_option("--budget", o.budget, "Monte Carlo samples per integral when b > 0");
    theory->add_option("--seed", o.seed, "Seed for the integral estimates");
    theory->add_option("--model", o.model, "A or B (wick)");
    theory->add_option("--target", o.targets, "p:t pairs (wick), repeatable");
    theory->add_flag("--exact", o.exact, "Use exact cross-variable slice volumes");
    add_format(theory, o);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
    simulate->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    simulate->add_option("--model", o.model, "A or B");
    simulate->add_option("--n", o.n, "Matrix size");
    simulate->add_option("--bn", o.bn, "Base bandwidth");
    simulate->add_option("--family", o.family, "gaussian | rademacher | uniform | custom");
    simulate->add_option("--kappa", o.kappa, "Fourth moment (custom family)");
    simulate->add_option("--p", o.p, "Power at the first time");
    simulate->add_option("--q", o.q, "Power at the second time");
    simulate->add_option("--t1", o.t1, "First time");
    simulate->add_option("--t2", o.t2, "Second time");
    simulate->add_option("--target", o.targets, "p:t targets; every pair is estimated");
    simulate->add_option("--replicas", o.replicas, "Number of replicas");
    auto* seed_opt = simulate->add_option("--seed", o.seed, "Random seed");
    auto* workers_opt = simulate->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    auto* out_opt = simulate->add_option("--out", o.out, "CSV results path (JSON written beside it)");
    add_format(simulate, o);

    auto* verify = app.add_subcommand("verify", "Oracle suites");
    verify->add_option("what", verify_what,
                       "trace | enumeration | reduction | clusters | integrals | commutativity | all")
        ->required();
    verify->add_option("--budget", o.budget, "Samples per integral");
    verify->add_option("--seed", o.seed, "Seed");
    add_format(verify, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    std::ostringstream buffer;
    int code = 0;
    try {
        if (count->parsed()) {
            code = run_count(count_what, o, buffer);
        } else if (theory->parsed()) {
            code = run_theory(theory_what, o, buffer, err);
        } else if (simulate->parsed()) {
            code = run_simulate(o, workers_opt->count() > 0, seed_opt->count() > 0, out_opt->count() > 0, buffer,
                                err);
        } else {
            code = run_verify(verify_what, o, buffer);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const WorkCapExceeded& e) {
        err << "work cap exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    out << buffer.str();
    return code;
}

} // namespace tfluct::cli

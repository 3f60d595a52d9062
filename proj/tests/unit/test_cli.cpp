#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfluct/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "toeplitz_fluct");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    Run r;
    r.code = tfluct::cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST_CASE("value formatting", "[cli]")
{
    CHECK(tfluct::cli::format_value(12.0) == "12.0");
    CHECK(tfluct::cli::format_value(0.0) == "0.0");
    CHECK(tfluct::cli::format_value(0.25) == "0.25");
    CHECK(tfluct::cli::format_value(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("theory queries", "[cli]")
{
    const Run a = run({"theory", "cov-a", "--p", "3", "--q", "3", "--t1", "0.5", "--t2", "1.0", "--kappa", "3"});
    CHECK(a.code == 0);
    CHECK(first_line(a.out) == "12.0");
    CHECK(a.out.find("48*t1^2") != std::string::npos);

    const Run b = run({"theory", "cov-b", "--p", "2", "--q", "2", "--t1", "1", "--t2", "1"});
    CHECK(first_line(b.out) == "8.0");
    CHECK(first_line(run({"theory", "cov-b", "--p", "2", "--q", "4", "--t1", "1", "--t2", "2"}).out) == "192.0");
    CHECK(first_line(run({"theory", "cov-b", "--p", "3", "--q", "3", "--t1", "1", "--t2", "1", "--exact"}).out) ==
          "36.0");
    CHECK(first_line(run({"theory", "sigma2", "--p", "2", "--kappa", "1"}).out) == "0.0");
    CHECK(first_line(run({"theory", "wick", "--model", "B", "--target", "2:1", "--target", "2:1", "--target",
                          "2:1", "--target", "2:1"})
                         .out) == "192.0");

    const Run swapped = run({"theory", "cov-a", "--p", "3", "--q", "3", "--t1", "1.0", "--t2", "0.5"});
    CHECK(swapped.code == 0);
    CHECK(first_line(swapped.out) == "12.0");
    CHECK(swapped.err.find("swapped") != std::string::npos);
}

TEST_CASE("counts", "[cli]")
{
    CHECK(first_line(run({"count", "p2tilde", "--p", "3", "--q", "3"}).out) == "6");
    const Run j = run({"count", "p2tilde", "--p", "3", "--q", "3", "--format", "json"});
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc.at("value") == 6);
    const Run c = run({"count", "p2tilde", "--p", "3", "--q", "3", "--format", "csv"});
    CHECK(first_line(c.out) == "query,value");
}

TEST_CASE("usage errors exit with status 2 and no output", "[cli]")
{
    for (const auto& args : std::vector<std::vector<std::string>>{
             {},
             {"frobnicate"},
             {"count", "bogus"},
             {"theory", "cov-a", "--p", "2", "--q", "2", "--bogus", "1"},
             {"theory", "cov-a", "--p", "two"},
             {"theory", "cov-a", "--format", "xml"},
             {"simulate", "--model", "A", "--n", "64", "--bn", "48", "--p", "2", "--q", "2", "--t1", "1.5",
              "--t2", "1.5"},
             {"simulate", "--replicas", "10"},
         }) {
        const Run r = run(args);
        INFO(r.err);
        CHECK(r.code == 2);
        CHECK(r.out.empty());
        CHECK_FALSE(r.err.empty());
    }
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate output is reproducible", "[cli]")
{
    const fs::path dir = fs::temp_directory_path() / "tfluct_test_cli";
    fs::create_directories(dir);
    std::string reference;
    for (const char* workers : {"1", "4", "8"}) {
        const fs::path csv = dir / (std::string("w") + workers + ".csv");
        const Run r = run({"simulate", "--model", "A", "--family", "rademacher", "--n", "256", "--bn", "8",
                           "--target", "2:1", "--target", "3:1", "--replicas", "100", "--seed", "5", "--workers",
                           workers, "--out", csv.string(), "--format", "csv"});
        CHECK(r.code != 2);
        std::ifstream in(csv);
        std::stringstream s;
        s << in.rdbuf();
        CHECK(s.str() == r.out);
        if (reference.empty()) {
            reference = s.str();
        }
        CHECK(s.str() == reference);
        CHECK(fs::exists(fs::path(csv).replace_extension(".json")));
    }
    CHECK(first_line(reference) == "model,p,q,t1,t2,n,b_n,kappa,replicas,estimate,stderr,theory,z,seed");
}

TEST_CASE("verify suites", "[cli]")
{
    const Run r = run({"verify", "enumeration"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("PASS enumeration", 0) == 0);
    const Run j = run({"verify", "clusters", "--format", "json"});
    CHECK(j.code == 0);
    CHECK(nlohmann::json::parse(j.out).is_array());
    CHECK(run({"verify", "nothing"}).code == 2);
}

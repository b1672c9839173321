#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ewens_spectra/cli_app.hpp"

using namespace ewens::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string strip_timestamp(std::string text) {
    auto pos = text.find("\"generated_at\"");
    if (pos == std::string::npos) return text;
    auto end = text.find('\n', pos);
    text.erase(pos, end - pos + 1);
    return text;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("ewens_cli_test_" + name);
}

} // namespace

TEST_CASE("parse_args fills the clt config") {
    RunConfig cfg = parse_args({"clt", "--statistic", "xtilde", "--theta", "1", "--a-grid",
                                "1e2,1e3,1e4", "--replicates", "10000", "--seed", "42"});
    REQUIRE(cfg.command == Command::clt);
    REQUIRE(cfg.statistic == "xtilde");
    REQUIRE(cfg.theta == 1.0);
    REQUIRE(cfg.scale_grid == std::vector<double>{1e2, 1e3, 1e4});
    REQUIRE(cfg.replicates == 10000);
    REQUIRE(cfg.seed == 42);
}

TEST_CASE("parse_args fills the constants config") {
    RunConfig cfg = parse_args({"constants", "--kind", "c2", "--alpha", "0", "--beta", "sqrt2",
                                "--n", "1e7"});
    REQUIRE(cfg.command == Command::constants);
    REQUIRE(cfg.kind == "c2");
    REQUIRE(cfg.beta_str == "sqrt2");
    REQUIRE(cfg.n_terms == 1e7);
}

TEST_CASE("bad arguments exit with the config error code") {
    REQUIRE(run_cli({"constants", "--theta", "-1"}) == 2);
    REQUIRE(run_cli({"constants", "--no-such-flag"}) == 2);
    REQUIRE(run_cli({}) == 2);
    REQUIRE(run_cli({"clt", "--statistic", "bogus"}) == 2);
}

TEST_CASE("help exits cleanly") {
    REQUIRE(run_cli({"--help"}) == 0);
}

TEST_CASE("constants command emits value and certificate") {
    fs::path out = temp_file("constants.json");
    int rc = run_cli({"constants", "--kind", "ell", "--kappa", "sqrt2", "--n", "200000",
                      "--output", out.string()});
    REQUIRE(rc == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["schema_version"] == 1);
    REQUIRE(j["command"] == "constants");
    REQUIRE(std::abs(j["rows"][0]["value"].get<double>() - 1.0 / 6.0) < 1e-3);
    REQUIRE(j["extra"]["certificate"].contains("tail_estimate"));
    REQUIRE(j["all_pass"] == true);
    fs::remove(out);
}

TEST_CASE("rational constants cross-check passes") {
    fs::path out = temp_file("c2rat.json");
    int rc = run_cli({"constants", "--kind", "c2-rational", "--r", "3", "--s", "2", "--alpha",
                      "sqrt2", "--n", "1000000", "--output", out.string()});
    REQUIRE(rc == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(std::abs(j["rows"][0]["closed_form"].get<double>() - 5.0 / 36.0) < 1e-12);
    REQUIRE(j["rows"][0]["abs_diff"].get<double>() < 1e-3);
    fs::remove(out);
}

TEST_CASE("verify-lemma accepts the legacy alias and emits csv") {
    fs::path out = temp_file("lemma.csv");
    int rc = run_cli({"verify-lemma", "--which", "calcul3", "--pmax", "12", "--format", "csv",
                      "--output", out.string()});
    REQUIRE(rc == 0);
    std::string text = slurp(out);
    REQUIRE(text.rfind("p,q,closed_form,quadrature,abs_diff", 0) == 0);
    // 12*11/2 rows plus header
    int lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    REQUIRE(lines == 67);
    fs::remove(out);
}

TEST_CASE("same config and seed give byte-identical output modulo timestamp") {
    fs::path o1 = temp_file("det1.json"), o2 = temp_file("det2.json");
    REQUIRE(run_cli({"za", "--a-grid", "50,200", "--replicates", "2000", "--seed", "9",
                     "--output", o1.string()}) >= 0);
    REQUIRE(run_cli({"za", "--a-grid", "50,200", "--replicates", "2000", "--seed", "9",
                     "--output", o2.string()}) >= 0);
    REQUIRE(strip_timestamp(slurp(o1)) == strip_timestamp(slurp(o2)));
    fs::remove(o1);
    fs::remove(o2);
}

TEST_CASE("thread count does not change the output") {
    fs::path o1 = temp_file("thr1.json"), o2 = temp_file("thr2.json");
    int r1 = run_cli({"clt", "--statistic", "xtilde", "--a-grid", "1e2,1e3,1e4",
                      "--replicates", "3000", "--seed", "5", "--threads", "1", "--output",
                      o1.string()});
    int r2 = run_cli({"clt", "--statistic", "xtilde", "--a-grid", "1e2,1e3,1e4",
                      "--replicates", "3000", "--seed", "5", "--threads", "2", "--output",
                      o2.string()});
    REQUIRE(r1 == r2);
    std::string t1 = strip_timestamp(slurp(o1));
    REQUIRE(!t1.empty());
    REQUIRE(t1 == strip_timestamp(slurp(o2)));
    fs::remove(o1);
    fs::remove(o2);
}

TEST_CASE("clt runs the fixed-left-endpoint statistic with exact standardization") {
    fs::path out = temp_file("clt_fixed.json");
    int rc = run_cli({"clt", "--statistic", "x-fixed-a", "--a", "1", "--b-grid", "1e1,1e2,1e3",
                      "--replicates", "10000", "--seed", "8", "--output", out.string()});
    REQUIRE(rc == 0);
    auto j = nlohmann::json::parse(slurp(out));
    double slope = j["extra"]["fit"]["slope"].get<double>();
    REQUIRE(std::abs(slope - 1.0 / 3.0) / (1.0 / 3.0) < 0.15);
    REQUIRE(j["rows"].size() == 3);
    fs::remove(out);
}

TEST_CASE("clt runs the proportional statistic for rational and irrational ratios") {
    fs::path out = temp_file("clt_prop.json");
    int rc = run_cli({"clt", "--statistic", "x-proportional", "--nu", "2", "--a-grid",
                      "1e1,1e2,1e3", "--replicates", "10000", "--seed", "8", "--output",
                      out.string()});
    REQUIRE(rc == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["extra"]["fit"]["target"].get<double>() == Catch::Approx(1.0 / 12.0));
    rc = run_cli({"clt", "--statistic", "x-proportional", "--nu", "sqrt2", "--a-grid",
                  "1e1,1e2,1e3", "--replicates", "5000", "--seed", "8", "--output",
                  out.string()});
    auto j2 = nlohmann::json::parse(slurp(out));
    REQUIRE(j2["extra"]["fit"]["target"].get<double>() == Catch::Approx(1.0 / 6.0));
    fs::remove(out);
}

TEST_CASE("translate command emits one ks row per shift") {
    fs::path out = temp_file("translate.json");
    int rc = run_cli({"translate", "--t", "2", "--s-grid", "10,200", "--replicates", "20000",
                      "--seed", "8", "--output", out.string()});
    REQUIRE(rc >= 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["rows"].size() == 2);
    REQUIRE(j["rows"][0]["s"] == 10.0);
    REQUIRE(j["rows"][1]["ks"].get<double>() < j["rows"][0]["ks"].get<double>());
    fs::remove(out);
}

TEST_CASE("sample-gem dump carries sticks and the residual certificate") {
    fs::path out = temp_file("gem.json");
    REQUIRE(run_cli({"sample-gem", "--theta", "2", "--delta", "1e-6", "--scale-hint", "100",
                     "--replicates", "5", "--dump", "--seed", "3", "--output",
                     out.string()}) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["rows"].size() == 5);
    REQUIRE(j["extra"]["samples"].size() == 5);
    for (const auto& s : j["extra"]["samples"]) {
        REQUIRE(s["sticks"].size() >= 1);
        REQUIRE(s["residual"].get<double>() * 100.0 < 1e-6);
    }
    fs::remove(out);
}

TEST_CASE("sample-poisson dump carries window metadata") {
    fs::path out = temp_file("poisson.json");
    REQUIRE(run_cli({"sample-poisson", "--theta", "1", "--epsilon", "0.01", "--x-max", "50",
                     "--replicates", "4", "--dump", "--seed", "3", "--output",
                     out.string()}) == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j["extra"]["samples"].size() == 4);
    REQUIRE(j["extra"]["samples"][0]["window"]["epsilon"] == 0.01);
    REQUIRE(j["extra"]["samples"][0]["window"]["x_max"] == 50.0);
    fs::remove(out);
}

TEST_CASE("count command draws the four statistics") {
    for (std::string mode : {"tau-n", "tau-n-modified", "limit", "limit-modified"}) {
        fs::path out = temp_file("count_" + mode + ".json");
        REQUIRE(run_cli({"count", "--mode", mode, "--n", "100", "--a", "1", "--b", "5", "--A",
                         "5", "--replicates", "10", "--seed", "11", "--output",
                         out.string()}) == 0);
        auto j = nlohmann::json::parse(slurp(out));
        REQUIRE(j["rows"].size() == 10);
        fs::remove(out);
    }
}

TEST_CASE("every documented flag appears in help") {
    fs::path out = temp_file("help.txt");
    std::string cmd = std::string(EWENS_CLI_BINARY) + " --help > " + out.string() + " 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    std::string help = slurp(out);
    for (const char* sub : {"constants", "verify-lemma", "clt", "translate", "za", "count",
                            "sample-gem", "sample-poisson"})
        REQUIRE(help.find(sub) != std::string::npos);
    for (const char* sub : {"clt", "constants", "sample-poisson"}) {
        std::string c2 = std::string(EWENS_CLI_BINARY) + " " + sub + " --help > " + out.string();
        REQUIRE(std::system(c2.c_str()) == 0);
        std::string h2 = slurp(out);
        for (const char* flag : {"--theta", "--seed", "--threads", "--output", "--format",
                                 "--replicates"})
            REQUIRE(h2.find(flag) != std::string::npos);
    }
    fs::remove(out);
}

TEST_CASE("environment variable sets the default worker count") {
    REQUIRE(resolve_threads(3) == 3);
    setenv("EWENS_SPECTRA_THREADS", "5", 1);
    REQUIRE(resolve_threads(0) == 5);
    unsetenv("EWENS_SPECTRA_THREADS");
    REQUIRE(resolve_threads(0) >= 1);
}

TEST_CASE("parse_nu understands the three input forms") {
    NuSpec a = parse_nu("2");
    REQUIRE((a.rational && a.r == 2 && a.s == 1));
    NuSpec b = parse_nu("3/2");
    REQUIRE((b.rational && b.r == 3 && b.s == 2));
    NuSpec c = parse_nu("sqrt2");
    REQUIRE_FALSE(c.rational);
    REQUIRE(c.value == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
    REQUIRE_THROWS(parse_nu("2/4"));
    REQUIRE_THROWS(parse_nu("1/2"));
}

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "heisenheat/experiments.hpp"

using namespace heisenheat;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("heisenheat_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(HEISENHEAT_CLI) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cfg_path(const std::string& name) { return std::string(HEISENHEAT_CONFIGS) + "/" + name; }

std::map<std::string, std::string> small_sweep() {
    return {{"r_max", "8"},     {"tau_half", "32"}, {"nr", "16"},       {"ntau", "32"},
            {"t_end", "2"},     {"dt0", "0.1"},     {"boundary_tol", "1"}, {"forcing_width", "1"},
            {"p_list", "1.5,3"}, {"amplitude_list", "0.5,2,8"}};
}

}  // namespace

TEST(Cli, VerifyPassesAndFaultFails) {
    const auto out = scratch("cli_verify");
    EXPECT_EQ(run_cli("verify --config " + cfg_path("verify.cfg") + " --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "verify.csv"));
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
    EXPECT_EQ(run_cli("verify --config " + cfg_path("verify_fault.cfg") + " --out " + out.string()), 1);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
    const auto out = scratch("cli_errors");
    const auto bad = out / "bad.cfg";
    std::ofstream(bad) << "forcing_amplitud = 1\n";
    EXPECT_EQ(run_cli("solve --config " + bad.string() + " --out " + out.string()), 2);
    EXPECT_EQ(run_cli("launch --config " + bad.string()), 2);
    EXPECT_EQ(run_cli("solve"), 2);
    EXPECT_EQ(run_cli("solve --config " + (out / "missing.cfg").string()), 2);
    const auto malformed = out / "malformed.cfg";
    std::ofstream(malformed) << "p = abc\n";
    EXPECT_EQ(run_cli("solve --config " + malformed.string() + " --out " + out.string()), 2);
    const auto bad_p = out / "bad_p.cfg";
    std::ofstream(bad_p) << "p = 1\n";
    EXPECT_EQ(run_cli("solve --config " + bad_p.string() + " --out " + out.string()), 2);
    EXPECT_EQ(run_cli("verify --config " + cfg_path("verify.cfg") + " --workers 0"), 2);
}

TEST(Cli, ManifestRerunReproducesOutputs) {
    const auto a = scratch("rerun_a"), b = scratch("rerun_b");
    ASSERT_EQ(run_cli("capacity --config " + cfg_path("capacity.cfg") + " --out " + a.string()), 0);
    ASSERT_EQ(run_cli("capacity --config " + (a / "manifest.json").string() + " --out " + b.string()), 0);
    for (const char* f : {"capacity.csv", "fit.json", "manifest.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(run_cli("solve --config " + (a / "manifest.json").string() + " --out " + b.string()), 2);
}

TEST(Experiments, ManifestEmbedsResolvedConfigAndHash) {
    const auto out = scratch("manifest");
    const auto c = RunConfig::resolve("critical", {{"r_list", "100,10000"}});
    const auto r = run_experiment(c, out);
    EXPECT_EQ(r.exit_code, kExitPass);
    const auto j = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(j["command"], "critical");
    EXPECT_EQ(j["config"].size(), keys_for("critical").size());
    EXPECT_EQ(j["config"]["r_list"], "100,10000");
    EXPECT_EQ(j["input_hash"], detail::hex64(c.input_hash()));
    EXPECT_EQ(config_from_manifest(slurp(out / "manifest.json")).canonical_text(), c.canonical_text());
}

TEST(Experiments, CapacitySingleScaleWritesOneRowAndNoFit) {
    const auto out = scratch("capacity_single");
    const auto r = run_experiment(RunConfig::resolve("capacity", {{"t_list", "10"}, {"check_gate", "0"}}), out);
    EXPECT_EQ(r.exit_code, kExitPass);
    std::istringstream csv(slurp(out / "capacity.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 1);
    EXPECT_FALSE(fs::exists(out / "fit.json"));
}

TEST(Experiments, SweepIsWorkerCountIndependent) {
    const auto a = scratch("sweep_1"), b = scratch("sweep_3");
    const auto c = RunConfig::resolve("sweep", small_sweep());
    const auto ra = run_experiment(c, a, 1), rb = run_experiment(c, b, 3);
    EXPECT_EQ(ra.exit_code, kExitPass);
    EXPECT_EQ(rb.exit_code, kExitPass);
    const auto csv = slurp(a / "sweep.csv");
    EXPECT_EQ(csv, slurp(b / "sweep.csv"));
    std::istringstream is(csv);
    std::string line;
    int rows = -1;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 6);
}

TEST(Experiments, FailedSweepRowIsRecordedAndFlagged) {
    auto given = small_sweep();
    given["p_list"] = "1.5,1";
    given["amplitude_list"] = "1";
    const auto out = scratch("sweep_fail");
    const auto r = run_experiment(RunConfig::resolve("sweep", given), out, 2);
    EXPECT_EQ(r.exit_code, kExitCheckFailure);
    const auto csv = slurp(out / "sweep.csv");
    EXPECT_NE(csv.find(",failed,"), std::string::npos);
    EXPECT_NE(csv.find("\n0,"), std::string::npos);
}

TEST(Experiments, SolveProducesOutcomeAndSeries) {
    const auto out = scratch("solve_ode");
    const auto c = load_config("solve", cfg_path("solve_ode.cfg"));
    const auto r = run_experiment(c, out);
    EXPECT_EQ(r.exit_code, kExitPass);
    const auto outcome = slurp(out / "outcome.csv");
    EXPECT_EQ(outcome.rfind(detail::outcome_header() + "\n", 0), 0u);
    EXPECT_NE(outcome.find("blew_up"), std::string::npos);
    EXPECT_NE(outcome.find(detail::hex64(c.input_hash())), std::string::npos);
    EXPECT_EQ(slurp(out / "series.csv").rfind("t,sup,boundary_sup,dt\n", 0), 0u);
}

TEST(Experiments, LibraryPreconditionsBecomeConfigErrors) {
    const auto out = scratch("precondition");
    EXPECT_THROW(run_experiment(RunConfig::resolve("critical", {{"r_list", "100,1000"}}), out), ConfigError);
    EXPECT_THROW(run_experiment(RunConfig::resolve("capacity", {{"p", "2"}}), out), ConfigError);
    EXPECT_THROW(run_experiment(RunConfig::resolve("verify", {}), out, 0), ConfigError);
    EXPECT_THROW(run_verify(RunConfig::resolve("solve", {}), out), ConfigError);
}

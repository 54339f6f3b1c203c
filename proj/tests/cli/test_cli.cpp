#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "experiment.hpp"
#include "orlicz/io.hpp"

namespace fs = std::filesystem;
using namespace orlicz::tools;
using orlicz::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "orlicz_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path put(const fs::path& dir, const std::string& file, const json& j) {
  orlicz::write_json(dir / file, j);
  return dir / file;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ORLICZ_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string s; std::getline(in, s);) ++n;
  return n;
}

json square_config() {
  return {{"name", "square"}, {"experiment", "conjugate"}, {"parameters", {{"w", {{"kind", "power"}, {"exponent", 2}}}}}};
}

json rademacher_config(double b, std::size_t n) {
  return {{"name", "rad"}, {"experiment", "rademacher"}, {"seed", 7}, {"parameters", {{"B", b}, {"n", n}, {"K", 2000}}}};
}

}  // namespace

TEST(Cli, ConjugateSquarePasses) {
  const auto dir = scratch("square");
  auto cfg = ExperimentConfig::from_json(square_config());
  cfg.out = dir;
  const auto r = run(cfg);
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_EQ(r.headline_metric, "biconjugate_residual");
  EXPECT_LE(r.headline_value.get<double>(), 1e-6);
  EXPECT_LE(r.report["metrics"]["max_rel_error"].get<double>(), 1e-6);
  ASSERT_TRUE(fs::exists(dir / "square" / "report.json"));
  std::ifstream csv(dir / "square" / "conjugate.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "p,conjugate,maximizer_z");
  EXPECT_EQ(cli("conjugate --config " + put(dir, "c.json", square_config()).string() + " --out " + dir.string()), 0);
}

TEST(Cli, InvalidBIsAValidationExitWithoutComputation) {
  const auto dir = scratch("invalid");
  const auto path = put(dir, "bad.json", rademacher_config(0.4, 1000));
  EXPECT_EQ(cli("rademacher --config " + path.string() + " --out " + dir.string()), kExitValidation);
  const auto report = orlicz::read_json(dir / "rad" / "report.json");
  EXPECT_EQ(report["status"], "validation");
  EXPECT_FALSE(report["errors"].empty());
  EXPECT_FALSE(report.contains("metrics"));
}

TEST(Cli, MalformedInputsAreValidationErrors) {
  const auto dir = scratch("malformed");
  std::ofstream(dir / "broken.json") << "{not json";
  EXPECT_EQ(cli("norm --config " + (dir / "broken.json").string() + " --out " + dir.string()), kExitValidation);
  EXPECT_TRUE(fs::exists(dir / "broken" / "report.json"));
  EXPECT_EQ(cli("norm --config " + put(dir, "sq.json", square_config()).string() + " --out " + dir.string()),
            kExitValidation);
  auto unknown = square_config();
  unknown["experiment"] = "nonsense";
  EXPECT_EQ(cli("conjugate --config " + put(dir, "u.json", unknown).string()), kExitValidation);
  EXPECT_EQ(cli("conjugate"), kExitValidation);
}

TEST(Cli, BudgetAbortExitCode) {
  const auto dir = scratch("budget");
  const json j = json::parse(R"({"name": "big", "experiment": "norm", "budget": {"max_samples": 1000},
    "parameters": {"n": 1000000, "generator": {"kind": "gaussian"}, "psi": {"kind": "MR", "parameters": {"m": 2}}}})");
  EXPECT_EQ(cli("norm --config " + put(dir, "b.json", j).string() + " --out " + dir.string()), kExitBudget);
  EXPECT_EQ(orlicz::read_json(dir / "big" / "report.json")["status"], "budget");

  // A max_work cut of the martingale horizon is also a budget abort.
  json m = {{"name", "cut"},
            {"experiment", "martingale"},
            {"parameters",
             {{"spec", {{"kind", "simple"}, {"parameters", {{"B", 0.75}}}, {"n_max", 256}, {"max_work", 1000}}},
              {"paths", 100},
              {"psi", {{"kind", "MR"}, {"parameters", {{"m", 4}}}}},
              {"nu", {{"kind", "MR"}, {"parameters", {{"m", 2}}}}}}}};
  EXPECT_EQ(cli("martingale --config " + put(dir, "m.json", m).string() + " --out " + dir.string()), kExitBudget);
}

TEST(Cli, AcceptanceFailureExitCode) {
  const auto dir = scratch("acceptance");
  auto j = square_config();
  j["acceptance"] = {{{"metric", "biconjugate_residual"}, {"max", -1.0}}};
  EXPECT_EQ(cli("conjugate --config " + put(dir, "a.json", j).string() + " --out " + dir.string()), kExitAcceptance);
  const auto report = orlicz::read_json(dir / "square" / "report.json");
  EXPECT_EQ(report["status"], "fail");
  EXPECT_EQ(report["acceptance"][0]["pass"], false);
}

TEST(Cli, SameSeedReproducesEveryNumber) {
  const auto dir = scratch("repro");
  const auto path = put(dir, "r.json", rademacher_config(0.75, 20000));
  ASSERT_EQ(cli("rademacher --config " + path.string() + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(cli("rademacher --config " + path.string() + " --out " + (dir / "b").string()), 0);
  auto a = orlicz::read_json(dir / "a" / "rad" / "report.json");
  auto b = orlicz::read_json(dir / "b" / "rad" / "report.json");
  EXPECT_EQ(a["metrics"].dump(), b["metrics"].dump());
  EXPECT_EQ(a["results"].dump(), b["results"].dump());
  EXPECT_EQ(slurp(dir / "a" / "rad" / "tail.csv"), slurp(dir / "b" / "rad" / "tail.csv"));

  // The report alone recreates the run.
  ASSERT_EQ(cli("rademacher --config " + (dir / "a" / "rad" / "report.json").string() + " --out " + (dir / "c").string()), 0);
  const auto c = orlicz::read_json(dir / "c" / "rad" / "report.json");
  EXPECT_EQ(a["metrics"].dump(), c["metrics"].dump());

  // The seed flag overrides the file.
  ASSERT_EQ(cli("rademacher --config " + path.string() + " --seed 8 --out " + (dir / "d").string()), 0);
  const auto d = orlicz::read_json(dir / "d" / "rad" / "report.json");
  EXPECT_EQ(d["seed"], 8);
  EXPECT_NE(a["metrics"].dump(), d["metrics"].dump());
}

TEST(Cli, OutputRootFromEnvironment) {
  const auto dir = scratch("env");
  const auto path = put(dir, "c.json", square_config());
  const std::string cmd = "ORLICZ_OUT=" + (dir / "root").string() + " " + ORLICZ_CLI + " conjugate --config " +
                          path.string() + " > /dev/null 2>&1";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir / "root" / "square" / "report.json"));
}

TEST(Cli, MartingaleArtifacts) {
  const auto dir = scratch("martingale");
  json m = {{"name", "mg"},
            {"experiment", "martingale"},
            {"parameters",
             {{"spec", {{"kind", "simple"}, {"parameters", {{"B", 0.75}}}, {"n_max", 256}}},
              {"paths", 2000},
              {"checkpoints", {2, 8, 32, 128, 256}},
              {"save_paths", true},
              {"psi", {{"kind", "MR"}, {"parameters", {{"m", 4}}}}},
              {"nu", {{"kind", "MR"}, {"parameters", {{"m", 2}}}}}}}};
  ASSERT_EQ(cli("martingale --config " + put(dir, "m.json", m).string() + " --out " + dir.string()), 0);
  const auto out = dir / "mg";
  std::ifstream csv(out / "diagnostic_nu0.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "checkpoint,gamma_n,empirical_norm,bound");
  EXPECT_EQ(lines(out / "diagnostic_nu0.csv"), 6u);
  const auto pc = orlicz::read_paths(out / "paths.json");
  EXPECT_EQ(pc.paths.size(), 2000u);
  EXPECT_EQ(pc.times.size(), 5u);
}

TEST(CliSuite, EmptyManifestExitsZero) {
  const auto dir = scratch("suite_empty");
  std::ostringstream log;
  EXPECT_EQ(suite(put(dir, "m.json", {{"experiments", json::array()}}), dir / "out", log), 0);
  EXPECT_EQ(lines(dir / "out" / "summary.csv"), 1u);
}

TEST(CliSuite, DuplicateNamesAreRejected) {
  const auto dir = scratch("suite_dup");
  std::ostringstream log;
  const auto m = put(dir, "m.json", {{"experiments", {square_config(), square_config()}}});
  EXPECT_EQ(suite(m, dir / "out", log), kExitValidation);
  EXPECT_FALSE(fs::exists(dir / "out" / "summary.csv"));
  EXPECT_EQ(cli("suite --manifest " + m.string() + " --out " + (dir / "out").string()), kExitValidation);
}

TEST(CliSuite, InvalidMemberStopsTheSuiteBeforeRunning) {
  const auto dir = scratch("suite_invalid");
  std::ostringstream log;
  const auto m = put(dir, "m.json", {{"experiments", {square_config(), rademacher_config(0.4, 100)}}});
  EXPECT_EQ(suite(m, dir / "out", log), kExitValidation);
  EXPECT_FALSE(fs::exists(dir / "out" / "square"));
}

TEST(CliSuite, OneRowPerExperimentAndFailurePropagates) {
  const auto dir = scratch("suite_rows");
  auto failing = square_config();
  failing["name"] = "square-strict";
  failing["acceptance"] = {{{"metric", "biconjugate_residual"}, {"max", -1.0}}};
  put(dir, "member.json", square_config());
  const auto m = put(dir, "m.json", {{"experiments", {"member.json", failing}}});
  std::ostringstream log;
  EXPECT_EQ(suite(m, dir / "out", log), kExitAcceptance);
  const auto text = slurp(dir / "out" / "summary.csv");
  EXPECT_EQ(lines(dir / "out" / "summary.csv"), 3u);
  EXPECT_NE(text.find("square,conjugate,biconjugate_residual,"), std::string::npos);
  EXPECT_NE(text.find(",pass,0"), std::string::npos);
  EXPECT_NE(text.find(",fail,3"), std::string::npos);
}

TEST(CliSuite, AcceptanceManifestValidates) {
  const fs::path manifest = fs::path(ORLICZ_CONFIG_DIR) / "acceptance_suite.json";
  const auto m = orlicz::read_json(manifest);
  ASSERT_EQ(m["experiments"].size(), 12u);
  for (const auto& entry : m["experiments"]) {
    const auto cfg = ExperimentConfig::from_json(orlicz::read_json(manifest.parent_path() / entry.get<std::string>()));
    EXPECT_NO_THROW(prepare(cfg)) << cfg.name;
    EXPECT_FALSE(cfg.acceptance.empty()) << cfg.name;
  }
}

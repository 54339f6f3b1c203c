#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "orlicz/error.hpp"
#include "orlicz/io.hpp"

namespace fs = std::filesystem;
using orlicz::tools::ExperimentConfig;

namespace {

// Config parse failures still leave a report under <root>/<config stem>/.
int report_invalid(const fs::path& config, const fs::path& root, const std::string& message) {
  std::cerr << "orlicz: " << message << '\n';
  try {
    const fs::path dir = root / (config.stem().empty() ? fs::path("invalid-config") : config.stem());
    fs::create_directories(dir);
    orlicz::write_json(dir / "report.json", {{"config_file", config.string()},
                                             {"status", "validation"},
                                             {"exit_code", int(orlicz::tools::kExitValidation)},
                                             {"version", {{"orlicz", orlicz::tools::version()}}},
                                             {"errors", {{{"kind", "validation"}, {"message", message}}}}});
  } catch (const std::exception&) {
  }
  return orlicz::tools::kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orlicz-space verification experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", orlicz::tools::version());

  struct Args {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
  };
  Args args;
  std::string manifest;

  for (const auto& kind : orlicz::tools::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
    sub->add_option("--config", args.config, "JSON config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "overrides the config seed");
    sub->add_option("--out", args.out, "output root (overrides config and ORLICZ_OUT)");
  }
  auto* suite_cmd = app.add_subcommand("suite", "run every experiment in a manifest");
  suite_cmd->add_option("--manifest", manifest, "JSON manifest")->required()->check(CLI::ExistingFile);
  suite_cmd->add_option("--out", args.out, "output root (overrides manifest and ORLICZ_OUT)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : int(orlicz::tools::kExitValidation);
  }

  if (suite_cmd->parsed()) {
    std::optional<fs::path> out;
    if (args.out) out = *args.out;
    return orlicz::tools::suite(manifest, out, std::cout);
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  const fs::path root = args.out ? fs::path(*args.out) : orlicz::tools::default_output_root();
  ExperimentConfig cfg;
  try {
    auto j = orlicz::read_json(args.config);
    if (j.is_object() && !j.contains("experiment") && !j.contains("config")) j["experiment"] = kind;
    cfg = ExperimentConfig::from_json(j);
  } catch (const orlicz::Error& e) {
    return report_invalid(args.config, root, e.what());
  }
  if (cfg.kind != kind)
    return report_invalid(args.config, root, "config is a '" + cfg.kind + "' experiment, not '" + kind + "'");
  if (args.seed) cfg.seed = *args.seed;
  if (args.out) cfg.out = *args.out;

  const auto res = orlicz::tools::run(cfg);
  std::cout << cfg.name << ": " << res.status << ' ' << res.headline_metric << '=' << res.headline_value.dump()
            << "  (" << (res.dir / "report.json").string() << ")\n";
  for (const auto& e : res.report.value("errors", nlohmann::json::array()))
    std::cerr << "orlicz: " << e.value("message", "") << '\n';
  return res.exit_code;
}

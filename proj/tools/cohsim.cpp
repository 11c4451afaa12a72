// cohsim: run and validate coherence simulation scenarios.
//
// Exit codes: 0 success, 2 config validation failure, 3 numerical failure,
// 4 I/O failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cohsim/scenario.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

cohsim::Json read_document(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw cohsim::IoError("cannot read config " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  try {
    return cohsim::Json::parse(buf.str());
  } catch (const cohsim::Json::parse_error& e) {
    throw cohsim::ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
}

int report(const char* kind, const std::exception& e, int code) {
  std::cerr << "cohsim: " << kind << ": " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic field coherence simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  auto* run = app.add_subcommand("run", "run the scenario described by a config file");
  run->add_option("--config", config_path, "run document (JSON)")->required();
  auto* out_opt = run->add_option("--out", out_dir, "output directory (overrides output_dir)");
  auto* seed_opt = run->add_option("--seed", seed, "master seed (overrides master_seed)");
  run->add_option("--workers", workers, "worker threads; 0 uses every hardware thread")->capture_default_str();

  auto* validate = app.add_subcommand("validate", "parse and validate a config file without running it");
  validate->add_option("--config", config_path, "run document (JSON)")->required();

  app.add_subcommand("schema", "print the JSON schema of run documents");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    if (app.got_subcommand("schema")) {
      std::cout << cohsim::config_schema();
      return 0;
    }
    cohsim::ScenarioConfig cfg = cohsim::parse_scenario(read_document(config_path));
    if (app.got_subcommand("validate")) {
      std::cout << "ok: " << cohsim::to_string(cfg.scenario) << "\n";
      return 0;
    }
    if (*seed_opt) cohsim::set_master_seed(cfg, seed);
    const std::string dir = *out_opt ? out_dir : cfg.output_dir;

    const auto t0 = std::chrono::steady_clock::now();
    const cohsim::ScenarioOutput out = cohsim::run_scenario(cfg, workers);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto manifest = cohsim::write_run(cfg, out, dir, seconds);
    std::cout << "wrote " << manifest.files.size() + 1 << " files to " << dir << " in " << seconds << " s\n";
    return 0;
  } catch (const cohsim::IoError& e) {
    return report("I/O error", e, kExitIo);
  } catch (const cohsim::NumericalError& e) {
    return report("numerical failure", e, kExitNumerical);
  } catch (const cohsim::Error& e) {
    return report("invalid configuration", e, kExitConfig);
  } catch (const std::exception& e) {
    return report("I/O error", e, kExitIo);
  }
}

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cohsim/serialization.hpp"

namespace cohsim {

enum class ScenarioKind { MagyarMandel, WolfFiltered, ChiSweep, ErgodicityDemo };

std::string_view to_string(ScenarioKind k);

/// Linear sweep of one named parameter, both ends included.
struct SweepSpec {
  std::string parameter;
  double start = 0.0;
  double stop = 0.0;
  std::size_t steps = 1;

  RealVector values() const;
};

struct ScanSettings {
  int periods = 4;
  int points_per_period = 128;
  VisibilityMethod method = VisibilityMethod::Extrema;
};

/// One parsed and validated run document.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::MagyarMandel;
  std::uint64_t master_seed = 0;
  std::string output_dir = "out";
  TimeGrid grid;
  double carrier_omega0 = 100.0;

  // magyar_mandel, wolf_filtered
  std::optional<SourceModel> arm1;
  std::optional<SourceModel> arm2;
  ArmCorrelation correlation = ArmCorrelation::Independent;
  // ergodicity_demo
  std::optional<SourceModel> stationary;
  std::optional<SourceModel> nonstationary;
  double instant = 0.0;

  DetectorConfig detector;
  EnsembleSpec ensemble;
  std::optional<FilterSpec> filter;
  ScanSettings scan;
  std::optional<SweepSpec> sweep;

  // chi_sweep: windows [t_start, t_start + T]; t_start defaults to -T/2.
  std::vector<double> chi_T_values;
  std::optional<double> chi_t_start;
  bool chi_full_support = false;

  Json document;  ///< the input with the effective master_seed written back
};

/// Parse and fully validate a run document. Every window, delay reach and
/// passband is checked against the grid here, before any computation.
ScenarioConfig parse_scenario(const Json& doc);

/// Override the master seed (the CLI --seed flag).
void set_master_seed(ScenarioConfig& cfg, std::uint64_t seed);

struct OutputFile {
  std::string name;
  std::string content;
};

struct ScenarioOutput {
  std::vector<OutputFile> files;  ///< in write order; summary.json excluded
  Json summary;
};

ScenarioOutput run_magyar_mandel(const ScenarioConfig& cfg, unsigned workers = 1);
ScenarioOutput run_wolf_filtered(const ScenarioConfig& cfg, unsigned workers = 1);
ScenarioOutput run_chi_sweep(const ScenarioConfig& cfg, unsigned workers = 1);
ScenarioOutput run_ergodicity_demo(const ScenarioConfig& cfg, unsigned workers = 1);
ScenarioOutput run_scenario(const ScenarioConfig& cfg, unsigned workers = 1);

/// Checksummed record of one run.
struct RunManifest {
  struct Entry {
    std::string name;
    std::string sha256;
    std::size_t bytes = 0;
  };
  std::string config_sha256;
  std::uint64_t master_seed = 0;
  std::string version;
  std::string scenario;
  std::vector<Entry> files;
  double wall_clock_seconds = 0.0;

  Json to_json() const;
};

std::string sha256_hex(std::string_view data);
std::string artifact_version();

/// Write every output, then summary.json, then manifest.json (listing all
/// of the former) into `dir`. Throws IoError.
RunManifest write_run(const ScenarioConfig& cfg, const ScenarioOutput& out, const std::filesystem::path& dir,
                      double wall_clock_seconds);

/// The JSON schema for run documents.
const std::string& config_schema();

}  // namespace cohsim

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cohsim/detector.hpp"
#include "cohsim/interference.hpp"
#include "cohsim/spectral.hpp"

namespace cohsim {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double; "" for NaN.
std::string format_number(double x);

// JSON readers take the path of the object inside the enclosing document so
// that errors name the offending field.
TimeGrid time_grid_from_json(const Json& j, const std::string& path = "grid");
SourceModel source_model_from_json(const Json& j, const std::string& path = "source");
DetectorConfig detector_from_json(const Json& j, const std::string& path = "detector");
FilterSpec filter_from_json(const Json& j, const std::string& path = "filter");
EnsembleSpec ensemble_from_json(const Json& j, const std::string& path = "ensemble");

Json to_json(const TimeGrid& g);
Json to_json(const SourceModel& m);
Json to_json(const DetectorConfig& d);
Json to_json(const FilterSpec& f);
Json to_json(const VisibilityResult& v);
Json to_json(const SpectralCoherenceResult& mu);

std::string_view to_string(ArmCorrelation c);
ArmCorrelation arm_correlation_from_string(std::string_view s, const std::string& path = "correlation");
std::string_view to_string(ScanMode m);
std::string_view to_string(VisibilityMethod m);
VisibilityMethod visibility_method_from_string(std::string_view s, const std::string& path = "method");
std::string_view to_string(FilterShape s);

/// Rows of numbers under a header. NaN cells are written empty.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void add(std::vector<double> row) { rows.push_back(std::move(row)); }
  std::string str() const;
};

/// omega, re, im
CsvTable spectrum_csv(const EnvelopeSpectrum& s);
/// tau, intensity, std_error (std_error empty in single-shot mode)
CsvTable fringe_csv(const FringeScan& scan);
/// Mode, seed, detector and models of a scan, plus its visibility if given.
Json fringe_sidecar(const FringeScan& scan, const std::optional<VisibilityResult>& v = std::nullopt);

// Field access helpers shared with the scenario parser.
namespace json_field {
const Json& object(const Json& j, const std::string& path);
bool has(const Json& j, const char* key);
double number(const Json& j, const char* key, const std::string& path, std::optional<double> fallback = std::nullopt);
std::uint64_t unsigned_integer(const Json& j, const char* key, const std::string& path,
                               std::optional<std::uint64_t> fallback = std::nullopt);
std::string string(const Json& j, const char* key, const std::string& path,
                   std::optional<std::string> fallback = std::nullopt);
/// ConfigError for any key not in `allowed`.
void only_keys(const Json& j, std::initializer_list<std::string_view> allowed, const std::string& path);
std::string join(const std::string& path, const std::string& key);
}  // namespace json_field

}  // namespace cohsim

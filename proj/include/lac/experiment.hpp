#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lac/algorithm.hpp"
#include "lac/analysis.hpp"
#include "lac/chain.hpp"
#include "lac/field.hpp"
#include "lac/random_spacing.hpp"

namespace lac {

/// Sectioned experiment description ([chain], [field], [algorithm],
/// [analysis], [output], plus [field.<name>] terms for sum fields).
/// Every key has a documented default; unknown keys are rejected.
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig parse_ini(std::string_view text);
  /// INI file, a CSV whose `# ` preamble embeds a config, or a JSON report
  /// carrying `config_ini`.
  static ExperimentConfig load(const std::filesystem::path& path);

  /// `section.key=value` override; the key must exist in the schema.
  void set(std::string_view dotted_key, std::string_view value);
  std::optional<std::string> get(std::string_view dotted_key) const;

  /// Canonical INI text with every default resolved.
  std::string to_ini() const;
  nlohmann::json to_json() const;

  ChainConfig chain() const;
  MeasurementField field() const;
  AlgorithmSpec algorithm() const;
  bool has_seed() const;
  std::uint64_t seed() const;
  std::filesystem::path output_dir() const;

  std::string string_value(std::string_view dotted_key) const;
  double number(std::string_view dotted_key) const;
  long integer(std::string_view dotted_key) const;
  bool flag(std::string_view dotted_key) const;
  std::vector<double> number_list(std::string_view dotted_key) const;

 private:
  MeasurementField field_section(const std::string& section, const ChainConfig& chain,
                                 int depth) const;

  std::map<std::string, std::map<std::string, std::string>> values_;
};

/// Commands behind the CLI. Each writes its files into config.output_dir()
/// and returns the paths written.
namespace commands {

std::vector<std::filesystem::path> simulate(const ExperimentConfig& config);
std::vector<std::filesystem::path> freq_spatial(const ExperimentConfig& config);
std::vector<std::filesystem::path> freq_temporal(const ExperimentConfig& config);
std::vector<std::filesystem::path> noise(const ExperimentConfig& config);
std::vector<std::filesystem::path> spacing(const ExperimentConfig& config);
std::vector<std::filesystem::path> figures(const ExperimentConfig& config);

/// Dispatch by CLI name; throws validation for unknown commands.
std::vector<std::filesystem::path> run(std::string_view name, const ExperimentConfig& config);

}  // namespace commands

/// Figure grids.
std::vector<double> figure_grid_origin();
std::vector<double> figure_grid_full();
std::vector<double> figure_rhos();
std::vector<int> figure_window_lengths();

}  // namespace lac

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hyperlab/rational.hpp"

namespace hyperlab {

/// Everything a `check` run needs. Unset optionals take suite defaults.
struct ScenarioConfig {
  std::string suite = "all";
  std::string group = "free:2";
  std::string metric = "word";
  double scale = 1.0;
  /// Longest word a small-cancellation word metric resolves.
  int lookup_radius = 7;
  /// Absorbing radius of the Green metric solve; 0 picks the largest radius
  /// up to 12 whose ball fits under max_ball.
  int truncation = 0;
  std::optional<int> radius;
  double K = 1.0;
  std::optional<double> C;
  std::optional<std::vector<double>> p;
  std::optional<int> depth;
  /// Delta window radius and element radius of the cocycle suite.
  int window = 3;
  int elements = 2;
  /// Single element for the cocycle suite.
  std::optional<std::string> element;
  std::uint64_t seed = 7;
  std::string format = "json";
  std::string out;
  std::size_t max_ball = 2'000'000;
  std::uint64_t max_pairs = 50'000'000;
  /// Adds wall-clock durations, which makes reports non-reproducible.
  bool timing = false;
};

const std::vector<std::string>& suite_names();

/// Applies one key=value setting; keys match the long flag names.
void apply_setting(ScenarioConfig& cfg, std::string_view key, std::string_view value);
/// Reads flat key=value lines; blank lines and lines starting with # are skipped.
void load_config_file(ScenarioConfig& cfg, const std::string& path);
/// "grid", a single number, or a comma-separated list.
std::vector<double> parse_p_list(std::string_view text);
void validate(const ScenarioConfig& cfg);

using FieldValue = std::variant<bool, std::int64_t, double, std::string, Rational>;

struct Field {
  std::string key;
  FieldValue value;
};

using Fields = std::vector<Field>;

struct CheckResult {
  std::string name;
  bool passed = true;
  Fields fields;
  std::vector<Fields> records;
  /// Reproducer for the first failure: seed, indices and elements.
  std::optional<std::string> witness;
};

struct SuiteReport {
  std::string suite;
  /// "pass", "fail" or "skipped".
  std::string status = "pass";
  std::string reason;
  std::vector<CheckResult> checks;
  double duration_ms = 0.0;
};

struct ScenarioReport {
  ScenarioConfig config;
  std::vector<SuiteReport> suites;
  bool passed() const;
};

/// Runs the selected suite, or every suite in a fixed order for "all".
/// A suite that does not support the group is skipped under "all" and throws
/// UnsupportedError otherwise.
ScenarioReport run_scenario(const ScenarioConfig& cfg);

/// JSON object with schema "1", or CSV with the columns
/// suite,check,passed,item,field,value.
void emit_report(const ScenarioReport& report, std::string_view format, std::ostream& out);

/// 0 when every check passed, 1 otherwise.
int exit_code(const ScenarioReport& report);

}  // namespace hyperlab

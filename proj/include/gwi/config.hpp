#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwi/branching.hpp"
#include "gwi/partial_sum.hpp"

namespace gwi {

enum class ReportFormat { csv, json };

std::string to_string(ReportFormat format);
ReportFormat parse_report_format(const std::string& text);

/// Flat key = value configuration; '#' starts a comment. Every key is listed
/// in config_keys() and anything else is rejected.
struct ExperimentConfig {
  // model
  OffspringFamily offspring = OffspringFamily::bernoulli;
  double offspring_mean = 0.5;
  double alpha = 0.5;
  double stationarity_tolerance = 1e-4;

  // scales
  std::uint64_t n = 10'000;
  std::uint64_t n_small = 100;
  std::uint64_t copies = 100;
  std::size_t reps = 10'000;
  std::size_t truncated_mean_reps = 1'000'000;
  std::size_t paths = 10;
  std::vector<double> grid{1.0};
  std::optional<CenteringKind> centering;  // unset: none for alpha < 1, full_mean above
  std::optional<double> gamma1;
  std::optional<double> gamma2;

  // check parameters
  double tail_level = 0.1;
  std::uint64_t b_plus_d = 2;
  std::uint64_t d_max = 20;
  std::uint64_t lag_small = 2;
  std::uint64_t lag_large = 20;
  double clip_x = 1.0;
  double theta = 1.0;
  std::uint64_t tail_lag = 1;
  double quantile_near = 0.999;
  double quantile_far = 0.9999;

  // run
  std::uint64_t seed = 1;
  std::string out_dir = "gwi_out";
  ReportFormat format = ReportFormat::csv;
  bool timing = false;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;  // tolerance.<check> overrides

  GwiModel model() const;
  CenteringKind effective_centering() const;
  double tolerance(const std::string& check, double fallback) const;
};

struct ConfigKey {
  std::string name;
  std::string description;
};

/// Documented keys, in serialisation order.
const std::vector<ConfigKey>& config_keys();
/// Names accepted by `checks`.
const std::vector<std::string>& known_checks();

/// Throws config_error on syntax errors, unknown keys or invalid values.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical text; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);
/// Re-validates model invariants; alpha = 1 is rejected.
void validate(const ExperimentConfig& config);

}  // namespace gwi

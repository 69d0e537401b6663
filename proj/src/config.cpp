#include "gwi/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "gwi/error.hpp"

namespace gwi {

namespace {

[[noreturn]] void config_fail(const std::string& what) { fail(ErrorKind::config_error, what); }

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    config_fail("key '" + key + "': '" + text + "' is not a finite number");
  }
  return value;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    // allow scientific notation for integral values such as 1e6
    const double d = parse_double(key, text);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19) {
      config_fail("key '" + key + "': '" + text + "' is not a non-negative integer");
    }
    return static_cast<std::uint64_t>(d);
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "on" || text == "true") return true;
  if (text == "off" || text == "false") return false;
  config_fail("key '" + key + "': expected on/off, got '" + text + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // prefer the shortest form that still round-trips
  for (int digits = 1; digits <= 17; ++digits) {
    char shorter[64];
    std::snprintf(shorter, sizeof shorter, "%.*g", digits, v);
    if (std::stod(shorter) == v) return shorter;
  }
  return buf;
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_double(values[i]);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out;
}

struct KeyHandler {
  ConfigKey key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
KeyHandler u64_key(std::string name, std::string description, T ExperimentConfig::*field) {
  return {{name, std::move(description)},
          [name, field](ExperimentConfig& c, const std::string& v) {
            c.*field = static_cast<T>(parse_u64(name, v));
          },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

KeyHandler double_key(std::string name, std::string description,
                      double ExperimentConfig::*field) {
  return {{name, std::move(description)},
          [name, field](ExperimentConfig& c, const std::string& v) {
            c.*field = parse_double(name, v);
          },
          [field](const ExperimentConfig& c) { return format_double(c.*field); }};
}

KeyHandler optional_double_key(std::string name, std::string description,
                               std::optional<double> ExperimentConfig::*field) {
  return {{name, std::move(description)},
          [name, field](ExperimentConfig& c, const std::string& v) {
            if (v == "auto") {
              (c.*field).reset();
            } else {
              c.*field = parse_double(name, v);
            }
          },
          [field](const ExperimentConfig& c) {
            return (c.*field) ? format_double(*(c.*field)) : std::string("auto");
          }};
}

const std::vector<KeyHandler>& handlers() {
  static const std::vector<KeyHandler> table = [] {
    std::vector<KeyHandler> t;
    t.push_back({{"offspring", "offspring family: bernoulli | poisson | geometric"},
                 [](ExperimentConfig& c, const std::string& v) {
                   try {
                     c.offspring = parse_offspring_family(v);
                   } catch (const Error& e) {
                     config_fail(e.what());
                   }
                 },
                 [](const ExperimentConfig& c) { return to_string(c.offspring); }});
    t.push_back(double_key("offspring_mean", "offspring mean m in [0,1)",
                           &ExperimentConfig::offspring_mean));
    t.push_back(double_key("alpha", "immigration tail index in (0,2), alpha != 1",
                           &ExperimentConfig::alpha));
    t.push_back(double_key("stationarity_tolerance", "burn-in tolerance for stationary draws",
                           &ExperimentConfig::stationarity_tolerance));
    t.push_back(u64_key("n", "time horizon n", &ExperimentConfig::n));
    t.push_back(u64_key("n_small", "smaller horizon for two-scale trend checks",
                        &ExperimentConfig::n_small));
    t.push_back(u64_key("copies", "N, independent copies in iterated aggregation",
                        &ExperimentConfig::copies));
    t.push_back(u64_key("reps", "Monte Carlo replications", &ExperimentConfig::reps));
    t.push_back(u64_key("truncated_mean_reps", "draws for truncated-mean estimates",
                        &ExperimentConfig::truncated_mean_reps));
    t.push_back(u64_key("paths", "paths written by `simulate`", &ExperimentConfig::paths));
    t.push_back({{"grid", "comma-separated time points 0 < t_1 < ... < t_d"},
                 [](ExperimentConfig& c, const std::string& v) {
                   c.grid.clear();
                   for (const auto& item : split_list(v)) c.grid.push_back(parse_double("grid", item));
                 },
                 [](const ExperimentConfig& c) { return format_list(c.grid); }});
    t.push_back({{"centering", "auto | truncated_mean | full_mean | none"},
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v == "auto") {
                     c.centering.reset();
                     return;
                   }
                   try {
                     c.centering = parse_centering_kind(v);
                   } catch (const Error& e) {
                     config_fail(e.what());
                   }
                 },
                 [](const ExperimentConfig& c) {
                   return c.centering ? to_string(*c.centering) : std::string("auto");
                 }});
    t.push_back(optional_double_key("gamma1", "block exponent gamma1 or auto (gamma2/2)",
                                    &ExperimentConfig::gamma1));
    t.push_back(optional_double_key("gamma2", "block exponent gamma2 or auto (midpoint)",
                                    &ExperimentConfig::gamma2));
    t.push_back(double_key("tail_level", "immigration tail probability of the tail-ratio threshold",
                           &ExperimentConfig::tail_level));
    t.push_back(u64_key("b_plus_d", "d for the b+ Monte Carlo check", &ExperimentConfig::b_plus_d));
    t.push_back(u64_key("d_max", "rows of the b+ table", &ExperimentConfig::d_max));
    t.push_back(u64_key("lag_small", "smaller d of the anti-clustering trend",
                        &ExperimentConfig::lag_small));
    t.push_back(u64_key("lag_large", "larger d of the anti-clustering trend",
                        &ExperimentConfig::lag_large));
    t.push_back(double_key("clip_x", "clipping level x of the anti-clustering statistic",
                           &ExperimentConfig::clip_x));
    t.push_back(double_key("theta", "CF argument of the mixing residual", &ExperimentConfig::theta));
    t.push_back(u64_key("tail_lag", "lag k of the tail-process check", &ExperimentConfig::tail_lag));
    t.push_back(double_key("quantile_near", "nearer tail-process threshold (stationary quantile)",
                           &ExperimentConfig::quantile_near));
    t.push_back(double_key("quantile_far", "farther tail-process threshold (stationary quantile)",
                           &ExperimentConfig::quantile_far));
    t.push_back(u64_key("seed", "master seed", &ExperimentConfig::seed));
    t.push_back({{"out_dir", "output directory"},
                 [](ExperimentConfig& c, const std::string& v) {
                   if (v.empty()) config_fail("out_dir must not be empty");
                   c.out_dir = v;
                 },
                 [](const ExperimentConfig& c) { return c.out_dir; }});
    t.push_back({{"format", "report format: csv | json"},
                 [](ExperimentConfig& c, const std::string& v) {
                   c.format = parse_report_format(v);
                 },
                 [](const ExperimentConfig& c) { return to_string(c.format); }});
    t.push_back({{"timing", "on: record wall-clock seconds (reports are then not reproducible)"},
                 [](ExperimentConfig& c, const std::string& v) { c.timing = parse_bool("timing", v); },
                 [](const ExperimentConfig& c) { return std::string(c.timing ? "on" : "off"); }});
    t.push_back({{"checks", "comma-separated check ids, run in the given order"},
                 [](ExperimentConfig& c, const std::string& v) {
                   c.checks = split_list(v);
                   for (const auto& id : c.checks) {
                     const auto& known = known_checks();
                     if (std::find(known.begin(), known.end(), id) == known.end()) {
                       config_fail("unknown check '" + id + "'");
                     }
                   }
                 },
                 [](const ExperimentConfig& c) { return join(c.checks); }});
    return t;
  }();
  return table;
}

const std::string kTolerancePrefix = "tolerance.";

}  // namespace

std::string to_string(ReportFormat format) {
  return format == ReportFormat::csv ? "csv" : "json";
}

ReportFormat parse_report_format(const std::string& text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  config_fail("unknown report format '" + text + "' (expected csv or json)");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& h : handlers()) out.push_back(h.key);
    out.push_back({kTolerancePrefix + "<check>", "override the default tolerance of a check"});
    return out;
  }();
  return keys;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> ids = {
      "constants",       "tail_ratio",   "b_plus",          "limit_ks",
      "strict_stability", "self_consistency", "centering_limit", "tail_process",
      "anti_clustering", "mixing",       "block_sequence",  "iterated",
      "hill",
  };
  return ids;
}

GwiModel ExperimentConfig::model() const {
  OffspringLaw law = OffspringLaw::bernoulli(0.0);
  switch (offspring) {
    case OffspringFamily::bernoulli: law = OffspringLaw::bernoulli(offspring_mean); break;
    case OffspringFamily::poisson: law = OffspringLaw::poisson(offspring_mean); break;
    case OffspringFamily::geometric: law = OffspringLaw::geometric(offspring_mean); break;
  }
  return GwiModel(law, ImmigrationLaw(alpha), stationarity_tolerance);
}

CenteringKind ExperimentConfig::effective_centering() const {
  if (centering) return *centering;
  return alpha < 1.0 ? CenteringKind::none : CenteringKind::full_mean;
}

double ExperimentConfig::tolerance(const std::string& check, double fallback) const {
  const auto it = tolerances.find(check);
  return it == tolerances.end() ? fallback : it->second;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      config_fail("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) {
      config_fail("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    if (key.rfind(kTolerancePrefix, 0) == 0) {
      const std::string check = key.substr(kTolerancePrefix.size());
      const auto& known = known_checks();
      if (std::find(known.begin(), known.end(), check) == known.end()) {
        config_fail("line " + std::to_string(line_no) + ": unknown check in '" + key + "'");
      }
      const double tol = parse_double(key, value);
      if (!(tol >= 0.0)) config_fail("key '" + key + "': tolerance must be non-negative");
      config.tolerances[check] = tol;
      continue;
    }
    const auto& table = handlers();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const KeyHandler& h) { return h.key.name == key; });
    if (it == table.end()) {
      config_fail("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->set(config, value);
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_fail("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& h : handlers()) out += h.key.name + " = " + h.get(config) + "\n";
  for (const auto& [check, tol] : config.tolerances) {
    out += kTolerancePrefix + check + " = " + format_double(tol) + "\n";
  }
  return out;
}

void validate(const ExperimentConfig& config) {
  if (config.alpha == 1.0) {
    config_fail(
        "alpha = 1 is excluded: the limit theorems behind these checks cannot be applied for "
        "alpha = 1, since the 1-stable limit would have to be non-negative while its support "
        "is the whole real line");
  }
  try {
    (void)config.model();
    (void)FidisGrid(config.grid);
  } catch (const Error& e) {
    config_fail(e.what());
  }
  if (config.n < 1 || config.n_small < 1) config_fail("n and n_small must be >= 1");
  if (config.copies < 1) config_fail("copies must be >= 1");
  if (config.reps < 1) config_fail("reps must be >= 1");
  if (!(config.tail_level > 0.0 && config.tail_level < 1.0)) {
    config_fail("tail_level must lie in (0,1)");
  }
  if (!(config.quantile_near > 0.0 && config.quantile_near < config.quantile_far &&
        config.quantile_far < 1.0)) {
    config_fail("need 0 < quantile_near < quantile_far < 1");
  }
  if (config.lag_small >= config.lag_large) config_fail("need lag_small < lag_large");
  if (!(config.clip_x > 0.0)) config_fail("clip_x must be positive");
  if (config.b_plus_d < 1 || config.d_max < 1) config_fail("b_plus_d and d_max must be >= 1");
  if (config.centering) {
    try {
      require_centering_valid(*config.centering, config.alpha);
    } catch (const Error& e) {
      config_fail(e.what());
    }
  }
}

}  // namespace gwi

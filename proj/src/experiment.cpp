#include "gwi/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "gwi/error.hpp"
#include "gwi/partial_sum.hpp"
#include "gwi/stable_law.hpp"

namespace gwi {

namespace {

struct CheckContext {
  const ExperimentConfig& config;
  Exec exec;
  std::uint64_t seed;
  std::string id;
  std::vector<ReportEntry> entries;
  std::vector<std::pair<std::string, Table>> tables;

  void add(ReportEntry e) { entries.push_back(std::move(e)); }
  ReportEntry entry(std::string statistic, double estimate, double se, double target,
                    double tolerance) const {
    return make_entry(id, std::move(statistic), estimate, se, target, tolerance);
  }
  void table(std::string name, Table t) { tables.emplace_back(std::move(name), std::move(t)); }
};

double relative(double tol, double target) {
  return target != 0.0 ? tol * std::abs(target) : tol;
}

// pass iff estimate > bound
ReportEntry one_sided(const CheckContext& ctx, std::string statistic, double estimate,
                      double se, double bound) {
  ReportEntry e = ctx.entry(std::move(statistic), estimate, se, 0.0, bound);
  e.pass = estimate > bound;
  return e;
}

// Z_t + c t with c = alpha/(1-alpha) is strictly stable, so its law at time t
// is t^(1/alpha) (Z_1 + c); without the drift the location moves by -c t.
StableParams law_at(const GwiModel& model, double t, bool with_drift) {
  StableParams p = limit_law(model.offspring_mean(), model.alpha());
  const double c = model.alpha() / (1.0 - model.alpha());
  p.gamma *= std::pow(t, 1.0 / model.alpha());
  p.delta = with_drift ? 0.0 : -c * t;
  return p;
}

Table ecdf_table(std::vector<double> sample, const StableParams& law) {
  std::sort(sample.begin(), sample.end());
  Table t;
  t.header = {"x", "empirical_cdf", "model_cdf"};
  const std::size_t rows = std::min<std::size_t>(sample.size(), 500);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t i = rows == 1 ? 0 : r * (sample.size() - 1) / (rows - 1);
    t.rows.push_back({sample[i], static_cast<double>(i + 1) / static_cast<double>(sample.size()),
                      stable_cdf(law, sample[i])});
  }
  return t;
}

Table ecf_table(const std::vector<double>& sample, const StableParams& law,
                const std::vector<double>& thetas) {
  Table t;
  t.header = {"theta", "ecf_re", "ecf_im", "cf_re", "cf_im"};
  for (double theta : thetas) {
    const auto e = empirical_cf(sample, theta);
    const auto c = stable_cf(law, theta);
    t.rows.push_back({theta, e.real(), e.imag(), c.real(), c.imag()});
  }
  return t;
}

double immigration_threshold(double alpha, double level) {
  // (floor(x)+1)^-alpha = level
  const double v = std::pow(level, -1.0 / alpha) - 1.0;
  const double nearest = std::round(v);
  return std::abs(v - nearest) <= 1e-9 * std::max(1.0, v) ? nearest : std::floor(v);
}

BlockSequence configured_blocks(const ExperimentConfig& c, std::uint64_t n) {
  if (!c.gamma1 && !c.gamma2) return default_block_sequence(n, c.alpha);
  const double g2 = c.gamma2 ? *c.gamma2 : [&] {
    const auto r = gamma2_range(c.alpha);
    return 0.5 * (r.lo + r.hi);
  }();
  const double g1 = c.gamma1 ? *c.gamma1 : 0.5 * g2;
  return block_sequence(n, g1, g2, c.alpha);
}

double centre_value(CheckContext& ctx, const GwiModel& model, CenteringKind kind, double a_n,
                    std::uint64_t salt) {
  switch (kind) {
    case CenteringKind::none: return 0.0;
    case CenteringKind::full_mean: return stationary_mean(model);
    case CenteringKind::truncated_mean:
      return truncated_mean(model, a_n, ctx.config.truncated_mean_reps, ctx.seed ^ salt, ctx.exec)
          .value;
  }
  return 0.0;
}

// Checks ------------------------------------------------------------------------

void check_constants(CheckContext& ctx) {
  const auto& c = ctx.config;
  const double alpha = c.alpha;
  const double m = c.offspring_mean;
  // Gamma(2-a)/(1-a) = Gamma(1-a) for a != 1
  const double reference = std::tgamma(1.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0);
  ctx.add(ctx.entry("C_alpha", c_alpha(alpha), 0.0, reference, 1e-10));
  ctx.add(ctx.entry("C_alpha(1)", c_alpha(1.0), 0.0, std::numbers::pi / 2.0, 0.0));
  ctx.add(ctx.entry("C_alpha(1+1e-4)", c_alpha(1.0 + 1e-4), 0.0, std::numbers::pi / 2.0, 1e-3));
  ctx.add(ctx.entry("C_alpha(1-1e-4)", c_alpha(1.0 - 1e-4), 0.0, std::numbers::pi / 2.0, 1e-3));
  const double k = limit_scale_K(m, alpha);
  ctx.add(ctx.entry("K", k, 0.0, (1.0 - std::pow(m, alpha)) / std::pow(1.0 - m, alpha), 1e-12));

  const auto table = b_plus_sequence(m, alpha, c.d_max);
  ctx.add(ctx.entry("b_plus(1)", table.terms.front().b_plus, 0.0, 1.0,
                    ctx.config.tolerance("constants", 1e-12)));
  ctx.add(ctx.entry("increment(" + std::to_string(c.d_max) + ")", table.terms.back().increment,
                    0.0, table.c_plus, 1e-3));
  Table t;
  t.header = {"d", "b_plus", "increment"};
  for (const auto& term : table.terms) {
    t.rows.push_back({static_cast<double>(term.d), term.b_plus, term.increment});
  }
  ctx.table("b_plus_table", std::move(t));
}

void check_tail_ratio(CheckContext& ctx) {
  const auto model = ctx.config.model();
  const double x = immigration_threshold(model.alpha(), ctx.config.tail_level);
  const auto r = stationary_tail_ratio(model, x, ctx.config.reps, ctx.seed, ctx.exec);
  ctx.add(ctx.entry("pi(x,inf)/P(eps>x)", r.ratio, r.std_error, r.target,
                    relative(ctx.config.tolerance("tail_ratio", 0.10), r.target)));
}

void check_b_plus(CheckContext& ctx) {
  const auto model = ctx.config.model();
  const auto d = ctx.config.b_plus_d;
  const auto r = b_plus_mc(model, d, ctx.config.n, ctx.config.reps, ctx.seed, ctx.exec);
  const std::string suffix = "(d=" + std::to_string(d) + ")";
  ctx.add(ctx.entry("n P(S_d > a_n)" + suffix, r.b_plus.value, r.b_plus.std_error, r.target,
                    relative(ctx.config.tolerance("b_plus", 0.10), r.target)));
  ctx.add(ctx.entry("n P(S_d <= -a_n)" + suffix, r.b_minus, 0.0, 0.0, 0.0));
}

void check_limit_ks(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  model.require_limit_theorem_range();
  const CenteringKind kind = c.effective_centering();
  require_centering_valid(kind, model.alpha());
  const double t = c.grid.back();
  const StableParams law = law_at(model, t, kind != CenteringKind::truncated_mean);

  auto ks_at = [&](std::uint64_t n, std::uint64_t salt) {
    const double a_n = norming_sequence(model, n);
    const Centering centering{kind, centre_value(ctx, model, kind, a_n, salt)};
    auto sample = scaled_sum_sample(model, n, a_n, centering, t, c.reps, ctx.seed ^ salt, ctx.exec);
    const double ks = ks_distance(sample, law, ctx.exec);
    return std::pair{ks, std::move(sample)};
  };
  auto [ks_large, sample] = ks_at(c.n, 0x1);
  auto [ks_small, unused] = ks_at(c.n_small, 0x2);
  (void)unused;
  ctx.add(ctx.entry("ks(n=" + std::to_string(c.n) + ")", ks_large, 0.0, 0.0,
                    c.tolerance("limit_ks", 0.05)));
  ctx.add(one_sided(ctx, "ks(n=" + std::to_string(c.n_small) + ") - ks(n=" + std::to_string(c.n) +
                             ") > 0",
                    ks_small - ks_large, 0.0, 0.0));
  ctx.table("ecdf", ecdf_table(std::move(sample), law));
}

std::vector<double> stable_sum_sample(const StableParams& law, std::uint64_t copies,
                                      std::size_t reps, std::uint64_t seed, Exec exec) {
  const double scale = std::pow(static_cast<double>(copies), -1.0 / law.alpha);
  return map_indexed(reps, exec, [&](std::size_t i) {
    Rng rng = make_rng(seed, Stream::stable, i);
    double sum = 0.0;
    for (std::uint64_t j = 0; j < copies; ++j) sum += stable_sample(law, rng);
    return scale * sum;
  });
}

void check_strict_stability(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  model.require_limit_theorem_range();
  const StableParams law = limit_law(model.offspring_mean(), model.alpha());
  auto sample = stable_sum_sample(law, c.copies, c.reps, ctx.seed, ctx.exec);
  const double ks = ks_distance(sample, law, ctx.exec);
  ctx.add(ctx.entry("ks(N=" + std::to_string(c.copies) + ")", ks, 0.0, 0.0,
                    c.tolerance("strict_stability", 0.02)));
  ctx.table("ecdf", ecdf_table(std::move(sample), law));
}

void check_self_consistency(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  model.require_limit_theorem_range();
  const StableParams law = limit_law(model.offspring_mean(), model.alpha());
  const auto sample = stable_sum_sample(law, 1, c.reps, ctx.seed, ctx.exec);
  const double tol = c.tolerance("self_consistency", 0.01);
  ctx.add(ctx.entry("ks(sampler, cdf)", ks_distance(sample, law, ctx.exec), 0.0, 0.0, tol));
  const auto thetas = theta_grid(-5.0, 5.0, 21);
  const auto ecf = ecf_distance(sample, law, thetas, ctx.exec);
  ctx.add(ctx.entry("ecf distance on [-5,5]", ecf.distance, 0.0, 0.0, tol));
  ctx.table("ecf", ecf_table(sample, law, thetas));
}

void check_centering_limit(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  const double t = c.grid.back();
  const auto r = centering_limit_check(model, c.n, t, c.truncated_mean_reps, ctx.seed, ctx.exec);
  const std::string statistic = model.alpha() < 1.0 ? "[nt] E(X 1{X<=a_n}) / a_n"
                                                    : "[nt] E(X 1{X>a_n}) / a_n";
  ctx.add(ctx.entry(statistic, r.estimate.value, r.estimate.std_error, r.target,
                    relative(c.tolerance("centering_limit", 0.15), r.target)));
}

void check_tail_process(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  const auto pairs = simulate_tail_pairs(model, c.tail_lag, c.reps, ctx.seed, ctx.exec);
  const double tol = c.tolerance("tail_process", 0.10);
  Table t;
  t.header = {"quantile", "threshold", "hits", "q25", "median", "q75"};
  double gap_near = 0.0;
  double gap_far = 0.0;
  for (double q : {c.quantile_near, c.quantile_far}) {
    const double threshold = tail_quantile(pairs, q);
    const auto r = tail_process_check(pairs, threshold, model.offspring_mean());
    std::ostringstream name;
    name << "median X_k/X_0 | X_0 > q" << q;
    const double se = 1.2533 * r.iqr / 1.349 / std::sqrt(static_cast<double>(r.hits));
    ctx.add(ctx.entry(name.str(), r.median, se, r.target, relative(tol, r.target)));
    (q == c.quantile_near ? gap_near : gap_far) = std::abs(r.median - r.target);
    t.rows.push_back({q, threshold, static_cast<double>(r.hits), r.q25, r.median, r.q75});
  }
  ctx.add(one_sided(ctx, "|median - m^k| (near) - |median - m^k| (far) > 0", gap_near - gap_far,
                    0.0, 0.0));
  ctx.table("quartiles", std::move(t));
}

void check_anti_clustering(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  const auto blocks = configured_blocks(c, c.n);
  AntiClusteringSpec spec;
  spec.n = c.n;
  spec.m_n = blocks.m_n;
  spec.x = c.clip_x;
  spec.reps = c.reps;
  spec.variant = c.effective_centering() == CenteringKind::full_mean
                     ? AntiClusteringVariant::centred
                     : AntiClusteringVariant::plain;
  const auto r = anti_clustering_decrease(model, spec, c.lag_small, c.lag_large, ctx.seed, ctx.exec);
  const double band = c.tolerance("anti_clustering", 2.0);
  ctx.add(one_sided(ctx,
                    "stat(d=" + std::to_string(c.lag_small) + ") - stat(d=" +
                        std::to_string(c.lag_large) + ") > band*se",
                    r.difference.value, r.difference.std_error, band * r.difference.std_error));
  Table t;
  t.header = {"d", "statistic", "stderr"};
  t.rows.push_back({static_cast<double>(c.lag_small), r.small_lag.statistic.value,
                    r.small_lag.statistic.std_error});
  t.rows.push_back({static_cast<double>(c.lag_large), r.large_lag.statistic.value,
                    r.large_lag.statistic.std_error});
  ctx.table("statistics", std::move(t));
}

void check_mixing(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  const double t = c.grid.back();
  const auto small = mixing_residual(model, configured_blocks(c, c.n_small), t, c.theta, c.reps,
                                     ctx.seed ^ 0x1, ctx.exec);
  const auto large = mixing_residual(model, configured_blocks(c, c.n), t, c.theta, c.reps,
                                     ctx.seed ^ 0x2, ctx.exec);
  const double se = std::hypot(small.std_error, large.std_error);
  const double band = c.tolerance("mixing", 2.0);
  ctx.add(one_sided(ctx,
                    "residual(n=" + std::to_string(c.n_small) + ") - residual(n=" +
                        std::to_string(c.n) + ") > band*se",
                    small.residual - large.residual, se, band * se));
  Table tab;
  tab.header = {"n", "m_n", "blocks", "residual", "stderr"};
  tab.rows.push_back({static_cast<double>(c.n_small), static_cast<double>(small.m_n),
                      static_cast<double>(small.blocks), small.residual, small.std_error});
  tab.rows.push_back({static_cast<double>(c.n), static_cast<double>(large.m_n),
                      static_cast<double>(large.blocks), large.residual, large.std_error});
  ctx.table("residuals", std::move(tab));
}

void check_block_sequence(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto range = gamma2_range(c.alpha);
  ReportEntry e = ctx.entry("gamma2 admissible", c.gamma2.value_or(0.5 * (range.lo + range.hi)),
                            0.0, 0.5 * (range.lo + range.hi), 0.5 * (range.hi - range.lo));
  try {
    const auto b = configured_blocks(c, c.n);
    e.estimate = b.gamma2;
    e.pass = true;
  } catch (const Error&) {
    e.pass = false;
  }
  ctx.add(e);
}

void check_hill(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  const auto sample = stationary_sample(model, c.reps, ctx.seed, Stream::user, ctx.exec);
  std::vector<double> values(sample.begin(), sample.end());
  const double estimate = hill_estimator(values);
  ctx.add(ctx.entry("hill(k=sqrt(N))", estimate, 0.0, model.alpha(),
                    relative(c.tolerance("hill", 0.10), model.alpha())));
}

std::vector<double> iterated_sample(const ExperimentConfig& c, const GwiModel& model,
                                    std::uint64_t seed, Exec exec, Table* raw) {
  const CenteringKind kind = c.effective_centering();
  require(model.alpha() < 1.0 ? kind != CenteringKind::full_mean
                              : kind == CenteringKind::full_mean,
          "iterated aggregation needs truncated_mean or none centering for alpha < 1 and "
          "full_mean for alpha > 1");
  const FidisGrid grid(c.grid);
  const double a_n = norming_sequence(model, c.n);
  const double centre = kind == CenteringKind::full_mean ? stationary_mean(model)
                        : kind == CenteringKind::none
                            ? 0.0
                            : truncated_mean(model, a_n, c.truncated_mean_reps, seed ^ 0x7, exec)
                                  .value;
  const Centering centering{kind, centre};
  // replication r aggregates its own N copies; copies run in parallel inside
  std::vector<double> last(c.reps);
  for (std::size_t r = 0; r < c.reps; ++r) {
    std::uint64_t mix = seed + r;
    const auto fidis =
        iterated_aggregate(model, c.n, c.copies, centering, grid, splitmix64(mix), exec);
    last[r] = fidis.values.back();
    if (raw) {
      for (std::size_t l = 0; l < fidis.values.size(); ++l) {
        raw->rows.push_back({static_cast<double>(r), c.grid[l], fidis.values[l]});
      }
    }
  }
  return last;
}

void check_iterated(CheckContext& ctx) {
  const auto& c = ctx.config;
  const auto model = c.model();
  model.require_limit_theorem_range();
  const StableParams law = law_at(model, c.grid.back(), true);
  auto sample = iterated_sample(c, model, ctx.seed, ctx.exec, nullptr);
  const double ks = ks_distance(sample, law, ctx.exec);
  ctx.add(ctx.entry("ks(n=" + std::to_string(c.n) + ", N=" + std::to_string(c.copies) + ")", ks,
                    0.0, 0.0, c.tolerance("iterated", 0.05)));
  ctx.table("ecdf", ecdf_table(std::move(sample), law));
}

const std::map<std::string, std::function<void(CheckContext&)>>& check_table() {
  static const std::map<std::string, std::function<void(CheckContext&)>> table = {
      {"constants", check_constants},
      {"tail_ratio", check_tail_ratio},
      {"b_plus", check_b_plus},
      {"limit_ks", check_limit_ks},
      {"strict_stability", check_strict_stability},
      {"self_consistency", check_self_consistency},
      {"centering_limit", check_centering_limit},
      {"tail_process", check_tail_process},
      {"anti_clustering", check_anti_clustering},
      {"mixing", check_mixing},
      {"block_sequence", check_block_sequence},
      {"iterated", check_iterated},
      {"hill", check_hill},
  };
  return table;
}

std::string join_path(const std::string& dir, const std::string& file) {
  return dir.empty() || dir.back() == '/' ? dir + file : dir + "/" + file;
}

void run_check(const std::string& id, const ExperimentConfig& config, Exec exec,
               ExperimentResult& result) {
  CheckContext ctx{config, exec, check_seed(config.seed, id), id, {}, {}};
  const auto start = std::chrono::steady_clock::now();
  try {
    check_table().at(id)(ctx);
  } catch (const Error& e) {
    ReportEntry failed = ctx.entry(std::string("error: ") + std::string(to_string(e.kind())) +
                                       ": " + e.what(),
                                   std::nan(""), std::nan(""), std::nan(""), std::nan(""));
    failed.pass = false;
    ctx.add(failed);
  }
  const double seconds =
      config.timing
          ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
          : 0.0;
  for (auto& e : ctx.entries) {
    e.seconds = seconds;
    result.report.add(std::move(e));
  }
  for (auto& [name, table] : ctx.tables) {
    const std::string path = join_path(config.out_dir, id + "_" + name + ".csv");
    write_text_file(path, table.to_csv());
    result.files.push_back(path);
  }
}

void write_report_file(const ExperimentConfig& config, ExperimentResult& result) {
  const std::string path =
      join_path(config.out_dir, "report." + to_string(config.format));
  write_report(result.report, config.format, path);
  result.files.push_back(path);
}

}  // namespace

std::uint64_t check_seed(std::uint64_t master, const std::string& check_id) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char ch : check_id) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  std::uint64_t state = master ^ hash;
  return splitmix64(state);
}

ExperimentResult run_experiment(const ExperimentConfig& config, Exec exec) {
  validate(config);
  ExperimentResult result;
  for (const auto& id : config.checks) run_check(id, config, exec, result);
  write_report_file(config, result);
  return result;
}

ExperimentResult simulate_paths(const ExperimentConfig& config, Exec exec) {
  validate(config);
  const auto model = config.model();
  const auto paths = map_indexed(config.paths, exec, [&](std::size_t j) {
    return simulate_path(model, config.n, StreamId{config.seed, j, Stream::path});
  });
  std::string text = "path,k,x\n";
  for (std::size_t j = 0; j < paths.size(); ++j) {
    for (std::size_t k = 0; k < paths[j].values.size(); ++k) {
      text += std::to_string(j) + "," + std::to_string(k) + "," +
              std::to_string(paths[j].values[k]) + "\n";
    }
  }
  ExperimentResult result;
  const std::string path = join_path(config.out_dir, "paths.csv");
  write_text_file(path, text);
  result.files.push_back(path);
  return result;
}

ExperimentResult run_aggregate(const ExperimentConfig& config, Exec exec) {
  validate(config);
  ExperimentResult result;
  run_check("iterated", config, exec, result);
  const auto model = config.model();
  Table raw;
  raw.header = {"replication", "t", "value"};
  (void)iterated_sample(config, model, check_seed(config.seed, "iterated"), exec, &raw);
  const std::string path = join_path(config.out_dir, "aggregate_values.csv");
  write_text_file(path, raw.to_csv());
  result.files.push_back(path);
  write_report_file(config, result);
  return result;
}

std::string constants_table(const ExperimentConfig& config) {
  validate(config);
  const double alpha = config.alpha;
  const double m = config.offspring_mean;
  std::ostringstream out;
  out << "quantity,value\n";
  out << "alpha," << format_number(alpha) << "\n";
  out << "offspring_mean," << format_number(m) << "\n";
  out << "C_alpha," << format_number(c_alpha(alpha)) << "\n";
  out << "K," << format_number(limit_scale_K(m, alpha)) << "\n";
  if (alpha < 4.0 / 3.0) {
    out << "b_alpha," << format_number(drift_b_alpha(m, alpha)) << "\n";
    const auto law = limit_law(m, alpha);
    out << "limit_gamma," << format_number(law.gamma) << "\n";
  }
  out << "tail_constant," << format_number(1.0 / (1.0 - std::pow(m, alpha))) << "\n";
  out << "\nd,b_plus,increment\n";
  for (const auto& term : b_plus_sequence(m, alpha, config.d_max).terms) {
    out << term.d << "," << format_number(term.b_plus) << "," << format_number(term.increment)
        << "\n";
  }
  return out.str();
}

}  // namespace gwi

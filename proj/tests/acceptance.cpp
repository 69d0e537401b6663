// Acceptance run: one PASS/FAIL line per criterion, details indented below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "gwi/config.hpp"
#include "gwi/error.hpp"
#include "gwi/experiment.hpp"
#include "gwi/parallel.hpp"
#include "gwi/partial_sum.hpp"
#include "gwi/stable_law.hpp"

using namespace gwi;
namespace fs = std::filesystem;

namespace {

fs::path g_root;
std::vector<std::string> g_details;

void note(const std::string& line) { g_details.push_back(line); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool expect(bool ok, const std::string& what) {
  note(std::string(ok ? "ok   " : "FAIL ") + what);
  return ok;
}

ExperimentResult run(const std::string& label, const std::string& text) {
  auto config = parse_config(text);
  config.out_dir = (g_root / label).string();
  fs::create_directories(config.out_dir);
  return run_experiment(config);
}

// every entry must pass
bool all_pass(const ExperimentResult& r) {
  for (const auto& e : r.report.entries) {
    note(std::string(e.pass ? "ok   " : "FAIL ") + e.check_id + ": " + e.statistic + " = " +
         fmt(e.estimate) + " (se " + fmt(e.std_error) + ", target " + fmt(e.target) + ", tol " +
         fmt(e.tolerance) + ")");
  }
  return !r.report.entries.empty() && r.report.all_passed();
}

const ReportEntry* find_entry(const ExperimentResult& r, const std::string& prefix) {
  for (const auto& e : r.report.entries) {
    if (e.statistic.rfind(prefix, 0) == 0) return &e;
  }
  return nullptr;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Criteria ----------------------------------------------------------------------

const char* kConstants = R"(alpha = 0.5
offspring_mean = 0.5
checks = constants
)";

bool constants() {
  using Big = boost::multiprecision::cpp_bin_float_50;
  const auto start = std::chrono::steady_clock::now();
  const double root = static_cast<double>(sqrt(boost::math::constants::pi<Big>() / 2));
  const double sqrt2m1 = static_cast<double>(sqrt(Big(2)) - 1);
  bool ok = expect(c_alpha(1.0) == std::numbers::pi / 2.0, "c_alpha(1) == pi/2");
  ok &= expect(std::abs(c_alpha(0.5) - root) <= 1e-10,
               "|c_alpha(0.5) - sqrt(pi/2)| = " + fmt(std::abs(c_alpha(0.5) - root)) + " <= 1e-10");
  ok &= expect(std::abs(limit_scale_K(0.5, 0.5) - sqrt2m1) <= 1e-12,
               "|K(0.5,0.5) - (sqrt 2 - 1)| = " + fmt(std::abs(limit_scale_K(0.5, 0.5) - sqrt2m1)) +
                   " <= 1e-12");
  ok &= all_pass(run("constants", kConstants));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok &= expect(seconds < 1.0, "runtime " + fmt(seconds) + " s < 1 s");
  return ok;
}

bool tail_ratio() {
  bool ok = all_pass(run("tail_ratio_m05", "offspring_mean = 0.5\nalpha = 0.5\ntail_level = 0.1\n"
                                           "reps = 1000000\nchecks = tail_ratio\n"));
  ok &= all_pass(run("tail_ratio_m0", "offspring_mean = 0\nalpha = 0.5\ntail_level = 0.1\n"
                                      "reps = 1000000\nchecks = tail_ratio\n"
                                      "tolerance.tail_ratio = 0.05\n"));
  return ok;
}

bool b_plus() {
  bool ok = true;
  const std::vector<std::pair<double, double>> pairs{
      {0.5, 0.5}, {0.0, 0.5}, {0.3, 0.8}, {0.5, 1.25}, {0.9, 0.3}};
  for (const auto& [m, alpha] : pairs) {
    const auto table = b_plus_sequence(m, alpha, 20);
    const double one = table.terms.front().b_plus;
    ok &= expect(std::abs(one - 1.0) <= 1e-12,
                 "b+(1) = " + fmt(one) + " at (" + fmt(m) + ", " + fmt(alpha) + ")");
  }
  const auto r = run("b_plus_table", "offspring_mean = 0.5\nalpha = 0.5\nd_max = 20\n"
                                     "checks = constants\n");
  const auto* inc = find_entry(r, "increment(20)");
  ok &= expect(inc && std::abs(inc->estimate - limit_scale_K(0.5, 0.5)) <= 1e-3,
               "increment(20) = " + fmt(inc ? inc->estimate : NAN) + ", K = " +
                   fmt(limit_scale_K(0.5, 0.5)));
  ok &= all_pass(run("b_plus_mc", "offspring_mean = 0.5\nalpha = 0.5\nn = 10000\nb_plus_d = 2\n"
                                  "reps = 10000000\nchecks = b_plus\n"));
  return ok;
}

bool limit_law_light() {
  return all_pass(run("limit_ks_alpha05", "offspring_mean = 0.5\nalpha = 0.5\ncentering = none\n"
                                          "n = 10000\nn_small = 100\nreps = 10000\n"
                                          "checks = limit_ks\n"));
}

bool limit_law_heavy() {
  return all_pass(run("limit_ks_alpha125",
                      "offspring_mean = 0.5\nalpha = 1.25\ncentering = full_mean\n"
                      "n = 10000\nn_small = 100\nreps = 10000\nchecks = limit_ks\n"
                      "tolerance.limit_ks = 0.08\n"));
}

bool strict_stability() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = all_pass(run("strict_stability", "offspring_mean = 0.5\nalpha = 0.5\ncopies = 100\n"
                                             "reps = 100000\nchecks = strict_stability\n"));
  ok &= all_pass(run("strict_stability_heavy", "offspring_mean = 0.5\nalpha = 1.25\ncopies = 100\n"
                                               "reps = 100000\nchecks = strict_stability\n"));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok &= expect(seconds < 60.0, "runtime " + fmt(seconds) + " s < 60 s");
  return ok;
}

bool centering() {
  bool ok = all_pass(run("centering_alpha05", "offspring_mean = 0\nalpha = 0.5\nn = 1000000\n"
                                              "truncated_mean_reps = 400000000\n"
                                              "checks = centering_limit\n"));
  ok &= all_pass(run("centering_alpha125", "offspring_mean = 0\nalpha = 1.25\nn = 1000000\n"
                                           "truncated_mean_reps = 100000000\n"
                                           "checks = centering_limit\n"));
  return ok;
}

bool tail_process() {
  return all_pass(run("tail_process", "offspring_mean = 0.5\nalpha = 1.25\ntail_lag = 1\n"
                                      "quantile_near = 0.999\nquantile_far = 0.9999\n"
                                      "reps = 10000000\nchecks = tail_process\n"));
}

bool diagnostics() {
  bool ok = all_pass(run("anti_clustering",
                         "offspring_mean = 0.5\nalpha = 0.5\nn = 10000\ngamma1 = 0.375\n"
                         "gamma2 = 0.75\nlag_small = 2\nlag_large = 20\nreps = 400000\n"
                         "checks = anti_clustering\n"));
  ok &= all_pass(run("mixing", "offspring_mean = 0.5\nalpha = 0.5\nn = 10000\nn_small = 100\n"
                               "theta = 1\nreps = 200000\nchecks = mixing\n"));
  const auto rejected = run("block_sequence_alpha15", "alpha = 1.5\nchecks = block_sequence\n");
  ok &= expect(rejected.report.entries.size() == 1 && !rejected.report.entries[0].pass,
               "block_sequence rejects alpha = 1.5");
  const auto accepted =
      run("block_sequence_alpha125", "alpha = 1.25\ngamma2 = 0.58\nchecks = block_sequence\n");
  ok &= expect(accepted.report.entries.size() == 1 && accepted.report.entries[0].pass,
               "block_sequence accepts alpha = 1.25, gamma2 = 0.58");
  return ok;
}

bool self_consistency() {
  bool ok = all_pass(run("self_consistency_alpha05",
                         "offspring_mean = 0.5\nalpha = 0.5\nreps = 1000000\n"
                         "checks = self_consistency\n"));
  ok &= all_pass(run("self_consistency_alpha125",
                     "offspring_mean = 0.5\nalpha = 1.25\nreps = 1000000\n"
                     "checks = self_consistency\n"));
  return ok;
}

bool determinism() {
  const std::string text =
      "offspring_mean = 0.5\nalpha = 0.5\ncopies = 100\nreps = 100000\nn = 10000\n"
      "b_plus_d = 2\nchecks = constants, strict_stability, block_sequence, tail_ratio\n";
  const auto a = run("determinism_a", text);
  const auto b = run("determinism_b", text);
  bool ok = expect(a.files.size() == b.files.size() && !a.files.empty(),
                   std::to_string(a.files.size()) + " files per run");
  for (std::size_t i = 0; ok && i < a.files.size(); ++i) {
    ok &= expect(read_file(a.files[i]) == read_file(b.files[i]),
                 fs::path(a.files[i]).filename().string() + " identical");
  }
  return ok;
}

struct Criterion {
  const char* name;
  std::function<bool()> run;
};

}  // namespace

int main(int argc, char** argv) {
  g_root = argc > 1 ? fs::path(argv[1]) : fs::current_path() / "acceptance_out";
  fs::create_directories(g_root);
  configure_threads_from_env();

  const std::vector<Criterion> criteria{
      {"C1 constants", constants},
      {"C2 stationary tail ratio", tail_ratio},
      {"C3 b+ sequence", b_plus},
      {"C4 limit law, alpha = 0.5, no centering", limit_law_light},
      {"C5 limit law, alpha = 1.25, full mean", limit_law_heavy},
      {"C6 strict stability", strict_stability},
      {"C7 centering limits", centering},
      {"C8 tail process", tail_process},
      {"C9 anti-clustering, mixing, block sequence", diagnostics},
      {"C10 sampler and CDF self-consistency", self_consistency},
      {"C11 determinism", determinism},
  };

  // optional second argument selects one criterion, e.g. "C4"
  const std::string only = argc > 2 ? std::string(argv[2]) + " " : "";
  int failed = 0;
  std::size_t ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::string(c.name).rfind(only, 0) != 0) continue;
    ++ran;
    g_details.clear();
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      note(std::string("error: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.name, seconds);
    for (const auto& line : g_details) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ran) - failed, ran);
  return failed == 0 ? 0 : 1;
}

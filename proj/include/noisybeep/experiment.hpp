#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace nbeep {

/// One experiment grid. Every combination of topology, epsilon, target
/// failure (and, for "cd", active count) is one grid point run for `trials`
/// trials; trial i uses derive_seed(seed, {stream::kTrial, i}).
struct ExperimentConfig {
  std::string kind = "cd";  // cd | beep-sim | app | congest
  std::vector<std::string> topologies{"clique:16"};
  std::vector<double> epsilons{0.0};
  std::vector<double> target_failures{1e-2};
  std::vector<std::size_t> active_counts{0, 1, 2};  // cd
  std::string app = "mis";                           // beep-sim, app
  std::string protocol = "message-exchange";         // congest
  std::size_t k = 4;                                 // message-exchange rounds
  std::string robust = "identity";                   // congest
  std::size_t rate_inverse = 4;                      // congest
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::string out;  // writes <out>.csv and <out>.json when nonempty

  /// Throws std::invalid_argument on an unknown kind, empty grid or zero trials.
  void validate() const;
  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ResultRow {
  std::string kind;
  std::string topology;
  std::size_t n = 0;
  std::size_t max_degree = 0;
  double epsilon = 0.0;
  double target_failure = 0.0;
  std::string param;  // active count, application or protocol
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::map<std::string, std::uint64_t> categories;  // nonzero only; sums to failures
  double mean_slots = 0.0;
  std::size_t n_c = 0;       // collision-detection length (0 if unused)
  double delta = 0.0;        // relative distance behind n_c
  double log_nR = 0.0;       // ln(n * R) for the parameter choice
  std::size_t B = 0;         // congest only from here on
  std::size_t colors = 0;
  std::size_t n_C = 0;
  std::size_t pi_rounds = 0;
  double overhead_ratio = 0.0;  // mean slots / |pi|
  std::string robust;
  std::uint64_t verified = 0;
  double wall_time_s = 0.0;  // JSON summary only; the CSV stays deterministic

  void add_failure(const std::string& category) {
    ++failures;
    ++categories[category];
  }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::string summary_json(const ExperimentResult& result);
/// Writes <config.out>.csv and <config.out>.json.
void write_outputs(const ExperimentResult& result);

/// Per (epsilon, n_c) failure rates with Wilson 95% intervals, plus the fitted
/// slope of n_c against ln(nR) for each epsilon with two or more distinct points.
struct SweepReport {
  struct Line {
    double epsilon = 0.0;
    std::size_t n_c = 0;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double rate = 0.0;
    double lo = 0.0;
    double hi = 0.0;
  };
  std::vector<Line> lines;
  std::map<double, double> slope_by_epsilon;
  std::string to_text() const;
};

SweepReport sweep_report(const std::vector<ResultRow>& rows);

}  // namespace nbeep

#include "noisybeep/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "noisybeep/apps.hpp"
#include "noisybeep/collision.hpp"
#include "noisybeep/congest.hpp"
#include "noisybeep/stats.hpp"

namespace nbeep {

using nlohmann::json;

namespace {

const std::set<std::string> kKinds{"cd", "beep-sim", "app", "congest"};
const std::set<std::string> kProtocols{"message-exchange", "bfs-layering", "flooding"};

std::uint64_t trial_seed(std::uint64_t master, std::size_t i) { return derive_seed(master, {stream::kTrial, i}); }

bool is_clique(const Topology& t) {
  const std::size_t n = t.node_count();
  return t.edge_count() == n * (n - 1) / 2;
}

std::vector<NodeId> pick_active(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<NodeId> all(n);
  for (NodeId v = 0; v < n; ++v) all[v] = v;
  Rng rng(derive_seed(seed, {stream::kInput}));
  for (std::size_t i = 0; i < count; ++i) std::swap(all[i], all[i + uniform_below(rng, n - i)]);
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

ResultRow base_row(const ExperimentConfig& cfg, const std::string& spec, const Topology& t, double eps, double target) {
  ResultRow row;
  row.kind = cfg.kind;
  row.topology = spec;
  row.n = t.node_count();
  row.max_degree = t.max_degree();
  row.epsilon = eps;
  row.target_failure = target;
  row.trials = cfg.trials;
  return row;
}

ResultRow run_cd(const ExperimentConfig& cfg, const std::string& spec, const Topology& t, double eps, double target,
                 std::size_t active) {
  if (active > t.node_count()) throw std::invalid_argument("active count exceeds the number of nodes");
  ResultRow row = base_row(cfg, spec, t, eps, target);
  row.param = std::to_string(active);
  const auto params = choose_cd_params(t.node_count(), 1, eps, target);
  row.n_c = params.n_c();
  row.delta = params.delta.value();
  row.log_nR = std::log(double(t.node_count()));
  row.mean_slots = double(params.n_c());
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    const auto seed = trial_seed(cfg.seed, i);
    const auto set = pick_active(t.node_count(), active, seed);
    const auto run = run_collision_detection(t, set, params, seed);
    if (run.outcomes == expected_cd_outcomes(t, set)) {
      ++row.verified;
    } else {
      row.add_failure(run.codeword_clash ? "codeword_collision" : "misclassification");
    }
  }
  return row;
}

ResultRow run_app(const ExperimentConfig& cfg, const std::string& spec, const Topology& t, double eps, double target,
                  bool compare_direct) {
  ResultRow row = base_row(cfg, spec, t, eps, target);
  row.param = cfg.app;
  const App app = parse_app(cfg.app);
  const auto protocol = make_app(app, t);
  row.log_nR = std::log(double(t.node_count()) * double(std::max<std::size_t>(1, protocol->length())));
  double slots = 0;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    const auto seed = trial_seed(cfg.seed, i);
    const bool simulate = compare_direct || eps > 0.0;
    const auto run = simulate ? simulate_noisy(*protocol, t, eps, target, seed) : run_direct(*protocol, t, seed);
    row.n_c = simulate ? run.n_c : 0;
    row.delta = simulate ? default_delta(eps) : 0.0;
    slots += double(run.slots);
    bool ok = true;
    if (!run.faults.empty()) {
      row.add_failure("simulation_fault");
      ok = false;
    } else if (compare_direct) {
      if (run.outputs != run_direct(*protocol, t, seed).outputs) {
        row.add_failure("output_mismatch");
        ok = false;
      }
    } else if (!run.all_terminated) {
      row.add_failure("unterminated");
      ok = false;
    } else if (!verify_app(app, t, run.outputs, seed)) {
      row.add_failure("invalid_output");
      ok = false;
    }
    row.verified += ok;
  }
  row.mean_slots = slots / double(cfg.trials);
  return row;
}

ResultRow run_congest(const ExperimentConfig& cfg, const std::string& spec, const Topology& t, double eps,
                      double target) {
  ResultRow row = base_row(cfg, spec, t, eps, target);
  row.param = cfg.protocol;
  const auto robust = RobustLayer::parse(cfg.robust);
  row.robust = robust.name();
  const std::size_t n = t.node_count();
  const std::uint8_t token = 0xA5;
  double slots = 0;
  for (std::size_t i = 0; i < cfg.trials; ++i) {
    const auto seed = trial_seed(cfg.seed, i);
    const ColorAssignment coloring =
        is_clique(t) ? identity_coloring(n) : compact(two_hop_coloring(t, derive_seed(seed, {stream::kCode})));
    std::unique_ptr<MessageExchangeTask> task;
    std::shared_ptr<const CongestProtocol> pi;
    if (cfg.protocol == "message-exchange") {
      task = std::make_unique<MessageExchangeTask>(t, cfg.k, derive_seed(seed, {stream::kInput}));
      pi = task->protocol();
    } else if (cfg.protocol == "bfs-layering") {
      pi = bfs_layering_protocol(n);
    } else {
      pi = flooding_protocol(n, token);
    }
    const auto res = tdma_simulate(pi, t, coloring, robust, eps, seed, {target, cfg.rate_inverse});
    row.B = pi->message_bits();
    row.colors = res.colors;
    row.n_C = res.n_C;
    row.pi_rounds = res.pi_rounds;
    slots += double(res.slots);
    const bool ok = task                              ? task->verify(res.outputs, res.ports)
                    : cfg.protocol == "bfs-layering" ? verify_bfs(t, res.outputs)
                                                      : verify_flooding(t, res.outputs, token);
    if (!res.collision_free()) {
      row.add_failure("collision");
    } else if (!ok) {
      row.add_failure(res.colorsets_correct ? "message_error" : "colorset_error");
    } else {
      ++row.verified;
    }
  }
  row.mean_slots = slots / double(cfg.trials);
  row.overhead_ratio = row.pi_rounds ? row.mean_slots / double(row.pi_rounds) : 0.0;
  return row;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!kKinds.count(kind)) throw std::invalid_argument("unknown experiment kind: " + kind);
  if (trials == 0) throw std::invalid_argument("trials must be at least 1");
  if (topologies.empty() || epsilons.empty() || target_failures.empty())
    throw std::invalid_argument("experiment grids must be nonempty");
  if (kind == "cd" && active_counts.empty()) throw std::invalid_argument("cd experiment needs active counts");
  if (kind == "app" || kind == "beep-sim") parse_app(app);
  if (kind == "congest") {
    if (!kProtocols.count(protocol)) throw std::invalid_argument("unknown congest protocol: " + protocol);
    RobustLayer::parse(robust);
  }
}

std::string ExperimentConfig::to_json() const {
  json j{{"kind", kind},   {"topologies", topologies},         {"epsilons", epsilons},
         {"target_failures", target_failures}, {"active_counts", active_counts}, {"app", app},
         {"protocol", protocol}, {"k", k}, {"robust", robust}, {"rate_inverse", rate_inverse},
         {"trials", trials}, {"seed", seed}, {"out", out}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") c.kind = value.get<std::string>();
    else if (key == "topologies") c.topologies = value.get<std::vector<std::string>>();
    else if (key == "topology") c.topologies = {value.get<std::string>()};
    else if (key == "epsilons") c.epsilons = value.get<std::vector<double>>();
    else if (key == "target_failures") c.target_failures = value.get<std::vector<double>>();
    else if (key == "active_counts") c.active_counts = value.get<std::vector<std::size_t>>();
    else if (key == "app") c.app = value.get<std::string>();
    else if (key == "protocol") c.protocol = value.get<std::string>();
    else if (key == "k") c.k = value.get<std::size_t>();
    else if (key == "robust") c.robust = value.get<std::string>();
    else if (key == "rate_inverse") c.rate_inverse = value.get<std::size_t>();
    else if (key == "trials") c.trials = value.get<std::size_t>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "out") c.out = value.get<std::string>();
    else throw std::invalid_argument("unknown config key: " + key);
  }
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result{config, {}};
  for (const auto& spec : config.topologies) {
    const Topology t = Topology::from_spec(spec);
    for (double eps : config.epsilons) {
      for (double target : config.target_failures) {
        auto run_point = [&](auto&& body) {
          const auto t0 = std::chrono::steady_clock::now();
          ResultRow row = body();
          row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          result.rows.push_back(std::move(row));
        };
        if (config.kind == "cd") {
          for (std::size_t a : config.active_counts) run_point([&] { return run_cd(config, spec, t, eps, target, a); });
        } else if (config.kind == "congest") {
          run_point([&] { return run_congest(config, spec, t, eps, target); });
        } else {
          run_point([&] { return run_app(config, spec, t, eps, target, config.kind == "beep-sim"); });
        }
      }
    }
  }
  return result;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "kind,topology,n,max_degree,epsilon,target_failure,param,trials,failures,failure_rate,wilson_lo,wilson_hi,"
         "categories,mean_slots,n_c,delta,B,c,n_C,pi_rounds,overhead_ratio,robust,verified\n";
  for (const auto& r : rows) {
    const auto ci = wilson_interval(r.failures, r.trials);
    std::string cats;
    for (const auto& [name, count] : r.categories) {
      if (count == 0) continue;
      if (!cats.empty()) cats += ';';
      cats += name + "=" + std::to_string(count);
    }
    out << r.kind << ',' << r.topology << ',' << r.n << ',' << r.max_degree << ',' << fmt(r.epsilon) << ','
        << fmt(r.target_failure) << ',' << r.param << ',' << r.trials << ',' << r.failures << ','
        << fmt(double(r.failures) / double(r.trials)) << ',' << fmt(ci.lo) << ',' << fmt(ci.hi) << ',' << cats << ','
        << fmt(r.mean_slots) << ',' << r.n_c << ',' << fmt(r.delta) << ',' << r.B << ',' << r.colors << ',' << r.n_C
        << ',' << r.pi_rounds << ',' << fmt(r.overhead_ratio) << ',' << r.robust << ',' << r.verified << '\n';
  }
}

std::string summary_json(const ExperimentResult& result) {
  json rows = json::array();
  for (const auto& r : result.rows) {
    json cats = json::object();
    for (const auto& [name, count] : r.categories)
      if (count) cats[name] = count;
    const auto ci = wilson_interval(r.failures, r.trials);
    rows.push_back({{"kind", r.kind},
                    {"topology", r.topology},
                    {"n", r.n},
                    {"max_degree", r.max_degree},
                    {"epsilon", r.epsilon},
                    {"target_failure", r.target_failure},
                    {"param", r.param},
                    {"trials", r.trials},
                    {"failures", r.failures},
                    {"wilson_95", {ci.lo, ci.hi}},
                    {"categories", cats},
                    {"mean_slots", r.mean_slots},
                    {"n_c", r.n_c},
                    {"delta", r.delta},
                    {"robust", r.robust},
                    {"B", r.B},
                    {"c", r.colors},
                    {"n_C", r.n_C},
                    {"pi_rounds", r.pi_rounds},
                    {"overhead_ratio", r.overhead_ratio},
                    {"verified", r.verified},
                    {"wall_time_s", r.wall_time_s}});
  }
  json j{{"config", json::parse(result.config.to_json())}, {"rows", rows}};
  return j.dump(2);
}

void write_outputs(const ExperimentResult& result) {
  if (result.config.out.empty()) return;
  std::ofstream csv(result.config.out + ".csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + result.config.out + ".csv");
  write_csv(csv, result.rows);
  std::ofstream js(result.config.out + ".json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot write " + result.config.out + ".json");
  js << summary_json(result) << '\n';
}

SweepReport sweep_report(const std::vector<ResultRow>& rows) {
  SweepReport report;
  std::map<std::pair<double, std::size_t>, std::pair<std::uint64_t, std::uint64_t>> grouped;
  std::map<double, std::vector<std::pair<double, double>>> points;
  for (const auto& r : rows) {
    auto& g = grouped[{r.epsilon, r.n_c}];
    g.first += r.trials;
    g.second += r.failures;
    if (r.n_c > 0) points[r.epsilon].push_back({r.log_nR, double(r.n_c)});
  }
  for (const auto& [key, tf] : grouped) {
    const auto ci = wilson_interval(tf.second, tf.first);
    report.lines.push_back({key.first, key.second, tf.first, tf.second, double(tf.second) / double(tf.first), ci.lo, ci.hi});
  }
  for (const auto& [eps, pts] : points) {
    std::vector<double> x, y;
    for (const auto& [a, b] : pts) {
      x.push_back(a);
      y.push_back(b);
    }
    if (std::set<double>(x.begin(), x.end()).size() < 2) continue;
    report.slope_by_epsilon[eps] = least_squares(x, y).slope;
  }
  return report;
}

std::string SweepReport::to_text() const {
  std::ostringstream out;
  out << "epsilon  n_c     trials  failures  rate        wilson95\n";
  for (const auto& l : lines) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-8s %-7zu %-7llu %-9llu %-11s [%s, %s]\n", fmt(l.epsilon).c_str(), l.n_c,
                  (unsigned long long)l.trials, (unsigned long long)l.failures, fmt(l.rate).c_str(),
                  fmt(l.lo).c_str(), fmt(l.hi).c_str());
    out << buf;
  }
  for (const auto& [eps, slope] : slope_by_epsilon)
    out << "epsilon " << fmt(eps) << ": n_c ~ " << fmt(slope) << " * ln(nR)\n";
  return out.str();
}

}  // namespace nbeep

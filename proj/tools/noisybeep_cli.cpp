// Experiment driver: collision detection, noisy simulation of beeping
// protocols, applications and CONGEST-over-beeps, with CSV + JSON output.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "noisybeep/apps.hpp"
#include "noisybeep/beep_sim.hpp"
#include "noisybeep/experiment.hpp"

namespace {

struct Flags {
  std::vector<std::string> topologies;
  std::vector<double> epsilons;
  std::vector<double> targets;
  std::vector<std::size_t> active;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string config;
  std::string app;
  std::string protocol;
  std::size_t k = 0;
  std::string robust;
  std::size_t rate_inverse = 0;
  std::string transcript;
};

void common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON experiment config; flags override its fields");
  sub->add_option("--topology", f.topologies, "clique:N, star:N, path:N, cycle:N, wheel:N, gnp:N:P:SEED, file:PATH");
  sub->add_option("--epsilon", f.epsilons, "receiver noise level(s)");
  sub->add_option("--trials", f.trials, "trials per grid point");
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--target-failure", f.targets, "overall failure budget(s)");
  sub->add_option("--out", f.out, "output prefix: writes PREFIX.csv and PREFIX.json");
}

nbeep::ExperimentConfig assemble(const std::string& kind, CLI::App* sub, const Flags& f) {
  nbeep::ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::runtime_error("cannot read " + f.config);
    std::stringstream ss;
    ss << in.rdbuf();
    c = nbeep::ExperimentConfig::from_json(ss.str());
  }
  if (kind != "sweep") c.kind = kind;
  if (sub->count("--topology")) c.topologies = f.topologies;
  if (sub->count("--epsilon")) c.epsilons = f.epsilons;
  if (sub->count("--target-failure")) c.target_failures = f.targets;
  if (sub->count("--trials")) c.trials = f.trials;
  if (sub->count("--seed")) c.seed = f.seed;
  if (sub->count("--out")) c.out = f.out;
  if (sub->get_option_no_throw("--active") && sub->count("--active")) c.active_counts = f.active;
  if (sub->get_option_no_throw("--app") && sub->count("--app")) c.app = f.app;
  if (sub->get_option_no_throw("--protocol") && sub->count("--protocol")) c.protocol = f.protocol;
  if (sub->get_option_no_throw("--k") && sub->count("--k")) c.k = f.k;
  if (sub->get_option_no_throw("--robust") && sub->count("--robust")) c.robust = f.robust;
  if (sub->get_option_no_throw("--rate-inverse") && sub->count("--rate-inverse")) c.rate_inverse = f.rate_inverse;
  return c;
}

void emit(const nbeep::ExperimentResult& result) {
  if (result.config.out.empty()) {
    nbeep::write_csv(std::cout, result.rows);
  } else {
    nbeep::write_outputs(result);
    std::cout << "wrote " << result.config.out << ".csv and " << result.config.out << ".json\n";
  }
}

void dump_transcript(const nbeep::ExperimentConfig& c, const std::string& path) {
  const auto t = nbeep::Topology::from_spec(c.topologies.front());
  const auto protocol = nbeep::make_app(nbeep::parse_app(c.app), t);
  nbeep::SimOptions opts;
  opts.record = true;
  const auto run = nbeep::simulate_noisy(*protocol, t, c.epsilons.front(), c.target_failures.front(),
                                         nbeep::derive_seed(c.seed, {nbeep::stream::kTrial, 0}), opts);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  nbeep::write_transcript_jsonl(out, run.transcript);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisybeep: beeping networks with receiver noise"};
  app.require_subcommand(1);
  Flags f;

  auto* cd = app.add_subcommand("cd", "collision detection over the noisy channel");
  common(cd, f);
  cd->add_option("--active", f.active, "number(s) of active nodes");

  auto* sim = app.add_subcommand("beep-sim", "noisy simulation compared with direct execution");
  common(sim, f);
  sim->add_option("--app", f.app, "mis | coloring | two-hop-coloring | leader-election");
  sim->add_option("--transcript", f.transcript, "write a JSONL transcript of trial 0 (first grid point)");

  auto* ap = app.add_subcommand("app", "application protocols checked by their verifiers");
  common(ap, f);
  ap->add_option("--app", f.app, "mis | coloring | two-hop-coloring | leader-election");

  auto* cg = app.add_subcommand("congest", "CONGEST protocols over TDMA on the noisy channel");
  common(cg, f);
  cg->add_option("--protocol", f.protocol, "message-exchange | bfs-layering | flooding");
  cg->add_option("--k", f.k, "message-exchange rounds");
  cg->add_option("--robust", f.robust, "identity | repetition:K");
  cg->add_option("--rate-inverse", f.rate_inverse, "neighborhood code length / message bits");

  auto* sw = app.add_subcommand("sweep", "run a config grid and print failure rates per epsilon and n_c");
  common(sw, f);

  CLI11_PARSE(app, argc, argv);
  try {
    for (auto* sub : {cd, sim, ap, cg, sw}) {
      if (!sub->parsed()) continue;
      const std::string kind = sub->get_name();
      const auto config = assemble(kind, sub, f);
      const auto result = nbeep::run_experiment(config);
      if (kind == "sweep") {
        std::cout << nbeep::sweep_report(result.rows).to_text();
        nbeep::write_outputs(result);
      } else {
        emit(result);
      }
      if (kind == "beep-sim" && !f.transcript.empty()) dump_transcript(config, f.transcript);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include <set>
#include <stdexcept>
#include <string>

#include "noisybeep/apps.hpp"

namespace nbeep {

std::size_t ColorAssignment::colors_used() const {
  std::set<std::int64_t> used(color.begin(), color.end());
  used.erase(-1);
  return used.size();
}

bool verify_mis(const Topology& topology, const std::vector<bool>& in_set) {
  const std::size_t n = topology.node_count();
  if (in_set.size() != n) return false;
  for (NodeId v = 0; v < n; ++v) {
    bool dominated = in_set[v];
    for (NodeId u : topology.neighbors(v)) {
      if (in_set[v] && in_set[u]) return false;
      dominated = dominated || in_set[u];
    }
    if (!dominated) return false;
  }
  return true;
}

bool verify_coloring(const Topology& topology, const ColorAssignment& coloring, int hops) {
  if (hops != 1 && hops != 2) throw std::invalid_argument("verify_coloring: hops must be 1 or 2");
  const std::size_t n = topology.node_count();
  if (coloring.color.size() != n) return false;
  for (auto c : coloring.color)
    if (c < 0 || std::size_t(c) >= coloring.palette) return false;
  for (NodeId v = 0; v < n; ++v) {
    const auto dist = topology.distances_from(v);
    for (NodeId u = 0; u < n; ++u) {
      if (u == v || !dist[u] || *dist[u] > std::size_t(hops)) continue;
      if (coloring.color[u] == coloring.color[v]) return false;
    }
  }
  return true;
}

bool verify_leader(const std::vector<std::int64_t>& outputs, const std::vector<std::uint64_t>& own_ids) {
  if (outputs.empty() || outputs.size() != own_ids.size()) return false;
  const std::int64_t leader = outputs.front();
  if (leader < 0) return false;
  for (auto o : outputs)
    if (o != leader) return false;
  std::size_t owners = 0;
  for (auto id : own_ids) owners += id == std::uint64_t(leader);
  return owners == 1;
}

std::string_view to_string(App a) noexcept {
  switch (a) {
    case App::MIS: return "mis";
    case App::Coloring: return "coloring";
    case App::TwoHopColoring: return "two-hop-coloring";
    case App::LeaderElection: return "leader-election";
  }
  return "?";
}

App parse_app(std::string_view s) {
  for (App a : kAllApps)
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown application: " + std::string(s));
}

namespace {
std::size_t coloring_palette(const Topology& t) {
  return t.max_degree() + std::max<std::size_t>(1, ceil_log2(t.node_count()));
}
}  // namespace

std::unique_ptr<BeepProtocol> make_app(App app, const Topology& topology) {
  const std::size_t n = topology.node_count();
  const std::size_t delta = topology.max_degree();
  switch (app) {
    case App::MIS: return mis_protocol(n);
    case App::Coloring: return coloring_protocol(coloring_palette(topology), n, delta);
    case App::TwoHopColoring: return two_hop_coloring_protocol(n, delta);
    case App::LeaderElection: {
      const auto d = topology.diameter();
      if (!d) throw std::invalid_argument("leader election needs a connected topology");
      return leader_election_protocol(n, *d);
    }
  }
  throw std::invalid_argument("make_app: unknown application");
}

bool verify_app(App app, const Topology& topology, const std::vector<std::int64_t>& outputs, std::uint64_t seed) {
  const std::size_t n = topology.node_count();
  switch (app) {
    case App::MIS: {
      std::vector<bool> in(n);
      for (NodeId v = 0; v < n; ++v) {
        if (outputs[v] < 0) return false;
        in[v] = outputs[v] == 1;
      }
      return verify_mis(topology, in);
    }
    case App::Coloring: return verify_coloring(topology, {outputs, coloring_palette(topology)}, 1);
    case App::TwoHopColoring:
      return verify_coloring(topology, {outputs, two_hop_palette(n, topology.max_degree())}, 2);
    case App::LeaderElection: {
      std::vector<std::uint64_t> ids(n);
      for (NodeId v = 0; v < n; ++v) ids[v] = leader_identifier(n, node_seed(seed, v));
      return verify_leader(outputs, ids);
    }
  }
  return false;
}

}  // namespace nbeep

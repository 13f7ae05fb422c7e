#include "noisybeep/topology.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "noisybeep/rng.hpp"

namespace nbeep {

Topology::Topology(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges)
    : adjacency_(node_count) {
  if (node_count == 0) throw std::invalid_argument("topology needs at least one node");
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("self-loop on node " + std::to_string(u));
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end())
      throw std::invalid_argument("duplicate edge");
  }
  edge_count_ = edges.size();
}

Topology Topology::edgeless(std::size_t n) { return Topology(n, {}); }

Topology Topology::clique(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return Topology(n, e);
}

Topology Topology::star(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 1; v < n; ++v) e.emplace_back(0, v);
  return Topology(n, e);
}

Topology Topology::path(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  return Topology(n, e);
}

Topology Topology::cycle(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle needs n >= 3");
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  e.emplace_back(static_cast<NodeId>(n - 1), 0);
  return Topology(n, e);
}

Topology Topology::wheel(std::size_t n) {
  if (n < 4) throw std::invalid_argument("wheel needs n >= 4");
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId v = 1; v < n; ++v) e.emplace_back(0, v);
  for (NodeId v = 2; v < n; ++v) e.emplace_back(v - 1, v);
  e.emplace_back(static_cast<NodeId>(n - 1), 1);
  return Topology(n, e);
}

Topology Topology::gnp(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gnp: p out of [0,1]");
  Rng rng(derive_seed(seed, {0x676e70ULL}));
  const BernoulliThreshold coin(p);
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) e.emplace_back(u, v);
  return Topology(n, e);
}

namespace {

template <typename T>
T parse_number(std::string_view tok, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw std::invalid_argument(std::string("cannot parse ") + what + ": '" + std::string(tok) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Topology Topology::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<std::size_t> n;
  std::vector<std::pair<NodeId, NodeId>> edges;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (!n) {
      if (toks.size() != 1) throw std::invalid_argument("first line must hold the node count");
      n = parse_number<std::size_t>(toks[0], "node count");
      continue;
    }
    if (toks.size() != 2) throw std::invalid_argument("edge line must be 'u v': " + line);
    edges.emplace_back(parse_number<NodeId>(toks[0], "node id"), parse_number<NodeId>(toks[1], "node id"));
  }
  if (!n) throw std::invalid_argument("empty topology text");
  return Topology(*n, edges);
}

Topology Topology::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open topology file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string Topology::to_text() const {
  std::ostringstream out;
  out << node_count() << '\n';
  for (auto [u, v] : edges()) out << u << ' ' << v << '\n';
  return out.str();
}

Topology Topology::from_spec(std::string_view spec) {
  auto parts = split(spec, ':');
  const auto kind = parts[0];
  auto arg = [&](std::size_t i, const char* what) -> std::string_view {
    if (i >= parts.size()) throw std::invalid_argument("topology spec '" + std::string(spec) + "' is missing " + what);
    return parts[i];
  };
  if (kind == "file") return load(std::string(spec.substr(5)));
  const auto n = parse_number<std::size_t>(arg(1, "n"), "n");
  if (kind == "clique") return clique(n);
  if (kind == "star") return star(n);
  if (kind == "path") return path(n);
  if (kind == "cycle") return cycle(n);
  if (kind == "wheel") return wheel(n);
  if (kind == "edgeless") return edgeless(n);
  if (kind == "gnp") {
    const double p = std::stod(std::string(arg(2, "p")));
    const std::uint64_t seed = parts.size() > 3 ? parse_number<std::uint64_t>(parts[3], "seed") : 0;
    return gnp(n, p, seed);
  }
  throw std::invalid_argument("unknown topology kind '" + std::string(kind) + "'");
}

bool Topology::adjacent(NodeId u, NodeId v) const {
  const auto& nb = adjacency_.at(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::size_t Topology::max_degree() const noexcept {
  std::size_t d = 0;
  for (const auto& nb : adjacency_) d = std::max(d, nb.size());
  return d;
}

std::vector<std::optional<std::size_t>> Topology::distances_from(NodeId source) const {
  std::vector<std::optional<std::size_t>> dist(node_count());
  std::deque<NodeId> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : adjacency_[u]) {
      if (!dist[v]) {
        dist[v] = *dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

bool Topology::connected() const {
  auto d = distances_from(0);
  return std::all_of(d.begin(), d.end(), [](const auto& x) { return x.has_value(); });
}

std::optional<std::size_t> Topology::diameter() const {
  std::size_t best = 0;
  for (NodeId s = 0; s < node_count(); ++s) {
    for (const auto& d : distances_from(s)) {
      if (!d) return std::nullopt;
      best = std::max(best, *d);
    }
  }
  return best;
}

std::vector<std::pair<NodeId, NodeId>> Topology::edges() const {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId u = 0; u < node_count(); ++u)
    for (NodeId v : adjacency_[u])
      if (u < v) e.emplace_back(u, v);
  return e;
}

}  // namespace nbeep

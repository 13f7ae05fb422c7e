#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nbeep {

using NodeId = std::uint32_t;

/// Undirected simple graph over nodes 0..n-1. Immutable after construction.
class Topology {
 public:
  Topology(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges);

  static Topology edgeless(std::size_t n);
  static Topology clique(std::size_t n);
  /// n nodes total: center 0, leaves 1..n-1.
  static Topology star(std::size_t n);
  static Topology path(std::size_t n);
  static Topology cycle(std::size_t n);
  /// n nodes total: hub 0 joined to a cycle on 1..n-1 (n >= 4).
  static Topology wheel(std::size_t n);
  static Topology gnp(std::size_t n, double p, std::uint64_t seed);

  /// Text format: first line `n`, then one `u v` pair per line. '#' starts a comment.
  static Topology parse(std::string_view text);
  static Topology load(const std::string& path);
  std::string to_text() const;

  /// Generator spec such as "clique:16", "gnp:32:0.2:7", "wheel:9" or "file:graph.txt".
  static Topology from_spec(std::string_view spec);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::span<const NodeId> neighbors(NodeId v) const { return adjacency_.at(v); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }
  bool adjacent(NodeId u, NodeId v) const;

  std::size_t max_degree() const noexcept;
  /// BFS hop distances from `source`; unreachable nodes get std::nullopt.
  std::vector<std::optional<std::size_t>> distances_from(NodeId source) const;
  bool connected() const;
  /// Longest shortest path; std::nullopt when the graph is disconnected.
  std::optional<std::size_t> diameter() const;

  std::vector<std::pair<NodeId, NodeId>> edges() const;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t edge_count_ = 0;
};

}  // namespace nbeep

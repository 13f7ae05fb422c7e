#include <utility>
#include <vector>

#include "doctest.h"
#include "noisybeep/topology.hpp"

using namespace nbeep;

TEST_CASE("generators have the expected shape") {
  const auto k5 = Topology::clique(5);
  CHECK(k5.edge_count() == 10);
  CHECK(k5.max_degree() == 4);
  CHECK(k5.diameter() == 1u);

  const auto s = Topology::star(9);
  CHECK(s.degree(0) == 8);
  CHECK(s.degree(3) == 1);
  CHECK(s.diameter() == 2u);

  CHECK(Topology::path(4).diameter() == 3u);
  CHECK(Topology::cycle(6).diameter() == 3u);
  CHECK(Topology::cycle(6).max_degree() == 2);

  const auto w = Topology::wheel(6);
  CHECK(w.degree(0) == 5);
  CHECK(w.degree(1) == 3);
  CHECK(w.edge_count() == 10);
  CHECK_THROWS(Topology::wheel(3));

  CHECK(Topology::edgeless(4).edge_count() == 0);
  CHECK_FALSE(Topology::edgeless(4).diameter().has_value());
}

TEST_CASE("gnp is a pure function of its seed") {
  const auto a = Topology::gnp(40, 0.2, 9);
  const auto b = Topology::gnp(40, 0.2, 9);
  CHECK(a.edges() == b.edges());
  CHECK(Topology::gnp(12, 0.0, 1).edge_count() == 0);
  CHECK(Topology::gnp(12, 1.0, 1).edge_count() == 66);
}

TEST_CASE("max degree and adjacency are derived from the edges") {
  const std::vector<std::pair<NodeId, NodeId>> e{{0, 1}, {1, 2}, {1, 3}};
  const Topology t(5, e);
  CHECK(t.max_degree() == 3);
  CHECK(t.adjacent(3, 1));
  CHECK_FALSE(t.adjacent(0, 2));
  CHECK_FALSE(t.connected());
  const auto d = t.distances_from(0);
  CHECK(d[3] == 2u);
  CHECK_FALSE(d[4].has_value());
}

TEST_CASE("invalid edge lists are rejected") {
  const std::vector<std::pair<NodeId, NodeId>> loop{{1, 1}};
  const std::vector<std::pair<NodeId, NodeId>> dup{{0, 1}, {1, 0}};
  const std::vector<std::pair<NodeId, NodeId>> range{{0, 7}};
  CHECK_THROWS(Topology(3, loop));
  CHECK_THROWS(Topology(3, dup));
  CHECK_THROWS(Topology(3, range));
}

TEST_CASE("text format round-trips and accepts comments") {
  const auto t = Topology::parse("# triangle plus tail\n4\n0 1\n1 2\n2 0 # closing edge\n2 3\n");
  CHECK(t.node_count() == 4);
  CHECK(t.edge_count() == 4);
  const auto again = Topology::parse(t.to_text());
  CHECK(again.edges() == t.edges());
  CHECK_THROWS(Topology::parse("3\n0 5\n"));
  CHECK_THROWS(Topology::parse("x\n"));
}

TEST_CASE("topology specs") {
  CHECK(Topology::from_spec("clique:16").edge_count() == 120);
  CHECK(Topology::from_spec("star:9").degree(0) == 8);
  CHECK(Topology::from_spec("path:5").diameter() == 4u);
  CHECK(Topology::from_spec("wheel:9").degree(0) == 8);
  CHECK(Topology::from_spec("gnp:32:0.2:7").edges() == Topology::gnp(32, 0.2, 7).edges());
  CHECK_THROWS(Topology::from_spec("torus:4"));
  CHECK_THROWS(Topology::from_spec("clique:x"));
}

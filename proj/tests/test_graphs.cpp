#include "doctest.h"
#include "mlmath/error.hpp"
#include "mlmath/graphs.hpp"

using namespace mlmath;

namespace {

void check_oracles(const Graph& g) {
  const auto gr = girth(g);
  CHECK(gr.girth == brute::girth(g));
  CHECK(is_planar(g) == brute::is_planar(g));
  CHECK(is_eulerian(g) == brute::is_eulerian(g));
  CHECK(has_hamiltonian_cycle(g) == brute::has_hamiltonian_cycle(g));
  CHECK(is_acyclic(g) == !gr.girth.has_value());
}

}  // namespace

TEST_CASE("named graphs") {
  auto k3 = complete_graph(3), k4 = complete_graph(4), k5 = complete_graph(5);
  auto k33 = complete_bipartite(3, 3), c5 = cycle_graph(5), pet = petersen_graph();
  CHECK(girth(k3).cls == GirthClass::three);
  CHECK(girth(c5).cls == GirthClass::gt4);
  CHECK(girth(c5).girth == 5);
  CHECK(girth(k33).girth == 4);
  CHECK(girth(pet).girth == 5);
  CHECK(is_planar(k4));
  CHECK_FALSE(is_planar(k5));
  CHECK_FALSE(is_planar(k33));
  CHECK_FALSE(brute::is_planar(k33));
  CHECK_FALSE(brute::is_planar(k5));
  CHECK_FALSE(is_planar(pet));
  CHECK(is_eulerian(c5));
  CHECK_FALSE(is_eulerian(k4));
  CHECK(is_eulerian(k5));
  CHECK(has_hamiltonian_cycle(k4));
  CHECK_FALSE(has_hamiltonian_cycle(complete_bipartite(1, 3)));
  CHECK_FALSE(has_hamiltonian_cycle(pet));
  CHECK_FALSE(brute::has_hamiltonian_cycle(pet));
  CHECK(has_hamiltonian_cycle(complete_graph(24)));
  for (const auto& g : {k3, k4, k5, k33, c5, pet}) check_oracles(g);
  CHECK_THROWS_AS(has_hamiltonian_cycle(cycle_graph(25)), InvalidArgument);
}

TEST_CASE("graph construction checks") {
  CHECK_THROWS_AS(Graph::from_edges(4, {{0, 1}, {2, 3}}), InvalidArgument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 0}, {1, 2}}), InvalidArgument);
  CHECK_THROWS_AS(Graph::from_edges(3, {{0, 1}, {1, 0}, {1, 2}}), InvalidArgument);
  CHECK_THROWS_AS(Graph::from_adjacency(2, std::vector<double>{0, 1, 0, 0}), InvalidArgument);
  Rng rng(RngSeed{4});
  for (int t = 0; t < 50; ++t) {
    auto tree = random_tree(10, rng);
    CHECK(tree.edge_count() == 9);
    CHECK(is_acyclic(tree));
    CHECK_FALSE(girth(tree).girth.has_value());
  }
  auto full = gen_connected_graph(8, 0.999999, RngSeed{1});
  CHECK(full.edge_count() == 28);
  auto a = gen_connected_graph(10, 0.3, RngSeed{7}), b = gen_connected_graph(10, 0.3, RngSeed{7});
  CHECK(a.edges() == b.edges());
  CHECK_THROWS_AS(gen_connected_graph(20, 0.001, RngSeed{1}), InvalidArgument);
}

TEST_CASE("oracles agree with brute force on random graphs up to 9 vertices") {
  Rng rng(RngSeed{21});
  for (int t = 0; t < 300; ++t) {
    const std::size_t v = 4 + rng.below(6);
    auto g = gen_connected_graph(v, rng.uniform(0.2, 0.9), rng);
    check_oracles(g);
  }
}

TEST_CASE("eulerian oracle matches Hierholzer up to 12 vertices") {
  Rng rng(RngSeed{5});
  for (int t = 0; t < 300; ++t) {
    const std::size_t v = 4 + rng.below(9);
    auto g = gen_connected_graph(v, rng.uniform(0.2, 0.9), rng);
    CHECK(is_eulerian(g) == brute::is_eulerian(g));
  }
}

TEST_CASE("oracles are invariant under relabeling") {
  Rng rng(RngSeed{8});
  std::vector<Graph> graphs = {petersen_graph(), complete_bipartite(3, 3), cycle_graph(7)};
  for (int t = 0; t < 5; ++t) graphs.push_back(gen_connected_graph(9, rng.uniform(0.2, 0.7), rng));
  for (const auto& g : graphs) {
    const auto gi = girth(g).girth;
    const bool p = is_planar(g), e = is_eulerian(g), h = has_hamiltonian_cycle(g);
    for (int t = 0; t < 100; ++t) {
      auto r = g.relabeled(rng.permutation(g.order()));
      CHECK(girth(r).girth == gi);
      CHECK(is_planar(r) == p);
      CHECK(is_eulerian(r) == e);
      CHECK(has_hamiltonian_cycle(r) == h);
    }
  }
}

TEST_CASE("graph property tasks") {
  for (auto prop : {GraphProperty::acyclic, GraphProperty::girth3way, GraphProperty::planar, GraphProperty::euler,
                    GraphProperty::hamilton}) {
    CAPTURE(to_string(prop));
    GraphTaskParams p{prop, 60, 6, 10, 1};
    auto ds = gen_graph_property_task(p, RngSeed{3});
    CHECK(ds.shape() == FeatureShape::matrix(10, 10));
    for (auto c : ds.class_counts()) CHECK(c == 60);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto f = ds.features(i);
      std::size_t v = 10;
      while (v > 0) {
        bool empty = true;
        for (std::size_t j = 0; j < 10; ++j) empty = empty && f[(v - 1) * 10 + j] == 0;
        if (!empty) break;
        --v;
      }
      std::vector<double> m;
      for (std::size_t r = 0; r < v; ++r)
        for (std::size_t c = 0; c < v; ++c) m.push_back(f[r * 10 + c]);
      auto g = Graph::from_adjacency(v, m);
      CHECK(graph_property_label(prop, g) == ds.label(i));
    }
  }
  CHECK(graph_property_from_string("planar") == GraphProperty::planar);
  CHECK_THROWS_AS(graph_property_from_string("genus"), InvalidArgument);
}

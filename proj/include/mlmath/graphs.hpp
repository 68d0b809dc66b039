#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlmath/dataset.hpp"
#include "mlmath/rng.hpp"

namespace mlmath {

/// Undirected simple connected graph on vertices 0..v-1.
class Graph {
 public:
  /// Throws InvalidArgument on self loops, repeated edges, out-of-range
  /// endpoints or a disconnected result.
  static Graph from_edges(std::size_t v, const std::vector<std::pair<int, int>>& edges);
  /// Requires a symmetric 0/1 matrix with zero diagonal; also checks connectivity.
  static Graph from_adjacency(std::size_t v, std::span<const double> matrix);

  std::size_t order() const { return v_; }
  std::size_t edge_count() const { return e_; }
  bool adjacent(std::size_t a, std::size_t b) const { return adj_[a * v_ + b] != 0; }
  std::size_t degree(std::size_t a) const;
  std::vector<std::pair<int, int>> edges() const;
  /// Row-major v x v 0/1 matrix.
  std::vector<double> adjacency_matrix() const;
  /// Vertex i of the result is vertex perm[i] of this graph.
  Graph relabeled(std::span<const std::size_t> perm) const;

 private:
  Graph(std::size_t v, std::vector<std::uint8_t> adj);
  std::size_t v_ = 0;
  std::size_t e_ = 0;
  std::vector<std::uint8_t> adj_;
};

/// BFS connectivity of a 0/1 adjacency (v x v, row-major).
bool is_connected(std::size_t v, std::span<const std::uint8_t> adj);

/// Erdos-Renyi G(v, p) conditioned on connectivity by rejection.
Graph gen_connected_graph(std::size_t v, double edge_prob, RngSeed seed);
Graph gen_connected_graph(std::size_t v, double edge_prob, Rng& rng);

/// Uniform labelled tree from a random Pruefer sequence.
Graph random_tree(std::size_t v, Rng& rng);

enum class GirthClass { acyclic, three, four, gt4 };
std::string to_string(GirthClass c);

struct GirthResult {
  std::optional<int> girth;  // empty for acyclic graphs
  GirthClass cls = GirthClass::acyclic;
};

GirthResult girth(const Graph& g);
bool is_acyclic(const Graph& g);
bool is_planar(const Graph& g);
bool is_eulerian(const Graph& g);

inline constexpr std::size_t kHamiltonMaxVertices = 24;
/// Backtracking with degree and connectivity pruning. Throws InvalidArgument
/// "exceeds exact-oracle bound" above 24 vertices.
bool has_hamiltonian_cycle(const Graph& g);

/// Exhaustive reference oracles for small graphs.
namespace brute {
/// Searches for a subdivision of K5 or K3,3; planar iff none exists.
bool is_planar(const Graph& g);
/// Tries every vertex order starting at vertex 0.
bool has_hamiltonian_cycle(const Graph& g);
/// Minimum length over all enumerated simple cycles.
std::optional<int> girth(const Graph& g);
/// Runs Hierholzer's walk and checks that it closes over every edge.
bool is_eulerian(const Graph& g);
}  // namespace brute

Graph complete_graph(std::size_t v);
Graph complete_bipartite(std::size_t a, std::size_t b);
Graph cycle_graph(std::size_t v);
Graph petersen_graph();

enum class GraphProperty { acyclic, girth3way, planar, euler, hamilton };
std::string to_string(GraphProperty p);
GraphProperty graph_property_from_string(const std::string& text);

struct GraphTaskParams {
  GraphProperty property = GraphProperty::acyclic;
  std::size_t per_class = 1000;
  std::size_t min_vertices = 6;
  std::size_t max_vertices = 12;
  /// Simultaneously relabeled copies of every sampled graph.
  std::size_t copies = 0;
};

/// Label of a graph for a property: acyclic/planar/euler/hamilton give 1 when
/// the property holds; girth3way gives 0, 1, 2 for girth 3, 4, > 4 (acyclic
/// graphs are excluded from that task).
std::optional<Label> graph_property_label(GraphProperty p, const Graph& g);

/// Balanced dataset of adjacency matrices padded to max_vertices. Each class
/// has its own candidate sampler; every label comes from the oracle.
LabeledDataset gen_graph_property_task(const GraphTaskParams& params, RngSeed seed);

/// Same graphs the task would use, for dumping.
std::vector<Graph> sample_task_graphs(const GraphTaskParams& params, RngSeed seed,
                                      std::vector<Label>* labels = nullptr);

/// Edge lists: "# v=N" then one "u v" line per edge, per graph.
void write_edge_lists(const std::vector<Graph>& graphs, const std::filesystem::path& path);

}  // namespace mlmath

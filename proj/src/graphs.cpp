// Graphs, exact property oracles and the graph classification tasks.

#include "mlmath/graphs.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>

#include "mlmath/error.hpp"
#include "mlmath/io.hpp"

namespace mlmath {

bool is_connected(std::size_t v, std::span<const std::uint8_t> adj) {
  if (v == 0) return false;
  std::vector<char> seen(v, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b = 0; b < v; ++b) {
      if (adj[a * v + b] && !seen[b]) {
        seen[b] = 1;
        ++reached;
        stack.push_back(b);
      }
    }
  }
  return reached == v;
}

Graph::Graph(std::size_t v, std::vector<std::uint8_t> adj) : v_(v), adj_(std::move(adj)) {
  if (!is_connected(v_, adj_)) throw InvalidArgument("graph is not connected");
  for (auto x : adj_) e_ += x;
  e_ /= 2;
}

Graph Graph::from_edges(std::size_t v, const std::vector<std::pair<int, int>>& edges) {
  if (v < 1) throw InvalidArgument("graph needs at least one vertex");
  std::vector<std::uint8_t> adj(v * v, 0);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= v || static_cast<std::size_t>(b) >= v) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (a == b) throw InvalidArgument("self loop at " + std::to_string(a));
    auto& x = adj[static_cast<std::size_t>(a) * v + static_cast<std::size_t>(b)];
    if (x) throw InvalidArgument("repeated edge " + std::to_string(a) + "-" + std::to_string(b));
    x = 1;
    adj[static_cast<std::size_t>(b) * v + static_cast<std::size_t>(a)] = 1;
  }
  return Graph(v, std::move(adj));
}

Graph Graph::from_adjacency(std::size_t v, std::span<const double> matrix) {
  if (matrix.size() != v * v) throw InvalidArgument("adjacency size is not v^2");
  std::vector<std::uint8_t> adj(v * v, 0);
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = 0; b < v; ++b) {
      const double x = matrix[a * v + b];
      if (x != 0.0 && x != 1.0) throw InvalidArgument("adjacency entries must be 0 or 1");
      if (x != matrix[b * v + a]) throw InvalidArgument("adjacency is not symmetric");
      if (a == b && x != 0.0) throw InvalidArgument("adjacency diagonal must be zero");
      adj[a * v + b] = static_cast<std::uint8_t>(x);
    }
  }
  return Graph(v, std::move(adj));
}

std::size_t Graph::degree(std::size_t a) const {
  std::size_t d = 0;
  for (std::size_t b = 0; b < v_; ++b) d += adj_[a * v_ + b];
  return d;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t a = 0; a < v_; ++a) {
    for (std::size_t b = a + 1; b < v_; ++b) {
      if (adj_[a * v_ + b]) out.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return out;
}

std::vector<double> Graph::adjacency_matrix() const { return {adj_.begin(), adj_.end()}; }

Graph Graph::relabeled(std::span<const std::size_t> perm) const {
  std::vector<std::uint8_t> adj(v_ * v_);
  for (std::size_t i = 0; i < v_; ++i) {
    for (std::size_t j = 0; j < v_; ++j) adj[i * v_ + j] = adj_[perm[i] * v_ + perm[j]];
  }
  return Graph(v_, std::move(adj));
}

Graph gen_connected_graph(std::size_t v, double edge_prob, Rng& rng) {
  if (v < 4 || v > kHamiltonMaxVertices) throw InvalidArgument("vertex count must lie in [4, 24]");
  if (!(edge_prob > 0.0 && edge_prob < 1.0)) throw InvalidArgument("edge probability must lie in (0, 1)");
  std::vector<std::uint8_t> adj(v * v);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::fill(adj.begin(), adj.end(), 0);
    for (std::size_t a = 0; a < v; ++a) {
      for (std::size_t b = a + 1; b < v; ++b) {
        if (rng.uniform() < edge_prob) adj[a * v + b] = adj[b * v + a] = 1;
      }
    }
    if (is_connected(v, adj)) return Graph::from_adjacency(v, std::vector<double>(adj.begin(), adj.end()));
  }
  throw InvalidArgument("no connected graph after 10000 draws; use a higher edge probability");
}

Graph gen_connected_graph(std::size_t v, double edge_prob, RngSeed seed) {
  Rng rng(seed);
  return gen_connected_graph(v, edge_prob, rng);
}

Graph random_tree(std::size_t v, Rng& rng) {
  if (v < 2) throw InvalidArgument("tree needs at least two vertices");
  std::vector<std::size_t> code(v - 2);
  for (auto& c : code) c = rng.below(v);
  std::vector<std::size_t> degree(v, 1);
  for (auto c : code) ++degree[c];
  std::vector<std::pair<int, int>> edges;
  for (auto c : code) {
    std::size_t leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    edges.emplace_back(static_cast<int>(leaf), static_cast<int>(c));
    --degree[leaf];
    --degree[c];
  }
  std::vector<int> last;
  for (std::size_t a = 0; a < v; ++a) {
    if (degree[a] == 1) last.push_back(static_cast<int>(a));
  }
  edges.emplace_back(last[0], last[1]);
  return Graph::from_edges(v, edges);
}

std::string to_string(GirthClass c) {
  switch (c) {
    case GirthClass::acyclic: return "acyclic";
    case GirthClass::three: return "3";
    case GirthClass::four: return "4";
    case GirthClass::gt4: return ">4";
  }
  return "?";
}

GirthResult girth(const Graph& g) {
  const std::size_t v = g.order();
  int best = 0;
  std::vector<int> dist(v), parent(v);
  for (std::size_t root = 0; root < v; ++root) {
    std::fill(dist.begin(), dist.end(), -1);
    std::vector<std::size_t> queue{root};
    dist[root] = 0;
    parent[root] = -1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t a = queue[head];
      for (std::size_t b = 0; b < v; ++b) {
        if (!g.adjacent(a, b)) continue;
        if (dist[b] < 0) {
          dist[b] = dist[a] + 1;
          parent[b] = static_cast<int>(a);
          queue.push_back(b);
        } else if (parent[a] != static_cast<int>(b) && parent[b] != static_cast<int>(a)) {
          const int len = dist[a] + dist[b] + 1;
          if (best == 0 || len < best) best = len;
        }
      }
    }
  }
  GirthResult r;
  if (best == 0) return r;
  r.girth = best;
  r.cls = best == 3 ? GirthClass::three : best == 4 ? GirthClass::four : GirthClass::gt4;
  return r;
}

bool is_acyclic(const Graph& g) { return g.edge_count() + 1 == g.order(); }

bool is_planar(const Graph& g) {
  const std::size_t v = g.order();
  if (v >= 3 && g.edge_count() > 3 * v - 6) return false;
  boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS> bg(v);
  for (auto [a, b] : g.edges()) boost::add_edge(static_cast<std::size_t>(a), static_cast<std::size_t>(b), bg);
  return boost::boyer_myrvold_planarity_test(bg);
}

bool is_eulerian(const Graph& g) {
  for (std::size_t a = 0; a < g.order(); ++a) {
    if (g.degree(a) % 2 != 0) return false;
  }
  return true;
}

namespace {

using Mask = std::uint32_t;

std::vector<Mask> neighbour_masks(const Graph& g) {
  std::vector<Mask> nbr(g.order(), 0);
  for (std::size_t a = 0; a < g.order(); ++a) {
    for (std::size_t b = 0; b < g.order(); ++b) {
      if (g.adjacent(a, b)) nbr[a] |= Mask{1} << b;
    }
  }
  return nbr;
}

bool mask_connected(Mask set, const std::vector<Mask>& nbr) {
  if (set == 0) return true;
  Mask reached = set & (~set + 1);
  Mask frontier = reached;
  while (frontier) {
    Mask next = 0;
    for (Mask f = frontier; f; f &= f - 1) next |= nbr[static_cast<std::size_t>(std::countr_zero(f))];
    next &= set & ~reached;
    reached |= next;
    frontier = next;
  }
  return reached == set;
}

struct HamiltonSearch {
  std::vector<Mask> nbr;
  Mask all = 0;

  bool extend(std::size_t cur, Mask visited) {
    const Mask rest = all & ~visited;
    if (rest == 0) return (nbr[cur] & 1) != 0;
    // Every unvisited vertex needs two usable neighbours (the start and the
    // current end count), and the unvisited part plus the end must be connected.
    const Mask usable = rest | (Mask{1} << cur) | 1;
    for (Mask r = rest; r; r &= r - 1) {
      const auto w = static_cast<std::size_t>(std::countr_zero(r));
      if (std::popcount(nbr[w] & usable) < 2) return false;
    }
    if ((nbr[0] & rest) == 0) return false;
    if (!mask_connected(rest | (Mask{1} << cur), nbr)) return false;
    for (Mask c = nbr[cur] & rest; c; c &= c - 1) {
      const auto w = static_cast<std::size_t>(std::countr_zero(c));
      if (extend(w, visited | (Mask{1} << w))) return true;
    }
    return false;
  }
};

}  // namespace

bool has_hamiltonian_cycle(const Graph& g) {
  const std::size_t v = g.order();
  if (v > kHamiltonMaxVertices) {
    throw InvalidArgument(std::to_string(v) + " vertices exceeds exact-oracle bound of " +
                          std::to_string(kHamiltonMaxVertices));
  }
  if (v < 3) return false;
  HamiltonSearch s{neighbour_masks(g), static_cast<Mask>((Mask{1} << v) - 1)};
  for (std::size_t a = 0; a < v; ++a) {
    if (std::popcount(s.nbr[a]) < 2) return false;
  }
  return s.extend(0, 1);
}

// ---------------------------------------------------------------- brute force

namespace brute {

namespace {

// Internally disjoint paths joining every listed pair of branch vertices.
struct SubdivisionSearch {
  const Graph& g;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<char> used;

  bool path_from(std::size_t at, std::size_t target, std::size_t pair_index) {
    for (std::size_t b = 0; b < g.order(); ++b) {
      if (!g.adjacent(at, b)) continue;
      if (b == target) {
        if (solve(pair_index + 1)) return true;
        continue;
      }
      if (used[b]) continue;
      used[b] = 1;
      const bool ok = path_from(b, target, pair_index);
      used[b] = 0;
      if (ok) return true;
    }
    return false;
  }

  bool solve(std::size_t pair_index) {
    if (pair_index == pairs.size()) return true;
    return path_from(pairs[pair_index].first, pairs[pair_index].second, pair_index);
  }
};

bool has_subdivision(const Graph& g, const std::vector<std::size_t>& branch,
                     std::vector<std::pair<std::size_t, std::size_t>> pairs) {
  SubdivisionSearch s{g, std::move(pairs), std::vector<char>(g.order(), 0)};
  for (auto b : branch) s.used[b] = 1;
  return s.solve(0);
}

}  // namespace

bool is_planar(const Graph& g) {
  const std::size_t v = g.order();
  std::vector<std::size_t> deg(v);
  for (std::size_t a = 0; a < v; ++a) deg[a] = g.degree(a);
  // K5: five branch vertices of degree >= 4.
  for (Mask m = 0; m < (Mask{1} << v); ++m) {
    if (std::popcount(m) != 5) continue;
    std::vector<std::size_t> b;
    for (std::size_t a = 0; a < v; ++a) {
      if (m >> a & 1) b.push_back(a);
    }
    if (std::any_of(b.begin(), b.end(), [&](std::size_t a) { return deg[a] < 4; })) continue;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = i + 1; j < 5; ++j) pairs.emplace_back(b[i], b[j]);
    }
    if (has_subdivision(g, b, pairs)) return false;
  }
  // K3,3: six branch vertices of degree >= 3 split into two sides.
  for (Mask m = 0; m < (Mask{1} << v); ++m) {
    if (std::popcount(m) != 6) continue;
    std::vector<std::size_t> b;
    for (std::size_t a = 0; a < v; ++a) {
      if (m >> a & 1) b.push_back(a);
    }
    if (std::any_of(b.begin(), b.end(), [&](std::size_t a) { return deg[a] < 3; })) continue;
    for (Mask side = 0; side < 64; ++side) {
      if (std::popcount(side) != 3 || !(side & 1)) continue;
      std::vector<std::size_t> left, right;
      for (std::size_t i = 0; i < 6; ++i) (side >> i & 1 ? left : right).push_back(b[i]);
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (auto x : left) {
        for (auto y : right) pairs.emplace_back(x, y);
      }
      if (has_subdivision(g, b, pairs)) return false;
    }
  }
  return true;
}

bool has_hamiltonian_cycle(const Graph& g) {
  const std::size_t v = g.order();
  if (v < 3) return false;
  std::vector<std::size_t> rest(v - 1);
  std::iota(rest.begin(), rest.end(), std::size_t{1});
  do {
    bool ok = g.adjacent(0, rest.front()) && g.adjacent(rest.back(), 0);
    for (std::size_t i = 0; ok && i + 1 < rest.size(); ++i) ok = g.adjacent(rest[i], rest[i + 1]);
    if (ok) return true;
  } while (std::next_permutation(rest.begin(), rest.end()));
  return false;
}

namespace {

void cycles_from(const Graph& g, std::size_t start, std::size_t at, std::vector<char>& on_path, int length,
                 int& best) {
  for (std::size_t b = start; b < g.order(); ++b) {
    if (!g.adjacent(at, b)) continue;
    if (b == start) {
      if (length >= 3 && (best == 0 || length < best)) best = length;
      continue;
    }
    if (on_path[b]) continue;
    on_path[b] = 1;
    cycles_from(g, start, b, on_path, length + 1, best);
    on_path[b] = 0;
  }
}

}  // namespace

std::optional<int> girth(const Graph& g) {
  int best = 0;
  std::vector<char> on_path(g.order(), 0);
  for (std::size_t s = 0; s < g.order(); ++s) {
    on_path[s] = 1;
    cycles_from(g, s, s, on_path, 1, best);
    on_path[s] = 0;
  }
  if (best == 0) return std::nullopt;
  return best;
}

bool is_eulerian(const Graph& g) {
  const std::size_t v = g.order();
  std::vector<std::uint8_t> left(v * v, 0);
  for (auto [a, b] : g.edges()) {
    left[static_cast<std::size_t>(a) * v + static_cast<std::size_t>(b)] = 1;
    left[static_cast<std::size_t>(b) * v + static_cast<std::size_t>(a)] = 1;
  }
  std::vector<std::size_t> stack{0}, walk;
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    std::size_t b = 0;
    while (b < v && !left[a * v + b]) ++b;
    if (b == v) {
      walk.push_back(a);
      stack.pop_back();
    } else {
      left[a * v + b] = left[b * v + a] = 0;
      stack.push_back(b);
    }
  }
  // A valid circuit is closed, has e steps, and uses each edge once.
  if (walk.size() != g.edge_count() + 1 || walk.front() != walk.back()) return false;
  std::vector<std::uint8_t> seen(v * v, 0);
  for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
    const std::size_t a = walk[i], b = walk[i + 1];
    if (!g.adjacent(a, b) || seen[a * v + b]) return false;
    seen[a * v + b] = seen[b * v + a] = 1;
  }
  return true;
}

}  // namespace brute

Graph complete_graph(std::size_t v) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = a + 1; b < v; ++b) e.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return Graph::from_edges(v, e);
}

Graph complete_bipartite(std::size_t x, std::size_t y) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t a = 0; a < x; ++a) {
    for (std::size_t b = 0; b < y; ++b) e.emplace_back(static_cast<int>(a), static_cast<int>(x + b));
  }
  return Graph::from_edges(x + y, e);
}

Graph cycle_graph(std::size_t v) {
  std::vector<std::pair<int, int>> e;
  for (std::size_t a = 0; a < v; ++a) e.emplace_back(static_cast<int>(a), static_cast<int>((a + 1) % v));
  return Graph::from_edges(v, e);
}

Graph petersen_graph() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);          // outer cycle
    e.emplace_back(i, i + 5);                // spokes
    e.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
  }
  return Graph::from_edges(10, e);
}

// ---------------------------------------------------------------- tasks

std::string to_string(GraphProperty p) {
  switch (p) {
    case GraphProperty::acyclic: return "acyclic";
    case GraphProperty::girth3way: return "girth3way";
    case GraphProperty::planar: return "planar";
    case GraphProperty::euler: return "euler";
    case GraphProperty::hamilton: return "hamilton";
  }
  return "?";
}

GraphProperty graph_property_from_string(const std::string& text) {
  for (auto p : {GraphProperty::acyclic, GraphProperty::girth3way, GraphProperty::planar, GraphProperty::euler,
                 GraphProperty::hamilton}) {
    if (to_string(p) == text) return p;
  }
  throw InvalidArgument("unknown graph property '" + text + "'");
}

std::optional<Label> graph_property_label(GraphProperty p, const Graph& g) {
  switch (p) {
    case GraphProperty::acyclic: return is_acyclic(g) ? 1 : 0;
    case GraphProperty::girth3way: {
      const auto r = girth(g);
      if (!r.girth) return std::nullopt;
      return r.cls == GirthClass::three ? 0 : r.cls == GirthClass::four ? 1 : 2;
    }
    case GraphProperty::planar: return is_planar(g) ? 1 : 0;
    case GraphProperty::euler: return is_eulerian(g) ? 1 : 0;
    case GraphProperty::hamilton: return has_hamiltonian_cycle(g) ? 1 : 0;
  }
  return std::nullopt;
}

namespace {

int arity_of(GraphProperty p) { return p == GraphProperty::girth3way ? 3 : 2; }

std::vector<std::string> label_names_of(GraphProperty p) {
  switch (p) {
    case GraphProperty::acyclic: return {"has cycle", "acyclic"};
    case GraphProperty::girth3way: return {"girth 3", "girth 4", "girth >4"};
    case GraphProperty::planar: return {"non-planar", "planar"};
    case GraphProperty::euler: return {"not eulerian", "eulerian"};
    case GraphProperty::hamilton: return {"not hamiltonian", "hamiltonian"};
  }
  return {};
}

Graph tree_plus_edges(std::size_t v, std::size_t extra, Rng& rng) {
  Graph t = random_tree(v, rng);
  auto edges = t.edges();
  std::vector<std::pair<int, int>> absent;
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = a + 1; b < v; ++b) {
      if (!t.adjacent(a, b)) absent.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  rng.shuffle(absent);
  for (std::size_t i = 0; i < std::min(extra, absent.size()); ++i) edges.push_back(absent[i]);
  return Graph::from_edges(v, edges);
}

// A tree plus a few chords joining vertices at tree distance >= 4, so every
// new cycle has length >= 5 (overlapping chords may still make shorter ones).
Graph long_cycle_graph(std::size_t v, Rng& rng) {
  Graph t = random_tree(v, rng);
  std::vector<std::vector<int>> dist(v, std::vector<int>(v, -1));
  for (std::size_t s = 0; s < v; ++s) {
    std::vector<std::size_t> queue{s};
    dist[s][s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      for (std::size_t b = 0; b < v; ++b) {
        if (t.adjacent(queue[h], b) && dist[s][b] < 0) {
          dist[s][b] = dist[s][queue[h]] + 1;
          queue.push_back(b);
        }
      }
    }
  }
  std::vector<std::pair<int, int>> far;
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = a + 1; b < v; ++b) {
      if (dist[a][b] >= 4) far.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  auto edges = t.edges();
  rng.shuffle(far);
  const std::size_t chords = 1 + rng.below(3);
  for (std::size_t i = 0; i < std::min(chords, far.size()); ++i) edges.push_back(far[i]);
  return Graph::from_edges(v, edges);
}

std::optional<Graph> bipartite_graph(std::size_t v, Rng& rng) {
  const double p = rng.uniform(0.3, 0.8);
  std::vector<int> side(v);
  for (auto& s : side) s = static_cast<int>(rng.below(2));
  std::vector<double> adj(v * v, 0.0);
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = a + 1; b < v; ++b) {
      if (side[a] != side[b] && rng.uniform() < p) adj[a * v + b] = adj[b * v + a] = 1.0;
    }
  }
  std::vector<std::uint8_t> bits(adj.begin(), adj.end());
  if (!is_connected(v, bits)) return std::nullopt;
  return Graph::from_adjacency(v, adj);
}

// Toggles edges between pairs of odd-degree vertices until all degrees are even.
std::optional<Graph> even_degree_graph(std::size_t v, Rng& rng) {
  Graph g = gen_connected_graph(v, rng.uniform(0.2, 0.7), rng);
  auto adj = g.adjacency_matrix();
  std::vector<std::size_t> odd;
  for (std::size_t a = 0; a < v; ++a) {
    if (g.degree(a) % 2) odd.push_back(a);
  }
  rng.shuffle(odd);
  for (std::size_t i = 0; i + 1 < odd.size(); i += 2) {
    const std::size_t a = odd[i], b = odd[i + 1];
    adj[a * v + b] = adj[b * v + a] = 1.0 - adj[a * v + b];
  }
  std::vector<std::uint8_t> bits(adj.begin(), adj.end());
  if (!is_connected(v, bits)) return std::nullopt;
  return Graph::from_adjacency(v, adj);
}

Graph planted_cycle_graph(std::size_t v, Rng& rng) {
  const auto order = rng.permutation(v);
  const double p = rng.uniform(0.0, 0.3);
  std::vector<double> adj(v * v, 0.0);
  for (std::size_t i = 0; i < v; ++i) {
    const std::size_t a = order[i], b = order[(i + 1) % v];
    adj[a * v + b] = adj[b * v + a] = 1.0;
  }
  for (std::size_t a = 0; a < v; ++a) {
    for (std::size_t b = a + 1; b < v; ++b) {
      if (rng.uniform() < p) adj[a * v + b] = adj[b * v + a] = 1.0;
    }
  }
  return Graph::from_adjacency(v, adj);
}

// Candidate generator aimed at one class; the oracle decides the real label.
std::optional<Graph> candidate(GraphProperty p, Label target, std::size_t v, Rng& rng) {
  switch (p) {
    case GraphProperty::acyclic:
      if (target == 1) return random_tree(v, rng);
      return gen_connected_graph(v, rng.uniform(0.1, 0.7), rng);
    case GraphProperty::girth3way:
      if (target == 0) return gen_connected_graph(v, rng.uniform(0.3, 0.8), rng);
      if (target == 1) return bipartite_graph(v, rng);
      return long_cycle_graph(v, rng);
    case GraphProperty::planar:
      return gen_connected_graph(v, target == 1 ? rng.uniform(0.15, 0.4) : rng.uniform(0.4, 0.9), rng);
    case GraphProperty::euler:
      if (target == 1) return even_degree_graph(v, rng);
      return gen_connected_graph(v, rng.uniform(0.2, 0.7), rng);
    case GraphProperty::hamilton:
      if (target == 1) return planted_cycle_graph(v, rng);
      if (rng.below(2) == 0) return tree_plus_edges(v, rng.below(v), rng);
      return gen_connected_graph(v, rng.uniform(0.15, 0.5), rng);
  }
  return std::nullopt;
}

void check(const GraphTaskParams& p) {
  if (p.per_class < 1) throw InvalidArgument("per_class must be positive");
  if (p.min_vertices < 4 || p.max_vertices > kHamiltonMaxVertices || p.min_vertices > p.max_vertices) {
    throw InvalidArgument("vertex range must lie within [4, 24]");
  }
}

}  // namespace

std::vector<Graph> sample_task_graphs(const GraphTaskParams& params, RngSeed seed, std::vector<Label>* labels) {
  check(params);
  const int arity = arity_of(params.property);
  const std::size_t base = (params.per_class + params.copies) / (params.copies + 1);
  std::vector<Graph> out;
  std::vector<Label> out_labels;
  std::vector<std::size_t> have(static_cast<std::size_t>(arity), 0);
  Rng rng(derive(seed, "graphs-" + to_string(params.property)));
  const std::size_t budget = 2000 * base * static_cast<std::size_t>(arity);
  std::size_t attempts = 0;
  for (Label target = 0; target < arity; ++target) {
    while (have[static_cast<std::size_t>(target)] < base) {
      if (++attempts > budget) {
        throw InvalidArgument("class " + label_names_of(params.property)[static_cast<std::size_t>(target)] +
                              " unreachable for this vertex range");
      }
      const std::size_t v = params.min_vertices + rng.below(params.max_vertices - params.min_vertices + 1);
      auto g = candidate(params.property, target, v, rng);
      if (!g) continue;
      const auto label = graph_property_label(params.property, *g);
      if (!label || have[static_cast<std::size_t>(*label)] >= base) continue;
      ++have[static_cast<std::size_t>(*label)];
      out.push_back(std::move(*g));
      out_labels.push_back(*label);
    }
  }
  if (labels) *labels = std::move(out_labels);
  return out;
}

LabeledDataset gen_graph_property_task(const GraphTaskParams& params, RngSeed seed) {
  std::vector<Label> labels;
  const auto graphs = sample_task_graphs(params, seed, &labels);
  std::vector<MatrixExample> items;
  items.reserve(graphs.size() * (params.copies + 1));
  Rng rng(derive(seed, "relabel"));
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Graph& g = graphs[i];
    for (std::size_t k = 0; k <= params.copies; ++k) {
      const Graph h = k == 0 ? g : g.relabeled(rng.permutation(g.order()));
      items.push_back({h.order(), h.order(), h.adjacency_matrix(), labels[i]});
    }
  }
  const std::size_t n = params.max_vertices;
  LabeledDataset like(FeatureShape::matrix(n, n), arity_of(params.property), "graph-" + to_string(params.property),
                      FeatureKind::binary);
  auto padded = pad_to_shape(items, n, n, like);
  auto out = balance_to(padded, params.per_class, derive(seed, "balance"));
  out.label_names = label_names_of(params.property);
  out.metadata["corpus"] = "random connected graphs, per-class samplers";
  out.metadata["vertices"] = std::to_string(params.min_vertices) + ".." + std::to_string(params.max_vertices);
  out.metadata["base_graphs"] = std::to_string(graphs.size());
  out.metadata["copies"] = std::to_string(params.copies);
  return out;
}

void write_edge_lists(const std::vector<Graph>& graphs, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& g : graphs) {
    out << "# v=" << g.order() << '\n';
    for (auto [a, b] : g.edges()) out << a << ' ' << b << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace mlmath

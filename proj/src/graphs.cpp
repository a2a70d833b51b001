#include "pgm/graphs.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <queue>
#include <set>

#include "pgm/error.hpp"

namespace pgm {

namespace {

void check_names(const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (name.empty()) throw ValidationError("vertex names must be nonempty");
    if (!seen.insert(name).second) throw ValidationError("duplicate vertex name '" + name + "'");
  }
}

std::optional<Vertex> find_name(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<Vertex>(it - names.begin());
}

std::vector<Edge> resolve_edges(const std::vector<std::string>& names,
                                const std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (const auto& [from, to] : edges) {
    auto u = find_name(names, from);
    auto v = find_name(names, to);
    if (!u) throw ValidationError("edge endpoint '" + from + "' is not a vertex");
    if (!v) throw ValidationError("edge endpoint '" + to + "' is not a vertex");
    out.emplace_back(*u, *v);
  }
  return out;
}

bool contains(const VertexSet& set, Vertex v) { return std::binary_search(set.begin(), set.end(), v); }

VertexSet normalized(VertexSet set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

bool is_subset(const VertexSet& small, const VertexSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

VertexSet intersection(const VertexSet& a, const VertexSet& b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void check_disjoint(std::size_t n, const VertexSet& x, const VertexSet& y, const VertexSet& z) {
  for (const VertexSet* set : {&x, &y, &z}) {
    for (Vertex v : *set) {
      if (v >= n) throw ValidationError("vertex index " + std::to_string(v) + " out of range");
    }
  }
  if (!intersection(x, y).empty() || !intersection(x, z).empty() || !intersection(y, z).empty()) {
    throw ValidationError("separation query sets must be pairwise disjoint");
  }
}

bool by_size_then_lex(const VertexSet& a, const VertexSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

// OrderedDag

OrderedDag::OrderedDag(std::vector<std::string> names, const std::vector<Edge>& edges)
    : names_(std::move(names)), parents_(names_.size()), children_(names_.size()) {
  check_names(names_);
  for (const auto& [u, v] : edges) {
    if (u >= names_.size() || v >= names_.size()) throw ValidationError("edge endpoint out of range");
    if (u == v) throw ValidationError("self-loop on '" + names_[u] + "'");
    if (u > v) {
      throw ValidationError("edge " + names_[u] + " -> " + names_[v] +
                            " contradicts the vertex order (list vertices topologically)");
    }
    if (contains(parents_[v], u)) {
      throw ValidationError("duplicate edge " + names_[u] + " -> " + names_[v]);
    }
    parents_[v].insert(std::upper_bound(parents_[v].begin(), parents_[v].end(), u), u);
    children_[u].insert(std::upper_bound(children_[u].begin(), children_[u].end(), v), v);
  }
}

OrderedDag::OrderedDag(std::vector<std::string> names,
                       const std::vector<std::pair<std::string, std::string>>& edges)
    : OrderedDag(names, resolve_edges(names, edges)) {}

std::optional<Vertex> OrderedDag::find(const std::string& name) const { return find_name(names_, name); }

bool OrderedDag::has_edge(Vertex from, Vertex to) const {
  return to < parents_.size() && contains(parents_[to], from);
}

std::vector<Edge> OrderedDag::edges() const {
  std::vector<Edge> out;
  for (Vertex u = 0; u < size(); ++u) {
    for (Vertex v : children_[u]) out.emplace_back(u, v);
  }
  return out;
}

std::size_t OrderedDag::edge_count() const {
  std::size_t n = 0;
  for (const auto& p : parents_) n += p.size();
  return n;
}

// OrderedUGraph

OrderedUGraph::OrderedUGraph(std::vector<std::string> names, const std::vector<Edge>& edges)
    : names_(std::move(names)), neighbors_(names_.size()) {
  check_names(names_);
  for (const auto& [u, v] : edges) {
    if (u >= names_.size() || v >= names_.size()) throw ValidationError("edge endpoint out of range");
    if (u == v) throw ValidationError("self-loop on '" + names_[u] + "'");
    if (contains(neighbors_[u], v)) {
      throw ValidationError("duplicate edge " + names_[u] + " - " + names_[v]);
    }
    neighbors_[u].insert(std::upper_bound(neighbors_[u].begin(), neighbors_[u].end(), v), v);
    neighbors_[v].insert(std::upper_bound(neighbors_[v].begin(), neighbors_[v].end(), u), u);
  }
}

OrderedUGraph::OrderedUGraph(std::vector<std::string> names,
                             const std::vector<std::pair<std::string, std::string>>& edges)
    : OrderedUGraph(names, resolve_edges(names, edges)) {}

std::optional<Vertex> OrderedUGraph::find(const std::string& name) const {
  return find_name(names_, name);
}

bool OrderedUGraph::has_edge(Vertex u, Vertex v) const {
  return u < neighbors_.size() && contains(neighbors_[u], v);
}

std::vector<Edge> OrderedUGraph::edges() const {
  std::vector<Edge> out;
  for (Vertex u = 0; u < size(); ++u) {
    for (Vertex v : neighbors_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::size_t OrderedUGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& nb : neighbors_) n += nb.size();
  return n / 2;
}

// Transformations

OrderedUGraph moralise_graph(const OrderedDag& g) {
  std::set<Edge> edges;
  for (Vertex v = 0; v < g.size(); ++v) {
    const auto& pa = g.parents(v);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      edges.emplace(pa[i], v);
      for (std::size_t j = i + 1; j < pa.size(); ++j) edges.emplace(pa[i], pa[j]);
    }
  }
  return OrderedUGraph(g.names(), std::vector<Edge>(edges.begin(), edges.end()));
}

OrderedDag triangulate_graph(const OrderedUGraph& h) {
  const std::size_t n = h.size();
  std::vector<Edge> edges;
  std::vector<char> reached(n);
  for (Vertex w = 0; w < n; ++w) {
    // Vertices reachable from w while staying at or above w.
    std::fill(reached.begin(), reached.end(), 0);
    std::vector<Vertex> stack{w};
    reached[w] = 1;
    VertexSet lower;
    while (!stack.empty()) {
      Vertex r = stack.back();
      stack.pop_back();
      for (Vertex u : h.neighbors(r)) {
        if (u < w) {
          lower.push_back(u);
        } else if (!reached[u]) {
          reached[u] = 1;
          stack.push_back(u);
        }
      }
    }
    for (Vertex v : normalized(std::move(lower))) edges.emplace_back(v, w);
  }
  std::sort(edges.begin(), edges.end());
  return OrderedDag(h.names(), edges);
}

bool is_ordered_chordal(const OrderedDag& g) {
  for (Vertex w = 0; w < g.size(); ++w) {
    const auto& pa = g.parents(w);
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) {
        if (!g.has_edge(pa[i], pa[j])) return false;
      }
    }
  }
  return true;
}

// Homomorphisms

namespace {

template <class Graph>
bool map_is_monotone(const GraphHom<Graph>& alpha) {
  if (alpha.vertex_map.size() != alpha.source.size()) return false;
  for (std::size_t v = 0; v < alpha.vertex_map.size(); ++v) {
    if (alpha.vertex_map[v] >= alpha.target.size()) return false;
    if (v > 0 && alpha.vertex_map[v - 1] > alpha.vertex_map[v]) return false;
  }
  return true;
}

}  // namespace

bool check_hom(const DagHom& alpha) {
  if (!map_is_monotone(alpha)) return false;
  for (const auto& [u, v] : alpha.source.edges()) {
    Vertex fu = alpha.vertex_map[u];
    Vertex fv = alpha.vertex_map[v];
    if (fu != fv && !alpha.target.has_edge(fu, fv)) return false;
  }
  return true;
}

bool check_hom(const UGraphHom& alpha) {
  if (!map_is_monotone(alpha)) return false;
  for (const auto& [u, v] : alpha.source.edges()) {
    Vertex fu = alpha.vertex_map[u];
    Vertex fv = alpha.vertex_map[v];
    if (fu != fv && !alpha.target.has_edge(fu, fv)) return false;
  }
  return true;
}

std::pair<DagHom, DagHom> decontract_hom(const DagHom& alpha) {
  if (!check_hom(alpha)) throw ValidationError("decontract_hom: alpha is not a graph homomorphism");
  std::vector<char> hit(alpha.target.size());
  for (Vertex image : alpha.vertex_map) hit[image] = 1;
  if (std::find(hit.begin(), hit.end(), 0) != hit.end()) {
    throw ValidationError("decontract_hom: alpha is not surjective on vertices");
  }

  const auto& src = alpha.source;
  const auto& map = alpha.vertex_map;
  std::vector<Edge> edges;
  for (Vertex v = 0; v < src.size(); ++v) {
    for (Vertex w = v + 1; w < src.size(); ++w) {
      if (map[v] == map[w] || alpha.target.has_edge(map[v], map[w])) edges.emplace_back(v, w);
    }
  }
  OrderedDag middle(src.names(), edges);

  std::vector<Vertex> identity(src.size());
  std::iota(identity.begin(), identity.end(), Vertex{0});
  DagHom beta{src, middle, identity};
  DagHom gamma{middle, alpha.target, map};
  return {std::move(beta), std::move(gamma)};
}

// Separation

bool d_separated(const OrderedDag& g, const VertexSet& x_in, const VertexSet& y_in,
                 const VertexSet& z_in) {
  const VertexSet x = normalized(x_in), y = normalized(y_in), z = normalized(z_in);
  const std::size_t n = g.size();
  check_disjoint(n, x, y, z);

  std::vector<char> in_z(n), z_or_ancestor(n);
  for (Vertex v : z) in_z[v] = 1;
  // Ancestors of z (inclusive) decide whether a collider is active.
  std::vector<Vertex> stack(z.begin(), z.end());
  for (Vertex v : z) z_or_ancestor[v] = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex p : g.parents(v)) {
      if (!z_or_ancestor[p]) {
        z_or_ancestor[p] = 1;
        stack.push_back(p);
      }
    }
  }

  // State (v, 0): arrived from a child (moving up); (v, 1): arrived from a parent.
  enum : int { kUp = 0, kDown = 1 };
  std::vector<std::array<char, 2>> visited(n, {0, 0});
  std::vector<std::pair<Vertex, int>> frontier;
  for (Vertex v : x) frontier.emplace_back(v, kUp);
  std::vector<char> reachable(n);
  while (!frontier.empty()) {
    auto [v, dir] = frontier.back();
    frontier.pop_back();
    if (visited[v][dir]) continue;
    visited[v][dir] = 1;
    if (!in_z[v]) reachable[v] = 1;
    if (dir == kUp && !in_z[v]) {
      for (Vertex p : g.parents(v)) frontier.emplace_back(p, kUp);
      for (Vertex c : g.children(v)) frontier.emplace_back(c, kDown);
    } else if (dir == kDown) {
      if (!in_z[v]) {
        for (Vertex c : g.children(v)) frontier.emplace_back(c, kDown);
      }
      if (z_or_ancestor[v]) {
        for (Vertex p : g.parents(v)) frontier.emplace_back(p, kUp);
      }
    }
  }
  return std::none_of(y.begin(), y.end(), [&](Vertex v) { return reachable[v] != 0; });
}

bool u_separated(const OrderedUGraph& h, const VertexSet& x_in, const VertexSet& y_in,
                 const VertexSet& z_in) {
  const VertexSet x = normalized(x_in), y = normalized(y_in), z = normalized(z_in);
  const std::size_t n = h.size();
  check_disjoint(n, x, y, z);

  std::vector<char> blocked(n), seen(n);
  for (Vertex v : z) blocked[v] = 1;
  std::vector<Vertex> stack(x.begin(), x.end());
  for (Vertex v : x) seen[v] = 1;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    for (Vertex u : h.neighbors(v)) {
      if (!seen[u] && !blocked[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return std::none_of(y.begin(), y.end(), [&](Vertex v) { return seen[v] != 0; });
}

// Cliques and junction trees

namespace {

void extend_cliques(const OrderedUGraph& h, VertexSet& current, std::vector<VertexSet>& out) {
  Vertex start = current.empty() ? 0 : current.back() + 1;
  for (Vertex v = start; v < h.size(); ++v) {
    bool complete = std::all_of(current.begin(), current.end(), [&](Vertex u) { return h.has_edge(u, v); });
    if (!complete) continue;
    current.push_back(v);
    out.push_back(current);
    extend_cliques(h, current, out);
    current.pop_back();
  }
}

std::vector<VertexSet> keep_maximal(std::vector<VertexSet> sets) {
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<VertexSet> out;
  for (const auto& s : sets) {
    bool dominated = std::any_of(sets.begin(), sets.end(), [&](const VertexSet& other) {
      return other.size() > s.size() && is_subset(s, other);
    });
    if (!dominated) out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<VertexSet> all_cliques(const OrderedUGraph& h) {
  std::vector<VertexSet> out;
  VertexSet current;
  extend_cliques(h, current, out);
  std::sort(out.begin(), out.end(), by_size_then_lex);
  return out;
}

std::vector<VertexSet> maximal_cliques(const OrderedUGraph& h) {
  auto maximal = keep_maximal(all_cliques(h));
  std::sort(maximal.begin(), maximal.end(), by_size_then_lex);
  return maximal;
}

ClusterTree junction_tree(const OrderedDag& g) {
  if (!is_ordered_chordal(g)) throw ValidationError("junction_tree: graph is not ordered chordal");
  std::vector<VertexSet> families;
  for (Vertex v = 0; v < g.size(); ++v) {
    VertexSet family = g.parents(v);
    family.insert(std::upper_bound(family.begin(), family.end(), v), v);
    families.push_back(std::move(family));
  }
  ClusterTree tree;
  tree.clusters = keep_maximal(std::move(families));  // sorted lexicographically

  struct Candidate {
    std::size_t weight, i, j;
  };
  std::vector<Candidate> candidates;
  const std::size_t k = tree.clusters.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      candidates.push_back({intersection(tree.clusters[i], tree.clusters[j]).size(), i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });

  std::vector<std::size_t> root(k);
  std::iota(root.begin(), root.end(), std::size_t{0});
  auto find = [&](std::size_t a) {
    while (root[a] != a) a = root[a] = root[root[a]];
    return a;
  };
  for (const auto& c : candidates) {
    std::size_t ri = find(c.i), rj = find(c.j);
    if (ri == rj) continue;
    root[ri] = rj;
    tree.tree_edges.emplace_back(c.i, c.j);
  }
  std::sort(tree.tree_edges.begin(), tree.tree_edges.end());
  for (const auto& [i, j] : tree.tree_edges) {
    tree.sepsets.push_back(intersection(tree.clusters[i], tree.clusters[j]));
  }
  return tree;
}

bool has_running_intersection(const ClusterTree& tree, std::size_t vertex_count) {
  const std::size_t k = tree.clusters.size();
  std::vector<std::vector<std::size_t>> adjacent(k);
  for (const auto& [i, j] : tree.tree_edges) {
    if (i >= k || j >= k) return false;
    adjacent[i].push_back(j);
    adjacent[j].push_back(i);
  }
  for (Vertex x = 0; x < vertex_count; ++x) {
    std::vector<std::size_t> holders;
    for (std::size_t c = 0; c < k; ++c) {
      if (contains(tree.clusters[c], x)) holders.push_back(c);
    }
    if (holders.size() <= 1) continue;
    std::vector<char> seen(k);
    std::queue<std::size_t> queue;
    queue.push(holders.front());
    seen[holders.front()] = 1;
    std::size_t count = 1;
    while (!queue.empty()) {
      std::size_t c = queue.front();
      queue.pop();
      for (std::size_t d : adjacent[c]) {
        if (!seen[d] && contains(tree.clusters[d], x)) {
          seen[d] = 1;
          ++count;
          queue.push(d);
        }
      }
    }
    if (count != holders.size()) return false;
  }
  return true;
}

template <class Graph>
VertexSet resolve_vertices(const Graph& g, const std::vector<std::string>& names) {
  VertexSet out;
  for (const auto& name : names) {
    auto v = g.find(name);
    if (!v) throw ValidationError("unknown vertex '" + name + "'");
    out.push_back(*v);
  }
  return normalized(std::move(out));
}

template VertexSet resolve_vertices(const OrderedDag&, const std::vector<std::string>&);
template VertexSet resolve_vertices(const OrderedUGraph&, const std::vector<std::string>&);

}  // namespace pgm

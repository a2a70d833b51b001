#ifndef PGM_GRAPHS_HPP
#define PGM_GRAPHS_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pgm {

/// Position of a vertex in its graph's vertex list. The position is the total
/// order: vertex 0 is the smallest.
using Vertex = std::size_t;

/// Vertices sorted ascending, no duplicates.
using VertexSet = std::vector<Vertex>;

using Edge = std::pair<Vertex, Vertex>;

/// Directed acyclic graph whose vertex listing is a topological order.
///
/// Every edge (u, v) satisfies u < v; the constructor rejects anything else
/// instead of re-sorting, so the order given by the caller is authoritative.
class OrderedDag {
 public:
  OrderedDag() = default;
  OrderedDag(std::vector<std::string> names, const std::vector<Edge>& edges);
  OrderedDag(std::vector<std::string> names,
             const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(Vertex v) const { return names_.at(v); }
  std::optional<Vertex> find(const std::string& name) const;

  bool has_edge(Vertex from, Vertex to) const;
  bool adjacent(Vertex u, Vertex v) const { return has_edge(u, v) || has_edge(v, u); }
  const VertexSet& parents(Vertex v) const { return parents_.at(v); }
  const VertexSet& children(Vertex v) const { return children_.at(v); }
  /// All edges, sorted lexicographically.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  friend bool operator==(const OrderedDag&, const OrderedDag&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<VertexSet> parents_;
  std::vector<VertexSet> children_;
};

/// Undirected graph over an ordered vertex list.
class OrderedUGraph {
 public:
  OrderedUGraph() = default;
  OrderedUGraph(std::vector<std::string> names, const std::vector<Edge>& edges);
  OrderedUGraph(std::vector<std::string> names,
                const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(Vertex v) const { return names_.at(v); }
  std::optional<Vertex> find(const std::string& name) const;

  bool has_edge(Vertex u, Vertex v) const;
  const VertexSet& neighbors(Vertex v) const { return neighbors_.at(v); }
  /// All edges as (low, high) pairs, sorted lexicographically.
  std::vector<Edge> edges() const;
  std::size_t edge_count() const;

  friend bool operator==(const OrderedUGraph&, const OrderedUGraph&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<VertexSet> neighbors_;
};

/// Vertex map between two graphs of the same kind; `vertex_map[v]` is the
/// image of source vertex v.
template <class Graph>
struct GraphHom {
  Graph source;
  Graph target;
  std::vector<Vertex> vertex_map;
};

using DagHom = GraphHom<OrderedDag>;
using UGraphHom = GraphHom<OrderedUGraph>;

/// Result of `junction_tree`. `sepsets[i]` belongs to `tree_edges[i]`.
struct ClusterTree {
  std::vector<VertexSet> clusters;
  std::vector<std::pair<std::size_t, std::size_t>> tree_edges;
  std::vector<VertexSet> sepsets;
};

/// Undirects the edges and marries every pair of co-parents.
OrderedUGraph moralise_graph(const OrderedDag& g);

/// Directs h along its order and adds v -> w whenever v < w and some path
/// from v to w only passes through vertices larger than w.
OrderedDag triangulate_graph(const OrderedUGraph& h);

/// True iff any two parents of a common child are adjacent.
bool is_ordered_chordal(const OrderedDag& g);

/// Order preservation plus edge preservation (direction included for DAGs).
/// Edges whose endpoints collapse onto one vertex are always respected.
bool check_hom(const DagHom& alpha);
bool check_hom(const UGraphHom& alpha);

/// Splits a surjective hom G -> G' into G -> G'' (identity on vertices)
/// followed by G'' -> G' (contraction of complete subgraphs).
///
/// Throws ValidationError if alpha is invalid or not surjective.
std::pair<DagHom, DagHom> decontract_hom(const DagHom& alpha);

/// d-separation of x and y given z. Throws ValidationError when the three sets
/// overlap or name unknown vertices.
bool d_separated(const OrderedDag& g, const VertexSet& x, const VertexSet& y,
                 const VertexSet& z);

/// Plain graph separation: every x-y path meets z.
bool u_separated(const OrderedUGraph& h, const VertexSet& x, const VertexSet& y,
                 const VertexSet& z);

/// Every nonempty complete vertex subset, ordered by size and then
/// lexicographically. Exponential; meant for small graphs.
std::vector<VertexSet> all_cliques(const OrderedUGraph& h);

/// Cliques not strictly contained in another clique, in `all_cliques` order.
std::vector<VertexSet> maximal_cliques(const OrderedUGraph& h);

/// Maximum-weight spanning tree over the maximal families {v} u pa(v).
/// Throws ValidationError if g is not ordered chordal.
ClusterTree junction_tree(const OrderedDag& g);

/// For each vertex, the clusters containing it form a connected subtree.
bool has_running_intersection(const ClusterTree& tree, std::size_t vertex_count);

/// Looks up every name in `names`; throws ValidationError on unknown names.
template <class Graph>
VertexSet resolve_vertices(const Graph& g, const std::vector<std::string>& names);

}  // namespace pgm

#endif  // PGM_GRAPHS_HPP

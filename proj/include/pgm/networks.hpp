#ifndef PGM_NETWORKS_HPP
#define PGM_NETWORKS_HPP

#include <map>
#include <span>
#include <string>
#include <vector>

#include "pgm/factors.hpp"
#include "pgm/graphs.hpp"

namespace pgm {

/// Ordered DAG plus one stochastic kernel per vertex. Vertex i carries
/// variable i of `vt`, and `kernels[i]` conditions it on exactly its parents.
struct BayesianNetwork {
  OrderedDag graph;
  VariableTable vt;
  std::vector<Kernel> kernels;
};

/// Undirected graph plus factors on some of its cliques. A clique without an
/// entry in `factors` carries the all-ones factor.
struct MarkovNetwork {
  OrderedUGraph graph;
  VariableTable vt;
  std::map<VertexSet, Factor> factors;
};

/// Ordered chordal DAG plus one nonnegative, possibly unnormalized, kernel
/// per vertex.
struct ChordalNetwork {
  OrderedDag graph;
  VariableTable vt;
  std::vector<Kernel> kernels;
};

struct Violation {
  std::string location;  // "vertex B", "clique {A,C}", "graph", ...
  std::string rule;      // short rule id, e.g. "stochastic"
  std::string detail;

  std::string to_string() const { return location + ": " + rule + ": " + detail; }
};

/// Collects every invariant violation; an empty result means the network is
/// well-formed.
std::vector<Violation> validate(const BayesianNetwork& bn);
std::vector<Violation> validate(const MarkovNetwork& mn);
std::vector<Violation> validate(const ChordalNetwork& cn);

/// Throws ValidationError listing all violations, if any.
void require_valid(const BayesianNetwork& bn);
void require_valid(const MarkovNetwork& mn);
void require_valid(const ChordalNetwork& cn);

/// Product of all kernels over every vertex; a probability table.
Factor bn_joint(const BayesianNetwork& bn);

/// Product of all clique factors over every vertex (not normalized).
Factor mn_unnormalized(const MarkovNetwork& mn);

/// Total mass of `mn_unnormalized`.
double mn_partition(const MarkovNetwork& mn);

/// True iff the partition function is zero.
bool mn_is_degenerate(const MarkovNetwork& mn);

/// Product of the (unnormalized) chordal kernels over every vertex.
Factor cn_product(const ChordalNetwork& cn);

/// "A=a, C=nc" style rendering of an assignment to `vars`.
std::string describe_assignment(const VariableTable& vt, const VarSet& vars,
                                std::span<const std::size_t> states);

/// "{A,C}" style rendering of a vertex set.
std::string describe_set(const std::vector<std::string>& names, const VertexSet& set);

}  // namespace pgm

#endif  // PGM_NETWORKS_HPP

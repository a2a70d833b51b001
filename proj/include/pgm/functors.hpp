#ifndef PGM_FUNCTORS_HPP
#define PGM_FUNCTORS_HPP

#include <optional>
#include <vector>

#include "pgm/networks.hpp"

namespace pgm {

/// One elimination step: the child-marginal `lambda` of the vertex's kernel,
/// and the parent it was multiplied into (none for vertices without parents,
/// whose scalar lambda contributes to the total mass).
struct EliminationStep {
  Vertex vertex;
  Factor lambda;
  std::optional<Vertex> absorbed_into;
};

/// Steps in elimination order, i.e. by strictly descending vertex.
using EliminationTrace = std::vector<EliminationStep>;

struct EliminationResult {
  BayesianNetwork bn;
  EliminationTrace trace;
  /// Total mass of the chordal kernel product: the product of the scalar
  /// lambdas of all parentless vertices.
  double mass = 0.0;
};

/// Moralises the graph and places each kernel, as a factor, on the clique
/// formed by its vertex and that vertex's parents. Other cliques stay
/// all-ones.
MarkovNetwork moralise_bn(const BayesianNetwork& bn);

/// Same placement for a chordal network; chordality means no edge is added.
MarkovNetwork cmoralise_cn(const ChordalNetwork& cn);

/// Triangulates the graph and hands every clique factor to the clique's
/// largest vertex, whose kernel becomes the product of the factors it
/// received (constant in parents none of them mention).
ChordalNetwork ctr_mn(const MarkovNetwork& mn);

/// Variable elimination along the vertex order, largest vertex first.
///
/// Each kernel is split into a stochastic kernel and its child-marginal
/// lambda; lambda is multiplied into the kernel of the largest parent, which
/// chordality guarantees can absorb it. The returned network has the same
/// graph as `cn`. Throws DegenerateError when the total mass is zero.
EliminationResult ve_cn(const ChordalNetwork& cn);

/// Normalized marginal of the smallest vertex.
Factor ve_marginal(const ChordalNetwork& cn);

/// `ve_cn(ctr_mn(mn))`. Throws DegenerateError for degenerate networks.
BayesianNetwork tr_mn(const MarkovNetwork& mn);

/// Syntactic shortcut for `tr_mn(moralise_bn(bn))`: moves to the triangulated
/// moral graph and broadcasts each kernel over its new parents.
BayesianNetwork trmor_bn(const BayesianNetwork& bn);

/// Collider A -> C <- B with phi(a, b, c) = 1 iff exactly two of the three
/// binary values agree. Once C is summed out A and B stay dependent, which no
/// Bayesian network on this graph allows.
struct VStructureReport {
  OrderedDag graph;
  VariableTable vt;
  std::vector<Kernel> kernels;  // omni on A and B, phi as the kernel of C
  Factor phi;                   // over {A, B, C}
  Factor joint_ab;              // phi with C summed out, unnormalized
  double z = 0.0;
  double p_a0_b0 = 0.0;
  double p_a0 = 0.0;
  double p_b0 = 0.0;
  bool factorizes = true;  // joint_ab / z equals the product of its marginals
  bool graph_is_chordal = true;
};

VStructureReport vstructure_counterexample();

}  // namespace pgm

#endif  // PGM_FUNCTORS_HPP

#ifndef PGM_MORPHISMS_HPP
#define PGM_MORPHISMS_HPP

#include <variant>
#include <vector>

#include "pgm/networks.hpp"

namespace pgm {

/// A network reduced to what morphisms look at: its graph, its variables and
/// its normalized joint distribution over all of them.
struct NetworkView {
  std::variant<OrderedDag, OrderedUGraph> graph;
  VariableTable vt;
  Factor joint;

  std::size_t size() const { return vt.size(); }
};

NetworkView view_of(const BayesianNetwork& bn);
/// Throws DegenerateError for a degenerate network.
NetworkView view_of(const MarkovNetwork& mn);
NetworkView view_of(const ChordalNetwork& cn);

/// Stochastic matrix between finite sets. `values[x * out_card + y]` is the
/// probability of output y on input x.
struct Channel {
  std::size_t in_card = 0;
  std::size_t out_card = 0;
  std::vector<double> values;

  static Channel identity(std::size_t card);
  /// The unique map into the one-point set.
  static Channel deletion(std::size_t card);

  double operator()(std::size_t out, std::size_t in) const { return values[in * out_card + out]; }
  double max_column_deviation() const;

  friend bool operator==(const Channel&, const Channel&) = default;
};

/// Morphism from a source network to a target network.
///
/// Note the direction of `alpha`: it maps TARGET vertices to SOURCE vertices,
/// i.e. it is a graph homomorphism from the target graph into the source
/// graph. `eta[v]` sends the states of source vertex v to joint states of the
/// target vertices alpha maps onto v, listed in target order (last fastest).
/// When nothing maps onto v, `eta[v]` is the deletion channel.
struct NetworkMorphism {
  std::vector<Vertex> alpha;
  std::vector<Channel> eta;
  std::vector<std::size_t> source_cards;
  std::vector<std::size_t> target_cards;

  /// Target vertices mapped onto source vertex v, ascending.
  VertexSet preimage(Vertex v) const;

  friend bool operator==(const NetworkMorphism&, const NetworkMorphism&) = default;
};

NetworkMorphism identity_morphism(const NetworkView& net);

/// Applies the tensor product of the eta channels to a joint table over the
/// source variables, giving a table over the target variables.
Factor push_forward(const NetworkMorphism& m, const Factor& source_joint);

/// Every violated morphism invariant. The distribution check reports the
/// largest pointwise deviation.
std::vector<Violation> validate_morphism(const NetworkMorphism& m, const NetworkView& source,
                                         const NetworkView& target);

/// `g` after `f`. Throws ValidationError unless f's target shape is g's source
/// shape.
NetworkMorphism compose_morphisms(const NetworkMorphism& f, const NetworkMorphism& g);

struct MorphismDecomposition {
  NetworkMorphism semantic;  // identity alpha, carries all of eta
  NetworkView intermediate;  // source graph, target domains regrouped per source vertex
  NetworkMorphism syntactic;  // the original alpha, identity channels
};

/// Splits m into its semantic and syntactic parts; composing them gives m
/// back. Throws ValidationError if m does not validate.
MorphismDecomposition decompose_morphism(const NetworkMorphism& m, const NetworkView& source,
                                         const NetworkView& target);

struct MarginalizationMorphism {
  NetworkMorphism morphism;
  NetworkView target;  // one vertex carrying the marginal
};

/// Morphism onto the one-vertex network holding the marginal of v.
MarginalizationMorphism marginalization_morphism(const NetworkView& net, Vertex v);

/// Per-vertex update data. `permutation[x]` is the image of state x (empty
/// means identity); `weights` is a nonnegative evidence vector over the
/// states (empty means no evidence). Only the shape of `weights` matters:
/// it is rescaled so that its largest entry is 1.
struct PearlEvidence {
  std::vector<std::size_t> permutation;
  std::vector<double> weights;
};

/// Outcome of a Pearl update. Each vertex with nontrivial evidence gains an
/// observation flag: its new states are "<state>|yes" and "<state>|no", and
/// the flag is drawn with probability weight(x) of "yes". `posterior` is the
/// updated joint conditioned on every flag being "yes", over the relabeled
/// original states.
template <class Network>
struct PearlResult {
  Network updated;
  NetworkMorphism morphism;
  Factor posterior;
};

/// Throws DegenerateError when the evidence rules out every joint state.
PearlResult<BayesianNetwork> pearl_update(const BayesianNetwork& bn, const std::vector<PearlEvidence>& evidence);
PearlResult<MarkovNetwork> pearl_update(const MarkovNetwork& mn, const std::vector<PearlEvidence>& evidence);

}  // namespace pgm

#endif  // PGM_MORPHISMS_HPP

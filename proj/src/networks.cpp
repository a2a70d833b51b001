#include "pgm/networks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pgm/error.hpp"

namespace pgm {

namespace {

void check_variables(const std::vector<std::string>& vertex_names, const VariableTable& vt,
                     std::vector<Violation>& out) {
  if (vt.size() != vertex_names.size()) {
    out.push_back({"variables", "coverage",
                   "graph has " + std::to_string(vertex_names.size()) + " vertices but " +
                       std::to_string(vt.size()) + " variables are declared"});
    return;
  }
  for (Vertex v = 0; v < vt.size(); ++v) {
    if (vt.name(v) != vertex_names[v]) {
      out.push_back({"variables", "order",
                     "variable " + std::to_string(v) + " is '" + vt.name(v) + "' but vertex " +
                         std::to_string(v) + " is '" + vertex_names[v] + "'"});
    }
  }
}

// Shape checks shared by Bayesian and chordal networks.
void check_kernels(const OrderedDag& g, const VariableTable& vt, const std::vector<Kernel>& kernels,
                   bool stochastic, std::vector<Violation>& out) {
  if (kernels.size() != g.size()) {
    out.push_back({"kernels", "coverage",
                   "expected one kernel per vertex (" + std::to_string(g.size()) + "), got " +
                       std::to_string(kernels.size())});
    return;
  }
  for (Vertex v = 0; v < g.size(); ++v) {
    const Kernel& k = kernels[v];
    const std::string where = "vertex " + g.name(v);
    if (k.child() != v) {
      out.push_back({where, "coverage", "kernel is for another child"});
      continue;
    }
    if (k.parents() != g.parents(v)) {
      out.push_back({where, "parents", "kernel parents " + describe_set(g.names(), k.parents()) +
                                           " differ from graph parents " +
                                           describe_set(g.names(), g.parents(v))});
      continue;
    }
    if (k.child_card() != vt.cardinality(v) || k.parent_cards() != vt.cardinalities(k.parents())) {
      out.push_back({where, "cardinality", "kernel shape does not match the declared states"});
      continue;
    }
    if (!stochastic) continue;
    // Report the worst column only: one violation per kernel.
    std::size_t worst_column = 0;
    double worst = -1.0, worst_sum = 0.0;
    for (std::size_t c = 0; c < k.column_count(); ++c) {
      auto col = k.column(c);
      double s = std::accumulate(col.begin(), col.end(), 0.0);
      if (std::abs(s - 1.0) > worst) {
        worst = std::abs(s - 1.0);
        worst_sum = s;
        worst_column = c;
      }
    }
    if (worst > kStochasticTolerance) {
      std::vector<std::size_t> states(k.parents().size());
      std::size_t rest = worst_column;
      for (std::size_t i = states.size(); i-- > 0;) {
        states[i] = rest % k.parent_cards()[i];
        rest /= k.parent_cards()[i];
      }
      std::ostringstream detail;
      detail.precision(12);
      detail << "column";
      if (!states.empty()) detail << " for (" << describe_assignment(vt, k.parents(), states) << ")";
      detail << " sums to " << worst_sum;
      out.push_back({where, "stochastic", detail.str()});
    }
  }
}

template <class Network>
void throw_if_invalid(const Network& net) {
  auto violations = validate(net);
  if (violations.empty()) return;
  std::vector<std::string> messages;
  for (const auto& v : violations) messages.push_back(v.to_string());
  throw ValidationError(std::move(messages));
}

Factor product_of_kernels(const VariableTable& vt, const std::vector<Kernel>& kernels) {
  VarSet all(vt.size());
  std::iota(all.begin(), all.end(), Var{0});
  Factor joint = Factor::ones(all, vt);
  for (const auto& k : kernels) joint = factor_product(joint, kernel_to_factor(k), vt);
  return joint;
}

}  // namespace

std::vector<Violation> validate(const BayesianNetwork& bn) {
  std::vector<Violation> out;
  check_variables(bn.graph.names(), bn.vt, out);
  if (!out.empty()) return out;
  check_kernels(bn.graph, bn.vt, bn.kernels, true, out);
  return out;
}

std::vector<Violation> validate(const ChordalNetwork& cn) {
  std::vector<Violation> out;
  check_variables(cn.graph.names(), cn.vt, out);
  if (!out.empty()) return out;
  if (!is_ordered_chordal(cn.graph)) {
    out.push_back({"graph", "chordal", "two parents of a common child are not adjacent"});
  }
  check_kernels(cn.graph, cn.vt, cn.kernels, false, out);
  return out;
}

std::vector<Violation> validate(const MarkovNetwork& mn) {
  std::vector<Violation> out;
  check_variables(mn.graph.names(), mn.vt, out);
  if (!out.empty()) return out;
  for (const auto& [clique, factor] : mn.factors) {
    std::string where;
    bool in_range = std::all_of(clique.begin(), clique.end(), [&](Vertex v) { return v < mn.graph.size(); });
    where = in_range ? "clique " + describe_set(mn.graph.names(), clique) : "clique (out of range)";
    if (!in_range) {
      out.push_back({where, "clique", "references an unknown vertex"});
      continue;
    }
    bool sorted = std::adjacent_find(clique.begin(), clique.end(), std::greater_equal<>()) == clique.end();
    bool complete = !clique.empty() && sorted;
    for (std::size_t i = 0; complete && i < clique.size(); ++i) {
      for (std::size_t j = i + 1; j < clique.size(); ++j) {
        if (!mn.graph.has_edge(clique[i], clique[j])) {
          complete = false;
          break;
        }
      }
    }
    if (!complete) {
      out.push_back({where, "clique", "not a clique of the graph"});
      continue;
    }
    if (factor.vars() != clique) {
      out.push_back({where, "scope", "factor variables differ from the clique"});
      continue;
    }
    if (factor.cards() != mn.vt.cardinalities(clique)) {
      out.push_back({where, "cardinality", "factor shape does not match the declared states"});
    }
  }
  return out;
}

void require_valid(const BayesianNetwork& bn) { throw_if_invalid(bn); }
void require_valid(const MarkovNetwork& mn) { throw_if_invalid(mn); }
void require_valid(const ChordalNetwork& cn) { throw_if_invalid(cn); }

Factor bn_joint(const BayesianNetwork& bn) {
  require_valid(bn);
  return product_of_kernels(bn.vt, bn.kernels);
}

Factor cn_product(const ChordalNetwork& cn) {
  require_valid(cn);
  return product_of_kernels(cn.vt, cn.kernels);
}

Factor mn_unnormalized(const MarkovNetwork& mn) {
  require_valid(mn);
  VarSet all(mn.vt.size());
  std::iota(all.begin(), all.end(), Var{0});
  Factor joint = Factor::ones(all, mn.vt);
  for (const auto& [clique, factor] : mn.factors) joint = factor_product(joint, factor, mn.vt);
  return joint;
}

double mn_partition(const MarkovNetwork& mn) { return mn_unnormalized(mn).sum(); }

bool mn_is_degenerate(const MarkovNetwork& mn) { return mn_partition(mn) == 0.0; }

std::string describe_assignment(const VariableTable& vt, const VarSet& vars, std::span<const std::size_t> states) {
  std::string out;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (k > 0) out += ", ";
    out += vt.name(vars[k]) + "=" + vt.states(vars[k]).at(states[k]);
  }
  return out;
}

std::string describe_set(const std::vector<std::string>& names, const VertexSet& set) {
  std::string out = "{";
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (k > 0) out += ",";
    out += set[k] < names.size() ? names[set[k]] : "?";
  }
  return out + "}";
}

}  // namespace pgm

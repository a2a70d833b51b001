#include "pgm/functors.hpp"

#include <algorithm>
#include <cmath>

#include "pgm/error.hpp"

namespace pgm {

namespace {

VertexSet family(const OrderedDag& g, Vertex v) {
  VertexSet out = g.parents(v);
  out.insert(std::upper_bound(out.begin(), out.end(), v), v);
  return out;
}

MarkovNetwork place_kernels(const OrderedDag& g, const VariableTable& vt, const std::vector<Kernel>& kernels) {
  MarkovNetwork mn{moralise_graph(g), vt, {}};
  for (Vertex v = 0; v < g.size(); ++v) {
    Factor f = kernel_to_factor(kernels[v]);
    auto [it, inserted] = mn.factors.try_emplace(family(g, v), f);
    if (!inserted) it->second = factor_product(it->second, f, vt);
  }
  return mn;
}

}  // namespace

MarkovNetwork moralise_bn(const BayesianNetwork& bn) {
  require_valid(bn);
  return place_kernels(bn.graph, bn.vt, bn.kernels);
}

MarkovNetwork cmoralise_cn(const ChordalNetwork& cn) {
  require_valid(cn);
  return place_kernels(cn.graph, cn.vt, cn.kernels);
}

ChordalNetwork ctr_mn(const MarkovNetwork& mn) {
  require_valid(mn);
  ChordalNetwork cn{triangulate_graph(mn.graph), mn.vt, {}};
  std::vector<Factor> received;
  for (Vertex v = 0; v < cn.graph.size(); ++v) received.push_back(Factor::ones(family(cn.graph, v), mn.vt));
  for (const auto& [clique, factor] : mn.factors) {
    Vertex owner = clique.back();
    Factor& target = received[owner];
    if (!std::includes(target.vars().begin(), target.vars().end(), clique.begin(), clique.end())) {
      throw ValidationError("ctr_mn: clique is not inside the family of its largest vertex");
    }
    target = factor_product(target, factor, mn.vt);
  }
  for (Vertex v = 0; v < cn.graph.size(); ++v) cn.kernels.push_back(factor_to_kernel(received[v], v));
  return cn;
}

EliminationResult ve_cn(const ChordalNetwork& cn) {
  require_valid(cn);
  const std::size_t n = cn.graph.size();
  std::vector<Factor> work;
  work.reserve(n);
  for (const auto& k : cn.kernels) work.push_back(kernel_to_factor(k));

  EliminationResult result;
  result.bn.graph = cn.graph;
  result.bn.vt = cn.vt;
  result.bn.kernels.resize(n);
  result.mass = 1.0;
  for (Vertex v = n; v-- > 0;) {
    auto [kernel, lambda] = normalize_to_kernel(work[v], v, cn.vt);
    result.bn.kernels[v] = std::move(kernel);
    std::optional<Vertex> into;
    const auto& parents = cn.graph.parents(v);
    if (!parents.empty()) {
      Vertex w = parents.back();
      // Chordality: pa(v) \ {w} is inside pa(w), so lambda fits in f_w's scope.
      const auto& scope = work[w].vars();
      if (!std::includes(scope.begin(), scope.end(), lambda.vars().begin(), lambda.vars().end())) {
        throw ValidationError("ve_cn: parents of '" + cn.graph.name(v) +
                              "' do not fit into the family of '" + cn.graph.name(w) + "'");
      }
      work[w] = factor_product(work[w], lambda, cn.vt);
      into = w;
    } else {
      result.mass *= lambda[0];
    }
    result.trace.push_back({v, std::move(lambda), into});
  }
  if (!(result.mass > 0.0)) {
    for (const auto& step : result.trace) {
      if (step.lambda.is_zero()) {
        throw DegenerateError("degenerate network: total mass is zero (lambda of '" +
                              cn.graph.name(step.vertex) + "' is identically zero)");
      }
    }
    throw DegenerateError("degenerate network: total mass is zero");
  }
  return result;
}

Factor ve_marginal(const ChordalNetwork& cn) {
  if (cn.graph.size() == 0) return Factor();
  auto result = ve_cn(cn);
  return kernel_to_factor(result.bn.kernels.front());
}

BayesianNetwork tr_mn(const MarkovNetwork& mn) { return ve_cn(ctr_mn(mn)).bn; }

BayesianNetwork trmor_bn(const BayesianNetwork& bn) {
  require_valid(bn);
  BayesianNetwork out{triangulate_graph(moralise_graph(bn.graph)), bn.vt, {}};
  for (Vertex v = 0; v < out.graph.size(); ++v) {
    out.kernels.push_back(kernel_extend(bn.kernels[v], out.graph.parents(v), bn.vt));
  }
  return out;
}

VStructureReport vstructure_counterexample() {
  VStructureReport r;
  r.graph = OrderedDag({"A", "B", "C"}, std::vector<Edge>{{0, 2}, {1, 2}});
  r.vt = VariableTable({{"A", {"0", "1"}}, {"B", {"0", "1"}}, {"C", {"0", "1"}}});

  std::vector<double> phi_values;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        int agreeing = (a == b) + (a == c) + (b == c);
        phi_values.push_back(agreeing == 1 ? 1.0 : 0.0);  // exactly one agreeing pair
      }
    }
  }
  r.kernels = {Kernel(0, {}, 2, {}, {1.0, 1.0}), Kernel(1, {}, 2, {}, {1.0, 1.0}),
               Kernel(2, {0, 1}, 2, {2, 2}, phi_values)};

  Factor product = Factor::ones({0, 1, 2}, r.vt);
  for (const auto& k : r.kernels) product = factor_product(product, kernel_to_factor(k), r.vt);
  r.phi = product;
  r.joint_ab = factor_marginalize(r.phi, {2}, r.vt);
  r.z = r.joint_ab.sum();
  Factor p = factor_normalize(r.joint_ab);
  r.p_a0_b0 = p[0];
  r.p_a0 = p[0] + p[1];
  r.p_b0 = p[0] + p[2];
  const double pa[2] = {r.p_a0, 1.0 - r.p_a0};
  const double pb[2] = {r.p_b0, 1.0 - r.p_b0};
  r.factorizes = true;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      if (std::abs(p[static_cast<std::size_t>(2 * a + b)] - pa[a] * pb[b]) > 1e-12) r.factorizes = false;
    }
  }
  r.graph_is_chordal = is_ordered_chordal(r.graph);
  return r;
}

}  // namespace pgm

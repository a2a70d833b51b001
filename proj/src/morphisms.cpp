#include "pgm/morphisms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pgm/error.hpp"

namespace pgm {

namespace {

VarSet all_vars(std::size_t n) {
  VarSet out(n);
  std::iota(out.begin(), out.end(), Var{0});
  return out;
}

std::size_t product_of(const std::vector<std::size_t>& cards, const VertexSet& subset) {
  std::size_t out = 1;
  for (Vertex u : subset) out *= cards[u];
  return out;
}

std::vector<std::size_t> pick(const std::vector<std::size_t>& cards, const VertexSet& subset) {
  std::vector<std::size_t> out;
  for (Vertex u : subset) out.push_back(cards[u]);
  return out;
}

std::size_t flat_index(std::span<const std::size_t> states, const std::vector<std::size_t>& cards) {
  std::size_t out = 0;
  for (std::size_t k = 0; k < cards.size(); ++k) out = out * cards[k] + states[k];
  return out;
}

std::vector<VertexSet> preimages(const std::vector<Vertex>& alpha, std::size_t source_size) {
  std::vector<VertexSet> out(source_size);
  for (Vertex u = 0; u < alpha.size(); ++u) {
    if (alpha[u] < source_size) out[alpha[u]].push_back(u);
  }
  return out;
}

std::string format_double(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

// Internal consistency of the arrays, independent of any network.
std::vector<Violation> shape_violations(const NetworkMorphism& m) {
  std::vector<Violation> out;
  const std::size_t n = m.source_cards.size();
  if (m.alpha.size() != m.target_cards.size()) {
    out.push_back({"alpha", "shape", "maps " + std::to_string(m.alpha.size()) + " vertices but the target has " +
                                         std::to_string(m.target_cards.size())});
  }
  for (Vertex u = 0; u < m.alpha.size(); ++u) {
    if (m.alpha[u] >= n) {
      out.push_back({"alpha", "shape", "target vertex " + std::to_string(u) + " maps outside the source"});
    }
  }
  if (m.eta.size() != n) {
    out.push_back({"eta", "shape", "expected one channel per source vertex (" + std::to_string(n) + "), got " +
                                       std::to_string(m.eta.size())});
  }
  if (!out.empty()) return out;
  auto pre = preimages(m.alpha, n);
  for (Vertex v = 0; v < n; ++v) {
    const Channel& c = m.eta[v];
    std::size_t expected_out = product_of(m.target_cards, pre[v]);
    if (c.in_card != m.source_cards[v] || c.out_card != expected_out || c.values.size() != c.in_card * c.out_card) {
      out.push_back({"eta " + std::to_string(v), "shape",
                     "channel is " + std::to_string(c.in_card) + "x" + std::to_string(c.out_card) + ", expected " +
                         std::to_string(m.source_cards[v]) + "x" + std::to_string(expected_out)});
    }
  }
  return out;
}

void require_shape(const NetworkMorphism& m) {
  auto violations = shape_violations(m);
  if (violations.empty()) return;
  std::vector<std::string> messages;
  for (const auto& v : violations) messages.push_back(v.to_string());
  throw ValidationError(std::move(messages));
}

bool hom_holds(const NetworkMorphism& m, const NetworkView& source, const NetworkView& target) {
  if (source.graph.index() != target.graph.index()) return false;
  if (const auto* src = std::get_if<OrderedDag>(&source.graph)) {
    return check_hom(DagHom{std::get<OrderedDag>(target.graph), *src, m.alpha});
  }
  return check_hom(UGraphHom{std::get<OrderedUGraph>(target.graph), std::get<OrderedUGraph>(source.graph), m.alpha});
}

std::size_t graph_size(const std::variant<OrderedDag, OrderedUGraph>& g) {
  return std::visit([](const auto& h) { return h.size(); }, g);
}

struct PreparedEvidence {
  std::vector<std::size_t> perm;
  std::vector<std::size_t> inverse;
  std::vector<double> p;  // probability of the "yes" flag
  bool flagged = false;

  std::size_t stride() const { return flagged ? 2 : 1; }
  double flag_weight(std::size_t x, std::size_t flag) const { return flag == 0 ? p[x] : 1.0 - p[x]; }
};

std::vector<PreparedEvidence> prepare(const VariableTable& vt, const std::vector<PearlEvidence>& evidence) {
  if (!evidence.empty() && evidence.size() != vt.size()) {
    throw ValidationError("pearl_update: expected evidence for " + std::to_string(vt.size()) +
                          " vertices, got " + std::to_string(evidence.size()));
  }
  std::vector<PreparedEvidence> out(vt.size());
  for (Var v = 0; v < vt.size(); ++v) {
    const std::size_t card = vt.cardinality(v);
    PreparedEvidence& e = out[v];
    const PearlEvidence none;
    const PearlEvidence& given = evidence.empty() ? none : evidence[v];
    const std::string where = "pearl_update: vertex '" + vt.name(v) + "': ";

    e.perm = given.permutation;
    if (e.perm.empty()) {
      e.perm.resize(card);
      std::iota(e.perm.begin(), e.perm.end(), std::size_t{0});
    }
    if (e.perm.size() != card) throw ValidationError(where + "permutation has the wrong length");
    e.inverse.assign(card, card);
    for (std::size_t x = 0; x < card; ++x) {
      if (e.perm[x] >= card || e.inverse[e.perm[x]] != card) {
        throw ValidationError(where + "permutation is not a bijection of the states");
      }
      e.inverse[e.perm[x]] = x;
    }

    e.p.assign(card, 1.0);
    if (!given.weights.empty()) {
      if (given.weights.size() != card) throw ValidationError(where + "evidence has the wrong length");
      double top = 0.0;
      for (double w : given.weights) {
        if (!std::isfinite(w) || w < 0.0) throw ValidationError(where + "evidence must be finite and nonnegative");
        top = std::max(top, w);
      }
      if (top == 0.0) throw DegenerateError(where + "evidence is identically zero");
      for (std::size_t x = 0; x < card; ++x) e.p[x] = given.weights[x] / top;
      e.flagged = std::any_of(e.p.begin(), e.p.end(), [](double q) { return q != 1.0; });
    }
  }
  return out;
}

VariableTable updated_table(const VariableTable& vt, const std::vector<PreparedEvidence>& ev) {
  std::vector<Variable> entries;
  for (Var v = 0; v < vt.size(); ++v) {
    Variable var{vt.name(v), {}};
    for (const auto& label : vt.states(v)) {
      if (ev[v].flagged) {
        var.states.push_back(label + "|yes");
        var.states.push_back(label + "|no");
      } else {
        var.states.push_back(label);
      }
    }
    entries.push_back(std::move(var));
  }
  return VariableTable(std::move(entries));
}

NetworkMorphism update_morphism(const VariableTable& vt, const VariableTable& updated,
                                const std::vector<PreparedEvidence>& ev) {
  NetworkMorphism m;
  m.alpha = all_vars(vt.size());
  m.source_cards = vt.cardinalities(all_vars(vt.size()));
  m.target_cards = updated.cardinalities(all_vars(vt.size()));
  for (Var v = 0; v < vt.size(); ++v) {
    const auto& e = ev[v];
    Channel c{m.source_cards[v], m.target_cards[v], std::vector<double>(m.source_cards[v] * m.target_cards[v], 0.0)};
    for (std::size_t x = 0; x < c.in_card; ++x) {
      for (std::size_t flag = 0; flag < e.stride(); ++flag) {
        c.values[x * c.out_card + e.perm[x] * e.stride() + flag] = e.flagged ? e.flag_weight(x, flag) : 1.0;
      }
    }
    m.eta.push_back(std::move(c));
  }
  return m;
}

// Re-indexes f onto the updated domains: f'(s) = f(pi^{-1}(s)), ignoring flags.
Factor relabel(const Factor& f, const VariableTable& updated, const std::vector<PreparedEvidence>& ev) {
  std::vector<std::size_t> cards = updated.cardinalities(f.vars());
  std::vector<double> values;
  std::vector<std::size_t> original(f.vars().size());
  for_each_assignment(cards, [&](std::span<const std::size_t> s, std::size_t) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto& e = ev[f.vars()[k]];
      original[k] = e.inverse[s[k] / e.stride()];
    }
    values.push_back(f.at(original));
  });
  return Factor(f.vars(), std::move(cards), std::move(values));
}

// Probability of each flag on vertex v, over the updated domain of v.
Factor flag_factor(Var v, const VariableTable& updated, const PreparedEvidence& e) {
  std::vector<double> values;
  for (std::size_t s = 0; s < updated.cardinality(v); ++s) values.push_back(e.flag_weight(e.inverse[s / 2], s % 2));
  return Factor({v}, {updated.cardinality(v)}, std::move(values));
}

// Restricts every flagged vertex to "yes" and normalizes over the relabeled
// original states.
Factor condition_on_flags(const Factor& joint, const VariableTable& vt, const VariableTable& updated,
                          const std::vector<PreparedEvidence>& ev) {
  const VarSet vars = all_vars(vt.size());
  const std::vector<std::size_t> cards = vt.cardinalities(vars);
  const std::vector<std::size_t> updated_cards = updated.cardinalities(vars);
  std::vector<double> values;
  std::vector<std::size_t> s(vars.size());
  for_each_assignment(cards, [&](std::span<const std::size_t> a, std::size_t) {
    for (std::size_t k = 0; k < a.size(); ++k) s[k] = a[k] * ev[k].stride();
    values.push_back(joint[flat_index(s, updated_cards)]);
  });
  Factor posterior(vars, cards, std::move(values));
  if (!(posterior.sum() > 0.0)) throw DegenerateError("pearl_update: the evidence rules out every joint state");
  return factor_normalize(posterior);
}

}  // namespace

NetworkView view_of(const BayesianNetwork& bn) { return {bn.graph, bn.vt, bn_joint(bn)}; }

NetworkView view_of(const MarkovNetwork& mn) {
  Factor joint = mn_unnormalized(mn);
  if (!(joint.sum() > 0.0)) throw DegenerateError("degenerate network: partition function is zero");
  return {mn.graph, mn.vt, factor_normalize(joint)};
}

NetworkView view_of(const ChordalNetwork& cn) {
  Factor joint = cn_product(cn);
  if (!(joint.sum() > 0.0)) throw DegenerateError("degenerate network: total mass is zero");
  return {cn.graph, cn.vt, factor_normalize(joint)};
}

Channel Channel::identity(std::size_t card) {
  Channel c{card, card, std::vector<double>(card * card, 0.0)};
  for (std::size_t x = 0; x < card; ++x) c.values[x * card + x] = 1.0;
  return c;
}

Channel Channel::deletion(std::size_t card) { return {card, 1, std::vector<double>(card, 1.0)}; }

double Channel::max_column_deviation() const {
  double worst = 0.0;
  for (std::size_t x = 0; x < in_card; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < out_card; ++y) s += values[x * out_card + y];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

VertexSet NetworkMorphism::preimage(Vertex v) const {
  VertexSet out;
  for (Vertex u = 0; u < alpha.size(); ++u) {
    if (alpha[u] == v) out.push_back(u);
  }
  return out;
}

NetworkMorphism identity_morphism(const NetworkView& net) {
  NetworkMorphism m;
  m.alpha = all_vars(net.size());
  m.source_cards = net.vt.cardinalities(m.alpha);
  m.target_cards = m.source_cards;
  for (std::size_t card : m.source_cards) m.eta.push_back(Channel::identity(card));
  return m;
}

Factor push_forward(const NetworkMorphism& m, const Factor& source_joint) {
  require_shape(m);
  const std::size_t n = m.source_cards.size();
  if (source_joint.vars() != all_vars(n) || source_joint.cards() != m.source_cards) {
    throw ValidationError("push_forward: joint table does not match the morphism's source");
  }
  const auto pre = preimages(m.alpha, n);
  const std::size_t target_size = product_of(m.target_cards, all_vars(m.target_cards.size()));

  // out_index[y * n + v]: output of eta[v] that target assignment y selects.
  std::vector<std::size_t> out_index(target_size * n);
  for_each_assignment(m.target_cards, [&](std::span<const std::size_t> y, std::size_t yi) {
    for (Vertex v = 0; v < n; ++v) {
      std::size_t idx = 0;
      for (Vertex u : pre[v]) idx = idx * m.target_cards[u] + y[u];
      out_index[yi * n + v] = idx;
    }
  });

  std::vector<double> out(target_size, 0.0);
  for_each_assignment(m.source_cards, [&](std::span<const std::size_t> x, std::size_t xi) {
    const double w = source_joint[xi];
    if (w == 0.0) return;
    for (std::size_t yi = 0; yi < target_size; ++yi) {
      double p = w;
      for (Vertex v = 0; v < n && p != 0.0; ++v) p *= m.eta[v](out_index[yi * n + v], x[v]);
      out[yi] += p;
    }
  });
  return Factor(all_vars(m.target_cards.size()), m.target_cards, std::move(out));
}

std::vector<Violation> validate_morphism(const NetworkMorphism& m, const NetworkView& source,
                                         const NetworkView& target) {
  std::vector<Violation> out = shape_violations(m);
  if (m.source_cards != source.vt.cardinalities(all_vars(source.size()))) {
    out.push_back({"source", "type", "morphism source shape differs from the source network"});
  }
  if (m.target_cards != target.vt.cardinalities(all_vars(target.size()))) {
    out.push_back({"target", "type", "morphism target shape differs from the target network"});
  }
  if (source.graph.index() != target.graph.index()) {
    out.push_back({"graph", "type", "source and target graphs are of different kinds"});
  }
  if (!out.empty()) return out;

  if (graph_size(source.graph) != source.size() || graph_size(target.graph) != target.size() ||
      !hom_holds(m, source, target)) {
    out.push_back({"alpha", "hom", "not an order-preserving homomorphism from the target graph to the source graph"});
  }
  for (Vertex v = 0; v < m.eta.size(); ++v) {
    const Channel& c = m.eta[v];
    const std::string where = "eta " + source.vt.name(v);
    if (std::any_of(c.values.begin(), c.values.end(), [](double x) { return !std::isfinite(x) || x < 0.0; })) {
      out.push_back({where, "stochastic", "has a negative or non-finite entry"});
    } else if (double dev = c.max_column_deviation(); dev > kStochasticTolerance) {
      out.push_back({where, "stochastic", "a column sum is off by " + format_double(dev)});
    }
  }
  if (!out.empty()) return out;

  double dev = max_abs_difference(push_forward(m, source.joint), target.joint);
  if (dev > kStochasticTolerance) {
    out.push_back({"joint", "preservation", "pushed-forward source joint differs from the target joint by up to " +
                                                format_double(dev)});
  }
  return out;
}

NetworkMorphism compose_morphisms(const NetworkMorphism& f, const NetworkMorphism& g) {
  require_shape(f);
  require_shape(g);
  if (f.target_cards != g.source_cards) {
    throw ValidationError("compose_morphisms: target of the first morphism is not the source of the second");
  }
  NetworkMorphism out;
  out.source_cards = f.source_cards;
  out.target_cards = g.target_cards;
  for (Vertex u = 0; u < g.alpha.size(); ++u) out.alpha.push_back(f.alpha[g.alpha[u]]);

  const auto mid_pre = preimages(f.alpha, f.source_cards.size());
  const auto g_pre = preimages(g.alpha, g.source_cards.size());
  const auto out_pre = preimages(out.alpha, out.source_cards.size());
  for (Vertex v = 0; v < out.source_cards.size(); ++v) {
    const VertexSet& mids = mid_pre[v];
    const VertexSet& finals = out_pre[v];
    const std::vector<std::size_t> mid_cards = pick(f.target_cards, mids);
    const std::vector<std::size_t> final_cards = pick(g.target_cards, finals);

    // For every final assignment z, the output of g.eta[w] it selects, per w.
    std::vector<std::vector<std::size_t>> selected;
    for_each_assignment(final_cards, [&](std::span<const std::size_t> z, std::size_t) {
      std::vector<std::size_t> row;
      for (Vertex w : mids) {
        std::size_t idx = 0;
        for (Vertex u : g_pre[w]) {
          std::size_t pos = static_cast<std::size_t>(std::lower_bound(finals.begin(), finals.end(), u) - finals.begin());
          idx = idx * g.target_cards[u] + z[pos];
        }
        row.push_back(idx);
      }
      selected.push_back(std::move(row));
    });

    const Channel& first = f.eta[v];
    Channel c{first.in_card, selected.size(), std::vector<double>(first.in_card * selected.size(), 0.0)};
    for (std::size_t x = 0; x < c.in_card; ++x) {
      for_each_assignment(mid_cards, [&](std::span<const std::size_t> mid, std::size_t mi) {
        const double coef = first(mi, x);
        if (coef == 0.0) return;
        for (std::size_t zi = 0; zi < selected.size(); ++zi) {
          double p = coef;
          for (std::size_t k = 0; k < mids.size(); ++k) p *= g.eta[mids[k]](selected[zi][k], mid[k]);
          c.values[x * c.out_card + zi] += p;
        }
      });
    }
    out.eta.push_back(std::move(c));
  }
  return out;
}

MorphismDecomposition decompose_morphism(const NetworkMorphism& m, const NetworkView& source,
                                         const NetworkView& target) {
  auto violations = validate_morphism(m, source, target);
  if (!violations.empty()) {
    std::vector<std::string> messages;
    for (const auto& v : violations) messages.push_back(v.to_string());
    throw ValidationError(std::move(messages));
  }
  const std::size_t n = source.size();
  const auto pre = preimages(m.alpha, n);

  std::vector<Variable> entries;
  for (Vertex v = 0; v < n; ++v) {
    Variable var{source.vt.name(v), {}};
    for_each_assignment(pick(m.target_cards, pre[v]), [&](std::span<const std::size_t> y, std::size_t) {
      std::string label;
      for (std::size_t k = 0; k < y.size(); ++k) {
        if (k > 0) label += ",";
        label += target.vt.states(pre[v][k])[y[k]];
      }
      var.states.push_back(pre[v].empty() ? "*" : label);
    });
    entries.push_back(std::move(var));
  }
  VariableTable vt(std::move(entries));
  const std::vector<std::size_t> cards = vt.cardinalities(all_vars(n));

  std::vector<double> regrouped(target.joint.size(), 0.0);
  std::vector<std::size_t> grouped(n);
  for_each_assignment(m.target_cards, [&](std::span<const std::size_t> y, std::size_t yi) {
    for (Vertex v = 0; v < n; ++v) {
      std::size_t idx = 0;
      for (Vertex u : pre[v]) idx = idx * m.target_cards[u] + y[u];
      grouped[v] = idx;
    }
    regrouped[flat_index(grouped, cards)] = target.joint[yi];
  });

  MorphismDecomposition out;
  out.intermediate = {source.graph, vt, Factor(all_vars(n), cards, std::move(regrouped))};

  out.semantic.alpha = all_vars(n);
  out.semantic.eta = m.eta;
  out.semantic.source_cards = m.source_cards;
  out.semantic.target_cards = cards;

  out.syntactic.alpha = m.alpha;
  for (std::size_t card : cards) out.syntactic.eta.push_back(Channel::identity(card));
  out.syntactic.source_cards = cards;
  out.syntactic.target_cards = m.target_cards;
  return out;
}

MarginalizationMorphism marginalization_morphism(const NetworkView& net, Vertex v) {
  if (v >= net.size()) throw ValidationError("marginalization_morphism: vertex out of range");
  const std::string& name = net.vt.name(v);
  const std::size_t card = net.vt.cardinality(v);

  MarginalizationMorphism out;
  if (std::holds_alternative<OrderedDag>(net.graph)) {
    out.target.graph = OrderedDag({name}, std::vector<Edge>{});
  } else {
    out.target.graph = OrderedUGraph({name}, std::vector<Edge>{});
  }
  out.target.vt = VariableTable({net.vt.at(v)});
  Factor marginal = factor_marginal_onto(net.joint, {v}, net.vt);
  out.target.joint = Factor({0}, {card}, marginal.values());

  out.morphism.alpha = {v};
  out.morphism.source_cards = net.vt.cardinalities(all_vars(net.size()));
  out.morphism.target_cards = {card};
  for (Vertex w = 0; w < net.size(); ++w) {
    const std::size_t c = out.morphism.source_cards[w];
    out.morphism.eta.push_back(w == v ? Channel::identity(c) : Channel::deletion(c));
  }
  return out;
}

PearlResult<BayesianNetwork> pearl_update(const BayesianNetwork& bn, const std::vector<PearlEvidence>& evidence) {
  require_valid(bn);
  const auto ev = prepare(bn.vt, evidence);
  PearlResult<BayesianNetwork> out;
  out.updated.graph = bn.graph;
  out.updated.vt = updated_table(bn.vt, ev);
  for (Vertex v = 0; v < bn.graph.size(); ++v) {
    const Kernel& k = bn.kernels[v];
    const auto& e = ev[v];
    const std::vector<std::size_t> parent_cards = out.updated.vt.cardinalities(k.parents());
    const std::size_t child_card = out.updated.vt.cardinality(v);
    std::vector<double> values;
    std::vector<std::size_t> original(k.parents().size());
    for_each_assignment(parent_cards, [&](std::span<const std::size_t> s, std::size_t) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& pe = ev[k.parents()[i]];
        original[i] = pe.inverse[s[i] / pe.stride()];
      }
      auto column = k.column(flat_index(original, k.parent_cards()));
      for (std::size_t c = 0; c < child_card; ++c) {
        const std::size_t x = e.inverse[c / e.stride()];
        values.push_back(e.flagged ? column[x] * e.flag_weight(x, c % 2) : column[x]);
      }
    });
    out.updated.kernels.emplace_back(v, k.parents(), child_card, parent_cards, std::move(values), true);
  }
  out.morphism = update_morphism(bn.vt, out.updated.vt, ev);
  out.posterior = condition_on_flags(bn_joint(out.updated), bn.vt, out.updated.vt, ev);
  return out;
}

PearlResult<MarkovNetwork> pearl_update(const MarkovNetwork& mn, const std::vector<PearlEvidence>& evidence) {
  require_valid(mn);
  const auto ev = prepare(mn.vt, evidence);
  PearlResult<MarkovNetwork> out;
  out.updated.graph = mn.graph;
  out.updated.vt = updated_table(mn.vt, ev);
  for (const auto& [clique, factor] : mn.factors) out.updated.factors.emplace(clique, relabel(factor, out.updated.vt, ev));
  for (Vertex v = 0; v < mn.graph.size(); ++v) {
    if (!ev[v].flagged) continue;
    Factor flags = flag_factor(v, out.updated.vt, ev[v]);
    auto [it, inserted] = out.updated.factors.try_emplace({v}, flags);
    if (!inserted) it->second = factor_product(it->second, flags, out.updated.vt);
  }
  out.morphism = update_morphism(mn.vt, out.updated.vt, ev);
  out.posterior = condition_on_flags(mn_unnormalized(out.updated), mn.vt, out.updated.vt, ev);
  return out;
}

}  // namespace pgm

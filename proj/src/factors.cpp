#include "pgm/factors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "pgm/error.hpp"

namespace pgm {

namespace {

std::size_t product_of(const std::vector<std::size_t>& cards) {
  return std::accumulate(cards.begin(), cards.end(), std::size_t{1}, std::multiplies<>());
}

// Stride of each variable of `along` inside a layout listing `order` with the
// last variable fastest. Variables absent from the layout get stride 0.
std::vector<std::size_t> strides_of(const std::vector<Var>& order, const std::vector<std::size_t>& cards,
                                    const std::vector<Var>& along) {
  std::vector<std::size_t> own(order.size());
  std::size_t stride = 1;
  for (std::size_t k = order.size(); k-- > 0;) {
    own[k] = stride;
    stride *= cards[k];
  }
  std::vector<std::size_t> out(along.size(), 0);
  for (std::size_t i = 0; i < along.size(); ++i) {
    auto it = std::find(order.begin(), order.end(), along[i]);
    if (it != order.end()) out[i] = own[static_cast<std::size_t>(it - order.begin())];
  }
  return out;
}

// For every assignment of `cards` in canonical order, the linear offset given
// by `strides`.
std::vector<std::size_t> offsets(const std::vector<std::size_t>& cards, const std::vector<std::size_t>& strides) {
  const std::size_t total = product_of(cards);
  std::vector<std::size_t> out(total);
  std::vector<std::size_t> state(cards.size(), 0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < total; ++i) {
    out[i] = offset;
    for (std::size_t k = cards.size(); k-- > 0;) {
      if (++state[k] < cards[k]) {
        offset += strides[k];
        break;
      }
      offset -= strides[k] * (cards[k] - 1);
      state[k] = 0;
    }
  }
  return out;
}

VarSet sorted_union(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

VarSet sorted_difference(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool strictly_sorted(const VarSet& vars) {
  return std::adjacent_find(vars.begin(), vars.end(), std::greater_equal<>()) == vars.end();
}

void check_cards(const Factor& f, const VariableTable& vt) {
  for (std::size_t k = 0; k < f.vars().size(); ++k) {
    Var v = f.vars()[k];
    if (v >= vt.size()) throw ValidationError("factor variable index " + std::to_string(v) + " out of range");
    if (vt.cardinality(v) != f.cards()[k]) {
      throw ValidationError("cardinality mismatch for variable '" + vt.name(v) + "'");
    }
  }
}

void check_values(const std::vector<double>& values) {
  for (double x : values) {
    if (!std::isfinite(x) || x < 0.0) throw ValidationError("table values must be finite and nonnegative");
  }
}

}  // namespace

// VariableTable

VariableTable::VariableTable(std::vector<Variable> entries) : entries_(std::move(entries)) {
  std::set<std::string> names;
  for (const auto& var : entries_) {
    if (var.name.empty()) throw ValidationError("variable names must be nonempty");
    if (!names.insert(var.name).second) throw ValidationError("duplicate variable '" + var.name + "'");
    if (var.states.empty()) throw ValidationError("variable '" + var.name + "' has no states");
    std::set<std::string> labels(var.states.begin(), var.states.end());
    if (labels.size() != var.states.size()) {
      throw ValidationError("variable '" + var.name + "' has duplicate state labels");
    }
  }
}

std::vector<std::size_t> VariableTable::cardinalities(const VarSet& vars) const {
  std::vector<std::size_t> out;
  out.reserve(vars.size());
  for (Var v : vars) out.push_back(cardinality(v));
  return out;
}

std::vector<std::string> VariableTable::names() const {
  std::vector<std::string> out;
  for (const auto& var : entries_) out.push_back(var.name);
  return out;
}

std::optional<Var> VariableTable::find(const std::string& name) const {
  for (Var v = 0; v < entries_.size(); ++v) {
    if (entries_[v].name == name) return v;
  }
  return std::nullopt;
}

std::optional<std::size_t> VariableTable::find_state(Var v, const std::string& label) const {
  const auto& states = entries_.at(v).states;
  auto it = std::find(states.begin(), states.end(), label);
  if (it == states.end()) return std::nullopt;
  return static_cast<std::size_t>(it - states.begin());
}

// Factor

Factor::Factor() : values_{1.0} {}

Factor::Factor(VarSet vars, std::vector<std::size_t> cards, std::vector<double> values)
    : vars_(std::move(vars)), cards_(std::move(cards)), values_(std::move(values)) {
  if (!strictly_sorted(vars_)) throw ValidationError("factor variables must be sorted and distinct");
  if (cards_.size() != vars_.size()) throw ValidationError("factor needs one cardinality per variable");
  if (std::find(cards_.begin(), cards_.end(), std::size_t{0}) != cards_.end()) {
    throw ValidationError("factor cardinalities must be positive");
  }
  if (values_.size() != product_of(cards_)) {
    throw ValidationError("factor has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(product_of(cards_)));
  }
  check_values(values_);
}

Factor Factor::scalar(double value) { return Factor({}, {}, {value}); }

Factor Factor::ones(const VarSet& vars, const VariableTable& vt) {
  auto cards = vt.cardinalities(vars);
  std::vector<double> values(product_of(cards), 1.0);
  return Factor(vars, std::move(cards), std::move(values));
}

Factor Factor::over(const VarSet& vars, const VariableTable& vt, std::vector<double> values) {
  return Factor(vars, vt.cardinalities(vars), std::move(values));
}

double Factor::at(std::span<const std::size_t> states) const {
  if (states.size() != vars_.size()) throw ValidationError("Factor::at: wrong assignment length");
  std::size_t index = 0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k] >= cards_[k]) throw ValidationError("Factor::at: state index out of range");
    index = index * cards_[k] + states[k];
  }
  return values_[index];
}

double Factor::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

bool Factor::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x == 0.0; });
}

// Kernel

Kernel::Kernel(Var child, VarSet parents, std::size_t child_card, std::vector<std::size_t> parent_cards,
               std::vector<double> values, bool stochastic)
    : child_(child),
      parents_(std::move(parents)),
      child_card_(child_card),
      parent_cards_(std::move(parent_cards)),
      values_(std::move(values)),
      stochastic_(stochastic) {
  if (!strictly_sorted(parents_)) throw ValidationError("kernel parents must be sorted and distinct");
  if (std::binary_search(parents_.begin(), parents_.end(), child_)) {
    throw ValidationError("kernel child cannot be its own parent");
  }
  if (parent_cards_.size() != parents_.size()) throw ValidationError("kernel needs one cardinality per parent");
  if (child_card_ == 0 || std::find(parent_cards_.begin(), parent_cards_.end(), std::size_t{0}) !=
                              parent_cards_.end()) {
    throw ValidationError("kernel cardinalities must be positive");
  }
  if (values_.size() != product_of(parent_cards_) * child_card_) {
    throw ValidationError("kernel has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(product_of(parent_cards_) * child_card_));
  }
  check_values(values_);
  if (stochastic_ && !is_stochastic(kStochasticTolerance)) {
    throw ValidationError("kernel flagged stochastic has a column not summing to 1");
  }
}

std::span<const double> Kernel::column(std::size_t parent_index) const {
  return std::span<const double>(values_).subspan(parent_index * child_card_, child_card_);
}

double Kernel::max_column_deviation() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < column_count(); ++c) {
    auto col = column(c);
    double s = std::accumulate(col.begin(), col.end(), 0.0);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

// Operations

Factor factor_product(const Factor& a, const Factor& b, const VariableTable& vt) {
  check_cards(a, vt);
  check_cards(b, vt);
  VarSet vars = sorted_union(a.vars(), b.vars());
  auto cards = vt.cardinalities(vars);
  auto oa = offsets(cards, strides_of(a.vars(), a.cards(), vars));
  auto ob = offsets(cards, strides_of(b.vars(), b.cards(), vars));
  std::vector<double> values(oa.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = a[oa[i]] * b[ob[i]];
  return Factor(std::move(vars), std::move(cards), std::move(values));
}

Factor factor_marginalize(const Factor& f, const VarSet& drop, const VariableTable& vt) {
  check_cards(f, vt);
  for (Var v : drop) {
    if (!std::binary_search(f.vars().begin(), f.vars().end(), v)) {
      std::string label = v < vt.size() ? vt.name(v) : std::to_string(v);
      throw ValidationError("cannot marginalize '" + label + "': not a variable of the factor");
    }
  }
  VarSet sorted_drop = drop;
  std::sort(sorted_drop.begin(), sorted_drop.end());
  VarSet keep = sorted_difference(f.vars(), sorted_drop);
  if (keep.size() == f.vars().size()) return f;
  auto cards = vt.cardinalities(keep);
  std::vector<double> values(product_of(cards), 0.0);
  auto target = offsets(f.cards(), strides_of(keep, cards, f.vars()));
  for (std::size_t i = 0; i < f.size(); ++i) values[target[i]] += f[i];
  return Factor(std::move(keep), std::move(cards), std::move(values));
}

Factor factor_marginal_onto(const Factor& f, const VarSet& keep, const VariableTable& vt) {
  VarSet sorted_keep = keep;
  std::sort(sorted_keep.begin(), sorted_keep.end());
  for (Var v : sorted_keep) {
    if (!std::binary_search(f.vars().begin(), f.vars().end(), v)) {
      throw ValidationError("marginal target '" + (v < vt.size() ? vt.name(v) : std::to_string(v)) +
                            "' is not a variable of the factor");
    }
  }
  return factor_marginalize(f, sorted_difference(f.vars(), sorted_keep), vt);
}

std::pair<Kernel, Factor> normalize_to_kernel(const Factor& f, Var child, const VariableTable& vt) {
  if (!std::binary_search(f.vars().begin(), f.vars().end(), child)) {
    throw ValidationError("normalize_to_kernel: child is not a variable of the factor");
  }
  Factor lambda = factor_marginalize(f, {child}, vt);
  Kernel unnormalized = factor_to_kernel(f, child);
  const std::size_t card = unnormalized.child_card();
  std::vector<double> values = unnormalized.values();
  // lambda's layout is the kernel's parent layout, so column c has mass lambda[c].
  for (std::size_t c = 0; c < lambda.size(); ++c) {
    double mass = lambda[c];
    for (std::size_t y = 0; y < card; ++y) {
      double& entry = values[c * card + y];
      entry = mass > 0.0 ? entry / mass : 1.0 / static_cast<double>(card);
    }
  }
  Kernel g(child, unnormalized.parents(), card, unnormalized.parent_cards(), std::move(values), true);
  return {std::move(g), std::move(lambda)};
}

bool propto_equal(const Factor& a, const Factor& b, double tol) {
  if (a.vars() != b.vars() || a.cards() != b.cards()) {
    throw ValidationError("propto_equal: factors have different scopes");
  }
  const double sa = a.sum(), sb = b.sum();
  if (sa == 0.0 || sb == 0.0) return a.is_zero() && b.is_zero();
  const double scale = sb / sa;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(scale * a[i] - b[i]) > tol) return false;
  }
  return true;
}

Factor kernel_to_factor(const Kernel& k) {
  std::vector<Var> layout = k.parents();
  layout.push_back(k.child());
  std::vector<std::size_t> layout_cards = k.parent_cards();
  layout_cards.push_back(k.child_card());

  VarSet vars = k.parents();
  vars.insert(std::upper_bound(vars.begin(), vars.end(), k.child()), k.child());
  std::vector<std::size_t> cards(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto pos = static_cast<std::size_t>(std::find(layout.begin(), layout.end(), vars[i]) - layout.begin());
    cards[i] = layout_cards[pos];
  }
  auto source = offsets(cards, strides_of(layout, layout_cards, vars));
  std::vector<double> values(source.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = k.values()[source[i]];
  return Factor(std::move(vars), std::move(cards), std::move(values));
}

Kernel factor_to_kernel(const Factor& f, Var child) {
  auto it = std::lower_bound(f.vars().begin(), f.vars().end(), child);
  if (it == f.vars().end() || *it != child) throw ValidationError("factor_to_kernel: child not in factor");
  const auto child_pos = static_cast<std::size_t>(it - f.vars().begin());

  VarSet parents;
  std::vector<std::size_t> parent_cards;
  for (std::size_t k = 0; k < f.vars().size(); ++k) {
    if (k == child_pos) continue;
    parents.push_back(f.vars()[k]);
    parent_cards.push_back(f.cards()[k]);
  }
  std::vector<Var> layout = parents;
  layout.push_back(child);
  std::vector<std::size_t> layout_cards = parent_cards;
  layout_cards.push_back(f.cards()[child_pos]);

  auto source = offsets(layout_cards, strides_of(f.vars(), f.cards(), layout));
  std::vector<double> values(source.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f[source[i]];
  return Kernel(child, std::move(parents), f.cards()[child_pos], std::move(parent_cards), std::move(values));
}

Factor factor_restrict(const Factor& f, const std::vector<std::pair<Var, std::size_t>>& assignment) {
  VarSet keep;
  std::vector<std::size_t> keep_cards;
  std::vector<std::size_t> fixed(f.vars().size(), 0);
  std::vector<char> is_fixed(f.vars().size(), 0);
  for (std::size_t k = 0; k < f.vars().size(); ++k) {
    for (const auto& [var, state] : assignment) {
      if (var != f.vars()[k]) continue;
      if (state >= f.cards()[k]) throw ValidationError("factor_restrict: state index out of range");
      fixed[k] = state;
      is_fixed[k] = 1;
    }
    if (!is_fixed[k]) {
      keep.push_back(f.vars()[k]);
      keep_cards.push_back(f.cards()[k]);
    }
  }
  auto strides = strides_of(f.vars(), f.cards(), f.vars());
  std::size_t base = 0;
  std::vector<std::size_t> keep_strides;
  for (std::size_t k = 0; k < f.vars().size(); ++k) {
    if (is_fixed[k]) {
      base += fixed[k] * strides[k];
    } else {
      keep_strides.push_back(strides[k]);
    }
  }
  auto source = offsets(keep_cards, keep_strides);
  std::vector<double> values(source.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f[base + source[i]];
  return Factor(std::move(keep), std::move(keep_cards), std::move(values));
}

Factor factor_extend(const Factor& f, const VarSet& vars, const VariableTable& vt) {
  check_cards(f, vt);
  if (!std::includes(vars.begin(), vars.end(), f.vars().begin(), f.vars().end())) {
    throw ValidationError("factor_extend: target scope must contain the factor's variables");
  }
  auto cards = vt.cardinalities(vars);
  auto source = offsets(cards, strides_of(f.vars(), f.cards(), vars));
  std::vector<double> values(source.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f[source[i]];
  return Factor(vars, std::move(cards), std::move(values));
}

Kernel kernel_extend(const Kernel& k, const VarSet& parents, const VariableTable& vt) {
  if (!std::includes(parents.begin(), parents.end(), k.parents().begin(), k.parents().end()) ||
      std::binary_search(parents.begin(), parents.end(), k.child())) {
    throw ValidationError("kernel_extend: new parents must contain the old ones and exclude the child");
  }
  std::vector<Var> old_layout = k.parents();
  old_layout.push_back(k.child());
  std::vector<std::size_t> old_cards = k.parent_cards();
  old_cards.push_back(k.child_card());

  std::vector<Var> layout = parents;
  layout.push_back(k.child());
  auto parent_cards = vt.cardinalities(parents);
  std::vector<std::size_t> cards = parent_cards;
  cards.push_back(k.child_card());

  auto source = offsets(cards, strides_of(old_layout, old_cards, layout));
  std::vector<double> values(source.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = k.values()[source[i]];
  return Kernel(k.child(), parents, k.child_card(), std::move(parent_cards), std::move(values), k.stochastic());
}

Factor factor_normalize(const Factor& f) {
  const double mass = f.sum();
  if (!(mass > 0.0)) throw DegenerateError("cannot normalize a factor with zero total mass");
  std::vector<double> values = f.values();
  for (double& x : values) x /= mass;
  return Factor(f.vars(), f.cards(), std::move(values));
}

double max_abs_difference(const Factor& a, const Factor& b) {
  if (a.vars() != b.vars() || a.cards() != b.cards()) {
    throw ValidationError("max_abs_difference: factors have different scopes");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

double max_rel_difference(const Factor& a, const Factor& b) {
  if (a.vars() != b.vars() || a.cards() != b.cards()) {
    throw ValidationError("max_rel_difference: factors have different scopes");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (scale > 0.0) worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

void for_each_assignment(const std::vector<std::size_t>& cards,
                         const std::function<void(std::span<const std::size_t>, std::size_t)>& fn) {
  const std::size_t total = product_of(cards);
  std::vector<std::size_t> state(cards.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    fn(state, i);
    for (std::size_t k = cards.size(); k-- > 0;) {
      if (++state[k] < cards[k]) break;
      state[k] = 0;
    }
  }
}

}  // namespace pgm

#ifndef PGM_FACTORS_HPP
#define PGM_FACTORS_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pgm/graphs.hpp"

namespace pgm {

/// Index of a variable in a VariableTable. In a network variable i is vertex i.
using Var = Vertex;
using VarSet = VertexSet;

struct Variable {
  std::string name;
  std::vector<std::string> states;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Ordered list of finite variables; list order is the global variable order.
class VariableTable {
 public:
  VariableTable() = default;
  explicit VariableTable(std::vector<Variable> entries);

  std::size_t size() const { return entries_.size(); }
  const std::vector<Variable>& entries() const { return entries_; }
  const Variable& at(Var v) const { return entries_.at(v); }
  const std::string& name(Var v) const { return entries_.at(v).name; }
  const std::vector<std::string>& states(Var v) const { return entries_.at(v).states; }
  std::size_t cardinality(Var v) const { return entries_.at(v).states.size(); }
  std::vector<std::size_t> cardinalities(const VarSet& vars) const;
  std::vector<std::string> names() const;
  std::optional<Var> find(const std::string& name) const;
  std::optional<std::size_t> find_state(Var v, const std::string& label) const;

  friend bool operator==(const VariableTable&, const VariableTable&) = default;

 private:
  std::vector<Variable> entries_;
};

/// Dense nonnegative table over variables sorted by the global order. The last
/// variable varies fastest in `values()`. A factor with no variables is a
/// scalar.
class Factor {
 public:
  /// The scalar 1.
  Factor();
  Factor(VarSet vars, std::vector<std::size_t> cards, std::vector<double> values);

  static Factor scalar(double value);
  static Factor ones(const VarSet& vars, const VariableTable& vt);
  static Factor over(const VarSet& vars, const VariableTable& vt, std::vector<double> values);

  const VarSet& vars() const { return vars_; }
  const std::vector<std::size_t>& cards() const { return cards_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  /// `states[k]` is the state of `vars()[k]`.
  double at(std::span<const std::size_t> states) const;
  double sum() const;
  bool is_zero() const;

  friend bool operator==(const Factor&, const Factor&) = default;

 private:
  VarSet vars_;
  std::vector<std::size_t> cards_;
  std::vector<double> values_;
};

/// Table for one child variable given sorted parents. Values are laid out as
/// consecutive child "columns", one per parent assignment (last parent
/// fastest); the child state varies fastest within a column.
///
/// `stochastic()` records that the constructor verified every column sums to
/// one within 1e-9. Unflagged kernels may or may not be stochastic.
class Kernel {
 public:
  Kernel() = default;
  Kernel(Var child, VarSet parents, std::size_t child_card, std::vector<std::size_t> parent_cards,
         std::vector<double> values, bool stochastic = false);

  Var child() const { return child_; }
  const VarSet& parents() const { return parents_; }
  std::size_t child_card() const { return child_card_; }
  const std::vector<std::size_t>& parent_cards() const { return parent_cards_; }
  const std::vector<double>& values() const { return values_; }
  bool stochastic() const { return stochastic_; }

  std::size_t column_count() const { return child_card_ == 0 ? 0 : values_.size() / child_card_; }
  std::span<const double> column(std::size_t parent_index) const;
  /// Largest |column sum - 1| over all columns.
  double max_column_deviation() const;
  bool is_stochastic(double tol) const { return max_column_deviation() <= tol; }

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  Var child_ = 0;
  VarSet parents_;
  std::size_t child_card_ = 0;
  std::vector<std::size_t> parent_cards_;
  std::vector<double> values_;
  bool stochastic_ = false;
};

/// Tolerance for accepting externally supplied kernels as stochastic.
inline constexpr double kStochasticTolerance = 1e-9;

/// Pointwise product over the union of both scopes. Throws ValidationError if
/// a variable's cardinality disagrees with `vt`.
Factor factor_product(const Factor& a, const Factor& b, const VariableTable& vt);

/// Sums out `drop`. Throws ValidationError if `drop` names a variable that is
/// not in `f`.
Factor factor_marginalize(const Factor& f, const VarSet& drop, const VariableTable& vt);

/// Keeps only `keep`, summing out everything else.
Factor factor_marginal_onto(const Factor& f, const VarSet& keep, const VariableTable& vt);

/// Splits f into a stochastic kernel for `child` and the child-marginal
/// lambda over the remaining variables. Columns with zero mass become uniform.
std::pair<Kernel, Factor> normalize_to_kernel(const Factor& f, Var child, const VariableTable& vt);

/// True iff some positive scale s = sum(b) / sum(a) gives |s * a - b| <= tol
/// pointwise. Two all-zero factors are proportional. Throws ValidationError
/// when the scopes differ.
bool propto_equal(const Factor& a, const Factor& b, double tol);

/// Re-indexes a kernel into the sorted joint layout over parents and child.
Factor kernel_to_factor(const Kernel& k);

/// Re-indexes a factor into kernel layout for `child`, without normalizing.
Kernel factor_to_kernel(const Factor& f, Var child);

/// Slices f at a partial assignment. Variables not in f are ignored. Throws
/// ValidationError when a state index is out of range.
Factor factor_restrict(const Factor& f, const std::vector<std::pair<Var, std::size_t>>& assignment);

/// Broadcasts f constantly over the extra variables in `vars` (a superset).
Factor factor_extend(const Factor& f, const VarSet& vars, const VariableTable& vt);

/// Broadcasts a kernel constantly over extra parents. `parents` must contain
/// the kernel's parents and not the child.
Kernel kernel_extend(const Kernel& k, const VarSet& parents, const VariableTable& vt);

/// Divides every entry by the total mass. Throws DegenerateError on zero mass.
Factor factor_normalize(const Factor& f);

/// Largest pointwise |a - b|; throws ValidationError when the scopes differ.
double max_abs_difference(const Factor& a, const Factor& b);

/// Largest pointwise |a - b| / max(|a|, |b|), zero where both vanish.
double max_rel_difference(const Factor& a, const Factor& b);

/// Visits every assignment of `cards` in canonical order (last fastest).
/// The callback receives the assignment and its linear index.
void for_each_assignment(const std::vector<std::size_t>& cards,
                         const std::function<void(std::span<const std::size_t>, std::size_t)>& fn);

}  // namespace pgm

#endif  // PGM_FACTORS_HPP

// Small hand-built networks shared by several test files.
#ifndef PGM_TESTS_FIXTURES_HPP
#define PGM_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "pgm/networks.hpp"

namespace fixtures {

inline pgm::Variable binary(const std::string& upper, const std::string& lower) {
  return {upper, {lower, "n" + lower}};
}

// Four students A, B, C, D meeting in pairs; states x and nx.
inline pgm::MarkovNetwork misconception() {
  pgm::VariableTable vt({binary("A", "a"), binary("B", "b"), binary("C", "c"), binary("D", "d")});
  pgm::OrderedUGraph h({"A", "B", "C", "D"}, std::vector<pgm::Edge>{{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  std::map<pgm::VertexSet, pgm::Factor> factors;
  factors.emplace(pgm::VertexSet{0, 1}, pgm::Factor::over({0, 1}, vt, {10, 1, 5, 30}));
  factors.emplace(pgm::VertexSet{1, 2}, pgm::Factor::over({1, 2}, vt, {100, 1, 1, 100}));
  factors.emplace(pgm::VertexSet{2, 3}, pgm::Factor::over({2, 3}, vt, {1, 100, 100, 1}));
  factors.emplace(pgm::VertexSet{0, 3}, pgm::Factor::over({0, 3}, vt, {100, 1, 1, 100}));
  return {std::move(h), std::move(vt), std::move(factors)};
}

// Burglary B and earthquake E trigger alarm A; radio R reports earthquakes.
// Order B < E < A < R. The probabilities are illustrative.
inline pgm::BayesianNetwork bear() {
  pgm::VariableTable vt({binary("B", "b"), binary("E", "e"), binary("A", "a"), binary("R", "r")});
  pgm::OrderedDag g({"B", "E", "A", "R"}, std::vector<pgm::Edge>{{0, 2}, {1, 2}, {1, 3}});
  std::vector<pgm::Kernel> kernels{
      pgm::Kernel(0, {}, 2, {}, {0.01, 0.99}, true),
      pgm::Kernel(1, {}, 2, {}, {0.02, 0.98}, true),
      pgm::Kernel(2, {0, 1}, 2, {2, 2}, {0.95, 0.05, 0.94, 0.06, 0.29, 0.71, 0.001, 0.999}, true),
      pgm::Kernel(3, {1}, 2, {2}, {0.99, 0.01, 0.0001, 0.9999}, true),
  };
  return {std::move(g), std::move(vt), std::move(kernels)};
}

// Chain A -> B -> C over binary variables 0/1.
inline pgm::BayesianNetwork chain3(double pa0, double pb0_a0, double pb0_a1, double pc0_b0, double pc0_b1) {
  pgm::VariableTable vt({{"A", {"0", "1"}}, {"B", {"0", "1"}}, {"C", {"0", "1"}}});
  pgm::OrderedDag g({"A", "B", "C"}, std::vector<pgm::Edge>{{0, 1}, {1, 2}});
  std::vector<pgm::Kernel> kernels{
      pgm::Kernel(0, {}, 2, {}, {pa0, 1 - pa0}, true),
      pgm::Kernel(1, {0}, 2, {2}, {pb0_a0, 1 - pb0_a0, pb0_a1, 1 - pb0_a1}, true),
      pgm::Kernel(2, {1}, 2, {2}, {pc0_b0, 1 - pc0_b0, pc0_b1, 1 - pc0_b1}, true),
  };
  return {std::move(g), std::move(vt), std::move(kernels)};
}

}  // namespace fixtures

#endif  // PGM_TESTS_FIXTURES_HPP

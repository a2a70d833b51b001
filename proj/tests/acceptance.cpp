// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "pgm/document.hpp"
#include "pgm/functors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace pgm;

namespace {

constexpr double kFourDecimalTol = 1e-4;
constexpr double kJointTol = 1e-9;
constexpr double kRelativeTol = 1e-12;
constexpr double kColumnTol = 1e-12;
constexpr double kIdempotentTol = 1e-12;
constexpr double kRoundTripTol = 1e-9;

constexpr std::size_t kBnCount = 120;
constexpr std::size_t kMnCount = 120;
constexpr std::size_t kCnCount = 100;
constexpr std::size_t kMaxVertices = 6;
constexpr std::size_t kMaxCard = 3;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Corpus {
  std::vector<BayesianNetwork> bns;
  std::vector<MarkovNetwork> mns;
  std::vector<ChordalNetwork> cns;
};

Corpus make_corpus() {
  Corpus c;
  gen::Rng rng(20240601);
  for (std::size_t i = 0; i < kBnCount; ++i) c.bns.push_back(gen::bn(rng, 1 + i % kMaxVertices, kMaxCard));
  for (std::size_t i = 0; i < kMnCount; ++i) c.mns.push_back(gen::mn(rng, 1 + i % kMaxVertices, kMaxCard));
  for (std::size_t i = 0; i < kCnCount; ++i) c.cns.push_back(gen::cn(rng, 1 + i % kMaxVertices, kMaxCard));
  return c;
}

std::string fmt(const char* pattern, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, x);
  return buf;
}

MarkovNetwork load_misconception() {
  std::ifstream in(std::string(PGM_TEST_DATA) + "/misconception.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return std::get<MarkovNetwork>(parse_document(ss.str()));
}

Outcome misconception_ve() {
  auto bn = ve_cn(ctr_mn(load_misconception())).bn;
  // Probability of each variable's first state, one entry per parent column.
  const std::vector<std::vector<double>> reference{
      {0.1806}, {0.2307, 0.8475}, {0.6666, 0.0002, 0.9998, 0.3334}, {0.5, 0.9999, 0.0001, 0.5}};
  double worst = 0.0;
  int entries = 0;
  for (Vertex v = 0; v < 4; ++v) {
    for (std::size_t col = 0; col < reference[v].size(); ++col) {
      auto column = bn.kernels[v].column(col);
      worst = std::max(worst, std::abs(column[0] - reference[v][col]));
      worst = std::max(worst, std::abs(column[1] - (1.0 - reference[v][col])));
      entries += 2;
    }
  }
  return {worst <= kFourDecimalTol, std::to_string(entries) + " entries, max deviation " + fmt("%.2e", worst)};
}

Outcome misconception_triangulation() {
  auto g = ctr_mn(load_misconception()).graph;
  // A, B, C, D are vertices 0..3.
  auto edges = oracle::edge_set(g.edges());
  decltype(edges) expected{{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}};
  return {edges == expected, std::to_string(edges.size()) + " edges"};
}

Outcome partition_cross_check() {
  auto mn = load_misconception();
  auto brute = oracle::mn_product(mn);
  double z = 0.0, a = 0.0;
  for (std::size_t i = 0; i < brute.size(); ++i) {
    z += brute[i];
    if (i < brute.size() / 2) a += brute[i];
  }
  double lib = mn_partition(mn);
  bool pass = lib == z && z == 7201840.0 && a == 1300310.0 && std::abs(a / z - 0.1806) <= kFourDecimalTol;
  return {pass, "Z = " + fmt("%.0f", lib) + ", g_A(a) = " + fmt("%.6f", a / z)};
}

Outcome moralisation_preservation(const Corpus& c) {
  double worst = 0.0;
  for (const auto& bn : c.bns) {
    auto product = oracle::normalized(oracle::mn_product(moralise_bn(bn)));
    worst = std::max(worst, oracle::max_abs_diff(product, bn_joint(bn).values()));
  }
  return {worst <= kJointTol, std::to_string(c.bns.size()) + " networks, max deviation " + fmt("%.2e", worst)};
}

Outcome triangulation_preservation(const Corpus& c) {
  double worst = 0.0;
  for (const auto& mn : c.mns) {
    auto cn = ctr_mn(mn);
    worst = std::max(worst, oracle::max_rel_diff(oracle::kernel_product(cn.vt, cn.kernels), mn_unnormalized(mn).values()));
  }
  return {worst <= kRelativeTol, std::to_string(c.mns.size()) + " networks, max relative deviation " + fmt("%.2e", worst)};
}

Outcome ve_soundness(const Corpus& c) {
  double worst_joint = 0.0, worst_column = 0.0;
  for (const auto& cn : c.cns) {
    auto bn = ve_cn(cn).bn;
    auto expected = oracle::normalized(oracle::kernel_product(cn.vt, cn.kernels));
    worst_joint = std::max(worst_joint, oracle::max_abs_diff(bn_joint(bn).values(), expected));
    for (const auto& k : bn.kernels) worst_column = std::max(worst_column, k.max_column_deviation());
  }
  return {worst_joint <= kJointTol && worst_column <= kColumnTol,
          std::to_string(c.cns.size()) + " networks, joint " + fmt("%.2e", worst_joint) + ", columns " +
              fmt("%.2e", worst_column)};
}

Outcome roundtrip_identity(const Corpus& c) {
  std::size_t exact = 0;
  for (const auto& cn : c.cns) {
    auto back = ctr_mn(cmoralise_cn(cn));
    exact += back.graph == cn.graph && back.kernels == cn.kernels;
  }
  return {exact == c.cns.size(), std::to_string(exact) + "/" + std::to_string(c.cns.size()) + " exact"};
}

Outcome idempotence(const Corpus& c) {
  double worst_trmor = 0.0, worst_tr = 0.0;
  bool graphs = true;
  std::size_t skipped = 0;
  for (const auto& bn : c.bns) {
    auto once = trmor_bn(bn);
    auto twice = trmor_bn(once);
    graphs = graphs && twice.graph == once.graph;
    for (Vertex v = 0; v < bn.graph.size(); ++v) {
      worst_trmor = std::max(worst_trmor, max_abs_difference(kernel_to_factor(twice.kernels[v]), kernel_to_factor(once.kernels[v])));
    }
  }
  for (const auto& mn : c.mns) {
    if (mn_is_degenerate(mn)) {
      ++skipped;
      continue;
    }
    auto once = tr_mn(mn);
    auto again = tr_mn(moralise_bn(once));
    graphs = graphs && again.graph == once.graph;
    for (Vertex v = 0; v < once.graph.size(); ++v) {
      worst_tr = std::max(worst_tr, max_abs_difference(kernel_to_factor(again.kernels[v]), kernel_to_factor(once.kernels[v])));
    }
  }
  std::string detail = "trmor " + fmt("%.2e", worst_trmor) + ", tr " + fmt("%.2e", worst_tr);
  if (skipped) detail += ", " + std::to_string(skipped) + " degenerate skipped";
  return {graphs && worst_trmor <= kIdempotentTol && worst_tr <= kRoundTripTol, detail};
}

Outcome vstructure() {
  auto r = vstructure_counterexample();
  // Scaled by Z^2 = 36: P(A=0,B=0) is 6 and P(A=0)P(B=0) is 9, both exact.
  bool proportional = r.joint_ab.values() == std::vector<double>{1, 2, 2, 1} && r.z == 6.0;
  double joint00 = r.joint_ab.values()[0];
  double a0 = r.joint_ab.values()[0] + r.joint_ab.values()[1];
  double b0 = r.joint_ab.values()[0] + r.joint_ab.values()[2];
  bool dependent = joint00 * r.z == 6.0 && a0 * b0 == 9.0 && joint00 * r.z != a0 * b0;
  bool chordal = is_ordered_chordal(r.graph);
  return {proportional && dependent && !chordal && !r.factorizes,
          "P(A=0,B=0) = 1/6, P(A=0)P(B=0) = 1/4, chordal = " + std::string(chordal ? "true" : "false")};
}

Outcome imap_exhaustive() {
  const std::size_t n = 4;
  std::vector<Edge> all;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) all.push_back({u, v});
  }
  const std::size_t masks = std::size_t{1} << all.size();
  auto pick = [&](std::size_t mask) {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (mask >> i & 1) out.push_back(all[i]);
    }
    return out;
  };
  std::vector<std::string> names = gen::names(n);
  std::vector<OrderedDag> dags;
  std::vector<OrderedUGraph> ugraphs;
  for (std::size_t m = 0; m < masks; ++m) {
    dags.emplace_back(names, pick(m));
    ugraphs.emplace_back(names, pick(m));
  }
  std::size_t pairs = 0, queries = 0, failures = 0;
  for (std::size_t big = 0; big < masks; ++big) {
    for (std::size_t small = big;; small = (small - 1) & big) {
      ++pairs;
      for (Vertex x = 0; x < n; ++x) {
        for (Vertex y = 0; y < n; ++y) {
          for (Vertex z = 0; z < n; ++z) {
            if (x == y || y == z || x == z) continue;
            ++queries;
            if (d_separated(dags[big], {x}, {y}, {z}) && !d_separated(dags[small], {x}, {y}, {z})) ++failures;
            if (u_separated(ugraphs[big], {x}, {y}, {z}) && !u_separated(ugraphs[small], {x}, {y}, {z})) ++failures;
          }
        }
      }
      if (small == 0) break;
    }
  }
  return {failures == 0, std::to_string(pairs) + " pairs per kind, " + std::to_string(queries) + " triples, " +
                             std::to_string(failures) + " failures"};
}

Outcome junction_trees(const Corpus& c) {
  auto bear = fixtures::bear();
  auto tree = junction_tree(triangulate_graph(moralise_graph(bear.graph)));
  bool figure = tree.clusters == std::vector<VertexSet>{{0, 1, 2}, {1, 3}} && tree.sepsets == std::vector<VertexSet>{{1}};
  std::size_t rip = 0;
  for (const auto& cn : c.cns) rip += oracle::is_junction_tree(junction_tree(cn.graph), cn.graph.size());
  return {figure && rip == c.cns.size(), std::string("BEAR ") + (figure ? "matches" : "differs") + ", RIP on " +
                                             std::to_string(rip) + "/" + std::to_string(c.cns.size())};
}

Outcome non_adjunction() {
  auto r = vstructure_counterexample();
  // Any stochastic kernels will do; only the graph matters here.
  BayesianNetwork v{r.graph, r.vt,
                    {Kernel(0, {}, 2, {}, {0.5, 0.5}, true), Kernel(1, {}, 2, {}, {0.5, 0.5}, true),
                     Kernel(2, {0, 1}, 2, {2, 2}, std::vector<double>(8, 0.5), true)}};
  auto tm = trmor_bn(v);
  bool extra = tm.graph.has_edge(0, 1) && !r.graph.has_edge(0, 1);
  bool hom = check_hom(DagHom{tm.graph, r.graph, {0, 1, 2}});
  return {extra && !hom, std::string("check_hom = ") + (hom ? "true" : "false")};
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  const Corpus corpus = make_corpus();
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "misconception VE regression", 1.0, misconception_ve},
      {2, "misconception triangulation graph", 0.0, misconception_triangulation},
      {3, "partition cross-check", 0.0, partition_cross_check},
      {4, "moralisation preservation", 10.0, [&] { return moralisation_preservation(corpus); }},
      {5, "triangulation preservation", 10.0, [&] { return triangulation_preservation(corpus); }},
      {6, "VE soundness", 0.0, [&] { return ve_soundness(corpus); }},
      {7, "roundtrip identity", 0.0, [&] { return roundtrip_identity(corpus); }},
      {8, "idempotence", 0.0, [&] { return idempotence(corpus); }},
      {9, "v-structure counterexample", 0.0, vstructure},
      {10, "I-map property", 30.0, imap_exhaustive},
      {11, "junction tree", 0.0, [&] { return junction_trees(corpus); }},
      {12, "non-adjunction witness", 0.0, non_adjunction},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds >= c.budget_seconds) {
      o.pass = false;
      o.detail += ", over the " + fmt("%.0f", c.budget_seconds) + " s budget";
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), seconds);
  }
  return failed;
}

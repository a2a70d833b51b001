#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "pgm/error.hpp"
#include "pgm/functors.hpp"
#include "pgm/morphisms.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

using namespace pgm;

namespace {

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.rule == rule; });
}

std::vector<PearlEvidence> random_evidence(gen::Rng& rng, const VariableTable& vt, bool permute) {
  std::vector<PearlEvidence> ev(vt.size());
  std::bernoulli_distribution coin(0.5);
  for (Var v = 0; v < vt.size(); ++v) {
    const std::size_t card = vt.cardinality(v);
    if (permute) {
      ev[v].permutation.resize(card);
      std::iota(ev[v].permutation.begin(), ev[v].permutation.end(), std::size_t{0});
      std::shuffle(ev[v].permutation.begin(), ev[v].permutation.end(), rng);
    }
    if (coin(rng)) {
      ev[v].weights = gen::weights(rng, card, 0.2);
      ev[v].weights[0] = std::max(ev[v].weights[0], 0.05);
    }
  }
  return ev;
}

// Joint times the evidence weights, relabeled by the permutations, normalized.
std::vector<double> brute_posterior(const Factor& joint, const VariableTable& vt, const std::vector<PearlEvidence>& ev) {
  const auto cards = oracle::all_cards(vt);
  std::vector<double> out(joint.size(), 0.0);
  for (const auto& a : oracle::assignments(cards)) {
    double w = joint.at(a);
    std::vector<std::size_t> image(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!ev[k].weights.empty()) w *= ev[k].weights[a[k]];
      image[k] = ev[k].permutation.empty() ? a[k] : ev[k].permutation[a[k]];
    }
    std::size_t flat = 0;
    for (std::size_t k = 0; k < image.size(); ++k) flat = flat * cards[k] + image[k];
    out[flat] += w;
  }
  return oracle::normalized(out);
}

}  // namespace

TEST_CASE("identity and marginalization morphisms") {
  auto view = view_of(fixtures::misconception());
  SUBCASE("identity validates and pushes forward exactly") {
    auto id = identity_morphism(view);
    CHECK(validate_morphism(id, view, view).empty());
    CHECK(push_forward(id, view.joint) == view.joint);
  }
  SUBCASE("marginal of A") {
    auto mm = marginalization_morphism(view, 0);
    CHECK(validate_morphism(mm.morphism, view, mm.target).empty());
    CHECK(std::abs(mm.target.joint.values()[0] - 0.1806) <= 1e-4);
    CHECK(mm.morphism.eta[1] == Channel::deletion(2));
    CHECK(mm.morphism.preimage(0) == VertexSet{0});
    CHECK(mm.morphism.preimage(2).empty());
  }
  SUBCASE("chain marginal of C") {
    auto bn = fixtures::chain3(0.4, 0.9, 0.2, 0.7, 0.1);
    auto v = view_of(bn);
    auto mm = marginalization_morphism(v, 2);
    CHECK(validate_morphism(mm.morphism, v, mm.target).empty());
    double pb0 = 0.4 * 0.9 + 0.6 * 0.2;
    CHECK(std::abs(mm.target.joint.values()[0] - (pb0 * 0.7 + (1 - pb0) * 0.1)) <= 1e-15);
  }
  SUBCASE("out of range") { CHECK_THROWS_AS(marginalization_morphism(view, 4), ValidationError); }
}

TEST_CASE("validate_morphism reports broken invariants") {
  auto view = view_of(fixtures::bear());
  SUBCASE("doubled channel") {
    auto m = identity_morphism(view);
    for (double& x : m.eta[2].values) x *= 2.0;
    auto v = validate_morphism(m, view, view);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "stochastic");
    CHECK(v[0].location == "eta A");
  }
  SUBCASE("stochastic channel that moves the joint") {
    auto m = identity_morphism(view);
    m.eta[0].values = {0.0, 1.0, 1.0, 0.0};
    auto v = validate_morphism(m, view, view);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "preservation");
    CHECK(v[0].detail.find("differs from the target joint by up to") != std::string::npos);
  }
  SUBCASE("alpha not a homomorphism") {
    // Target X -> Y sent onto R and B; R -> B is not an edge.
    NetworkView target;
    target.graph = OrderedDag({"X", "Y"}, std::vector<Edge>{{0, 1}});
    target.vt = VariableTable({fixtures::binary("X", "x"), fixtures::binary("Y", "y")});
    NetworkMorphism m;
    m.alpha = {3, 0};
    m.source_cards = {2, 2, 2, 2};
    m.target_cards = {2, 2};
    m.eta = {Channel::identity(2), Channel::deletion(2), Channel::deletion(2), Channel::identity(2)};
    target.joint = push_forward(m, view.joint);
    auto v = validate_morphism(m, view, target);
    CHECK(has_rule(v, "hom"));
    CHECK_FALSE(has_rule(v, "preservation"));
  }
  SUBCASE("wrong shape") {
    auto m = identity_morphism(view);
    m.eta.pop_back();
    CHECK(has_rule(validate_morphism(m, view, view), "shape"));
  }
  SUBCASE("mixed graph kinds") {
    auto mview = view_of(moralise_bn(fixtures::bear()));
    CHECK(has_rule(validate_morphism(identity_morphism(view), view, mview), "type"));
  }
}

TEST_CASE("compose_morphisms") {
  auto view = view_of(fixtures::misconception());
  SUBCASE("identities are units") {
    auto mm = marginalization_morphism(view, 3);
    CHECK(compose_morphisms(identity_morphism(view), mm.morphism) == mm.morphism);
    CHECK(compose_morphisms(mm.morphism, identity_morphism(mm.target)) == mm.morphism);
  }
  SUBCASE("marginalizing twice") {
    auto first = marginalization_morphism(view, 2);
    auto second = marginalization_morphism(first.target, 0);
    auto both = compose_morphisms(first.morphism, second.morphism);
    CHECK(both == first.morphism);
    CHECK(validate_morphism(both, view, second.target).empty());
  }
  SUBCASE("shape mismatch") {
    auto mm = marginalization_morphism(view, 0);
    CHECK_THROWS_AS(compose_morphisms(mm.morphism, mm.morphism), ValidationError);
  }
  SUBCASE("random update followed by a marginal") {
    gen::Rng rng(61);
    for (int i = 0; i < 20; ++i) {
      auto bn = gen::bn(rng, 2 + i % 5, 3);
      auto src = view_of(bn);
      auto up = pearl_update(bn, random_evidence(rng, bn.vt, true));
      auto mid = view_of(up.updated);
      auto mm = marginalization_morphism(mid, i % bn.vt.size());
      auto both = compose_morphisms(up.morphism, mm.morphism);
      CHECK(validate_morphism(both, src, mm.target).empty());
      CHECK(max_abs_difference(push_forward(both, src.joint), push_forward(mm.morphism, push_forward(up.morphism, src.joint))) <= 1e-12);
    }
  }
}

TEST_CASE("decompose_morphism") {
  SUBCASE("marginalization") {
    auto view = view_of(fixtures::misconception());
    auto mm = marginalization_morphism(view, 1);
    auto d = decompose_morphism(mm.morphism, view, mm.target);
    CHECK(compose_morphisms(d.semantic, d.syntactic) == mm.morphism);
    CHECK(validate_morphism(d.semantic, view, d.intermediate).empty());
    CHECK(validate_morphism(d.syntactic, d.intermediate, mm.target).empty());
    CHECK(d.intermediate.vt.states(0) == std::vector<std::string>{"*"});
    CHECK(d.intermediate.vt.states(1) == std::vector<std::string>{"b", "nb"});
  }
  SUBCASE("random composites") {
    gen::Rng rng(62);
    for (int i = 0; i < 20; ++i) {
      auto bn = gen::bn(rng, 2 + i % 5, 3);
      auto src = view_of(bn);
      auto up = pearl_update(bn, random_evidence(rng, bn.vt, true));
      auto mm = marginalization_morphism(view_of(up.updated), i % bn.vt.size());
      auto m = compose_morphisms(up.morphism, mm.morphism);
      auto d = decompose_morphism(m, src, mm.target);
      CHECK(compose_morphisms(d.semantic, d.syntactic) == m);
      CHECK(d.semantic.alpha.size() == src.size());
      CHECK(d.syntactic.alpha == m.alpha);
      CHECK(validate_morphism(d.semantic, src, d.intermediate).empty());
      CHECK(validate_morphism(d.syntactic, d.intermediate, mm.target).empty());
    }
  }
  SUBCASE("rejects an invalid morphism") {
    auto view = view_of(fixtures::bear());
    auto m = identity_morphism(view);
    m.eta[0].values = {0.0, 1.0, 1.0, 0.0};
    CHECK_THROWS_AS(decompose_morphism(m, view, view), ValidationError);
  }
}

TEST_CASE("pearl_update on Bayesian networks") {
  auto bn = fixtures::chain3(0.4, 0.9, 0.2, 0.7, 0.1);
  SUBCASE("no evidence is the identity") {
    auto r = pearl_update(bn, {});
    CHECK(r.updated.vt == bn.vt);
    CHECK(r.updated.kernels == bn.kernels);
    CHECK(r.morphism == identity_morphism(view_of(bn)));
    CHECK(r.posterior == bn_joint(bn));
  }
  SUBCASE("swapping the states of A") {
    std::vector<PearlEvidence> ev(3);
    ev[0].permutation = {1, 0};
    auto r = pearl_update(bn, ev);
    CHECK(r.updated.kernels[0].values() == std::vector<double>{0.6, 0.4});
    CHECK(r.updated.kernels[1] == Kernel(1, {0}, 2, {2}, {0.2, 0.8, 0.9, 1 - 0.9}, true));
    CHECK(r.updated.vt.states(0) == bn.vt.states(0));
    CHECK(oracle::max_abs_diff(r.posterior.values(), brute_posterior(bn_joint(bn), bn.vt, ev)) <= 1e-15);
  }
  SUBCASE("observing the leaf equals conditioning") {
    std::vector<PearlEvidence> ev(3);
    ev[2].weights = {1.0, 0.0};
    auto r = pearl_update(bn, ev);
    CHECK(r.updated.vt.states(2) == std::vector<std::string>{"0|yes", "0|no", "1|yes", "1|no"});
    CHECK(r.updated.graph == bn.graph);
    CHECK(validate(r.updated).empty());
    CHECK(validate_morphism(r.morphism, view_of(bn), view_of(r.updated)).empty());
    Factor joint = bn_joint(bn);
    double pc0 = joint.values()[0] + joint.values()[2] + joint.values()[4] + joint.values()[6];
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(r.posterior.values()[i] - (i % 2 == 0 ? joint.values()[i] / pc0 : 0.0)) <= 1e-15);
    }
  }
  SUBCASE("random soft evidence") {
    gen::Rng rng(63);
    for (int i = 0; i < 60; ++i) {
      auto net = gen::bn(rng, 1 + i % 6, 3);
      auto ev = random_evidence(rng, net.vt, i % 2 == 1);
      auto expected = brute_posterior(bn_joint(net), net.vt, ev);
      bool zero = std::all_of(expected.begin(), expected.end(), [](double x) { return !(x > 0.0); });
      if (zero) {
        CHECK_THROWS_AS(pearl_update(net, ev), DegenerateError);
        continue;
      }
      auto r = pearl_update(net, ev);
      CHECK(r.updated.graph == net.graph);
      CHECK(validate(r.updated).empty());
      CHECK(validate_morphism(r.morphism, view_of(net), view_of(r.updated)).empty());
      CHECK(oracle::max_abs_diff(r.posterior.values(), expected) <= 1e-9);
    }
  }
  SUBCASE("two updates against one combined update") {
    gen::Rng rng(64);
    for (int i = 0; i < 20; ++i) {
      auto net = gen::bn(rng, 2 + i % 4, 3);
      auto first = random_evidence(rng, net.vt, true);
      auto second = random_evidence(rng, net.vt, true);
      // Weights of the second update are indexed by the relabeled states.
      std::vector<PearlEvidence> combined(net.vt.size());
      for (Var v = 0; v < net.vt.size(); ++v) {
        const std::size_t card = net.vt.cardinality(v);
        auto p1 = first[v].permutation, p2 = second[v].permutation;
        combined[v].permutation.resize(card);
        combined[v].weights.assign(card, 1.0);
        for (std::size_t x = 0; x < card; ++x) {
          combined[v].permutation[x] = p2[p1[x]];
          if (!first[v].weights.empty()) combined[v].weights[x] *= first[v].weights[x];
          if (!second[v].weights.empty()) combined[v].weights[x] *= second[v].weights[p1[x]];
        }
      }
      auto expected = brute_posterior(bn_joint(net), net.vt, combined);
      if (std::all_of(expected.begin(), expected.end(), [](double x) { return !(x > 0.0); })) continue;
      auto r = pearl_update(net, combined);
      // Second update applied to the conditioned joint of the first.
      auto staged = brute_posterior(Factor(r.posterior.vars(), oracle::all_cards(net.vt),
                                           brute_posterior(bn_joint(net), net.vt, first)),
                                    net.vt, second);
      CHECK(oracle::max_abs_diff(r.posterior.values(), expected) <= 1e-9);
      CHECK(oracle::max_abs_diff(staged, expected) <= 1e-9);
    }
  }
  SUBCASE("bad evidence") {
    CHECK_THROWS_AS(pearl_update(bn, std::vector<PearlEvidence>(2)), ValidationError);
    std::vector<PearlEvidence> ev(3);
    ev[0].permutation = {0, 0};
    CHECK_THROWS_AS(pearl_update(bn, ev), ValidationError);
    ev[0].permutation = {};
    ev[1].weights = {1.0, -1.0};
    CHECK_THROWS_AS(pearl_update(bn, ev), ValidationError);
    ev[1].weights = {0.0, 0.0};
    CHECK_THROWS_AS(pearl_update(bn, ev), DegenerateError);
    auto det = fixtures::chain3(1.0, 1.0, 1.0, 0.5, 0.5);
    std::vector<PearlEvidence> impossible(3);
    impossible[1].weights = {0.0, 1.0};
    CHECK_THROWS_AS(pearl_update(det, impossible), DegenerateError);
  }
}

TEST_CASE("pearl_update on Markov networks") {
  auto mn = fixtures::misconception();
  SUBCASE("observing A") {
    std::vector<PearlEvidence> ev(4);
    ev[0].weights = {1.0, 0.0};
    auto r = pearl_update(mn, ev);
    CHECK(r.updated.graph == mn.graph);
    CHECK(validate(r.updated).empty());
    CHECK(r.updated.factors.count({0}) == 1);
    CHECK(validate_morphism(r.morphism, view_of(mn), view_of(r.updated)).empty());
    auto expected = brute_posterior(factor_normalize(mn_unnormalized(mn)), mn.vt, ev);
    CHECK(oracle::max_abs_diff(r.posterior.values(), expected) <= 1e-12);
  }
  SUBCASE("random networks") {
    gen::Rng rng(65);
    for (int i = 0; i < 40; ++i) {
      auto net = gen::mn(rng, 1 + i % 5, 3);
      if (mn_is_degenerate(net)) continue;
      auto ev = random_evidence(rng, net.vt, i % 2 == 0);
      auto expected = brute_posterior(factor_normalize(mn_unnormalized(net)), net.vt, ev);
      if (std::all_of(expected.begin(), expected.end(), [](double x) { return !(x > 0.0); })) {
        CHECK_THROWS_AS(pearl_update(net, ev), DegenerateError);
        continue;
      }
      auto r = pearl_update(net, ev);
      CHECK(validate_morphism(r.morphism, view_of(net), view_of(r.updated)).empty());
      CHECK(oracle::max_abs_diff(r.posterior.values(), expected) <= 1e-9);
    }
  }
}

TEST_CASE("morphisms carried through the functors") {
  SUBCASE("Bayesian update seen on the moralised networks") {
    gen::Rng rng(66);
    for (int i = 0; i < 20; ++i) {
      auto bn = gen::bn(rng, 2 + i % 5, 3);
      auto ev = random_evidence(rng, bn.vt, true);
      auto r = pearl_update(bn, ev);
      auto src = view_of(moralise_bn(bn));
      auto tgt = view_of(moralise_bn(r.updated));
      CHECK(validate_morphism(r.morphism, src, tgt).empty());
    }
  }
  SUBCASE("Markov update seen on the chordal networks") {
    gen::Rng rng(67);
    for (int i = 0; i < 20; ++i) {
      auto mn = gen::mn(rng, 2 + i % 4, 3);
      if (mn_is_degenerate(mn)) continue;
      auto ev = random_evidence(rng, mn.vt, true);
      PearlResult<MarkovNetwork> r;
      try {
        r = pearl_update(mn, ev);
      } catch (const DegenerateError&) {
        continue;
      }
      auto src = view_of(ctr_mn(mn));
      auto tgt = view_of(ctr_mn(r.updated));
      CHECK(validate_morphism(r.morphism, src, tgt).empty());
      CHECK(validate_morphism(r.morphism, view_of(tr_mn(mn)), view_of(tr_mn(r.updated))).empty());
    }
  }
}

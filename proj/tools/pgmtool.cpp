// Command-line front end over the pgm library.
//
// Exit codes: 0 success, 1 usage, 2 parse or validation failure, 3 degenerate
// network.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgm/document.hpp"
#include "pgm/error.hpp"
#include "pgm/functors.hpp"

namespace {

using namespace pgm;

constexpr int kUsage = 1;
constexpr int kInvalid = 2;
constexpr int kDegenerate = 3;

class WrongKind : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Network>
Network expect(const AnyNetwork& net, const char* wanted, const std::string& command) {
  if (const auto* n = std::get_if<Network>(&net)) return *n;
  throw WrongKind(command + ": expected a " + std::string(wanted) + " network, got " + kind_name(net));
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void print_table(const Factor& f, const VariableTable& vt) {
  for_each_assignment(f.cards(), [&](std::span<const std::size_t> states, std::size_t index) {
    std::cout << (f.vars().empty() ? std::string("()") : describe_assignment(vt, f.vars(), states)) << "\t"
              << fixed6(f[index]) << "\n";
  });
}

// Joint table of the network: probabilities for Bayesian networks, the
// unnormalized product otherwise.
Factor joint_of(const AnyNetwork& net) {
  if (const auto* bn = std::get_if<BayesianNetwork>(&net)) return bn_joint(*bn);
  if (const auto* mn = std::get_if<MarkovNetwork>(&net)) return mn_unnormalized(*mn);
  return cn_product(std::get<ChordalNetwork>(net));
}

const VariableTable& table_of(const AnyNetwork& net) {
  return std::visit([](const auto& n) -> const VariableTable& { return n.vt; }, net);
}

struct Options {
  std::string input;
  std::string output = "-";
  std::vector<std::string> vars;
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::vector<std::string> given;
};

int run(const std::string& command, const Options& opt) {
  const AnyNetwork net = load_document(opt.input);

  if (command == "moralise") {
    save_document(moralise_bn(expect<BayesianNetwork>(net, "bayesian", command)), opt.output);
  } else if (command == "triangulate") {
    save_document(ctr_mn(expect<MarkovNetwork>(net, "markov", command)), opt.output);
  } else if (command == "ve") {
    save_document(ve_cn(expect<ChordalNetwork>(net, "chordal", command)).bn, opt.output);
  } else if (command == "tr") {
    save_document(tr_mn(expect<MarkovNetwork>(net, "markov", command)), opt.output);
  } else if (command == "trmor") {
    save_document(trmor_bn(expect<BayesianNetwork>(net, "bayesian", command)), opt.output);
  } else if (command == "joint") {
    print_table(joint_of(net), table_of(net));
  } else if (command == "marginal") {
    const VariableTable& vt = table_of(net);
    VertexSet keep;
    for (const auto& name : opt.vars) {
      auto v = vt.find(name);
      if (!v) throw ValidationError("marginal: unknown variable '" + name + "'");
      keep.push_back(*v);
    }
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    Factor joint = joint_of(net);
    if (!std::holds_alternative<BayesianNetwork>(net)) {
      if (!(joint.sum() > 0.0)) throw DegenerateError("degenerate network: total mass is zero");
      joint = factor_normalize(joint);
    }
    print_table(factor_marginal_onto(joint, keep, vt), vt);
  } else if (command == "partition") {
    std::cout << fixed6(joint_of(net).sum()) << "\n";
  } else if (command == "jtree") {
    OrderedDag g;
    if (const auto* bn = std::get_if<BayesianNetwork>(&net)) {
      g = triangulate_graph(moralise_graph(bn->graph));
    } else if (const auto* mn = std::get_if<MarkovNetwork>(&net)) {
      g = triangulate_graph(mn->graph);
    } else {
      g = std::get<ChordalNetwork>(net).graph;
    }
    ClusterTree tree = junction_tree(g);
    std::cout << "clusters:\n";
    for (std::size_t i = 0; i < tree.clusters.size(); ++i) {
      std::cout << "  " << i << " " << describe_set(g.names(), tree.clusters[i]) << "\n";
    }
    std::cout << "edges:\n";
    for (std::size_t i = 0; i < tree.tree_edges.size(); ++i) {
      std::cout << "  " << tree.tree_edges[i].first << " -- " << tree.tree_edges[i].second << " sepset "
                << describe_set(g.names(), tree.sepsets[i]) << "\n";
    }
    std::cout << "running intersection: " << (has_running_intersection(tree, g.size()) ? "true" : "false") << "\n";
  } else if (command == "dsep") {
    OrderedDag g;
    if (const auto* bn = std::get_if<BayesianNetwork>(&net)) {
      g = bn->graph;
    } else if (const auto* cn = std::get_if<ChordalNetwork>(&net)) {
      g = cn->graph;
    } else {
      throw WrongKind("dsep: expected a bayesian or chordal network, got markov");
    }
    bool sep = d_separated(g, resolve_vertices(g, opt.x), resolve_vertices(g, opt.y), resolve_vertices(g, opt.given));
    std::cout << (sep ? "true" : "false") << "\n";
  } else if (command == "usep") {
    const auto mn = expect<MarkovNetwork>(net, "markov", command);
    const auto& g = mn.graph;
    bool sep = u_separated(g, resolve_vertices(g, opt.x), resolve_vertices(g, opt.y), resolve_vertices(g, opt.given));
    std::cout << (sep ? "true" : "false") << "\n";
  } else if (command == "check") {
    std::cout << "ok: " << kind_name(net) << " network with " << table_of(net).size() << " variables\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Bayesian, Markov and chordal networks: conversions, inference and graph queries"};
  app.require_subcommand(1, 1);
  Options opt;

  auto add = [&](const std::string& name, const std::string& description) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("input", opt.input, "Network document (- for stdin)")->required();
    return sub;
  };
  for (const auto& [name, description] : std::vector<std::pair<std::string, std::string>>{
           {"moralise", "Bayesian network to Markov network"},
           {"triangulate", "Markov network to chordal network"},
           {"ve", "Chordal network to Bayesian network by variable elimination"},
           {"tr", "Markov network to Bayesian network (triangulate, then ve)"},
           {"trmor", "Bayesian network onto its triangulated moral graph"}}) {
    add(name, description)->add_option("-o,--output", opt.output, "Output document (default stdout)");
  }
  add("joint", "Print the joint table (unnormalized for Markov and chordal networks)");
  add("marginal", "Print a normalized marginal")
      ->add_option("--vars", opt.vars, "Comma-separated variables")
      ->delimiter(',')
      ->required();
  add("partition", "Print the total mass of the joint table");
  add("jtree", "Print the junction tree of the triangulated graph");
  for (const auto& [name, description] : std::vector<std::pair<std::string, std::string>>{
           {"dsep", "Test d-separation in the network's DAG"},
           {"usep", "Test separation in the network's undirected graph"}}) {
    CLI::App* sub = add(name, description);
    sub->add_option("--x", opt.x, "Comma-separated variables")->delimiter(',')->required();
    sub->add_option("--y", opt.y, "Comma-separated variables")->delimiter(',')->required();
    sub->add_option("--given", opt.given, "Comma-separated conditioning variables")->delimiter(',');
  }
  add("check", "Validate a document; exit 0 iff it is valid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const ValidationError& e) {
    auto& out = command == "check" ? std::cout : std::cerr;
    for (const auto& v : e.violations()) out << "error: " << v << "\n";
    return kInvalid;
  } catch (const DegenerateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
}

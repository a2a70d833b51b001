#include "pgm/document.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pgm/error.hpp"

namespace pgm {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum class Kind { bayesian, markov, chordal };

class Issues {
 public:
  void add(const std::string& where, const std::string& what) { items_.push_back(where + ": " + what); }
  bool empty() const { return items_.empty(); }
  void throw_if_any() {
    if (!items_.empty()) throw ValidationError(std::move(items_));
  }

 private:
  std::vector<std::string> items_;
};

std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed,
                         Issues& issues) {
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      issues.add(path, "unknown key '" + key + "'");
    }
  }
}

// Member `key` of `obj` if it exists and has the expected type.
const json* member(const json& obj, const std::string& path, const char* key, json::value_t type, Issues& issues) {
  auto it = obj.find(key);
  const std::string where = path.empty() ? std::string(key) : path + "." + key;
  if (it == obj.end()) {
    issues.add(where, "missing");
    return nullptr;
  }
  if (it->type() != type) {
    issues.add(where, std::string("expected ") + (type == json::value_t::array ? "an array" : "a string"));
    return nullptr;
  }
  return &*it;
}

std::vector<Variable> parse_variables(const json& doc, Issues& issues) {
  std::vector<Variable> out;
  const json* vars = member(doc, "", "variables", json::value_t::array, issues);
  if (!vars) return out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < vars->size(); ++i) {
    const json& entry = (*vars)[i];
    const std::string path = at_index("variables", i);
    if (!entry.is_object()) {
      issues.add(path, "expected an object");
      continue;
    }
    reject_unknown_keys(entry, path, {"name", "states"}, issues);
    const json* name = member(entry, path, "name", json::value_t::string, issues);
    const json* states = member(entry, path, "states", json::value_t::array, issues);
    if (!name || !states) continue;
    Variable var{name->get<std::string>(), {}};
    if (var.name.empty()) issues.add(path + ".name", "must be nonempty");
    if (!seen.insert(var.name).second) issues.add(path + ".name", "duplicate variable '" + var.name + "'");
    if (states->empty()) issues.add(path + ".states", "must list at least one state");
    std::set<std::string> labels;
    for (std::size_t k = 0; k < states->size(); ++k) {
      const json& label = (*states)[k];
      if (!label.is_string()) {
        issues.add(at_index(path + ".states", k), "expected a string");
        continue;
      }
      if (!labels.insert(label.get<std::string>()).second) {
        issues.add(at_index(path + ".states", k), "duplicate state '" + label.get<std::string>() + "'");
      }
      var.states.push_back(label.get<std::string>());
    }
    out.push_back(std::move(var));
  }
  return out;
}

std::optional<Var> resolve_name(const json& value, const std::string& path, const VariableTable& vt, Issues& issues) {
  if (!value.is_string()) {
    issues.add(path, "expected a variable name");
    return std::nullopt;
  }
  auto v = vt.find(value.get<std::string>());
  if (!v) issues.add(path, "unknown variable '" + value.get<std::string>() + "'");
  return v;
}

std::vector<Edge> parse_edges(const json& doc, const VariableTable& vt, Kind kind, Issues& issues) {
  std::vector<Edge> out;
  const json* edges = member(doc, "", "edges", json::value_t::array, issues);
  if (!edges) return out;
  std::set<Edge> seen;
  for (std::size_t i = 0; i < edges->size(); ++i) {
    const json& entry = (*edges)[i];
    const std::string path = at_index("edges", i);
    if (!entry.is_array() || entry.size() != 2) {
      issues.add(path, "expected a pair of variable names");
      continue;
    }
    auto u = resolve_name(entry[0], path + "[0]", vt, issues);
    auto v = resolve_name(entry[1], path + "[1]", vt, issues);
    if (!u || !v) continue;
    if (*u == *v) {
      issues.add(path, "self-loop on '" + vt.name(*u) + "'");
      continue;
    }
    if (kind != Kind::markov && *u > *v) {
      issues.add(path, "edge " + vt.name(*u) + "->" + vt.name(*v) + " goes against the variable order");
      continue;
    }
    Edge key = kind == Kind::markov ? Edge{std::min(*u, *v), std::max(*u, *v)} : Edge{*u, *v};
    if (!seen.insert(key).second) {
      issues.add(path, "duplicate edge " + vt.name(*u) + "-" + vt.name(*v));
      continue;
    }
    out.push_back(key);
  }
  return out;
}

// Reads the rows of a table whose `given` labels follow `listed`, checking
// total coverage. Entry i of the result holds the values for assignment i of
// the sorted variables.
std::vector<std::vector<double>> parse_rows(const json& table, const std::string& path, const VariableTable& vt,
                                            const std::vector<Var>& listed, std::size_t width, Issues& issues) {
  VarSet sorted = listed;
  std::sort(sorted.begin(), sorted.end());
  const std::vector<std::size_t> cards = vt.cardinalities(sorted);
  std::size_t total = 1;
  for (std::size_t c : cards) total *= c;
  std::vector<std::vector<double>> out(total);
  std::vector<bool> present(total, false);

  const json* rows = member(table, path, "rows", json::value_t::array, issues);
  if (!rows) return {};
  bool complete = true;
  for (std::size_t r = 0; r < rows->size(); ++r) {
    const json& row = (*rows)[r];
    const std::string row_path = at_index(path + ".rows", r);
    if (!row.is_object()) {
      issues.add(row_path, "expected an object");
      complete = false;
      continue;
    }
    reject_unknown_keys(row, row_path, {"given", "values"}, issues);
    const json* given = member(row, row_path, "given", json::value_t::array, issues);
    const json* values = member(row, row_path, "values", json::value_t::array, issues);
    if (!given || !values) {
      complete = false;
      continue;
    }
    bool ok = true;
    std::vector<std::size_t> states(sorted.size());
    if (given->size() != listed.size()) {
      issues.add(row_path + ".given", "expected " + std::to_string(listed.size()) + " labels, got " +
                                          std::to_string(given->size()));
      ok = false;
    } else {
      for (std::size_t k = 0; k < listed.size(); ++k) {
        const json& label = (*given)[k];
        std::optional<std::size_t> state;
        if (label.is_string()) state = vt.find_state(listed[k], label.get<std::string>());
        if (!state) {
          issues.add(at_index(row_path + ".given", k),
                     "'" + (label.is_string() ? label.get<std::string>() : label.dump()) + "' is not a state of '" +
                         vt.name(listed[k]) + "'");
          ok = false;
          continue;
        }
        auto pos = std::lower_bound(sorted.begin(), sorted.end(), listed[k]) - sorted.begin();
        states[static_cast<std::size_t>(pos)] = *state;
      }
    }
    std::vector<double> numbers;
    if (values->size() != width) {
      issues.add(row_path + ".values", "expected " + std::to_string(width) + " numbers, got " +
                                           std::to_string(values->size()));
      ok = false;
    } else {
      for (std::size_t k = 0; k < width; ++k) {
        const json& x = (*values)[k];
        if (!x.is_number() || !std::isfinite(x.get<double>()) || x.get<double>() < 0.0) {
          issues.add(at_index(row_path + ".values", k), "expected a finite nonnegative number");
          ok = false;
          continue;
        }
        numbers.push_back(x.get<double>());
      }
    }
    if (!ok) {
      complete = false;
      continue;
    }
    std::size_t index = 0;
    for (std::size_t k = 0; k < sorted.size(); ++k) index = index * cards[k] + states[k];
    if (present[index]) {
      issues.add(row_path, "duplicate row for (" + describe_assignment(vt, sorted, states) + ")");
      continue;
    }
    present[index] = true;
    out[index] = std::move(numbers);
  }
  if (!complete) return {};
  bool covered = true;
  for_each_assignment(cards, [&](std::span<const std::size_t> states, std::size_t index) {
    if (present[index]) return;
    covered = false;
    issues.add(path + ".rows", "no row for (" + (sorted.empty() ? std::string("no parents") : describe_assignment(vt, sorted, states)) + ")");
  });
  if (!covered) return {};
  return out;
}

std::vector<Var> parse_name_list(const json* list, const std::string& path, const VariableTable& vt, Issues& issues,
                                 bool& ok) {
  std::vector<Var> out;
  if (!list) {
    ok = false;
    return out;
  }
  for (std::size_t k = 0; k < list->size(); ++k) {
    auto v = resolve_name((*list)[k], at_index(path, k), vt, issues);
    if (!v) {
      ok = false;
      continue;
    }
    if (std::find(out.begin(), out.end(), *v) != out.end()) {
      issues.add(at_index(path, k), "'" + vt.name(*v) + "' listed twice");
      ok = false;
      continue;
    }
    out.push_back(*v);
  }
  return out;
}

std::vector<Kernel> parse_kernels(const json& doc, const OrderedDag& g, const VariableTable& vt, Issues& issues) {
  const json* tables = member(doc, "", "tables", json::value_t::array, issues);
  if (!tables) return {};
  std::vector<std::optional<Kernel>> kernels(g.size());
  std::vector<bool> mentioned(g.size(), false);
  for (std::size_t i = 0; i < tables->size(); ++i) {
    const json& table = (*tables)[i];
    const std::string path = at_index("tables", i);
    if (!table.is_object()) {
      issues.add(path, "expected an object");
      continue;
    }
    reject_unknown_keys(table, path, {"child", "parents", "rows"}, issues);
    auto child_field = table.find("child");
    if (child_field == table.end()) {
      issues.add(path + ".child", "missing");
      continue;
    }
    auto child = resolve_name(*child_field, path + ".child", vt, issues);
    bool ok = child.has_value();
    if (ok && mentioned[*child] && !kernels[*child]) continue;
    if (ok) mentioned[*child] = true;
    auto parents = parse_name_list(member(table, path, "parents", json::value_t::array, issues), path + ".parents",
                                   vt, issues, ok);
    if (!ok) continue;
    if (kernels[*child]) {
      issues.add(path + ".child", "second table for '" + vt.name(*child) + "'");
      continue;
    }
    VarSet sorted = parents;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != g.parents(*child)) {
      issues.add(path + ".parents", "parents " + describe_set(vt.names(), sorted) + " of '" + vt.name(*child) +
                                        "' differ from the graph's parents " +
                                        describe_set(vt.names(), g.parents(*child)));
      continue;
    }
    auto columns = parse_rows(table, path, vt, parents, vt.cardinality(*child), issues);
    if (columns.empty()) continue;
    std::vector<double> values;
    for (const auto& column : columns) values.insert(values.end(), column.begin(), column.end());
    kernels[*child] = Kernel(*child, sorted, vt.cardinality(*child), vt.cardinalities(sorted), std::move(values));
  }
  std::vector<Kernel> out;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!kernels[v]) {
      if (!mentioned[v]) issues.add("tables", "no table for '" + vt.name(v) + "'");
      continue;
    }
    out.push_back(*kernels[v]);
  }
  return out;
}

std::map<VertexSet, Factor> parse_factors(const json& doc, const OrderedUGraph& g, const VariableTable& vt,
                                          Issues& issues) {
  std::map<VertexSet, Factor> out;
  const json* tables = member(doc, "", "tables", json::value_t::array, issues);
  if (!tables) return out;
  for (std::size_t i = 0; i < tables->size(); ++i) {
    const json& table = (*tables)[i];
    const std::string path = at_index("tables", i);
    if (!table.is_object()) {
      issues.add(path, "expected an object");
      continue;
    }
    reject_unknown_keys(table, path, {"clique", "rows"}, issues);
    bool ok = true;
    auto clique = parse_name_list(member(table, path, "clique", json::value_t::array, issues), path + ".clique", vt,
                                  issues, ok);
    if (!ok) continue;
    if (clique.empty()) {
      issues.add(path + ".clique", "must name at least one variable");
      continue;
    }
    VarSet sorted = clique;
    std::sort(sorted.begin(), sorted.end());
    bool complete = true;
    for (std::size_t a = 0; a < sorted.size(); ++a) {
      for (std::size_t b = a + 1; b < sorted.size(); ++b) complete = complete && g.has_edge(sorted[a], sorted[b]);
    }
    if (!complete) {
      issues.add(path + ".clique", describe_set(vt.names(), sorted) + " is not a clique of the graph");
      continue;
    }
    if (out.count(sorted)) {
      issues.add(path + ".clique", "second table for " + describe_set(vt.names(), sorted));
      continue;
    }
    auto rows = parse_rows(table, path, vt, clique, 1, issues);
    if (rows.empty()) continue;
    std::vector<double> values;
    for (const auto& row : rows) values.push_back(row[0]);
    out.emplace(sorted, Factor(sorted, vt.cardinalities(sorted), std::move(values)));
  }
  return out;
}

template <class Network>
void collect_violations(const Network& net, Issues& issues) {
  for (const auto& v : validate(net)) issues.add(v.location, v.rule + ": " + v.detail);
}

ordered_json variables_json(const VariableTable& vt) {
  ordered_json out = ordered_json::array();
  for (const auto& var : vt.entries()) {
    ordered_json entry;
    entry["name"] = var.name;
    entry["states"] = var.states;
    out.push_back(std::move(entry));
  }
  return out;
}

ordered_json labels_json(const VariableTable& vt, const VarSet& vars, std::span<const std::size_t> states) {
  ordered_json out = ordered_json::array();
  for (std::size_t k = 0; k < vars.size(); ++k) out.push_back(vt.states(vars[k])[states[k]]);
  return out;
}

ordered_json names_json(const VariableTable& vt, const VarSet& vars) {
  ordered_json out = ordered_json::array();
  for (Var v : vars) out.push_back(vt.name(v));
  return out;
}

template <class Graph>
ordered_json edges_json(const Graph& g) {
  ordered_json out = ordered_json::array();
  for (const auto& [u, v] : g.edges()) out.push_back(ordered_json::array({g.name(u), g.name(v)}));
  return out;
}

ordered_json kernels_json(const VariableTable& vt, const std::vector<Kernel>& kernels) {
  ordered_json out = ordered_json::array();
  for (const auto& k : kernels) {
    ordered_json table;
    table["child"] = vt.name(k.child());
    table["parents"] = names_json(vt, k.parents());
    ordered_json rows = ordered_json::array();
    for_each_assignment(k.parent_cards(), [&](std::span<const std::size_t> states, std::size_t column) {
      ordered_json row;
      row["given"] = labels_json(vt, k.parents(), states);
      auto values = k.column(column);
      row["values"] = std::vector<double>(values.begin(), values.end());
      rows.push_back(std::move(row));
    });
    table["rows"] = std::move(rows);
    out.push_back(std::move(table));
  }
  return out;
}

ordered_json factors_json(const VariableTable& vt, const std::map<VertexSet, Factor>& factors) {
  ordered_json out = ordered_json::array();
  for (const auto& [clique, factor] : factors) {
    ordered_json table;
    table["clique"] = names_json(vt, clique);
    ordered_json rows = ordered_json::array();
    for_each_assignment(factor.cards(), [&](std::span<const std::size_t> states, std::size_t index) {
      ordered_json row;
      row["given"] = labels_json(vt, clique, states);
      row["values"] = ordered_json::array({factor[index]});
      rows.push_back(std::move(row));
    });
    table["rows"] = std::move(rows);
    out.push_back(std::move(table));
  }
  return out;
}

}  // namespace

std::string kind_name(const AnyNetwork& net) {
  static const char* names[] = {"bayesian", "markov", "chordal"};
  return names[net.index()];
}

AnyNetwork parse_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed document: ") + e.what());
  }
  Issues issues;
  if (!doc.is_object()) {
    issues.add("document", "expected a JSON object");
    issues.throw_if_any();
  }
  reject_unknown_keys(doc, "document", {"kind", "variables", "edges", "tables"}, issues);
  const json* kind_field = member(doc, "", "kind", json::value_t::string, issues);
  Kind kind = Kind::bayesian;
  if (kind_field) {
    const std::string k = kind_field->get<std::string>();
    if (k == "bayesian") {
      kind = Kind::bayesian;
    } else if (k == "markov") {
      kind = Kind::markov;
    } else if (k == "chordal") {
      kind = Kind::chordal;
    } else {
      issues.add("kind", "unknown kind '" + k + "' (expected bayesian, markov or chordal)");
    }
  }
  auto variables = parse_variables(doc, issues);
  issues.throw_if_any();

  VariableTable vt(std::move(variables));
  auto edges = parse_edges(doc, vt, kind, issues);
  issues.throw_if_any();

  if (kind == Kind::markov) {
    MarkovNetwork mn{OrderedUGraph(vt.names(), edges), vt, {}};
    mn.factors = parse_factors(doc, mn.graph, vt, issues);
    issues.throw_if_any();
    collect_violations(mn, issues);
    issues.throw_if_any();
    return mn;
  }

  OrderedDag g(vt.names(), edges);
  auto kernels = parse_kernels(doc, g, vt, issues);
  issues.throw_if_any();
  if (kind == Kind::chordal) {
    ChordalNetwork cn{g, vt, std::move(kernels)};
    collect_violations(cn, issues);
    issues.throw_if_any();
    return cn;
  }
  BayesianNetwork bn{g, vt, std::move(kernels)};
  collect_violations(bn, issues);
  issues.throw_if_any();
  for (auto& k : bn.kernels) {
    k = Kernel(k.child(), k.parents(), k.child_card(), k.parent_cards(), k.values(), true);
  }
  return bn;
}

std::string serialize_document(const AnyNetwork& net) {
  ordered_json doc;
  doc["kind"] = kind_name(net);
  std::visit(
      [&](const auto& n) {
        doc["variables"] = variables_json(n.vt);
        doc["edges"] = edges_json(n.graph);
        if constexpr (std::is_same_v<std::decay_t<decltype(n)>, MarkovNetwork>) {
          doc["tables"] = factors_json(n.vt, n.factors);
        } else {
          doc["tables"] = kernels_json(n.vt, n.kernels);
        }
      },
      net);
  return doc.dump(2) + "\n";
}

AnyNetwork load_document(const std::string& path) {
  if (path == "-") {
    std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    return parse_document(text);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_document(text.str());
}

void save_document(const AnyNetwork& net, const std::string& path) {
  const std::string text = serialize_document(net);
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace pgm

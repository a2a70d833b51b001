#ifndef PGM_DOCUMENT_HPP
#define PGM_DOCUMENT_HPP

#include <string>
#include <variant>

#include "pgm/networks.hpp"

namespace pgm {

using AnyNetwork = std::variant<BayesianNetwork, MarkovNetwork, ChordalNetwork>;

/// "bayesian", "markov" or "chordal".
std::string kind_name(const AnyNetwork& net);

/// Parses and fully validates a JSON network document. Throws
/// ValidationError listing every problem found, each prefixed with the field
/// it concerns (e.g. `tables[1].rows[0].given`).
AnyNetwork parse_document(const std::string& text);

/// Canonical serialization: fixed key order, variables and edges in vertex
/// order, parents and cliques sorted, rows in canonical assignment order.
std::string serialize_document(const AnyNetwork& net);

/// File variants; the path "-" means stdin / stdout.
AnyNetwork load_document(const std::string& path);
void save_document(const AnyNetwork& net, const std::string& path);

}  // namespace pgm

#endif  // PGM_DOCUMENT_HPP

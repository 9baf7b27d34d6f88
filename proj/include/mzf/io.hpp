#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mzf/poset.hpp"
#include "mzf/relations.hpp"
#include "mzf/series.hpp"

namespace mzf {

nlohmann::json to_json(const EvalReport& r);
nlohmann::json to_json(const TheoremReport& r);

// {"1,2": "1", "3": "-1"}; coefficients as decimal strings.
nlohmann::json to_json(const SymbolCombination& c);
SymbolCombination combination_from_json(const nlohmann::json& j);

// Relation-set file:
// {weight, family, settings, symbols: [...], rows: [{provenance, entries: [[col, "coeff"], ...]}]}
struct RelationSet {
  int weight = 0;
  std::string family;
  nlohmann::json settings = nlohmann::json::object();
  RelationMatrix matrix;
  std::vector<nlohmann::json> provenance;
};

RelationSet make_relation_set(int weight, Family family, const FamilyOptions& opts, const std::vector<Relation>& rels);
nlohmann::json to_json(const RelationSet& set);
RelationSet relation_set_from_json(const nlohmann::json& j);

nlohmann::json to_json(const std::vector<Table1Row>& rows, const std::vector<Family>& families);

}  // namespace mzf

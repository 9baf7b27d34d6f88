#include "mzf/io.hpp"

#include "mzf/errors.hpp"

namespace mzf {

using nlohmann::json;

json to_json(const EvalReport& r) {
  json refinements = json::array();
  for (const auto& [n, v] : r.refinements) refinements.push_back({n, v.real(), v.imag()});
  return {{"value", {r.value.real(), r.value.imag()}},
          {"cutoff", r.cutoff},
          {"refinements", refinements},
          {"residual", r.residual}};
}

json to_json(const TheoremReport& r) {
  json refinements = json::array();
  for (const auto& s : r.refinements) {
    refinements.push_back({{"cutoff", s.cutoff},
                           {"lhs", {s.lhs.real(), s.lhs.imag()}},
                           {"rhs", {s.rhs.real(), s.rhs.imag()}},
                           {"residual", s.residual}});
  }
  return {{"lhs", {r.lhs.real(), r.lhs.imag()}},
          {"rhs", {r.rhs.real(), r.rhs.imag()}},
          {"residual", r.residual},
          {"cutoff", r.cutoff},
          {"refinements", refinements}};
}

json to_json(const SymbolCombination& c) {
  json out = json::object();
  for (const auto& [comp, v] : c.terms()) out[comp.to_string()] = v.get_str();
  return out;
}

SymbolCombination combination_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("symbol combination must be a JSON object");
  SymbolCombination out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string()) throw ParseError("coefficients must be decimal strings");
    out.add(Composition::parse(key), mpz_class(value.get<std::string>()));
  }
  return out;
}

RelationSet make_relation_set(int weight, Family family, const FamilyOptions& opts, const std::vector<Relation>& rels) {
  RelationSet set;
  set.weight = weight;
  set.family = to_string(family);
  set.settings = {{"include_d1_derivation", opts.include_d1_derivation}};
  set.matrix = relation_matrix(rels);
  for (const auto& r : rels) {
    set.provenance.push_back({{"family", to_string(r.provenance.family)},
                              {"shape", r.provenance.args.shape().to_string()},
                              {"args", r.provenance.args.to_string()}});
  }
  return set;
}

json to_json(const RelationSet& set) {
  json symbols = json::array();
  for (const auto& c : set.matrix.symbols) symbols.push_back(c.to_string());
  json rows = json::array();
  for (std::size_t r = 0; r < set.matrix.rows.size(); ++r) {
    json entries = json::array();
    for (const auto& [col, v] : set.matrix.rows[r]) entries.push_back({col, v.get_str()});
    json row = {{"entries", entries}};
    row["provenance"] = r < set.provenance.size() ? set.provenance[r] : json::object();
    rows.push_back(row);
  }
  return {{"weight", set.weight},
          {"family", set.family},
          {"settings", set.settings},
          {"symbols", symbols},
          {"rows", rows}};
}

RelationSet relation_set_from_json(const json& j) {
  try {
    RelationSet set;
    set.weight = j.value("weight", 0);
    set.family = j.value("family", std::string());
    set.settings = j.value("settings", json::object());
    for (const auto& s : j.value("symbols", json::array())) {
      set.matrix.symbols.push_back(Composition::parse(s.get<std::string>()));
    }
    for (std::size_t k = 0; k < set.matrix.symbols.size(); ++k) {
      const auto& c = set.matrix.symbols[k];
      if (k && !(set.matrix.symbols[k - 1] < c)) throw ParseError("symbols must be sorted and distinct");
      if (set.matrix.weight == 0) set.matrix.weight = c.weight();
      if (c.weight() != set.matrix.weight) throw ParseError("symbols of mixed weight");
    }
    const int ncols = static_cast<int>(set.matrix.symbols.size());
    for (const auto& row : j.value("rows", json::array())) {
      std::vector<std::pair<int, mpz_class>> entries;
      for (const auto& e : row.at("entries")) {
        const int col = e.at(0).get<int>();
        if (col < 0 || col >= ncols) throw ParseError("entry column out of range");
        entries.push_back({col, mpz_class(e.at(1).get<std::string>())});
      }
      set.matrix.rows.push_back(std::move(entries));
      set.provenance.push_back(row.value("provenance", json::object()));
    }
    return set;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed relation set: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("malformed relation set: ") + e.what());
  }
}

json to_json(const std::vector<Table1Row>& rows, const std::vector<Family>& families) {
  json out = json::array();
  for (const auto& row : rows) {
    json r = {{"weight", row.weight}};
    for (Family f : families) r[to_string(f)] = row.ranks.at(f);
    if (row.all_relations_ref) {
      r["all_relations_ref"] = *row.all_relations_ref;
    } else {
      r["all_relations_ref"] = nullptr;
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace mzf

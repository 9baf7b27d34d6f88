#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mzf/core_model.hpp"
#include "mzf/errors.hpp"
#include "mzf/io.hpp"
#include "mzf/poset.hpp"
#include "mzf/relations.hpp"
#include "mzf/series.hpp"

namespace mzf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

struct RunConfig {
  std::string format;
  std::string cache_dir;
  unsigned parallel = 1;
  long max_cutoff = 10'000'000;
  int max_weight = 9;
  long max_rows = 200'000;

  std::optional<fs::path> cache_path() const {
    if (const char* env = std::getenv("MZF_CACHE_DIR"); env && *env) return fs::path(env);
    if (!cache_dir.empty()) return fs::path(cache_dir);
    return std::nullopt;
  }
  EvalOptions eval_options() const {
    EvalOptions o;
    o.threads = parallel;
    o.max_cutoff = max_cutoff;
    return o;
  }
};

std::vector<std::string> split(std::string_view text, std::string_view seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (seps.find(c) != std::string_view::npos) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string format_of(const RunConfig& cfg, const std::string& fallback, bool csv_ok, const char* cmd) {
  const std::string f = cfg.format.empty() ? fallback : cfg.format;
  if (f == "csv" && !csv_ok) throw ParseError(std::string("csv output is not available for ") + cmd);
  return f;
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

std::string fmt(double x, int digits = 17) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

void check_cutoffs(const std::vector<long>& cutoffs, const RunConfig& cfg) {
  for (long n : cutoffs) {
    if (n > cfg.max_cutoff) {
      throw BudgetError("cutoff " + std::to_string(n) + " exceeds cap " + std::to_string(cfg.max_cutoff));
    }
  }
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string kind;
  std::string shape = "1";
  std::string s;
  long N = 1000;
  std::vector<long> N_list;
  int i = 0;
  int j = 0;
  std::string variant = "diff";
  bool harmonic = false;
};

std::vector<Complex> flat_complex(std::string_view text) {
  std::vector<Complex> out;
  for (const auto& piece : split(text, ",;")) out.push_back(parse_complex(piece));
  if (out.empty()) throw ParseError("empty argument list");
  return out;
}

TildeVariant parse_variant(const std::string& v) {
  if (v == "1" || v == "first") return TildeVariant::First;
  if (v == "2" || v == "second") return TildeVariant::Second;
  if (v == "diff") return TildeVariant::Diff;
  throw ParseError("unknown variant '" + v + "'");
}

void emit_report(std::ostream& out, const std::string& format, const std::string& kind, const EvalReport& rep) {
  if (format == "json") {
    json j = to_json(rep);
    j["kind"] = kind;
    print_json(out, j);
  } else if (format == "csv") {
    out << "N,re,im\n";
    if (rep.refinements.empty()) {
      out << rep.cutoff << ',' << fmt(rep.value.real()) << ',' << fmt(rep.value.imag()) << '\n';
    }
    for (const auto& [n, v] : rep.refinements) out << n << ',' << fmt(v.real()) << ',' << fmt(v.imag()) << '\n';
  } else {
    for (const auto& [n, v] : rep.refinements) out << "N=" << n << "  " << format_complex(v) << '\n';
    out << kind << " = " << format_complex(rep.value) << "  (N=" << rep.cutoff << ", residual " << fmt(rep.residual)
        << ")\n";
  }
}

// Single-cutoff evaluators reported over a list of cutoffs.
template <class Fn>
EvalReport over_cutoffs(const std::vector<long>& cutoffs, Fn&& eval) {
  if (cutoffs.size() == 1) return eval(cutoffs.front());
  EvalReport last;
  std::vector<std::pair<long, Complex>> refinements;
  for (long n : cutoffs) {
    last = eval(n);
    refinements.push_back({n, last.value});
  }
  last.refinements = std::move(refinements);
  return last;
}

int cmd_eval(const EvalArgs& a, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string format = format_of(cfg, "json", true, "eval");
  std::vector<long> cutoffs = a.N_list.empty() ? std::vector<long>{a.N} : a.N_list;
  const auto plan = a.N_list.empty() ? TruncationPlan(a.N) : TruncationPlan::with_refinements(a.N_list);
  plan.validate();
  check_cutoffs(cutoffs, cfg);
  const EvalOptions opts = cfg.eval_options();

  if (a.kind == "mzf") {
    const auto s = flat_complex(a.s);
    emit_report(out, format, a.kind, over_cutoffs(cutoffs, [&](long n) { return eval_mzf(s, n, opts); }));
    return kOk;
  }
  if (a.kind == "mt") {
    const auto s = flat_complex(a.s);
    if (s.size() != 3) throw ParseError("mt needs exactly three arguments s1,s2,s3");
    emit_report(out, format, a.kind,
                over_cutoffs(cutoffs, [&](long n) { return eval_mordell_tornheim(s[0], s[1], s[2], n, opts); }));
    return kOk;
  }

  const auto args = ComplexArgs::parse(Shape::parse(a.shape), a.s);
  if (a.kind == "zeta-tilde") {
    const auto variant = parse_variant(a.variant);
    const auto rep = a.harmonic ? eval_zeta_tilde_harmonic(args, a.i, a.j, variant, plan, opts)
                                : eval_zeta_tilde(args, a.i, a.j, variant, plan, opts);
    emit_report(out, format, a.kind, rep);
    return kOk;
  }
  if (a.kind == "zeta-c") {
    const auto rep = a.i == 0 ? eval_zeta_C(args, plan, opts) : eval_zeta_C_i(args, a.i, plan, opts);
    emit_report(out, format, a.kind, rep);
    return kOk;
  }
  if (a.kind == "theorem") {
    const auto rep = eval_theorem_residual(args, plan, opts);
    if (format == "json") {
      json j = to_json(rep);
      j["kind"] = a.kind;
      print_json(out, j);
    } else if (format == "csv") {
      out << "N,lhs_re,lhs_im,rhs_re,rhs_im,residual\n";
      for (const auto& r : rep.refinements) {
        out << r.cutoff << ',' << fmt(r.lhs.real()) << ',' << fmt(r.lhs.imag()) << ',' << fmt(r.rhs.real()) << ','
            << fmt(r.rhs.imag()) << ',' << fmt(r.residual) << '\n';
      }
      if (rep.refinements.empty()) {
        out << rep.cutoff << ',' << fmt(rep.lhs.real()) << ',' << fmt(rep.lhs.imag()) << ',' << fmt(rep.rhs.real())
            << ',' << fmt(rep.rhs.imag()) << ',' << fmt(rep.residual) << '\n';
      }
    } else {
      for (const auto& r : rep.refinements) out << "N=" << r.cutoff << "  residual " << fmt(r.residual) << '\n';
      out << "lhs = " << format_complex(rep.lhs) << "\nrhs = " << format_complex(rep.rhs) << "\nresidual "
          << fmt(rep.residual) << " at N=" << rep.cutoff << '\n';
    }
    return kOk;
  }
  err << "unknown kind '" << a.kind << "'\n";
  return kParse;
}

// ---------------------------------------------------------------- domain

int cmd_domain(const std::string& shape_text, const std::string& s_text, const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_of(cfg, "text", true, "domain");
  const auto s = ComplexArgs::parse(Shape::parse(shape_text), s_text);
  const auto conds = w_conditions(s);
  const DomainCondition* failed = nullptr;
  for (const auto& c : conds) {
    if (!c.satisfied) {
      failed = &c;
      break;
    }
  }
  if (format == "json") {
    json list = json::array();
    for (const auto& c : conds) {
      list.push_back({{"lhs", c.lhs_text},
                      {"value", c.lhs_value},
                      {"threshold", c.threshold},
                      {"strict", c.strict},
                      {"satisfied", c.satisfied},
                      {"margin", c.margin()}});
    }
    print_json(out, {{"inside", failed == nullptr}, {"conditions", list}});
  } else if (format == "csv") {
    out << "condition,value,threshold,strict,satisfied,margin\n";
    for (const auto& c : conds) {
      out << '"' << c.lhs_text << "\"," << fmt(c.lhs_value) << ',' << fmt(c.threshold) << ',' << c.strict << ','
          << c.satisfied << ',' << fmt(c.margin()) << '\n';
    }
  } else {
    out << (failed ? "outside W: " + failed->to_string() : std::string("inside W")) << '\n';
    for (const auto& c : conds) out << "  " << c.to_string() << "  (margin " << fmt(c.margin(), 12) << ")\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- relations / rank / table1

std::string cache_key(int weight, Family family, const FamilyOptions& opts) {
  return "relations|v1|weight=" + std::to_string(weight) + "|family=" + to_string(family) +
         "|include_d1_derivation=" + (opts.include_d1_derivation ? "1" : "0");
}

void write_atomic(const fs::path& path, const std::string& data) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(fnv1a(data) ^ reinterpret_cast<std::uintptr_t>(&data));
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << data;
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string relation_set_text(int weight, Family family, const FamilyOptions& fopts, const RunConfig& cfg,
                              std::ostream& err) {
  if (weight < 3) throw ParseError("weight must be at least 3");
  if (weight > cfg.max_weight) {
    throw BudgetError("weight " + std::to_string(weight) + " exceeds cap " + std::to_string(cfg.max_weight));
  }
  const auto dir = cfg.cache_path();
  const std::string key = cache_key(weight, family, fopts);
  std::ostringstream name;
  name << "relations-" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key) << ".json";
  const fs::path file = dir ? *dir / name.str() : fs::path();

  if (dir) {
    if (auto text = read_file(file)) {
      try {
        const json j = json::parse(*text);
        if (j.at("cache_key").get<std::string>() != key) throw ParseError("cache key mismatch");
        const json body = j.at("relation_set");
        relation_set_from_json(body);
        return body.dump(2) + "\n";
      } catch (const std::exception& e) {
        err << "warning: ignoring corrupt cache entry " << file.string() << " (" << e.what() << "), recomputing\n";
      }
    }
  }

  const auto configs = enumerate_family(weight, family, fopts);
  if (static_cast<long>(configs.size()) > cfg.max_rows) {
    throw BudgetError(std::to_string(configs.size()) + " relations exceed row cap " + std::to_string(cfg.max_rows));
  }
  const auto rels = generate_family(weight, family, fopts, cfg.parallel);
  const json body = to_json(make_relation_set(weight, family, fopts, rels));
  const std::string text = body.dump(2) + "\n";
  if (dir) {
    try {
      write_atomic(file, json{{"cache_key", key}, {"relation_set", body}}.dump());
    } catch (const std::exception& e) {
      err << "warning: cache disabled (" << e.what() << ")\n";
    }
  }
  return text;
}

int cmd_relations(int weight, const std::string& family_text, const std::string& out_path, bool include_d1,
                  const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  format_of(cfg, "json", false, "relations");
  const Family family = parse_family(family_text);
  FamilyOptions fopts;
  fopts.include_d1_derivation = include_d1;
  const std::string text = relation_set_text(weight, family, fopts, cfg, err);
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << text;
  }
  return kOk;
}

int cmd_rank(const std::string& in_path, const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_of(cfg, "text", false, "rank");
  auto text = read_file(in_path);
  if (!text) throw ParseError("cannot read " + in_path);
  RelationSet set;
  if (text->find_first_not_of(" \t\r\n") != std::string::npos) {
    json j;
    try {
      j = json::parse(*text);
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed relation set: ") + e.what());
    }
    set = relation_set_from_json(j);
  }
  if (static_cast<long>(set.matrix.rows.size()) > cfg.max_rows) {
    throw BudgetError(std::to_string(set.matrix.rows.size()) + " rows exceed cap " + std::to_string(cfg.max_rows));
  }
  const int rank = rank_exact(set.matrix);
  if (format == "json") {
    print_json(out, {{"rank", rank},
                     {"rows", set.matrix.rows.size()},
                     {"symbols", set.matrix.symbols.size()},
                     {"weight", set.weight}});
  } else {
    out << rank << '\n';
  }
  return kOk;
}

int cmd_table1(int min_weight, int max_weight, const std::string& families_text, bool include_d1,
               const RunConfig& cfg, std::ostream& out) {
  const std::string format = format_of(cfg, "text", true, "table1");
  if (max_weight > cfg.max_weight) {
    throw BudgetError("weight " + std::to_string(max_weight) + " exceeds cap " + std::to_string(cfg.max_weight));
  }
  std::vector<Family> families;
  for (const auto& f : split(families_text, ", ")) families.push_back(parse_family(f));
  if (families.empty()) throw ParseError("no families given");
  Table1Options opts;
  opts.family.include_d1_derivation = include_d1;
  opts.max_weight = cfg.max_weight;
  opts.threads = cfg.parallel;
  const auto rows = table1(min_weight, max_weight, families, opts);

  if (format == "json") {
    print_json(out, to_json(rows, families));
    return kOk;
  }
  auto ref = [](const Table1Row& r) { return r.all_relations_ref ? std::to_string(*r.all_relations_ref) : "-"; };
  if (format == "csv") {
    out << "weight";
    for (Family f : families) out << ',' << to_string(f);
    out << ",all_relations(ref)\n";
    for (const auto& r : rows) {
      out << r.weight;
      for (Family f : families) out << ',' << r.ranks.at(f);
      out << ',' << ref(r) << '\n';
    }
    return kOk;
  }
  std::vector<std::string> head{"weight"};
  for (Family f : families) head.push_back(to_string(f));
  head.push_back("all relations (ref)");
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> line{std::to_string(r.weight)};
    for (Family f : families) line.push_back(std::to_string(r.ranks.at(f)));
    line.push_back(ref(r));
    cells.push_back(line);
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& line : cells) width[c] = std::max(width[c], line[c].size());
  }
  auto put = [&](const std::vector<std::string>& line) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) out << "  ";
      out << std::setw(static_cast<int>(width[c])) << line[c];
    }
    out << '\n';
  };
  put(head);
  for (const auto& line : cells) put(line);
  return kOk;
}

// ---------------------------------------------------------------- decompose

struct DecomposeArgs {
  std::string shape = "1";
  std::string set = "S";
  int i = 1;
  int j = 1;
  std::string vars;
  std::string constraints;
  std::string exponents;
  bool count = false;
  long N = 0;
};

struct NamedSystem {
  ConstraintSystem cs;
  std::map<std::string, VarId> by_name;
  std::map<VarId, std::string> names;
};

NamedSystem build_named(const DecomposeArgs& a) {
  if (a.set == "custom") {
    const auto vars = split(a.vars, " ,");
    if (vars.empty()) throw ParseError("custom systems need --vars");
    std::vector<int> depths{static_cast<int>(vars.size())};
    NamedSystem ns{ConstraintSystem(Shape(depths), false), {}, {}};
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const VarId v = VarId::at(1, static_cast<int>(k) + 1);
      if (!ns.by_name.emplace(vars[k], v).second) throw ParseError("duplicate variable '" + vars[k] + "'");
      ns.names[v] = vars[k];
    }
    auto lookup = [&](const std::string& name) {
      auto it = ns.by_name.find(name);
      if (it == ns.by_name.end()) throw ParseError("unknown variable '" + name + "'");
      return it->second;
    };
    for (const auto& token : split(a.constraints, " ,")) {
      std::size_t at = std::string::npos, len = 0;
      Cmp rel = Cmp::Less;
      for (auto [op, r] : {std::pair<std::string, Cmp>{"<=", Cmp::LessEq}, {"≤", Cmp::LessEq}, {"<", Cmp::Less}}) {
        if (auto p = token.find(op); p != std::string::npos) {
          at = p;
          len = op.size();
          rel = r;
          break;
        }
      }
      if (at == std::string::npos) throw ParseError("bad constraint '" + token + "'");
      ns.cs.add(lookup(token.substr(0, at)), rel, lookup(token.substr(at + len)));
    }
    return ns;
  }
  const Shape shape = Shape::parse(a.shape);
  auto check_i = [&] {
    if (a.i < 1 || a.i > shape.blocks()) throw ParseError("block index out of range");
  };
  std::optional<ConstraintSystem> cs;
  if (a.set == "S") {
    cs = build_constraints_S(shape);
  } else if (a.set == "S_i") {
    check_i();
    cs = build_constraints_S_i(shape, a.i);
  } else if (a.set == "S_ij") {
    check_i();
    if (a.j < 1 || a.j > shape.depth(a.i)) throw ParseError("position index out of range");
    cs = build_constraints_S_ij(shape, a.i, a.j);
  } else if (a.set == "T_i") {
    check_i();
    cs = build_constraints_T_i(shape, a.i);
  } else {
    throw ParseError("unknown set '" + a.set + "'");
  }
  NamedSystem ns{*cs, {}, {}};
  for (const auto& v : ns.cs.variables()) {
    ns.by_name[v.to_string()] = v;
    ns.names[v] = v.to_string();
  }
  return ns;
}

std::string render(const OrderedSetPartition& wo, const std::map<VarId, std::string>& names) {
  std::string out;
  for (const auto& level : wo.levels) {
    out += "(";
    for (std::size_t k = 0; k < level.size(); ++k) {
      if (k) out += " ";
      out += names.at(level[k]);
    }
    out += ")";
  }
  return out;
}

int cmd_decompose(const DecomposeArgs& a, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string format = format_of(cfg, "text", false, "decompose");
  const NamedSystem ns = build_named(a);
  const auto orders = weak_orders(ns.cs);

  if (a.count) {
    if (a.N < 1) throw ParseError("--count needs --N");
    const mpz_class points = count_lattice_points(ns.cs, a.N);
    mpz_class chains = 0;
    for (const auto& wo : orders) chains += chain_count(static_cast<int>(wo.levels.size()), a.N);
    if (format == "json") {
      print_json(out, {{"N", a.N},
                       {"count", points.get_str()},
                       {"chain_sum", chains.get_str()},
                       {"weak_orders", orders.size()}});
    } else {
      out << points.get_str() << '\n'
          << "chain sum: " << chains.get_str() << "\nweak orders: " << orders.size() << '\n';
    }
    return kOk;
  }

  ExponentMap e;
  for (const auto& token : split(a.exponents, " ")) {
    const auto colon = token.rfind(':');
    if (colon == std::string::npos) throw ParseError("bad exponent '" + token + "', expected name:value");
    const std::string name = token.substr(0, colon);
    auto it = ns.by_name.find(name);
    if (it == ns.by_name.end()) throw ParseError("unknown variable '" + name + "'");
    int value = 0;
    try {
      std::size_t used = 0;
      value = std::stoi(token.substr(colon + 1), &used);
      if (used != token.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad exponent value in '" + token + "'");
    }
    if (value < 0) throw ParseError("exponents must be nonnegative");
    e[it->second] = value;
  }
  for (const auto& [v, name] : ns.names) {
    if (!e.count(v)) throw ParseError("no exponent for " + name);
  }

  SymbolCombination combo;
  for (const auto& wo : orders) {
    const Composition c = level_composition(wo, e);
    if (!c.admissible()) {
      err << "non-admissible symbol ζ(" << c.to_string() << ") from weak order " << render(wo, ns.names) << '\n';
      return kNonAdmissible;
    }
    combo.add(c, 1);
  }
  if (format == "json") {
    json list = json::array();
    for (const auto& wo : orders) list.push_back(render(wo, ns.names));
    print_json(out, {{"combination", to_json(combo)}, {"weak_orders", orders.size()}, {"orders", list}});
  } else {
    out << combo.to_string() << '\n' << "weak orders: " << orders.size() << '\n';
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cyclic relation toolkit for multiple zeta functions", "mzf"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--cache-dir", cfg.cache_dir, "Cache directory (MZF_CACHE_DIR overrides)");
  app.add_option("--parallel", cfg.parallel, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--max-cutoff", cfg.max_cutoff, "Largest truncation cutoff")->check(CLI::PositiveNumber);
  app.add_option("--max-weight", cfg.max_weight, "Largest relation weight")->check(CLI::PositiveNumber);
  app.add_option("--max-rows", cfg.max_rows, "Largest relation matrix")->check(CLI::PositiveNumber);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a truncated series");
  eval->add_option("--kind", ea.kind)->required()->check(CLI::IsMember({"mzf", "zeta-tilde", "zeta-c", "mt", "theorem"}));
  eval->add_option("--shape", ea.shape);
  eval->add_option("--s", ea.s)->required();
  auto* n_opt = eval->add_option("--N", ea.N)->check(CLI::PositiveNumber);
  eval->add_option("--N-list", ea.N_list)->delimiter(',')->excludes(n_opt);
  eval->add_option("--i", ea.i);
  eval->add_option("--j", ea.j);
  eval->add_option("--variant", ea.variant, "1, 2 or diff");
  eval->add_flag("--harmonic", ea.harmonic, "Use the harmonic-number closed form");

  std::string dom_shape = "1", dom_s;
  auto* domain = app.add_subcommand("domain", "Check membership in W");
  domain->add_option("--shape", dom_shape);
  domain->add_option("--s", dom_s)->required();

  int rel_weight = 0;
  std::string rel_family, rel_out;
  bool rel_d1 = true;
  auto* relations = app.add_subcommand("relations", "Generate a relation family");
  relations->add_option("--weight", rel_weight)->required();
  relations->add_option("--family", rel_family)->required();
  relations->add_option("--out", rel_out);
  relations->add_option("--include-d1-derivation", rel_d1);

  std::string rank_in;
  auto* rank = app.add_subcommand("rank", "Exact rank of a relation-set file");
  rank->add_option("--in", rank_in)->required();

  int t_min = 3, t_max = 8;
  std::string t_families = "csf,derivation,cyclic";
  bool t_d1 = true;
  auto* tab = app.add_subcommand("table1", "Ranks of the relation families by weight");
  tab->add_option("--min-weight", t_min)->check(CLI::Range(3, 1000));
  tab->add_option("--max-weight", t_max)->required();
  tab->add_option("--families", t_families);
  tab->add_option("--include-d1-derivation", t_d1);

  DecomposeArgs da;
  auto* dec = app.add_subcommand("decompose", "Decompose a constrained sum into MZVs");
  dec->add_option("--shape", da.shape);
  dec->add_option("--set", da.set)->check(CLI::IsMember({"S", "S_i", "S_ij", "T_i", "custom"}));
  dec->add_option("--i", da.i);
  dec->add_option("--j", da.j);
  dec->add_option("--vars", da.vars, "Custom variable names");
  dec->add_option("--constraints", da.constraints, "Custom constraints, e.g. \"a<=b b<c\"");
  dec->add_option("--exponents", da.exponents, "e.g. \"n_{1,1}:1 n:2\"");
  dec->add_flag("--count", da.count, "Count lattice points instead");
  dec->add_option("--N", da.N);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kParse;
  }

  try {
    if (*eval) return cmd_eval(ea, cfg, out, err);
    if (*domain) return cmd_domain(dom_shape, dom_s, cfg, out);
    if (*relations) return cmd_relations(rel_weight, rel_family, rel_out, rel_d1, cfg, out, err);
    if (*rank) return cmd_rank(rank_in, cfg, out);
    if (*tab) return cmd_table1(t_min, t_max, t_families, t_d1, cfg, out);
    if (*dec) return cmd_decompose(da, cfg, out, err);
  } catch (const DomainError& e) {
    err << e.what() << '\n';
    return kDomain;
  } catch (const ParseError& e) {
    err << e.what() << '\n';
    return kParse;
  } catch (const BudgetError& e) {
    err << e.what() << '\n';
    return kBudget;
  } catch (const NonAdmissibleError& e) {
    err << e.what() << '\n';
    return kNonAdmissible;
  } catch (const std::invalid_argument& e) {
    err << e.what() << '\n';
    return kParse;
  } catch (const std::out_of_range& e) {
    err << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace mzf::cli

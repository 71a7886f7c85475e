#include "alexrealize/io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alexrealize/errors.hpp"

namespace alexrealize {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InvalidInput(where + ": missing key '" + key + "'");
  return *it;
}

std::vector<std::string> string_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw InvalidInput(where + ": expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> pair_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array of pairs");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw InvalidInput(where + ": expected [\"a\", \"b\"] pairs");
    out.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return out;
}

std::size_t positive(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 1)
    throw InvalidInput(where + ": expected a positive integer");
  return j.get<std::size_t>();
}

Json mpz_json(const mpz_class& z) {
  if (z.fits_slong_p()) return Json(z.get_si());
  return Json(z.get_str());
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

// A permutation given either in cycle notation or as the list of image labels.
Permutation permutation_from_json(const Json& j, const std::vector<std::string>& labels,
                                  const std::string& where) {
  if (j.is_string()) return parse_cycles(j.get<std::string>(), labels);
  auto imgs = string_list(j, where);
  if (imgs.size() != labels.size())
    throw InvalidInput(where + ": image list has " + std::to_string(imgs.size()) + " entries, expected " +
                       std::to_string(labels.size()));
  std::unordered_map<std::string, Index> pos;
  for (Index i = 0; i < labels.size(); ++i) pos.emplace(labels[i], i);
  std::vector<Index> im;
  std::vector<char> hit(labels.size(), 0);
  for (const auto& l : imgs) {
    auto it = pos.find(l);
    if (it == pos.end()) throw UnknownElement(l);
    if (hit[it->second]++) throw InvalidInput(where + ": image list is not a bijection");
    im.push_back(it->second);
  }
  return Permutation(std::move(im));
}

}  // namespace

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw InvalidInput(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                       ": malformed JSON (" + msg + ")");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidInput("write to '" + path + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InvalidInput("cannot move output into place at '" + path + "'");
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json poset_to_json(const Poset& p) {
  Json j;
  j["elements"] = p.elements();
  Json covers = Json::array();
  for (const auto& [a, b] : p.cover_pairs()) covers.push_back({a, b});
  j["covers"] = std::move(covers);
  return j;
}

Poset poset_from_json(const Json& j) {
  auto elements = string_list(require(j, "elements", "poset"), "poset.elements");
  auto covers = pair_list(require(j, "covers", "poset"), "poset.covers");
  return Poset(std::move(elements), covers);
}

Json graph_to_json(const SimpleGraph& g) {
  Json j;
  j["vertices"] = g.vertices();
  Json edges = Json::array();
  for (auto [a, b] : g.edges()) edges.push_back({g.id(a), g.id(b)});
  j["edges"] = std::move(edges);
  return j;
}

SimpleGraph graph_from_json(const Json& j) {
  auto vertices = string_list(require(j, "vertices", "graph"), "graph.vertices");
  auto edges = pair_list(require(j, "edges", "graph"), "graph.edges");
  return SimpleGraph(std::move(vertices), edges);
}

std::string poset_to_dot(const Poset& p, std::string_view name) {
  std::ostringstream out;
  out << "digraph " << dot_quote(name) << " {\n  rankdir=BT;\n  node [shape=box];\n";
  const auto& below = p.depth_below();
  std::map<std::size_t, std::vector<Index>> ranks;
  for (Index i = 0; i < p.size(); ++i) ranks[below[i]].push_back(i);
  for (const auto& [r, els] : ranks) {
    out << "  { rank=same;";
    for (Index i : els) out << ' ' << dot_quote(p.id(i)) << ';';
    out << " }\n";
  }
  for (Index a = 0; a < p.size(); ++a)
    for (Index b : p.upper_covers(a)) out << "  " << dot_quote(p.id(a)) << " -> " << dot_quote(p.id(b)) << ";\n";
  out << "}\n";
  return out.str();
}

std::string graph_to_dot(const SimpleGraph& g, std::string_view name) {
  std::ostringstream out;
  out << "graph " << dot_quote(name) << " {\n";
  for (Index v = 0; v < g.order(); ++v) out << "  " << dot_quote(g.id(v)) << ";\n";
  for (auto [a, b] : g.edges()) out << "  " << dot_quote(g.id(a)) << " -- " << dot_quote(g.id(b)) << ";\n";
  out << "}\n";
  return out.str();
}

Json abelian_to_json(const AbelianGroup& g) {
  return Json{{"rank", g.rank()}, {"torsion", g.torsion()}};
}

AbelianGroup abelian_from_json(const Json& j) {
  const Json& r = require(j, "rank", "abelian group");
  if (!r.is_number_integer() || r.get<std::int64_t>() < 0)
    throw InvalidInput("abelian group: rank must be a non-negative integer");
  std::vector<std::int64_t> torsion;
  if (auto it = j.find("torsion"); it != j.end()) {
    if (!it->is_array()) throw InvalidInput("abelian group: torsion must be an array");
    for (const auto& t : *it) {
      if (!t.is_number_integer() || t.get<std::int64_t>() < 1)
        throw InvalidInput("abelian group: torsion coefficients must be positive integers");
      torsion.push_back(t.get<std::int64_t>());
    }
  }
  return AbelianGroup(r.get<std::size_t>(), torsion);
}

Json homology_to_json(const std::map<int, AbelianGroup>& h) {
  Json out = Json::array();
  for (const auto& [d, g] : h) {
    Json e{{"degree", d}};
    e.update(abelian_to_json(g));
    out.push_back(std::move(e));
  }
  return out;
}

Json induced_to_json(const InducedMatrix& m) {
  Json j{{"degree", m.degree}, {"source_orders", m.source_orders}, {"target_orders", m.target_orders}};
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.target_orders.size(); ++r) {
    Json row = Json::array();
    for (const auto& col : m.columns) row.push_back(mpz_json(col[r]));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  return j;
}

Json permutation_to_json(const Permutation& p, const std::vector<std::string>& labels) {
  return Json{{"cycles", p.cycles(labels)}, {"images", p.images()}};
}

Json group_to_json(const PermGroup& g) {
  Json gens = Json::array();
  for (const auto& p : g.generators()) gens.push_back(p.cycles(g.domain()));
  Json j{{"domain", g.domain()}, {"generators", std::move(gens)}};
  if (g.certified_order) j["order"] = *g.certified_order;
  return j;
}

PermGroup group_from_json(const Json& j) {
  auto domain = string_list(require(j, "domain", "group"), "group.domain");
  const Json& gens = require(j, "generators", "group");
  if (!gens.is_array()) throw InvalidInput("group.generators: expected an array");
  std::vector<Permutation> ps;
  for (std::size_t k = 0; k < gens.size(); ++k)
    ps.push_back(permutation_from_json(gens[k], domain, "group.generators[" + std::to_string(k) + "]"));
  return PermGroup(std::move(domain), std::move(ps));
}

Representation representation_from_json(const Json& j) {
  Representation r;
  r.source = group_from_json(require(j, "group", "representation"));
  r.target = string_list(require(j, "labels", "representation"), "representation.labels");
  const Json& act = require(j, "action", "representation");
  if (!act.is_array() || act.size() != r.source.generators().size())
    throw InvalidInput("representation.action: expected one image per group generator");
  for (std::size_t k = 0; k < act.size(); ++k)
    r.images.push_back(permutation_from_json(act[k], r.target, "representation.action[" + std::to_string(k) + "]"));
  return r;
}

RealizationSpec spec_from_json(const Json& j, Caps* caps) {
  RealizationSpec s;
  s.group = group_from_json(require(j, "group", "spec"));
  const Json& degrees = require(j, "degrees", "spec");
  if (!degrees.is_array()) throw InvalidInput("spec.degrees: expected an array");
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    const std::string where = "spec.degrees[" + std::to_string(i) + "]";
    const Json& d = degrees[i];
    DegreeSpec ds;
    const Json& deg = require(d, "degree", where);
    if (!deg.is_number_integer()) throw InvalidInput(where + ".degree: expected an integer");
    ds.degree = deg.get<int>();
    ds.labels = string_list(require(d, "labels", where), where + ".labels");
    const Json& act = require(d, "action", where);
    if (!act.is_array()) throw InvalidInput(where + ".action: expected an array");
    for (std::size_t k = 0; k < act.size(); ++k)
      ds.action.push_back(permutation_from_json(act[k], ds.labels, where + ".action[" + std::to_string(k) + "]"));
    const Json& og = require(d, "orbit_groups", where);
    if (!og.is_object()) throw InvalidInput(where + ".orbit_groups: expected an object");
    for (const auto& [key, val] : og.items()) ds.orbit_groups.emplace(key, abelian_from_json(val));
    s.degrees.push_back(std::move(ds));
  }
  if (auto it = j.find("family_index"); it != j.end()) s.family_index = positive(*it, "spec.family_index");
  if (auto it = j.find("caps"); it != j.end() && caps) {
    if (!it->is_object()) throw InvalidInput("spec.caps: expected an object");
    for (const auto& [key, val] : it->items()) {
      const std::string where = "spec.caps." + key;
      if (key == "group_order") caps->group_order = positive(val, where);
      else if (key == "poset_size") caps->poset_size = positive(val, where);
      else if (key == "graph_size") caps->graph_size = positive(val, where);
      else if (key == "simplex_budget") caps->simplex_budget = positive(val, where);
      else throw InvalidInput(where + ": unknown cap");
    }
  }
  return s;
}

Json spec_to_json(const RealizationSpec& s) {
  Json degrees = Json::array();
  for (const auto& d : s.degrees) {
    Json act = Json::array();
    for (const auto& p : d.action) act.push_back(p.cycles(d.labels));
    Json og = Json::object();
    for (const auto& [k, g] : d.orbit_groups) og[k] = abelian_to_json(g);
    degrees.push_back({{"degree", d.degree}, {"labels", d.labels}, {"action", std::move(act)}, {"orbit_groups", std::move(og)}});
  }
  Json g = group_to_json(s.group);
  g.erase("order");
  return Json{{"group", std::move(g)}, {"degrees", std::move(degrees)}, {"family_index", s.family_index}};
}

Json layout_to_json(const ModuleLayout& l) {
  Json sums = Json::array();
  for (const auto& s : l.summands)
    sums.push_back({{"degree", s.degree}, {"label", s.label}, {"element", s.element}, {"prefix", s.prefix}});
  Json imgs = Json::array();
  for (const auto& p : l.generator_images) imgs.push_back(p.images());
  return Json{{"height_z", l.height_z}, {"summands", std::move(sums)}, {"generator_images", std::move(imgs)}};
}

ModuleLayout layout_from_json(const Json& j) {
  ModuleLayout l;
  const Json& h = require(j, "height_z", "layout");
  if (!h.is_number_unsigned()) throw InvalidInput("layout.height_z: expected a non-negative integer");
  l.height_z = h.get<std::size_t>();
  const Json& sums = require(j, "summands", "layout");
  if (!sums.is_array()) throw InvalidInput("layout.summands: expected an array");
  for (const auto& s : sums) {
    ModuleLayout::Summand x;
    x.degree = require(s, "degree", "layout.summands").get<int>();
    x.label = require(s, "label", "layout.summands").get<std::string>();
    x.element = require(s, "element", "layout.summands").get<std::string>();
    x.prefix = require(s, "prefix", "layout.summands").get<std::string>();
    l.summands.push_back(std::move(x));
  }
  const Json& imgs = require(j, "generator_images", "layout");
  if (!imgs.is_array()) throw InvalidInput("layout.generator_images: expected an array");
  for (const auto& im : imgs) {
    if (!im.is_array()) throw InvalidInput("layout.generator_images: expected arrays of indices");
    std::vector<Index> v;
    for (const auto& x : im) {
      if (!x.is_number_unsigned()) throw InvalidInput("layout.generator_images: expected indices");
      v.push_back(x.get<Index>());
    }
    std::vector<char> hit(v.size(), 0);
    for (Index x : v)
      if (x >= v.size() || hit[x]++) throw InvalidInput("layout.generator_images: not a permutation");
    l.generator_images.emplace_back(std::move(v));
  }
  return l;
}

Json report_to_json(const RealizationReport& r, bool timing) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json e{{"name", c.name}, {"status", c.passed ? "pass" : "fail"}, {"detail", c.detail}};
    if (timing) e["seconds"] = c.seconds;
    Json w = Json::array();
    for (const auto& [k, v] : c.witnesses) w.push_back({{"name", k}, {"value", v}});
    e["witnesses"] = std::move(w);
    checks.push_back(std::move(e));
  }
  return Json{{"schema", kReportSchema}, {"pipeline", r.pipeline}, {"checks", std::move(checks)},
              {"notes", r.notes}, {"all_pass", r.all_passed()}};
}

}  // namespace alexrealize

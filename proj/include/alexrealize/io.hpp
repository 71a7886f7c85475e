#pragma once

// JSON and DOT formats for posets, graphs, homology, specs and reports.

#include <map>
#include <string>
#include <string_view>

#include "alexrealize/graph.hpp"
#include "alexrealize/homology.hpp"
#include "alexrealize/poset.hpp"
#include "alexrealize/realize.hpp"
#include "alexrealize/symmetry.hpp"

#include <json.hpp>

namespace alexrealize {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "alexrealize.report/1";

/// Parses JSON text; syntax errors become InvalidInput with line and column.
Json parse_json(std::string_view text, std::string_view source = "input");
std::string read_text_file(const std::string& path);
/// Writes via a temporary file in the same directory and a rename.
void write_file_atomic(const std::string& path, std::string_view content);
std::string dump_json(const Json& j);

Json poset_to_json(const Poset& p);
/// `{"elements": [...], "covers": [["a","b"], ...]}`; extra keys are ignored.
Poset poset_from_json(const Json& j);

Json graph_to_json(const SimpleGraph& g);
SimpleGraph graph_from_json(const Json& j);

std::string poset_to_dot(const Poset& p, std::string_view name = "poset");
std::string graph_to_dot(const SimpleGraph& g, std::string_view name = "graph");

Json abelian_to_json(const AbelianGroup& g);
AbelianGroup abelian_from_json(const Json& j);
Json homology_to_json(const std::map<int, AbelianGroup>& h);
Json induced_to_json(const InducedMatrix& m);

Json permutation_to_json(const Permutation& p, const std::vector<std::string>& labels);
Json group_to_json(const PermGroup& g);
/// `{"domain": [...], "generators": ["(1 2)", ...]}`.
PermGroup group_from_json(const Json& j);

/// `{"group": ..., "labels": [...], "action": ["(a b)", ...]}`.
Representation representation_from_json(const Json& j);

/// Reads the spec and, when present, its "caps" object into `caps`.
RealizationSpec spec_from_json(const Json& j, Caps* caps = nullptr);
Json spec_to_json(const RealizationSpec& s);

Json layout_to_json(const ModuleLayout& l);
ModuleLayout layout_from_json(const Json& j);

Json report_to_json(const RealizationReport& r, bool timing);

}  // namespace alexrealize

#include "alexrealize/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>

#include "alexrealize/builders.hpp"
#include "alexrealize/errors.hpp"
#include "alexrealize/io.hpp"
#include "alexrealize/realize.hpp"

namespace alexrealize {

namespace {

std::size_t env_cap(const char* name, std::size_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v, &end, 10);
  if (*end != '\0' || x == 0 || v[0] == '-')
    throw InvalidInput(std::string(name) + " must be a positive integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

Caps caps_from_env() {
  Caps c;
  c.group_order = env_cap("ALEXREALIZE_CAP_GROUP_ORDER", c.group_order);
  c.poset_size = env_cap("ALEXREALIZE_CAP_POSET_SIZE", c.poset_size);
  c.graph_size = env_cap("ALEXREALIZE_CAP_GRAPH_SIZE", c.graph_size);
  c.simplex_budget = env_cap("ALEXREALIZE_CAP_SIMPLEX_BUDGET", c.simplex_budget);
  return c;
}

struct Context {
  std::ostream& out;
  Caps caps;
  bool timing = false;

  // Writes to `path`, or to stdout when the path is empty.
  void emit(const std::string& path, const std::string& text) const {
    if (path.empty() || path == "-") {
      out << text;
    } else {
      write_file_atomic(path, text);
    }
  }
};

Json load_json(const std::string& path) { return parse_json(read_text_file(path), path); }

void check_readable(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw InvalidInput("no such input file '" + path + "'");
}

void check_writable(const std::string& path) {
  if (path.empty() || path == "-") return;
  auto dir = std::filesystem::path(path).parent_path();
  if (!dir.empty() && !std::filesystem::is_directory(dir))
    throw InvalidInput("output directory '" + dir.string() + "' does not exist");
}

int report_exit(const RealizationReport& r) { return r.all_passed() ? kExitPass : kExitVerificationFailure; }

// A suite of gates on a single poset, independent of any construction.
RealizationReport basic_suite(const Poset& p, const Caps& caps, bool timing) {
  RealizationReport r;
  r.pipeline = "basic";
  auto timed = [&](const std::string& name, const std::function<bool(Check&)>& f) {
    Check c;
    c.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    c.passed = f(c);
    if (timing) c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.checks.push_back(std::move(c));
  };
  timed("covers irredundant and acyclic", [&](Check& c) {
    c.detail = std::to_string(p.size()) + " elements, " + std::to_string(p.cover_count()) + " covers";
    return true;
  });
  timed("connected", [&](Check&) { return is_connected(p); });
  timed("minimal", [&](Check& c) {
    const auto beats = beat_points(p);
    c.detail = std::to_string(beats.size()) + " beat points";
    for (std::size_t i = 0; i < std::min<std::size_t>(beats.size(), 5); ++i)
      c.witnesses.emplace_back("beat point", p.id(beats[i]));
    return beats.empty();
  });
  const PermGroup aut = aut_poset(p, {.max_vertices = caps.poset_size});
  timed("automorphisms preserve the order", [&](Check& c) {
    for (const auto& g : aut.generators())
      if (!is_poset_automorphism(p, g)) return false;
    c.detail = "|aut| = " + (aut.certified_order ? std::to_string(*aut.certified_order) : std::string("?"));
    for (const auto& g : aut.generators()) c.witnesses.emplace_back("generator", g.cycles(p.elements()));
    return true;
  });
  PosetHomology h(p, {.simplex_budget = caps.simplex_budget});
  timed("reduced homology computed", [&](Check& c) {
    std::vector<std::string> parts;
    for (const auto& [d, g] : h.groups()) {
      parts.push_back("H~" + std::to_string(d) + " = " + g.to_string());
      c.witnesses.emplace_back("H" + std::to_string(d), g.to_string());
    }
    for (std::size_t i = 0; i < parts.size(); ++i) c.detail += (i ? ", " : "") + parts[i];
    return true;
  });
  r.notes.push_back("height " + std::to_string(height(p)));
  return r;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite spaces with prescribed symmetry and homology", "alexrealize"};
  app.require_subcommand(1);
  std::size_t threads = 1;
  bool timing = false;
  app.add_option("--threads", threads, "worker threads (accepted; work runs on one thread)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--timing", timing, "record per-check wall-clock seconds in reports");

  std::string out_path, dot_path, report_path, in_path, graph_path, spec_path;
  std::function<int(Context&)> action;

  // build
  auto* build = app.add_subcommand("build", "named spaces")->require_subcommand(1);
  std::size_t k = 2, idx = 1, degree = 1, rank = 0;
  std::vector<std::int64_t> torsion;
  auto poset_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "poset JSON (default stdout)");
    sub->add_option("--dot", dot_path, "DOT rendering");
  };
  auto emit_poset = [&](Context& ctx, const Poset& p) {
    check_writable(out_path);
    check_writable(dot_path);
    ctx.emit(out_path, dump_json(poset_to_json(p)));
    if (!dot_path.empty()) ctx.emit(dot_path, poset_to_dot(p));
    return kExitPass;
  };
  {
    auto* s = build->add_subcommand("l1", "the 9-point space L1");
    poset_out(s);
    s->callback([&] { action = [&](Context& c) { return emit_poset(c, build_L1()); }; });
    s = build->add_subcommand("wk", "rigid acyclic W_k (height 2k)");
    s->add_option("--k", k, "k >= 1")->check(CLI::PositiveNumber);
    poset_out(s);
    s->callback([&] { action = [&](Context& c) { return emit_poset(c, build_Wk(k)); }; });
    s = build->add_subcommand("wk-tilde", "rigid acyclic W~_k (height 2k-1)");
    s->add_option("--k", k, "k >= 2")->check(CLI::Range(2, 64));
    poset_out(s);
    s->callback([&] { action = [&](Context& c) { return emit_poset(c, build_Wk_tilde(k)); }; });
    s = build->add_subcommand("sphere", "minimal model of the i-sphere");
    s->add_option("--i", idx, "dimension")->check(CLI::NonNegativeNumber);
    poset_out(s);
    s->callback([&] { action = [&](Context& c) { return emit_poset(c, sphere_model(idx)); }; });
    s = build->add_subcommand("moore", "rigid Moore piece");
    s->add_option("--degree", degree, "homology degree")->check(CLI::PositiveNumber);
    s->add_option("--rank", rank, "free rank");
    s->add_option("--torsion", torsion, "torsion coefficients")->delimiter(',');
    poset_out(s);
    s->callback([&] {
      action = [&](Context& c) {
        for (auto t : torsion)
          if (t < 1) throw InvalidInput("torsion coefficients must be positive");
        check_writable(out_path);
        check_writable(dot_path);
        MoorePiece m = moore_piece({degree, AbelianGroup(rank, torsion)});
        Json j = poset_to_json(m.poset);
        j["anchor"] = m.anchor;
        c.emit(out_path, dump_json(j));
        if (!dot_path.empty()) c.emit(dot_path, poset_to_dot(m.poset));
        return kExitPass;
      };
    });
  }

  // graph
  auto* graph = app.add_subcommand("graph", "graph constructions")->require_subcommand(1);
  std::size_t family_j = 1, count = 1, max_vertices = 7, space_height = 5;
  std::string space_kind = "none";
  {
    auto* s = graph->add_subcommand("realize", "graph with prescribed automorphism group and action on V");
    s->add_option("--rep", spec_path, "representation JSON")->required();
    s->add_option("--j", family_j, "family index")->check(CLI::PositiveNumber);
    s->add_option("--space", space_kind, "also build a space: none, height1, acyclic")
        ->check(CLI::IsMember({"none", "height1", "acyclic"}));
    s->add_option("--height", space_height, "height of the acyclic space (>= 5)");
    s->add_option("--out", out_path, "graph or poset JSON");
    s->add_option("--report", report_path, "report JSON");
    s->add_option("--dot", dot_path, "DOT rendering");
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(spec_path);
        check_writable(out_path);
        check_writable(report_path);
        check_writable(dot_path);
        Representation rho = representation_from_json(load_json(spec_path));
        RealizeOptions o;
        o.caps = c.caps;
        o.timing = c.timing;
        RealizationReport rep;
        if (space_kind == "none") {
          GraphRealization g = realize_graph(rho, family_j, o);
          Json j = graph_to_json(g.graph);
          Json v = Json::array();
          for (Index x : g.v_embedding) v.push_back(g.graph.id(x));
          j["V"] = std::move(v);
          if (!out_path.empty()) c.emit(out_path, dump_json(j));
          if (!dot_path.empty()) c.emit(dot_path, graph_to_dot(g.graph));
          rep = g.report;
        } else {
          SpaceRealization s = space_kind == "height1" ? realize_space_height1(rho, family_j, o)
                                                       : realize_space_acyclic(rho, space_height, family_j, o);
          Json j = poset_to_json(s.poset);
          Json v = Json::array();
          for (Index x : s.v_embedding) v.push_back(s.poset.id(x));
          j["V"] = std::move(v);
          if (!out_path.empty()) c.emit(out_path, dump_json(j));
          if (!dot_path.empty()) c.emit(dot_path, poset_to_dot(s.poset));
          rep = s.report;
        }
        c.emit(report_path, dump_json(report_to_json(rep, c.timing)));
        return report_exit(rep);
      };
    });

    s = graph->add_subcommand("factor", "prime factors under the Cartesian product");
    s->add_option("--in", in_path, "graph JSON")->required();
    s->add_option("--out", out_path, "factor list JSON");
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(in_path);
        check_writable(out_path);
        SimpleGraph g = graph_from_json(load_json(in_path));
        Json fs = Json::array();
        for (const auto& f : prime_factorization(g, {.max_vertices = c.caps.graph_size})) fs.push_back(graph_to_json(f));
        c.emit(out_path, dump_json(Json{{"factors", std::move(fs)}}));
        return kExitPass;
      };
    });

    s = graph->add_subcommand("rigid-primes", "first asymmetric prime graphs");
    s->add_option("--count", count, "how many")->check(CLI::PositiveNumber);
    s->add_option("--max-vertices", max_vertices, "vertex bound")->check(CLI::Range(1, 8));
    s->add_option("--out", out_path, "graph list JSON");
    s->callback([&] {
      action = [&](Context& c) {
        check_writable(out_path);
        Json gs = Json::array();
        for (const auto& g : enumerate_rigid_primes(count, {.max_vertices = max_vertices}))
          gs.push_back(graph_to_json(g));
        c.emit(out_path, dump_json(Json{{"graphs", std::move(gs)}}));
        return kExitPass;
      };
    });

    s = graph->add_subcommand("incidence", "incidence poset of a graph");
    s->add_option("--in", in_path, "graph JSON")->required();
    poset_out(s);
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(in_path);
        return emit_poset(c, incidence_poset(graph_from_json(load_json(in_path))).poset);
      };
    });
  }

  // space
  auto* space = app.add_subcommand("space", "operations on posets")->require_subcommand(1);
  std::string left_path, right_path, left_point, right_point, left_prefix = "left/", right_prefix = "right/";
  {
    auto* s = space->add_subcommand("join", "non-Hausdorff join, left below right");
    s->add_option("--left", left_path)->required();
    s->add_option("--right", right_path)->required();
    s->add_option("--left-prefix", left_prefix);
    s->add_option("--right-prefix", right_prefix);
    poset_out(s);
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(left_path);
        check_readable(right_path);
        Poset a = poset_from_json(load_json(left_path)), b = poset_from_json(load_json(right_path));
        return emit_poset(c, non_hausdorff_join(a, b, {left_prefix, right_prefix}).poset);
      };
    });

    s = space->add_subcommand("wedge", "one-point union");
    s->add_option("--left", left_path)->required();
    s->add_option("--left-point", left_point)->required();
    s->add_option("--right", right_path)->required();
    s->add_option("--right-point", right_point)->required();
    s->add_option("--left-prefix", left_prefix);
    s->add_option("--right-prefix", right_prefix);
    poset_out(s);
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(left_path);
        check_readable(right_path);
        Poset a = poset_from_json(load_json(left_path)), b = poset_from_json(load_json(right_path));
        return emit_poset(c, wedge(a, left_point, b, right_point, {left_prefix, right_prefix}).poset);
      };
    });

    s = space->add_subcommand("core", "remove beat points until none are left");
    s->add_option("--in", in_path)->required();
    poset_out(s);
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(in_path);
        return emit_poset(c, core(poset_from_json(load_json(in_path))));
      };
    });

    s = space->add_subcommand("height", "height, beat points and chain statistics");
    s->add_option("--in", in_path)->required();
    s->add_option("--out", out_path);
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(in_path);
        check_writable(out_path);
        Poset p = poset_from_json(load_json(in_path));
        const auto st = chain_stats(p);
        Json beats = Json::array();
        for (Index b : beat_points(p)) beats.push_back(p.id(b));
        Json through = Json::object();
        for (Index x = 0; x < p.size(); ++x) through[p.id(x)] = st.through[x];
        c.emit(out_path, dump_json(Json{{"height", st.height},
                                        {"minimal", beats.empty()},
                                        {"beat_points", std::move(beats)},
                                        {"chain_through", std::move(through)}}));
        return kExitPass;
      };
    });
  }

  // homology
  bool plain = false;
  {
    auto* s = app.add_subcommand("homology", "reduced integral homology of a poset");
    s->add_option("--in", in_path)->required();
    s->add_option("--out", out_path);
    s->add_flag("--no-morse", plain, "skip the Morse reduction");
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(in_path);
        check_writable(out_path);
        Poset p = poset_from_json(load_json(in_path));
        PosetHomology h(p, {.simplex_budget = c.caps.simplex_budget, .morse = !plain});
        c.emit(out_path, dump_json(Json{{"reduced_homology", homology_to_json(h.groups())},
                                        {"simplices", h.simplex_count()},
                                        {"critical_cells", h.critical_count()}}));
        return kExitPass;
      };
    });
  }

  // aut
  {
    auto* s = app.add_subcommand("aut", "automorphism group of a poset or graph");
    auto* in_opt = s->add_option("--in", in_path, "poset JSON");
    auto* g_opt = s->add_option("--graph", graph_path, "graph JSON");
    in_opt->excludes(g_opt);
    s->add_option("--out", out_path);
    s->callback([&] {
      action = [&](Context& c) {
        check_writable(out_path);
        PermGroup g;
        if (!in_path.empty()) {
          check_readable(in_path);
          g = aut_poset(poset_from_json(load_json(in_path)), {.max_vertices = c.caps.poset_size});
        } else if (!graph_path.empty()) {
          check_readable(graph_path);
          g = aut_graph(graph_from_json(load_json(graph_path)), nullptr, {.max_vertices = c.caps.graph_size});
        } else {
          throw InvalidInput("aut needs --in or --graph");
        }
        Json gens = Json::array();
        for (const auto& p : g.generators()) gens.push_back(permutation_to_json(p, g.domain()));
        Json j{{"order", g.certified_order ? Json(*g.certified_order) : Json(nullptr)}, {"generators", std::move(gens)}};
        c.emit(out_path, dump_json(j));
        return kExitPass;
      };
    });
  }

  // realize
  auto realize_modules_cmd = [&](Context& c, const RealizationSpec& spec) {
    RealizeOptions o;
    o.caps = c.caps;
    o.timing = c.timing;
    ModuleRealization m = realize_modules(spec, o);
    Json x = poset_to_json(m.poset);
    x["layout"] = layout_to_json(m.layout);
    if (!out_path.empty()) c.emit(out_path, dump_json(x));
    if (!dot_path.empty()) c.emit(dot_path, poset_to_dot(m.poset));
    c.emit(report_path, dump_json(report_to_json(m.report, c.timing)));
    return report_exit(m.report);
  };
  {
    auto* s = app.add_subcommand("realize", "space with prescribed automorphism group and permutation modules");
    s->add_option("--spec", spec_path, "RealizationSpec JSON")->required();
    s->add_option("--out", out_path, "poset JSON with layout");
    s->add_option("--report", report_path, "report JSON (default stdout)");
    s->add_option("--dot", dot_path, "DOT rendering");
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(spec_path);
        check_writable(out_path);
        check_writable(report_path);
        check_writable(dot_path);
        Caps caps = c.caps;
        RealizationSpec spec = spec_from_json(load_json(spec_path), &caps);
        c.caps = caps;
        return realize_modules_cmd(c, spec);
      };
    });
  }

  // verify
  std::string suite = "basic";
  {
    auto* s = app.add_subcommand("verify", "run a report suite on a poset file");
    s->add_option("--suite", suite)->check(CLI::IsMember({"basic", "modules"}));
    s->add_option("--in", in_path, "poset JSON")->required();
    s->add_option("--spec", spec_path, "RealizationSpec JSON (modules)");
    s->add_option("--report", report_path, "report JSON (default stdout)");
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(in_path);
        check_writable(report_path);
        const Json j = load_json(in_path);
        Poset p = poset_from_json(j);
        RealizationReport rep;
        if (suite == "basic") {
          rep = basic_suite(p, c.caps, c.timing);
        } else {
          if (spec_path.empty()) throw InvalidInput("--suite modules needs --spec");
          check_readable(spec_path);
          Caps caps = c.caps;
          RealizationSpec spec = spec_from_json(load_json(spec_path), &caps);
          auto it = j.find("layout");
          if (it == j.end()) throw InvalidInput(in_path + ": no layout recorded (produce the file with `realize --out`)");
          RealizeOptions o;
          o.caps = caps;
          o.timing = c.timing;
          rep = verify_modules(p, spec, layout_from_json(*it), o);
        }
        c.emit(report_path, dump_json(report_to_json(rep, c.timing)));
        return report_exit(rep);
      };
    });
  }

  // family
  std::string out_dir;
  {
    auto* s = app.add_subcommand("family", "several pairwise non-isomorphic realizations");
    s->add_option("--spec", spec_path)->required();
    s->add_option("--count", count, ">= 2")->check(CLI::Range(2, 64));
    s->add_option("--out-dir", out_dir, "directory for member_<j>.json");
    s->add_option("--report", report_path, "report JSON (default stdout)");
    s->callback([&] {
      action = [&](Context& c) {
        check_readable(spec_path);
        check_writable(report_path);
        if (!out_dir.empty() && !std::filesystem::is_directory(out_dir))
          throw InvalidInput("output directory '" + out_dir + "' does not exist");
        Caps caps = c.caps;
        RealizationSpec spec = spec_from_json(load_json(spec_path), &caps);
        RealizeOptions o;
        o.caps = caps;
        o.timing = c.timing;
        FamilyResult f = family(spec, count, o);
        if (!out_dir.empty())
          for (std::size_t i = 0; i < f.members.size(); ++i) {
            Json x = poset_to_json(f.members[i].poset);
            x["layout"] = layout_to_json(f.members[i].layout);
            c.emit((std::filesystem::path(out_dir) / ("member_" + std::to_string(spec.family_index + i) + ".json")).string(),
                   dump_json(x));
          }
        c.emit(report_path, dump_json(report_to_json(f.report, c.timing)));
        return report_exit(f.report);
      };
    });
  }

  // export
  {
    auto* exp = app.add_subcommand("export", "conversions")->require_subcommand(1);
    auto* s = exp->add_subcommand("dot", "DOT rendering of a poset or graph");
    auto* in_opt = s->add_option("--in", in_path, "poset JSON");
    auto* g_opt = s->add_option("--graph", graph_path, "graph JSON");
    in_opt->excludes(g_opt);
    s->add_option("--out", out_path);
    s->callback([&] {
      action = [&](Context& c) {
        check_writable(out_path);
        if (!in_path.empty()) {
          check_readable(in_path);
          c.emit(out_path, poset_to_dot(poset_from_json(load_json(in_path))));
        } else if (!graph_path.empty()) {
          check_readable(graph_path);
          c.emit(out_path, graph_to_dot(graph_from_json(load_json(graph_path))));
        } else {
          throw InvalidInput("export dot needs --in or --graph");
        }
        return kExitPass;
      };
    });
  }

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    Context ctx{out, caps_from_env(), timing};
    return action(ctx);
  } catch (const VerificationFailure& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerificationFailure;
  } catch (const GateFailure& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerificationFailure;
  } catch (const RigidificationExhausted& e) {
    err << "verification failure: " << e.what() << "\n";
    return kExitVerificationFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace alexrealize

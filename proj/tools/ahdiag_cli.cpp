// Copyright 2026 The ahdiag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ahdiag: batch front end over system files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ahdiag/ahsys.hpp"
#include "ahdiag/error.hpp"
#include "ahdiag/groupoid.hpp"
#include "ahdiag/intertwine.hpp"
#include "ahdiag/perturb.hpp"
#include "ahdiag/textio.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace ahdiag;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kUsage = 2, kIo = 3 };

struct Run {
  std::string command;
  Json report;
  std::ostringstream text;
  bool ok = true;

  void fail() { ok = false; }
};

fs::path out_dir() {
  const char* env = std::getenv("AHDIAG_OUT_DIR");
  fs::path dir = env && *env ? fs::path(env) : fs::path(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

std::string file_safe(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  }
  return out;
}

Rational rational_flag(const std::string& value, const std::string& flag) {
  try {
    return parse_rational(value);
  } catch (const Error& e) {
    throw ParameterError(flag + ": " + e.what());
  }
}

// The requested id, or the only candidate when none was requested.
std::string pick(const std::vector<std::string>& ids, const std::string& requested, const std::string& kind) {
  if (!requested.empty()) {
    for (const auto& id : ids) {
      if (id == requested) return id;
    }
    throw ParameterError("no " + kind + " '" + requested + "' in the input");
  }
  if (ids.size() != 1) {
    throw ParameterError("input has " + std::to_string(ids.size()) + " " + kind + "s; choose one with --" + kind);
  }
  return ids[0];
}

template <typename List, typename Key>
std::vector<std::string> ids_of(const List& list, Key key) {
  std::vector<std::string> out;
  for (const auto& x : list) out.push_back(key(x));
  return out;
}

std::string verdict_word(bool ok) { return ok ? "pass" : "FAIL"; }

Json point_json(const Space& s, const SpacePoint& p) {
  Json out = Json::array();
  for (int k = 0; k < s.arity(); ++k) out.push_back(point_token(*s.factor(k), p[k]));
  return out;
}

// ---- check ---------------------------------------------------------------

void check_system(Run& run, const std::string& id, const GenDiagSystem& sys) {
  SystemReport rep = gendiag_check(sys);
  Json items = Json::array();
  for (const auto& it : rep.items) {
    items.push_back({{"name", it.name},
                     {"level", it.level},
                     {"component", it.component},
                     {"verdict", to_string(it.verdict)},
                     {"detail", it.detail}});
    if (it.verdict != Verdict::kPass) {
      run.text << "  " << to_string(it.verdict) << ": " << it.name << " level " << it.level;
      if (it.component >= 0) run.text << " component " << it.component;
      if (!it.detail.empty()) run.text << " (" << it.detail << ")";
      run.text << '\n';
    }
  }
  run.text << "system " << id << ": " << rep.items.size() << " items, " << verdict_word(rep.passed()) << '\n';
  if (!rep.passed()) run.fail();
  run.report["systems"].push_back({{"id", id}, {"passed", rep.passed()}, {"items", items}});
}

void check_form(Run& run, const FormDecl& f) {
  const DiagonalForm& phi = f.form;
  MHReport mh = is_maximally_homogeneous(phi);
  UnitalInjectiveReport ui = check_unital_injective(phi);
  DescentReport descent = verify_descent(phi);
  Json wit = Json::array();
  for (const auto& w : mh.witnesses) {
    wit.push_back({{"target", w.target},
                   {"tree_edge", phi.at(w.target).tree.tree->edge(w.tree_edge).id},
                   {"t0", to_string(w.t0)},
                   {"t1", to_string(w.t1)},
                   {"a", w.a},
                   {"b", w.b}});
  }
  Json gaps = Json::array();
  for (const auto& g : ui.gaps) {
    const Graph& z = *phi.source().summand(g.source).base;
    Json iv = Json::array();
    for (const auto& i : g.intervals) iv.push_back({z.edge(i.edge).id, to_string(i.lo), to_string(i.hi)});
    Json vs = Json::array();
    for (int v : g.vertices) vs.push_back(z.vertex_id(v));
    gaps.push_back({{"source", g.source}, {"intervals", iv}, {"vertices", vs}});
  }
  const bool ok = mh.holds && ui.unital && ui.injective && descent.holds;
  run.text << "diagform " << f.id << ": MH " << verdict_word(mh.holds) << ", unital " << verdict_word(ui.unital)
           << ", injective " << verdict_word(ui.injective) << ", descent " << verdict_word(descent.holds) << '\n';
  for (const auto& g : ui.gaps) {
    const Graph& z = *phi.source().summand(g.source).base;
    for (const auto& i : g.intervals) {
      run.text << "  gap in source " << g.source << ": " << z.edge(i.edge).id << " (" << to_string(i.lo) << ", "
               << to_string(i.hi) << ")\n";
    }
  }
  if (!ok) run.fail();
  run.report["diagforms"].push_back({{"id", f.id},
                                     {"maximally_homogeneous", mh.holds},
                                     {"witnesses", wit},
                                     {"unital", ui.unital},
                                     {"injective", ui.injective},
                                     {"gaps", gaps},
                                     {"descent", descent.holds},
                                     {"failures", descent.failures.size()}});
}

void cmd_check(Run& run, const Document& doc) {
  run.report["systems"] = Json::array();
  run.report["diagforms"] = Json::array();
  for (const auto& [id, sys] : doc.systems) check_system(run, id, sys);
  for (const auto& f : doc.forms) check_form(run, f);
  if (doc.systems.empty() && doc.forms.empty()) run.text << "nothing to check\n";
}

// ---- perturb -------------------------------------------------------------

struct PerturbOpts {
  std::string form, delta, rho, output = "perturbed.ahd";
};

void cmd_perturb(Run& run, Document doc, const PerturbOpts& o) {
  const FormDecl decl = doc.form(pick(ids_of(doc.forms, [](const FormDecl& f) { return f.id; }), o.form, "form"));
  std::string delta_text = o.delta;
  if (delta_text.empty() && doc.param("delta")) delta_text = *doc.param("delta");
  if (delta_text.empty()) throw ParameterError("--delta is required (or a 'param delta' line)");
  std::string rho_text = o.rho;
  if (rho_text.empty() && doc.param("rho")) rho_text = *doc.param("rho");
  const Rational delta = rational_flag(delta_text, "--delta");
  std::optional<Rational> rho;
  if (!rho_text.empty()) rho = rational_flag(rho_text, "--rho");

  const Rational gate = delta_bound(decl.form);
  run.report["form"] = decl.id;
  run.report["delta_bound"] = to_string(gate);
  SurjectiveResult res = make_surjective_mh(decl.form, delta, rho);

  UnitalInjectiveReport ui = check_unital_injective(res.form);
  const bool mh = is_maximally_homogeneous(res.form).holds;
  const bool descent = verify_descent(res.form).holds;
  const bool close = res.log.bound <= res.log.delta + res.log.rho;
  const bool surjective = ui.unital && ui.injective;

  Json records = Json::array();
  for (const auto& r : res.log.records) {
    records.push_back({{"kind", r.kind == RecordKind::kTent ? "tent" : "repair"},
                       {"source", r.source},
                       {"target", r.target},
                       {"entry", r.entry},
                       {"tree_edge", res.form.at(r.target).tree.tree->edge(r.tree_edge).id},
                       {"v", {to_string(r.v_lo), to_string(r.v_hi)}},
                       {"copies", r.copies.size()}});
  }
  int gaps = 0;
  for (const auto& g : res.log.gaps) gaps += g.count();
  run.report["delta"] = to_string(res.log.delta);
  run.report["rho"] = to_string(res.log.rho);
  run.report["gaps"] = gaps;
  run.report["records"] = records;
  run.report["sup_distance"] = to_string(res.log.bound);
  run.report["properties"] = {{"unital_injective", surjective},
                              {"maximally_homogeneous", mh},
                              {"descent", descent},
                              {"distance_within_delta_plus_rho", close}};

  const std::string new_id = decl.id + ".surj";
  doc.add_form_like(decl, new_id, res.form);
  const fs::path path = out_dir() / o.output;
  write_file(path, serialize(doc));
  run.report["output"] = o.output;
  run.report["new_form"] = new_id;

  run.text << "perturbed " << decl.id << " with delta " << to_string(res.log.delta) << " (bound "
           << to_string(gate) << "), rho " << to_string(res.log.rho) << ": " << gaps << " gaps, "
           << records.size() << " modifications\n";
  run.text << "  unital and injective " << verdict_word(surjective) << "\n  maximally homogeneous "
           << verdict_word(mh) << "\n  descends " << verdict_word(descent) << "\n  sup distance "
           << to_string(res.log.bound) << " <= delta + rho " << verdict_word(close) << '\n';
  run.text << "wrote " << o.output << " (form " << new_id << ")\n";
  if (!(surjective && mh && descent && close)) run.fail();
}

// ---- intertwine ----------------------------------------------------------

void cmd_intertwine(Run& run, const Document& doc, const std::string& pair_id, int depth) {
  const std::string id = pick(ids_of(doc.pairs, [](const PairDecl& p) { return p.id; }), pair_id, "pair");
  FiniteSystemPair pair = doc.pair(id);
  if (depth <= 0) depth = static_cast<int>(pair.phi.size());
  if (depth > static_cast<int>(pair.phi.size())) {
    throw ParameterError("--depth " + std::to_string(depth) + " exceeds the " + std::to_string(pair.phi.size()) +
                         " levels of pair '" + id + "'");
  }
  IntertwiningReport rep = check_approx_intertwining(pair, depth);
  Json levels = Json::array();
  for (const auto& l : rep.levels) {
    levels.push_back({{"n", l.n},
                      {"threshold", to_string(l.threshold)},
                      {"bound", to_string(l.bound)},
                      {"lower", l.lower ? Json(to_string(*l.lower)) : Json(nullptr)},
                      {"verdict", to_string(l.verdict)},
                      {"containment", to_string(l.containment)},
                      {"detail", l.detail}});
    run.text << "level " << l.n << ": bound " << to_string(l.bound);
    if (l.lower) run.text << ", lower " << to_string(*l.lower);
    run.text << " vs " << to_string(l.threshold) << " -> " << to_string(l.verdict) << ", containment "
             << to_string(l.containment) << '\n';
  }
  run.report["pair"] = id;
  run.report["depth"] = depth;
  run.report["levels"] = levels;
  run.report["verdict"] = to_string(rep.overall());
  run.text << "pair " << id << ": " << to_string(rep.overall()) << '\n';
  if (rep.overall() != Intertwining::kSatisfied) run.fail();
}

// ---- groupoid / export ---------------------------------------------------

struct StageOpts {
  std::string system;
  int level = 1;
  int depth = 1;
  int samples = 0;  // 0: all
  bool untwist = false;
  int view_base = 0;  // 0: the base level
};

struct LoadedStage {
  std::string id;
  GenDiagSystem sys;
  GroupoidStage stage;
  int view_base = 1;
};

LoadedStage load_stage(const Document& doc, const StageOpts& o) {
  LoadedStage out;
  out.id = pick(ids_of(doc.systems, [](const auto& s) { return s.first; }), o.system, "system");
  out.sys = doc.system(out.id);
  if (o.untwist) out.sys = untwist(out.sys);
  const int top = out.sys.level_count();
  if (o.level < 1 || o.depth < 0 || o.level + o.depth > top) {
    throw ParameterError("--level " + std::to_string(o.level) + " --depth " + std::to_string(o.depth) +
                         " needs levels up to " + std::to_string(o.level + o.depth) + "; system '" + out.id +
                         "' has " + std::to_string(top));
  }
  auto samples = all_samples(out.sys, o.level + o.depth);
  if (o.samples < 0) throw ParameterError("--samples must be >= 0");
  if (o.samples > 0 && static_cast<size_t>(o.samples) < samples.size()) samples.resize(o.samples);
  out.view_base = o.view_base ? o.view_base : o.level;
  if (out.view_base < o.level || out.view_base > o.level + o.depth) {
    throw ParameterError("--view-base must lie in [" + std::to_string(o.level) + ", " +
                         std::to_string(o.level + o.depth) + "]");
  }
  out.stage = build_stage(out.sys, o.level, o.depth, samples, Exec::kParallel);
  return out;
}

void cmd_groupoid(Run& run, const Document& doc, const StageOpts& o, const std::string& epsilon, int max_m) {
  LoadedStage ls = load_stage(doc, o);
  const GroupoidStage& st = ls.stage;
  const int rn = st.rank;
  Json samples = Json::array();
  bool counts_ok = true;
  for (size_t s = 0; s < st.samples.size(); ++s) {
    const auto words = words_into(ls.sys, st.n, st.m, st.samples[s].component).size();
    size_t arrows = 0;
    for (const auto& a : st.arrows) arrows += a.sample == static_cast<int>(s);
    const bool ok = arrows == words * rn * rn;
    counts_ok = counts_ok && ok;
    const Space& sp = *ls.sys.level(st.n + st.m).components[st.samples[s].component];
    samples.push_back({{"component", st.samples[s].component},
                       {"z", point_json(sp, st.samples[s].z)},
                       {"words", words},
                       {"arrows", arrows}});
  }
  // Orbit of every unit with k0 = 0.
  const long want = ls.sys.level(ls.view_base).rank;
  bool orbits_ok = true;
  size_t orbit_checks = 0;
  for (size_t i = 0; i < st.arrows.size(); ++i) {
    const Arrow& a = st.arrows[i];
    if (!a.is_unit() || a.k0 != 0) continue;
    ++orbit_checks;
    orbits_ok = orbits_ok && static_cast<long>(orbit(ls.sys, st, i, ls.view_base).size()) == want;
  }
  std::ostringstream csv;
  write_orbit_csv(csv, ls.sys, st, ls.view_base);
  write_file(out_dir() / "orbits.csv", csv.str());

  run.report["system"] = ls.id;
  run.report["level"] = st.n;
  run.report["depth"] = st.m;
  run.report["rank"] = rn;
  run.report["arrows"] = st.arrows.size();
  run.report["units"] = st.unit_count();
  run.report["samples"] = samples;
  run.report["arrow_counts"] = counts_ok;
  run.report["view_base"] = ls.view_base;
  run.report["orbit_size"] = want;
  run.report["orbits_checked"] = orbit_checks;
  run.report["orbit_sizes"] = orbits_ok;
  run.report["csv"] = "orbits.csv";
  run.text << "stage n=" << st.n << " m=" << st.m << " of " << ls.id << ": " << st.samples.size() << " samples, "
           << st.arrows.size() << " arrows, " << st.unit_count() << " units\n";
  run.text << "  arrow counts (#words * r_n^2) " << verdict_word(counts_ok) << "\n  orbit sizes = r_"
           << ls.view_base << " = " << want << " over " << orbit_checks << " units " << verdict_word(orbits_ok)
           << "\nwrote orbits.csv\n";
  if (!(counts_ok && orbits_ok)) run.fail();

  if (!epsilon.empty()) {
    const Rational eps = rational_flag(epsilon, "--epsilon");
    if (eps <= 0) throw ParameterError("--epsilon must be positive");
    if (max_m < 0) max_m = o.depth;
    if (st.n + max_m > ls.sys.level_count()) {
      throw ParameterError("--max-m " + std::to_string(max_m) + " runs past the last level");
    }
    DensityReport dr = density_report(ls.sys, st.n, eps, max_m, Exec::kParallel);
    Json steps = Json::array();
    for (const auto& s : dr.steps) {
      Json step{{"m", s.m}, {"dense", s.dense}};
      if (s.witness) {
        const Space& sp = *ls.sys.level(st.n + s.m).components[s.witness->component];
        step["witness"] = {{"component", s.witness->component}, {"z", point_json(sp, s.witness->z)}};
      }
      steps.push_back(step);
      run.text << "  density m=" << s.m << ": " << (s.dense ? "dense" : "not dense") << '\n';
    }
    run.report["density"] = {{"epsilon", to_string(eps)},
                             {"steps", steps},
                             {"first_dense", dr.first_dense ? Json(*dr.first_dense) : Json(nullptr)}};
    run.text << "density at epsilon " << to_string(eps) << ": "
             << (dr.first_dense ? "dense from m=" + std::to_string(*dr.first_dense) : std::string("FAIL")) << '\n';
    if (!dr.first_dense) run.fail();
  }
}

std::string mh_csv(const FormDecl& f) {
  std::ostringstream out;
  out << "target,tree_edge,t0,t1,entry_a,entry_b\n";
  for (const auto& w : is_maximally_homogeneous(f.form).witnesses) {
    out << w.target << ',' << f.form.at(w.target).tree.tree->edge(w.tree_edge).id << ',' << to_string(w.t0) << ','
        << to_string(w.t1) << ',' << w.a << ',' << w.b << '\n';
  }
  return out.str();
}

void cmd_export(Run& run, const Document& doc, bool dot, bool csv, bool stage, const StageOpts& o) {
  if (!dot && !csv) throw ParameterError("export needs --dot, --csv or both");
  Json files = Json::array();
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(out_dir() / name, content);
    files.push_back(name);
    run.text << "wrote " << name << '\n';
  };
  if (dot) {
    for (const auto& g : doc.graphs) emit("graph_" + file_safe(g->name()) + ".dot", to_dot(*g));
  }
  if (csv) {
    for (const auto& f : doc.forms) emit("mh_" + file_safe(f.id) + ".csv", mh_csv(f));
  }
  if (stage) {
    LoadedStage ls = load_stage(doc, o);
    if (dot) emit("stage.dot", stage_dot(ls.stage));
    if (csv) {
      std::ostringstream c;
      write_orbit_csv(c, ls.sys, ls.stage, ls.view_base);
      emit("orbits.csv", c.str());
    }
  }
  run.report["files"] = files;
}

// ---- generate ------------------------------------------------------------

struct GenerateOpts {
  std::string kind, id, output, points = "dense", sigma = "tent";
  int levels = 3;
  int s = 2;
  int copies = 2;
  int constants = 1;
  int first_power = 1;
};

void cmd_generate(Run& run, const GenerateOpts& o) {
  if (o.levels < 2) throw ParameterError("--levels must be >= 2");
  const std::string id = o.id.empty() ? o.kind : o.id;
  Document doc;
  doc.params.push_back({"generator", o.kind});
  if (o.kind == "goodearl") {
    GoodearlParams p;
    p.base = fixtures::interval();
    p.levels = o.levels;
    if (o.s < 2) throw ParameterError("--s must be >= 2 for goodearl");
    std::vector<GraphPoint> pts;
    if (o.points == "dense") {
      pts = dyadic_schedule(*p.base, (o.levels - 1) * (o.s - 1));
    } else {
      const Rational x = rational_flag(o.points, "--points");
      if (x < 0 || x > 1) throw ParameterError("--points must be 'dense' or a rational in [0, 1]");
      pts.assign((o.levels - 1) * (o.s - 1), p.base->point(0, x));
    }
    for (int n = 1; n < o.levels; ++n) {
      p.points.emplace_back(pts.begin() + (n - 1) * (o.s - 1), pts.begin() + n * (o.s - 1));
      p.s.push_back(o.s);
    }
    doc.add_system(id, generate_goodearl(p));
  } else if (o.kind == "villadsen1" || o.kind == "villadsen2") {
    VilladsenParams p;
    p.seed = fixtures::interval();
    p.levels = o.levels;
    p.first_power = o.first_power;
    p.copies.assign(o.levels - 1, o.copies);
    p.constants.assign(o.levels - 1, o.constants);
    doc.add_system(id, o.kind == "villadsen1" ? generate_villadsen1(p) : generate_villadsen2_skeleton(p));
  } else if (o.kind == "dynamics") {
    auto I = fixtures::interval();
    std::vector<Piece> pieces;
    if (o.sigma == "tent") {
      pieces = {Piece{0, Rational(1) / 2, 0, 0, 1}, Piece{Rational(1) / 2, 1, 0, 1, 0}};
    } else if (o.sigma == "flip") {
      pieces = {Piece{0, 1, 0, 1, 0}};
    } else {
      throw ParameterError("--sigma must be 'tent' or 'flip'");
    }
    DynamicsParams p{PLMap(I, I, {pieces}), o.levels, o.s};
    doc.add_system(id, generate_dynamics(p));
  } else if (o.kind == "schedule") {
    doc.add_pair(id, perturbation_schedule(o.levels - 1));
  } else {
    throw ParameterError("unknown --kind '" + o.kind + "'");
  }
  const std::string name = o.output.empty() ? file_safe(id) + ".ahd" : o.output;
  write_file(out_dir() / name, serialize(doc));
  run.report["kind"] = o.kind;
  run.report["id"] = id;
  run.report["output"] = name;
  run.text << "wrote " << name << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ahdiag: checks, perturbations and groupoid stages for AH-system files"};
  app.require_subcommand(1);

  std::string input;
  auto* check = app.add_subcommand("check", "gendiag conditions, maximal homogeneity, unitality and injectivity");
  check->add_option("file", input, "system file")->required();

  PerturbOpts po;
  auto* perturb = app.add_subcommand("perturb", "surjective maximally homogeneous perturbation of a diagform");
  perturb->add_option("file", input, "system file")->required();
  perturb->add_option("--form", po.form, "diagform id");
  perturb->add_option("--delta", po.delta, "rational delta");
  perturb->add_option("--rho", po.rho, "rational rho");
  perturb->add_option("--output", po.output, "file name in the output directory");

  std::string pair_id;
  int depth = 0;
  auto* intertwine = app.add_subcommand("intertwine", "approximate intertwining criterion for a pair");
  intertwine->add_option("file", input, "system file")->required();
  intertwine->add_option("--pair", pair_id, "pair id");
  intertwine->add_option("--depth", depth, "levels to check (default: all)");

  StageOpts so;
  std::string epsilon;
  int max_m = -1;
  auto add_stage_opts = [&](CLI::App* c) {
    c->add_option("--system", so.system, "system id");
    c->add_option("--level", so.level, "base level n");
    c->add_option("--depth", so.depth, "depth m");
    c->add_option("--samples", so.samples, "samples of level n+m to use (0: all)");
    c->add_option("--view-base", so.view_base, "level whose orbits are reported (default n)");
    c->add_flag("--untwist", so.untwist, "replace line bundles by trivial ones first");
  };
  auto* groupoid = app.add_subcommand("groupoid", "groupoid stage, orbits and density diagnostic");
  groupoid->add_option("file", input, "system file")->required();
  add_stage_opts(groupoid);
  groupoid->add_option("--epsilon", epsilon, "run the density diagnostic at this resolution");
  groupoid->add_option("--max-m", max_m, "deepest m for the density diagnostic (default --depth)");

  bool dot = false, csv = false, stage = false;
  auto* exp = app.add_subcommand("export", "DOT and CSV files");
  exp->add_option("file", input, "system file")->required();
  exp->add_flag("--dot", dot, "graphs (and the stage) as DOT");
  exp->add_flag("--csv", csv, "MH witnesses (and orbits) as CSV");
  exp->add_flag("--stage", stage, "also export a groupoid stage");
  add_stage_opts(exp);

  GenerateOpts go;
  auto* gen = app.add_subcommand("generate", "write a generated example as a system file");
  gen->add_option("--kind", go.kind, "goodearl | villadsen1 | villadsen2 | dynamics | schedule")->required();
  gen->add_option("--id", go.id, "system or pair id (default: the kind)");
  gen->add_option("--output", go.output, "file name in the output directory");
  gen->add_option("--levels", go.levels, "number of levels");
  gen->add_option("--s", go.s, "entries per step (goodearl, dynamics)");
  gen->add_option("--points", go.points, "goodearl points: 'dense' or a constant rational");
  gen->add_option("--copies", go.copies, "villadsen coordinate projections per step");
  gen->add_option("--constants", go.constants, "villadsen constant entries per step");
  gen->add_option("--first-power", go.first_power, "villadsen power at level 1");
  gen->add_option("--sigma", go.sigma, "dynamics map: tent | flip");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }

  Run run;
  run.command = app.get_subcommands().front()->get_name();
  run.report["command"] = run.command;
  if (!input.empty()) run.report["input"] = input;
  int code = kPass;
  try {
    if (run.command == "generate") {
      cmd_generate(run, go);
    } else {
      Document doc = read_document(input);
      if (run.command == "check") cmd_check(run, doc);
      if (run.command == "perturb") cmd_perturb(run, std::move(doc), po);
      if (run.command == "intertwine") cmd_intertwine(run, doc, pair_id, depth);
      if (run.command == "groupoid") cmd_groupoid(run, doc, so, epsilon, max_m);
      if (run.command == "export") cmd_export(run, doc, dot, csv, stage, so);
    }
    code = run.ok ? kPass : kCheckFailure;
  } catch (const SchemaError& e) {
    code = kIo;
    Json issues = Json::array();
    for (const auto& i : e.issues()) issues.push_back({{"line", i.line}, {"message", i.message}});
    run.report["issues"] = issues;
    std::cerr << input << ":\n" << e.what() << '\n';
  } catch (const IoError& e) {
    code = kIo;
    run.report["error"] = e.what();
    std::cerr << "error: " << e.what() << '\n';
  } catch (const ParameterError& e) {
    code = kUsage;
    run.report["error"] = e.what();
    std::cerr << "parameter error: " << e.what() << '\n';
  } catch (const Error& e) {
    code = kCheckFailure;
    run.report["error"] = e.what();
    std::cerr << "error: " << e.what() << '\n';
  }
  run.report["status"] = code == kPass ? "pass" : code == kCheckFailure ? "fail" : "error";
  run.report["exit"] = code;
  std::cout << run.text.str();
  try {
    write_file(out_dir() / (run.command + ".json"), run.report.dump(2) + "\n");
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return code;
}

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

#include "ahdiag/textio.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace ahdiag {

namespace {

std::string join_issues(const std::vector<SchemaIssue>& issues) {
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += "\n";
    out += "line " + std::to_string(i.line) + ": " + i.message;
  }
  return out;
}

template <typename T>
const T* find_named(const std::vector<std::pair<std::string, T>>& list, const std::string& id) {
  for (const auto& [k, v] : list) {
    if (k == id) return &v;
  }
  return nullptr;
}

}  // namespace

SchemaError::SchemaError(std::vector<SchemaIssue> issues)
    : Error(join_issues(issues)), issues_(std::move(issues)) {}

GraphPtr Document::graph(const std::string& id) const {
  for (const auto& g : graphs) {
    if (g->name() == id) return g;
  }
  for (const auto& t : trees) {
    if (t.id == id) return t.tree.tree;
  }
  throw DomainError("unknown graph '" + id + "'");
}

const PLMap& Document::map(const std::string& id) const {
  if (const auto* m = find_named(maps, id)) return *m;
  throw DomainError("unknown map '" + id + "'");
}

const TreeDecl& Document::tree(const std::string& id) const {
  for (const auto& t : trees) {
    if (t.id == id) return t;
  }
  throw DomainError("unknown tree '" + id + "'");
}

const Block& Document::block(const std::string& id) const {
  if (const auto* b = find_named(blocks, id)) return *b;
  throw DomainError("unknown block '" + id + "'");
}

const FormDecl& Document::form(const std::string& id) const {
  for (const auto& f : forms) {
    if (f.id == id) return f;
  }
  throw DomainError("unknown diagform '" + id + "'");
}

const Element& Document::element(const std::string& id) const {
  for (const auto& e : elements) {
    if (e.id == id) return e.element;
  }
  throw DomainError("unknown element '" + id + "'");
}

const GenDiagSystem& Document::system(const std::string& id) const {
  if (const auto* s = find_named(systems, id)) return *s;
  throw DomainError("unknown system '" + id + "'");
}

FiniteSystemPair Document::pair(const std::string& id) const {
  for (const auto& p : pairs) {
    if (p.id != id) continue;
    FiniteSystemPair out;
    for (const auto& b : p.levels) out.levels.push_back(block(b));
    for (const auto& f : p.phi) out.phi.push_back(form(f).form);
    for (const auto& f : p.psi) out.psi.push_back(form(f).form);
    for (const auto& g : p.gens) {
      std::vector<Element> set;
      for (const auto& e : g) set.push_back(element(e));
      out.generators.push_back(std::move(set));
    }
    return out;
  }
  throw DomainError("unknown pair '" + id + "'");
}

const std::string* Document::param(const std::string& key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

void Document::add_graph(const GraphPtr& g) {
  for (const auto& h : graphs) {
    if (h->name() == g->name()) {
      if (!h->same_structure(*g)) throw DomainError("two different graphs named '" + g->name() + "'");
      return;
    }
  }
  for (const auto& t : trees) {
    if (t.id == g->name()) return;
  }
  graphs.push_back(g);
}

void Document::add_block(const std::string& id, const Block& b) {
  for (const auto& s : b.summands()) add_graph(s.base);
  for (const auto& [k, v] : blocks) {
    if (k == id) {
      if (!same_block(v, b)) throw DomainError("two different blocks named '" + id + "'");
      return;
    }
  }
  blocks.push_back({id, b});
}

void Document::add_form(const std::string& id, const std::string& source, const std::string& target,
                        const DiagonalForm& form) {
  FormDecl d{id, source, target, {}, {}, form};
  for (const auto& t : form.targets()) {
    const CoveringTree& ct = t.tree;
    add_graph(ct.base);
    const std::string name = ct.tree->name();
    bool known = false;
    for (const auto& decl : trees) {
      if (decl.id != name) continue;
      if (!decl.tree.tree->same_structure(*ct.tree)) throw DomainError("two different trees named '" + name + "'");
      known = true;
    }
    for (const auto& g : graphs) {
      if (g->name() == name) throw DomainError("tree name '" + name + "' is already a graph");
    }
    if (!known) trees.push_back({name, ct.base->name(), ct.radius, build_covering_tree(ct.base, ct.radius, name)});
    d.trees.push_back(name);
  }
  add_form_like(d, id, form);
}

void Document::add_element(const std::string& id, const std::string& block, const Element& e) {
  elements.erase(std::remove_if(elements.begin(), elements.end(), [&](const auto& x) { return x.id == id; }),
                 elements.end());
  elements.push_back({id, block, e});
}

void Document::add_pair(const std::string& id, const FiniteSystemPair& p) {
  PairDecl d;
  d.id = id;
  for (size_t n = 0; n < p.levels.size(); ++n) {
    d.levels.push_back(id + ".A" + std::to_string(n + 1));
    add_block(d.levels.back(), p.levels[n]);
  }
  for (size_t n = 0; n < p.phi.size(); ++n) {
    d.phi.push_back(id + ".phi" + std::to_string(n + 1));
    add_form(d.phi.back(), d.levels.at(n), d.levels.at(n + 1), p.phi[n]);
  }
  for (size_t n = 0; n < p.psi.size(); ++n) {
    d.psi.push_back(id + ".psi" + std::to_string(n + 1));
    add_form(d.psi.back(), d.levels.at(n), d.levels.at(n + 1), p.psi[n]);
  }
  for (size_t n = 0; n < p.generators.size(); ++n) {
    std::vector<std::string> names;
    for (size_t k = 0; k < p.generators[n].size(); ++k) {
      names.push_back(id + ".g" + std::to_string(n + 1) + "." + std::to_string(k));
      add_element(names.back(), d.levels.at(n), p.generators[n][k]);
    }
    d.gens.push_back(std::move(names));
  }
  pairs.erase(std::remove_if(pairs.begin(), pairs.end(), [&](const auto& x) { return x.id == id; }), pairs.end());
  pairs.push_back(std::move(d));
}

void Document::add_form_like(const FormDecl& like, const std::string& id, const DiagonalForm& form) {
  FormDecl d{id, like.source, like.target, like.trees, {}, form};
  for (int i = 0; i < form.target().count(); ++i) {
    std::vector<std::string> names;
    for (size_t s = 0; s < form.at(i).entries.size(); ++s) {
      std::string name = id + "." + std::to_string(i) + "." + std::to_string(s);
      maps.erase(std::remove_if(maps.begin(), maps.end(), [&](const auto& m) { return m.first == name; }),
                 maps.end());
      maps.push_back({name, form.at(i).entries[s].map});
      names.push_back(std::move(name));
    }
    d.entry_maps.push_back(std::move(names));
  }
  forms.erase(std::remove_if(forms.begin(), forms.end(), [&](const FormDecl& f) { return f.id == id; }),
              forms.end());
  forms.push_back(std::move(d));
}

void Document::add_system(const std::string& id, GenDiagSystem sys) {
  for (const auto& level : sys.levels) {
    for (const auto& c : level.components) {
      for (const auto& g : c->factors()) add_graph(g);
    }
  }
  for (int n = 1; n < sys.level_count(); ++n) {
    auto& entries = sys.steps[n - 1].entries;
    for (size_t y = 0; y < entries.size(); ++y) {
      auto atoms = entries[y].lambda.atoms();
      int fresh = 0;
      bool changed = false;
      for (auto& a : atoms) {
        if (a.kind() != MapExpr::Kind::kPL) continue;
        std::string label = a.label();
        if (label.empty()) {
          label = id + "." + std::to_string(n) + "." + std::to_string(y) +
                  (fresh++ ? "." + std::to_string(fresh) : "");
          a = MapExpr::pl(a.plmap(), label);
          changed = true;
        }
        add_graph(a.plmap().domain());
        add_graph(a.plmap().codomain());
        if (!find_named(maps, label)) maps.push_back({label, a.plmap()});
      }
      if (changed) {
        MapExpr e = atoms[0];
        for (size_t k = 1; k < atoms.size(); ++k) e = MapExpr::compose(atoms[k], e);
        entries[y].lambda = e;
      }
    }
  }
  systems.erase(std::remove_if(systems.begin(), systems.end(), [&](const auto& s) { return s.first == id; }),
                systems.end());
  systems.push_back({id, std::move(sys)});
}

GraphPoint parse_point(const Graph& g, std::string_view token) {
  const size_t colon = token.rfind(':');
  if (colon == std::string_view::npos) {
    throw DomainError("point '" + std::string(token) + "' is not <edge>:<coord>");
  }
  const std::string edge(token.substr(0, colon));
  auto e = g.find_edge(edge);
  if (!e) throw DomainError("graph '" + g.name() + "' has no edge '" + edge + "'");
  return g.point(*e, parse_rational(token.substr(colon + 1)));
}

std::string point_token(const Graph& g, const GraphPoint& p) {
  return g.edge(p.edge).id + ":" + to_string(p.coord);
}

namespace {

struct Line {
  int no = 0;
  std::vector<std::string> tok;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  int no = 0;
  size_t at = 0;
  while (at <= text.size()) {
    size_t nl = text.find('\n', at);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(at, nl - at);
    ++no;
    at = nl + 1;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::istringstream in{std::string(raw)};
    Line line{no, {}};
    for (std::string t; in >> t;) line.tok.push_back(t);
    if (!line.tok.empty()) out.push_back(std::move(line));
    if (nl == text.size()) break;
  }
  return out;
}

int parse_int(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw DomainError(std::string(what) + " must be an integer, found '" + s + "'");
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(tokenize(text)) {}

  Document run() {
    if (lines_.empty() || lines_[0].tok != std::vector<std::string>{"ahdiag", "1"}) {
      issue(lines_.empty() ? 1 : lines_[0].no, "expected header 'ahdiag 1'");
      throw SchemaError(issues_);
    }
    for (pos_ = 1; pos_ < lines_.size();) {
      const Line& head = lines_[pos_];
      const std::string& kw = head.tok[0];
      if (kw == "param") {
        guard(head, [&] {
          arity(head, 3, 3);
          doc_.params.push_back({head.tok[1], head.tok[2]});
        });
        ++pos_;
      } else if (kw == "tree") {
        guard(head, [&] { tree(head); });
        ++pos_;
      } else if (kw == "graph" || kw == "map" || kw == "block" || kw == "diagform" ||
                 kw == "element" || kw == "system" || kw == "pair") {
        auto body = stanza();
        if (!body) continue;
        guard(head, [&] {
          if (kw == "graph") graph(head, *body);
          if (kw == "map") map(head, *body);
          if (kw == "block") block(head, *body);
          if (kw == "diagform") diagform(head, *body);
          if (kw == "element") element(head, *body);
          if (kw == "system") system(head, *body);
          if (kw == "pair") pair(head, *body);
        });
      } else {
        issue(head.no, "unknown section '" + kw + "'");
        ++pos_;
      }
    }
    if (!issues_.empty()) throw SchemaError(issues_);
    return std::move(doc_);
  }

 private:
  void issue(int line, std::string msg) { issues_.push_back({line, std::move(msg)}); }

  // Runs fn; any library error becomes an issue on `at`, unless the body
  // already recorded a more precise one.
  void guard(const Line& at, const std::function<void()>& fn) {
    const size_t before = issues_.size();
    try {
      fn();
    } catch (const SchemaError&) {
    } catch (const Error& e) {
      if (issues_.size() == before) issue(at.no, e.what());
    }
  }

  // Precise failure inside a stanza body.
  [[noreturn]] void fail(const Line& at, const std::string& msg) {
    issue(at.no, msg);
    throw SchemaError({});
  }

  void arity(const Line& l, size_t lo, size_t hi) {
    if (l.tok.size() < lo || l.tok.size() > hi) {
      fail(l, "'" + l.tok[0] + "' expects " +
                  (lo == hi ? std::to_string(lo - 1) : std::to_string(lo - 1) + ".." + std::to_string(hi - 1)) +
                  " fields, found " + std::to_string(l.tok.size() - 1));
    }
  }

  void fresh_id(const Line& l, const std::string& id, bool taken) {
    if (taken) fail(l, "duplicate id '" + id + "'");
  }

  // Body lines up to the matching 'end'; nothing if the file ends first.
  std::optional<std::vector<Line>> stanza() {
    const Line& head = lines_[pos_];
    std::vector<Line> body;
    for (++pos_; pos_ < lines_.size(); ++pos_) {
      if (lines_[pos_].tok[0] == "end") {
        ++pos_;
        return body;
      }
      body.push_back(lines_[pos_]);
    }
    issue(head.no, "'" + head.tok[0] + "' section is missing 'end'");
    return std::nullopt;
  }

  template <typename Fn>
  auto at(const Line& l, Fn fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const SchemaError&) {
      throw;
    } catch (const Error& e) {
      fail(l, e.what());
    }
  }

  void graph(const Line& head, const std::vector<Line>& body) {
    arity(head, 2, 2);
    const std::string& id = head.tok[1];
    fresh_id(head, id, any_graph(id));
    std::vector<std::string> vertices;
    std::vector<EdgeSpec> edges;
    for (const auto& l : body) {
      if (l.tok[0] == "vertices") {
        vertices.insert(vertices.end(), l.tok.begin() + 1, l.tok.end());
      } else if (l.tok[0] == "edge") {
        arity(l, 4, 5);
        Rational len = l.tok.size() == 5 ? at(l, [&] { return parse_rational(l.tok[4]); }) : Rational(1);
        edges.push_back({l.tok[1], l.tok[2], l.tok[3], len});
      } else {
        fail(l, "unexpected '" + l.tok[0] + "' in graph");
      }
    }
    doc_.graphs.push_back(make_graph(id, vertices, edges));
  }

  bool any_graph(const std::string& id) const {
    for (const auto& g : doc_.graphs) {
      if (g->name() == id) return true;
    }
    for (const auto& t : doc_.trees) {
      if (t.id == id) return true;
    }
    return false;
  }

  GraphPtr graph_ref(const Line& l, const std::string& id) {
    return at(l, [&] { return doc_.graph(id); });
  }

  void tree(const Line& l) {
    arity(l, 4, 4);
    const std::string& id = l.tok[1];
    fresh_id(l, id, any_graph(id));
    GraphPtr base = graph_ref(l, l.tok[2]);
    const int radius = at(l, [&] { return parse_int(l.tok[3], "radius"); });
    doc_.trees.push_back({id, l.tok[2], radius, at(l, [&] { return build_covering_tree(base, radius, id); })});
  }

  void map(const Line& head, const std::vector<Line>& body) {
    arity(head, 4, 4);
    const std::string& id = head.tok[1];
    fresh_id(head, id, find_named(doc_.maps, id) != nullptr);
    GraphPtr dom = graph_ref(head, head.tok[2]);
    GraphPtr cod = graph_ref(head, head.tok[3]);
    std::vector<std::vector<Piece>> pieces(dom->edge_count());
    for (const auto& l : body) {
      if (l.tok[0] != "piece") fail(l, "unexpected '" + l.tok[0] + "' in map");
      arity(l, 7, 7);
      at(l, [&] {
        auto e = dom->find_edge(l.tok[1]);
        if (!e) throw DomainError("graph '" + dom->name() + "' has no edge '" + l.tok[1] + "'");
        auto te = cod->find_edge(l.tok[4]);
        if (!te) throw DomainError("graph '" + cod->name() + "' has no edge '" + l.tok[4] + "'");
        pieces[*e].push_back(Piece{parse_rational(l.tok[2]), parse_rational(l.tok[3]), *te,
                                   parse_rational(l.tok[5]), parse_rational(l.tok[6])});
        return 0;
      });
    }
    doc_.maps.push_back({id, PLMap(dom, cod, std::move(pieces))});
  }

  void block(const Line& head, const std::vector<Line>& body) {
    arity(head, 2, 2);
    fresh_id(head, head.tok[1], find_named(doc_.blocks, head.tok[1]) != nullptr);
    std::vector<Summand> sums;
    for (const auto& l : body) {
      if (l.tok[0] != "summand") fail(l, "unexpected '" + l.tok[0] + "' in block");
      arity(l, 3, 3);
      sums.push_back(Summand{graph_ref(l, l.tok[1]), at(l, [&] { return parse_int(l.tok[2], "size"); })});
    }
    doc_.blocks.push_back({head.tok[1], Block(std::move(sums))});
  }

  void diagform(const Line& head, const std::vector<Line>& body) {
    arity(head, 4, 4);
    const std::string& id = head.tok[1];
    bool taken = false;
    for (const auto& f : doc_.forms) taken = taken || f.id == id;
    fresh_id(head, id, taken);
    const Block& src = at(head, [&]() -> const Block& { return doc_.block(head.tok[2]); });
    const Block& tgt = at(head, [&]() -> const Block& { return doc_.block(head.tok[3]); });
    const int count = tgt.count();
    std::vector<std::string> trees(count);
    std::vector<std::vector<std::string>> maps(count);
    std::vector<std::vector<DiagEntry>> entries(count);
    for (const auto& l : body) {
      if (l.tok[0] == "target") {
        arity(l, 3, 3);
        const int i = at(l, [&] { return parse_int(l.tok[1], "target index"); });
        if (i < 0 || i >= count) fail(l, "target index " + l.tok[1] + " out of range");
        at(l, [&] { return doc_.tree(l.tok[2]).radius; });
        trees[i] = l.tok[2];
      } else if (l.tok[0] == "entry") {
        arity(l, 4, 4);
        const int i = at(l, [&] { return parse_int(l.tok[1], "target index"); });
        if (i < 0 || i >= count) fail(l, "target index " + l.tok[1] + " out of range");
        const int j = at(l, [&] { return parse_int(l.tok[2], "source summand"); });
        entries[i].push_back(DiagEntry{j, at(l, [&] { return doc_.map(l.tok[3]); })});
        maps[i].push_back(l.tok[3]);
      } else {
        fail(l, "unexpected '" + l.tok[0] + "' in diagform");
      }
    }
    std::vector<TargetData> data;
    for (int i = 0; i < count; ++i) {
      if (trees[i].empty()) fail(head, "diagform target " + std::to_string(i) + " has no tree");
      data.push_back(TargetData{doc_.tree(trees[i]).tree, entries[i]});
    }
    doc_.forms.push_back({id, head.tok[2], head.tok[3], trees, maps, DiagonalForm(src, tgt, std::move(data))});
  }

  void element(const Line& head, const std::vector<Line>& body) {
    arity(head, 3, 3);
    bool taken = false;
    for (const auto& e : doc_.elements) taken = taken || e.id == head.tok[1];
    fresh_id(head, head.tok[1], taken);
    const Block& b = at(head, [&]() -> const Block& { return doc_.block(head.tok[2]); });
    std::vector<Element::SummandKnots> knots;
    for (int j = 0; j < b.count(); ++j) knots.emplace_back(b.summand(j).base->edge_count());
    for (const auto& l : body) {
      if (l.tok[0] != "value") fail(l, "unexpected '" + l.tok[0] + "' in element");
      if (l.tok.size() < 4) fail(l, "'value' needs summand, edge, coordinate and entries");
      at(l, [&] {
        const int j = parse_int(l.tok[1], "summand");
        if (j < 0 || j >= b.count()) throw DomainError("summand " + l.tok[1] + " out of range");
        const Graph& g = *b.summand(j).base;
        auto e = g.find_edge(l.tok[2]);
        if (!e) throw DomainError("graph '" + g.name() + "' has no edge '" + l.tok[2] + "'");
        const int n = b.summand(j).size;
        if (static_cast<int>(l.tok.size()) != 4 + n * n) {
          throw DomainError("value needs " + std::to_string(n * n) + " matrix entries, found " +
                            std::to_string(l.tok.size() - 4));
        }
        CMatrix m(n);
        for (int r = 0; r < n; ++r) {
          for (int c = 0; c < n; ++c) m(r, c) = parse_complex(l.tok[4 + r * n + c]);
        }
        knots[j][*e].push_back(Knot{parse_rational(l.tok[3]), std::move(m)});
        return 0;
      });
    }
    for (auto& s : knots) {
      for (auto& e : s) {
        std::stable_sort(e.begin(), e.end(), [](const Knot& x, const Knot& y) { return x.t < y.t; });
      }
    }
    doc_.elements.push_back({head.tok[1], head.tok[2], Element(b, std::move(knots))});
  }

  SpacePoint space_point(const Line& l, const Space& s, size_t from) {
    if (l.tok.size() - from != static_cast<size_t>(s.arity())) {
      fail(l, "point needs " + std::to_string(s.arity()) + " coordinates, found " +
                  std::to_string(l.tok.size() - from));
    }
    SpacePoint p;
    for (int k = 0; k < s.arity(); ++k) p.push_back(at(l, [&] { return parse_point(*s.factor(k), l.tok[from + k]); }));
    return p;
  }

  MapExpr expr(const Line& l, size_t from, const SpacePtr& dom, const SpacePtr& cod) {
    std::vector<std::vector<std::string>> atoms{{}};
    for (size_t k = from; k < l.tok.size(); ++k) {
      if (l.tok[k] == "o") {
        atoms.emplace_back();
      } else {
        atoms.back().push_back(l.tok[k]);
      }
    }
    for (const auto& a : atoms) {
      if (a.empty()) fail(l, "empty map expression term");
    }
    SpacePtr cur = dom;
    std::optional<MapExpr> out;
    for (size_t idx = atoms.size(); idx-- > 0;) {
      const auto& a = atoms[idx];
      const bool outermost = idx == 0;
      std::optional<MapExpr> atom;
      if (a[0] == "id" && a.size() == 1) {
        atom = MapExpr::identity(cur);
      } else if (a[0] == "const") {
        if (!outermost) fail(l, "'const' must be the outermost term");
        Line pts{l.no, a};
        atom = at(l, [&] { return MapExpr::constant(cur, cod, space_point(pts, *cod, 1)); });
      } else if (a[0] == "pl" && a.size() == 2) {
        const PLMap& f = at(l, [&]() -> const PLMap& { return doc_.map(a[1]); });
        atom = MapExpr::pl(f, a[1]);
        if (!same_space(*atom->domain(), *cur)) {
          fail(l, "map '" + a[1] + "' does not start on " + cur->describe());
        }
      } else if (a[0] == "proj" && a.size() == 2) {
        std::vector<int> idxs;
        std::stringstream in(a[1]);
        for (std::string part; std::getline(in, part, ',');) idxs.push_back(at(l, [&] { return parse_int(part, "projection index"); }));
        SpacePtr target;
        if (outermost) {
          target = cod;
        } else if (atoms[idx - 1][0] == "pl" && atoms[idx - 1].size() == 2) {
          target = Space::graph(at(l, [&]() -> const PLMap& { return doc_.map(atoms[idx - 1][1]); }).domain());
        } else {
          std::vector<SpacePtr> fs;
          for (int k : idxs) {
            if (k < 0 || k >= cur->arity()) fail(l, "projection index " + std::to_string(k) + " out of range");
            fs.push_back(Space::graph(cur->factor(k)));
          }
          target = Space::product(fs);
        }
        atom = at(l, [&] { return MapExpr::projection(cur, target, idxs); });
      } else {
        fail(l, "unknown map term '" + a[0] + "'");
      }
      out = out ? at(l, [&] { return MapExpr::compose(*atom, *out); }) : *atom;
      cur = atom->codomain();
    }
    return *out;
  }

  void system(const Line& head, const std::vector<Line>& body) {
    arity(head, 2, 2);
    fresh_id(head, head.tok[1], find_named(doc_.systems, head.tok[1]) != nullptr);
    GenDiagSystem sys;
    sys.name = head.tok[1];
    auto level_at = [&](const Line& l, const std::string& tok) -> Level& {
      const int n = at(l, [&] { return parse_int(tok, "level"); });
      if (n < 1 || n > sys.level_count()) fail(l, "level " + tok + " is not declared");
      return sys.levels[n - 1];
    };
    for (const auto& l : body) {
      const std::string& kw = l.tok[0];
      if (kw == "level") {
        arity(l, 3, 3);
        const int n = at(l, [&] { return parse_int(l.tok[1], "level"); });
        if (n != sys.level_count() + 1) fail(l, "levels must be declared in order 1, 2, ...");
        sys.levels.push_back(Level{{}, at(l, [&] { return parse_int(l.tok[2], "rank"); })});
      } else if (kw == "component") {
        arity(l, 4, 5);
        Level& lv = level_at(l, l.tok[1]);
        GraphPtr g = graph_ref(l, l.tok[3]);
        if (l.tok[2] == "graph" && l.tok.size() == 4) {
          lv.components.push_back(at(l, [&] { return Space::graph(g); }));
        } else if (l.tok[2] == "power" && l.tok.size() == 5) {
          const int k = at(l, [&] { return parse_int(l.tok[4], "power"); });
          lv.components.push_back(at(l, [&] { return Space::power(g, k); }));
        } else {
          fail(l, "component kind must be 'graph <g>' or 'power <g> <k>'");
        }
      } else if (kw == "sample") {
        if (l.tok.size() < 4) fail(l, "'sample' needs level, component and a point");
        Level& lv = level_at(l, l.tok[1]);
        const int c = at(l, [&] { return parse_int(l.tok[2], "component"); });
        if (c < 0 || c >= static_cast<int>(lv.components.size())) fail(l, "component " + l.tok[2] + " is not declared");
        auto& pending = samples_[{&lv - sys.levels.data(), c}];
        pending.push_back(space_point(l, *lv.components[c], 3));
      } else if (kw == "step") {
        arity(l, 3, 3);
        const int n = at(l, [&] { return parse_int(l.tok[1], "step"); });
        if (n != static_cast<int>(sys.steps.size()) + 1) fail(l, "steps must be declared in order 1, 2, ...");
        sys.steps.push_back(Step{at(l, [&] { return parse_int(l.tok[2], "s"); }), {}});
      } else if (kw == "y") {
        if (l.tok.size() < 6) fail(l, "'y' needs level, component, lands_in, bundle and a map");
        const int n = at(l, [&] { return parse_int(l.tok[1], "step"); });
        if (n < 1 || n > static_cast<int>(sys.steps.size()) || n >= sys.level_count()) {
          fail(l, "step " + l.tok[1] + " is not declared");
        }
        apply_samples(sys);
        const int j = at(l, [&] { return parse_int(l.tok[2], "component"); });
        const int c = at(l, [&] { return parse_int(l.tok[3], "lands_in"); });
        const auto& up = sys.level(n + 1).components;
        const auto& down = sys.level(n).components;
        if (j < 0 || j >= static_cast<int>(up.size())) fail(l, "component " + l.tok[2] + " is not declared");
        if (c < 0 || c >= static_cast<int>(down.size())) fail(l, "component " + l.tok[3] + " is not declared");
        Bundle b;
        const std::string& bt = l.tok[4];
        if (bt.rfind("trivial:", 0) == 0) {
          b = Bundle::trivial(at(l, [&] { return parse_int(bt.substr(8), "slot"); }));
        } else if (bt.rfind("line:", 0) == 0 && bt.size() > 5) {
          b = Bundle::symbolic(bt.substr(5));
        } else {
          fail(l, "bundle must be trivial:<slot> or line:<tag>");
        }
        sys.steps[n - 1].entries.push_back(StepEntry{expr(l, 5, up[j], down[c]), j, c, b});
      } else {
        fail(l, "unexpected '" + kw + "' in system");
      }
    }
    apply_samples(sys);
    at(head, [&] {
      validate_structure(sys);
      return 0;
    });
    doc_.systems.push_back({head.tok[1], std::move(sys)});
  }

  void apply_samples(GenDiagSystem& sys) {
    for (auto& [key, pts] : samples_) {
      auto& comp = sys.levels[key.first].components[key.second];
      comp = comp->with_samples(pts);
    }
    samples_.clear();
  }

  void pair(const Line& head, const std::vector<Line>& body) {
    arity(head, 2, 2);
    bool taken = false;
    for (const auto& p : doc_.pairs) taken = taken || p.id == head.tok[1];
    fresh_id(head, head.tok[1], taken);
    PairDecl p;
    p.id = head.tok[1];
    auto slot = [&](const Line& l, std::vector<std::string>& list) -> std::string& {
      const int n = at(l, [&] { return parse_int(l.tok[1], "level"); });
      if (n < 1) fail(l, "levels start at 1");
      if (static_cast<int>(list.size()) < n) list.resize(n);
      return list[n - 1];
    };
    for (const auto& l : body) {
      const std::string& kw = l.tok[0];
      if (kw == "level") {
        arity(l, 3, 3);
        at(l, [&]() -> const Block& { return doc_.block(l.tok[2]); });
        slot(l, p.levels) = l.tok[2];
      } else if (kw == "phi" || kw == "psi") {
        arity(l, 3, 3);
        at(l, [&]() -> const FormDecl& { return doc_.form(l.tok[2]); });
        slot(l, kw == "phi" ? p.phi : p.psi) = l.tok[2];
      } else if (kw == "gens") {
        if (l.tok.size() < 2) fail(l, "'gens' needs a level");
        const int n = at(l, [&] { return parse_int(l.tok[1], "level"); });
        if (n < 1) fail(l, "levels start at 1");
        if (static_cast<int>(p.gens.size()) < n) p.gens.resize(n);
        for (size_t k = 2; k < l.tok.size(); ++k) {
          at(l, [&]() -> const Element& { return doc_.element(l.tok[k]); });
          p.gens[n - 1].push_back(l.tok[k]);
        }
      } else {
        fail(l, "unexpected '" + kw + "' in pair");
      }
    }
    for (const auto* list : {&p.levels, &p.phi, &p.psi}) {
      for (const auto& s : *list) {
        if (s.empty()) fail(head, "pair '" + p.id + "' skips a level");
      }
    }
    doc_.pairs.push_back(std::move(p));
  }

  std::vector<Line> lines_;
  size_t pos_ = 0;
  Document doc_;
  std::vector<SchemaIssue> issues_;
  std::map<std::pair<long, int>, std::vector<SpacePoint>> samples_;
};

std::string space_point_tokens(const Space& s, const SpacePoint& p) {
  std::string out;
  for (int k = 0; k < s.arity(); ++k) out += " " + point_token(*s.factor(k), p[k]);
  return out;
}

std::string expr_text(const MapExpr& e) {
  auto atoms = e.atoms();
  std::string out;
  for (size_t k = atoms.size(); k-- > 0;) {
    const MapExpr& a = atoms[k];
    if (!out.empty()) out += " o ";
    switch (a.kind()) {
      case MapExpr::Kind::kIdentity:
        out += "id";
        break;
      case MapExpr::Kind::kConstant:
        out += "const" + space_point_tokens(*a.codomain(), a.value());
        break;
      case MapExpr::Kind::kPL:
        if (a.label().empty()) throw DomainError("cannot write an unlabelled PL map; register the system first");
        out += "pl " + a.label();
        break;
      case MapExpr::Kind::kProjection: {
        out += "proj ";
        for (size_t i = 0; i < a.indices().size(); ++i) out += (i ? "," : "") + std::to_string(a.indices()[i]);
        break;
      }
      case MapExpr::Kind::kComposite:
        break;
    }
  }
  return out;
}

bool default_samples(const Space& s) {
  SpacePtr fresh;
  if (s.is_product()) {
    std::vector<SpacePtr> fs;
    for (const auto& g : s.factors()) fs.push_back(Space::graph(g));
    fresh = Space::product(fs);
  } else {
    fresh = Space::graph(s.factor(0));
  }
  return fresh->samples() == s.samples();
}

}  // namespace

Document parse_document(std::string_view text) { return Parser(text).run(); }

Document read_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return parse_document(s.str());
}

std::string serialize(const Document& doc) {
  std::ostringstream out;
  out << "ahdiag 1\n";
  for (const auto& [k, v] : doc.params) out << "param " << k << ' ' << v << '\n';
  for (const auto& g : doc.graphs) {
    out << "\ngraph " << g->name() << "\n  vertices";
    for (int v = 0; v < g->vertex_count(); ++v) out << ' ' << g->vertex_id(v);
    out << '\n';
    for (const auto& e : g->edges()) {
      out << "  edge " << e.id << ' ' << g->vertex_id(e.tail) << ' ' << g->vertex_id(e.head) << ' '
          << to_string(e.length) << '\n';
    }
    out << "end\n";
  }
  if (!doc.trees.empty()) out << '\n';
  for (const auto& t : doc.trees) out << "tree " << t.id << ' ' << t.base << ' ' << t.radius << '\n';
  for (const auto& [id, f] : doc.maps) {
    out << "\nmap " << id << ' ' << f.domain()->name() << ' ' << f.codomain()->name() << '\n';
    for (int e = 0; e < f.domain()->edge_count(); ++e) {
      for (const auto& p : f.pieces(e)) {
        out << "  piece " << f.domain()->edge(e).id << ' ' << to_string(p.t0) << ' ' << to_string(p.t1) << ' '
            << f.codomain()->edge(p.target).id << ' ' << to_string(p.c0) << ' ' << to_string(p.c1) << '\n';
      }
    }
    out << "end\n";
  }
  for (const auto& [id, b] : doc.blocks) {
    out << "\nblock " << id << '\n';
    for (const auto& s : b.summands()) out << "  summand " << s.base->name() << ' ' << s.size << '\n';
    out << "end\n";
  }
  for (const auto& f : doc.forms) {
    out << "\ndiagform " << f.id << ' ' << f.source << ' ' << f.target << '\n';
    for (size_t i = 0; i < f.trees.size(); ++i) out << "  target " << i << ' ' << f.trees[i] << '\n';
    for (size_t i = 0; i < f.entry_maps.size(); ++i) {
      for (size_t s = 0; s < f.entry_maps[i].size(); ++s) {
        out << "  entry " << i << ' ' << f.form.at(static_cast<int>(i)).entries[s].source << ' '
            << f.entry_maps[i][s] << '\n';
      }
    }
    out << "end\n";
  }
  for (const auto& e : doc.elements) {
    out << "\nelement " << e.id << ' ' << e.block << '\n';
    const Block& b = e.element.block();
    for (int j = 0; j < b.count(); ++j) {
      const Graph& g = *b.summand(j).base;
      for (int ed = 0; ed < g.edge_count(); ++ed) {
        for (const auto& k : e.element.knots(j, ed)) {
          out << "  value " << j << ' ' << g.edge(ed).id << ' ' << to_string(k.t);
          for (int r = 0; r < k.value.size(); ++r) {
            for (int c = 0; c < k.value.size(); ++c) out << ' ' << to_string(k.value(r, c));
          }
          out << '\n';
        }
      }
    }
    out << "end\n";
  }
  for (const auto& [id, sys] : doc.systems) {
    out << "\nsystem " << id << '\n';
    for (int n = 1; n <= sys.level_count(); ++n) out << "  level " << n << ' ' << sys.level(n).rank << '\n';
    for (int n = 1; n <= sys.level_count(); ++n) {
      for (const auto& c : sys.level(n).components) {
        const bool power = c->is_product();
        out << "  component " << n << (power ? " power " : " graph ") << c->factor(0)->name();
        if (power) out << ' ' << c->arity();
        out << '\n';
        for (int k = 1; k < c->arity(); ++k) {
          if (!c->factor(k)->same_structure(*c->factor(0))) {
            throw DomainError("system files only hold powers of a single graph");
          }
        }
      }
    }
    for (int n = 1; n <= sys.level_count(); ++n) {
      const auto& comps = sys.level(n).components;
      for (size_t c = 0; c < comps.size(); ++c) {
        if (default_samples(*comps[c])) continue;
        for (const auto& p : comps[c]->samples()) {
          out << "  sample " << n << ' ' << c << space_point_tokens(*comps[c], p) << '\n';
        }
      }
    }
    for (int n = 1; n < sys.level_count(); ++n) {
      out << "  step " << n << ' ' << sys.step(n).s << '\n';
      for (const auto& e : sys.step(n).entries) {
        out << "  y " << n << ' ' << e.component << ' ' << e.lands_in << ' '
            << (e.bundle.kind == Bundle::Kind::kTrivial ? "trivial:" + std::to_string(e.bundle.slot)
                                                        : "line:" + e.bundle.tag)
            << ' ' << expr_text(e.lambda) << '\n';
      }
    }
    out << "end\n";
  }
  for (const auto& p : doc.pairs) {
    out << "\npair " << p.id << '\n';
    for (size_t n = 0; n < p.levels.size(); ++n) out << "  level " << n + 1 << ' ' << p.levels[n] << '\n';
    for (size_t n = 0; n < p.phi.size(); ++n) out << "  phi " << n + 1 << ' ' << p.phi[n] << '\n';
    for (size_t n = 0; n < p.psi.size(); ++n) out << "  psi " << n + 1 << ' ' << p.psi[n] << '\n';
    for (size_t n = 0; n < p.gens.size(); ++n) {
      out << "  gens " << n + 1;
      for (const auto& g : p.gens[n]) out << ' ' << g;
      out << '\n';
    }
    out << "end\n";
  }
  return out.str();
}

}  // namespace ahdiag

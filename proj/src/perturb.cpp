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

#include "ahdiag/perturb.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "ahdiag/error.hpp"

namespace ahdiag {

namespace {

// Coordinate of p on `edge` lying in [lo, hi], if p sits on that edge.
std::optional<Rational> coord_on(const Graph& g, const GraphPoint& p, int edge,
                                 const Rational& lo, const Rational& hi) {
  std::vector<Rational> cands;
  if (p.edge == edge) cands.push_back(p.coord);
  if (auto v = g.vertex_of(p)) {
    if (g.edge(edge).tail == *v) cands.push_back(0);
    if (g.edge(edge).head == *v) cands.push_back(g.length(edge));
  }
  for (const auto& c : cands) {
    if (lo <= c && c <= hi) return c;
  }
  return std::nullopt;
}

std::vector<int> copies_over(const CoveringTree& ct, int base_edge) {
  std::vector<int> out;
  for (int te = 0; te < ct.tree->edge_count(); ++te) {
    if (ct.base_edge[te] == base_edge) out.push_back(te);
  }
  return out;
}

bool flips(const CoveringTree& ct, int from, int to) { return ct.reversed[from] != ct.reversed[to]; }

// Does g on tree edge `tk` reproduce f on [lo, hi] of tree edge `te`?
bool same_local(const CoveringTree& ct, const PLMap& f, int te, const PLMap& g, int tk,
                const Rational& lo, const Rational& hi) {
  std::vector<Rational> xs{lo, hi};
  for (const auto& p : f.pieces(te)) {
    for (const Rational& t : {p.t0, p.t1}) {
      if (lo < t && t < hi) xs.push_back(t);
    }
  }
  for (const auto& p : g.pieces(tk)) {
    for (const Rational& t : {p.t0, p.t1}) {
      Rational back = ct.transfer(tk, te, t);
      if (lo < back && back < hi) xs.push_back(back);
    }
  }
  for (const auto& x : xs) {
    if (!(f.eval_at(te, x) == g.eval_at(tk, ct.transfer(te, tk, x)))) return false;
  }
  return true;
}

// Replaces every graft window at once, so that grafts meeting at a vertex
// are validated together.
PLMap with_grafts(const PLMap& f, const std::vector<Graft>& grafts) {
  auto pieces = f.all_pieces();
  for (int e = 0; e < static_cast<int>(pieces.size()); ++e) {
    std::vector<const Graft*> here;
    for (const auto& g : grafts) {
      if (g.tree_edge == e) here.push_back(&g);
    }
    if (here.empty()) continue;
    std::sort(here.begin(), here.end(), [](const Graft* x, const Graft* y) { return x->lo < y->lo; });
    for (size_t k = 1; k < here.size(); ++k) {
      if (here[k]->lo < here[k - 1]->hi) throw DomainError("overlapping graft windows");
    }
    std::vector<Piece> out;
    auto keep = [&](const Rational& a, const Rational& b) {
      for (const auto& p : f.pieces(e)) {
        Rational lo = rmax(p.t0, a), hi = rmin(p.t1, b);
        if (lo < hi) out.push_back(Piece{lo, hi, p.target, p.at(lo), p.at(hi)});
      }
    };
    Rational cursor = 0;
    for (const auto* g : here) {
      keep(cursor, g->lo);
      out.insert(out.end(), g->pieces.begin(), g->pieces.end());
      cursor = g->hi;
    }
    keep(cursor, f.domain()->length(e));
    pieces[e] = std::move(out);
  }
  return PLMap(f.domain(), f.codomain(), std::move(pieces));
}

std::vector<Piece> flipped(const std::vector<Piece>& ps, const Rational& len) {
  std::vector<Piece> out;
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
    out.push_back(Piece{len - it->t1, len - it->t0, it->target, it->c1, it->c0});
  }
  return out;
}

}  // namespace

GapDecomposition gap_decomposition(const DiagonalForm& phi, int j) {
  const auto& z = phi.source().summand(j).base;
  auto cov = source_coverage(phi, j);
  GapDecomposition gd;
  gd.source = j;
  for (const auto& iv : cov.complement_intervals()) {
    Gap g;
    g.interval = iv;
    g.a = z->point(iv.edge, iv.lo);
    g.b = z->point(iv.edge, iv.hi);
    g.a_covered = cov.contains(g.a);
    g.b_covered = cov.contains(g.b);
    gd.gaps.push_back(g);
  }
  gd.uncovered_vertices = cov.uncovered_vertices();
  return gd;
}

std::string to_string(ChainKind k) {
  switch (k) {
    case ChainKind::kLineInterior: return "line_interior";
    case ChainKind::kLineVertexSplit: return "line_vertex_split";
    case ChainKind::kAsteriskVertexInGap: return "asterisk_vertex_in_gap";
    case ChainKind::kAsteriskVertexCovered: return "asterisk_vertex_covered";
  }
  return "?";
}

int ChainStructure::longest() const {
  size_t n = 0;
  for (const auto& c : chains) n = std::max(n, static_cast<size_t>(c.components));
  return static_cast<int>(n);
}

ChainStructure maximal_chains(const GapDecomposition& gd, const Graph& g) {
  const int n = gd.count();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      const auto &p = gd.gaps[x], &q = gd.gaps[y];
      if (p.a == q.a || p.a == q.b || p.b == q.a || p.b == q.b) parent[find(x)] = find(y);
    }
  }
  std::map<int, std::vector<int>> groups;
  for (int x = 0; x < n; ++x) groups[find(x)].push_back(x);

  // Second pass joining only through uncovered vertices.
  auto open_vertex = [&](const GraphPoint& p) {
    auto v = g.vertex_of(p);
    return v && std::find(gd.uncovered_vertices.begin(), gd.uncovered_vertices.end(), *v) !=
                    gd.uncovered_vertices.end();
  };
  std::vector<int> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  auto croot = [&](int x) {
    while (comp[x] != x) x = comp[x] = comp[comp[x]];
    return x;
  };
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      for (const auto* p : {&gd.gaps[x].a, &gd.gaps[x].b}) {
        for (const auto* r : {&gd.gaps[y].a, &gd.gaps[y].b}) {
          if (*p == *r && open_vertex(*p)) comp[croot(x)] = croot(y);
        }
      }
    }
  }

  ChainStructure cs;
  for (auto& [root, members] : groups) {
    std::sort(members.begin(), members.end(), [&](int x, int y) {
      const auto &p = gd.gaps[x].interval, &q = gd.gaps[y].interval;
      return std::tie(p.edge, p.lo) < std::tie(q.edge, q.lo);
    });
    Chain c;
    c.gaps = members;
    std::set<int> roots;
    for (int x : members) roots.insert(croot(x));
    c.components = static_cast<int>(roots.size());
    // Gap ends meeting at each vertex of the closure.
    std::map<int, int> ends;
    for (int x : members) {
      for (const auto* p : {&gd.gaps[x].a, &gd.gaps[x].b}) {
        if (auto v = g.vertex_of(*p)) ++ends[*v];
      }
    }
    for (const auto& [v, count] : ends) {
      const bool uncovered = std::find(gd.uncovered_vertices.begin(), gd.uncovered_vertices.end(),
                                       v) != gd.uncovered_vertices.end();
      ChainKind k = ChainKind::kLineInterior;
      if (uncovered && count >= 3) {
        k = ChainKind::kAsteriskVertexInGap;
      } else if (!uncovered && count >= 3) {
        k = ChainKind::kAsteriskVertexCovered;
      } else if (!uncovered && count == 2) {
        k = ChainKind::kLineVertexSplit;
      }
      if (static_cast<int>(k) > static_cast<int>(c.kind)) c.kind = k, c.vertex = v;
    }
    cs.chains.push_back(std::move(c));
  }
  return cs;
}

namespace {

struct Candidate {
  int target;
  int entry;
  int tree_edge;
  size_t piece;
  Rational t;  // lambda(t) == endpoint
};

// Every (target, entry, tree edge, piece) whose closed image holds `x`.
std::vector<Candidate> anchor_candidates(const DiagonalForm& phi, int j, const GraphPoint& x) {
  const Graph& z = *phi.source().summand(j).base;
  std::vector<Candidate> out;
  for (int i = 0; i < phi.target().count(); ++i) {
    const auto& td = phi.at(i);
    for (int s = 0; s < static_cast<int>(td.entries.size()); ++s) {
      if (td.entries[s].source != j) continue;
      const auto& f = td.entries[s].map;
      for (int te = 0; te < td.tree.tree->edge_count(); ++te) {
        const auto& ps = f.pieces(te);
        for (size_t k = 0; k < ps.size(); ++k) {
          const auto& p = ps[k];
          auto c = coord_on(z, x, p.target, rmin(p.c0, p.c1), rmax(p.c0, p.c1));
          if (!c) continue;
          Rational t = p.constant() ? Rational((p.t0 + p.t1) / 2)
                                    : Rational(p.t0 + (*c - p.c0) / p.slope());
          out.push_back(Candidate{i, s, te, k, t});
        }
      }
    }
  }
  return out;
}

}  // namespace

Anchor select_anchor(const DiagonalForm& phi, int j, const Gap& gap) {
  for (bool from_a : {true, false}) {
    if (!(from_a ? gap.a_covered : gap.b_covered)) continue;
    const GraphPoint& x = from_a ? gap.a : gap.b;
    auto cands = anchor_candidates(phi, j, x);
    if (cands.empty()) continue;
    const auto& c = cands.front();
    return Anchor{c.target, c.entry, c.tree_edge, c.t, x, from_a};
  }
  throw InvalidInput("no eigenvalue function reaches an endpoint of the gap");
}

DiagonalForm descend(const DiagonalForm& phi, int i, const std::vector<Graft>& grafts,
                     std::vector<GraftCopy>* copies) {
  const auto& td = phi.at(i);
  const auto& ct = td.tree;
  // (entry, tree edge) -> pending grafts, all matched on the unmodified form.
  std::map<std::pair<int, int>, std::vector<Graft>> pending;
  for (const auto& g : grafts) {
    const auto& f = td.entries.at(g.entry).map;
    for (int tk : copies_over(ct, ct.base_edge.at(g.tree_edge))) {
      const bool flip = flips(ct, g.tree_edge, tk);
      int match = -1;
      if (tk == g.tree_edge) {
        match = g.entry;
      } else {
        for (int s = 0; s < static_cast<int>(td.entries.size()) && match < 0; ++s) {
          if (td.entries[s].source != td.entries[g.entry].source) continue;
          if (same_local(ct, f, g.tree_edge, td.entries[s].map, tk, g.lo, g.hi)) match = s;
        }
      }
      if (match < 0) {
        throw InvalidInput("no entry over tree edge " + ct.tree->edge(tk).id +
                           " matches the perturbed one; the form does not descend");
      }
      const Rational len = ct.tree->length(tk);
      Graft copy{match, tk, flip ? Rational(len - g.hi) : g.lo, flip ? Rational(len - g.lo) : g.hi,
                 flip ? flipped(g.pieces, len) : g.pieces};
      pending[{match, tk}].push_back(std::move(copy));
      if (copies) copies->push_back(GraftCopy{tk, match, flip});
    }
  }
  auto entries = td.entries;
  std::map<int, std::vector<Graft>> by_entry;
  for (auto& [key, list] : pending) {
    for (auto& g : list) by_entry[key.first].push_back(std::move(g));
  }
  try {
    for (auto& [s, list] : by_entry) entries[s].map = with_grafts(entries[s].map, list);
  } catch (const DomainError& e) {
    throw InvalidInput(std::string("perturbation does not descend: ") + e.what());
  }
  return phi.with_entries(i, std::move(entries));
}

Graft tent_graft(const DiagonalForm& phi, int i, int s, int tree_edge, const Rational& v0,
                 const Rational& v1, const Rational& t_prime, const OpenInterval& gap,
                 bool from_lo) {
  if (!(v0 < t_prime && t_prime < v1)) throw ParameterError("tent apex must lie inside V");
  const auto& entry = phi.at(i).entries.at(s);
  const Graph& z = *phi.source().summand(entry.source).base;
  const auto& f = entry.map;
  const Piece& p = f.pieces(tree_edge)[f.piece_index(tree_edge, (v0 + v1) / 2)];
  if (v0 < p.t0 || v1 > p.t1) throw ParameterError("tent window must sit inside one piece");
  const Rational from_gap = from_lo ? gap.lo : gap.hi;
  const Rational to_gap = from_lo ? gap.hi : gap.lo;
  auto from_near = coord_on(z, z.point(gap.edge, from_gap), p.target, rmin(p.c0, p.c1),
                            rmax(p.c0, p.c1));
  if (!from_near) throw ParameterError("the anchor piece does not reach the gap");
  const int gap_edge = gap.edge;
  const Rational m1 = (v0 + t_prime) / 2, m2 = (t_prime + v1) / 2;
  return Graft{s, tree_edge, v0, v1,
               {Piece{v0, m1, p.target, p.at(v0), *from_near},
                Piece{m1, t_prime, gap_edge, from_gap, to_gap},
                Piece{t_prime, m2, gap_edge, to_gap, from_gap},
                Piece{m2, v1, p.target, *from_near, p.at(v1)}}};
}

Rational delta_bound(const DiagonalForm& phi) {
  int total = 0;
  for (const auto& s : phi.target().summands()) total += s.size;
  return rmin(Rational(1, 2), Rational(1, total));
}

namespace {

// Direction in which values leave a point along an edge: `sign` is the
// direction of increasing (+1) or decreasing (-1) coordinate on `edge`.
struct Germ {
  int edge;
  int sign;
  friend bool operator==(const Germ&, const Germ&) = default;
};

std::vector<Germ> germs_at(const Graph& z, const GraphPoint& b) {
  if (auto v = z.vertex_of(b)) {
    std::vector<Germ> out;
    for (int e : z.incident_edges(*v)) {
      if (z.edge(e).tail == *v) out.push_back({e, +1});
      if (z.edge(e).head == *v) out.push_back({e, -1});
    }
    return out;
  }
  return {{b.edge, +1}, {b.edge, -1}};
}

// One side of a tree point: the tree edge and the direction into it.
struct Side {
  int edge;
  Rational at;  // tree coordinate of the point on this edge
  int sign;     // +1: side (at, at + h), -1: side (at - h, at)
};

std::vector<Side> sides_of(const Graph& tree, const GraphPoint& x) {
  if (auto v = tree.vertex_of(x)) {
    std::vector<Side> out;
    for (int e : tree.incident_edges(*v)) {
      if (tree.edge(e).tail == *v) out.push_back({e, 0, +1});
      if (tree.edge(e).head == *v) out.push_back({e, tree.length(e), -1});
    }
    return out;
  }
  return {{x.edge, x.coord, -1}, {x.edge, x.coord, +1}};
}

// Distance from `at` to the next breakpoint of f or g on the given side.
Rational room_on_side(const PLMap& f, const PLMap& g, const Graph& tree, const Side& sd) {
  Rational best = sd.sign > 0 ? Rational(tree.length(sd.edge) - sd.at) : sd.at;
  for (const PLMap* m : {&f, &g}) {
    for (const auto& p : m->pieces(sd.edge)) {
      for (const Rational& t : {p.t0, p.t1}) {
        Rational d = (t - sd.at) * sd.sign;
        if (d > 0) best = rmin(best, d);
      }
    }
  }
  return best;
}

const Piece& piece_on_side(const PLMap& f, const Side& sd, const Rational& room) {
  Rational probe = sd.at + sd.sign * room / 2;
  return f.pieces(sd.edge)[f.piece_index(sd.edge, probe)];
}

}  // namespace

DiagonalForm repair_distinctness(const DiagonalForm& phi, const Rational& eta,
                                 std::vector<PerturbationRecord>* records) {
  if (eta <= 0) throw ParameterError("repair magnitude must be positive");
  DiagonalForm cur = phi;
  for (int round = 0; round < 256; ++round) {
    auto report = is_maximally_homogeneous(cur);
    if (report.holds) return cur;
    const auto w = report.witnesses.front();
    if (!w.isolated()) throw InvalidInput("entries coincide along a segment; input is not MH");
    const auto& td = cur.at(w.target);
    const Graph& tree = *td.tree.tree;
    const GraphPoint x = tree.point(w.tree_edge, w.t0);
    const auto& fa = td.entries[w.a].map;
    const auto& fb = td.entries[w.b].map;
    const int j = td.entries[w.a].source;
    const Graph& z = *cur.source().summand(j).base;

    auto sides = sides_of(tree, x);
    std::vector<Rational> rooms;
    bool a_const = true, b_const = true;
    for (const auto& sd : sides) {
      rooms.push_back(room_on_side(fa, fb, tree, sd));
      a_const = a_const && piece_on_side(fa, sd, rooms.back()).constant();
      b_const = b_const && piece_on_side(fb, sd, rooms.back()).constant();
    }
    if (a_const == b_const) {
      throw InvalidInput("collision where neither entry is locally constant cannot be bumped");
    }
    const int c = a_const ? w.a : w.b;
    const PLMap& moving = a_const ? fb : fa;
    const GraphPoint b = td.entries[c].map.eval(x);

    std::vector<Germ> used;
    for (size_t k = 0; k < sides.size(); ++k) {
      const Piece& p = piece_on_side(moving, sides[k], rooms[k]);
      if (p.constant()) throw InvalidInput("entries coincide along a segment; input is not MH");
      Rational near = p.at(sides[k].at + sides[k].sign * rooms[k] / 2);
      used.push_back({p.target, near > p.at(sides[k].at) ? +1 : -1});
    }
    std::optional<Germ> free;
    for (const auto& g : germs_at(z, b)) {
      if (std::find(used.begin(), used.end(), g) == used.end()) {
        free = g;
        break;
      }
    }
    if (!free) throw InvalidInput("no free direction to separate colliding entries");

    // Margin to every other entry of the same source at x.
    std::optional<Rational> margin;
    Rational slope = 0;
    for (int s = 0; s < static_cast<int>(td.entries.size()); ++s) {
      slope = rmax(slope, td.entries[s].map.max_slope());
      if (s == w.a || s == w.b || td.entries[s].source != j) continue;
      Rational d = point_distance(z, b, td.entries[s].map.eval(x));
      if (d == 0) throw InvalidInput("three or more entries meet at one point");
      margin = margin ? rmin(*margin, d) : d;
    }
    Rational bcoord = *coord_on(z, b, free->edge, 0, z.length(free->edge));
    Rational edge_room = free->sign > 0 ? Rational(z.length(free->edge) - bcoord) : bcoord;
    Rational height = rmin(eta, edge_room / 2);
    Rational half = rooms.front() / 2;
    for (const auto& r : rooms) half = rmin(half, r / 2);
    if (margin) {
      height = rmin(height, *margin / 3);
      if (slope > 0) half = rmin(half, *margin / (3 * slope));
    }
    const Rational top = bcoord + free->sign * height;

    std::vector<Graft> grafts;
    if (sides.size() == 2 && !tree.vertex_of(x)) {
      grafts.push_back(Graft{c, x.edge, x.coord - half, x.coord + half,
                             {Piece{x.coord - half, x.coord, free->edge, bcoord, top},
                              Piece{x.coord, x.coord + half, free->edge, top, bcoord}}});
    } else {
      for (const auto& sd : sides) {
        if (sd.sign > 0) {
          grafts.push_back(Graft{c, sd.edge, sd.at, sd.at + half,
                                 {Piece{sd.at, sd.at + half, free->edge, top, bcoord}}});
        } else {
          grafts.push_back(Graft{c, sd.edge, sd.at - half, sd.at,
                                 {Piece{sd.at - half, sd.at, free->edge, bcoord, top}}});
        }
      }
    }
    std::vector<GraftCopy> copies;
    cur = descend(cur, w.target, grafts, &copies);
    if (records) {
      PerturbationRecord rec;
      rec.kind = RecordKind::kRepair;
      rec.source = j;
      rec.target = w.target;
      rec.entry = c;
      rec.tree_edge = grafts.front().tree_edge;
      rec.anchor_t = x.coord;
      rec.u_lo = rec.v_lo = grafts.front().lo;
      rec.u_hi = rec.v_hi = grafts.front().hi;
      rec.t_prime = x.coord;
      rec.reached = z.point(free->edge, top);
      rec.copies = std::move(copies);
      records->push_back(std::move(rec));
    }
  }
  throw InvalidInput("repair did not converge");
}

namespace {

struct Window {
  int tree_edge;
  int entry;
  Rational lo;
  Rational hi;
};

class Planner {
 public:
  Planner(const DiagonalForm& phi, Rational rho)
      : orig_(phi), cur_(phi), rho_(std::move(rho)), windows_(phi.target().count()) {}

  const DiagonalForm& current() const { return cur_; }
  std::vector<PerturbationRecord>& records() { return records_; }

  // Covers `gap` of source j by one tent, plus repairs if needed. The lower
  // endpoint anchors whenever it can; the upper one is a fallback only.
  void cover(int j, const Gap& gap) {
    std::optional<Plan> fallback;
    for (bool from_lo : {true, false}) {
      if (!(from_lo ? gap.a_covered : gap.b_covered)) continue;
      const GraphPoint& x = from_lo ? gap.a : gap.b;
      for (const auto& cand : anchor_candidates(orig_, j, x)) {
        auto plan = try_candidate(j, gap, from_lo, cand, fallback.has_value());
        if (!plan) continue;
        if (plan->clean) return commit(std::move(*plan));
        if (!fallback) fallback = std::move(plan);
      }
      if (fallback) break;
    }
    if (!fallback) {
      throw InvalidInput("no eigenvalue function can be perturbed across gap (" +
                         to_string(gap.interval.lo) + ", " + to_string(gap.interval.hi) + ")");
    }
    commit(std::move(*fallback));
  }

 private:
  struct Plan {
    DiagonalForm form;
    std::vector<PerturbationRecord> records;
    bool clean;
  };

  // Distance from t to the windows of entry s of target i on tree edge te;
  // nullopt if there are none, negative if t lies inside one.
  std::optional<Rational> window_distance(int i, int s, int te, const Rational& t) const {
    std::optional<Rational> best;
    for (const auto& w : windows_[i]) {
      if (w.tree_edge != te || w.entry != s) continue;
      if (w.lo <= t && t <= w.hi) return Rational(-1);
      Rational d = t < w.lo ? Rational(w.lo - t) : Rational(t - w.hi);
      best = best ? rmin(*best, d) : d;
    }
    return best;
  }

  bool overlaps_window(int i, const GraftCopy& c, const Rational& len, const Rational& lo,
                       const Rational& hi) const {
    const Rational a = c.reversed ? Rational(len - hi) : lo;
    const Rational b = c.reversed ? Rational(len - lo) : hi;
    for (const auto& w : windows_[i]) {
      if (w.tree_edge == c.tree_edge && w.entry == c.entry && a <= w.hi && w.lo <= b) return true;
    }
    return false;
  }

  std::optional<Plan> try_candidate(int j, const Gap& gap, bool from_lo, const Candidate& cand,
                                    bool have_fallback) {
    const int i = cand.target, s = cand.entry, te = cand.tree_edge;
    const auto& td = orig_.at(i);
    const auto& ct = td.tree;
    const Graph& z = *orig_.source().summand(j).base;
    const PLMap& f = td.entries[s].map;
    const Piece& p = f.pieces(te)[cand.piece];

    std::optional<Rational> clearance = window_distance(i, s, te, cand.t);
    if (clearance && *clearance < 0) return std::nullopt;
    const GraphPoint here = f.eval_at(te, cand.t);
    std::optional<Rational> sep;
    Rational slope = 0;
    for (int o = 0; o < static_cast<int>(td.entries.size()); ++o) {
      slope = rmax(slope, td.entries[o].map.max_slope());
      if (o == s || td.entries[o].source != j) continue;
      Rational d = point_distance(z, here, cur_.at(i).entries[o].map.eval_at(te, cand.t));
      if (d == 0) return std::nullopt;
      sep = sep ? rmin(*sep, d) : d;
    }
    Rational h = p.t1 - p.t0;
    if (sep && slope > 0) h = rmin(h, *sep / (5 * slope));
    if (!p.constant()) h = rmin(h, rho_ / (2 * rabs(p.slope())));
    if (clearance) h = rmin(h, *clearance / 2);
    const Rational w0 = rmax(p.t0, cand.t - h), w1 = rmin(p.t1, cand.t + h);
    if (!(w0 < w1)) return std::nullopt;
    const Rational v0 = w0 + (w1 - w0) / 3, v1 = w1 - (w1 - w0) / 3;

    std::optional<Plan> repaired;
    for (int k : {4, 1, 2, 3, 5, 6, 7}) {
      const Rational tp = v0 + (v1 - v0) * k / 8;
      Graft g = tent_graft(cur_, i, s, te, v0, v1, tp, gap.interval, from_lo);
      std::vector<GraftCopy> copies;
      DiagonalForm next = descend(cur_, i, {g}, &copies);
      // Another fiber copy may land on a window of the entry it maps to.
      for (const auto& c : copies) {
        if (c.tree_edge == te) continue;
        if (overlaps_window(i, c, ct.tree->length(c.tree_edge), w0, w1)) return std::nullopt;
      }

      PerturbationRecord rec;
      rec.kind = RecordKind::kTent;
      rec.source = j;
      rec.target = i;
      rec.entry = s;
      rec.tree_edge = te;
      rec.anchor_t = cand.t;
      rec.u_lo = w0, rec.u_hi = w1, rec.v_lo = v0, rec.v_hi = v1;
      rec.t_prime = tp;
      rec.reached = from_lo ? gap.b : gap.a;
      rec.copies = std::move(copies);
      rec.covered = gap.interval;

      if (is_maximally_homogeneous(next).holds) return Plan{next, {rec}, true};
      if (repaired || have_fallback) continue;
      try {
        std::vector<PerturbationRecord> fixes{rec};
        DiagonalForm fixed = repair_distinctness(next, rho_ / 2, &fixes);
        repaired = Plan{std::move(fixed), std::move(fixes), false};
      } catch (const InvalidInput&) {
      }
    }
    return repaired;
  }

  void commit(Plan plan) {
    cur_ = std::move(plan.form);
    for (auto& rec : plan.records) {
      const auto& ct = cur_.at(rec.target).tree;
      for (const auto& c : rec.copies) {
        const Rational len = ct.tree->length(c.tree_edge);
        if (c.reversed) {
          windows_[rec.target].push_back({c.tree_edge, c.entry, len - rec.u_hi, len - rec.u_lo});
        } else {
          windows_[rec.target].push_back({c.tree_edge, c.entry, rec.u_lo, rec.u_hi});
        }
      }
      records_.push_back(std::move(rec));
    }
  }

  DiagonalForm orig_;
  DiagonalForm cur_;
  Rational rho_;
  std::vector<std::vector<Window>> windows_;
  std::vector<PerturbationRecord> records_;
};

}  // namespace

SurjectiveResult make_surjective_mh(const DiagonalForm& phi, const Rational& delta,
                                    std::optional<Rational> rho) {
  const Rational bound = delta_bound(phi);
  if (delta <= 0 || delta >= bound) {
    throw ParameterError("delta must satisfy delta < " + to_string(bound) + " (got " +
                         to_string(delta) + ")");
  }
  if (!phi.unital()) throw InvalidInput("homomorphism is not unital");
  if (!is_maximally_homogeneous(phi).holds) {
    throw InvalidInput("homomorphism is not maximally homogeneous");
  }
  PerturbationLog log;
  log.delta = delta;
  std::optional<Rational> shortest;
  for (int j = 0; j < phi.source().count(); ++j) {
    auto gd = gap_decomposition(phi, j);
    for (const auto& g : gd.gaps) {
      if (g.length() > delta) {
        throw InvalidInput("gap (" + to_string(g.interval.lo) + ", " + to_string(g.interval.hi) +
                           ") of length " + to_string(g.length()) +
                           " exceeds delta; input is not a delta-approximation");
      }
      shortest = shortest ? rmin(*shortest, g.length()) : g.length();
    }
    log.chains.push_back(maximal_chains(gd, *phi.source().summand(j).base));
    log.gaps.push_back(std::move(gd));
  }
  log.rho = rho ? *rho : (shortest ? rmin(delta / 100, *shortest / 2) : Rational(delta / 100));
  if (log.rho <= 0) throw ParameterError("rho must be positive");
  log.bound = 0;
  if (!shortest) return {phi, log};

  Planner planner(phi, log.rho);
  for (int j = 0; j < phi.source().count(); ++j) {
    const auto& gd = log.gaps[j];
    for (const auto& chain : log.chains[j].chains) {
      for (int gi : chain.gaps) {
        const Gap& gap = gd.gaps[gi];
        const Rational mid = (gap.interval.lo + gap.interval.hi) / 2;
        const auto& z = phi.source().summand(j).base;
        if (source_coverage(planner.current(), j).contains(z->point(gap.interval.edge, mid))) {
          continue;
        }
        planner.cover(j, gap);
      }
    }
  }
  DiagonalForm out = planner.current();
  if (!check_unital_injective(out).injective) throw InvalidInput("gaps remain after perturbation");
  for (int i = 0; i < phi.target().count(); ++i) {
    for (size_t s = 0; s < phi.at(i).entries.size(); ++s) {
      log.bound = rmax(log.bound,
                       pl_sup_distance(phi.at(i).entries[s].map, out.at(i).entries[s].map).value);
    }
  }
  log.records = std::move(planner.records());
  return {std::move(out), std::move(log)};
}

}  // namespace ahdiag

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

#include "ahdiag/plmap.hpp"

#include <algorithm>
#include <optional>

#include "ahdiag/error.hpp"

namespace ahdiag {

namespace {

Piece clip(const Piece& p, const Rational& a, const Rational& b) {
  return Piece{a, b, p.target, p.at(a), p.at(b)};
}

// Affine function value + slope * t.
struct Affine {
  Rational value;
  Rational slope;
  Rational at(const Rational& t) const { return value + slope * t; }
};

Affine affine_of(const Piece& p) {
  Rational s = p.slope();
  return Affine{p.c0 - s * p.t0, s};
}

}  // namespace

PLMap::PLMap(GraphPtr domain, GraphPtr codomain, std::vector<std::vector<Piece>> pieces)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), pieces_(std::move(pieces)) {
  validate();
}

void PLMap::validate() const {
  const Graph& d = *domain_;
  const Graph& c = *codomain_;
  if (static_cast<int>(pieces_.size()) != d.edge_count()) {
    throw DomainError("PLMap: piece lists do not match domain edges");
  }
  for (int e = 0; e < d.edge_count(); ++e) {
    const auto& list = pieces_[e];
    if (list.empty()) throw DomainError("PLMap: edge without pieces");
    if (list.front().t0 != 0 || list.back().t1 != d.length(e)) {
      throw DomainError("PLMap: pieces do not span edge '" + d.edge(e).id + "'");
    }
    for (size_t k = 0; k < list.size(); ++k) {
      const Piece& p = list[k];
      if (!(p.t0 < p.t1)) throw DomainError("PLMap: empty or reversed piece");
      if (p.target < 0 || p.target >= c.edge_count()) {
        throw DomainError("PLMap: piece target edge out of range");
      }
      const Rational& len = c.length(p.target);
      if (p.c0 < 0 || p.c0 > len || p.c1 < 0 || p.c1 > len) {
        throw DomainError("PLMap: piece leaves its target edge");
      }
      if (k > 0) {
        const Piece& q = list[k - 1];
        if (q.t1 != p.t0) throw DomainError("PLMap: pieces not contiguous");
        if (!(c.point(q.target, q.c1) == c.point(p.target, p.c0))) {
          throw DomainError("PLMap: discontinuous at breakpoint " + to_string(p.t0) +
                            " on edge '" + d.edge(e).id + "'");
        }
      }
    }
  }
  // Continuity across shared vertices.
  std::vector<std::optional<GraphPoint>> at_vertex(d.vertex_count());
  auto check = [&](int v, const GraphPoint& img) {
    if (!at_vertex[v]) {
      at_vertex[v] = img;
    } else if (!(*at_vertex[v] == img)) {
      throw DomainError("PLMap: discontinuous at vertex '" + d.vertex_id(v) + "'");
    }
  };
  for (int e = 0; e < d.edge_count(); ++e) {
    const Piece& first = pieces_[e].front();
    const Piece& last = pieces_[e].back();
    check(d.edge(e).tail, c.point(first.target, first.c0));
    check(d.edge(e).head, c.point(last.target, last.c1));
  }
}

PLMap PLMap::identity(const GraphPtr& g) {
  std::vector<std::vector<Piece>> pieces(g->edge_count());
  for (int e = 0; e < g->edge_count(); ++e) {
    pieces[e].push_back(Piece{0, g->length(e), e, 0, g->length(e)});
  }
  return PLMap(g, g, std::move(pieces));
}

PLMap PLMap::constant(const GraphPtr& domain, const GraphPtr& codomain,
                      const GraphPoint& value) {
  if (!codomain->contains(value)) throw DomainError("PLMap::constant: point off codomain");
  std::vector<std::vector<Piece>> pieces(domain->edge_count());
  for (int e = 0; e < domain->edge_count(); ++e) {
    pieces[e].push_back(Piece{0, domain->length(e), value.edge, value.coord, value.coord});
  }
  return PLMap(domain, codomain, std::move(pieces));
}

size_t PLMap::piece_index(int edge, const Rational& t) const {
  const auto& list = pieces_.at(edge);
  auto it = std::lower_bound(list.begin(), list.end(), t,
                             [](const Piece& p, const Rational& x) { return p.t1 < x; });
  if (it == list.end() || t < it->t0) {
    throw DomainError("PLMap: parameter outside edge");
  }
  return static_cast<size_t>(it - list.begin());
}

GraphPoint PLMap::eval_at(int edge, const Rational& t) const {
  if (edge < 0 || edge >= domain_->edge_count()) {
    throw DomainError("PLMap::eval: edge out of range");
  }
  const Piece& p = pieces_[edge][piece_index(edge, t)];
  return codomain_->point(p.target, p.at(t));
}

GraphPoint PLMap::eval(const GraphPoint& p) const {
  if (!domain_->contains(p)) {
    throw DomainError("PLMap::eval: point not in domain '" + domain_->name() + "'");
  }
  return eval_at(p.edge, p.coord);
}

PLMap PLMap::normalized() const {
  std::vector<std::vector<Piece>> out(pieces_.size());
  for (size_t e = 0; e < pieces_.size(); ++e) {
    for (Piece p : pieces_[e]) {
      if (p.constant()) {
        GraphPoint q = codomain_->point(p.target, p.c0);
        p.target = q.edge;
        p.c0 = q.coord;
        p.c1 = q.coord;
      }
      if (!out[e].empty()) {
        Piece& prev = out[e].back();
        if (prev.target == p.target && prev.c1 == p.c0 && prev.slope() == p.slope()) {
          prev.t1 = p.t1;
          prev.c1 = p.c1;
          continue;
        }
      }
      out[e].push_back(p);
    }
  }
  return PLMap(domain_, codomain_, std::move(out));
}

PLMap PLMap::grafted(int edge, const Rational& lo, const Rational& hi,
                     const std::vector<Piece>& replacement) const {
  if (!(lo < hi) || lo < 0 || hi > domain_->length(edge)) {
    throw DomainError("PLMap::grafted: bad window");
  }
  if (replacement.empty() || replacement.front().t0 != lo || replacement.back().t1 != hi) {
    throw DomainError("PLMap::grafted: replacement does not span window");
  }
  auto pieces = pieces_;
  std::vector<Piece> list;
  for (const Piece& p : pieces_[edge]) {
    if (p.t0 < lo) list.push_back(clip(p, p.t0, rmin(p.t1, lo)));
  }
  for (const Piece& p : replacement) list.push_back(p);
  for (const Piece& p : pieces_[edge]) {
    if (p.t1 > hi) list.push_back(clip(p, rmax(p.t0, hi), p.t1));
  }
  pieces[edge] = std::move(list);
  return PLMap(domain_, codomain_, std::move(pieces));
}

Rational PLMap::max_slope() const {
  Rational best = 0;
  for (const auto& list : pieces_) {
    for (const Piece& p : list) best = rmax(best, rabs(p.slope()));
  }
  return best;
}

bool equivalent(const PLMap& a, const PLMap& b) {
  if (!same_graph(a.domain_, b.domain_) || !same_graph(a.codomain_, b.codomain_)) {
    return false;
  }
  return a.normalized().pieces_ == b.normalized().pieces_;
}

PLMap pl_compose(const PLMap& f, const PLMap& g) {
  if (!same_graph(g.codomain(), f.domain())) {
    throw DomainError("pl_compose: codomain of inner map is not the domain of outer map");
  }
  const Graph& mid = *f.domain();
  std::vector<std::vector<Piece>> out(g.domain()->edge_count());
  for (int e = 0; e < g.domain()->edge_count(); ++e) {
    for (const Piece& gp : g.pieces(e)) {
      if (gp.constant()) {
        GraphPoint y = f.eval(mid.point(gp.target, gp.c0));
        out[e].push_back(Piece{gp.t0, gp.t1, y.edge, y.coord, y.coord});
        continue;
      }
      // Pull back f's breakpoints on the intermediate edge.
      const Rational lo = rmin(gp.c0, gp.c1);
      const Rational hi = rmax(gp.c0, gp.c1);
      std::vector<Rational> ts{gp.t0, gp.t1};
      for (const Piece& fp : f.pieces(gp.target)) {
        for (const Rational* b : {&fp.t0, &fp.t1}) {
          if (lo < *b && *b < hi) {
            ts.push_back(gp.t0 + (*b - gp.c0) * (gp.t1 - gp.t0) / (gp.c1 - gp.c0));
          }
        }
      }
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
      for (size_t k = 0; k + 1 < ts.size(); ++k) {
        const Rational x0 = gp.at(ts[k]);
        const Rational x1 = gp.at(ts[k + 1]);
        const Rational xm = (x0 + x1) / 2;
        const Piece& fp = f.pieces(gp.target)[f.piece_index(gp.target, xm)];
        out[e].push_back(Piece{ts[k], ts[k + 1], fp.target, fp.at(x0), fp.at(x1)});
      }
    }
  }
  return PLMap(g.domain(), f.codomain(), std::move(out)).normalized();
}

ClosedSubset pl_image(const PLMap& f) {
  ClosedSubset s(f.codomain());
  for (const auto& list : f.all_pieces()) {
    for (const Piece& p : list) {
      s.add_interval(p.target, rmin(p.c0, p.c1), rmax(p.c0, p.c1));
    }
  }
  return s;
}

SupDistance pl_sup_distance(const PLMap& f, const PLMap& g) {
  if (!same_graph(f.domain(), g.domain()) || !same_graph(f.codomain(), g.codomain())) {
    throw DomainError("pl_sup_distance: maps have different domain or codomain");
  }
  const Graph& dom = *f.domain();
  const Graph& cod = *f.codomain();
  std::optional<SupDistance> best;
  auto consider = [&](int e, const Rational& t) {
    Rational d = point_distance(cod, f.eval_at(e, t), g.eval_at(e, t));
    if (!best || d > best->value) best = SupDistance{d, dom.point(e, t)};
  };
  for (int e = 0; e < dom.edge_count(); ++e) {
    std::vector<Rational> ts;
    for (const Piece& p : f.pieces(e)) ts.push_back(p.t0);
    for (const Piece& p : g.pieces(e)) ts.push_back(p.t0);
    ts.push_back(dom.length(e));
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (size_t k = 0; k + 1 < ts.size(); ++k) {
      const Rational& s0 = ts[k];
      const Rational& s1 = ts[k + 1];
      const Rational mid = (s0 + s1) / 2;
      const Piece& fp = f.pieces(e)[f.piece_index(e, mid)];
      const Piece& gp = g.pieces(e)[g.piece_index(e, mid)];
      const Affine x = affine_of(fp);
      const Affine y = affine_of(gp);
      // Candidate route-length functions; the distance on [s0, s1] is their
      // lower envelope (with |x - y| as the max of two of them).
      std::vector<Affine> fns;
      if (fp.target == gp.target) {
        fns.push_back({x.value - y.value, x.slope - y.slope});
        fns.push_back({y.value - x.value, y.slope - x.slope});
      }
      const Edge& ef = cod.edge(fp.target);
      const Edge& eg = cod.edge(gp.target);
      const Affine to_f[2] = {x, {ef.length - x.value, -x.slope}};
      const int vf[2] = {ef.tail, ef.head};
      const Affine to_g[2] = {y, {eg.length - y.value, -y.slope}};
      const int vg[2] = {eg.tail, eg.head};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const auto& dv = cod.vertex_distance(vf[a], vg[b]);
          if (!dv) continue;
          fns.push_back({to_f[a].value + *dv + to_g[b].value, to_f[a].slope + to_g[b].slope});
        }
      }
      consider(e, s0);
      for (size_t i = 0; i < fns.size(); ++i) {
        for (size_t j = i + 1; j < fns.size(); ++j) {
          if (fns[i].slope == fns[j].slope) continue;
          Rational t = (fns[j].value - fns[i].value) / (fns[i].slope - fns[j].slope);
          if (s0 < t && t < s1) consider(e, t);
        }
      }
      consider(e, s1);
    }
  }
  return *best;
}

}  // namespace ahdiag

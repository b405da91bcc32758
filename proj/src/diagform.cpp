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

#include "ahdiag/diagform.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "ahdiag/error.hpp"

namespace ahdiag {

DiagonalForm::DiagonalForm(Block source, Block target, std::vector<TargetData> targets)
    : source_(std::move(source)), target_(std::move(target)), targets_(std::move(targets)) {
  if (static_cast<int>(targets_.size()) != target_.count()) {
    throw InvalidInput("diagonal form needs one entry list per target summand");
  }
  for (int i = 0; i < target_.count(); ++i) {
    const auto& td = targets_[i];
    if (!same_graph(td.tree.base, target_.summand(i).base)) {
      throw InvalidInput("covering tree of target " + std::to_string(i) +
                         " is not over its base graph");
    }
    if (td.entries.empty()) throw InvalidInput("target summand without entries");
    for (const auto& e : td.entries) {
      if (e.source < 0 || e.source >= source_.count()) {
        throw InvalidInput("entry refers to a missing source summand");
      }
      if (!same_graph(e.map.domain(), td.tree.tree)) {
        throw InvalidInput("eigenvalue function is not defined on the covering tree");
      }
      if (!same_graph(e.map.codomain(), source_.summand(e.source).base)) {
        throw InvalidInput("eigenvalue function does not land in its source base");
      }
    }
  }
}

const TargetData& DiagonalForm::at(int i) const {
  if (i < 0 || i >= static_cast<int>(targets_.size())) {
    throw DomainError("target summand index out of range");
  }
  return targets_[i];
}

int DiagonalForm::entry_size(int i) const {
  int n = 0;
  for (const auto& e : at(i).entries) n += source_.summand(e.source).size;
  return n;
}

bool DiagonalForm::unital() const {
  for (int i = 0; i < target_.count(); ++i) {
    if (entry_size(i) != target_.summand(i).size) return false;
  }
  return true;
}

DiagonalForm DiagonalForm::with_entries(int i, std::vector<DiagEntry> entries) const {
  auto t = targets_;
  t.at(i).entries = std::move(entries);
  return DiagonalForm(source_, target_, std::move(t));
}

Spectrum spectrum_at(const DiagonalForm& phi, int i, const GraphPoint& t) {
  const auto& td = phi.at(i);
  if (!td.tree.tree->contains(t)) throw DomainError("spectrum point is not on the covering tree");
  std::vector<std::pair<int, GraphPoint>> pts;
  for (const auto& e : td.entries) pts.emplace_back(e.source, e.map.eval(t));
  std::sort(pts.begin(), pts.end());
  Spectrum out;
  for (const auto& [j, p] : pts) {
    if (!out.empty() && out.back().source == j && out.back().point == p) {
      ++out.back().multiplicity;
    } else {
      out.push_back(SpectrumPoint{j, p, 1});
    }
  }
  return out;
}

namespace {

// Zero set of an affine function on [s0, s1]: nothing, a point, or all.
struct ZeroSet {
  enum Kind { kNone, kPoint, kAll } kind = kNone;
  Rational at;
};

ZeroSet affine_zero(const Rational& s0, const Rational& s1, const Rational& v0,
                    const Rational& v1) {
  if (v0 == 0 && v1 == 0) return {ZeroSet::kAll, 0};
  if (v0 == 0) return {ZeroSet::kPoint, s0};
  if (v1 == 0) return {ZeroSet::kPoint, s1};
  if ((v0 < 0) == (v1 < 0)) return {};
  return {ZeroSet::kPoint, s0 + (s1 - s0) * v0 / (v0 - v1)};
}

ZeroSet intersect(const ZeroSet& a, const ZeroSet& b) {
  if (a.kind == ZeroSet::kNone || b.kind == ZeroSet::kNone) return {};
  if (a.kind == ZeroSet::kAll) return b;
  if (b.kind == ZeroSet::kAll) return a;
  return a.at == b.at ? a : ZeroSet{};
}

// Breakpoints of both maps on a domain edge.
std::vector<Rational> common_breaks(const PLMap& f, const PLMap& g, int edge) {
  std::vector<Rational> ts;
  for (const auto& p : f.pieces(edge)) ts.push_back(p.t0), ts.push_back(p.t1);
  for (const auto& p : g.pieces(edge)) ts.push_back(p.t0), ts.push_back(p.t1);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

const Piece& piece_over(const PLMap& f, int edge, const Rational& s0, const Rational& s1) {
  return f.pieces(edge)[f.piece_index(edge, (s0 + s1) / 2)];
}

// Where do two affine pieces, restricted to [s0, s1], give the same point?
ZeroSet same_point(const Graph& z, const Rational& s0, const Rational& s1, const Piece& pa,
                   const Piece& pb) {
  const Rational a0 = pa.at(s0), a1 = pa.at(s1), b0 = pb.at(s0), b1 = pb.at(s1);
  std::vector<ZeroSet> hits;
  if (pa.target == pb.target) hits.push_back(affine_zero(s0, s1, a0 - b0, a1 - b1));
  const Edge& ea = z.edge(pa.target);
  const Edge& eb = z.edge(pb.target);
  const std::pair<int, Rational> ends_a[2] = {{ea.tail, 0}, {ea.head, ea.length}};
  const std::pair<int, Rational> ends_b[2] = {{eb.tail, 0}, {eb.head, eb.length}};
  for (const auto& [u, cu] : ends_a) {
    for (const auto& [w, cw] : ends_b) {
      if (u != w) continue;
      hits.push_back(intersect(affine_zero(s0, s1, a0 - cu, a1 - cu),
                               affine_zero(s0, s1, b0 - cw, b1 - cw)));
    }
  }
  ZeroSet best;
  for (const auto& h : hits) {
    if (h.kind == ZeroSet::kAll) return h;
    if (h.kind == ZeroSet::kPoint) best = h;
  }
  return best;
}

}  // namespace

std::vector<MHWitness> entry_collisions(const DiagonalForm& phi, int i, int a, int b) {
  const auto& td = phi.at(i);
  const auto& ea = td.entries.at(a);
  const auto& eb = td.entries.at(b);
  std::vector<MHWitness> out;
  if (ea.source != eb.source) return out;  // different summands never meet
  const Graph& z = *phi.source().summand(ea.source).base;
  auto add = [&](MHWitness w) {
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(std::move(w));
  };
  for (int e = 0; e < td.tree.tree->edge_count(); ++e) {
    auto ts = common_breaks(ea.map, eb.map, e);
    for (size_t k = 0; k + 1 < ts.size(); ++k) {
      const Rational &s0 = ts[k], &s1 = ts[k + 1];
      ZeroSet hit = same_point(z, s0, s1, piece_over(ea.map, e, s0, s1),
                               piece_over(eb.map, e, s0, s1));
      if (hit.kind == ZeroSet::kAll) add(MHWitness{i, e, s0, s1, a, b});
      if (hit.kind == ZeroSet::kPoint) {
        // Shared tree vertices show up on several edges; keep one copy.
        add(MHWitness{i, e, hit.at, hit.at, a, b});
      }
    }
  }
  // Drop isolated hits already inside another witness (a shared tree vertex
  // is seen from several edges).
  const Graph& tree = *td.tree.tree;
  std::vector<MHWitness> kept;
  for (size_t k = 0; k < out.size(); ++k) {
    const auto& w = out[k];
    bool covered = false;
    if (w.isolated()) {
      GraphPoint p = tree.point(w.tree_edge, w.t0);
      for (size_t m = 0; m < out.size() && !covered; ++m) {
        const auto& o = out[m];
        if (m == k) continue;
        if (!o.isolated()) {
          covered = (o.tree_edge == p.edge && o.t0 <= p.coord && p.coord <= o.t1) ||
                    tree.point(o.tree_edge, o.t0) == p || tree.point(o.tree_edge, o.t1) == p;
        } else {
          covered = m < k && tree.point(o.tree_edge, o.t0) == p;
        }
      }
    }
    if (!covered) kept.push_back(w);
  }
  return kept;
}

MHReport is_maximally_homogeneous(const DiagonalForm& phi) {
  MHReport r;
  for (int i = 0; i < phi.target().count(); ++i) {
    const int n = static_cast<int>(phi.at(i).entries.size());
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        auto w = entry_collisions(phi, i, a, b);
        r.witnesses.insert(r.witnesses.end(), w.begin(), w.end());
      }
    }
  }
  r.holds = r.witnesses.empty();
  return r;
}

int fiber_image_dimension(const DiagonalForm& phi, int i, const GraphPoint& t) {
  int dim = 0;
  for (const auto& sp : spectrum_at(phi, i, t)) {
    const int n = phi.source().summand(sp.source).size;
    dim += n * n;
  }
  return dim;
}

int max_fiber_image_dimension(const DiagonalForm& phi, int i) {
  int dim = 0;
  for (const auto& e : phi.at(i).entries) {
    const int n = phi.source().summand(e.source).size;
    dim += n * n;
  }
  return dim;
}

ClosedSubset source_coverage(const DiagonalForm& phi, int j) {
  ClosedSubset cov(phi.source().summand(j).base);
  for (const auto& td : phi.targets()) {
    for (const auto& e : td.entries) {
      if (e.source == j) cov.unite(pl_image(e.map));
    }
  }
  return cov;
}

UnitalInjectiveReport check_unital_injective(const DiagonalForm& phi) {
  UnitalInjectiveReport r;
  for (int i = 0; i < phi.target().count(); ++i) {
    if (phi.entry_size(i) != phi.target().summand(i).size) r.size_mismatch.push_back(i);
  }
  r.unital = r.size_mismatch.empty();
  for (int j = 0; j < phi.source().count(); ++j) {
    auto cov = source_coverage(phi, j);
    if (cov.covers_all()) continue;
    r.gaps.push_back(SourceGaps{j, cov.complement_intervals(), cov.uncovered_vertices()});
  }
  r.injective = r.gaps.empty();
  return r;
}

GraphPoint lift_to_tree(const CoveringTree& ct, const GraphPoint& w) {
  if (!ct.base->contains(w)) throw DomainError("point is not on the covering tree's base");
  for (int te = 0; te < ct.tree->edge_count(); ++te) {
    if (ct.base_edge[te] != w.edge) continue;
    return ct.tree->point(te, ct.reversed[te] ? ct.tree->length(te) - w.coord : w.coord);
  }
  throw DomainError("covering tree misses a base edge");
}

namespace {

// Canonical description of an entry over a base sub-interval.
using Trace = std::tuple<int, GraphPoint, GraphPoint, GraphPoint>;

std::vector<int> copies_over(const CoveringTree& ct, int base_edge) {
  std::vector<int> out;
  for (int te = 0; te < ct.tree->edge_count(); ++te) {
    if (ct.base_edge[te] == base_edge) out.push_back(te);
  }
  return out;
}

Rational tree_coord(const CoveringTree& ct, int te, const Rational& x) {
  return ct.reversed[te] ? ct.tree->length(te) - x : x;
}

// Base-coordinate breakpoints of every entry on every copy of a base edge.
std::vector<Rational> base_breaks(const TargetData& td, const std::vector<int>& copies) {
  std::vector<Rational> xs;
  for (int te : copies) {
    for (const auto& e : td.entries) {
      for (const auto& p : e.map.pieces(te)) {
        xs.push_back(tree_coord(td.tree, te, p.t0));
        xs.push_back(tree_coord(td.tree, te, p.t1));
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

Trace trace_of(const TargetData& td, const DiagEntry& e, int te, const Rational& x0,
               const Rational& x1) {
  const auto& ct = td.tree;
  return {e.source, e.map.eval_at(te, tree_coord(ct, te, x0)),
          e.map.eval_at(te, tree_coord(ct, te, (x0 + x1) / 2)),
          e.map.eval_at(te, tree_coord(ct, te, x1))};
}

DescentReport descent_check(const DiagonalForm& phi, bool strict) {
  DescentReport r;
  for (int i = 0; i < phi.target().count(); ++i) {
    const auto& td = phi.at(i);
    const auto& ct = td.tree;
    const Graph& w = *ct.base;
    for (int be = 0; be < w.edge_count(); ++be) {
      auto copies = copies_over(ct, be);
      auto xs = base_breaks(td, copies);
      for (size_t k = 0; k + 1 < xs.size(); ++k) {
        std::vector<std::vector<Trace>> per_copy;
        for (int te : copies) {
          std::vector<Trace> tr;
          for (const auto& e : td.entries) tr.push_back(trace_of(td, e, te, xs[k], xs[k + 1]));
          if (!strict) std::sort(tr.begin(), tr.end());
          per_copy.push_back(std::move(tr));
        }
        for (size_t c = 1; c < per_copy.size(); ++c) {
          if (per_copy[c] != per_copy[0]) {
            r.failures.push_back(DescentFailure{
                i, w.point(be, (xs[k] + xs[k + 1]) / 2),
                "tree edges " + ct.tree->edge(copies[0]).id + " and " +
                    ct.tree->edge(copies[c]).id + " disagree"});
            break;
          }
        }
      }
    }
    for (int v = 0; v < w.vertex_count(); ++v) {
      auto fib = fiber(ct, w.vertex_point(v));
      auto values = [&](const GraphPoint& t) {
        std::vector<std::pair<int, GraphPoint>> vs;
        for (const auto& e : td.entries) vs.emplace_back(e.source, e.map.eval(t));
        if (!strict) std::sort(vs.begin(), vs.end());
        return vs;
      };
      auto first = values(fib.front());
      for (size_t c = 1; c < fib.size(); ++c) {
        if (values(fib[c]) != first) {
          r.failures.push_back(DescentFailure{i, w.vertex_point(v),
                                              "spectra differ over vertex " + w.vertex_id(v)});
          break;
        }
      }
    }
  }
  r.holds = r.failures.empty();
  return r;
}

}  // namespace

DescentReport verify_descent(const DiagonalForm& phi) { return descent_check(phi, false); }
DescentReport verify_strict_descent(const DiagonalForm& phi) { return descent_check(phi, true); }

CMatrix apply_at(const DiagonalForm& phi, const Element& a, int i, const GraphPoint& t) {
  if (!same_block(a.block(), phi.source())) throw DomainError("element is not in the source block");
  std::vector<CMatrix> blocks;
  for (const auto& e : phi.at(i).entries) blocks.push_back(a.eval(e.source, e.map.eval(t)));
  return CMatrix::direct_sum(blocks);
}

Element apply_diagform(const DiagonalForm& phi, const Element& a) {
  if (!same_block(a.block(), phi.source())) throw DomainError("element is not in the source block");
  auto strict = verify_strict_descent(phi);
  if (!strict.holds) {
    throw InvalidInput("diagonal form does not descend entrywise: " +
                       strict.failures.front().detail);
  }
  std::vector<Element::SummandKnots> knots;
  for (int i = 0; i < phi.target().count(); ++i) {
    const auto& td = phi.at(i);
    const auto& ct = td.tree;
    Element::SummandKnots sk;
    for (int be = 0; be < ct.base->edge_count(); ++be) {
      const int te = copies_over(ct, be).front();
      std::vector<Rational> xs = base_breaks(td, {te});
      // Preimages of the knots of a, so that a o lambda is affine between.
      for (const auto& e : td.entries) {
        for (const auto& p : e.map.pieces(te)) {
          if (p.constant()) continue;
          for (const auto& kn : a.knots(e.source, p.target)) {
            const Rational lo = rmin(p.c0, p.c1), hi = rmax(p.c0, p.c1);
            if (kn.t <= lo || kn.t >= hi) continue;
            xs.push_back(tree_coord(ct, te, p.t0 + (kn.t - p.c0) / p.slope()));
          }
        }
      }
      std::sort(xs.begin(), xs.end());
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      Element::EdgeKnots ek;
      for (const auto& x : xs) {
        ek.push_back(Knot{x, apply_at(phi, a, i, ct.tree->point(te, tree_coord(ct, te, x)))});
      }
      sk.push_back(std::move(ek));
    }
    knots.push_back(std::move(sk));
  }
  return Element(phi.target(), std::move(knots));
}

Element conditional_expectation(const Element& a) {
  return a.map_values([](const CMatrix& m) { return m.pinched(); });
}

ExpectationReport check_expectation_commutes(const DiagonalForm& phi, const Element& a,
                                             const std::vector<ExpectationSample>& samples) {
  if (!is_maximally_homogeneous(phi).holds) {
    throw PreconditionError("conditional expectation check needs a maximally homogeneous map");
  }
  const Element pa = conditional_expectation(a);
  ExpectationReport r;
  for (const auto& s : samples) {
    GraphPoint t = lift_to_tree(phi.at(s.target).tree, s.w);
    if (!(apply_at(phi, pa, s.target, t) == apply_at(phi, a, s.target, t).pinched())) {
      r.discrepancies.push_back(s);
    }
  }
  r.holds = r.discrepancies.empty();
  return r;
}

Rational diagform_distance_bound(const DiagonalForm& phi, const DiagonalForm& psi,
                                 const std::vector<Element>& gens) {
  if (!same_block(phi.source(), psi.source()) || !same_block(phi.target(), psi.target())) {
    throw DomainError("diagonal forms have different blocks");
  }
  Rational dist = 0;
  for (int i = 0; i < phi.target().count(); ++i) {
    const auto& a = phi.at(i);
    const auto& b = psi.at(i);
    if (!same_graph(a.tree.tree, b.tree.tree) || a.entries.size() != b.entries.size()) {
      throw DomainError("diagonal forms have different combinatorial type");
    }
    for (size_t s = 0; s < a.entries.size(); ++s) {
      if (a.entries[s].source != b.entries[s].source) {
        throw DomainError("diagonal forms disagree on entry sources");
      }
      dist = rmax(dist, pl_sup_distance(a.entries[s].map, b.entries[s].map).value);
    }
  }
  Rational lip = 0;
  for (const auto& g : gens) lip = rmax(lip, lipschitz_bound(g).upper);
  return lip * dist;
}

}  // namespace ahdiag

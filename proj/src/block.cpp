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

#include "ahdiag/block.hpp"

#include <algorithm>

#include "ahdiag/error.hpp"

namespace ahdiag {

Block::Block(std::vector<Summand> summands) : summands_(std::move(summands)) {
  for (const auto& s : summands_) {
    if (!s.base) throw InvalidInput("block summand without a base graph");
    if (!s.base->connected()) throw DomainError("block base " + s.base->name() + " is not connected");
    if (s.size < 1) throw DomainError("block matrix size must be at least 1");
  }
}

const Summand& Block::summand(int j) const {
  if (j < 0 || j >= count()) throw DomainError("summand index out of range");
  return summands_[j];
}

int Block::total_size() const {
  int n = 0;
  for (const auto& s : summands_) n += s.size;
  return n;
}

bool same_block(const Block& a, const Block& b) {
  if (a.count() != b.count()) return false;
  for (int j = 0; j < a.count(); ++j) {
    if (a.summands_[j].size != b.summands_[j].size) return false;
    if (!same_graph(a.summands_[j].base, b.summands_[j].base)) return false;
  }
  return true;
}

Element::Element(Block block, std::vector<SummandKnots> knots)
    : block_(std::move(block)), knots_(std::move(knots)) {
  validate();
}

void Element::validate() const {
  if (static_cast<int>(knots_.size()) != block_.count()) {
    throw InvalidInput("element has the wrong number of summands");
  }
  for (int j = 0; j < block_.count(); ++j) {
    const auto& [base, n] = block_.summand(j);
    if (static_cast<int>(knots_[j].size()) != base->edge_count()) {
      throw InvalidInput("element knots do not match the edges of " + base->name());
    }
    // Value seen at each vertex, for the continuity check.
    std::vector<const CMatrix*> at_vertex(base->vertex_count(), nullptr);
    auto pin = [&](int v, const CMatrix& m) {
      if (at_vertex[v] && !(*at_vertex[v] == m)) {
        throw InvalidInput("element is discontinuous at vertex " + base->vertex_id(v));
      }
      at_vertex[v] = &m;
    };
    for (int e = 0; e < base->edge_count(); ++e) {
      const auto& ks = knots_[j][e];
      const auto& edge = base->edges()[e];
      if (ks.size() < 2 || ks.front().t != 0 || ks.back().t != edge.length) {
        throw InvalidInput("element knots must span edge " + edge.id);
      }
      for (size_t k = 0; k < ks.size(); ++k) {
        if (ks[k].value.size() != n) throw InvalidInput("element matrix size mismatch");
        if (k > 0 && !(ks[k - 1].t < ks[k].t)) {
          throw InvalidInput("element knots must increase on edge " + edge.id);
        }
      }
      pin(edge.tail, ks.front().value);
      pin(edge.head, ks.back().value);
    }
  }
}

Element Element::constant(const Block& block, const std::vector<CMatrix>& values) {
  std::vector<SummandKnots> knots;
  for (int j = 0; j < block.count(); ++j) {
    SummandKnots sk;
    for (const auto& edge : block.summand(j).base->edges()) {
      sk.push_back({Knot{0, values.at(j)}, Knot{edge.length, values.at(j)}});
    }
    knots.push_back(std::move(sk));
  }
  return Element(block, std::move(knots));
}

Element Element::identity(const Block& block) {
  std::vector<CMatrix> v;
  for (const auto& s : block.summands()) v.push_back(CMatrix::identity(s.size));
  return constant(block, v);
}

Element Element::zero(const Block& block) {
  std::vector<CMatrix> v;
  for (const auto& s : block.summands()) v.push_back(CMatrix(s.size));
  return constant(block, v);
}

Element Element::sample(const Block& block,
                        const std::function<std::vector<Rational>(int, int)>& breakpoints,
                        const std::function<CMatrix(int, const GraphPoint&)>& value) {
  std::vector<SummandKnots> knots;
  for (int j = 0; j < block.count(); ++j) {
    const auto& g = *block.summand(j).base;
    SummandKnots sk;
    for (int e = 0; e < g.edge_count(); ++e) {
      std::vector<Rational> ts = breakpoints(j, e);
      ts.push_back(0);
      ts.push_back(g.edges()[e].length);
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
      EdgeKnots ek;
      for (const auto& t : ts) ek.push_back(Knot{t, value(j, g.point(e, t))});
      sk.push_back(std::move(ek));
    }
    knots.push_back(std::move(sk));
  }
  return Element(block, std::move(knots));
}

CMatrix Element::eval_at(int summand, int edge, const Rational& t) const {
  const auto& ks = knots_.at(summand).at(edge);
  if (t < 0 || t > ks.back().t) throw DomainError("element evaluated off its edge");
  auto it = std::lower_bound(ks.begin(), ks.end(), t,
                             [](const Knot& k, const Rational& x) { return k.t < x; });
  if (it->t == t) return it->value;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  return CMatrix::lerp(lo.value, hi.value, (t - lo.t) / (hi.t - lo.t));
}

CMatrix Element::eval(int summand, const GraphPoint& p) const {
  if (summand < 0 || summand >= block_.count()) throw DomainError("summand index out of range");
  if (!block_.summand(summand).base->contains(p)) throw DomainError("point is not on the summand base");
  return eval_at(summand, p.edge, p.coord);
}

Element Element::map_values(const std::function<CMatrix(const CMatrix&)>& fn) const {
  auto knots = knots_;
  for (auto& sk : knots) {
    for (auto& ek : sk) {
      for (auto& k : ek) k.value = fn(k.value);
    }
  }
  // Size may change; rebuild the block to match.
  std::vector<Summand> ss = block_.summands();
  for (size_t j = 0; j < ss.size(); ++j) ss[j].size = knots[j].front().front().value.size();
  return Element(Block(ss), std::move(knots));
}

namespace {

template <typename Op>
Element combine(const Element& a, const Element& b, Op op) {
  if (!same_block(a.block(), b.block())) throw DomainError("elements live in different blocks");
  std::vector<Element::SummandKnots> out;
  for (int j = 0; j < a.block().count(); ++j) {
    Element::SummandKnots sk;
    for (size_t e = 0; e < a.all_knots()[j].size(); ++e) {
      std::vector<Rational> ts;
      for (const auto& k : a.knots(j, e)) ts.push_back(k.t);
      for (const auto& k : b.knots(j, e)) ts.push_back(k.t);
      std::sort(ts.begin(), ts.end());
      ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
      Element::EdgeKnots ek;
      for (const auto& t : ts) ek.push_back(Knot{t, op(a.eval_at(j, e, t), b.eval_at(j, e, t))});
      sk.push_back(std::move(ek));
    }
    out.push_back(std::move(sk));
  }
  return Element(a.block(), std::move(out));
}

}  // namespace

Element operator-(const Element& a, const Element& b) {
  return combine(a, b, [](const CMatrix& x, const CMatrix& y) { return x - y; });
}

Element operator+(const Element& a, const Element& b) {
  return combine(a, b, [](const CMatrix& x, const CMatrix& y) { return x + y; });
}

bool equivalent(const Element& a, const Element& b) {
  if (!same_block(a.block_, b.block_)) return false;
  Element d = a - b;
  for (const auto& sk : d.knots_) {
    for (const auto& ek : sk) {
      for (const auto& k : ek) {
        if (!k.value.is_zero()) return false;
      }
    }
  }
  return true;
}

// The operator norm is convex along an affine segment, so its sup over a
// segment sits at a knot; Frobenius dominates it there.
NormBounds element_sup_norm_bounds(const Element& a) {
  NormBounds nb{0, 0};
  for (const auto& sk : a.all_knots()) {
    for (const auto& ek : sk) {
      for (const auto& k : ek) {
        nb.lower_sq = rmax(nb.lower_sq, k.value.max_row_col_sq());
        nb.upper_sq = rmax(nb.upper_sq, k.value.frobenius_sq());
      }
    }
  }
  return nb;
}

LipschitzBound lipschitz_bound(const Element& a) {
  Rational best = 0;
  for (const auto& sk : a.all_knots()) {
    for (const auto& ek : sk) {
      for (size_t k = 1; k < ek.size(); ++k) {
        Rational dt = ek[k].t - ek[k - 1].t;
        best = rmax(best, (ek[k].value - ek[k - 1].value).frobenius_sq() / (dt * dt));
      }
    }
  }
  return {best, sqrt_upper(best)};
}

}  // namespace ahdiag

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

#ifndef AHDIAG_TESTS_HELPERS_HPP_
#define AHDIAG_TESTS_HELPERS_HPP_

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "ahdiag/diagform.hpp"

namespace ahdiag::testing {

inline Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

// PL map from a single-edge domain into edge `target` of the codomain,
// through the knots (t_k, c_k) with t_0 = 0 and t_K = domain length.
inline PLMap knot_map(const GraphPtr& dom, const GraphPtr& cod,
                      const std::vector<std::pair<Rational, Rational>>& knots,
                      int target = 0) {
  std::vector<Piece> list;
  for (size_t k = 0; k + 1 < knots.size(); ++k) {
    list.push_back(Piece{knots[k].first, knots[k + 1].first, target, knots[k].second,
                         knots[k + 1].second});
  }
  return PLMap(dom, cod, {list});
}

class RationalRng {
 public:
  explicit RationalRng(unsigned seed) : gen_(seed) {}

  // Uniform on the grid {lo + (hi-lo) k / den : k = 0..den}.
  Rational grid(const Rational& lo, const Rational& hi, long den) {
    std::uniform_int_distribution<long> d(0, den);
    return lo + (hi - lo) * q(d(gen_), den);
  }
  long integer(long lo, long hi) {
    std::uniform_int_distribution<long> d(lo, hi);
    return d(gen_);
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Random PL self-map of the unit interval with `breaks` interior breakpoints.
inline PLMap random_interval_map(RationalRng& rng, const GraphPtr& dom, const GraphPtr& cod,
                                 int breaks) {
  std::vector<Rational> ts{0, 1};
  while (static_cast<int>(ts.size()) < breaks + 2) {
    Rational t = rng.grid(0, 1, 97);
    bool fresh = true;
    for (const auto& s : ts) fresh = fresh && s != t;
    if (fresh) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  std::vector<std::pair<Rational, Rational>> knots;
  for (const auto& t : ts) knots.push_back({t, rng.grid(0, 1, 89)});
  return knot_map(dom, cod, knots);
}


using Knots = std::vector<std::pair<Rational, Rational>>;

// Target interval of size #entries over the interval source, one tree edge.
inline DiagonalForm interval_form(const std::vector<Knots>& entries) {
  auto I = fixtures::interval();
  auto ct = build_covering_tree(I, 1);
  std::vector<DiagEntry> es;
  for (const auto& k : entries) es.push_back(DiagEntry{0, knot_map(ct.tree, I, k)});
  Block src({Summand{I, 1}});
  Block tgt({Summand{I, static_cast<int>(entries.size())}});
  return DiagonalForm(src, tgt, {TargetData{ct, es}});
}

// Signed position of every tree vertex along the unrolled circle.
inline std::vector<Rational> unrolled_positions(const CoveringTree& ct) {
  const auto& t = *ct.tree;
  std::vector<Rational> pos(t.vertex_count());
  std::vector<bool> seen(t.vertex_count(), false);
  seen[0] = true;
  for (bool grew = true; grew;) {
    grew = false;
    for (int e = 0; e < t.edge_count(); ++e) {
      const auto& ed = t.edge(e);
      const Rational step = ct.reversed[e] ? Rational(-ed.length) : ed.length;
      if (seen[ed.tail] && !seen[ed.head]) {
        pos[ed.head] = pos[ed.tail] + step, seen[ed.head] = true, grew = true;
      } else if (seen[ed.head] && !seen[ed.tail]) {
        pos[ed.tail] = pos[ed.head] - step, seen[ed.tail] = true, grew = true;
      }
    }
  }
  return pos;
}

// Tree -> unit circle S, u |-> slope * u + offset (mod 1), u the unrolled
// coordinate. |slope| <= 1 keeps each edge to at most two pieces.
inline PLMap circle_lift(const CoveringTree& ct, const GraphPtr& S, const Rational& slope,
                         const Rational& offset) {
  auto pos = unrolled_positions(ct);
  std::vector<std::vector<Piece>> pieces;
  for (int e = 0; e < ct.tree->edge_count(); ++e) {
    const auto& ed = ct.tree->edge(e);
    const Rational dir = ct.reversed[e] ? -1 : 1;
    auto value = [&](const Rational& x) -> Rational { return slope * (pos[ed.tail] + dir * x) + offset; };
    std::vector<Rational> cuts{0, ed.length};
    const Rational v0 = value(0), v1 = value(ed.length);
    Rational lo = rmin(v0, v1), hi = rmax(v0, v1);
    mpz_class n;
    mpz_fdiv_q(n.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    for (Rational k = Rational(n) + 1; k < hi; k += 1) cuts.push_back((k - v0) / (v1 - v0) * ed.length);
    std::sort(cuts.begin(), cuts.end());
    std::vector<Piece> ps;
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
      Rational a = value(cuts[c]), b = value(cuts[c + 1]);
      mpz_class fl;
      Rational m = (a + b) / 2;
      mpz_fdiv_q(fl.get_mpz_t(), m.get_num_mpz_t(), m.get_den_mpz_t());
      ps.push_back(Piece{cuts[c], cuts[c + 1], 0, a - Rational(fl), b - Rational(fl)});
    }
    pieces.push_back(std::move(ps));
  }
  return PLMap(ct.tree, S, pieces);
}

}  // namespace ahdiag::testing

#endif  // AHDIAG_TESTS_HELPERS_HPP_

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

#ifndef AHDIAG_TESTS_RANDOM_FIXTURES_HPP_
#define AHDIAG_TESTS_RANDOM_FIXTURES_HPP_

#include <string>
#include <vector>

#include "helpers.hpp"

namespace ahdiag::testing {

struct PipelineFixture {
  DiagonalForm form;
  Rational delta;
  std::string label;
};

// Random profile W -> [0,1] on a one-edge base that attains both 0 and 1;
// closed loops return to their starting value.
inline Knots random_profile(RationalRng& rng, bool loop) {
  const int inner = static_cast<int>(rng.integer(2, 3));
  std::vector<Rational> ts{0};
  for (int k = 1; k <= inner; ++k) ts.push_back(q(k, inner + 1));
  ts.push_back(1);
  Knots knots;
  for (const auto& t : ts) knots.push_back({t, rng.grid(0, 1, 6)});
  const long lo = rng.integer(1, inner);
  long hi = rng.integer(1, inner - 1);
  if (hi >= lo) ++hi;
  knots[lo].second = 0;
  knots[hi].second = 1;
  if (loop) knots.back().second = knots.front().second;
  return knots;
}

// An MH unital form over one source summand whose eigenvalue images are
// disjoint closed arcs, at least one per source edge, separated by gaps of
// length <= delta / 2, with delta = 1 / (sum m_i + 2).
inline PipelineFixture random_pipeline_fixture(RationalRng& rng) {
  static const char* kinds[] = {"interval", "circle", "star", "figure-eight"};
  for (;;) {
    const int kind = static_cast<int>(rng.integer(0, 3));
    GraphPtr Z = kind == 0   ? fixtures::interval("Z")
                 : kind == 1 ? fixtures::circle("Z")
                 : kind == 2 ? fixtures::star(3, "Z")
                             : fixtures::figure_eight("Z");
    std::vector<int> per_edge;
    int m = 0;
    for (int e = 0; e < Z->edge_count(); ++e) {
      per_edge.push_back(static_cast<int>(rng.integer(1, 2)));
      m += per_edge.back();
    }
    const Rational delta = q(1, m + 2);

    struct Arc {
      int edge;
      Rational lo, hi;
    };
    std::vector<Arc> arcs;
    for (int e = 0; e < Z->edge_count(); ++e) {
      const int k = per_edge[e];
      std::vector<Rational> gaps;
      gaps.push_back(rng.grid(0, delta / 2, 4));
      for (int a = 1; a < k; ++a) gaps.push_back(delta / 2 * q(rng.integer(1, 4), 4));
      gaps.push_back(rng.grid(0, delta / 2, 4));
      Rational room = Z->length(e);
      for (const auto& g : gaps) room -= g;
      std::vector<Rational> w;
      Rational wsum = 0;
      for (int a = 0; a < k; ++a) {
        w.push_back(q(rng.integer(1, 4)));
        wsum += w.back();
      }
      Rational at = gaps[0];
      for (int a = 0; a < k; ++a) {
        const Rational len = room * w[a] / wsum;
        arcs.push_back(Arc{e, at, at + len});
        at += len + gaps[a + 1];
      }
    }

    // Spread the arcs over one or two target summands, each nonempty.
    const int targets = m >= 2 ? static_cast<int>(rng.integer(1, 2)) : 1;
    std::vector<int> owner(arcs.size());
    for (size_t a = 0; a < arcs.size(); ++a) {
      owner[a] = a < static_cast<size_t>(targets) ? static_cast<int>(a)
                                                   : static_cast<int>(rng.integer(0, targets - 1));
    }
    std::vector<Summand> tsum;
    std::vector<TargetData> tdata;
    std::string label = std::string(kinds[kind]) + " <-";
    for (int i = 0; i < targets; ++i) {
      const bool loop = rng.integer(0, 1) == 1;
      GraphPtr W = loop ? fixtures::circle("W" + std::to_string(i))
                        : fixtures::interval("W" + std::to_string(i));
      auto ct = build_covering_tree(W, loop ? 2 : 1);
      std::vector<DiagEntry> es;
      for (size_t a = 0; a < arcs.size(); ++a) {
        if (owner[a] != i) continue;
        Knots prof = random_profile(rng, loop);
        for (auto& kv : prof) kv.second = arcs[a].lo + (arcs[a].hi - arcs[a].lo) * kv.second;
        es.push_back(DiagEntry{0, pl_compose(knot_map(W, Z, prof, arcs[a].edge), ct.projection)});
      }
      tsum.push_back(Summand{W, static_cast<int>(es.size())});
      tdata.push_back(TargetData{ct, std::move(es)});
      label += loop ? " circle" : " interval";
    }
    DiagonalForm form(Block({Summand{Z, 1}}), Block(tsum), std::move(tdata));
    // Arcs reaching a shared vertex may collide there; redraw those.
    if (!is_maximally_homogeneous(form).holds) continue;
    return PipelineFixture{std::move(form), delta, label + " m=" + std::to_string(m)};
  }
}

}  // namespace ahdiag::testing

#endif  // AHDIAG_TESTS_RANDOM_FIXTURES_HPP_

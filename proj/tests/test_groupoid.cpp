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

#include <algorithm>
#include <set>
#include <sstream>

#include "ahdiag/error.hpp"
#include "ahdiag/groupoid.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "system_fixtures.hpp"

using namespace ahdiag;
using ahdiag::testing::q;

namespace {

size_t count_substr(const std::string& s, const std::string& pat) {
  size_t k = 0;
  for (size_t at = s.find(pat); at != std::string::npos; at = s.find(pat, at + 1)) ++k;
  return k;
}

// Groupoid laws over every composable pair and triple of the stage.
void check_axioms(const GroupoidStage& st) {
  for (const auto& g : st.arrows) {
    CHECK(compose_arrows(range(g), g) == g);
    CHECK(compose_arrows(g, source(g)) == g);
    CHECK(compose_arrows(g, inverse(g)) == range(g));
    CHECK(compose_arrows(inverse(g), g) == source(g));
    for (const auto& h : st.arrows) {
      if (source(g) != range(h)) continue;
      const Arrow gh = compose_arrows(g, h);
      for (const auto& k : st.arrows) {
        if (source(h) != range(k)) continue;
        CHECK(compose_arrows(gh, k) == compose_arrows(g, compose_arrows(h, k)));
      }
    }
    // Principality: only units fix their source.
    if (!g.is_unit()) CHECK(range(g) != source(g));
  }
}

// Exact continuous cover of the unit interval by closed epsilon balls.
bool interval_covered(std::vector<Rational> xs, const Rational& eps) {
  std::sort(xs.begin(), xs.end());
  if (xs.empty() || xs.front() > eps || 1 - xs.back() > eps) return false;
  for (size_t k = 1; k < xs.size(); ++k) {
    if (xs[k] - xs[k - 1] > 2 * eps) return false;
  }
  return true;
}

// Oracle: first m at which every sample's word values cover, by brute
// force over all letter sequences evaluated one map at a time.
std::optional<int> oracle_first_dense(const GenDiagSystem& sys, const Rational& eps, int max_m) {
  for (int m = 0; m <= max_m; ++m) {
    bool all = true;
    for (const auto& z : sys.level(1 + m).components[0]->samples()) {
      std::vector<Rational> xs;
      std::vector<int> w(m, 0);
      for (;;) {
        SpacePoint p = z;
        for (int k = m - 1; k >= 0; --k) p = sys.step(1 + k).entries[w[k]].lambda.eval(p);
        xs.push_back(p[0].coord);
        int k = m - 1;
        while (k >= 0 && ++w[k] == static_cast<int>(sys.step(1 + k).entries.size())) w[k--] = 0;
        if (k < 0) break;
      }
      all = all && interval_covered(xs, eps);
    }
    if (all) return m;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("build_stage counts and projections") {
  auto g = testing::goodearl_half(5);
  auto I = g.level(1).components[0]->factor(0);
  const StageSample half{0, {I->point(0, q(1, 2))}};

  auto st0 = build_stage(g, 2, 0, {half});
  CHECK(st0.arrows.size() == 4);
  CHECK(st0.unit_count() == 2);

  auto st1 = build_stage(g, 1, 1, {half});
  CHECK(st1.arrows.size() == 2);
  CHECK(st1.unit_count() == 2);

  auto samples = all_samples(g, 3);
  auto st2 = build_stage(g, 1, 2, samples);
  for (size_t s = 0; s < samples.size(); ++s) {
    std::set<std::vector<int>> words;
    for (const auto& a : st2.arrows) {
      if (a.sample == static_cast<int>(s)) words.insert(a.word);
    }
    CHECK(words.size() == 4);
  }
  for (const auto& a : st2.arrows) {
    auto p = project(g, st2, a);
    CHECK(p.value == composite_eigenvalue(g, 1, a.word).eval(samples[a.sample].z));
    CHECK(p.k0 == a.k0);
  }

  // r_2 = 2 and s = 2 per level: #words * r_n^2 per sample.
  auto st3 = build_stage(g, 2, 3, all_samples(g, 5));
  CHECK(st3.arrows.size() == all_samples(g, 5).size() * 8 * 4);
  check_axioms(build_stage(g, 2, 2, all_samples(g, 4)));

  CHECK_THROWS_AS(build_stage(g, 3, 3, {}), DomainError);
  CHECK_THROWS_AS(build_stage(g, 1, 1, {StageSample{0, {I->point(0, q(1, 2)), I->point(0, 1)}}}), DomainError);
  CHECK_THROWS_AS(build_stage(testing::villadsen_doubling(3, true), 1, 1, {}), PreconditionError);
}

TEST_CASE("compose_arrows") {
  Arrow a{0, {0, 1}, 0, 1}, b{0, {0, 1}, 1, 2};
  CHECK(compose_arrows(a, b) == Arrow{0, {0, 1}, 0, 2});
  CHECK(compose_arrows(range(a), a) == a);
  CHECK(compose_arrows(a, inverse(a)) == range(a));
  CHECK_THROWS_AS(compose_arrows(b, a), DomainError);
  CHECK_THROWS_AS(compose_arrows(a, Arrow{1, {0, 1}, 1, 1}), DomainError);
  CHECK_THROWS_AS(compose_arrows(a, Arrow{0, {1, 1}, 1, 1}), DomainError);
}

TEST_CASE("orbits") {
  auto g = testing::goodearl_half(4);
  auto st = build_stage(g, 1, 2, all_samples(g, 3));
  for (size_t i = 0; i < st.arrows.size(); ++i) {
    for (int v = 1; v <= 3; ++v) {
      auto o = orbit(g, st, i, v);
      CHECK(static_cast<int>(o.size()) == g.level(v).rank);
      std::vector<long> ks = o.reindexed;
      std::sort(ks.begin(), ks.end());
      for (long k = 0; k < static_cast<long>(ks.size()); ++k) CHECK(ks[k] == k);
    }
  }
  CHECK_THROWS_AS(orbit(g, st, 0, 4), DomainError);

  auto v = untwist(testing::villadsen_doubling(4, true));
  auto vs = build_stage(v, 2, 2, all_samples(v, 4));
  check_axioms(vs);
  for (size_t i = 0; i < vs.arrows.size(); ++i) {
    if (!vs.arrows[i].is_unit()) continue;
    for (int b = 2; b <= 4; ++b) CHECK(static_cast<int>(orbit(v, vs, i, b).size()) == v.level(b).rank);
  }
}

TEST_CASE("check_fibrewise_bijective") {
  auto g = testing::goodearl_half(3);
  CHECK(check_fibrewise_bijective(g, 1, all_samples(g, 2)).passed());
  auto v = untwist(testing::villadsen_doubling(3, true));
  CHECK(check_fibrewise_bijective(v, 2, all_samples(v, 3)).passed());

  auto consts = g;
  consts.steps[1].entries[0] = consts.steps[1].entries[1];
  consts.steps[1].entries[0].bundle = Bundle::trivial(0);
  auto r = check_fibrewise_bijective(consts, 2, all_samples(consts, 3));
  CHECK(r.fibrewise_bijective);
  CHECK(r.surjective == Verdict::kFail);
}

TEST_CASE("density_report") {
  const Rational eps = q(1, 8);
  auto dense = testing::goodearl_dense(7);
  auto r = density_report(dense, 1, eps, 6);
  REQUIRE(r.first_dense);
  CHECK(*r.first_dense <= 6);
  CHECK(r.first_dense == oracle_first_dense(dense, eps, 6));

  auto half = testing::goodearl_half(7);
  r = density_report(half, 1, eps, 6);
  CHECK_FALSE(r.first_dense);
  for (const auto& s : r.steps) CHECK_FALSE(s.dense);
  CHECK_FALSE(oracle_first_dense(half, eps, 6));

  r = density_report(half, 1, q(2), 2);
  REQUIRE(r.first_dense);
  CHECK(*r.first_dense == 0);

  // Products: the Villadsen doubling with the constant at a vertex.
  auto v = testing::villadsen_doubling(3, false);
  CHECK(density_report(v, 1, q(1, 2), 2).steps.size() == 3);
}

TEST_CASE("exports") {
  auto g = testing::goodearl_half(4);
  auto I = g.level(1).components[0]->factor(0);
  CHECK(stage_dot(build_stage(g, 1, 1, {})) == "digraph stage {\n}\n");

  auto one = stage_dot(build_stage(g, 1, 1, {StageSample{0, {I->point(0, q(1, 2))}}}));
  CHECK(count_substr(one, "[label=") == 2);
  CHECK(count_substr(one, " -> ") == 2);
  CHECK(count_substr(one, "\"s0|0|0\" -> \"s0|0|0\"") == 1);

  auto two = stage_dot(build_stage(g, 2, 0, {StageSample{0, {I->point(0, q(1, 3))}}}));
  CHECK(count_substr(two, "[label=") == 2);
  CHECK(count_substr(two, " -> ") == 4);

  std::ostringstream csv;
  auto st = build_stage(g, 1, 2, all_samples(g, 3));
  write_orbit_csv(csv, g, st, 1);
  std::string text = csv.str();
  CHECK(text.rfind("base_level,depth,z,word,orbit_size\n", 0) == 0);
  CHECK(count_substr(text, "\n") == 1 + all_samples(g, 3).size() * 4);
  CHECK(stage_dot(st) == stage_dot(build_stage(g, 1, 2, all_samples(g, 3))));
}

TEST_CASE("parallel kernels match the serial reference") {
  auto g = testing::goodearl_dense(8);
  auto samples = all_samples(g, 8);
  auto a = build_stage(g, 2, 6, samples, Exec::kSerial);
  auto b = build_stage(g, 2, 6, samples, Exec::kParallel);
  CHECK(a.arrows == b.arrows);
  auto va = composite_values(g, a, Exec::kSerial);
  auto vb = composite_values(g, b, Exec::kParallel);
  REQUIRE(va.size() == vb.size());
  for (size_t k = 0; k < va.size(); ++k) {
    CHECK(va[k].value == vb[k].value);
    CHECK(va[k].component == vb[k].component);
  }
  auto z = g.level(1).components[0];
  auto net = space_net(*z, q(1, 64));
  std::vector<SpacePoint> vals;
  for (const auto& v : va) vals.push_back(v.value);
  for (const Rational& e : {q(1, 64), q(1, 32), q(1, 8)}) {
    CHECK(uncovered_net_points(*z, net, vals, e, Exec::kSerial) ==
          uncovered_net_points(*z, net, vals, e, Exec::kParallel));
  }
  auto da = density_report(g, 1, q(1, 16), 7, Exec::kSerial);
  auto db = density_report(g, 1, q(1, 16), 7, Exec::kParallel);
  CHECK(da.first_dense == db.first_dense);
}

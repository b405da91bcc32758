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

#include "ahdiag/covering_tree.hpp"
#include "ahdiag/error.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ahdiag;
using ahdiag::testing::q;

TEST_CASE("point_distance on interval and circle") {
  auto I = fixtures::interval();
  CHECK(point_distance(*I, I->point(0, 0), I->point(0, 1)) == 1);
  CHECK(point_distance(*I, I->point(0, q(1, 3)), I->point(0, q(1, 3))) == 0);

  auto S = fixtures::circle();
  const auto p = S->point(0, q(1, 10));
  const auto r = S->point(0, q(9, 10));
  // Oracle: the two routes around the loop.
  const Rational direct = q(9, 10) - q(1, 10);
  const Rational around = q(1, 10) + (1 - q(9, 10));
  CHECK(point_distance(*S, p, r) == std::min(direct, around));
  CHECK(point_distance(*S, p, r) == q(1, 5));
}

TEST_CASE("point_distance rejects foreign points") {
  auto I = fixtures::interval();
  CHECK_THROWS_AS(point_distance(*I, GraphPoint{0, q(3, 2)}, I->point(0, 0)), DomainError);
  CHECK_THROWS_AS(I->point(1, 0), DomainError);
}

TEST_CASE("vertex points are canonical") {
  auto Y = fixtures::star(3);
  // Leaf l1 is the head of arm a1; centre is tail of every arm.
  CHECK(Y->point(1, 0) == Y->point(2, 0));
  CHECK(Y->vertex_of(Y->point(2, 0)).value() == 0);
  CHECK(point_distance(*Y, Y->point(0, 1), Y->point(2, 1)) == 2);
  CHECK(Y->degree(0) == 3);
  auto E = fixtures::figure_eight();
  CHECK(E->degree(0) == 4);
  CHECK(E->point(0, 1) == E->point(1, 0));
}

TEST_CASE("pl_eval") {
  auto I = fixtures::interval();
  CHECK(PLMap::identity(I).eval(I->point(0, q(1, 3))) == I->point(0, q(1, 3)));
  auto half = testing::knot_map(I, I, {{0, 0}, {1, q(1, 2)}});
  CHECK(half.eval(I->point(0, 1)) == I->point(0, q(1, 2)));

  auto tent = testing::knot_map(I, I, {{0, 0}, {q(1, 2), 1}, {1, 0}});
  CHECK(tent.eval(I->point(0, q(3, 4))) == I->point(0, q(1, 2)));
  // Dense sampling against the closed form min(2t, 2 - 2t).
  for (int k = 0; k <= 200; ++k) {
    Rational t = q(k, 200);
    Rational expect = t <= q(1, 2) ? Rational(2 * t) : Rational(2 - 2 * t);
    CHECK(tent.eval(I->point(0, t)) == I->point(0, expect));
  }
}

TEST_CASE("PLMap validation") {
  auto I = fixtures::interval();
  CHECK_THROWS_AS(PLMap(I, I, {{Piece{0, q(1, 2), 0, 0, q(1, 2)}, Piece{q(1, 2), 1, 0, 1, 1}}}),
                  DomainError);
  CHECK_THROWS_AS(PLMap(I, I, {{Piece{0, 1, 0, 0, 2}}}), DomainError);
  // A map from a circle must agree at the loop's vertex.
  auto S = fixtures::circle();
  CHECK_THROWS_AS(PLMap(S, I, {{Piece{0, 1, 0, 0, 1}}}), DomainError);
  CHECK_NOTHROW(PLMap(S, S, {{Piece{0, 1, 0, 0, 1}}}));
}

TEST_CASE("pl_compose") {
  auto I = fixtures::interval();
  auto half = testing::knot_map(I, I, {{0, 0}, {1, q(1, 2)}});
  auto quarter = testing::knot_map(I, I, {{0, 0}, {1, q(1, 4)}});
  CHECK(equivalent(pl_compose(half, PLMap::identity(I)), half));
  CHECK(equivalent(pl_compose(half, half), quarter));

  testing::RationalRng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = testing::random_interval_map(rng, I, I, 5);
    auto g = testing::random_interval_map(rng, I, I, 5);
    auto fg = pl_compose(f, g);
    for (int k = 0; k < 1000; ++k) {
      auto p = I->point(0, rng.grid(0, 1, 9973));
      REQUIRE(fg.eval(p) == f.eval(g.eval(p)));
    }
  }
  auto S = fixtures::circle();
  CHECK_THROWS_AS(pl_compose(PLMap::identity(S), half), DomainError);
}

TEST_CASE("pl_compose is associative at samples") {
  auto I = fixtures::interval();
  testing::RationalRng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    auto f = testing::random_interval_map(rng, I, I, 4);
    auto g = testing::random_interval_map(rng, I, I, 4);
    auto h = testing::random_interval_map(rng, I, I, 4);
    auto left = pl_compose(pl_compose(f, g), h);
    auto right = pl_compose(f, pl_compose(g, h));
    CHECK(equivalent(left, right));
    for (int k = 0; k < 200; ++k) {
      auto p = I->point(0, rng.grid(0, 1, 1009));
      REQUIRE(left.eval(p) == right.eval(p));
    }
  }
}

TEST_CASE("pl_image") {
  auto I = fixtures::interval();
  CHECK(pl_image(PLMap::identity(I)).covers_all());
  auto c = pl_image(PLMap::constant(I, I, I->point(0, q(1, 2))));
  REQUIRE(c.intervals(0).size() == 1);
  CHECK(c.intervals(0)[0].first == q(1, 2));
  CHECK(c.intervals(0)[0].second == q(1, 2));

  auto third = testing::knot_map(I, I, {{0, 0}, {1, q(1, 3)}});
  auto img = pl_image(third);
  REQUIRE(img.intervals(0).size() == 1);
  CHECK(img.intervals(0)[0].second == q(1, 3));
  for (int k = 0; k <= 90; ++k) {
    Rational x = q(k, 90);
    CHECK(img.contains(I->point(0, x)) == (x <= q(1, 3)));
  }
  auto gaps = img.complement_intervals();
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0] == OpenInterval{0, q(1, 3), 1});
  CHECK(img.uncovered_vertices() == std::vector<int>{1});
}

TEST_CASE("images contain every evaluated point") {
  auto I = fixtures::interval();
  testing::RationalRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = testing::random_interval_map(rng, I, I, 6);
    auto img = pl_image(f);
    for (int k = 0; k < 100; ++k) {
      REQUIRE(img.contains(f.eval(I->point(0, rng.grid(0, 1, 1013)))));
    }
  }
}

TEST_CASE("pl_sup_distance") {
  auto I = fixtures::interval();
  auto id = PLMap::identity(I);
  auto half = testing::knot_map(I, I, {{0, 0}, {1, q(1, 2)}});
  CHECK(pl_sup_distance(id, id).value == 0);
  auto d = pl_sup_distance(id, half);
  CHECK(d.value == q(1, 2));
  CHECK(d.witness == I->point(0, 1));
  auto c1 = PLMap::constant(I, I, I->point(0, q(1, 8)));
  auto c2 = PLMap::constant(I, I, I->point(0, q(5, 8)));
  CHECK(pl_sup_distance(c1, c2).value == q(1, 2));

  // On a circle the distance wraps: sampling oracle over a fine grid.
  auto S = fixtures::circle();
  auto f = testing::knot_map(S, S, {{0, 0}, {1, 1}});
  auto g = testing::knot_map(S, S, {{0, 0}, {q(1, 2), q(1, 10)}, {1, 1}});
  auto sup = pl_sup_distance(f, g);
  Rational sampled = 0;
  for (int k = 0; k <= 1000; ++k) {
    auto p = S->point(0, q(k, 1000));
    sampled = rmax(sampled, point_distance(*S, f.eval(p), g.eval(p)));
  }
  CHECK(sampled <= sup.value);
  CHECK(sup.value - sampled <= q(1, 500));
  CHECK(point_distance(*S, f.eval(sup.witness), g.eval(sup.witness)) == sup.value);
}

TEST_CASE("pl_sup_distance is a metric on random triples") {
  auto I = fixtures::interval();
  testing::RationalRng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto f = testing::random_interval_map(rng, I, I, 3);
    auto g = testing::random_interval_map(rng, I, I, 3);
    auto h = testing::random_interval_map(rng, I, I, 3);
    auto fg = pl_sup_distance(f, g).value;
    CHECK(fg == pl_sup_distance(g, f).value);
    CHECK(pl_sup_distance(f, h).value <= fg + pl_sup_distance(g, h).value);
    CHECK((fg == 0) == equivalent(f, g));
  }
}

TEST_CASE("covering trees") {
  auto I = fixtures::interval();
  auto ti = build_covering_tree(I, 1);
  CHECK(ti.tree->edge_count() == 1);
  CHECK(ti.tree->is_tree());
  CHECK(ti.projection.eval(ti.tree->point(0, q(1, 3))) == I->point(0, q(1, 3)));

  auto S = fixtures::circle();
  auto ts = build_covering_tree(S, 2);
  CHECK(ts.tree->edge_count() == 4);
  CHECK(ts.tree->is_tree());
  for (int v = 0; v < ts.tree->vertex_count(); ++v) CHECK(ts.tree->degree(v) <= 2);
  CHECK(pl_image(ts.projection).covers_all());
  CHECK(ts.projection.max_slope() == 1);

  auto E = fixtures::figure_eight();
  auto te = build_covering_tree(E, 1);
  CHECK(te.tree->edge_count() == 4);
  CHECK(te.tree->degree(0) == 4);

  CHECK_THROWS_AS(build_covering_tree(fixtures::path(3), 2), DomainError);
  CHECK_NOTHROW(build_covering_tree(fixtures::path(3), 3));
}

TEST_CASE("fiber") {
  auto I = fixtures::interval();
  auto ti = build_covering_tree(I, 1);
  CHECK(fiber(ti, I->point(0, q(1, 2))).size() == 1);

  auto S = fixtures::circle();
  auto ts = build_covering_tree(S, 2);
  auto w = S->point(0, q(1, 3));
  auto fib = fiber(ts, w);
  CHECK(fib.size() == 4);
  for (const auto& t : fib) CHECK(ts.projection.eval(t) == w);
  auto vfib = fiber(ts, S->vertex_point(0));
  CHECK(vfib.size() == 5);

  // Every tree point and every point of its fiber project to the same place.
  for (int e = 0; e < ts.tree->edge_count(); ++e) {
    for (int k = 0; k <= 6; ++k) {
      auto t = ts.tree->point(e, q(k, 6));
      auto base = ts.projection.eval(t);
      auto f = fiber(ts, base);
      CHECK(std::find(f.begin(), f.end(), t) != f.end());
      for (const auto& tk : f) CHECK(ts.projection.eval(tk) == base);
    }
  }
}

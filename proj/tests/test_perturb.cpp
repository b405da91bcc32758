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

#include "ahdiag/error.hpp"
#include "ahdiag/perturb.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "random_fixtures.hpp"

using namespace ahdiag;
using ahdiag::testing::interval_form;
using ahdiag::testing::q;

namespace {

// Postconditions of the surjective perturbation, all exact.
void check_properties(const DiagonalForm& in, const SurjectiveResult& out) {
  CHECK(check_unital_injective(out.form).unital);
  CHECK(check_unital_injective(out.form).injective);
  CHECK(is_maximally_homogeneous(out.form).holds);
  CHECK(verify_descent(out.form).holds);
  Rational worst = 0;
  for (int i = 0; i < in.target().count(); ++i) {
    for (size_t s = 0; s < in.at(i).entries.size(); ++s) {
      worst = rmax(worst, pl_sup_distance(in.at(i).entries[s].map, out.form.at(i).entries[s].map).value);
    }
  }
  CHECK(worst == out.log.bound);
  CHECK(out.log.bound <= out.log.delta + out.log.rho);
}

// Circle target over an interval source: entries g_k o projection with
// images [0,1/4], [7/20,3/5], [7/10,1].
DiagonalForm circle_over_interval() {
  auto S = fixtures::circle();
  auto I = fixtures::interval();
  auto ct = build_covering_tree(S, 2);
  auto bump = [&](const Rational& lo, const Rational& hi) {
    return pl_compose(testing::knot_map(S, I, {{0, lo}, {q(1, 2), hi}, {1, lo}}), ct.projection);
  };
  return DiagonalForm(Block({Summand{I, 1}}), Block({Summand{S, 3}}),
                      {TargetData{ct,
                                  {DiagEntry{0, bump(0, q(1, 4))},
                                   DiagEntry{0, bump(q(7, 20), q(3, 5))},
                                   DiagEntry{0, bump(q(7, 10), 1)}}}});
}

// Two points on a tripod trading places once around the circle: the
// entries descend only up to a transposition on alternate fiber copies.
DiagonalForm tripod_swap() {
  auto S = fixtures::circle();
  auto Y = fixtures::star(3);
  auto ct = build_covering_tree(S, 2);
  const Rational far = q(7, 8);
  // Arm k has tail at the centre, coordinate 0 there.
  std::vector<Piece> p{Piece{0, q(1, 6), 0, far, 0},       Piece{q(1, 6), q(1, 3), 2, 0, far},
                       Piece{q(1, 3), q(2, 3), 2, far, far}, Piece{q(2, 3), q(5, 6), 2, far, 0},
                       Piece{q(5, 6), 1, 1, 0, far}};
  std::vector<Piece> r{Piece{0, q(1, 3), 1, far, far}, Piece{q(1, 3), q(1, 2), 1, far, 0},
                       Piece{q(1, 2), q(2, 3), 0, 0, far}, Piece{q(2, 3), 1, 0, far, far}};
  auto pos = testing::unrolled_positions(ct);
  std::vector<std::vector<Piece>> e1, e2;
  for (int te = 0; te < ct.tree->edge_count(); ++te) {
    const auto& ed = ct.tree->edge(te);
    Rational start = rmin(pos[ed.tail], pos[ed.head]);
    mpz_class k = start.get_num() / start.get_den();
    if (start < 0 && Rational(k) != start) k -= 1;
    const bool even = mpz_class(k % 2) == 0;
    // Tree coordinate runs with u unless the edge is laid out backwards.
    const bool backwards = pos[ed.head] < pos[ed.tail];
    auto place = [&](const std::vector<Piece>& ps) {
      if (!backwards) return ps;
      std::vector<Piece> out;
      for (auto it = ps.rbegin(); it != ps.rend(); ++it) {
        out.push_back(Piece{1 - it->t1, 1 - it->t0, it->target, it->c1, it->c0});
      }
      return out;
    };
    e1.push_back(place(even ? p : r));
    e2.push_back(place(even ? r : p));
  }
  return DiagonalForm(Block({Summand{Y, 1}}), Block({Summand{S, 2}}),
                      {TargetData{ct, {DiagEntry{0, PLMap(ct.tree, Y, e1)},
                                       DiagEntry{0, PLMap(ct.tree, Y, e2)}}}});
}

}  // namespace

TEST_CASE("gap_decomposition") {
  CHECK(gap_decomposition(interval_form({{{0, 0}, {1, q(1, 2)}}, {{0, q(1, 2)}, {1, 1}}}), 0).count() == 0);

  auto gd = gap_decomposition(interval_form({{{0, 0}, {1, q(1, 3)}}, {{0, q(2, 3)}, {1, 1}}}), 0);
  REQUIRE(gd.count() == 1);
  CHECK(gd.gaps[0].interval == OpenInterval{0, q(1, 3), q(2, 3)});
  CHECK(gd.gaps[0].length() == q(1, 3));

  auto S = fixtures::circle();
  auto I = fixtures::interval();
  auto ct = build_covering_tree(I, 1);
  DiagonalForm pts(Block({Summand{S, 1}}), Block({Summand{I, 2}}),
                   {TargetData{ct, {DiagEntry{0, PLMap::constant(ct.tree, S, S->point(0, 0))},
                                    DiagEntry{0, PLMap::constant(ct.tree, S, S->point(0, q(1, 2)))}}}});
  gd = gap_decomposition(pts, 0);
  REQUIRE(gd.count() == 2);
  CHECK(gd.gaps[0].interval == OpenInterval{0, 0, q(1, 2)});
  CHECK(gd.gaps[1].interval == OpenInterval{0, q(1, 2), 1});
}

TEST_CASE("maximal_chains") {
  auto I = fixtures::interval();
  auto apart = gap_decomposition(
      interval_form({{{0, 0}, {1, q(1, 5)}}, {{0, q(2, 5)}, {1, q(3, 5)}}, {{0, q(4, 5)}, {1, 1}}}), 0);
  auto cs = maximal_chains(apart, *I);
  REQUIRE(cs.chains.size() == 2);
  for (const auto& c : cs.chains) {
    CHECK(c.gaps.size() == 1);
    CHECK(c.kind == ChainKind::kLineInterior);
  }

  auto joined = gap_decomposition(
      interval_form({{{0, 0}, {1, q(1, 4)}}, {{0, q(3, 8)}, {1, q(3, 8)}}, {{0, q(1, 2)}, {1, 1}}}), 0);
  cs = maximal_chains(joined, *I);
  REQUIRE(cs.chains.size() == 1);
  CHECK(cs.chains[0].gaps.size() == 2);
  CHECK(cs.chains[0].kind == ChainKind::kLineInterior);

  // Three arms with gaps at the centre, which a constant covers.
  auto Y = fixtures::star(3);
  auto ct = build_covering_tree(I, 1);
  std::vector<DiagEntry> es{DiagEntry{0, PLMap::constant(ct.tree, Y, Y->vertex_point(0))}};
  for (int a = 0; a < 3; ++a) {
    es.push_back(DiagEntry{0, testing::knot_map(ct.tree, Y, {{0, q(1, 10)}, {1, 1}}, a)});
  }
  DiagonalForm star(Block({Summand{Y, 1}}), Block({Summand{I, 4}}), {TargetData{ct, es}});
  auto sg = gap_decomposition(star, 0);
  CHECK(sg.count() == 3);
  cs = maximal_chains(sg, *Y);
  REQUIRE(cs.chains.size() == 1);
  CHECK(cs.chains[0].kind == ChainKind::kAsteriskVertexCovered);
  CHECK(cs.chains[0].vertex == 0);

  // Same arms with the centre left open.
  es.erase(es.begin());
  es.push_back(DiagEntry{0, PLMap::constant(ct.tree, Y, Y->point(0, 1))});
  DiagonalForm open(Block({Summand{Y, 1}}), Block({Summand{I, 4}}), {TargetData{ct, es}});
  cs = maximal_chains(gap_decomposition(open, 0), *Y);
  REQUIRE(cs.chains.size() == 1);
  CHECK(cs.chains[0].kind == ChainKind::kAsteriskVertexInGap);
}

TEST_CASE("select_anchor") {
  auto phi = interval_form({{{0, 0}, {1, q(1, 3)}}, {{0, q(2, 3)}, {1, 1}}});
  auto gd = gap_decomposition(phi, 0);
  auto a = select_anchor(phi, 0, gd.gaps[0]);
  CHECK(a.entry == 0);
  CHECK(a.t == 1);
  CHECK(a.value == GraphPoint{0, q(1, 3)});

  auto c = interval_form({{{0, 0}, {1, q(1, 4)}}, {{0, q(3, 8)}, {1, q(3, 8)}}, {{0, q(1, 2)}, {1, 1}}});
  auto cg = gap_decomposition(c, 0);
  CHECK(select_anchor(c, 0, cg.gaps[1]).entry == 1);

  // Both entries reach 1/2; the lower index wins.
  auto tie = interval_form({{{0, q(1, 4)}, {1, q(1, 2)}}, {{0, q(1, 2)}, {1, q(1, 4)}}, {{0, q(3, 5)}, {1, 1}}});
  CHECK_FALSE(is_maximally_homogeneous(tie).holds);
  auto tg = gap_decomposition(tie, 0);
  REQUIRE(tg.count() == 2);
  CHECK(select_anchor(tie, 0, tg.gaps[1]).entry == 0);
}

TEST_CASE("tent_graft covers the gap") {
  auto phi = interval_form({{{0, 0}, {1, q(1, 3)}}, {{0, q(2, 3)}, {1, 1}}});
  auto gap = gap_decomposition(phi, 0).gaps[0];
  auto g = tent_graft(phi, 0, 0, 0, q(3, 4), 1, q(7, 8), gap.interval, true);
  auto out = descend(phi, 0, {g});
  CHECK(check_unital_injective(out).injective);
  const auto& w = out.at(0).entries[0].map;
  CHECK(w.eval_at(0, q(7, 8)) == GraphPoint{0, q(2, 3)});
  // Reaches 2/3 only at t' and agrees with lambda outside V.
  for (int k = 0; k <= 400; ++k) {
    Rational t = q(k, 400);
    if (t != q(7, 8)) CHECK(w.eval_at(0, t).coord < q(2, 3));
    if (t <= q(3, 4)) CHECK(w.eval_at(0, t) == phi.at(0).entries[0].map.eval_at(0, t));
    CHECK(w.eval_at(0, t).coord >= phi.at(0).entries[0].map.eval_at(0, t).coord);
  }
}

TEST_CASE("descend replicates onto every fiber copy") {
  auto phi = circle_over_interval();
  CHECK(is_maximally_homogeneous(phi).holds);
  CHECK(verify_strict_descent(phi).holds);
  auto res = make_surjective_mh(phi, q(1, 5));
  check_properties(phi, res);
  CHECK(verify_strict_descent(res.form).holds);
  int tents = 0;
  for (const auto& r : res.log.records) {
    if (r.kind != RecordKind::kTent) continue;
    ++tents;
    CHECK(r.copies.size() == 4);
    for (const auto& c : r.copies) CHECK(c.entry == r.entry);
  }
  CHECK(tents == 2);
}

TEST_CASE("descend follows a transposition of entries") {
  auto phi = tripod_swap();
  CHECK(is_maximally_homogeneous(phi).holds);
  CHECK(verify_descent(phi).holds);
  CHECK_FALSE(verify_strict_descent(phi).holds);
  auto res = make_surjective_mh(phi, q(1, 4));
  check_properties(phi, res);
  bool swapped = false;
  for (const auto& r : res.log.records) {
    for (const auto& c : r.copies) swapped = swapped || c.entry != r.entry;
  }
  CHECK(swapped);
}

TEST_CASE("repair_distinctness") {
  auto clean = interval_form({{{0, 0}, {1, q(1, 2)}}, {{0, q(1, 2)}, {1, 1}}});
  std::vector<PerturbationRecord> recs;
  auto same = repair_distinctness(clean, q(1, 100), &recs);
  CHECK(recs.empty());
  CHECK(equivalent(same.at(0).entries[0].map, clean.at(0).entries[0].map));

  // t/2 meets the constant 1/2 at the tree leaf t = 1.
  auto edge = interval_form({{{0, 0}, {1, q(1, 2)}}, {{0, q(1, 2)}, {1, q(1, 2)}}});
  REQUIRE(is_maximally_homogeneous(edge).witnesses.size() == 1);
  auto fixed = repair_distinctness(edge, q(1, 100), &recs);
  CHECK(is_maximally_homogeneous(fixed).holds);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].entry == 1);
  CHECK(recs[0].reached == GraphPoint{0, q(51, 100)});
  CHECK(pl_sup_distance(edge.at(0).entries[1].map, fixed.at(0).entries[1].map).value == q(1, 100));

  recs.clear();
  auto twice = interval_form({{{0, 0}, {q(1, 4), q(1, 4)}, {q(1, 2), 0}, {q(3, 4), q(1, 4)}, {1, 0}},
                              {{0, q(1, 4)}, {1, q(1, 4)}},
                              {{0, q(1, 2)}, {1, 1}}});
  CHECK(is_maximally_homogeneous(twice).witnesses.size() == 2);
  CHECK(is_maximally_homogeneous(repair_distinctness(twice, q(1, 100), &recs)).holds);
  CHECK(recs.size() == 2);

  auto crossing = interval_form({{{0, 0}, {1, 1}}, {{0, q(1, 2)}, {1, q(1, 2)}}});
  CHECK_THROWS_AS(repair_distinctness(crossing, q(1, 100)), InvalidInput);
}

TEST_CASE("make_surjective_mh") {
  auto done = interval_form({{{0, 0}, {1, q(1, 2)}}, {{0, q(1, 2)}, {1, 1}}});
  auto same = make_surjective_mh(done, q(1, 4));
  CHECK(same.log.bound == 0);
  CHECK(same.log.records.empty());

  auto thirds = interval_form({{{0, 0}, {1, q(1, 3)}}, {{0, q(2, 3)}, {1, 1}}});
  auto res = make_surjective_mh(thirds, q(1, 3), q(1, 100));
  check_properties(thirds, res);
  CHECK(res.log.bound <= q(1, 3) + q(1, 100));

  // Idempotent on its own output.
  auto again = make_surjective_mh(res.form, q(1, 3));
  CHECK(again.log.bound == 0);
  for (size_t s = 0; s < 2; ++s) {
    CHECK(equivalent(again.form.at(0).entries[s].map, res.form.at(0).entries[s].map));
  }

  // The distance bound tracks the certified bound.
  Element x(thirds.source(), {{{Knot{0, CMatrix::scalar(1, 0)}, Knot{1, CMatrix::scalar(1, 1)}}}});
  CHECK(diagform_distance_bound(thirds, res.form, {x}) <= lipschitz_bound(x).upper * res.log.bound);
}

TEST_CASE("chain cascade through a constant entry") {
  auto c = interval_form({{{0, 0}, {1, q(1, 4)}}, {{0, q(3, 8)}, {1, q(3, 8)}}, {{0, q(1, 2)}, {1, 1}}});
  auto res = make_surjective_mh(c, q(1, 4));
  check_properties(c, res);
  std::vector<int> tent_entries;
  for (const auto& r : res.log.records) {
    if (r.kind == RecordKind::kTent) tent_entries.push_back(r.entry);
  }
  CHECK(tent_entries == std::vector<int>{0, 1});
  CHECK(res.log.chains[0].longest() <= 3);
}

TEST_CASE("delta gate") {
  auto I = fixtures::interval();
  auto ct = build_covering_tree(I, 1);
  std::vector<DiagEntry> es;
  for (int k = 0; k < 4; ++k) {
    es.push_back(DiagEntry{0, testing::knot_map(ct.tree, I, {{0, q(k, 4)}, {1, q(k + 1, 4)}})});
  }
  DiagonalForm four(Block({Summand{I, 1}}), Block({Summand{I, 4}}), {TargetData{ct, es}});
  CHECK(delta_bound(four) == q(1, 4));
  try {
    make_surjective_mh(four, q(1, 4));
    FAIL("expected a parameter error");
  } catch (const ParameterError& e) {
    CHECK(std::string(e.what()).find("delta < 1/4") != std::string::npos);
  }
  CHECK_NOTHROW(make_surjective_mh(four, q(1, 5)));

  auto wide = interval_form({{{0, 0}, {1, q(1, 5)}}, {{0, q(3, 5)}, {1, 1}}});
  CHECK_THROWS_AS(make_surjective_mh(wide, q(1, 3)), InvalidInput);
  auto cross = interval_form({{{0, 0}, {1, 1}}, {{0, 1}, {1, 0}}});
  CHECK_THROWS_AS(make_surjective_mh(cross, q(1, 3)), InvalidInput);
}

TEST_CASE("randomized pipeline fixtures") {
  testing::RationalRng rng(20261019);
  for (int n = 0; n < 12; ++n) {
    auto fx = testing::random_pipeline_fixture(rng);
    INFO(fx.label);
    auto res = make_surjective_mh(fx.form, fx.delta);
    check_properties(fx.form, res);
    for (const auto& c : res.log.chains) CHECK(c.longest() <= fx.form.target().total_size());
  }
}

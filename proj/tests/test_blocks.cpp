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

#include <cmath>
#include <complex>
#include <random>

#include "ahdiag/block.hpp"
#include "ahdiag/error.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ahdiag;
using ahdiag::testing::q;

namespace {

Block interval_block(int n) { return Block({Summand{fixtures::interval(), n}}); }

// Scalar element given by knots on the interval.
Element scalar_knots(int n, const std::vector<std::pair<Rational, Rational>>& ks) {
  Element::EdgeKnots ek;
  for (const auto& [t, v] : ks) ek.push_back(Knot{t, CMatrix::scalar(n, CRational(v))});
  return Element(interval_block(n), {{ek}});
}

double to_d(const Rational& r) { return r.get_d(); }

// Largest singular value by power iteration on M^* M (test-only numerics).
double numeric_op_norm(const CMatrix& m) {
  const int n = m.size();
  using C = std::complex<double>;
  std::vector<C> a(n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a[r * n + c] = C(to_d(m(r, c).re), to_d(m(r, c).im));
  std::vector<C> x(n, C(1.0, 0.3));
  double lambda = 0;
  for (int it = 0; it < 200; ++it) {
    std::vector<C> y(n), z(n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) y[r] += a[r * n + c] * x[c];
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) z[c] += std::conj(a[r * n + c]) * y[r];
    double nz = 0;
    for (auto& v : z) nz += std::norm(v);
    nz = std::sqrt(nz);
    if (nz == 0) return 0;
    for (int k = 0; k < n; ++k) x[k] = z[k] / nz;
    lambda = nz;
  }
  return std::sqrt(lambda);
}

}  // namespace

TEST_CASE("element_eval") {
  auto one = Element::identity(interval_block(2));
  CHECK(one.eval(0, fixtures::interval()->point(0, q(2, 7))) == CMatrix::identity(2));

  auto f = scalar_knots(2, {{0, 0}, {1, 1}});
  CHECK(f.eval_at(0, 0, q(1, 2)) == CMatrix::scalar(2, q(1, 2)));

  Element::EdgeKnots ek{Knot{0, CMatrix(2)}, Knot{1, CMatrix::unit(2, 0, 0)}};
  Element e(interval_block(2), {{ek}});
  CHECK(e.eval_at(0, 0, q(1, 4)) == q(1, 4) * CMatrix::unit(2, 0, 0));

  CHECK_THROWS_AS(e.eval(1, fixtures::interval()->point(0, 0)), DomainError);
  CHECK_THROWS_AS(e.eval(0, GraphPoint{0, 2}), DomainError);
}

TEST_CASE("elements must be continuous at vertices") {
  auto S = fixtures::circle();
  Block b({Summand{S, 1}});
  Element::EdgeKnots bad{Knot{0, CMatrix::scalar(1, 0)}, Knot{1, CMatrix::scalar(1, 1)}};
  CHECK_THROWS_AS(Element(b, {{bad}}), InvalidInput);
  Element::EdgeKnots good{Knot{0, CMatrix::scalar(1, 0)}, Knot{q(1, 2), CMatrix::scalar(1, 1)},
                          Knot{1, CMatrix::scalar(1, 0)}};
  CHECK_NOTHROW(Element(b, {{good}}));
}

TEST_CASE("element_sup_norm_bounds") {
  auto z = Element::zero(interval_block(3));
  CHECK(element_sup_norm_bounds(z).lower_sq == 0);
  CHECK(element_sup_norm_bounds(z).upper_sq == 0);

  auto id = element_sup_norm_bounds(Element::identity(interval_block(2)));
  CHECK(id.lower_sq == 1);
  CHECK(id.upper_sq == 2);
  CHECK(id.lower() == 1);
  CHECK(id.upper() * id.upper() >= 2);

  auto d = Element::constant(interval_block(2), {CMatrix::diagonal({1, 0})});
  CHECK(element_sup_norm_bounds(d).lower_sq == 1);
  CHECK(element_sup_norm_bounds(d).upper_sq == 1);
}

TEST_CASE("norm bounds bracket a numeric operator norm at random points") {
  testing::RationalRng rng(17);
  auto I = fixtures::interval();
  for (int trial = 0; trial < 10; ++trial) {
    Element::EdgeKnots ek;
    for (Rational t : {q(0), q(1, 3), q(1)}) {
      CMatrix m(3);
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = CRational(rng.grid(-1, 1, 10), rng.grid(-1, 1, 10));
      ek.push_back(Knot{t, m});
    }
    Element a(interval_block(3), {{ek}});
    auto nb = element_sup_norm_bounds(a);
    double lo = std::sqrt(to_d(nb.lower_sq)), hi = std::sqrt(to_d(nb.upper_sq));
    double sampled_max = 0;
    for (int k = 0; k < 1000; ++k) {
      double v = numeric_op_norm(a.eval(0, I->point(0, rng.grid(0, 1, 10007))));
      CHECK(v <= hi + 1e-9);
      sampled_max = std::max(sampled_max, v);
    }
    // The sup is attained at a knot; knots are in the sample set below.
    for (const auto& k : ek) sampled_max = std::max(sampled_max, numeric_op_norm(k.value));
    CHECK(lo <= sampled_max + 1e-9);
    CHECK(sampled_max <= hi + 1e-9);
  }
}

TEST_CASE("lipschitz_bound") {
  CHECK(lipschitz_bound(Element::identity(interval_block(2))).lip_sq == 0);
  auto f = scalar_knots(1, {{0, 0}, {1, 1}});
  CHECK(lipschitz_bound(f).upper == 1);
  auto tent = scalar_knots(1, {{0, 0}, {q(1, 2), 1}, {1, 0}});
  CHECK(lipschitz_bound(tent).upper == 2);
  // Finite-difference oracle.
  Rational worst = 0;
  for (int k = 0; k < 100; ++k) {
    Rational s = q(k, 100), t = q(k + 1, 100);
    Rational d = (tent.eval_at(0, 0, t) - tent.eval_at(0, 0, s))(0, 0).re / (t - s);
    worst = rmax(worst, rabs(d));
  }
  CHECK(worst == 2);
}

TEST_CASE("Lipschitz property holds exactly at sampled pairs") {
  testing::RationalRng rng(23);
  auto E = fixtures::figure_eight();
  Block b({Summand{E, 2}});
  for (int trial = 0; trial < 5; ++trial) {
    // Vertex value shared by all edge ends.
    CMatrix at_v(2);
    at_v(0, 1) = CRational(rng.grid(-1, 1, 7), rng.grid(-1, 1, 7));
    Element::SummandKnots sk;
    for (int e = 0; e < 2; ++e) {
      CMatrix mid(2);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) mid(r, c) = CRational(rng.grid(-2, 2, 9), 0);
      sk.push_back({Knot{0, at_v}, Knot{rng.grid(q(1, 5), q(4, 5), 12), mid}, Knot{1, at_v}});
    }
    Element a(b, {sk});
    Rational lip_sq = lipschitz_bound(a).lip_sq;
    for (int k = 0; k < 300; ++k) {
      auto p = E->point(rng.integer(0, 1), rng.grid(0, 1, 101));
      auto r = E->point(rng.integer(0, 1), rng.grid(0, 1, 101));
      Rational d = point_distance(*E, p, r);
      REQUIRE((a.eval(0, p) - a.eval(0, r)).frobenius_sq() <= lip_sq * d * d);
    }
  }
}

TEST_CASE("element arithmetic merges breakpoints") {
  auto f = scalar_knots(1, {{0, 0}, {q(1, 3), 1}, {1, 1}});
  auto g = scalar_knots(1, {{0, 1}, {q(1, 2), 0}, {1, 0}});
  auto h = f - g;
  CHECK(h.knots(0, 0).size() == 4);
  for (int k = 0; k <= 60; ++k) {
    Rational t = q(k, 60);
    CHECK(h.eval_at(0, 0, t) == f.eval_at(0, 0, t) - g.eval_at(0, 0, t));
  }
  CHECK(equivalent(h + g, f));
}

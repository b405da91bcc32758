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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ahdiag/textio.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "random_fixtures.hpp"
#include "system_fixtures.hpp"

using namespace ahdiag;
using ahdiag::testing::q;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// serialize is a fixed point after one parse.
void round_trip(const Document& doc) {
  const std::string once = serialize(doc);
  Document back = parse_document(once);
  CHECK(serialize(back) == once);
}

std::vector<SchemaIssue> issues_of(const std::string& text) {
  try {
    parse_document(text);
  } catch (const SchemaError& e) {
    return e.issues();
  }
  return {};
}

const char* kMinimal =
    "ahdiag 1\n"
    "graph I\n  vertices a b\n  edge e a b\nend\n"
    "block A\n  summand I 1\nend\n";

}  // namespace

TEST_CASE("minimal document and rationals") {
  Document d = parse_document(kMinimal);
  REQUIRE(d.graphs.size() == 1);
  CHECK(d.graph("I")->edge_count() == 1);
  CHECK(d.block("A").count() == 1);

  Document p = parse_document("ahdiag 1\nparam delta 2/6\ngraph I\n vertices a b\n edge e a b 1/3\nend\n");
  CHECK(p.graph("I")->length(0) == q(1, 3));
  const std::string text = serialize(p);
  CHECK(text.find("edge e a b 1/3") != std::string::npos);
  CHECK(parse_document(text).graph("I")->length(0) == q(1, 3));
  CHECK(*p.param("delta") == "2/6");

  const GraphPtr I = p.graph("I");
  CHECK(point_token(*I, parse_point(*I, "e:1/6")) == "e:1/6");
  CHECK_THROWS_AS(parse_point(*I, "f:0"), DomainError);
  CHECK_THROWS_AS(parse_point(*I, "e:1/2"), DomainError);
}

TEST_CASE("schema errors carry lines and names") {
  auto missing = issues_of("ahdiag 1\nblock A\n  summand Q 1\nend\n");
  REQUIRE(missing.size() == 1);
  CHECK(missing[0].line == 3);
  CHECK(missing[0].message.find("'Q'") != std::string::npos);

  auto header = issues_of("graph I\nend\n");
  REQUIRE(header.size() == 1);
  CHECK(header[0].line == 1);

  // Independent problems are all reported.
  auto many = issues_of(std::string(kMinimal) + "bogus\nblock A\n  summand I 1\nend\nblock C\n  summand I x\nend\n");
  REQUIRE(many.size() == 3);
  CHECK(many[0].line == 9);
  CHECK(many[1].line == 10);
  CHECK(many[2].line == 14);

  auto unterminated = issues_of("ahdiag 1\ngraph I\n  vertices a\n");
  REQUIRE(unterminated.size() == 1);
  CHECK(unterminated[0].line == 2);

  CHECK_THROWS_AS(read_document("/nonexistent/x.ahd"), IoError);
}

TEST_CASE("thirds fixture") {
  Document d = read_document(AHDIAG_FIXTURES "/thirds.ahd");
  const DiagonalForm& phi = d.form("phi").form;
  CHECK(is_maximally_homogeneous(phi).holds);
  auto rep = check_unital_injective(phi);
  CHECK(rep.unital);
  CHECK_FALSE(rep.injective);
  REQUIRE(rep.gaps.size() == 1);
  REQUIRE(rep.gaps[0].intervals.size() == 1);
  CHECK(rep.gaps[0].intervals[0].lo == q(1, 3));
  CHECK(rep.gaps[0].intervals[0].hi == q(2, 3));
  Element y = apply_diagform(phi, d.element("x"));
  const GraphPoint mid = d.graph("I")->point(0, q(1, 2));
  CHECK(y.eval(0, mid) == CMatrix::diagonal({CRational(q(1, 6)), CRational(q(5, 6))}));
  round_trip(d);
  CHECK(serialize(parse_document(slurp(AHDIAG_FIXTURES "/thirds.ahd"))) == serialize(d));
}

TEST_CASE("generated systems round-trip") {
  for (const auto& [id, sys] :
       std::vector<std::pair<std::string, GenDiagSystem>>{{"goodearl", ahdiag::testing::goodearl_dense(4)},
                                                          {"villadsen1", ahdiag::testing::villadsen_doubling(3, false)},
                                                          {"villadsen2", ahdiag::testing::villadsen_doubling(3, true)}}) {
    CAPTURE(id);
    Document d;
    d.add_system(id, sys);
    round_trip(d);
    Document back = parse_document(serialize(d));
    const GenDiagSystem& s2 = back.system(id);
    REQUIRE(s2.level_count() == sys.level_count());
    for (int n = 1; n < sys.level_count(); ++n) {
      const auto& a = sys.step(n).entries;
      const auto& b = s2.step(n).entries;
      REQUIRE(a.size() == b.size());
      for (size_t y = 0; y < a.size(); ++y) {
        CHECK(a[y].bundle.kind == b[y].bundle.kind);
        for (const auto& z : sys.level(n + 1).components[a[y].component]->samples()) {
          CHECK(a[y].lambda.eval(z) == b[y].lambda.eval(z));
        }
      }
    }
  }
}

TEST_CASE("dynamics system with custom samples") {
  auto I = fixtures::interval();
  DynamicsParams p{ahdiag::testing::knot_map(I, I, {{0, 0}, {q(1, 2), 1}, {1, 0}}), 3, 2};
  GenDiagSystem sys = generate_dynamics(p);
  auto& c = sys.levels[1].components[0];
  c = c->with_samples({{I->point(0, q(1, 7))}, {I->point(0, q(5, 7))}});
  Document d;
  d.add_system("dyn", sys);
  const std::string text = serialize(d);
  CHECK(text.find("sample 2 0 e:1/7") != std::string::npos);
  round_trip(d);
  CHECK(parse_document(text).system("dyn").level(2).components[0]->samples().size() == 2);
}

TEST_CASE("pairs and pipeline fixtures round-trip") {
  Document d;
  d.add_pair("sched", ahdiag::testing::perturbation_schedule(3));
  round_trip(d);
  FiniteSystemPair back = parse_document(serialize(d)).pair("sched");
  auto rep = check_approx_intertwining(back, 3);
  CHECK(rep.overall() == Intertwining::kSatisfied);

  ahdiag::testing::RationalRng rng(7);
  for (int k = 0; k < 10; ++k) {
    auto fx = ahdiag::testing::random_pipeline_fixture(rng);
    Document f;
    f.add_block("src", fx.form.source());
    f.add_block("tgt", fx.form.target());
    f.add_form("phi", "src", "tgt", fx.form);
    round_trip(f);
    const DiagonalForm again = parse_document(serialize(f)).form("phi").form;
    CHECK(is_maximally_homogeneous(again).holds);
    CHECK(max_fiber_image_dimension(again, 0) == max_fiber_image_dimension(fx.form, 0));
  }
}

TEST_CASE("fixture corpus") {
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(AHDIAG_FIXTURES)) {
    if (entry.path().extension() != ".ahd") continue;
    CAPTURE(entry.path().string());
    ++files;
    const std::string text = slurp(entry.path().string());
    Document d = parse_document(text);
    round_trip(d);
    // Generated files are already canonical.
    if (d.param("generator")) CHECK(serialize(d) == text);
  }
  CHECK(files >= 8);
}

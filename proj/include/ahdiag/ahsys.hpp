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

#ifndef AHDIAG_AHSYS_HPP_
#define AHDIAG_AHSYS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "ahdiag/mapexpr.hpp"

namespace ahdiag {

// q_y over its component: a trivial rank-one projection onto slot e_y, or
// an opaque line bundle known only by a tag. Either way it vanishes off
// the component.
struct Bundle {
  enum class Kind { kTrivial, kSymbolic };
  Kind kind = Kind::kTrivial;
  int slot = 0;
  std::string tag;

  static Bundle trivial(int slot) { return {Kind::kTrivial, slot, ""}; }
  static Bundle symbolic(std::string tag) { return {Kind::kSymbolic, 0, std::move(tag)}; }
};

// One y in Y(n): lambda_y maps component `component` of level n+1 (that is,
// j(y)) into component `lands_in` of level n.
struct StepEntry {
  MapExpr lambda;
  int component = 0;
  int lands_in = 0;
  Bundle bundle;
};

struct Level {
  std::vector<SpacePtr> components;
  int rank = 1;  // r_n
};

struct Step {
  int s = 1;  // s_n
  std::vector<StepEntry> entries;
};

// Levels are numbered from 1; levels[0] is level 1 and steps[n-1] goes from
// level n to level n+1.
struct GenDiagSystem {
  std::string name;
  std::vector<Level> levels;
  std::vector<Step> steps;

  int level_count() const { return static_cast<int>(levels.size()); }
  const Level& level(int n) const { return levels.at(n - 1); }
  const Step& step(int n) const { return steps.at(n - 1); }
  bool trivial_bundles() const;
};

// Validates shapes: one step per consecutive pair of levels, component
// indices in range, and lambda domain/codomain matching the components.
// Throws InvalidInput.
void validate_structure(const GenDiagSystem& sys);

// lambda_w = lambda_{w[0]} o ... o lambda_{w[m-1]}, from level n+m to level
// n, normalized. w[k] indexes Y(n+k). DomainError on incompatible words.
MapExpr composite_eigenvalue(const GenDiagSystem& sys, int n, const std::vector<int>& word);

// Every word of length m from level n whose composite starts in level-(n+m)
// component `component`, in lexicographic order.
std::vector<std::vector<int>> words_into(const GenDiagSystem& sys, int n, int m, int component);

enum class Verdict { kPass, kFail, kInconclusive };
std::string to_string(Verdict v);

struct CheckItem {
  std::string name;  // ranks, unitality, orthogonality, line-bundle, injectivity
  int level = 0;
  int component = -1;
  Verdict verdict = Verdict::kPass;
  std::string detail;
};

struct SystemReport {
  std::vector<CheckItem> items;
  bool passed() const;
  bool has(Verdict v) const;
};

SystemReport gendiag_check(const GenDiagSystem& sys);

// Image of lambda over its whole domain, when the codomain is a graph and
// the image can be computed exactly; nullopt otherwise.
std::optional<ClosedSubset> exact_image(const MapExpr& lambda);

// Replaces every q_y by the trivial rank-one projection, slots numbered per
// component in entry order. Everything else is copied verbatim.
GenDiagSystem untwist(const GenDiagSystem& sys);

struct GoodearlParams {
  GraphPtr base;
  int levels = 3;
  // Constants used by step n (index n-1), each one entry next to the identity.
  std::vector<std::vector<GraphPoint>> points;
  std::vector<int> s;
};

struct VilladsenParams {
  GraphPtr seed;
  int levels = 3;
  int first_power = 1;
  std::vector<int> copies;     // coordinate projections per step
  std::vector<int> constants;  // constant entries per step
  std::optional<GraphPoint> constant_point;  // defaults to the first vertex
};

struct DynamicsParams {
  PLMap sigma;  // a PL surjection of the base graph
  int levels = 3;
  int s = 2;    // entries id, sigma, ..., sigma^(s-1)
};

GenDiagSystem generate_goodearl(const GoodearlParams& p);
GenDiagSystem generate_villadsen1(const VilladsenParams& p);
GenDiagSystem generate_villadsen2_skeleton(const VilladsenParams& p);
GenDiagSystem generate_dynamics(const DynamicsParams& p);

// Goodearl points x_1..x_count on the unit interval: dyadics by increasing
// denominator, numerators taken from both ends inwards
// (1/2, 1/4, 3/4, 1/8, 7/8, 3/8, 5/8, ...).
std::vector<GraphPoint> dyadic_schedule(const Graph& interval, int count);

}  // namespace ahdiag

#endif  // AHDIAG_AHSYS_HPP_

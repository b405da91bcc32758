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

#ifndef AHDIAG_GROUPOID_HPP_
#define AHDIAG_GROUPOID_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ahdiag/ahsys.hpp"

namespace ahdiag {

// Serial kernels are the reference; parallel ones must agree exactly.
enum class Exec { kSerial, kParallel };

// A base point of level n+m: a component and a point in it.
struct StageSample {
  int component = 0;
  SpacePoint z;
  friend bool operator==(const StageSample&, const StageSample&) = default;
};

// Arrow (z, w, k0, l0) of the depth-m stage over base level n. `sample`
// indexes the stage's sample list; indices are 0-based.
struct Arrow {
  int sample = 0;
  std::vector<int> word;
  int k0 = 0;
  int l0 = 0;

  bool is_unit() const { return k0 == l0; }
  friend bool operator==(const Arrow&, const Arrow&) = default;
};

struct GroupoidStage {
  int n = 1;
  int m = 0;
  int rank = 1;  // r_n
  std::vector<StageSample> samples;
  // Sorted by (sample, word, k0, l0).
  std::vector<Arrow> arrows;

  size_t unit_count() const;
};

// Every sample of every component of level n+m.
std::vector<StageSample> all_samples(const GenDiagSystem& sys, int level);

// Throws PreconditionError for symbolic bundles (untwist first) and
// DomainError when n + m runs past the last level or a sample is off its
// component.
GroupoidStage build_stage(const GenDiagSystem& sys, int n, int m,
                          const std::vector<StageSample>& samples, Exec exec = Exec::kSerial);

// DomainError unless source(g) == range(h).
Arrow compose_arrows(const Arrow& g, const Arrow& h);
Arrow inverse(const Arrow& g);
Arrow source(const Arrow& g);
Arrow range(const Arrow& g);

// Image of an arrow in the level-n pair groupoid: (lambda_w(z), k0, l0).
struct ProjectedArrow {
  int component = 0;  // at level n
  SpacePoint value;
  int k0 = 0;
  int l0 = 0;
  friend bool operator==(const ProjectedArrow&, const ProjectedArrow&) = default;
};

ProjectedArrow project(const GenDiagSystem& sys, const GroupoidStage& stage, const Arrow& a);

// lambda_w(z) for each distinct (sample, word) of the stage, in arrow order.
struct CompositeValue {
  int sample = 0;
  std::vector<int> word;
  int component = 0;
  SpacePoint value;
};
std::vector<CompositeValue> composite_values(const GenDiagSystem& sys, const GroupoidStage& stage,
                                             Exec exec = Exec::kSerial);

struct OrbitReport {
  int view_base = 1;
  std::vector<size_t> members;   // arrow indices of the units in the orbit
  std::vector<long> reindexed;   // index in {0..r_view_base - 1} per member
  size_t size() const { return members.size(); }
};

// Orbit of `unit` once the stage is embedded over base level view_base,
// n <= view_base <= n + m: the units sharing z and the word tail from
// position view_base - n. The re-index uses k0 major, then the q_y slots
// of the dropped letters.
OrbitReport orbit(const GenDiagSystem& sys, const GroupoidStage& stage, size_t unit, int view_base);

struct FibreReport {
  bool fibrewise_bijective = true;
  Verdict surjective = Verdict::kPass;
  std::vector<std::string> problems;
  bool passed() const { return fibrewise_bijective && surjective == Verdict::kPass; }
};

// p_n: H_n -> G_n over the given level-(n+1) samples, with surjectivity
// decided by image coverage of the lambda_y.
FibreReport check_fibrewise_bijective(const GenDiagSystem& sys, int n,
                                      const std::vector<StageSample>& samples);

struct DensityStep {
  int m = 0;
  bool dense = false;
  std::optional<StageSample> witness;   // level-(n+m) sample that fails
  std::optional<SpacePoint> uncovered;  // net point left uncovered
};

struct DensityReport {
  Rational epsilon;
  std::vector<DensityStep> steps;
  std::optional<int> first_dense;  // smallest m that passed
};

// For each m <= max_m and each sample z of level n+m, checks that the
// values lambda_w(z) come within epsilon of every point of an epsilon/2
// net of every level-n component. Products use the max of the factor
// metrics.
DensityReport density_report(const GenDiagSystem& sys, int n, const Rational& epsilon, int max_m,
                             Exec exec = Exec::kSerial);

// Grid of points of `space` with spacing at most `spacing` along each edge.
std::vector<SpacePoint> space_net(const Space& space, const Rational& spacing);
// Max over factors of the graph distance.
Rational space_distance(const Space& space, const SpacePoint& a, const SpacePoint& b);

// Net points farther than epsilon from every value; empty means covered.
std::vector<size_t> uncovered_net_points(const Space& space, const std::vector<SpacePoint>& net,
                                         const std::vector<SpacePoint>& values,
                                         const Rational& epsilon, Exec exec = Exec::kSerial);

void export_stage_dot(std::ostream& out, const GroupoidStage& stage);
std::string stage_dot(const GroupoidStage& stage);

// Columns base_level,depth,z,word,orbit_size; one row per (sample, word).
void write_orbit_csv(std::ostream& out, const GenDiagSystem& sys, const GroupoidStage& stage,
                     int view_base);

std::string word_string(const std::vector<int>& word);

}  // namespace ahdiag

#endif  // AHDIAG_GROUPOID_HPP_

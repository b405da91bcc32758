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

#ifndef AHDIAG_DIAGFORM_HPP_
#define AHDIAG_DIAGFORM_HPP_

#include <string>
#include <vector>

#include "ahdiag/block.hpp"
#include "ahdiag/closed_subset.hpp"
#include "ahdiag/covering_tree.hpp"

namespace ahdiag {

struct DiagEntry {
  int source = 0;  // source summand j
  PLMap map;       // eigenvalue function: tree -> Z_j
};

struct TargetData {
  CoveringTree tree;  // over W_i
  std::vector<DiagEntry> entries;
};

// Homomorphism between blocks given by eigenvalue functions on covering
// trees, in the standard (identity) unitary frame:
//   phi(f)_i(t) = diag_s f_{j_s}(lambda_s(t)).
class DiagonalForm {
 public:
  DiagonalForm(Block source, Block target, std::vector<TargetData> targets);

  const Block& source() const { return source_; }
  const Block& target() const { return target_; }
  const TargetData& at(int i) const;
  const std::vector<TargetData>& targets() const { return targets_; }

  // Sum over entries of the source matrix sizes.
  int entry_size(int i) const;
  bool unital() const;

  DiagonalForm with_entries(int i, std::vector<DiagEntry> entries) const;

 private:
  Block source_;
  Block target_;
  std::vector<TargetData> targets_;
};

struct SpectrumPoint {
  int source = 0;
  GraphPoint point;
  int multiplicity = 1;
  friend bool operator==(const SpectrumPoint&, const SpectrumPoint&) = default;
};

// Sorted by (source, point); multiplicities collapse equal points.
using Spectrum = std::vector<SpectrumPoint>;

Spectrum spectrum_at(const DiagonalForm& phi, int i, const GraphPoint& t);

// Entries a < b of target i collide on tree edge `tree_edge` for every t in
// [t0, t1]; an isolated collision has t0 == t1.
struct MHWitness {
  int target = 0;
  int tree_edge = 0;
  Rational t0;
  Rational t1;
  int a = 0;
  int b = 0;
  bool isolated() const { return t0 == t1; }
  friend bool operator==(const MHWitness&, const MHWitness&) = default;
};

struct MHReport {
  bool holds = true;
  std::vector<MHWitness> witnesses;
};

MHReport is_maximally_homogeneous(const DiagonalForm& phi);

// All collisions of entries a and b of target i, exactly.
std::vector<MHWitness> entry_collisions(const DiagonalForm& phi, int i, int a, int b);

int fiber_image_dimension(const DiagonalForm& phi, int i, const GraphPoint& t);
// Sum over entries of n_j^2; the dimension at points where MH holds.
int max_fiber_image_dimension(const DiagonalForm& phi, int i);

// Union of the images of all eigenvalue functions landing in Z_j.
ClosedSubset source_coverage(const DiagonalForm& phi, int j);

struct SourceGaps {
  int source = 0;
  std::vector<OpenInterval> intervals;
  std::vector<int> vertices;  // uncovered vertices
};

struct UnitalInjectiveReport {
  bool unital = true;
  bool injective = true;
  std::vector<int> size_mismatch;  // target summands failing unitality
  std::vector<SourceGaps> gaps;    // only sources with gaps
};

UnitalInjectiveReport check_unital_injective(const DiagonalForm& phi);

struct DescentFailure {
  int target = 0;
  GraphPoint base_point;  // on W_i
  std::string detail;
};

struct DescentReport {
  bool holds = true;
  std::vector<DescentFailure> failures;
};

// Spectra agree as multisets along every fiber, exactly.
DescentReport verify_descent(const DiagonalForm& phi);
// Stronger: every entry individually descends (all permutations trivial).
DescentReport verify_strict_descent(const DiagonalForm& phi);

// Value of phi(a) at a tree point of D_i.
CMatrix apply_at(const DiagonalForm& phi, const Element& a, int i, const GraphPoint& t);

// phi(a) as an element of the target block. Needs strict descent, since the
// frame is fixed to the identity; throws InvalidInput otherwise.
Element apply_diagform(const DiagonalForm& phi, const Element& a);

// Pinching onto the canonical diagonal.
Element conditional_expectation(const Element& a);

struct ExpectationSample {
  int target = 0;
  GraphPoint w;  // on W_i
};

struct ExpectationReport {
  bool holds = true;
  std::vector<ExpectationSample> discrepancies;
};

// P(phi(a)) == phi(P(a)) at each sample. Throws PreconditionError unless
// phi is maximally homogeneous.
ExpectationReport check_expectation_commutes(const DiagonalForm& phi, const Element& a,
                                             const std::vector<ExpectationSample>& samples);

// Certified bound on max_a ||phi(a) - psi(a)|| over `gens`.
Rational diagform_distance_bound(const DiagonalForm& phi, const DiagonalForm& psi,
                                 const std::vector<Element>& gens);

// Lift of a base point of W_i to the lowest-index tree edge over it.
GraphPoint lift_to_tree(const CoveringTree& ct, const GraphPoint& w);

}  // namespace ahdiag

#endif  // AHDIAG_DIAGFORM_HPP_

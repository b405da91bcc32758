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

#ifndef AHDIAG_PERTURB_HPP_
#define AHDIAG_PERTURB_HPP_

#include <optional>
#include <string>
#include <vector>

#include "ahdiag/diagform.hpp"

namespace ahdiag {

// One uncovered open interval of Z_j, inside a single edge.
struct Gap {
  OpenInterval interval;
  GraphPoint a;  // closure endpoints
  GraphPoint b;
  bool a_covered = true;
  bool b_covered = true;
  Rational length() const { return interval.length(); }
};

struct GapDecomposition {
  int source = 0;
  std::vector<Gap> gaps;
  std::vector<int> uncovered_vertices;
  int count() const { return static_cast<int>(gaps.size()); }
};

GapDecomposition gap_decomposition(const DiagonalForm& phi, int j);

enum class ChainKind {
  kLineInterior,           // junctions are interior points
  kLineVertexSplit,        // passes a covered vertex of degree <= 2
  kAsteriskVertexInGap,    // branch vertex lies inside the gaps
  kAsteriskVertexCovered,  // branch vertex is covered
};

std::string to_string(ChainKind k);

struct Chain {
  std::vector<int> gaps;  // indices into the decomposition, in walk order
  ChainKind kind = ChainKind::kLineInterior;
  std::optional<int> vertex;  // branch or split vertex
  // Connected components of the complement in this chain; edge intervals
  // joined through an uncovered vertex form one.
  int components = 0;
};

struct ChainStructure {
  std::vector<Chain> chains;
  // Most components in any chain.
  int longest() const;
};

ChainStructure maximal_chains(const GapDecomposition& gd, const Graph& g);

// A tree point whose eigenvalue sits at the covered gap endpoint.
struct Anchor {
  int target = 0;
  int entry = 0;
  int tree_edge = 0;
  Rational t;  // lambda(t) == endpoint
  GraphPoint value;
  bool from_a = true;  // which gap endpoint is reached first
};

// First anchor in (target, entry, tree edge, piece) order reaching the
// covered endpoint of the gap, trying `a` before `b`. Throws InvalidInput if
// no eigenvalue function reaches either endpoint.
Anchor select_anchor(const DiagonalForm& phi, int j, const Gap& gap);

// Local modification of one entry on one tree edge: replaces [lo, hi].
struct Graft {
  int entry = 0;
  int tree_edge = 0;
  Rational lo;
  Rational hi;
  std::vector<Piece> pieces;
};

struct GraftCopy {
  int tree_edge = 0;
  int entry = 0;  // mu_k(s)
  bool reversed = false;
};

// Applies the grafts on their tree edges and on every other tree edge over
// the same base edge, to the entry matching the grafted one there. Throws
// InvalidInput when no entry matches (the input does not descend).
DiagonalForm descend(const DiagonalForm& phi, int i, const std::vector<Graft>& grafts,
                     std::vector<GraftCopy>* copies = nullptr);

// Tent over [v0, v1] of a piece of entry s: out from lambda to the gap end
// (lo if from_lo, else hi), across the gap to the other end, reached at
// t_prime only, and back.
Graft tent_graft(const DiagonalForm& phi, int i, int s, int tree_edge, const Rational& v0,
                 const Rational& v1, const Rational& t_prime, const OpenInterval& gap,
                 bool from_lo);

enum class RecordKind { kTent, kRepair };

struct PerturbationRecord {
  RecordKind kind = RecordKind::kTent;
  int source = 0;
  int target = 0;
  int entry = 0;
  int tree_edge = 0;
  Rational anchor_t;
  Rational u_lo, u_hi;  // neighbourhood U
  Rational v_lo, v_hi;  // closed V, where the map changes
  Rational t_prime;
  GraphPoint reached;
  std::vector<GraftCopy> copies;
  std::optional<OpenInterval> covered;
};

struct PerturbationLog {
  Rational delta;
  Rational rho;
  Rational bound;  // max exact sup distance between perturbed and input entries
  std::vector<PerturbationRecord> records;
  std::vector<GapDecomposition> gaps;
  std::vector<ChainStructure> chains;
};

// Removes isolated collisions by small bumps of locally constant entries,
// magnitude at most eta. Throws InvalidInput on non-isolated collisions or
// when no bump direction is free.
DiagonalForm repair_distinctness(const DiagonalForm& phi, const Rational& eta,
                                 std::vector<PerturbationRecord>* records = nullptr);

// Admissible deltas are those below this value: min(1/2, 1/sum m_i).
Rational delta_bound(const DiagonalForm& phi);

struct SurjectiveResult {
  DiagonalForm form;
  PerturbationLog log;
};

// Makes phi injective while keeping it maximally homogeneous and descending.
// rho defaults to min(delta/100, shortest gap / 2).
SurjectiveResult make_surjective_mh(const DiagonalForm& phi, const Rational& delta,
                                    std::optional<Rational> rho = std::nullopt);

}  // namespace ahdiag

#endif  // AHDIAG_PERTURB_HPP_

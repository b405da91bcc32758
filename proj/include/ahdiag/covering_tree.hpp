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

#ifndef AHDIAG_COVERING_TREE_HPP_
#define AHDIAG_COVERING_TREE_HPP_

#include <string>
#include <vector>

#include "ahdiag/plmap.hpp"

namespace ahdiag {

// Finite connected piece of the universal covering tree of a base graph,
// with its edge-isometric projection onto the base.
struct CoveringTree {
  GraphPtr tree;
  GraphPtr base;
  PLMap projection;
  int radius = 0;
  std::vector<int> base_edge;      // per tree edge
  std::vector<bool> reversed;      // per tree edge: coordinate runs head->tail
  std::vector<int> base_vertex;    // per tree vertex

  // Coordinate on tree edge `to` of the point lying over the same base
  // point as coordinate t on tree edge `from` (both over the same base edge).
  Rational transfer(int from, int to, const Rational& t) const;
};

// All reduced edge walks from the base's first vertex of combinatorial
// length <= radius. Throws DomainError for disconnected bases, radius < 1,
// or a radius too small for the projection to be surjective.
CoveringTree build_covering_tree(const GraphPtr& base, int radius,
                                 const std::string& name = "");

// Every tree point projecting onto `base_point`.
std::vector<GraphPoint> fiber(const CoveringTree& ct, const GraphPoint& base_point);

}  // namespace ahdiag

#endif  // AHDIAG_COVERING_TREE_HPP_

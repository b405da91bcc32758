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

#ifndef AHDIAG_CLOSED_SUBSET_HPP_
#define AHDIAG_CLOSED_SUBSET_HPP_

#include <utility>
#include <vector>

#include "ahdiag/graph.hpp"

namespace ahdiag {

// An open interval (lo, hi) inside a single edge.
struct OpenInterval {
  int edge = 0;
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  friend bool operator==(const OpenInterval&, const OpenInterval&) = default;
};

// Finite union of closed intervals of a graph, stored per edge as sorted,
// disjoint, merged intervals. A vertex belongs to the set iff it is listed in
// the vertex set, and then every incident edge carries the matching
// degenerate endpoint interval.
class ClosedSubset {
 public:
  using Interval = std::pair<Rational, Rational>;

  explicit ClosedSubset(GraphPtr graph);
  static ClosedSubset whole(GraphPtr graph);

  const GraphPtr& graph() const { return graph_; }

  void add_interval(int edge, const Rational& lo, const Rational& hi);
  void add_vertex(int v);
  void add_point(const GraphPoint& p);
  void unite(const ClosedSubset& other);

  bool contains(const GraphPoint& p) const;
  bool has_vertex(int v) const { return vertices_.at(v); }
  bool covers_all() const;
  bool empty() const;

  const std::vector<Interval>& intervals(int edge) const {
    return intervals_.at(edge);
  }

  // Complement as per-edge open intervals. The complement equals the union
  // of these and uncovered_vertices().
  std::vector<OpenInterval> complement_intervals() const;
  std::vector<int> uncovered_vertices() const;

  friend bool operator==(const ClosedSubset& a, const ClosedSubset& b) {
    return a.intervals_ == b.intervals_ && a.vertices_ == b.vertices_;
  }

 private:
  void insert_interval(int edge, const Rational& lo, const Rational& hi);

  GraphPtr graph_;
  std::vector<std::vector<Interval>> intervals_;
  std::vector<bool> vertices_;
};

}  // namespace ahdiag

#endif  // AHDIAG_CLOSED_SUBSET_HPP_

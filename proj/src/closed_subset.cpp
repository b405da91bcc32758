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

#include "ahdiag/closed_subset.hpp"

#include <algorithm>

#include "ahdiag/error.hpp"

namespace ahdiag {

ClosedSubset::ClosedSubset(GraphPtr graph) : graph_(std::move(graph)) {
  intervals_.resize(graph_->edge_count());
  vertices_.assign(graph_->vertex_count(), false);
}

ClosedSubset ClosedSubset::whole(GraphPtr graph) {
  ClosedSubset s(graph);
  for (int e = 0; e < graph->edge_count(); ++e) {
    s.add_interval(e, 0, graph->length(e));
  }
  return s;
}

void ClosedSubset::insert_interval(int edge, const Rational& lo, const Rational& hi) {
  auto& list = intervals_[edge];
  Interval merged{lo, hi};
  std::vector<Interval> out;
  out.reserve(list.size() + 1);
  for (const auto& iv : list) {
    if (iv.second < merged.first || merged.second < iv.first) {
      out.push_back(iv);
    } else {
      merged.first = rmin(merged.first, iv.first);
      merged.second = rmax(merged.second, iv.second);
    }
  }
  out.push_back(merged);
  std::sort(out.begin(), out.end());
  list = std::move(out);
}

void ClosedSubset::add_interval(int edge, const Rational& lo, const Rational& hi) {
  if (edge < 0 || edge >= graph_->edge_count()) {
    throw DomainError("ClosedSubset: edge index out of range");
  }
  const Rational& len = graph_->length(edge);
  if (lo > hi || lo < 0 || hi > len) {
    throw DomainError("ClosedSubset: interval outside edge");
  }
  insert_interval(edge, lo, hi);
  const Edge& e = graph_->edge(edge);
  if (lo == 0) add_vertex(e.tail);
  if (hi == len) add_vertex(e.head);
}

void ClosedSubset::add_vertex(int v) {
  if (vertices_.at(v)) return;
  vertices_[v] = true;
  for (int e : graph_->incident_edges(v)) {
    const Edge& ed = graph_->edge(e);
    if (ed.tail == v) insert_interval(e, 0, 0);
    if (ed.head == v) insert_interval(e, ed.length, ed.length);
  }
}

void ClosedSubset::add_point(const GraphPoint& p) {
  if (auto v = graph_->vertex_of(p)) {
    add_vertex(*v);
  } else {
    add_interval(p.edge, p.coord, p.coord);
  }
}

void ClosedSubset::unite(const ClosedSubset& other) {
  if (!same_graph(graph_, other.graph_)) {
    throw DomainError("ClosedSubset: union over different graphs");
  }
  for (int e = 0; e < graph_->edge_count(); ++e) {
    for (const auto& iv : other.intervals_[e]) add_interval(e, iv.first, iv.second);
  }
  for (int v = 0; v < graph_->vertex_count(); ++v) {
    if (other.vertices_[v]) add_vertex(v);
  }
}

bool ClosedSubset::contains(const GraphPoint& p) const {
  if (auto v = graph_->vertex_of(p)) return vertices_[*v];
  for (const auto& iv : intervals_.at(p.edge)) {
    if (iv.first <= p.coord && p.coord <= iv.second) return true;
  }
  return false;
}

bool ClosedSubset::covers_all() const {
  for (int e = 0; e < graph_->edge_count(); ++e) {
    const auto& list = intervals_[e];
    if (list.size() != 1 || list[0].first != 0 ||
        list[0].second != graph_->length(e)) {
      return false;
    }
  }
  return true;
}

bool ClosedSubset::empty() const {
  for (const auto& list : intervals_) {
    if (!list.empty()) return false;
  }
  return true;
}

std::vector<OpenInterval> ClosedSubset::complement_intervals() const {
  std::vector<OpenInterval> out;
  for (int e = 0; e < graph_->edge_count(); ++e) {
    Rational cursor = 0;
    for (const auto& iv : intervals_[e]) {
      if (iv.first > cursor) out.push_back({e, cursor, iv.first});
      cursor = rmax(cursor, iv.second);
    }
    if (cursor < graph_->length(e)) {
      out.push_back({e, cursor, graph_->length(e)});
    }
  }
  return out;
}

std::vector<int> ClosedSubset::uncovered_vertices() const {
  std::vector<int> out;
  for (int v = 0; v < graph_->vertex_count(); ++v) {
    if (!vertices_[v]) out.push_back(v);
  }
  return out;
}

}  // namespace ahdiag

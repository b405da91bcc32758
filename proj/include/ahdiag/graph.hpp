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

#ifndef AHDIAG_GRAPH_HPP_
#define AHDIAG_GRAPH_HPP_

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ahdiag/rational.hpp"

namespace ahdiag {

struct Edge {
  std::string id;
  int tail = 0;
  int head = 0;
  Rational length = 1;
};

struct EdgeSpec {
  std::string id;
  std::string tail;
  std::string head;
  Rational length = 1;
};

// A point of a metric graph: a coordinate along an edge, measured from the
// edge's tail. Points handed out by Graph are canonical, so vertex points
// have a unique representation and operator== is exact point equality.
struct GraphPoint {
  int edge = 0;
  Rational coord;

  friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
    return a.edge == b.edge && a.coord == b.coord;
  }
  friend bool operator<(const GraphPoint& a, const GraphPoint& b) {
    if (a.edge != b.edge) return a.edge < b.edge;
    return a.coord < b.coord;
  }
};

// Finite 1-dimensional CW complex with an exact path metric. Loops and
// multi-edges are allowed. Immutable after construction.
class Graph {
 public:
  Graph(std::string name, std::vector<std::string> vertices,
        const std::vector<EdgeSpec>& edges);

  const std::string& name() const { return name_; }
  int vertex_count() const { return static_cast<int>(vertices_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::string& vertex_id(int v) const { return vertices_.at(v); }
  const Edge& edge(int e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Rational& length(int e) const { return edges_.at(e).length; }

  std::optional<int> find_vertex(const std::string& id) const;
  std::optional<int> find_edge(const std::string& id) const;

  // Incident edge indices, each listed once (loops included once).
  const std::vector<int>& incident_edges(int v) const { return incident_.at(v); }
  // Loops count twice.
  int degree(int v) const;

  bool connected() const { return connected_; }
  bool is_tree() const {
    return connected_ && edge_count() == vertex_count() - 1;
  }

  // Validates and canonicalizes. Throws DomainError when off the graph.
  GraphPoint point(int edge, const Rational& coord) const;
  GraphPoint vertex_point(int v) const;
  std::optional<int> vertex_of(const GraphPoint& p) const;
  // True iff p is a canonical point of this graph.
  bool contains(const GraphPoint& p) const;

  // Shortest-path distance between vertices; nullopt across components.
  const std::optional<Rational>& vertex_distance(int u, int v) const {
    return vdist_[u * vertex_count() + v];
  }

  // Structural equality (names of vertices/edges, incidences, lengths).
  bool same_structure(const Graph& other) const;

 private:
  std::string name_;
  std::vector<std::string> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> incident_;
  std::vector<std::optional<Rational>> vdist_;
  bool connected_ = false;
};

using GraphPtr = std::shared_ptr<const Graph>;

GraphPtr make_graph(std::string name, std::vector<std::string> vertices,
                    const std::vector<EdgeSpec>& edges);

// Path-metric distance. Throws DomainError if either point is not on g or
// the points lie in different components.
Rational point_distance(const Graph& g, const GraphPoint& p, const GraphPoint& q);

bool same_graph(const GraphPtr& a, const GraphPtr& b);

// Graphviz export, undirected, edges labelled with id and length.
void write_dot(std::ostream& out, const Graph& g);
std::string to_dot(const Graph& g);

// Small named fixtures used throughout tests and generators.
namespace fixtures {
GraphPtr interval(const std::string& name = "I", Rational length = 1);
GraphPtr circle(const std::string& name = "S", Rational length = 1);
GraphPtr star(int arms, const std::string& name = "Y");
GraphPtr figure_eight(const std::string& name = "E");
GraphPtr path(int edges, const std::string& name = "P");
}  // namespace fixtures

}  // namespace ahdiag

#endif  // AHDIAG_GRAPH_HPP_

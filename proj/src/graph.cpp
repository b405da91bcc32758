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

#include "ahdiag/graph.hpp"

#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ahdiag/error.hpp"

namespace ahdiag {

Graph::Graph(std::string name, std::vector<std::string> vertices,
             const std::vector<EdgeSpec>& edges)
    : name_(std::move(name)), vertices_(std::move(vertices)) {
  std::unordered_map<std::string, int> vindex;
  for (int v = 0; v < vertex_count(); ++v) {
    if (!vindex.emplace(vertices_[v], v).second) {
      throw DomainError("graph '" + name_ + "': duplicate vertex '" +
                        vertices_[v] + "'");
    }
  }
  std::unordered_set<std::string> eids;
  incident_.resize(vertices_.size());
  for (const auto& spec : edges) {
    if (!eids.insert(spec.id).second) {
      throw DomainError("graph '" + name_ + "': duplicate edge '" + spec.id + "'");
    }
    auto t = vindex.find(spec.tail);
    auto h = vindex.find(spec.head);
    if (t == vindex.end() || h == vindex.end()) {
      throw DomainError("graph '" + name_ + "': edge '" + spec.id +
                        "' references unknown vertex");
    }
    if (spec.length <= 0) {
      throw DomainError("graph '" + name_ + "': edge '" + spec.id +
                        "' must have positive length");
    }
    const int e = static_cast<int>(edges_.size());
    edges_.push_back(Edge{spec.id, t->second, h->second, spec.length});
    incident_[t->second].push_back(e);
    if (h->second != t->second) incident_[h->second].push_back(e);
  }
  for (int v = 0; v < vertex_count(); ++v) {
    if (incident_[v].empty()) {
      throw DomainError("graph '" + name_ + "': vertex '" + vertices_[v] +
                        "' has no incident edge");
    }
  }

  // Floyd-Warshall; graphs here are small.
  const int n = vertex_count();
  vdist_.assign(static_cast<size_t>(n) * n, std::nullopt);
  for (int v = 0; v < n; ++v) vdist_[v * n + v] = Rational(0);
  for (const auto& e : edges_) {
    auto& a = vdist_[e.tail * n + e.head];
    if (!a || e.length < *a) a = e.length;
    auto& b = vdist_[e.head * n + e.tail];
    if (!b || e.length < *b) b = e.length;
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const auto& ik = vdist_[i * n + k];
      if (!ik) continue;
      for (int j = 0; j < n; ++j) {
        const auto& kj = vdist_[k * n + j];
        if (!kj) continue;
        Rational via = *ik + *kj;
        auto& ij = vdist_[i * n + j];
        if (!ij || via < *ij) ij = via;
      }
    }
  }
  connected_ = true;
  for (int v = 0; v < n; ++v) {
    if (!vdist_[v]) connected_ = false;
  }
}

std::optional<int> Graph::find_vertex(const std::string& id) const {
  for (int v = 0; v < vertex_count(); ++v) {
    if (vertices_[v] == id) return v;
  }
  return std::nullopt;
}

std::optional<int> Graph::find_edge(const std::string& id) const {
  for (int e = 0; e < edge_count(); ++e) {
    if (edges_[e].id == id) return e;
  }
  return std::nullopt;
}

int Graph::degree(int v) const {
  int d = 0;
  for (int e : incident_.at(v)) {
    d += (edges_[e].tail == edges_[e].head) ? 2 : 1;
  }
  return d;
}

GraphPoint Graph::vertex_point(int v) const {
  if (v < 0 || v >= vertex_count()) {
    throw DomainError("graph '" + name_ + "': vertex index out of range");
  }
  const int e = incident_[v].front();
  if (edges_[e].tail == v) return GraphPoint{e, Rational(0)};
  return GraphPoint{e, edges_[e].length};
}

GraphPoint Graph::point(int edge, const Rational& coord) const {
  if (edge < 0 || edge >= edge_count()) {
    throw DomainError("graph '" + name_ + "': edge index out of range");
  }
  const Edge& e = edges_[edge];
  if (coord < 0 || coord > e.length) {
    throw DomainError("graph '" + name_ + "': coordinate " + to_string(coord) +
                      " outside edge '" + e.id + "'");
  }
  if (coord == 0) return vertex_point(e.tail);
  if (coord == e.length) return vertex_point(e.head);
  return GraphPoint{edge, coord};
}

std::optional<int> Graph::vertex_of(const GraphPoint& p) const {
  if (p.edge < 0 || p.edge >= edge_count()) return std::nullopt;
  const Edge& e = edges_[p.edge];
  if (p.coord == 0) return e.tail;
  if (p.coord == e.length) return e.head;
  return std::nullopt;
}

bool Graph::contains(const GraphPoint& p) const {
  if (p.edge < 0 || p.edge >= edge_count()) return false;
  const Edge& e = edges_[p.edge];
  if (p.coord < 0 || p.coord > e.length) return false;
  return point(p.edge, p.coord) == p;
}

bool Graph::same_structure(const Graph& other) const {
  if (vertices_ != other.vertices_ || edges_.size() != other.edges_.size()) {
    return false;
  }
  for (size_t i = 0; i < edges_.size(); ++i) {
    const Edge& a = edges_[i];
    const Edge& b = other.edges_[i];
    if (a.id != b.id || a.tail != b.tail || a.head != b.head ||
        a.length != b.length) {
      return false;
    }
  }
  return true;
}

GraphPtr make_graph(std::string name, std::vector<std::string> vertices,
                    const std::vector<EdgeSpec>& edges) {
  return std::make_shared<const Graph>(std::move(name), std::move(vertices), edges);
}

Rational point_distance(const Graph& g, const GraphPoint& p, const GraphPoint& q) {
  if (!g.contains(p) || !g.contains(q)) {
    throw DomainError("point_distance: point not on graph '" + g.name() + "'");
  }
  const Edge& ep = g.edge(p.edge);
  const Edge& eq = g.edge(q.edge);
  std::optional<Rational> best;
  if (p.edge == q.edge) best = rabs(p.coord - q.coord);
  const int pv[2] = {ep.tail, ep.head};
  const Rational pd[2] = {p.coord, ep.length - p.coord};
  const int qv[2] = {eq.tail, eq.head};
  const Rational qd[2] = {q.coord, eq.length - q.coord};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto& mid = g.vertex_distance(pv[a], qv[b]);
      if (!mid) continue;
      Rational cand = pd[a] + *mid + qd[b];
      if (!best || cand < *best) best = cand;
    }
  }
  if (!best) {
    throw DomainError("point_distance: points in different components");
  }
  return *best;
}

bool same_graph(const GraphPtr& a, const GraphPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->name() == b->name() && a->same_structure(*b);
}

void write_dot(std::ostream& out, const Graph& g) {
  out << "graph \"" << g.name() << "\" {\n";
  for (int v = 0; v < g.vertex_count(); ++v) {
    out << "  \"" << g.vertex_id(v) << "\";\n";
  }
  for (const auto& e : g.edges()) {
    out << "  \"" << g.vertex_id(e.tail) << "\" -- \"" << g.vertex_id(e.head)
        << "\" [label=\"" << e.id << " (" << to_string(e.length) << ")\"];\n";
  }
  out << "}\n";
}

std::string to_dot(const Graph& g) {
  std::ostringstream os;
  write_dot(os, g);
  return os.str();
}

namespace fixtures {

GraphPtr interval(const std::string& name, Rational length) {
  return make_graph(name, {"v0", "v1"}, {{"e", "v0", "v1", std::move(length)}});
}

GraphPtr circle(const std::string& name, Rational length) {
  return make_graph(name, {"v"}, {{"e", "v", "v", std::move(length)}});
}

GraphPtr star(int arms, const std::string& name) {
  std::vector<std::string> vs{"c"};
  std::vector<EdgeSpec> es;
  for (int k = 0; k < arms; ++k) {
    vs.push_back("l" + std::to_string(k));
    es.push_back({"a" + std::to_string(k), "c", vs.back(), 1});
  }
  return make_graph(name, vs, es);
}

GraphPtr figure_eight(const std::string& name) {
  return make_graph(name, {"v"}, {{"a", "v", "v", 1}, {"b", "v", "v", 1}});
}

GraphPtr path(int edges, const std::string& name) {
  std::vector<std::string> vs;
  std::vector<EdgeSpec> es;
  for (int k = 0; k <= edges; ++k) vs.push_back("v" + std::to_string(k));
  for (int k = 0; k < edges; ++k) {
    es.push_back({"e" + std::to_string(k), vs[k], vs[k + 1], 1});
  }
  return make_graph(name, vs, es);
}

}  // namespace fixtures

}  // namespace ahdiag

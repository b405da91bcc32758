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

#include "ahdiag/covering_tree.hpp"

#include "ahdiag/error.hpp"

namespace ahdiag {

Rational CoveringTree::transfer(int from, int to, const Rational& t) const {
  if (base_edge.at(from) != base_edge.at(to)) {
    throw DomainError("CoveringTree::transfer: edges over different base edges");
  }
  if (reversed[from] == reversed[to]) return t;
  return tree->length(to) - t;
}

CoveringTree build_covering_tree(const GraphPtr& base, int radius, const std::string& name) {
  if (!base->connected()) {
    throw DomainError("build_covering_tree: base graph '" + base->name() + "' is disconnected");
  }
  if (radius < 1) throw DomainError("build_covering_tree: radius must be >= 1");

  struct Node {
    std::string label;
    int base_vertex;
    int via_edge;    // base edge used to reach this node, -1 at the root
    bool via_forward;
  };
  std::vector<Node> nodes{{"@", 0, -1, true}};
  std::vector<EdgeSpec> edges;
  std::vector<int> base_edge;
  std::vector<bool> reversed;

  std::vector<int> frontier{0};
  for (int depth = 0; depth < radius; ++depth) {
    std::vector<int> next;
    for (int n : frontier) {
      const Node cur = nodes[n];
      for (int e : base->incident_edges(cur.base_vertex)) {
        const Edge& be = base->edge(e);
        for (bool forward : {true, false}) {
          if (forward && be.tail != cur.base_vertex) continue;
          if (!forward && be.head != cur.base_vertex) continue;
          // Reduced walks never immediately retrace an edge.
          if (e == cur.via_edge && forward != cur.via_forward) continue;
          Node child{cur.label + be.id + (forward ? "+" : "-"),
                     forward ? be.head : be.tail, e, forward};
          const int idx = static_cast<int>(nodes.size());
          nodes.push_back(child);
          edges.push_back({"~" + child.label.substr(1), cur.label, child.label, be.length});
          base_edge.push_back(e);
          reversed.push_back(!forward);
          next.push_back(idx);
        }
      }
    }
    frontier = std::move(next);
  }

  std::vector<bool> hit(base->edge_count(), false);
  for (int e : base_edge) hit[e] = true;
  for (int e = 0; e < base->edge_count(); ++e) {
    if (!hit[e]) {
      throw DomainError("build_covering_tree: radius " + std::to_string(radius) +
                        " does not reach base edge '" + base->edge(e).id + "'");
    }
  }

  std::vector<std::string> vids;
  std::vector<int> base_vertex;
  for (const auto& n : nodes) {
    vids.push_back(n.label);
    base_vertex.push_back(n.base_vertex);
  }
  GraphPtr tree = make_graph(name.empty() ? base->name() + "~" + std::to_string(radius) : name,
                             vids, edges);
  std::vector<std::vector<Piece>> pieces(tree->edge_count());
  for (int k = 0; k < tree->edge_count(); ++k) {
    const Rational& len = tree->length(k);
    if (reversed[k]) {
      pieces[k].push_back(Piece{0, len, base_edge[k], len, 0});
    } else {
      pieces[k].push_back(Piece{0, len, base_edge[k], 0, len});
    }
  }
  PLMap projection(tree, base, std::move(pieces));
  return CoveringTree{tree, base, std::move(projection), radius, base_edge, reversed, base_vertex};
}

std::vector<GraphPoint> fiber(const CoveringTree& ct, const GraphPoint& base_point) {
  if (!ct.base->contains(base_point)) {
    throw DomainError("fiber: point not on base graph");
  }
  std::vector<GraphPoint> out;
  if (auto v = ct.base->vertex_of(base_point)) {
    for (int tv = 0; tv < ct.tree->vertex_count(); ++tv) {
      if (ct.base_vertex[tv] == *v) out.push_back(ct.tree->vertex_point(tv));
    }
    return out;
  }
  for (int k = 0; k < ct.tree->edge_count(); ++k) {
    if (ct.base_edge[k] != base_point.edge) continue;
    const Rational t = ct.reversed[k] ? ct.tree->length(k) - base_point.coord : base_point.coord;
    out.push_back(ct.tree->point(k, t));
  }
  return out;
}

}  // namespace ahdiag

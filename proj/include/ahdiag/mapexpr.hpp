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

#ifndef AHDIAG_MAPEXPR_HPP_
#define AHDIAG_MAPEXPR_HPP_

#include <memory>
#include <string>
#include <vector>

#include "ahdiag/plmap.hpp"

namespace ahdiag {

// A point of a space: one graph point per factor (a single one for graphs).
using SpacePoint = std::vector<GraphPoint>;

class Space;
using SpacePtr = std::shared_ptr<const Space>;

// A compact connected space: either a metric graph or a finite product of
// graphs. Products are symbolic and always flattened into graph factors.
class Space {
 public:
  static SpacePtr graph(GraphPtr g);
  static SpacePtr product(const std::vector<SpacePtr>& factors);
  static SpacePtr power(const GraphPtr& g, int k);

  bool is_product() const { return product_; }
  int arity() const { return static_cast<int>(factors_.size()); }
  const GraphPtr& factor(int k) const { return factors_.at(k); }
  const std::vector<GraphPtr>& factors() const { return factors_; }
  const std::vector<SpacePoint>& samples() const { return samples_; }

  // Same space with an explicit sample list; throws DomainError if a sample
  // is off the space.
  SpacePtr with_samples(std::vector<SpacePoint> samples) const;

  bool contains(const SpacePoint& p) const;
  // "I" for a graph, "I^3" for a power, "I x S" otherwise.
  std::string describe() const;

 private:
  Space() = default;

  bool product_ = false;
  std::vector<GraphPtr> factors_;
  std::vector<SpacePoint> samples_;
};

bool same_space(const Space& a, const Space& b);
std::string to_string(const SpacePoint& p);

// Continuous map between spaces built from identities, constants, PL maps
// between graphs, coordinate projections, and composition.
class MapExpr {
 public:
  enum class Kind { kIdentity, kConstant, kPL, kProjection, kComposite };

  static MapExpr identity(SpacePtr space);
  static MapExpr constant(SpacePtr domain, SpacePtr codomain, SpacePoint value);
  // `label` names the map in system files; empty for derived maps.
  static MapExpr pl(PLMap f, std::string label = "");
  // Codomain factor c is domain factor indices[c].
  static MapExpr projection(SpacePtr domain, SpacePtr codomain, std::vector<int> indices);
  // outer o inner; DomainError unless codomain(inner) == domain(outer).
  static MapExpr compose(const MapExpr& outer, const MapExpr& inner);

  Kind kind() const { return kind_; }
  const SpacePtr& domain() const { return domain_; }
  const SpacePtr& codomain() const { return codomain_; }
  const SpacePoint& value() const { return value_; }
  const PLMap& plmap() const { return *pl_; }
  const std::string& label() const { return label_; }
  const std::vector<int>& indices() const { return indices_; }
  const MapExpr& outer() const { return *outer_; }
  const MapExpr& inner() const { return *inner_; }

  SpacePoint eval(const SpacePoint& p) const;

  // Right-to-left atom list with composites flattened away.
  std::vector<MapExpr> atoms() const;

  // Drops identities, lets constants absorb everything to their right,
  // merges adjacent projections and adjacent PL maps.
  MapExpr normalized() const;

  std::string to_string() const;

  friend bool same_expr(const MapExpr& a, const MapExpr& b);

 private:
  MapExpr() = default;

  Kind kind_ = Kind::kIdentity;
  SpacePtr domain_;
  SpacePtr codomain_;
  SpacePoint value_;
  std::shared_ptr<const PLMap> pl_;
  std::string label_;
  std::vector<int> indices_;
  std::shared_ptr<const MapExpr> outer_;
  std::shared_ptr<const MapExpr> inner_;
};

}  // namespace ahdiag

#endif  // AHDIAG_MAPEXPR_HPP_

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

#include "ahdiag/mapexpr.hpp"

#include <algorithm>
#include <map>

#include "ahdiag/error.hpp"

namespace ahdiag {

namespace {

std::vector<GraphPoint> graph_samples(const Graph& g) {
  std::vector<GraphPoint> out;
  for (int v = 0; v < g.vertex_count(); ++v) out.push_back(g.vertex_point(v));
  for (int e = 0; e < g.edge_count(); ++e) out.push_back(g.point(e, g.length(e) / 2));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Staggered tuples: sample c takes the (c + k)-th point of factor k.
std::vector<SpacePoint> default_samples(const std::vector<GraphPtr>& factors) {
  std::vector<std::vector<GraphPoint>> per;
  size_t most = 0;
  for (const auto& f : factors) {
    per.push_back(graph_samples(*f));
    most = std::max(most, per.back().size());
  }
  std::vector<SpacePoint> out;
  for (size_t c = 0; c < most; ++c) {
    SpacePoint p;
    for (size_t k = 0; k < per.size(); ++k) p.push_back(per[k][(c + k) % per[k].size()]);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

SpacePtr Space::graph(GraphPtr g) {
  if (!g || !g->connected()) throw DomainError("space graph must be connected");
  auto s = std::shared_ptr<Space>(new Space());
  s->factors_ = {std::move(g)};
  s->samples_ = default_samples(s->factors_);
  return s;
}

SpacePtr Space::product(const std::vector<SpacePtr>& factors) {
  if (factors.empty()) throw DomainError("product of no spaces");
  auto s = std::shared_ptr<Space>(new Space());
  s->product_ = true;
  for (const auto& f : factors) {
    for (const auto& g : f->factors()) s->factors_.push_back(g);
  }
  s->samples_ = default_samples(s->factors_);
  return s;
}

SpacePtr Space::power(const GraphPtr& g, int k) {
  if (k < 1) throw DomainError("power exponent must be positive");
  return product(std::vector<SpacePtr>(k, graph(g)));
}

SpacePtr Space::with_samples(std::vector<SpacePoint> samples) const {
  auto s = std::shared_ptr<Space>(new Space(*this));
  for (const auto& p : samples) {
    if (!contains(p)) throw DomainError("sample " + ahdiag::to_string(p) + " is not in " + describe());
  }
  s->samples_ = std::move(samples);
  return s;
}

bool Space::contains(const SpacePoint& p) const {
  if (p.size() != factors_.size()) return false;
  for (size_t k = 0; k < p.size(); ++k) {
    if (!factors_[k]->contains(p[k])) return false;
  }
  return true;
}

std::string Space::describe() const {
  if (!product_) return factors_[0]->name();
  const bool power = std::all_of(factors_.begin(), factors_.end(), [&](const GraphPtr& g) {
    return g->same_structure(*factors_[0]);
  });
  if (power) return factors_[0]->name() + "^" + std::to_string(arity());
  std::string out;
  for (const auto& g : factors_) out += (out.empty() ? "" : " x ") + g->name();
  return out;
}

bool same_space(const Space& a, const Space& b) {
  if (a.is_product() != b.is_product() || a.arity() != b.arity()) return false;
  for (int k = 0; k < a.arity(); ++k) {
    if (!a.factor(k)->same_structure(*b.factor(k))) return false;
  }
  return true;
}

std::string to_string(const SpacePoint& p) {
  std::string out = "(";
  for (size_t k = 0; k < p.size(); ++k) {
    if (k) out += ", ";
    out += std::to_string(p[k].edge) + ":" + to_string(p[k].coord);
  }
  return out + ")";
}

MapExpr MapExpr::identity(SpacePtr space) {
  MapExpr m;
  m.kind_ = Kind::kIdentity;
  m.domain_ = space;
  m.codomain_ = std::move(space);
  return m;
}

MapExpr MapExpr::constant(SpacePtr domain, SpacePtr codomain, SpacePoint value) {
  if (!codomain->contains(value)) {
    throw DomainError("constant " + ahdiag::to_string(value) + " is not in " + codomain->describe());
  }
  MapExpr m;
  m.kind_ = Kind::kConstant;
  m.domain_ = std::move(domain);
  m.codomain_ = std::move(codomain);
  m.value_ = std::move(value);
  return m;
}

MapExpr MapExpr::pl(PLMap f, std::string label) {
  MapExpr m;
  m.kind_ = Kind::kPL;
  m.domain_ = Space::graph(f.domain());
  m.codomain_ = Space::graph(f.codomain());
  m.pl_ = std::make_shared<const PLMap>(std::move(f));
  m.label_ = std::move(label);
  return m;
}

MapExpr MapExpr::projection(SpacePtr domain, SpacePtr codomain, std::vector<int> indices) {
  if (static_cast<int>(indices.size()) != codomain->arity()) {
    throw DomainError("projection needs one index per codomain factor");
  }
  for (size_t c = 0; c < indices.size(); ++c) {
    const int k = indices[c];
    if (k < 0 || k >= domain->arity()) throw DomainError("projection index out of range");
    if (!domain->factor(k)->same_structure(*codomain->factor(c))) {
      throw DomainError("projection factor mismatch at index " + std::to_string(c));
    }
  }
  MapExpr m;
  m.kind_ = Kind::kProjection;
  m.domain_ = std::move(domain);
  m.codomain_ = std::move(codomain);
  m.indices_ = std::move(indices);
  return m;
}

MapExpr MapExpr::compose(const MapExpr& outer, const MapExpr& inner) {
  if (!same_space(*outer.domain(), *inner.codomain())) {
    throw DomainError("cannot compose: " + outer.domain()->describe() + " vs " +
                      inner.codomain()->describe());
  }
  MapExpr m;
  m.kind_ = Kind::kComposite;
  m.domain_ = inner.domain();
  m.codomain_ = outer.codomain();
  m.outer_ = std::make_shared<const MapExpr>(outer);
  m.inner_ = std::make_shared<const MapExpr>(inner);
  return m;
}

SpacePoint MapExpr::eval(const SpacePoint& p) const {
  if (!domain_->contains(p)) {
    throw DomainError("point " + ahdiag::to_string(p) + " is not in " + domain_->describe());
  }
  switch (kind_) {
    case Kind::kIdentity:
      return p;
    case Kind::kConstant:
      return value_;
    case Kind::kPL:
      return {pl_->eval(p[0])};
    case Kind::kProjection: {
      SpacePoint out;
      for (int k : indices_) out.push_back(p[k]);
      return out;
    }
    case Kind::kComposite:
      return outer_->eval(inner_->eval(p));
  }
  return p;
}

std::vector<MapExpr> MapExpr::atoms() const {
  if (kind_ != Kind::kComposite) return {*this};
  auto out = inner_->atoms();
  for (auto& a : outer_->atoms()) out.push_back(std::move(a));
  return out;
}

MapExpr MapExpr::normalized() const {
  std::vector<MapExpr> stack;  // innermost first
  for (const auto& a : atoms()) {
    if (a.kind() == Kind::kIdentity) continue;
    if (a.kind() == Kind::kConstant) {
      stack.assign(1, constant(domain_, a.codomain(), a.value()));
      continue;
    }
    if (!stack.empty()) {
      const MapExpr& top = stack.back();
      if (top.kind() == Kind::kConstant) {
        stack.back() = constant(top.domain(), a.codomain(), a.eval(top.value()));
        continue;
      }
      if (top.kind() == Kind::kProjection && a.kind() == Kind::kProjection) {
        std::vector<int> idx;
        for (int k : a.indices()) idx.push_back(top.indices()[k]);
        stack.back() = projection(top.domain(), a.codomain(), std::move(idx));
        continue;
      }
      if (top.kind() == Kind::kPL && a.kind() == Kind::kPL) {
        stack.back() = pl(pl_compose(a.plmap(), top.plmap()).normalized());
        continue;
      }
    }
    stack.push_back(a);
  }
  if (stack.empty()) return identity(domain_);
  MapExpr out = stack[0];
  for (size_t k = 1; k < stack.size(); ++k) out = compose(stack[k], out);
  return out;
}

std::string MapExpr::to_string() const {
  switch (kind_) {
    case Kind::kIdentity:
      return "id";
    case Kind::kConstant:
      return "const" + ahdiag::to_string(value_);
    case Kind::kPL:
      return label_.empty() ? "pl[" + pl_->domain()->name() + "->" + pl_->codomain()->name() + "]"
                            : "pl " + label_;
    case Kind::kProjection: {
      std::string out = "proj[";
      for (size_t c = 0; c < indices_.size(); ++c) out += (c ? "," : "") + std::to_string(indices_[c]);
      return out + "]";
    }
    case Kind::kComposite:
      return outer_->to_string() + " o " + inner_->to_string();
  }
  return "";
}

bool same_expr(const MapExpr& a, const MapExpr& b) {
  if (a.kind() != b.kind() || !same_space(*a.domain(), *b.domain()) ||
      !same_space(*a.codomain(), *b.codomain())) {
    return false;
  }
  switch (a.kind()) {
    case MapExpr::Kind::kIdentity:
      return true;
    case MapExpr::Kind::kConstant:
      return a.value() == b.value();
    case MapExpr::Kind::kPL:
      return equivalent(a.plmap(), b.plmap());
    case MapExpr::Kind::kProjection:
      return a.indices() == b.indices();
    case MapExpr::Kind::kComposite:
      return same_expr(a.outer(), b.outer()) && same_expr(a.inner(), b.inner());
  }
  return false;
}

}  // namespace ahdiag

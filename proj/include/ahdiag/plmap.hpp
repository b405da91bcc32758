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

#ifndef AHDIAG_PLMAP_HPP_
#define AHDIAG_PLMAP_HPP_

#include <vector>

#include "ahdiag/closed_subset.hpp"
#include "ahdiag/graph.hpp"

namespace ahdiag {

// Affine piece of a PL map: the domain-edge parameter range [t0, t1] is sent
// affinely into codomain edge `target`, from coordinate c0 to c1.
struct Piece {
  Rational t0;
  Rational t1;
  int target = 0;
  Rational c0;
  Rational c1;

  Rational at(const Rational& t) const {
    return c0 + (c1 - c0) * (t - t0) / (t1 - t0);
  }
  Rational slope() const { return (c1 - c0) / (t1 - t0); }
  bool constant() const { return c0 == c1; }

  friend bool operator==(const Piece&, const Piece&) = default;
};

// Piecewise-linear map between metric graphs. Every piece stays inside a
// single codomain edge; the map is continuous at breakpoints and at shared
// vertices. Immutable.
class PLMap {
 public:
  PLMap(GraphPtr domain, GraphPtr codomain, std::vector<std::vector<Piece>> pieces);

  static PLMap identity(const GraphPtr& g);
  static PLMap constant(const GraphPtr& domain, const GraphPtr& codomain,
                        const GraphPoint& value);

  const GraphPtr& domain() const { return domain_; }
  const GraphPtr& codomain() const { return codomain_; }
  const std::vector<Piece>& pieces(int edge) const { return pieces_.at(edge); }
  const std::vector<std::vector<Piece>>& all_pieces() const { return pieces_; }

  GraphPoint eval(const GraphPoint& p) const;
  GraphPoint eval_at(int edge, const Rational& t) const;
  // Index of the first piece on `edge` whose closed range contains t.
  size_t piece_index(int edge, const Rational& t) const;

  // Merges collinear neighbours and writes constant vertex-valued pieces in
  // canonical form, so that equal functions have equal piece lists.
  PLMap normalized() const;

  // Replaces the map on [lo, hi] of `edge` by `replacement`, which must
  // cover exactly [lo, hi] and agree with the map at lo and hi.
  PLMap grafted(int edge, const Rational& lo, const Rational& hi,
                const std::vector<Piece>& replacement) const;

  // Largest |slope| over all pieces (path-metric Lipschitz constant).
  Rational max_slope() const;

  friend bool equivalent(const PLMap& a, const PLMap& b);

 private:
  void validate() const;

  GraphPtr domain_;
  GraphPtr codomain_;
  std::vector<std::vector<Piece>> pieces_;
};

// f o g. Requires codomain(g) == domain(f).
PLMap pl_compose(const PLMap& f, const PLMap& g);

// Exact image as a closed subset of the codomain.
ClosedSubset pl_image(const PLMap& f);

struct SupDistance {
  Rational value;
  GraphPoint witness;  // domain point where the supremum is attained
};

// sup over the domain of point_distance(f(t), g(t)), attained and exact.
SupDistance pl_sup_distance(const PLMap& f, const PLMap& g);

}  // namespace ahdiag

#endif  // AHDIAG_PLMAP_HPP_

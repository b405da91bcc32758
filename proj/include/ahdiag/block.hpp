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

#ifndef AHDIAG_BLOCK_HPP_
#define AHDIAG_BLOCK_HPP_

#include <functional>
#include <vector>

#include "ahdiag/graph.hpp"
#include "ahdiag/matrix.hpp"

namespace ahdiag {

struct Summand {
  GraphPtr base;
  int size = 1;
};

// Finite direct sum of C(Z_j) (x) M_{n_j} over connected graphs, trivial bundles.
class Block {
 public:
  Block() = default;
  explicit Block(std::vector<Summand> summands);

  const std::vector<Summand>& summands() const { return summands_; }
  const Summand& summand(int j) const;
  int count() const { return static_cast<int>(summands_.size()); }
  int total_size() const;

  friend bool same_block(const Block& a, const Block& b);

 private:
  std::vector<Summand> summands_;
};

struct Knot {
  Rational t;
  CMatrix value;
};

// Matrix-valued PL function on each summand: per edge, knots at
// 0 = t_0 < ... < t_K = length with affine interpolation in between.
class Element {
 public:
  using EdgeKnots = std::vector<Knot>;
  using SummandKnots = std::vector<EdgeKnots>;

  Element(Block block, std::vector<SummandKnots> knots);

  static Element constant(const Block& block, const std::vector<CMatrix>& values);
  static Element identity(const Block& block);
  static Element zero(const Block& block);
  // Builds knots at the given per-edge breakpoints from a value function.
  static Element sample(const Block& block,
                        const std::function<std::vector<Rational>(int, int)>& breakpoints,
                        const std::function<CMatrix(int, const GraphPoint&)>& value);

  const Block& block() const { return block_; }
  const EdgeKnots& knots(int summand, int edge) const { return knots_.at(summand).at(edge); }
  const std::vector<SummandKnots>& all_knots() const { return knots_; }

  CMatrix eval(int summand, const GraphPoint& p) const;
  CMatrix eval_at(int summand, int edge, const Rational& t) const;

  // Pointwise transform of every knot value; exact when `fn` is affine.
  Element map_values(const std::function<CMatrix(const CMatrix&)>& fn) const;

  friend Element operator-(const Element& a, const Element& b);
  friend Element operator+(const Element& a, const Element& b);
  friend bool equivalent(const Element& a, const Element& b);

 private:
  void validate() const;

  Block block_;
  std::vector<SummandKnots> knots_;
};

// Squared bounds on the sup operator norm: lower_sq <= ||a||^2 <= upper_sq.
struct NormBounds {
  Rational lower_sq;
  Rational upper_sq;

  Rational lower() const { return sqrt_lower(lower_sq); }
  Rational upper() const { return sqrt_upper(upper_sq); }
};

NormBounds element_sup_norm_bounds(const Element& a);

struct LipschitzBound {
  Rational lip_sq;  // max squared Frobenius slope
  Rational upper;   // rational upper bound for sqrt(lip_sq)
};

LipschitzBound lipschitz_bound(const Element& a);

}  // namespace ahdiag

#endif  // AHDIAG_BLOCK_HPP_

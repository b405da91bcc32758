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

#ifndef AHDIAG_RATIONAL_HPP_
#define AHDIAG_RATIONAL_HPP_

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace ahdiag {

using Rational = mpq_class;

// Parses "p", "-p", "p/q". Never goes through floating point.
Rational parse_rational(std::string_view text);

// Canonical form: "p" for integers, otherwise "p/q" in lowest terms.
std::string to_string(const Rational& q);

// Smallest-denominator-free rational bounds on sqrt(x), x >= 0. The result
// is exact whenever x is the square of a rational.
Rational sqrt_upper(const Rational& x);
Rational sqrt_lower(const Rational& x);

inline Rational rabs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Rational rmin(const Rational& a, const Rational& b) {
  return a < b ? a : b;
}
inline Rational rmax(const Rational& a, const Rational& b) {
  return a < b ? b : a;
}

// 2^-n as an exact rational.
Rational pow2_neg(int n);

}  // namespace ahdiag

#endif  // AHDIAG_RATIONAL_HPP_

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

#include "ahdiag/rational.hpp"

#include <cctype>

#include "ahdiag/error.hpp"

namespace ahdiag {

namespace {

bool valid_integer(std::string_view s, bool allow_sign) {
  if (s.empty()) return false;
  size_t i = 0;
  if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

// Exact square root of a nonnegative integer if it exists, else false.
bool exact_isqrt(const mpz_class& n, mpz_class& root) {
  if (n < 0) return false;
  root = sqrt(n);
  return root * root == n;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
  if (!valid_integer(num, true) ||
      (slash != std::string_view::npos && !valid_integer(den, false))) {
    throw ParameterError("not a rational number: '" + std::string(text) + "'");
  }
  std::string n(num);
  if (!n.empty() && n[0] == '+') n.erase(0, 1);
  Rational q;
  if (slash == std::string_view::npos) {
    q = Rational(mpz_class(n));
  } else {
    mpz_class d(std::string{den});
    if (d == 0) {
      throw ParameterError("zero denominator: '" + std::string(text) + "'");
    }
    q = Rational(mpz_class(n), d);
    q.canonicalize();
  }
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational sqrt_upper(const Rational& x) {
  if (x < 0) throw DomainError("sqrt of negative rational");
  mpz_class rn, rd;
  if (exact_isqrt(x.get_num(), rn) && exact_isqrt(x.get_den(), rd)) {
    return Rational(rn, rd);
  }
  // ceil(sqrt(x) * 2^k) / 2^k with k = 40, checked exactly.
  const mpz_class scale = mpz_class(1) << 40;
  Rational scaled = x * scale * scale;
  mpz_class floor_val = scaled.get_num() / scaled.get_den();
  mpz_class r = sqrt(floor_val) + 1;
  Rational cand(r, scale);
  cand.canonicalize();
  while (cand * cand < x) {
    r += 1;
    cand = Rational(r, scale);
    cand.canonicalize();
  }
  return cand;
}

Rational sqrt_lower(const Rational& x) {
  if (x < 0) throw DomainError("sqrt of negative rational");
  mpz_class rn, rd;
  if (exact_isqrt(x.get_num(), rn) && exact_isqrt(x.get_den(), rd)) {
    return Rational(rn, rd);
  }
  const mpz_class scale = mpz_class(1) << 40;
  Rational scaled = x * scale * scale;
  mpz_class floor_val = scaled.get_num() / scaled.get_den();
  Rational cand(sqrt(floor_val), scale);
  cand.canonicalize();
  return cand;
}

Rational pow2_neg(int n) {
  Rational q(mpz_class(1), mpz_class(1) << n);
  q.canonicalize();
  return q;
}

}  // namespace ahdiag

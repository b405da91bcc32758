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

#ifndef AHDIAG_MATRIX_HPP_
#define AHDIAG_MATRIX_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "ahdiag/rational.hpp"

namespace ahdiag {

struct CRational {
  Rational re;
  Rational im;

  CRational() = default;
  CRational(Rational r, Rational i = 0) : re(std::move(r)), im(std::move(i)) {}
  CRational(long r) : re(r), im(0) {}

  Rational norm_sq() const { return re * re + im * im; }
  bool is_zero() const { return re == 0 && im == 0; }
  CRational conj() const { return {re, -im}; }

  friend CRational operator+(const CRational& a, const CRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend CRational operator-(const CRational& a, const CRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend CRational operator*(const CRational& a, const CRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend CRational operator*(const Rational& s, const CRational& a) {
    return {s * a.re, s * a.im};
  }
  friend bool operator==(const CRational& a, const CRational& b) {
    return a.re == b.re && a.im == b.im;
  }
};

// Token form "re" or "re:im".
CRational parse_complex(std::string_view text);
std::string to_string(const CRational& z);

// Dense square matrix over the complex rationals.
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(int n) : n_(n), data_(static_cast<size_t>(n) * n) {}

  static CMatrix identity(int n);
  static CMatrix unit(int n, int r, int c);  // matrix unit E_rc
  static CMatrix scalar(int n, const CRational& z);
  static CMatrix diagonal(const std::vector<CRational>& d);

  int size() const { return n_; }
  CRational& operator()(int r, int c) { return data_[static_cast<size_t>(r) * n_ + c]; }
  const CRational& operator()(int r, int c) const {
    return data_[static_cast<size_t>(r) * n_ + c];
  }

  Rational frobenius_sq() const;
  // max over rows and columns of the squared Euclidean norm; a lower bound
  // for the squared operator norm.
  Rational max_row_col_sq() const;
  bool is_zero() const;
  CMatrix adjoint() const;
  CMatrix pinched() const;  // off-diagonal entries set to zero

  // Places `blocks` along the diagonal.
  static CMatrix direct_sum(const std::vector<CMatrix>& blocks);

  friend CMatrix operator+(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator-(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator*(const Rational& s, const CMatrix& a);
  friend bool operator==(const CMatrix& a, const CMatrix& b) {
    return a.n_ == b.n_ && a.data_ == b.data_;
  }

  // Affine interpolation (1 - u) a + u b.
  static CMatrix lerp(const CMatrix& a, const CMatrix& b, const Rational& u);

 private:
  int n_ = 0;
  std::vector<CRational> data_;
};

}  // namespace ahdiag

#endif  // AHDIAG_MATRIX_HPP_

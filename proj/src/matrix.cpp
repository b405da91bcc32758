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

#include "ahdiag/matrix.hpp"

#include "ahdiag/error.hpp"

namespace ahdiag {

CRational parse_complex(std::string_view text) {
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return {parse_rational(text), 0};
  return {parse_rational(text.substr(0, colon)), parse_rational(text.substr(colon + 1))};
}

std::string to_string(const CRational& z) {
  if (z.im == 0) return to_string(z.re);
  return to_string(z.re) + ":" + to_string(z.im);
}

CMatrix CMatrix::identity(int n) { return scalar(n, 1); }

CMatrix CMatrix::unit(int n, int r, int c) {
  CMatrix m(n);
  m(r, c) = 1;
  return m;
}

CMatrix CMatrix::scalar(int n, const CRational& z) {
  CMatrix m(n);
  for (int i = 0; i < n; ++i) m(i, i) = z;
  return m;
}

CMatrix CMatrix::diagonal(const std::vector<CRational>& d) {
  CMatrix m(static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Rational CMatrix::frobenius_sq() const {
  Rational s = 0;
  for (const auto& z : data_) s += z.norm_sq();
  return s;
}

Rational CMatrix::max_row_col_sq() const {
  Rational best = 0;
  for (int i = 0; i < n_; ++i) {
    Rational row = 0, col = 0;
    for (int k = 0; k < n_; ++k) {
      row += (*this)(i, k).norm_sq();
      col += (*this)(k, i).norm_sq();
    }
    best = rmax(best, rmax(row, col));
  }
  return best;
}

bool CMatrix::is_zero() const {
  for (const auto& z : data_) {
    if (!z.is_zero()) return false;
  }
  return true;
}

CMatrix CMatrix::adjoint() const {
  CMatrix m(n_);
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) m(c, r) = (*this)(r, c).conj();
  }
  return m;
}

CMatrix CMatrix::pinched() const {
  CMatrix m(n_);
  for (int i = 0; i < n_; ++i) m(i, i) = (*this)(i, i);
  return m;
}

CMatrix CMatrix::direct_sum(const std::vector<CMatrix>& blocks) {
  int n = 0;
  for (const auto& b : blocks) n += b.size();
  CMatrix m(n);
  int off = 0;
  for (const auto& b : blocks) {
    for (int r = 0; r < b.size(); ++r) {
      for (int c = 0; c < b.size(); ++c) m(off + r, off + c) = b(r, c);
    }
    off += b.size();
  }
  return m;
}

static void same_size(const CMatrix& a, const CMatrix& b) {
  if (a.size() != b.size()) throw DomainError("matrix size mismatch");
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
  same_size(a, b);
  CMatrix m(a.n_);
  for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = a.data_[k] + b.data_[k];
  return m;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
  same_size(a, b);
  CMatrix m(a.n_);
  for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = a.data_[k] - b.data_[k];
  return m;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  same_size(a, b);
  CMatrix m(a.n_);
  for (int r = 0; r < a.n_; ++r) {
    for (int c = 0; c < a.n_; ++c) {
      CRational s;
      for (int k = 0; k < a.n_; ++k) s = s + a(r, k) * b(k, c);
      m(r, c) = s;
    }
  }
  return m;
}

CMatrix operator*(const Rational& s, const CMatrix& a) {
  CMatrix m(a.n_);
  for (size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = s * a.data_[k];
  return m;
}

CMatrix CMatrix::lerp(const CMatrix& a, const CMatrix& b, const Rational& u) {
  if (u == 0) return a;
  if (u == 1) return b;
  return a + u * (b - a);
}

}  // namespace ahdiag

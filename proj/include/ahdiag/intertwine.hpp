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

#ifndef AHDIAG_INTERTWINE_HPP_
#define AHDIAG_INTERTWINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "ahdiag/diagform.hpp"

namespace ahdiag {

// Two inductive systems over the same building blocks A_1, A_2, ...
// Index n-1 holds A_n, phi_n: A_n -> A_{n+1}, and the finite set F_n.
struct FiniteSystemPair {
  std::vector<Block> levels;
  std::vector<DiagonalForm> phi;
  std::vector<DiagonalForm> psi;
  std::vector<std::vector<Element>> generators;
};

enum class Intertwining { kSatisfied, kViolated, kInconclusive };
std::string to_string(Intertwining v);

struct LevelCheck {
  int n = 1;
  Rational threshold;                // 2^-n
  Rational bound;                    // certified upper bound
  std::optional<Rational> lower;     // certified lower bound, when computable
  Intertwining verdict = Intertwining::kSatisfied;
  // F_n contains phi_{n-1}(F_{n-1}) and psi_{n-1}(F_{n-1}). Vacuous at n = 1;
  // inconclusive when an image cannot be formed.
  Intertwining containment = Intertwining::kSatisfied;
  std::string detail;
};

struct IntertwiningReport {
  std::vector<LevelCheck> levels;
  Intertwining overall() const;
};

// Checks the hypotheses of the approximate intertwining criterion for
// n = 1..depth. DomainError on shape mismatches.
IntertwiningReport check_approx_intertwining(const FiniteSystemPair& pair, int depth);

// F_n = base[n-1] together with phi_{n-1}(F_{n-1}) and psi_{n-1}(F_{n-1}),
// duplicates removed. Images need strict descent.
std::vector<std::vector<Element>> close_generators(const std::vector<DiagonalForm>& phi,
                                                   const std::vector<DiagonalForm>& psi,
                                                   const std::vector<std::vector<Element>>& base);

// Depth-n pair over A_n = C(I). phi_n has the one eigenvalue function
// (1 - g_n) t and psi_n is its surjective perturbation with delta = g_n and
// rho = g_n / 100, where g_n is the largest power of two with
// (delta + rho) * maxLip(F_n) < 2^-n. F_1 = {t}; later F_n are closed under
// both images.
FiniteSystemPair perturbation_schedule(int depth);

}  // namespace ahdiag

#endif  // AHDIAG_INTERTWINE_HPP_

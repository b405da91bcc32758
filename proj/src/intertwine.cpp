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

#include "ahdiag/intertwine.hpp"

#include "ahdiag/error.hpp"
#include "ahdiag/perturb.hpp"

namespace ahdiag {

std::string to_string(Intertwining v) {
  switch (v) {
    case Intertwining::kSatisfied:
      return "satisfied";
    case Intertwining::kViolated:
      return "violated";
    case Intertwining::kInconclusive:
      return "inconclusive";
  }
  return "";
}

Intertwining IntertwiningReport::overall() const {
  Intertwining out = Intertwining::kSatisfied;
  for (const auto& l : levels) {
    for (Intertwining v : {l.verdict, l.containment}) {
      if (v == Intertwining::kViolated) return v;
      if (v == Intertwining::kInconclusive) out = v;
    }
  }
  return out;
}

namespace {

void add_unique(std::vector<Element>& set, Element x) {
  for (const auto& y : set) {
    if (equivalent(x, y)) return;
  }
  set.push_back(std::move(x));
}

bool contains(const std::vector<Element>& set, const Element& x) {
  for (const auto& y : set) {
    if (same_block(x.block(), y.block()) && equivalent(x, y)) return true;
  }
  return false;
}

}  // namespace

IntertwiningReport check_approx_intertwining(const FiniteSystemPair& pair, int depth) {
  if (depth < 1) throw DomainError("depth must be at least 1");
  const size_t d = static_cast<size_t>(depth);
  if (pair.levels.size() < d + 1 || pair.phi.size() < d || pair.psi.size() < d ||
      pair.generators.size() < d) {
    throw DomainError("system pair is shorter than depth " + std::to_string(depth));
  }
  for (size_t k = 0; k < d; ++k) {
    for (const auto* f : {&pair.phi[k], &pair.psi[k]}) {
      if (!same_block(f->source(), pair.levels[k]) || !same_block(f->target(), pair.levels[k + 1])) {
        throw DomainError("connecting map at level " + std::to_string(k + 1) +
                          " does not match the building blocks");
      }
    }
    for (const auto& a : pair.generators[k]) {
      if (!same_block(a.block(), pair.levels[k])) {
        throw DomainError("generator at level " + std::to_string(k + 1) + " lies in another block");
      }
    }
  }

  IntertwiningReport rep;
  for (int n = 1; n <= depth; ++n) {
    const auto& phi = pair.phi[n - 1];
    const auto& psi = pair.psi[n - 1];
    const auto& gens = pair.generators[n - 1];
    LevelCheck lc;
    lc.n = n;
    lc.threshold = pow2_neg(n);
    lc.bound = diagform_distance_bound(phi, psi, gens);
    try {
      Rational lower = 0;
      for (const auto& a : gens) {
        lower = rmax(lower, element_sup_norm_bounds(apply_diagform(phi, a) - apply_diagform(psi, a)).lower());
      }
      lc.lower = lower;
    } catch (const InvalidInput&) {
    }
    if (lc.bound < lc.threshold) {
      lc.verdict = Intertwining::kSatisfied;
    } else if (lc.lower && *lc.lower >= lc.threshold) {
      lc.verdict = Intertwining::kViolated;
    } else {
      lc.verdict = Intertwining::kInconclusive;
    }

    if (n > 1) {
      try {
        for (const auto* f : {&pair.phi[n - 2], &pair.psi[n - 2]}) {
          for (const auto& a : pair.generators[n - 2]) {
            if (!contains(gens, apply_diagform(*f, a))) {
              lc.containment = Intertwining::kViolated;
              lc.detail = "F_" + std::to_string(n) + " misses an image of F_" + std::to_string(n - 1);
            }
          }
        }
      } catch (const InvalidInput& e) {
        lc.containment = Intertwining::kInconclusive;
        lc.detail = std::string("containment not checkable: ") + e.what();
      }
    }
    rep.levels.push_back(std::move(lc));
  }
  return rep;
}

std::vector<std::vector<Element>> close_generators(const std::vector<DiagonalForm>& phi,
                                                   const std::vector<DiagonalForm>& psi,
                                                   const std::vector<std::vector<Element>>& base) {
  std::vector<std::vector<Element>> out;
  for (size_t k = 0; k < base.size(); ++k) {
    std::vector<Element> f;
    for (const auto& a : base[k]) add_unique(f, a);
    if (k > 0) {
      for (const auto* m : {&phi.at(k - 1), &psi.at(k - 1)}) {
        for (const auto& a : out[k - 1]) add_unique(f, apply_diagform(*m, a));
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

FiniteSystemPair perturbation_schedule(int depth) {
  if (depth < 1) throw ParameterError("perturbation_schedule: depth must be >= 1");
  auto I = fixtures::interval();
  auto ct = build_covering_tree(I, 1);
  Block a({Summand{I, 1}});
  const Element coordinate(a, {{{Knot{0, CMatrix::scalar(1, 0)}, Knot{1, CMatrix::scalar(1, 1)}}}});
  FiniteSystemPair pair;
  pair.levels.assign(depth + 1, a);
  for (int n = 1; n <= depth; ++n) {
    std::vector<Element> f{coordinate};
    if (n > 1) {
      for (const auto* m : {&pair.phi[n - 2], &pair.psi[n - 2]}) {
        for (const auto& x : pair.generators[n - 2]) {
          Element y = apply_diagform(*m, x);
          bool fresh = true;
          for (const auto& z : f) fresh = fresh && !equivalent(y, z);
          if (fresh) f.push_back(std::move(y));
        }
      }
    }
    Rational lip = 1;
    for (const auto& x : f) lip = rmax(lip, lipschitz_bound(x).upper);
    Rational g = pow2_neg(n + 2);
    while (g * Rational(101) / 100 * lip >= pow2_neg(n)) g /= 2;
    const Rational top = 1 - g;
    PLMap shrink(ct.tree, I, {{Piece{0, 1, 0, 0, top}}});
    DiagonalForm phi(a, a, {TargetData{ct, {DiagEntry{0, shrink}}}});
    pair.psi.push_back(make_surjective_mh(phi, g, g / 100).form);
    pair.phi.push_back(std::move(phi));
    pair.generators.push_back(std::move(f));
  }
  return pair;
}

}  // namespace ahdiag

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

#include "ahdiag/ahsys.hpp"

#include <algorithm>
#include <set>

#include "ahdiag/error.hpp"

namespace ahdiag {

bool GenDiagSystem::trivial_bundles() const {
  for (const auto& st : steps) {
    for (const auto& e : st.entries) {
      if (e.bundle.kind != Bundle::Kind::kTrivial) return false;
    }
  }
  return true;
}

void validate_structure(const GenDiagSystem& sys) {
  if (sys.levels.empty()) throw InvalidInput("system has no levels");
  if (sys.steps.size() + 1 != sys.levels.size()) {
    throw InvalidInput("system needs exactly one step between consecutive levels");
  }
  for (int n = 1; n <= sys.level_count(); ++n) {
    if (sys.level(n).components.empty()) {
      throw InvalidInput("level " + std::to_string(n) + " has no components");
    }
    if (sys.level(n).rank < 1) throw InvalidInput("level " + std::to_string(n) + " rank must be positive");
  }
  for (int n = 1; n < sys.level_count(); ++n) {
    const Step& st = sys.step(n);
    if (st.s < 1) throw InvalidInput("step " + std::to_string(n) + " multiplicity must be positive");
    const auto& lower = sys.level(n).components;
    const auto& upper = sys.level(n + 1).components;
    for (size_t y = 0; y < st.entries.size(); ++y) {
      const auto& e = st.entries[y];
      const std::string where = "step " + std::to_string(n) + " entry " + std::to_string(y);
      if (e.component < 0 || e.component >= static_cast<int>(upper.size()) || e.lands_in < 0 ||
          e.lands_in >= static_cast<int>(lower.size())) {
        throw InvalidInput(where + ": component index out of range");
      }
      if (!same_space(*e.lambda.domain(), *upper[e.component])) {
        throw InvalidInput(where + ": map domain " + e.lambda.domain()->describe() +
                           " is not component " + std::to_string(e.component) + " of level " +
                           std::to_string(n + 1));
      }
      if (!same_space(*e.lambda.codomain(), *lower[e.lands_in])) {
        throw InvalidInput(where + ": map codomain " + e.lambda.codomain()->describe() +
                           " is not component " + std::to_string(e.lands_in) + " of level " +
                           std::to_string(n));
      }
    }
  }
}

MapExpr composite_eigenvalue(const GenDiagSystem& sys, int n, const std::vector<int>& word) {
  if (word.empty()) throw DomainError("empty word has no composite");
  if (n < 1 || n + static_cast<int>(word.size()) > sys.level_count()) {
    throw DomainError("word runs past the last level");
  }
  const StepEntry* prev = nullptr;
  std::optional<MapExpr> out;
  for (size_t k = 0; k < word.size(); ++k) {
    const auto& entries = sys.step(n + static_cast<int>(k)).entries;
    if (word[k] < 0 || word[k] >= static_cast<int>(entries.size())) {
      throw DomainError("word letter " + std::to_string(word[k]) + " out of range at level " +
                        std::to_string(n + k));
    }
    const StepEntry& e = entries[word[k]];
    if (prev && prev->component != e.lands_in) {
      throw DomainError("word is not composable at position " + std::to_string(k));
    }
    out = out ? MapExpr::compose(*out, e.lambda) : e.lambda;
    prev = &e;
  }
  return out->normalized();
}

std::vector<std::vector<int>> words_into(const GenDiagSystem& sys, int n, int m, int component) {
  if (m == 0) return {{}};
  // Build right to left: the last letter must start in `component`.
  std::vector<std::pair<std::vector<int>, int>> partial;  // reversed word, lands_in
  const auto& last = sys.step(n + m - 1).entries;
  for (int y = 0; y < static_cast<int>(last.size()); ++y) {
    if (last[y].component == component) partial.push_back({{y}, last[y].lands_in});
  }
  for (int k = m - 2; k >= 0; --k) {
    std::vector<std::pair<std::vector<int>, int>> next;
    const auto& entries = sys.step(n + k).entries;
    for (const auto& [w, at] : partial) {
      for (int y = 0; y < static_cast<int>(entries.size()); ++y) {
        if (entries[y].component != at) continue;
        auto longer = w;
        longer.push_back(y);
        next.push_back({std::move(longer), entries[y].lands_in});
      }
    }
    partial = std::move(next);
  }
  std::vector<std::vector<int>> out;
  for (auto& [w, at] : partial) out.emplace_back(w.rbegin(), w.rend());
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "";
}

bool SystemReport::passed() const {
  return std::all_of(items.begin(), items.end(),
                     [](const CheckItem& c) { return c.verdict == Verdict::kPass; });
}

bool SystemReport::has(Verdict v) const {
  return std::any_of(items.begin(), items.end(), [&](const CheckItem& c) { return c.verdict == v; });
}

namespace {

bool distinct(const std::vector<int>& idx) {
  std::set<int> s(idx.begin(), idx.end());
  return s.size() == idx.size();
}

// Image tracking through a normalized atom chain.
struct ImageState {
  bool whole = true;
  std::optional<ClosedSubset> subset;  // set when !whole and exactly known
};

ImageState chain_image(const MapExpr& lambda) {
  ImageState st;
  for (const auto& a : lambda.normalized().atoms()) {
    switch (a.kind()) {
      case MapExpr::Kind::kIdentity:
        break;
      case MapExpr::Kind::kConstant:
        st.whole = false;
        if (a.codomain()->arity() == 1) {
          ClosedSubset s(a.codomain()->factor(0));
          s.add_point(a.value()[0]);
          st.subset = s;
        } else {
          st.subset.reset();
        }
        break;
      case MapExpr::Kind::kProjection:
        // A coordinate projection with distinct indices is onto; a subset
        // of a single factor pushed forward is not tracked.
        if (!st.whole || !distinct(a.indices())) st.whole = false, st.subset.reset();
        break;
      case MapExpr::Kind::kPL:
        if (st.whole) {
          st.whole = false;
          st.subset = pl_image(a.plmap());
        } else {
          st.subset.reset();
        }
        break;
      case MapExpr::Kind::kComposite:
        break;
    }
  }
  return st;
}

bool is_point(const Space& s) {
  return std::all_of(s.factors().begin(), s.factors().end(),
                     [](const GraphPtr& g) { return g->edge_count() == 0; });
}

}  // namespace

std::optional<ClosedSubset> exact_image(const MapExpr& lambda) {
  if (lambda.codomain()->arity() != 1) return std::nullopt;
  ImageState st = chain_image(lambda);
  if (st.whole) return ClosedSubset::whole(lambda.codomain()->factor(0));
  return st.subset;
}

SystemReport gendiag_check(const GenDiagSystem& sys) {
  SystemReport rep;
  try {
    validate_structure(sys);
  } catch (const InvalidInput& e) {
    rep.items.push_back({"structure", 0, -1, Verdict::kFail, e.what()});
    return rep;
  }
  for (int n = 1; n < sys.level_count(); ++n) {
    const Step& st = sys.step(n);
    const int r0 = sys.level(n).rank, r1 = sys.level(n + 1).rank;
    rep.items.push_back({"ranks", n, -1, r0 * st.s == r1 ? Verdict::kPass : Verdict::kFail,
                         "r_n * s_n = " + std::to_string(r0 * st.s) + ", r_{n+1} = " + std::to_string(r1)});

    // Each y carries a rank-one q_y on exactly one component j(y).
    const int upper = static_cast<int>(sys.level(n + 1).components.size());
    for (int j = 0; j < upper; ++j) {
      int count = 0;
      std::vector<int> slots;
      bool symbolic = false;
      for (const auto& e : st.entries) {
        if (e.component != j) continue;
        ++count;
        if (e.bundle.kind == Bundle::Kind::kTrivial) {
          slots.push_back(e.bundle.slot);
        } else {
          symbolic = true;
        }
      }
      rep.items.push_back({"unitality", n, j, count == st.s ? Verdict::kPass : Verdict::kFail,
                           std::to_string(count) + " rank-one summands, s_n = " + std::to_string(st.s)});
      bool slots_ok = distinct(slots);
      for (int e : slots) slots_ok = slots_ok && e >= 0 && e < st.s;
      std::string detail = slots_ok ? "slots distinct" : "slots repeat or exceed s_n";
      if (symbolic) detail += "; symbolic bundles assumed orthogonal";
      rep.items.push_back({"orthogonality", n, j, slots_ok ? Verdict::kPass : Verdict::kFail, detail});
    }
    for (size_t y = 0; y < st.entries.size(); ++y) {
      const auto& b = st.entries[y].bundle;
      const bool ok = b.kind == Bundle::Kind::kTrivial || !b.tag.empty();
      rep.items.push_back({"line-bundle", n, st.entries[y].component,
                           ok ? Verdict::kPass : Verdict::kFail,
                           "entry " + std::to_string(y) +
                               (b.kind == Bundle::Kind::kTrivial ? " trivial slot " + std::to_string(b.slot)
                                                                 : " bundle " + b.tag)});
    }

    // Injectivity: the images of the lambda_y cover each level-n component.
    const auto& lower = sys.level(n).components;
    for (int c = 0; c < static_cast<int>(lower.size()); ++c) {
      const Space& z = *lower[c];
      CheckItem item{"injectivity", n, c, Verdict::kFail, ""};
      std::vector<const StepEntry*> into;
      for (const auto& e : st.entries) {
        if (e.lands_in == c) into.push_back(&e);
      }
      if (into.empty()) {
        item.detail = "no eigenvalue map lands here";
      } else if (z.arity() == 1 && !z.is_product()) {
        ClosedSubset cover(z.factor(0));
        bool exact = true;
        for (const auto* e : into) {
          if (auto im = exact_image(e->lambda)) {
            cover.unite(*im);
          } else {
            exact = false;
          }
        }
        if (cover.covers_all()) {
          item.verdict = Verdict::kPass;
          item.detail = "image union covers";
        } else {
          item.verdict = exact ? Verdict::kFail : Verdict::kInconclusive;
          item.detail = exact ? "image union misses part of the space" : "image not computable exactly";
        }
      } else {
        bool onto = false, all_constant = true;
        for (const auto* e : into) {
          ImageState s = chain_image(e->lambda);
          onto = onto || s.whole;
          all_constant = all_constant && e->lambda.normalized().kind() == MapExpr::Kind::kConstant;
        }
        if (onto || is_point(z)) {
          item.verdict = Verdict::kPass;
          item.detail = "a surjective entry covers";
        } else if (all_constant) {
          item.detail = "finite image";
        } else {
          item.verdict = Verdict::kInconclusive;
          item.detail = "no closure rule decides coverage";
        }
      }
      rep.items.push_back(std::move(item));
    }
  }
  return rep;
}

GenDiagSystem untwist(const GenDiagSystem& sys) {
  GenDiagSystem out = sys;
  for (auto& st : out.steps) {
    std::vector<int> next;
    for (auto& e : st.entries) {
      if (e.component >= static_cast<int>(next.size())) next.resize(e.component + 1, 0);
      e.bundle = Bundle::trivial(next[e.component]++);
    }
  }
  return out;
}

namespace {

void check_schedule(size_t got, int levels, const std::string& what) {
  if (levels < 1) throw ParameterError("levels must be positive");
  if (got != static_cast<size_t>(levels - 1)) {
    throw ParameterError(what + " needs " + std::to_string(levels - 1) + " values, got " +
                         std::to_string(got));
  }
}

GenDiagSystem villadsen(const VilladsenParams& p, bool symbolic) {
  if (!p.seed) throw ParameterError("villadsen needs a seed graph");
  check_schedule(p.copies.size(), p.levels, "copies");
  check_schedule(p.constants.size(), p.levels, "constants");
  if (p.first_power < 1) throw ParameterError("first power must be positive");
  const GraphPoint pt = p.constant_point ? *p.constant_point : p.seed->vertex_point(0);
  if (!p.seed->contains(pt)) throw ParameterError("constant point is not on the seed graph");

  GenDiagSystem sys;
  sys.name = symbolic ? "villadsen2" : "villadsen1";
  int k = p.first_power;
  sys.levels.push_back(Level{{Space::power(p.seed, k)}, 1});
  for (int n = 1; n < p.levels; ++n) {
    const int d = p.copies[n - 1], c = p.constants[n - 1];
    if (d < 1 || c < 0) {
      throw ParameterError("step " + std::to_string(n) +
                           ": need at least one projection and no negative counts");
    }
    const int k1 = k * d;
    SpacePtr lower = sys.levels.back().components[0];
    SpacePtr upper = Space::power(p.seed, k1);
    Step st;
    st.s = d + c;
    for (int b = 0; b < d; ++b) {
      std::vector<int> idx;
      for (int i = 0; i < k; ++i) idx.push_back(b * k + i);
      st.entries.push_back({MapExpr::projection(upper, lower, idx), 0, 0, {}});
    }
    for (int b = 0; b < c; ++b) {
      st.entries.push_back({MapExpr::constant(upper, lower, SpacePoint(k, pt)), 0, 0, {}});
    }
    for (size_t y = 0; y < st.entries.size(); ++y) {
      st.entries[y].bundle = symbolic ? Bundle::symbolic("L" + std::to_string(n) + "." + std::to_string(y))
                                      : Bundle::trivial(static_cast<int>(y));
    }
    sys.levels.push_back(Level{{upper}, sys.levels.back().rank * st.s});
    sys.steps.push_back(std::move(st));
    k = k1;
  }
  return sys;
}

}  // namespace

GenDiagSystem generate_goodearl(const GoodearlParams& p) {
  if (!p.base) throw ParameterError("goodearl needs a base graph");
  check_schedule(p.points.size(), p.levels, "points");
  check_schedule(p.s.size(), p.levels, "s");
  SpacePtr z = Space::graph(p.base);
  GenDiagSystem sys;
  sys.name = "goodearl";
  sys.levels.push_back(Level{{z}, 1});
  for (int n = 1; n < p.levels; ++n) {
    const auto& pts = p.points[n - 1];
    const int s = p.s[n - 1];
    if (static_cast<int>(pts.size()) + 1 != s) {
      throw ParameterError("goodearl step " + std::to_string(n) + ": identity plus " +
                           std::to_string(pts.size()) + " constants is not s_n = " + std::to_string(s));
    }
    Step st;
    st.s = s;
    st.entries.push_back({MapExpr::identity(z), 0, 0, Bundle::trivial(0)});
    for (size_t k = 0; k < pts.size(); ++k) {
      if (!p.base->contains(pts[k])) throw ParameterError("goodearl point is not on the base graph");
      st.entries.push_back({MapExpr::constant(z, z, {pts[k]}), 0, 0, Bundle::trivial(static_cast<int>(k) + 1)});
    }
    sys.levels.push_back(Level{{z}, sys.levels.back().rank * s});
    sys.steps.push_back(std::move(st));
  }
  return sys;
}

GenDiagSystem generate_villadsen1(const VilladsenParams& p) { return villadsen(p, false); }

GenDiagSystem generate_villadsen2_skeleton(const VilladsenParams& p) { return villadsen(p, true); }

GenDiagSystem generate_dynamics(const DynamicsParams& p) {
  if (!p.sigma.domain()->same_structure(*p.sigma.codomain())) {
    throw ParameterError("sigma must map a graph to itself");
  }
  if (p.s < 1) throw ParameterError("s must be positive");
  if (p.levels < 1) throw ParameterError("levels must be positive");
  if (!pl_image(p.sigma).covers_all()) throw ParameterError("sigma must be surjective");
  SpacePtr z = Space::graph(p.sigma.domain());
  std::vector<MapExpr> iterates{MapExpr::identity(z)};
  PLMap power = PLMap::identity(p.sigma.domain());
  for (int k = 1; k < p.s; ++k) {
    power = pl_compose(p.sigma, power).normalized();
    iterates.push_back(MapExpr::pl(power));
  }
  GenDiagSystem sys;
  sys.name = "dynamics";
  sys.levels.push_back(Level{{z}, 1});
  for (int n = 1; n < p.levels; ++n) {
    Step st;
    st.s = p.s;
    for (int k = 0; k < p.s; ++k) st.entries.push_back({iterates[k], 0, 0, Bundle::trivial(k)});
    sys.levels.push_back(Level{{z}, sys.levels.back().rank * p.s});
    sys.steps.push_back(std::move(st));
  }
  return sys;
}

std::vector<GraphPoint> dyadic_schedule(const Graph& interval, int count) {
  if (interval.edge_count() != 1 || interval.edge(0).tail == interval.edge(0).head) {
    throw DomainError("dyadic schedule needs a single-edge interval");
  }
  std::vector<GraphPoint> out;
  for (long den = 2; static_cast<int>(out.size()) < count; den *= 2) {
    for (long lo = 1, hi = den - 1; lo <= hi && static_cast<int>(out.size()) < count; lo += 2, hi -= 2) {
      out.push_back(interval.point(0, interval.length(0) * Rational(lo, den)));
      if (hi != lo && static_cast<int>(out.size()) < count) {
        out.push_back(interval.point(0, interval.length(0) * Rational(hi, den)));
      }
    }
  }
  return out;
}

}  // namespace ahdiag

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

#include "ahdiag/groupoid.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "ahdiag/error.hpp"

namespace ahdiag {

size_t GroupoidStage::unit_count() const {
  return static_cast<size_t>(std::count_if(arrows.begin(), arrows.end(),
                                           [](const Arrow& a) { return a.is_unit(); }));
}

std::vector<StageSample> all_samples(const GenDiagSystem& sys, int level) {
  std::vector<StageSample> out;
  const auto& comps = sys.level(level).components;
  for (int c = 0; c < static_cast<int>(comps.size()); ++c) {
    for (const auto& z : comps[c]->samples()) out.push_back({c, z});
  }
  return out;
}

std::string word_string(const std::vector<int>& word) {
  if (word.empty()) return "-";
  std::string out;
  for (size_t k = 0; k < word.size(); ++k) out += (k ? "." : "") + std::to_string(word[k]);
  return out;
}

GroupoidStage build_stage(const GenDiagSystem& sys, int n, int m,
                          const std::vector<StageSample>& samples, Exec exec) {
  if (n < 1 || m < 0 || n + m > sys.level_count()) {
    throw DomainError("stage levels " + std::to_string(n) + "+" + std::to_string(m) +
                      " exceed the system's " + std::to_string(sys.level_count()) + " levels");
  }
  if (!sys.trivial_bundles()) {
    throw PreconditionError("stage needs trivial line bundles; untwist the system first");
  }
  const auto& comps = sys.level(n + m).components;
  for (const auto& s : samples) {
    if (s.component < 0 || s.component >= static_cast<int>(comps.size()) ||
        !comps[s.component]->contains(s.z)) {
      throw DomainError("sample " + to_string(s.z) + " is not on level " + std::to_string(n + m));
    }
  }
  GroupoidStage st;
  st.n = n;
  st.m = m;
  st.rank = sys.level(n).rank;
  st.samples = samples;
  const int r = st.rank;
  const long count = static_cast<long>(samples.size());
  std::vector<std::vector<Arrow>> per(samples.size());
  auto fill = [&](long i) {
    for (const auto& w : words_into(sys, n, m, samples[i].component)) {
      for (int k = 0; k < r; ++k) {
        for (int l = 0; l < r; ++l) per[i].push_back(Arrow{static_cast<int>(i), w, k, l});
      }
    }
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) fill(i);
  } else {
    for (long i = 0; i < count; ++i) fill(i);
  }
  for (auto& v : per) {
    for (auto& a : v) st.arrows.push_back(std::move(a));
  }
  return st;
}

Arrow compose_arrows(const Arrow& g, const Arrow& h) {
  if (g.sample != h.sample || g.word != h.word || g.l0 != h.k0) {
    throw DomainError("arrows are not composable");
  }
  return Arrow{g.sample, g.word, g.k0, h.l0};
}

Arrow inverse(const Arrow& g) { return Arrow{g.sample, g.word, g.l0, g.k0}; }
Arrow source(const Arrow& g) { return Arrow{g.sample, g.word, g.l0, g.l0}; }
Arrow range(const Arrow& g) { return Arrow{g.sample, g.word, g.k0, g.k0}; }

namespace {

CompositeValue composite_value(const GenDiagSystem& sys, const GroupoidStage& stage, int sample,
                               const std::vector<int>& word) {
  const StageSample& s = stage.samples.at(sample);
  if (word.empty()) return {sample, word, s.component, s.z};
  MapExpr lw = composite_eigenvalue(sys, stage.n, word);
  return {sample, word, sys.step(stage.n).entries[word[0]].lands_in, lw.eval(s.z)};
}

}  // namespace

ProjectedArrow project(const GenDiagSystem& sys, const GroupoidStage& stage, const Arrow& a) {
  auto cv = composite_value(sys, stage, a.sample, a.word);
  return ProjectedArrow{cv.component, cv.value, a.k0, a.l0};
}

std::vector<CompositeValue> composite_values(const GenDiagSystem& sys, const GroupoidStage& stage,
                                             Exec exec) {
  std::vector<std::pair<int, const std::vector<int>*>> keys;
  for (const auto& a : stage.arrows) {
    if (keys.empty() || keys.back().first != a.sample || *keys.back().second != a.word) {
      keys.push_back({a.sample, &a.word});
    }
  }
  const long count = static_cast<long>(keys.size());
  std::vector<CompositeValue> out(keys.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) out[i] = composite_value(sys, stage, keys[i].first, *keys[i].second);
  } else {
    for (long i = 0; i < count; ++i) out[i] = composite_value(sys, stage, keys[i].first, *keys[i].second);
  }
  return out;
}

OrbitReport orbit(const GenDiagSystem& sys, const GroupoidStage& stage, size_t unit, int view_base) {
  const Arrow& u = stage.arrows.at(unit);
  if (!u.is_unit()) throw DomainError("orbit needs a unit");
  if (view_base < stage.n || view_base > stage.n + stage.m) {
    throw DomainError("view base must lie between " + std::to_string(stage.n) + " and " +
                      std::to_string(stage.n + stage.m));
  }
  const size_t drop = static_cast<size_t>(view_base - stage.n);
  OrbitReport rep;
  rep.view_base = view_base;
  for (size_t i = 0; i < stage.arrows.size(); ++i) {
    const Arrow& a = stage.arrows[i];
    if (!a.is_unit() || a.sample != u.sample) continue;
    if (!std::equal(a.word.begin() + drop, a.word.end(), u.word.begin() + drop, u.word.end())) continue;
    long k = a.k0;
    for (size_t t = 0; t < drop; ++t) {
      const Step& st = sys.step(stage.n + static_cast<int>(t));
      k = k * st.s + st.entries[a.word[t]].bundle.slot;
    }
    rep.members.push_back(i);
    rep.reindexed.push_back(k);
  }
  return rep;
}

FibreReport check_fibrewise_bijective(const GenDiagSystem& sys, int n,
                                      const std::vector<StageSample>& samples) {
  FibreReport rep;
  GroupoidStage h = build_stage(sys, n, 1, samples);
  const int r = h.rank;
  // Group H_n arrows by (sample, y, l0): the source fibre of a unit.
  std::map<std::tuple<int, int, int>, std::vector<const Arrow*>> fibres;
  for (const auto& a : h.arrows) fibres[{a.sample, a.word[0], a.l0}].push_back(&a);
  for (const auto& [key, arrows] : fibres) {
    std::set<int> hit;
    std::optional<ProjectedArrow> unit_image;
    for (const auto* a : arrows) {
      ProjectedArrow p = project(sys, h, *a);
      if (!unit_image) unit_image = project(sys, h, source(*a));
      // Image must sit in the source fibre of p(unit): same point, same l0.
      if (p.value != unit_image->value || p.component != unit_image->component || p.l0 != a->l0) {
        rep.fibrewise_bijective = false;
        rep.problems.push_back("arrow leaves the image fibre");
      }
      hit.insert(p.k0);
    }
    if (static_cast<int>(hit.size()) != r || static_cast<int>(arrows.size()) != r) {
      rep.fibrewise_bijective = false;
      rep.problems.push_back("fibre over sample " + std::to_string(std::get<0>(key)) + " word " +
                             std::to_string(std::get<1>(key)) + " is not a bijection");
    }
  }
  for (const auto& item : gendiag_check(sys).items) {
    if (item.name == "structure") {
      rep.surjective = Verdict::kFail;
      rep.problems.push_back(item.detail);
    }
    if (item.name != "injectivity" || item.level != n || item.verdict == Verdict::kPass) continue;
    if (rep.surjective != Verdict::kFail) rep.surjective = item.verdict;
    rep.problems.push_back("p_n misses part of component " + std::to_string(item.component) + ": " +
                           item.detail);
  }
  return rep;
}

std::vector<SpacePoint> space_net(const Space& space, const Rational& spacing) {
  if (spacing <= 0) throw DomainError("net spacing must be positive");
  std::vector<std::vector<GraphPoint>> per;
  size_t total = 1;
  for (const auto& g : space.factors()) {
    std::vector<GraphPoint> pts;
    for (int v = 0; v < g->vertex_count(); ++v) pts.push_back(g->vertex_point(v));
    for (int e = 0; e < g->edge_count(); ++e) {
      const Rational len = g->length(e);
      Rational ratio = len / spacing;
      mpz_class k;
      mpz_cdiv_q(k.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
      const long steps = std::max(1L, k.get_si());
      for (long i = 1; i < steps; ++i) pts.push_back(g->point(e, len * Rational(i) / Rational(steps)));
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    total *= pts.size();
    if (total > 2000000) throw DomainError("net too large; raise the spacing");
    per.push_back(std::move(pts));
  }
  std::vector<SpacePoint> out{{}};
  for (const auto& pts : per) {
    std::vector<SpacePoint> next;
    for (const auto& p : out) {
      for (const auto& x : pts) {
        next.push_back(p);
        next.back().push_back(x);
      }
    }
    out = std::move(next);
  }
  return out;
}

Rational space_distance(const Space& space, const SpacePoint& a, const SpacePoint& b) {
  Rational d = 0;
  for (int k = 0; k < space.arity(); ++k) d = rmax(d, point_distance(*space.factor(k), a[k], b[k]));
  return d;
}

std::vector<size_t> uncovered_net_points(const Space& space, const std::vector<SpacePoint>& net,
                                         const std::vector<SpacePoint>& values,
                                         const Rational& epsilon, Exec exec) {
  std::vector<char> missed(net.size(), 0);
  auto test = [&](long i) {
    bool hit = false;
    for (size_t v = 0; v < values.size() && !hit; ++v) hit = space_distance(space, net[i], values[v]) <= epsilon;
    missed[i] = !hit;
  };
  const long count = static_cast<long>(net.size());
  if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) test(i);
  } else {
    for (long i = 0; i < count; ++i) test(i);
  }
  std::vector<size_t> out;
  for (size_t i = 0; i < net.size(); ++i) {
    if (missed[i]) out.push_back(i);
  }
  return out;
}

DensityReport density_report(const GenDiagSystem& sys, int n, const Rational& epsilon, int max_m,
                             Exec exec) {
  if (epsilon <= 0) throw ParameterError("epsilon must be positive");
  if (n < 1 || n > sys.level_count()) throw DomainError("no level " + std::to_string(n));
  if (max_m < 0 || n + max_m > sys.level_count()) {
    throw DomainError("depth " + std::to_string(max_m) + " runs past the last level");
  }
  DensityReport rep;
  rep.epsilon = epsilon;
  const auto& comps = sys.level(n).components;
  std::vector<std::vector<SpacePoint>> nets;
  for (const auto& c : comps) nets.push_back(space_net(*c, epsilon / 2));

  for (int m = 0; m <= max_m; ++m) {
    DensityStep step;
    step.m = m;
    step.dense = true;
    const auto samples = all_samples(sys, n + m);
    GroupoidStage stage = build_stage(sys, n, m, samples, exec);
    auto values = composite_values(sys, stage, exec);
    for (int s = 0; s < static_cast<int>(samples.size()) && step.dense; ++s) {
      std::vector<std::vector<SpacePoint>> landed(comps.size());
      for (const auto& cv : values) {
        if (cv.sample == s) landed[cv.component].push_back(cv.value);
      }
      for (size_t c = 0; c < comps.size(); ++c) {
        auto miss = uncovered_net_points(*comps[c], nets[c], landed[c], epsilon, exec);
        if (!miss.empty()) {
          step.dense = false;
          step.witness = samples[s];
          step.uncovered = nets[c][miss.front()];
          break;
        }
      }
    }
    if (step.dense && !rep.first_dense) rep.first_dense = m;
    rep.steps.push_back(std::move(step));
  }
  return rep;
}

namespace {

std::string node_id(const Arrow& a, int k) {
  return "\"s" + std::to_string(a.sample) + "|" + word_string(a.word) + "|" + std::to_string(k) + "\"";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

void export_stage_dot(std::ostream& out, const GroupoidStage& stage) {
  out << "digraph stage {\n";
  for (const auto& a : stage.arrows) {
    if (!a.is_unit()) continue;
    out << "  " << node_id(a, a.k0) << " [label=\"z=" << to_string(stage.samples[a.sample].z)
        << " w=" << word_string(a.word) << " k=" << a.k0 << "\"];\n";
  }
  for (const auto& a : stage.arrows) {
    out << "  " << node_id(a, a.l0) << " -> " << node_id(a, a.k0) << ";\n";
  }
  out << "}\n";
}

std::string stage_dot(const GroupoidStage& stage) {
  std::ostringstream s;
  export_stage_dot(s, stage);
  return s.str();
}

void write_orbit_csv(std::ostream& out, const GenDiagSystem& sys, const GroupoidStage& stage,
                     int view_base) {
  out << "base_level,depth,z,word,orbit_size\n";
  for (size_t i = 0; i < stage.arrows.size(); ++i) {
    const Arrow& a = stage.arrows[i];
    if (a.k0 != 0 || a.l0 != 0) continue;
    out << stage.n << ',' << stage.m << ',' << csv_field(to_string(stage.samples[a.sample].z)) << ','
        << word_string(a.word) << ',' << orbit(sys, stage, i, view_base).size() << '\n';
  }
}

}  // namespace ahdiag

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

// Serial reference vs OpenMP kernels of the groupoid module.

#include <benchmark/benchmark.h>

#include "ahdiag/ahsys.hpp"
#include "ahdiag/groupoid.hpp"

using namespace ahdiag;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::kParallel : Exec::kSerial; }

// Goodearl system over I with s = 3 and many samples per level.
const GenDiagSystem& system_fixture() {
  static const GenDiagSystem sys = [] {
    GoodearlParams p;
    p.base = fixtures::interval();
    p.levels = 6;
    auto pts = dyadic_schedule(*p.base, 2 * (p.levels - 1));
    for (int n = 1; n < p.levels; ++n) {
      p.points.push_back({pts[2 * n - 2], pts[2 * n - 1]});
      p.s.push_back(3);
    }
    GenDiagSystem s = generate_goodearl(p);
    for (auto& level : s.levels) {
      std::vector<SpacePoint> samples;
      for (int k = 0; k <= 64; ++k) samples.push_back({p.base->point(0, Rational(k, 64))});
      level.components[0] = level.components[0]->with_samples(samples);
    }
    return s;
  }();
  return sys;
}

void BM_BuildStage(benchmark::State& state) {
  const auto& sys = system_fixture();
  const auto samples = all_samples(sys, 5);
  for (auto _ : state) benchmark::DoNotOptimize(build_stage(sys, 1, 4, samples, exec_of(state)));
}

void BM_CompositeValues(benchmark::State& state) {
  const auto& sys = system_fixture();
  const auto stage = build_stage(sys, 1, 4, all_samples(sys, 5));
  for (auto _ : state) benchmark::DoNotOptimize(composite_values(sys, stage, exec_of(state)));
}

void BM_UncoveredNet(benchmark::State& state) {
  auto sq = Space::power(fixtures::interval(), 2);
  const auto net = space_net(*sq, Rational(1, 32));
  std::vector<SpacePoint> values;
  for (size_t k = 0; k < net.size(); k += 7) values.push_back(net[k]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(uncovered_net_points(*sq, net, values, Rational(1, 16), exec_of(state)));
  }
}

}  // namespace

BENCHMARK(BM_BuildStage)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_CompositeValues)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_UncoveredNet)->Arg(0)->Arg(1)->ArgName("parallel");

BENCHMARK_MAIN();

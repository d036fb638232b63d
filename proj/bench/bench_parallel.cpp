// SPDX-License-Identifier: Apache-2.0
//
// fadestat - fading channel statistics toolkit
// Copyright (C) 2026 The fadestat authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Serial reference against the OpenMP kernels.

#include <benchmark/benchmark.h>

#include "fadestat/gof_tests.hpp"
#include "fadestat/gsm_channel.hpp"
#include "fadestat/mle_fitting.hpp"
#include "fadestat/parallel.hpp"
#include "fadestat/pipeline.hpp"

using namespace fadestat;

namespace {

struct BootstrapInput {
  SampleSet data;
  FitResult fitted;
};

const BootstrapInput& bootstrap_input() {
  static const BootstrapInput in = [] {
    RandomStream rng(7);
    SampleSet data = sample(FadingModel::nakagami(1.6, 1.0), 1000, rng);
    FitResult fitted = fit(Family::nakagami, data);
    return BootstrapInput{std::move(data), std::move(fitted)};
  }();
  return in;
}

const Simulation& simulation() {
  static const Simulation sim = [] {
    ChannelProfile p;
    p.fill(std::monostate{});
    p[0] = FadingModel::rician(1.0, 0.35);
    p[2] = FadingModel::rayleigh(0.3);
    SimulationOptions so;
    so.n_bursts = 1000;
    return simulate_bursts(p, TrainingSequence::etsi64(), so);
  }();
  return sim;
}

void bootstrap(benchmark::State& state, bool parallel) {
  const auto& in = bootstrap_input();
  BootstrapOptions o;
  o.replicates = 200;
  for (auto _ : state) {
    auto r = parallel ? bootstrap_alpha(in.data, in.fitted, o) : bootstrap_alpha_serial(in.data, in.fitted, o);
    benchmark::DoNotOptimize(r.ks.alpha_level);
  }
  state.counters["threads"] = parallel ? max_threads() : 1;
}

void ensemble(benchmark::State& state, bool parallel) {
  const auto& sim = simulation();
  const TrainingSequence ts = TrainingSequence::etsi64();
  for (auto _ : state) {
    auto e = parallel ? build_ensemble(sim.capture, ts) : build_ensemble_serial(sim.capture, ts);
    benchmark::DoNotOptimize(e.rows());
  }
  state.counters["threads"] = parallel ? max_threads() : 1;
}

void analysis_grid(benchmark::State& state, bool parallel) {
  static const TapEnsemble e = build_ensemble(simulation().capture, TrainingSequence::etsi64());
  AnalysisConfig c;
  c.gof_mode = AlphaMethod::table;
  c.families = {Family::weibull, Family::rician, Family::rayleigh, Family::nakagami, Family::gamma, Family::f};
  c.taps = {0, 2};
  for (auto _ : state) {
    auto r = parallel ? run_analysis(e, c) : run_analysis_serial(e, c);
    benchmark::DoNotOptimize(r.taps.size());
  }
  state.counters["threads"] = parallel ? max_threads() : 1;
}

}  // namespace

BENCHMARK_CAPTURE(bootstrap, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bootstrap, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(ensemble, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(ensemble, openmp, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(analysis_grid, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(analysis_grid, openmp, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The flowsep Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <benchmark/benchmark.h>

#include <random>

#include "flowsep/bdrpca.hpp"
#include "flowsep/phantom.hpp"
#include "flowsep/prox.hpp"

namespace {

using namespace flowsep;

ComplexMatrix noise(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) {
    const double re = n(rng);
    m.data()[i] = Complex(re, n(rng));
  }
  return m;
}

// Casorati-shaped SVT: pixels x frames.
void BM_Svt(benchmark::State& state) {
  const ComplexMatrix z = noise(state.range(0), state.range(1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(svt(z, 5.0));
}
BENCHMARK(BM_Svt)->Args({8192, 100})->Args({72611, 40})->Unit(benchmark::kMillisecond);

void BM_SoftThreshold(benchmark::State& state) {
  const ComplexMatrix z = noise(8192, 100, 2);
  for (auto _ : state) benchmark::DoNotOptimize(soft_threshold(z, 0.5));
}
BENCHMARK(BM_SoftThreshold)->Unit(benchmark::kMillisecond);

// Blur of a whole sequence, frame by frame in the frequency domain.
void BM_ConvSequence(benchmark::State& state) {
  const Index nz = state.range(0);
  const Index nx = state.range(1);
  const CasoratiMatrix m(noise(nz * nx, 100, 3), nz, nx);
  const FrequencyOperator op = embed_psf(PsfShape{}.make(), nz, nx);
  for (auto _ : state) benchmark::DoNotOptimize(apply_to_casorati(m, op));
}
BENCHMARK(BM_ConvSequence)->Args({128, 64})->Args({451, 161})->Unit(benchmark::kMillisecond);

// Cost per ADMM iteration on the desk-scale phantom.
void BM_RpcaIteration(benchmark::State& state) {
  const PhantomTruth t = simulate(PhantomConfig::desk_scale());
  AdmmParams p = reference_admm_params(128, 64, 100, kRpcaMu0);
  p.max_iter = 10;
  p.tol = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(rpca(t.s_observed, p));
  state.SetItemsProcessed(state.iterations() * p.max_iter);
}
BENCHMARK(BM_RpcaIteration)->Unit(benchmark::kMillisecond);

void BM_DrpcaIteration(benchmark::State& state) {
  const PhantomTruth t = simulate(PhantomConfig::desk_scale());
  AdmmParams p = reference_admm_params(128, 64, 100, kDeconvolutiveMu0);
  p.max_iter = 10;
  p.tol = 1e-300;
  for (auto _ : state) benchmark::DoNotOptimize(drpca(t.s_observed, t.psf_true, p));
  state.SetItemsProcessed(state.iterations() * p.max_iter);
}
BENCHMARK(BM_DrpcaIteration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

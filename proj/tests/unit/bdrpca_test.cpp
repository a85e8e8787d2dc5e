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

#include "flowsep/bdrpca.hpp"

#include <gtest/gtest.h>

#include <random>

#include "flowsep/metrics.hpp"
#include "flowsep/phantom.hpp"
#include "test_support.hpp"

namespace flowsep {
namespace {

PhantomConfig small_config(std::uint64_t seed) {
  PhantomConfig c;
  c.nz = 48;
  c.nx = 40;
  c.nt = 30;
  c.vessel = {16, 0, 20, 40};
  c.rect1 = {18, 6, 8, 24};
  c.rect2 = {28, 10, 6, 16};
  c.seed = seed;
  return c;
}

BdrpcaParams small_params(Index nz, Index nx, Index nt) {
  BdrpcaParams p = BdrpcaParams::reference(nz, nx, nt);
  p.bd.psf_rows = 9;
  p.bd.psf_cols = 9;
  p.outer_max = 2;
  p.init_admm.max_iter = 100;
  p.admm.max_iter = 100;
  return p;
}

TEST(Bdrpca, LowRankInputLeavesBloodEmpty) {
  std::mt19937_64 rng(1);
  const Index nz = 24;
  const Index nx = 20;
  const Index nt = 16;
  const ComplexMatrix tissue =
      testing::random_complex(nz * nx, 2, rng) * testing::random_complex(nt, 2, rng).adjoint();
  BdrpcaParams p = small_params(nz, nx, nt);
  p.bd.psf_rows = 5;
  p.bd.psf_cols = 5;
  const SeparationResult r = bdrpca(CasoratiMatrix(tissue, nz, nx), p);
  EXPECT_LE(r.blood.matrix().norm(), 1e-3 * tissue.norm());
  EXPECT_LE((r.tissue.matrix() - tissue).norm(), 1e-3 * tissue.norm());
  ASSERT_TRUE(r.psf.has_value());
  EXPECT_TRUE(r.psf->kernel().allFinite());
}

TEST(Bdrpca, OverrideReducesToDrpca) {
  const PhantomTruth truth = simulate(small_config(2));
  BdrpcaParams p = small_params(48, 40, 30);
  p.psf_override = truth.psf_true;
  const SeparationResult a = bdrpca(truth.s_observed, p);
  const SeparationResult b = drpca(truth.s_observed, truth.psf_true, p.admm);
  EXPECT_EQ(a.blood.matrix(), b.blood.matrix());
  EXPECT_EQ(a.tissue.matrix(), b.tissue.matrix());
  EXPECT_EQ(a.iterations, b.iterations);
  ASSERT_TRUE(a.psf.has_value());
  EXPECT_NEAR(a.psf->kernel().norm(), 1.0, 1e-12);
  EXPECT_TRUE(a.outer_trace.empty());
}

TEST(Bdrpca, OuterLoopBookkeeping) {
  const PhantomTruth truth = simulate(small_config(3));
  const BdrpcaParams p = small_params(48, 40, 30);
  const SeparationResult r = bdrpca(truth.s_observed, p);
  ASSERT_GE(r.outer_trace.size(), 1U);
  EXPECT_LE(r.outer_trace.size(), static_cast<std::size_t>(p.outer_max));
  EXPECT_EQ(static_cast<std::size_t>(r.iterations), r.trace.size());
  int inner = 0;
  for (const OuterRecord& o : r.outer_trace) {
    EXPECT_GE(o.blood_change, 0.0);
    EXPECT_GE(o.inner_iterations, 1);
    inner += o.inner_iterations;
  }
  EXPECT_LT(inner, r.iterations);  // the RPCA seed accounts for the rest
  ASSERT_TRUE(r.psf.has_value());
  EXPECT_EQ(r.psf->rows(), 9);
  EXPECT_NEAR(r.psf->kernel().norm(), 1.0, 1e-12);
}

TEST(Bdrpca, LooseToleranceStopsAfterOnePass) {
  const PhantomTruth truth = simulate(small_config(4));
  BdrpcaParams p = small_params(48, 40, 30);
  p.outer_max = 5;
  p.outer_tol = 1e300;
  const SeparationResult r = bdrpca(truth.s_observed, p);
  EXPECT_EQ(r.outer_trace.size(), 1U);
  EXPECT_TRUE(r.converged);
}

TEST(Bdrpca, Deterministic) {
  const PhantomTruth truth = simulate(small_config(5));
  const BdrpcaParams p = small_params(48, 40, 30);
  const SeparationResult a = bdrpca(truth.s_observed, p);
  const SeparationResult b = bdrpca(truth.s_observed, p);
  EXPECT_EQ(a.blood.matrix(), b.blood.matrix());
  EXPECT_EQ(a.psf->kernel(), b.psf->kernel());
}

TEST(Bdrpca, RecoversPsfShape) {
  const PhantomTruth truth = simulate(small_config(6));
  BdrpcaParams p = small_params(48, 40, 30);
  p.bd.psf_rows = 15;
  p.bd.psf_cols = 15;
  const SeparationResult r = bdrpca(truth.s_observed, p);
  EXPECT_GE(kernel_correlation(truth.psf_true, *r.psf), 0.8);
}

TEST(Bdrpca, RejectsBadParameters) {
  const CasoratiMatrix s(ComplexMatrix::Ones(64, 8), 8, 8);
  BdrpcaParams p = small_params(8, 8, 8);
  p.bd.psf_rows = 5;
  p.bd.psf_cols = 5;
  {
    BdrpcaParams q = p;
    q.outer_max = 0;
    EXPECT_THROW(bdrpca(s, q), std::invalid_argument);
  }
  {
    BdrpcaParams q = p;
    q.outer_tol = -1.0;
    EXPECT_THROW(bdrpca(s, q), std::invalid_argument);
  }
  {
    BdrpcaParams q = p;
    q.bd_alternations = 0;
    EXPECT_THROW(bdrpca(s, q), std::invalid_argument);
  }
  {
    BdrpcaParams q = p;
    q.bd.psf_rows = 9;
    EXPECT_THROW(bdrpca(s, q), std::invalid_argument);
  }
  {
    BdrpcaParams q = p;
    q.admm.lambda = 0.0;
    EXPECT_THROW(bdrpca(s, q), std::invalid_argument);
  }
}

TEST(Bdrpca, TunedPresetScalesReference) {
  const BdrpcaParams ref = BdrpcaParams::reference(128, 64, 100);
  const BdrpcaParams tuned = BdrpcaParams::tuned(128, 64, 100);
  EXPECT_DOUBLE_EQ(tuned.admm.lambda, kTunedBdrpcaScale * ref.admm.lambda);
  EXPECT_DOUBLE_EQ(tuned.admm.mu, kTunedBdrpcaScale * ref.admm.mu);
  EXPECT_DOUBLE_EQ(tuned.init_admm.lambda, kTunedRpcaScale * ref.init_admm.lambda);
  EXPECT_DOUBLE_EQ(ref.admm.lambda, 1.0 / std::sqrt(128.0 * 64.0));
  EXPECT_DOUBLE_EQ(ref.admm.mu, 2.0 * ref.admm.lambda);
  EXPECT_DOUBLE_EQ(ref.init_admm.mu, 10.0 * ref.init_admm.lambda);
}

}  // namespace
}  // namespace flowsep

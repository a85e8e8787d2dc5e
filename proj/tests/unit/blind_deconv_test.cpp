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

#include "flowsep/blind_deconv.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flowsep/fft.hpp"
#include "flowsep/metrics.hpp"
#include "flowsep/phantom.hpp"
#include "test_support.hpp"

namespace flowsep {
namespace {

using testing::random_complex;
using testing::rel_err;

double correlation(const RealImage& a, const RealImage& b) {
  return a.cwiseProduct(b).sum() / (a.norm() * b.norm());
}

Image blurred_scatterers(const Psf& psf, Index nz, Index nx, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return conv2_circ(random_complex(nz, nx, rng), embed_psf(psf, nz, nx));
}

BdParams small_support(Index rows, Index cols) {
  BdParams p;
  p.psf_rows = rows;
  p.psf_cols = cols;
  return p;
}

TEST(BdParams, Validation) {
  BdParams p;
  EXPECT_NO_THROW(p.validate(32, 32));
  EXPECT_THROW(p.validate(10, 32), std::invalid_argument);
  p.cepstral_cutoff = 0.0;
  EXPECT_THROW(p.validate(32, 32), std::invalid_argument);
  p.cepstral_cutoff = 3.0;
  p.inner_max_iter = 0;
  EXPECT_THROW(p.validate(32, 32), std::invalid_argument);
  EXPECT_DOUBLE_EQ(BdParams{}.effective_cutoff(128, 64), 3.2);
}

TEST(EstimatePsfMagnitude, ImpulseGivesFlatSpectrum) {
  Image g = Image::Zero(16, 16);
  g(0, 0) = 1.0;
  const RealImage mag = estimate_psf_magnitude(g, small_support(3, 3)).values();
  EXPECT_LT((mag.array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(EstimatePsfMagnitude, TracksTrueKernelSpectrum) {
  const Psf psf = synth_psf(0.1, 1.5, 2.0, 15, 15);
  const Image g = blurred_scatterers(psf, 256, 128, 1);
  const RealImage est = estimate_psf_magnitude(g, BdParams{}).values();
  const RealImage truth = embed_psf(psf, 256, 128).transfer().cwiseAbs();
  EXPECT_GE(correlation(est, truth), 0.9);
  EXPECT_DOUBLE_EQ(est.maxCoeff(), 1.0);
  EXPECT_GE(est.minCoeff(), 0.0);
}

TEST(EstimatePsfMagnitude, ScaleInvariant) {
  std::mt19937_64 rng(2);
  const Image g = random_complex(24, 20, rng);
  const BdParams p = small_support(5, 5);
  const RealImage a = estimate_psf_magnitude(g, p).values();
  const RealImage b = estimate_psf_magnitude(Complex(2.0, 0.0) * g, p).values();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EstimatePsfMagnitude, RejectsZeroImage) {
  EXPECT_THROW(estimate_psf_magnitude(Image::Zero(16, 16), small_support(3, 3)), std::invalid_argument);
}

TEST(MagnitudeSpectrum, RejectsNegativeOrNonFinite) {
  RealImage m = RealImage::Ones(3, 3);
  m(1, 1) = -0.1;
  EXPECT_THROW(MagnitudeSpectrum{m}, std::invalid_argument);
  m(1, 1) = std::nan("");
  EXPECT_THROW(MagnitudeSpectrum{m}, std::invalid_argument);
}

TEST(DeconvolutionGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  const FrequencyOperator op = embed_psf(Psf(random_complex(3, 3, rng)), 8, 8);
  const Image g = random_complex(8, 8, rng);
  const Image f = random_complex(8, 8, rng, 0.1);
  const HuberParams hp{0.3, 0.12};
  const Image grad = deconvolution_gradient(g, op, f, hp);
  const double h = 1e-6;
  double max_err = 0.0;
  for (Index i = 0; i < f.size(); ++i) {
    for (const Complex dir : {Complex(1, 0), Complex(0, 1)}) {
      Image plus = f;
      Image minus = f;
      plus.data()[i] += h * dir;
      minus.data()[i] -= h * dir;
      const double fd = (deconvolution_objective(g, op, plus, hp) - deconvolution_objective(g, op, minus, hp)) / (2 * h);
      const double analytic = dir.real() != 0.0 ? grad.data()[i].real() : grad.data()[i].imag();
      max_err = std::max(max_err, std::abs(fd - analytic));
    }
  }
  EXPECT_LT(max_err, 1e-5);
}

TEST(EstimateTrf, VanishingRegularizationWithDeltaIsIdentity) {
  std::mt19937_64 rng(4);
  const Image g = random_complex(12, 10, rng);
  BdParams p = small_support(1, 1);
  p.huber.gamma = 1e-12;
  p.inner_tol = 1e-15;
  const Image f = estimate_trf(g, Psf::delta(), p);
  EXPECT_LE(rel_err(f, g), 1e-6);
}

TEST(EstimateTrf, QuadraticBranchMatchesTikhonov) {
  std::mt19937_64 rng(5);
  const Psf psf(random_complex(3, 3, rng));
  const FrequencyOperator op = embed_psf(psf, 32, 32);
  const Image g = random_complex(32, 32, rng, 1e-3);
  BdParams p = small_support(3, 3);
  p.huber = {0.05, 1e3};  // knee far above every entry
  p.inner_tol = 1e-14;
  p.inner_max_iter = 5000;
  const TrfEstimate est = estimate_trf_detailed(g, op, p);

  const Image gh = fft::forward(g);
  const Image& h = op.transfer();
  const Image closed =
      fft::inverse(Image((h.conjugate().array() * gh.array()) / (h.cwiseAbs2().array() + 2.0 * p.huber.gamma)));
  EXPECT_LE(rel_err(est.reflectivity, closed), 1e-4);
}

TEST(EstimateTrf, ObjectiveDecreasesMonotonically) {
  std::mt19937_64 rng(6);
  const FrequencyOperator op = embed_psf(synth_psf(0.1, 1.0, 1.5, 7, 7), 24, 24);
  const Image g = random_complex(24, 24, rng);
  const TrfEstimate est = estimate_trf_detailed(g, op, BdParams{small_support(7, 7)});
  ASSERT_GE(est.objective.size(), 2U);
  for (std::size_t k = 1; k < est.objective.size(); ++k) EXPECT_LE(est.objective[k], est.objective[k - 1]);
  EXPECT_LE(est.objective.back(), deconvolution_objective(g, op, g, BdParams{}.huber));
}

TEST(FitConstrainedPsf, DeltaReflectivityReturnsImageAsKernel) {
  std::mt19937_64 rng(7);
  const Image g = random_complex(9, 9, rng);
  Image delta = Image::Zero(9, 9);
  delta(0, 0) = 1.0;
  const MagnitudeSpectrum mag(fft::forward(g).cwiseAbs());
  const PsfFit fit = fit_constrained_psf(g, delta, mag, small_support(9, 9));
  EXPECT_LT(rel_err(fit.transfer, fft::forward(g)), 1e-12);
  EXPECT_LT(rel_err(fft::inverse(fit.transfer), g), 1e-12);
}

TEST(FitConstrainedPsf, ExactPhaseRecoveryWithoutNoise) {
  std::mt19937_64 rng(8);
  const Psf h0(random_complex(5, 5, rng));
  const FrequencyOperator op = embed_psf(h0, 20, 20);
  const Image f = random_complex(20, 20, rng);
  const Image g = conv2_circ(f, op);
  const MagnitudeSpectrum mag(op.transfer().cwiseAbs());
  const PsfFit fit = fit_constrained_psf(g, f, mag, small_support(5, 5));
  const Image fh = fft::forward(f);
  double worst = 0.0;
  for (Index i = 0; i < fh.size(); ++i) {
    if (std::abs(fh.data()[i]) > 1e-9) worst = std::max(worst, std::abs(fit.transfer.data()[i] - op.transfer().data()[i]));
  }
  EXPECT_LE(worst, 1e-8 * op.transfer().cwiseAbs().maxCoeff());
  EXPECT_GT(kernel_correlation(h0, fit.psf), 1.0 - 1e-9);
}

TEST(FitConstrainedPsf, HardMagnitudeConstraintOnRandomInstances) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Image g = random_complex(16, 12, rng);
    const Image f = random_complex(16, 12, rng);
    RealImage m(16, 12);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    const PsfFit fit = fit_constrained_psf(g, f, MagnitudeSpectrum(m), small_support(5, 5));
    EXPECT_LE((fit.transfer.cwiseAbs() - m).cwiseAbs().maxCoeff(), 1e-12 * m.maxCoeff());
    EXPECT_NEAR(fit.psf.energy(), 1.0, 1e-12);
    EXPECT_EQ(fit.psf.rows(), 5);
  }
}

TEST(FitConstrainedPsf, RejectsDimensionMismatch) {
  const Image g = Image::Ones(8, 8);
  EXPECT_THROW(fit_constrained_psf(g, Image::Ones(8, 7), MagnitudeSpectrum(RealImage::Ones(8, 8)), small_support(3, 3)),
               std::invalid_argument);
}

TEST(BlindDeconvolve, SingleStepFromTrueKernelMatchesTrf) {
  const Psf psf = synth_psf(0.1, 1.2, 1.5, 9, 9);
  const Image g = blurred_scatterers(psf, 48, 40, 10);
  const BdParams p = small_support(9, 9);
  const BlindDeconvolution bd = blind_deconvolve(g, p, 1, psf);
  EXPECT_LT(rel_err(bd.reflectivity, estimate_trf(g, psf, p)), 1e-12);
}

TEST(BlindDeconvolve, RecoversSyntheticKernel) {
  const Psf psf = synth_psf(0.1, 1.5, 2.0, 15, 15);
  const Image g = blurred_scatterers(psf, 128, 128, 11);
  const BlindDeconvolution bd = blind_deconvolve(g, BdParams{}, 3);
  EXPECT_GE(kernel_correlation(psf, bd.psf), 0.85);
}

TEST(BlindDeconvolve, ObjectiveIsNonIncreasing) {
  const Psf psf = synth_psf(0.1, 1.0, 1.5, 7, 7);
  const Image g = blurred_scatterers(psf, 40, 36, 12);
  const BlindDeconvolution bd = blind_deconvolve(g, small_support(7, 7), 4);
  ASSERT_EQ(bd.objective.size(), 9U);
  for (std::size_t k = 1; k < bd.objective.size(); ++k) {
    EXPECT_LE(bd.objective[k], bd.objective[k - 1] * (1.0 + 1e-9) + 1e-12) << k;
  }
}

TEST(BlindDeconvolve, GlobalPhaseRotationLeavesDataFitUnchanged) {
  const Psf psf = synth_psf(0.1, 1.0, 1.5, 7, 7);
  const Image g = blurred_scatterers(psf, 32, 32, 13);
  const BdParams p = small_support(7, 7);
  const BlindDeconvolution a = blind_deconvolve(g, p, 2);
  const Complex rot = std::polar(1.0, 0.7);
  const Image g_rot = rot * g;
  const BlindDeconvolution b = blind_deconvolve(g_rot, p, 2);
  const double fit_a = (g - conv2_circ(a.reflectivity, FrequencyOperator(a.transfer))).norm();
  const double fit_b = (g_rot - conv2_circ(b.reflectivity, FrequencyOperator(b.transfer))).norm();
  EXPECT_NEAR(fit_a, fit_b, 1e-9 * g.norm());
  EXPECT_GT(kernel_correlation(a.psf, b.psf), 1.0 - 1e-9);
}

TEST(BlindDeconvolve, RejectsNonPositiveAlternations) {
  EXPECT_THROW(blind_deconvolve(Image::Ones(16, 16), small_support(3, 3), 0), std::invalid_argument);
}

}  // namespace
}  // namespace flowsep

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

#pragma once

#include <optional>
#include <vector>

#include "flowsep/linops.hpp"
#include "flowsep/prox.hpp"

namespace flowsep {

/// Non-negative DFT magnitude of a PSF on an nz x nx grid.
class MagnitudeSpectrum {
 public:
  explicit MagnitudeSpectrum(RealImage mag);

  [[nodiscard]] const RealImage& values() const noexcept { return mag_; }
  [[nodiscard]] Index nz() const noexcept { return mag_.rows(); }
  [[nodiscard]] Index nx() const noexcept { return mag_.cols(); }

 private:
  RealImage mag_;
};

struct BdParams {
  HuberParams huber{0.002, 0.05};
  /// Gaussian lifter radius in samples; unset means 5% of min(nz, nx).
  std::optional<double> cepstral_cutoff;
  Index psf_rows = 15;
  Index psf_cols = 15;
  double inner_tol = 1e-6;
  int inner_max_iter = 200;

  /// Throws std::invalid_argument for non-positive values or a support or
  /// cutoff larger than the nz x nx image.
  void validate(Index nz, Index nx) const;
  [[nodiscard]] double effective_cutoff(Index nz, Index nx) const;
};

/// Homomorphic estimate of the PSF magnitude: Gaussian low-quefrency
/// liftering of log|FFT(g)|, exponentiated and scaled to max 1. Image phase
/// is not used. Throws std::invalid_argument for an all-zero image.
MagnitudeSpectrum estimate_psf_magnitude(const Image& g, const BdParams& p);

/// 0.5 ||G - H F||^2 + huber(F).
double deconvolution_objective(const Image& g, const FrequencyOperator& op, const Image& f, const HuberParams& huber);

/// Gradient of deconvolution_objective in the d/dRe + i d/dIm packing:
/// H^H (H F - G) + huber_gradient(F).
Image deconvolution_gradient(const Image& g, const FrequencyOperator& op, const Image& f, const HuberParams& huber);

struct TrfEstimate {
  Image reflectivity;
  std::vector<double> objective;  ///< value after every accepted iteration, starting at the initial point
  int iterations = 0;
};

/// Minimizes deconvolution_objective over F with a monotone accelerated
/// gradient method and backtracking, starting from `init` (G when unset).
/// Stops when the relative objective change drops below inner_tol.
TrfEstimate estimate_trf_detailed(const Image& g, const FrequencyOperator& op, const BdParams& p,
                                  const std::optional<Image>& init = std::nullopt);
Image estimate_trf(const Image& g, const Psf& psf, const BdParams& p);

struct PsfFit {
  /// Cropped, unit-energy kernel.
  Psf psf;
  /// Full-grid transfer function before cropping; |transfer| == magnitude.
  Image transfer;
};

/// Per-frequency minimizer of ||G - H F||^2 subject to |FFT(H)| = mag:
/// H = mag * exp(i arg(G conj(F))), phase 0 where G conj(F) vanishes. The
/// kernel is cropped to psf_rows x psf_cols around its energy centroid and
/// renormalized.
PsfFit fit_constrained_psf(const Image& g, const Image& f, const MagnitudeSpectrum& mag, const BdParams& p);

struct BlindDeconvolution {
  Psf psf;
  Image reflectivity;
  Image transfer;  ///< last pre-crop transfer function
  MagnitudeSpectrum magnitude;
  /// Full objective after each half step (F then H), starting from the
  /// initial pair. Non-increasing.
  std::vector<double> objective;
};

/// Alternates estimate_trf and fit_constrained_psf n_outer times, starting
/// from the zero-phase kernel with the estimated magnitude, or from `init`
/// when given.
BlindDeconvolution blind_deconvolve(const Image& g, const BdParams& p, int n_outer,
                                    const std::optional<Psf>& init = std::nullopt);

}  // namespace flowsep

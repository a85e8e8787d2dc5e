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

#include "flowsep/casorati.hpp"
#include "flowsep/types.hpp"

namespace flowsep {

/// Small 2D convolution kernel with an explicit origin. The default origin
/// is (kh/2, kw/2), rounded down.
class Psf {
 public:
  explicit Psf(ComplexMatrix kernel);
  Psf(ComplexMatrix kernel, Index center_row, Index center_col);

  /// 1x1 unit kernel.
  static Psf delta();

  [[nodiscard]] const ComplexMatrix& kernel() const noexcept { return kernel_; }
  [[nodiscard]] Index rows() const noexcept { return kernel_.rows(); }
  [[nodiscard]] Index cols() const noexcept { return kernel_.cols(); }
  [[nodiscard]] Index center_row() const noexcept { return center_row_; }
  [[nodiscard]] Index center_col() const noexcept { return center_col_; }

  /// Sum of squared moduli.
  [[nodiscard]] double energy() const { return kernel_.squaredNorm(); }
  /// True when energy() == 1 within 1e-9.
  [[nodiscard]] bool normalized() const;
  /// Copy scaled to unit energy. Throws on an all-zero kernel.
  [[nodiscard]] Psf normalized_copy() const;

  /// Kernel of the adjoint operator: conjugated and flipped in both axes.
  [[nodiscard]] Psf adjoint() const;

  friend bool operator==(const Psf& a, const Psf& b) {
    return a.center_row_ == b.center_row_ && a.center_col_ == b.center_col_ &&
           a.kernel_.rows() == b.kernel_.rows() && a.kernel_.cols() == b.kernel_.cols() &&
           a.kernel_ == b.kernel_;
  }

 private:
  ComplexMatrix kernel_;
  Index center_row_;
  Index center_col_;
};

/// Circular 2D convolution diagonalized by the DFT: transfer is the
/// spectrum of the zero-padded kernel with its origin moved to (0, 0).
class FrequencyOperator {
 public:
  explicit FrequencyOperator(Image transfer);

  static FrequencyOperator identity(Index nz, Index nx);

  [[nodiscard]] const Image& transfer() const noexcept { return transfer_; }
  [[nodiscard]] Index nz() const noexcept { return transfer_.rows(); }
  [[nodiscard]] Index nx() const noexcept { return transfer_.cols(); }

  [[nodiscard]] FrequencyOperator adjoint() const { return FrequencyOperator(transfer_.conjugate()); }
  /// max |transfer|^2, the squared operator norm.
  [[nodiscard]] double squared_norm() const { return transfer_.cwiseAbs2().maxCoeff(); }

 private:
  Image transfer_;
};

/// Throws std::invalid_argument when the kernel is larger than nz x nx.
FrequencyOperator embed_psf(const Psf& psf, Index nz, Index nx);

/// Zero-padded nz x nx image holding the kernel with its origin at (0, 0),
/// wrapping negative offsets. This is the spatial form of the operator.
Image embed_kernel(const Psf& psf, Index nz, Index nx);

Image conv2_circ(const Image& image, const FrequencyOperator& op);
Image conv2_circ_adjoint(const Image& image, const FrequencyOperator& op);

/// Frame-by-frame convolution; the time axis is untouched.
CasoratiMatrix apply_to_casorati(const CasoratiMatrix& m, const FrequencyOperator& op);
CasoratiMatrix apply_adjoint_to_casorati(const CasoratiMatrix& m, const FrequencyOperator& op);

namespace detail {
/// In-place frame-wise multiply by `transfer` (or its conjugate) in the
/// frequency domain. Columns of `frames` are nz*nx frames.
void filter_frames(ComplexMatrix& frames, const Image& transfer, bool conjugate);
}  // namespace detail

}  // namespace flowsep

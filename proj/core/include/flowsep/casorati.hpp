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
#include <span>
#include <vector>

#include "flowsep/types.hpp"

namespace flowsep {

/// Row index of pixel (z, x) in a Casorati matrix. z runs fastest. Every
/// reshape in the library goes through this function.
constexpr Index flat_index(Index z, Index x, Index nz) noexcept { return z + nz * x; }

/// nz * nx, or std::overflow_error if the product does not fit in Index.
Index checked_pixel_count(Index nz, Index nx);

struct StackMetadata {
  std::optional<double> dz_cm;
  std::optional<double> dx_cm;
  std::optional<double> frame_rate_hz;

  friend bool operator==(const StackMetadata&, const StackMetadata&) = default;
};

/// Complex IQ data cube indexed (z, x, t). Storage is z-fastest, then x,
/// then t. Immutable after construction.
class IQStack {
 public:
  /// Throws std::invalid_argument on non-positive dims, size mismatch,
  /// index overflow or non-finite samples.
  IQStack(Index nz, Index nx, Index nt, std::vector<Complex> data, StackMetadata meta = {});

  static IQStack zeros(Index nz, Index nx, Index nt);

  [[nodiscard]] Index nz() const noexcept { return nz_; }
  [[nodiscard]] Index nx() const noexcept { return nx_; }
  [[nodiscard]] Index nt() const noexcept { return nt_; }
  [[nodiscard]] const StackMetadata& metadata() const noexcept { return meta_; }
  [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }

  [[nodiscard]] Complex operator()(Index z, Index x, Index t) const {
    return data_[static_cast<std::size_t>(flat_index(z, x, nz_) + nz_ * nx_ * t)];
  }

  [[nodiscard]] Image frame(Index t) const;

  friend bool operator==(const IQStack&, const IQStack&) = default;

 private:
  Index nz_;
  Index nx_;
  Index nt_;
  std::vector<Complex> data_;
  StackMetadata meta_;
};

/// Space-by-time matrix: column t is frame t flattened with flat_index().
class CasoratiMatrix {
 public:
  /// Throws std::invalid_argument when rows() != nz * nx or dims are not
  /// positive.
  CasoratiMatrix(ComplexMatrix data, Index nz, Index nx);

  [[nodiscard]] const ComplexMatrix& matrix() const noexcept { return data_; }
  [[nodiscard]] Index nz() const noexcept { return nz_; }
  [[nodiscard]] Index nx() const noexcept { return nx_; }
  [[nodiscard]] Index nt() const noexcept { return data_.cols(); }
  [[nodiscard]] Index pixels() const noexcept { return data_.rows(); }

  [[nodiscard]] Image frame(Index t) const;

  friend bool operator==(const CasoratiMatrix& a, const CasoratiMatrix& b) {
    return a.nz_ == b.nz_ && a.nx_ == b.nx_ && a.data_.rows() == b.data_.rows() &&
           a.data_.cols() == b.data_.cols() && a.data_ == b.data_;
  }

 private:
  ComplexMatrix data_;
  Index nz_;
  Index nx_;
};

CasoratiMatrix to_casorati(const IQStack& stack);
IQStack from_casorati(const CasoratiMatrix& m, StackMetadata meta = {});

/// Pixel-wise mean over frames, returned as an nz x nx image.
Image temporal_mean(const CasoratiMatrix& m);

/// Column of an image in Casorati layout, and the inverse reshape.
Eigen::VectorXcd flatten(const Image& frame);
Image unflatten(const Eigen::Ref<const Eigen::VectorXcd>& column, Index nz, Index nx);

}  // namespace flowsep

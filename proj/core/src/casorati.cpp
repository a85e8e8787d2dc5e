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

#include "flowsep/casorati.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace flowsep {

namespace {

Index checked_mul(Index a, Index b, const char* what) {
  if (a > 0 && b > std::numeric_limits<Index>::max() / a) {
    throw std::overflow_error(std::string("dimension overflow: ") + what);
  }
  return a * b;
}

void require_positive_dims(Index nz, Index nx, Index nt) {
  if (nz < 1 || nx < 1 || nt < 1) {
    throw std::invalid_argument("stack dims must be >= 1, got " + std::to_string(nz) + "x" +
                                std::to_string(nx) + "x" + std::to_string(nt));
  }
}

}  // namespace

Index checked_pixel_count(Index nz, Index nx) { return checked_mul(nz, nx, "nz * nx"); }

IQStack::IQStack(Index nz, Index nx, Index nt, std::vector<Complex> data, StackMetadata meta)
    : nz_(nz), nx_(nx), nt_(nt), data_(std::move(data)), meta_(meta) {
  require_positive_dims(nz, nx, nt);
  const Index expected = checked_mul(checked_pixel_count(nz, nx), nt, "nz * nx * nt");
  if (static_cast<Index>(data_.size()) != expected) {
    throw std::invalid_argument("stack holds " + std::to_string(data_.size()) + " samples, expected " +
                                std::to_string(expected));
  }
  for (const Complex& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument("stack contains non-finite samples");
    }
  }
}

IQStack IQStack::zeros(Index nz, Index nx, Index nt) {
  require_positive_dims(nz, nx, nt);
  const Index n = checked_mul(checked_pixel_count(nz, nx), nt, "nz * nx * nt");
  return IQStack(nz, nx, nt, std::vector<Complex>(static_cast<std::size_t>(n)));
}

Image IQStack::frame(Index t) const {
  if (t < 0 || t >= nt_) throw std::out_of_range("frame index out of range");
  const Index n = nz_ * nx_;
  return Eigen::Map<const Image>(data_.data() + n * t, nz_, nx_);
}

CasoratiMatrix::CasoratiMatrix(ComplexMatrix data, Index nz, Index nx)
    : data_(std::move(data)), nz_(nz), nx_(nx) {
  if (nz < 1 || nx < 1) throw std::invalid_argument("Casorati spatial dims must be >= 1");
  if (data_.cols() < 1) throw std::invalid_argument("Casorati matrix needs at least one frame");
  if (data_.rows() != checked_pixel_count(nz, nx)) {
    throw std::invalid_argument("Casorati row count " + std::to_string(data_.rows()) + " != nz*nx = " +
                                std::to_string(nz * nx));
  }
}

Image CasoratiMatrix::frame(Index t) const {
  if (t < 0 || t >= nt()) throw std::out_of_range("frame index out of range");
  return unflatten(data_.col(t), nz_, nx_);
}

CasoratiMatrix to_casorati(const IQStack& stack) {
  const Index rows = checked_pixel_count(stack.nz(), stack.nx());
  // Storage orders coincide, so this is a straight copy.
  ComplexMatrix m = Eigen::Map<const ComplexMatrix>(stack.data().data(), rows, stack.nt());
  return CasoratiMatrix(std::move(m), stack.nz(), stack.nx());
}

IQStack from_casorati(const CasoratiMatrix& m, StackMetadata meta) {
  const ComplexMatrix& d = m.matrix();
  std::vector<Complex> data(d.data(), d.data() + d.size());
  return IQStack(m.nz(), m.nx(), m.nt(), std::move(data), meta);
}

Image temporal_mean(const CasoratiMatrix& m) {
  const Eigen::VectorXcd mean = m.matrix().rowwise().mean();
  return unflatten(mean, m.nz(), m.nx());
}

Eigen::VectorXcd flatten(const Image& frame) {
  return Eigen::Map<const Eigen::VectorXcd>(frame.data(), frame.size());
}

Image unflatten(const Eigen::Ref<const Eigen::VectorXcd>& column, Index nz, Index nx) {
  if (column.size() != checked_pixel_count(nz, nx)) {
    throw std::invalid_argument("column length does not match nz*nx");
  }
  Image out(nz, nx);
  for (Index x = 0; x < nx; ++x) {
    for (Index z = 0; z < nz; ++z) out(z, x) = column(flat_index(z, x, nz));
  }
  return out;
}

}  // namespace flowsep

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

#include "flowsep/linops.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "flowsep/fft.hpp"
#include "flowsep/parallel.hpp"

namespace flowsep {

namespace {

void require_same_dims(const Image& image, const FrequencyOperator& op) {
  if (image.rows() != op.nz() || image.cols() != op.nx()) {
    throw std::invalid_argument("image is " + std::to_string(image.rows()) + "x" + std::to_string(image.cols()) +
                                " but operator is " + std::to_string(op.nz()) + "x" + std::to_string(op.nx()));
  }
}

Image filter(const Image& image, const Image& transfer, bool conjugate) {
  Image spec = fft::forward(image);
  if (conjugate) {
    spec.array() *= transfer.array().conjugate();
  } else {
    spec.array() *= transfer.array();
  }
  return fft::inverse(spec);
}

}  // namespace

Psf::Psf(ComplexMatrix kernel) : Psf(kernel, kernel.rows() / 2, kernel.cols() / 2) {}

Psf::Psf(ComplexMatrix kernel, Index center_row, Index center_col)
    : kernel_(std::move(kernel)), center_row_(center_row), center_col_(center_col) {
  if (kernel_.rows() < 1 || kernel_.cols() < 1) throw std::invalid_argument("empty PSF kernel");
  if (center_row_ < 0 || center_row_ >= kernel_.rows() || center_col_ < 0 || center_col_ >= kernel_.cols()) {
    throw std::invalid_argument("PSF center lies outside the kernel");
  }
  if (!kernel_.allFinite()) throw std::invalid_argument("PSF kernel has non-finite entries");
}

Psf Psf::delta() { return Psf(ComplexMatrix::Ones(1, 1), 0, 0); }

bool Psf::normalized() const { return std::abs(energy() - 1.0) <= 1e-9; }

Psf Psf::normalized_copy() const {
  const double e = energy();
  if (e <= 0.0) throw std::invalid_argument("cannot normalize an all-zero PSF");
  return Psf(kernel_ / std::sqrt(e), center_row_, center_col_);
}

Psf Psf::adjoint() const {
  const Index kh = rows();
  const Index kw = cols();
  ComplexMatrix flipped(kh, kw);
  for (Index j = 0; j < kw; ++j) {
    for (Index i = 0; i < kh; ++i) flipped(i, j) = std::conj(kernel_(kh - 1 - i, kw - 1 - j));
  }
  return Psf(std::move(flipped), kh - 1 - center_row_, kw - 1 - center_col_);
}

FrequencyOperator::FrequencyOperator(Image transfer) : transfer_(std::move(transfer)) {
  if (transfer_.rows() < 1 || transfer_.cols() < 1) throw std::invalid_argument("empty transfer function");
}

FrequencyOperator FrequencyOperator::identity(Index nz, Index nx) {
  return FrequencyOperator(Image::Ones(nz, nx));
}

Image embed_kernel(const Psf& psf, Index nz, Index nx) {
  if (psf.rows() > nz || psf.cols() > nx) {
    throw std::invalid_argument("PSF " + std::to_string(psf.rows()) + "x" + std::to_string(psf.cols()) +
                                " does not fit in " + std::to_string(nz) + "x" + std::to_string(nx));
  }
  Image padded = Image::Zero(nz, nx);
  for (Index j = 0; j < psf.cols(); ++j) {
    const Index x = ((j - psf.center_col()) % nx + nx) % nx;
    for (Index i = 0; i < psf.rows(); ++i) {
      const Index z = ((i - psf.center_row()) % nz + nz) % nz;
      padded(z, x) = psf.kernel()(i, j);
    }
  }
  return padded;
}

FrequencyOperator embed_psf(const Psf& psf, Index nz, Index nx) {
  return FrequencyOperator(fft::forward(embed_kernel(psf, nz, nx)));
}

Image conv2_circ(const Image& image, const FrequencyOperator& op) {
  require_same_dims(image, op);
  return filter(image, op.transfer(), false);
}

Image conv2_circ_adjoint(const Image& image, const FrequencyOperator& op) {
  require_same_dims(image, op);
  return filter(image, op.transfer(), true);
}

namespace detail {

void filter_frames(ComplexMatrix& frames, const Image& transfer, bool conjugate) {
  const Index nz = transfer.rows();
  const Index nx = transfer.cols();
  if (frames.rows() != nz * nx) throw std::invalid_argument("frame length does not match operator dims");
  const Eigen::Map<const Eigen::VectorXcd> h(transfer.data(), transfer.size());
  parallel_for(static_cast<std::size_t>(frames.cols()), [&](std::size_t t) {
    Complex* col = frames.col(static_cast<Index>(t)).data();
    fft::forward(col, col, nz, nx);
    Eigen::Map<Eigen::VectorXcd> spec(col, nz * nx);
    if (conjugate) {
      spec.array() *= h.array().conjugate();
    } else {
      spec.array() *= h.array();
    }
    fft::inverse(col, col, nz, nx);
  });
}

}  // namespace detail

CasoratiMatrix apply_to_casorati(const CasoratiMatrix& m, const FrequencyOperator& op) {
  if (m.nz() != op.nz() || m.nx() != op.nx()) throw std::invalid_argument("Casorati dims do not match operator");
  ComplexMatrix out = m.matrix();
  detail::filter_frames(out, op.transfer(), false);
  return CasoratiMatrix(std::move(out), m.nz(), m.nx());
}

CasoratiMatrix apply_adjoint_to_casorati(const CasoratiMatrix& m, const FrequencyOperator& op) {
  if (m.nz() != op.nz() || m.nx() != op.nx()) throw std::invalid_argument("Casorati dims do not match operator");
  ComplexMatrix out = m.matrix();
  detail::filter_frames(out, op.transfer(), true);
  return CasoratiMatrix(std::move(out), m.nz(), m.nx());
}

}  // namespace flowsep

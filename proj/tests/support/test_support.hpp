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

#include <cstdint>
#include <random>

#include "flowsep/casorati.hpp"
#include "flowsep/linops.hpp"

namespace flowsep::testing {

inline ComplexMatrix random_complex(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  ComplexMatrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) {
    const double re = n(rng);
    m.data()[i] = Complex(re, n(rng));
  }
  return m;
}

inline double rel_err(const ComplexMatrix& a, const ComplexMatrix& b) {
  const double denom = std::max(b.norm(), 1e-300);
  return (a - b).norm() / denom;
}

/// Direct O(N^2 K^2) circular convolution with a kernel whose origin is at
/// (center_row, center_col). Independent of the FFT path.
inline Image direct_circular_conv(const Image& img, const Psf& psf) {
  const Index nz = img.rows();
  const Index nx = img.cols();
  Image out = Image::Zero(nz, nx);
  for (Index x = 0; x < nx; ++x) {
    for (Index z = 0; z < nz; ++z) {
      Complex acc(0.0, 0.0);
      for (Index j = 0; j < psf.cols(); ++j) {
        for (Index i = 0; i < psf.rows(); ++i) {
          const Index sz = ((z - (i - psf.center_row())) % nz + nz) % nz;
          const Index sx = ((x - (j - psf.center_col())) % nx + nx) % nx;
          acc += psf.kernel()(i, j) * img(sz, sx);
        }
      }
      out(z, x) = acc;
    }
  }
  return out;
}

}  // namespace flowsep::testing

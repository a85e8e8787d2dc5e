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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace flowsep {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Dense complex matrix. Casorati matrices are (nz*nx) x nt.
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

/// A single 2D frame, nz rows (axial) by nx columns (lateral). Eigen's
/// column-major storage makes the flat memory order z-fastest, which is the
/// Casorati row order used throughout the library.
using Image = Eigen::MatrixXcd;
using RealImage = Eigen::MatrixXd;

/// Raised when an iterative solver cannot continue (non-finite iterate,
/// divergence). The message carries the iteration index.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  [[nodiscard]] int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace flowsep

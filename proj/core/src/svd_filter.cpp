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

#include "flowsep/svd_filter.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace flowsep {

CasoratiMatrix svd_filter(const CasoratiMatrix& s, const RankBand& band) {
  const ComplexMatrix& m = s.matrix();
  const Index r = std::min(m.rows(), m.cols());
  if (band.tc < 1 || band.tc > band.tb || band.tb > r) {
    throw std::invalid_argument("rank band [" + std::to_string(band.tc) + ", " + std::to_string(band.tb) +
                                "] outside [1, " + std::to_string(r) + "]");
  }
  Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("SVD failed");
  const Index first = band.tc - 1;
  const Index count = band.tb - band.tc + 1;
  ComplexMatrix blood = svd.matrixU().middleCols(first, count) *
                        svd.singularValues().segment(first, count).cast<Complex>().asDiagonal() *
                        svd.matrixV().middleCols(first, count).adjoint();
  return CasoratiMatrix(std::move(blood), s.nz(), s.nx());
}

}  // namespace flowsep

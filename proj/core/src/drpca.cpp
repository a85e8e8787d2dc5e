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

#include "flowsep/drpca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowsep/fft.hpp"
#include "flowsep/parallel.hpp"
#include "flowsep/prox.hpp"

namespace flowsep {

SeparationResult drpca(const CasoratiMatrix& s, const Psf& psf, const AdmmParams& p,
                       const std::optional<WarmStart>& warm) {
  const Psf unit = psf.normalized_copy();
  return drpca(s, embed_psf(unit, s.nz(), s.nx()), p, warm);
}

SeparationResult drpca(const CasoratiMatrix& s, const FrequencyOperator& op, const AdmmParams& p,
                       const std::optional<WarmStart>& warm) {
  p.validate();
  const Index nz = s.nz();
  const Index nx = s.nx();
  if (op.nz() != nz || op.nx() != nx) throw std::invalid_argument("operator dims do not match the data");
  if (!(op.squared_norm() > 0.0)) throw std::invalid_argument("PSF transfer function is identically zero");
  const ComplexMatrix& data = s.matrix();
  if (!data.allFinite()) throw std::invalid_argument("DRPCA input has non-finite entries");

  const Index rows = data.rows();
  const Index cols = data.cols();
  ComplexMatrix z = ComplexMatrix::Zero(rows, cols);
  ComplexMatrix tissue = ComplexMatrix::Zero(rows, cols);
  ComplexMatrix nu = ComplexMatrix::Zero(rows, cols);
  ComplexMatrix eta = ComplexMatrix::Zero(rows, cols);
  if (warm) {
    const auto fits = [&](const ComplexMatrix& m) { return m.rows() == rows && m.cols() == cols; };
    if (!fits(warm->blood) || !fits(warm->tissue) || (warm->dual && !fits(*warm->dual))) {
      throw std::invalid_argument("warm start dims do not match the data");
    }
    z = warm->blood;
    tissue = warm->tissue;
    if (warm->dual) {
      // Stationarity in X ties the two multipliers: eta = H^H nu.
      nu = *warm->dual;
      eta = nu;
      detail::filter_frames(eta, op.transfer(), true);
    }
  }
  ComplexMatrix x = z;
  ComplexMatrix hx(rows, cols);

  const double mu = p.mu;
  const double beta = p.mu;
  const Eigen::Map<const Eigen::ArrayXcd> h(op.transfer().data(), op.transfer().size());
  const Eigen::ArrayXd denom = mu * h.abs2() + beta;

  std::vector<IterationRecord> trace;
  bool converged = false;
  int k = 0;
  while (k < p.max_iter) {
    ++k;
    // X-step, one frame at a time in the frequency domain; also yields H X.
    parallel_for(static_cast<std::size_t>(cols), [&](std::size_t ts) {
      const auto t = static_cast<Index>(ts);
      Eigen::VectorXcd r = data.col(t) - tissue.col(t) + nu.col(t) / mu;
      Eigen::VectorXcd w = z.col(t) - eta.col(t) / beta;
      fft::forward(r.data(), r.data(), nz, nx);
      fft::forward(w.data(), w.data(), nz, nx);
      Eigen::ArrayXcd xf = (mu * h.conjugate() * r.array() + beta * w.array()) / denom;
      Eigen::ArrayXcd hxf = h * xf;
      fft::inverse(xf.data(), x.col(t).data(), nz, nx);
      fft::inverse(hxf.data(), hx.col(t).data(), nz, nx);
    });

    const double prev_norm = z.norm();
    ComplexMatrix next_z = soft_threshold(x + eta / beta, p.lambda / beta);
    const double change = (next_z - z).norm() / std::max(prev_norm, kRelativeChangeFloor);
    z = std::move(next_z);

    SvtResult t = svt_detailed(data - hx + nu / mu, p.rho / mu);
    tissue = std::move(t.value);

    const ComplexMatrix residual = data - hx - tissue;
    nu += mu * residual;
    eta += beta * (x - z);

    IterationRecord rec;
    rec.primal_residual = residual.norm();
    rec.objective = p.lambda * l1_norm(z) + p.rho * t.singular_values.sum();
    rec.relative_change = change;
    // A non-finite multiplier surfaces in the next residual or objective.
    if (!std::isfinite(rec.primal_residual) || !std::isfinite(rec.objective)) {
      throw SolverError("DRPCA produced a non-finite iterate", k);
    }
    trace.push_back(rec);
    if (change < p.tol) {
      converged = true;
      break;
    }
  }

  return SeparationResult{CasoratiMatrix(std::move(z), nz, nx),
                          CasoratiMatrix(std::move(tissue), nz, nx),
                          std::nullopt,
                          std::move(trace),
                          k,
                          converged,
                          {},
                          std::move(nu)};
}

}  // namespace flowsep

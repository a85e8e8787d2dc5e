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

#include "flowsep/rpca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flowsep/prox.hpp"

namespace flowsep {

void AdmmParams::validate() const {
  if (!(lambda > 0.0) || !(rho > 0.0) || !(mu > 0.0)) {
    throw std::invalid_argument("ADMM weights lambda, rho, mu must be > 0");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("ADMM tolerance must be > 0");
  if (max_iter < 1) throw std::invalid_argument("ADMM max_iter must be >= 1");
}

ReferenceHyperparams reference_hyperparams(Index nz, Index nx, Index nt, double mu0) {
  if (nz < 1 || nx < 1 || nt < 1) throw std::invalid_argument("dims must be >= 1");
  if (!(mu0 > 0.0)) throw std::invalid_argument("mu0 must be > 0");
  const double big = static_cast<double>(std::max(checked_pixel_count(nz, nx), nt));
  const double lambda = 1.0 / std::sqrt(big);
  return {lambda, mu0 * lambda};
}

AdmmParams reference_admm_params(Index nz, Index nx, Index nt, double mu0) {
  const auto ref = reference_hyperparams(nz, nx, nt, mu0);
  AdmmParams p;
  p.lambda = ref.lambda;
  p.mu = ref.mu;
  return p;
}

AdmmParams scaled_admm_params(Index nz, Index nx, Index nt, double mu0, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("scale must be finite and > 0");
  AdmmParams p = reference_admm_params(nz, nx, nt, mu0);
  p.lambda *= scale;
  p.mu *= scale;
  return p;
}

SeparationResult rpca(const CasoratiMatrix& s, const AdmmParams& p) {
  p.validate();
  const ComplexMatrix& data = s.matrix();
  if (!data.allFinite()) throw std::invalid_argument("RPCA input has non-finite entries");

  ComplexMatrix blood = ComplexMatrix::Zero(data.rows(), data.cols());
  ComplexMatrix tissue = ComplexMatrix::Zero(data.rows(), data.cols());
  ComplexMatrix dual = ComplexMatrix::Zero(data.rows(), data.cols());
  const double inv_mu = 1.0 / p.mu;

  std::vector<IterationRecord> trace;
  bool converged = false;
  int k = 0;
  while (k < p.max_iter) {
    ++k;
    const double prev_norm = blood.norm();
    ComplexMatrix next_blood = soft_threshold(data - tissue + inv_mu * dual, p.lambda * inv_mu);
    const double change = (next_blood - blood).norm() / std::max(prev_norm, kRelativeChangeFloor);
    blood = std::move(next_blood);

    SvtResult t = svt_detailed(data - blood + inv_mu * dual, p.rho * inv_mu);
    tissue = std::move(t.value);

    const ComplexMatrix residual = data - blood - tissue;
    dual += p.mu * residual;

    IterationRecord rec;
    rec.primal_residual = residual.norm();
    rec.objective = p.lambda * l1_norm(blood) + p.rho * t.singular_values.sum();
    rec.relative_change = change;
    if (!std::isfinite(rec.primal_residual) || !std::isfinite(rec.objective) || !dual.allFinite()) {
      throw SolverError("RPCA produced a non-finite iterate", k);
    }
    trace.push_back(rec);
    if (change < p.tol) {
      converged = true;
      break;
    }
  }

  SeparationResult result{CasoratiMatrix(std::move(blood), s.nz(), s.nx()),
                          CasoratiMatrix(std::move(tissue), s.nz(), s.nx()),
                          std::nullopt,
                          std::move(trace),
                          k,
                          converged,
                          {},
                          std::move(dual)};
  return result;
}

}  // namespace flowsep

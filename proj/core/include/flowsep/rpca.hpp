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

#include "flowsep/casorati.hpp"
#include "flowsep/linops.hpp"

namespace flowsep {

/// ADMM controls shared by the RPCA-family solvers. lambda weighs the l1
/// term, rho the nuclear norm, mu is the augmented-Lagrangian penalty.
struct AdmmParams {
  double lambda = 0.0;
  double rho = 1.0;
  double mu = 0.0;
  double tol = 1e-6;
  int max_iter = 200;

  void validate() const;
};

struct ReferenceHyperparams {
  double lambda;
  double mu;
};

/// lambda_ref = 1 / sqrt(max(nz*nx, nt)), mu_ref = mu0 * lambda_ref.
/// mu0 is 10 for RPCA and 2 for the deconvolutive solvers.
ReferenceHyperparams reference_hyperparams(Index nz, Index nx, Index nt, double mu0);

/// AdmmParams with rho = 1 and the reference lambda/mu.
AdmmParams reference_admm_params(Index nz, Index nx, Index nt, double mu0);

inline constexpr double kRpcaMu0 = 10.0;
inline constexpr double kDeconvolutiveMu0 = 2.0;

/// Multipliers on lambda_ref (mu scaled alongside) chosen by a grid search
/// over {1, 2, 3, 4} on a calibration phantom whose seed is disjoint from
/// the evaluation seeds. The reference lambda over-thresholds blood that
/// sits near the noise floor; the tuned values trade a little sparsity for
/// a cleaner tissue estimate.
inline constexpr double kTunedRpcaScale = 3.0;
inline constexpr double kTunedDrpcaScale = 2.0;
inline constexpr double kTunedBdrpcaScale = 3.0;

/// reference_admm_params with lambda and mu multiplied by `scale`.
AdmmParams scaled_admm_params(Index nz, Index nx, Index nt, double mu0, double scale);

struct IterationRecord {
  /// ||S - B - T||_F, or ||S - H X - T||_F for the deconvolutive solvers.
  double primal_residual = 0.0;
  /// lambda ||B||_1 + rho ||T||_*.
  double objective = 0.0;
  /// ||B^{k+1} - B^k||_F / max(||B^k||_F, eps).
  double relative_change = 0.0;
};

struct OuterRecord {
  double blood_change = 0.0;
  int inner_iterations = 0;
  double primal_residual = 0.0;
};

struct SeparationResult {
  /// B for RPCA, the high-resolution X for the deconvolutive solvers.
  CasoratiMatrix blood;
  CasoratiMatrix tissue;
  std::optional<Psf> psf;
  std::vector<IterationRecord> trace;
  int iterations = 0;
  bool converged = false;
  /// One entry per alternation of the blind solver; empty otherwise.
  std::vector<OuterRecord> outer_trace;
  /// Final multiplier of the data constraint S = H X + T (H = I for RPCA).
  ComplexMatrix dual;
};

/// Starting point for an ADMM solve. Without a dual the multipliers start
/// at zero.
struct WarmStart {
  ComplexMatrix blood;
  ComplexMatrix tissue;
  std::optional<ComplexMatrix> dual;
};

/// Denominator floor of the relative-change stopping rule.
inline constexpr double kRelativeChangeFloor = 1e-12;

/// Low-rank plus sparse split S = B + T by ADMM:
///   B <- ST(S - T + nu/mu, lambda/mu)
///   T <- SVT(S - B + nu/mu, rho/mu)
///   nu <- nu + mu (S - B - T)
/// starting from B = T = nu = 0. Throws SolverError on a non-finite
/// iterate.
SeparationResult rpca(const CasoratiMatrix& s, const AdmmParams& p);

}  // namespace flowsep

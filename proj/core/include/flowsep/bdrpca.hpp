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

#include "flowsep/blind_deconv.hpp"
#include "flowsep/drpca.hpp"

namespace flowsep {

struct BdrpcaParams {
  /// Parameters of the RPCA run that seeds blood and tissue.
  AdmmParams init_admm;
  /// Parameters of every DRPCA update.
  AdmmParams admm;
  BdParams bd;
  /// F/H alternations inside each blind-deconvolution call.
  int bd_alternations = 2;
  /// Stop once ||X^{k+1} - X^k||_F <= outer_tol.
  double outer_tol = 1e-6;
  int outer_max = 10;
  /// Skip blind estimation and use this kernel; the call then reduces to
  /// drpca(S, *psf_override, admm).
  std::optional<Psf> psf_override;

  /// Reference settings for an nz x nx x nt sequence: RPCA seeding with
  /// mu0 = 10, DRPCA updates with mu0 = 2, rho = 1.
  static BdrpcaParams reference(Index nz, Index nx, Index nt);

  /// Seeding with the tuned RPCA scale, DRPCA updates with the tuned
  /// BD-RPCA scale, and three outer passes.
  static BdrpcaParams tuned(Index nz, Index nx, Index nt);
};

/// Joint blood/tissue separation and PSF estimation. After an RPCA seed,
/// each outer pass takes M = temporal mean of (S - T), estimates the PSF by
/// blind deconvolution of M (magnitude re-estimated every pass), and re-runs
/// DRPCA with that PSF warm-started from the previous X, T. The loop body
/// runs at least once. `trace` concatenates every inner iteration,
/// `outer_trace` has one record per pass.
SeparationResult bdrpca(const CasoratiMatrix& s, const BdrpcaParams& p);

/// Overload with the seeding RPCA on `admm`'s lambda and mu0 = 10.
SeparationResult bdrpca(const CasoratiMatrix& s, const AdmmParams& admm, const BdParams& bd, double outer_tol,
                        int outer_max);

}  // namespace flowsep

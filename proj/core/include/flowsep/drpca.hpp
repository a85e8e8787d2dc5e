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

#include "flowsep/rpca.hpp"

namespace flowsep {

/// Deconvolutive RPCA: S = H X + T with X sparse and T low rank, H a known
/// circular blur. Solved by ADMM on
///   min lambda ||Z||_1 + rho ||T||_*  s.t.  S = H X + T,  X = Z
/// with penalties mu (first constraint) and beta = mu (second). Per
/// iteration:
///   X <- per-frame frequency solve of
///        mu ||S - H X - T + nu/mu||^2 + beta ||X - Z + eta/beta||^2
///   Z <- ST(X + eta/beta, lambda/beta)
///   T <- SVT(S - H X + nu/mu, rho/mu)
///   nu <- nu + mu (S - H X - T),  eta <- eta + beta (X - Z)
/// The returned blood is Z. With H = identity the minimizer is the RPCA
/// one.
///
/// The PSF is scaled to unit energy before use. Throws
/// std::invalid_argument when the transfer function vanishes identically,
/// SolverError on a non-finite iterate.
SeparationResult drpca(const CasoratiMatrix& s, const Psf& psf, const AdmmParams& p,
                       const std::optional<WarmStart>& warm = std::nullopt);

/// Same solver on an already embedded operator (no normalization applied).
SeparationResult drpca(const CasoratiMatrix& s, const FrequencyOperator& op, const AdmmParams& p,
                       const std::optional<WarmStart>& warm = std::nullopt);

}  // namespace flowsep

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

#include "flowsep/types.hpp"

namespace flowsep {

/// Huber penalty weights: gamma scales the whole penalty, `a` is the knee
/// between the quadratic and linear branches.
struct HuberParams {
  double gamma = 0.002;
  double a = 0.05;

  /// Throws std::invalid_argument unless gamma > 0 and a > 0.
  void validate() const;
};

/// Complex shrinkage z * max(1 - tau/|z|, 0): the prox of tau * sum |z_ij|.
ComplexMatrix soft_threshold(const ComplexMatrix& z, double tau);

struct SvtResult {
  ComplexMatrix value;
  /// Singular values of `value`, i.e. max(sigma - tau, 0) for the kept
  /// components, descending.
  Eigen::VectorXd singular_values;
};

/// Singular value thresholding U * max(S - tau, 0) * V^H, the prox of
/// tau * nuclear norm.
ComplexMatrix svt(const ComplexMatrix& z, double tau);
SvtResult svt_detailed(const ComplexMatrix& z, double tau);

/// gamma * sum over entries of |f|^2 (|f| <= a) or 2a|f| - a^2.
double huber_value(const ComplexMatrix& f, const HuberParams& p);

/// Gradient with respect to the real and imaginary parts packed as
/// d/dRe + i d/dIm: 2 gamma f on the quadratic branch, 2 gamma a f/|f|
/// on the linear one. Lipschitz constant 2 gamma.
ComplexMatrix huber_gradient(const ComplexMatrix& f, const HuberParams& p);

double l1_norm(const ComplexMatrix& z);
double nuclear_norm(const ComplexMatrix& z);

}  // namespace flowsep

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

#include "flowsep/prox.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace flowsep {

namespace {

void require_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw std::invalid_argument("threshold must be finite and >= 0");
}

// Weights below this fraction of the largest singular value are not resolved
// by the Gram-matrix route (sigma^2 loses half the digits).
constexpr double kGramResolution = 1e-6;

SvtResult svt_dense(const ComplexMatrix& z, double tau) {
  Eigen::BDCSVD<ComplexMatrix> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw std::runtime_error("SVD failed");
  const Eigen::VectorXd& s = svd.singularValues();
  Index kept = 0;
  while (kept < s.size() && s(kept) > tau) ++kept;
  Eigen::VectorXd shrunk = (s.head(kept).array() - tau).matrix();
  ComplexMatrix value = svd.matrixU().leftCols(kept) * shrunk.cast<Complex>().asDiagonal() *
                        svd.matrixV().leftCols(kept).adjoint();
  return {std::move(value), std::move(shrunk)};
}

// Tall-matrix route: eigen-decompose Z^H Z (n x n) and apply the
// shrinkage as a right factor, Z * V diag(1 - tau/sigma)_+ V^H. Costs two
// m*n^2 products instead of a full bidiagonalization.
std::optional<SvtResult> svt_gram(const ComplexMatrix& z, double tau) {
  const Index n = z.cols();
  ComplexMatrix gram = ComplexMatrix::Zero(n, n);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(z.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  // Eigenvalues come ascending.
  const double sigma_max = std::sqrt(std::max(eig.eigenvalues()(n - 1), 0.0));
  if (tau < kGramResolution * sigma_max) return std::nullopt;
  Index kept = 0;
  while (kept < n && std::sqrt(std::max(eig.eigenvalues()(n - 1 - kept), 0.0)) > tau) ++kept;
  Eigen::VectorXd shrunk(kept);
  Eigen::VectorXd weight(kept);
  for (Index k = 0; k < kept; ++k) {
    const double sigma = std::sqrt(eig.eigenvalues()(n - 1 - k));
    shrunk(k) = sigma - tau;
    weight(k) = (sigma - tau) / sigma;
  }
  // Only the surviving directions matter, so the products scale with the
  // retained rank rather than with n.
  const ComplexMatrix v = eig.eigenvectors().rightCols(kept).rowwise().reverse();
  const ComplexMatrix zv = z * v;
  ComplexMatrix value = (zv * weight.cast<Complex>().asDiagonal()) * v.adjoint();
  return SvtResult{std::move(value), std::move(shrunk)};
}

}  // namespace

void HuberParams::validate() const {
  if (!(gamma > 0.0) || !(a > 0.0)) throw std::invalid_argument("Huber parameters must satisfy gamma > 0, a > 0");
}

ComplexMatrix soft_threshold(const ComplexMatrix& z, double tau) {
  require_tau(tau);
  if (tau == 0.0) return z;
  // sqrt of the squared modulus instead of std::abs: hypot is several times
  // slower and its overflow guard only matters beyond 1e154, where the
  // factor below correctly tends to 1 anyway.
  const double tau2 = tau * tau;
  return z.unaryExpr([tau, tau2](const Complex& v) {
    const double mag2 = std::norm(v);
    return mag2 > tau2 ? v * (1.0 - tau / std::sqrt(mag2)) : Complex(0.0, 0.0);
  });
}

SvtResult svt_detailed(const ComplexMatrix& z, double tau) {
  require_tau(tau);
  if (!z.allFinite()) throw std::invalid_argument("svt input has non-finite entries");
  if (z.size() == 0) return {z, Eigen::VectorXd()};
  if (z.rows() < z.cols()) {
    SvtResult r = svt_detailed(z.adjoint(), tau);
    r.value.adjointInPlace();
    return r;
  }
  if (tau > 0.0 && z.rows() >= 4 * z.cols()) {
    if (auto r = svt_gram(z, tau)) return *std::move(r);
  }
  return svt_dense(z, tau);
}

ComplexMatrix svt(const ComplexMatrix& z, double tau) { return svt_detailed(z, tau).value; }

double huber_value(const ComplexMatrix& f, const HuberParams& p) {
  p.validate();
  double total = 0.0;
  for (Index i = 0; i < f.size(); ++i) {
    const double mag = std::abs(f.data()[i]);
    total += mag <= p.a ? mag * mag : 2.0 * p.a * mag - p.a * p.a;
  }
  return p.gamma * total;
}

ComplexMatrix huber_gradient(const ComplexMatrix& f, const HuberParams& p) {
  p.validate();
  return f.unaryExpr([&p](const Complex& v) {
    const double mag = std::abs(v);
    return mag <= p.a ? 2.0 * p.gamma * v : 2.0 * p.gamma * p.a * v / mag;
  });
}

double l1_norm(const ComplexMatrix& z) { return z.cwiseAbs2().cwiseSqrt().sum(); }

double nuclear_norm(const ComplexMatrix& z) {
  if (z.size() == 0) return 0.0;
  Eigen::BDCSVD<ComplexMatrix> svd(z);
  return svd.singularValues().sum();
}

}  // namespace flowsep

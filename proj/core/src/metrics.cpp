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

#include "flowsep/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flowsep {

namespace {

void require_same_dims(const PowerDopplerImage& a, const PowerDopplerImage& b) {
  if (a.db.rows() != b.db.rows() || a.db.cols() != b.db.cols()) {
    throw std::invalid_argument("power Doppler images differ in size");
  }
}

void require_inside(const PowerDopplerImage& img, const PatchRect& r) {
  if (r.height < 1 || r.width < 1 || r.top < 0 || r.left < 0 || r.top + r.height > img.db.rows() ||
      r.left + r.width > img.db.cols()) {
    throw std::invalid_argument("patch does not fit inside the image");
  }
}

double patch_mean_power(const RealImage& db, const PatchRect& r) {
  double sum = 0.0;
  for (Index x = r.left; x < r.left + r.width; ++x) {
    for (Index z = r.top; z < r.top + r.height; ++z) sum += std::pow(10.0, db(z, x) / 10.0);
  }
  return sum / static_cast<double>(r.height * r.width);
}

}  // namespace

PowerDopplerImage power_doppler(const CasoratiMatrix& b, double dynamic_range) {
  const Eigen::VectorXd power = b.matrix().cwiseAbs2().rowwise().mean();
  RealImage db(b.nz(), b.nx());
  for (Index x = 0; x < b.nx(); ++x) {
    for (Index z = 0; z < b.nz(); ++z) {
      const double p = power(flat_index(z, x, b.nz()));
      db(z, x) = p > 0.0 ? std::max(10.0 * std::log10(p), kPowerFloorDb) : kPowerFloorDb;
    }
  }
  return {std::move(db), dynamic_range};
}

PowerDopplerImage display_image(const PowerDopplerImage& img) {
  const double peak = img.db.maxCoeff();
  RealImage db = (img.db.array() - peak).max(-img.dynamic_range);
  return {std::move(db), img.dynamic_range};
}

double nrmse(const PowerDopplerImage& ref, const PowerDopplerImage& est) {
  require_same_dims(ref, est);
  const double denom = ref.db.norm();
  if (!(denom > 0.0)) throw std::invalid_argument("NRMSE reference image is identically zero");
  return (ref.db - est.db).norm() / denom;
}

double psnr(const PowerDopplerImage& ref, const PowerDopplerImage& est, double d_max) {
  require_same_dims(ref, est);
  const double mse = (ref.db - est.db).squaredNorm() / static_cast<double>(ref.db.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(d_max * d_max / mse);
}

QualityScores compare_display(const PowerDopplerImage& truth, const PowerDopplerImage& estimate) {
  const PowerDopplerImage t = display_image(truth);
  const PowerDopplerImage e = display_image(estimate);
  return {nrmse(t, e), psnr(t, e, truth.dynamic_range)};
}

double contrast_ratio(const PowerDopplerImage& img, const PatchRect& background, const PatchRect& target) {
  require_inside(img, background);
  require_inside(img, target);
  const PowerDopplerImage shown = display_image(img);
  const double mu1 = patch_mean_power(shown.db, background);
  const double mu2 = patch_mean_power(shown.db, target);
  if (!(mu1 > 0.0)) throw std::invalid_argument("background patch has zero mean");
  return 20.0 * std::log10(mu2 / mu1);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

CrSweep cr_sweep(const PowerDopplerImage& img, const PatchRect& background, Index patch_h, Index patch_w) {
  require_inside(img, background);
  if (patch_h < 1 || patch_w < 1) throw std::invalid_argument("patch size must be positive");
  CrSweep out;
  out.patch_rows = img.db.rows() / patch_h;
  out.patch_cols = img.db.cols() / patch_w;
  if (out.patch_rows == 0 || out.patch_cols == 0) throw std::invalid_argument("image smaller than one patch");
  const PowerDopplerImage shown = display_image(img);
  const double mu1 = patch_mean_power(shown.db, background);
  if (!(mu1 > 0.0)) throw std::invalid_argument("background patch has zero mean");
  for (Index pr = 0; pr < out.patch_rows; ++pr) {
    for (Index pc = 0; pc < out.patch_cols; ++pc) {
      const PatchRect r{pr * patch_h, pc * patch_w, patch_h, patch_w};
      out.values.push_back(20.0 * std::log10(patch_mean_power(shown.db, r) / mu1));
    }
  }
  out.median = quantile(out.values, 0.5);
  out.q1 = quantile(out.values, 0.25);
  out.q3 = quantile(out.values, 0.75);
  return out;
}

double kernel_correlation(const Psf& a, const Psf& b) {
  const ComplexMatrix& ka = a.kernel();
  const ComplexMatrix& kb = b.kernel();
  Index ar = 0, ac = 0, br = 0, bc = 0;
  ka.cwiseAbs().maxCoeff(&ar, &ac);
  kb.cwiseAbs().maxCoeff(&br, &bc);
  const Index dr = br - ar;
  const Index dc = bc - ac;
  Complex dot(0.0, 0.0);
  for (Index j = 0; j < ka.cols(); ++j) {
    const Index jb = j + dc;
    if (jb < 0 || jb >= kb.cols()) continue;
    for (Index i = 0; i < ka.rows(); ++i) {
      const Index ib = i + dr;
      if (ib < 0 || ib >= kb.rows()) continue;
      dot += ka(i, j) * std::conj(kb(ib, jb));
    }
  }
  const double denom = ka.norm() * kb.norm();
  return denom > 0.0 ? std::abs(dot) / denom : 0.0;
}

}  // namespace flowsep

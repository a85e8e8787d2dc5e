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

#include "flowsep/blind_deconv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "flowsep/fft.hpp"

namespace flowsep {

namespace {

double circular_distance(Index i, Index n) { return static_cast<double>(std::min(i, n - i)); }

// Signed offset of index i on a circular axis of length n, in [-n/2, n/2).
Index signed_offset(Index i, Index n) { return i < (n + 1) / 2 ? i : i - n; }

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

}  // namespace

MagnitudeSpectrum::MagnitudeSpectrum(RealImage mag) : mag_(std::move(mag)) {
  if (mag_.size() == 0) throw std::invalid_argument("empty magnitude spectrum");
  if (!mag_.allFinite() || (mag_.array() < 0.0).any()) {
    throw std::invalid_argument("magnitude spectrum must be finite and non-negative");
  }
}

void BdParams::validate(Index nz, Index nx) const {
  huber.validate();
  if (psf_rows < 1 || psf_cols < 1 || psf_rows > nz || psf_cols > nx) {
    throw std::invalid_argument("PSF support " + std::to_string(psf_rows) + "x" + std::to_string(psf_cols) +
                                " must be positive and fit in " + std::to_string(nz) + "x" + std::to_string(nx));
  }
  if (cepstral_cutoff && (!(*cepstral_cutoff > 0.0) || *cepstral_cutoff > static_cast<double>(std::min(nz, nx)))) {
    throw std::invalid_argument("cepstral cutoff must be in (0, min(nz, nx)]");
  }
  if (!(inner_tol > 0.0) || inner_max_iter < 1) throw std::invalid_argument("inner solver controls must be positive");
}

double BdParams::effective_cutoff(Index nz, Index nx) const {
  return cepstral_cutoff.value_or(0.05 * static_cast<double>(std::min(nz, nx)));
}

MagnitudeSpectrum estimate_psf_magnitude(const Image& g, const BdParams& p) {
  const Index nz = g.rows();
  const Index nx = g.cols();
  p.validate(nz, nx);
  if (!g.allFinite()) throw std::invalid_argument("image has non-finite entries");
  const RealImage spectrum = fft::forward(g).cwiseAbs();
  const double peak = spectrum.maxCoeff();
  if (!(peak > 0.0)) throw std::invalid_argument("cannot estimate a PSF magnitude from an all-zero image");

  // Isolated spectral zeros would send the log to -inf.
  const double floor = peak * 1e-12;
  Image log_mag = spectrum.unaryExpr([floor](double v) { return std::log(std::max(v, floor)); }).cast<Complex>();
  Image cepstrum = fft::inverse(log_mag);

  const double r = p.effective_cutoff(nz, nx);
  for (Index x = 0; x < nx; ++x) {
    const double qx = circular_distance(x, nx);
    for (Index z = 0; z < nz; ++z) {
      const double qz = circular_distance(z, nz);
      cepstrum(z, x) *= std::exp(-(qz * qz + qx * qx) / (2.0 * r * r));
    }
  }
  const RealImage smooth = fft::forward(cepstrum).real();
  RealImage mag = smooth.array().exp();
  mag /= mag.maxCoeff();
  return MagnitudeSpectrum(std::move(mag));
}

double deconvolution_objective(const Image& g, const FrequencyOperator& op, const Image& f, const HuberParams& huber) {
  return 0.5 * (g - conv2_circ(f, op)).squaredNorm() + huber_value(f, huber);
}

Image deconvolution_gradient(const Image& g, const FrequencyOperator& op, const Image& f, const HuberParams& huber) {
  return conv2_circ_adjoint(conv2_circ(f, op) - g, op) + huber_gradient(f, huber);
}

TrfEstimate estimate_trf_detailed(const Image& g, const FrequencyOperator& op, const BdParams& p,
                                  const std::optional<Image>& init) {
  p.validate(g.rows(), g.cols());
  if (op.nz() != g.rows() || op.nx() != g.cols()) throw std::invalid_argument("operator dims do not match image");
  if (init && (init->rows() != g.rows() || init->cols() != g.cols())) {
    throw std::invalid_argument("initial reflectivity dims do not match image");
  }
  const HuberParams& hp = p.huber;
  auto objective = [&](const Image& f) { return deconvolution_objective(g, op, f, hp); };

  Image x = init.value_or(g);
  double fx = objective(x);
  if (!std::isfinite(fx)) throw SolverError("reflectivity objective is not finite", 0);

  TrfEstimate out;
  out.objective.push_back(fx);

  // Monotone FISTA: the extrapolated candidate is only accepted when it does
  // not increase the objective.
  double step = 1.0 / (op.squared_norm() + 2.0 * hp.gamma);
  double t = 1.0;
  Image y = x;
  Image prev_x = x;
  int it = 0;
  while (it < p.inner_max_iter) {
    ++it;
    const Image grad = deconvolution_gradient(g, op, y, hp);
    const double fy = objective(y);
    const double grad_sq = grad.squaredNorm();
    Image z = y - step * grad;
    double fz = objective(z);
    int halvings = 0;
    while (fz > fy - 0.5 * step * grad_sq && halvings < 50) {
      step *= 0.5;
      z = y - step * grad;
      fz = objective(z);
      ++halvings;
    }
    if (!std::isfinite(fz)) throw SolverError("reflectivity update is not finite", it);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double f_old = fx;
    prev_x = x;
    const bool accepted = fz <= fx;
    if (accepted) {
      x = z;
      fx = fz;
    }
    y = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - prev_x);
    t = t_next;
    out.objective.push_back(fx);
    if (accepted && (f_old - fx) <= p.inner_tol * std::max(std::abs(f_old), 1e-300)) break;
  }
  out.reflectivity = std::move(x);
  out.iterations = it;
  return out;
}

Image estimate_trf(const Image& g, const Psf& psf, const BdParams& p) {
  return estimate_trf_detailed(g, embed_psf(psf, g.rows(), g.cols()), p).reflectivity;
}

PsfFit fit_constrained_psf(const Image& g, const Image& f, const MagnitudeSpectrum& mag, const BdParams& p) {
  const Index nz = g.rows();
  const Index nx = g.cols();
  if (f.rows() != nz || f.cols() != nx || mag.nz() != nz || mag.nx() != nx) {
    throw std::invalid_argument("image, reflectivity and magnitude dims must match");
  }
  p.validate(nz, nx);
  const Image gf = fft::forward(g).array() * fft::forward(f).array().conjugate();
  Image transfer(nz, nx);
  for (Index i = 0; i < transfer.size(); ++i) {
    transfer.data()[i] = std::polar(mag.values().data()[i], std::arg(gf.data()[i]));
  }
  const Image kernel = fft::inverse(transfer);

  // Energy centroid with offsets measured around the origin.
  double energy = 0.0;
  double cz = 0.0;
  double cx = 0.0;
  for (Index x = 0; x < nx; ++x) {
    for (Index z = 0; z < nz; ++z) {
      const double e = std::norm(kernel(z, x));
      energy += e;
      cz += e * static_cast<double>(signed_offset(z, nz));
      cx += e * static_cast<double>(signed_offset(x, nx));
    }
  }
  if (!(energy > 0.0)) throw std::invalid_argument("magnitude spectrum is identically zero");
  const auto oz = static_cast<Index>(std::lround(cz / energy));
  const auto ox = static_cast<Index>(std::lround(cx / energy));

  const Index kh = p.psf_rows;
  const Index kw = p.psf_cols;
  const Index top = oz - kh / 2;
  const Index left = ox - kw / 2;
  ComplexMatrix crop(kh, kw);
  for (Index j = 0; j < kw; ++j) {
    for (Index i = 0; i < kh; ++i) crop(i, j) = kernel(wrap(top + i, nz), wrap(left + j, nx));
  }
  // The origin keeps its place so the blur does not translate the image.
  const Index center_row = std::clamp<Index>(-top, 0, kh - 1);
  const Index center_col = std::clamp<Index>(-left, 0, kw - 1);
  Psf psf = Psf(std::move(crop), center_row, center_col).normalized_copy();
  return PsfFit{std::move(psf), std::move(transfer)};
}

BlindDeconvolution blind_deconvolve(const Image& g, const BdParams& p, int n_outer, const std::optional<Psf>& init) {
  if (n_outer < 1) throw std::invalid_argument("n_outer must be >= 1");
  p.validate(g.rows(), g.cols());
  MagnitudeSpectrum mag = estimate_psf_magnitude(g, p);

  Image transfer = init ? embed_psf(*init, g.rows(), g.cols()).transfer() : Image(mag.values().cast<Complex>());
  Image f = g;
  std::vector<double> objective;
  objective.push_back(deconvolution_objective(g, FrequencyOperator(transfer), f, p.huber));

  std::optional<PsfFit> fit;
  for (int k = 0; k < n_outer; ++k) {
    const FrequencyOperator op(transfer);
    TrfEstimate trf = estimate_trf_detailed(g, op, p, f);
    f = std::move(trf.reflectivity);
    objective.push_back(trf.objective.back());

    fit = fit_constrained_psf(g, f, mag, p);
    transfer = fit->transfer;
    objective.push_back(deconvolution_objective(g, FrequencyOperator(transfer), f, p.huber));
  }
  return BlindDeconvolution{std::move(fit->psf), std::move(f), std::move(transfer), std::move(mag),
                            std::move(objective)};
}

}  // namespace flowsep

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

#include "flowsep/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace flowsep {

namespace {

// Independent, reproducible stream per (seed, purpose, index).
std::mt19937_64 make_rng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

enum Stream : std::uint32_t { kTissue = 1, kBlood1 = 2, kBlood2 = 3, kShift = 4, kNoise = 5 };

Complex complex_normal(std::mt19937_64& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

bool strictly_inside(const Rect& inner, const Rect& outer) {
  return inner.top > outer.top && inner.bottom() < outer.bottom() && inner.left >= outer.left &&
         inner.right() <= outer.right() && (inner.left > outer.left || inner.right() < outer.right());
}

}  // namespace

Psf synth_psf(double fc_fraction, double sigma_z, double sigma_x, Index kh, Index kw) {
  if (!(sigma_z > 0.0) || !(sigma_x > 0.0)) throw std::invalid_argument("PSF sigmas must be > 0");
  if (kh < 1 || kw < 1 || kh % 2 == 0 || kw % 2 == 0) throw std::invalid_argument("PSF support must be odd");
  ComplexMatrix k(kh, kw);
  for (Index j = 0; j < kw; ++j) {
    const double x = static_cast<double>(j - kw / 2);
    for (Index i = 0; i < kh; ++i) {
      const double z = static_cast<double>(i - kh / 2);
      k(i, j) = std::cos(2.0 * std::numbers::pi * fc_fraction * z) *
                std::exp(-z * z / (2.0 * sigma_z * sigma_z) - x * x / (2.0 * sigma_x * sigma_x));
    }
  }
  return Psf(std::move(k)).normalized_copy();
}

PhantomConfig PhantomConfig::full_scale() { return PhantomConfig{}; }

PhantomConfig PhantomConfig::desk_scale() {
  PhantomConfig c;
  c.nz = 128;
  c.nx = 64;
  c.nt = 100;
  c.vessel = {44, 0, 44, 64};
  c.rect1 = {52, 6, 12, 28};
  c.rect2 = {70, 38, 10, 14};
  return c;
}

void PhantomConfig::validate() const {
  if (nz < 1 || nx < 1 || nt < 1) throw std::invalid_argument("phantom dims must be >= 1");
  if (vessel.height < 1 || vessel.width < 1 || vessel.top < 0 || vessel.left < 0 || vessel.bottom() > nz ||
      vessel.right() > nx) {
    throw std::invalid_argument("vessel does not fit in the frame");
  }
  for (const Rect* r : {&rect1, &rect2}) {
    if (r->height < 1 || r->width < 1 || !strictly_inside(*r, vessel)) {
      throw std::invalid_argument("blood rectangle must lie strictly inside the vessel");
    }
  }
  if (max_shift < 0) throw std::invalid_argument("max_shift must be >= 0");
  if (blood_amplitude && !(*blood_amplitude >= 0.0)) throw std::invalid_argument("blood amplitude must be >= 0");
  if (!(tissue_density >= 0.0 && tissue_density <= 1.0)) throw std::invalid_argument("tissue density in [0, 1]");
  if (psf.rows > nz || psf.cols > nx) throw std::invalid_argument("PSF larger than the frame");
}

PhantomConfig rescaled(const PhantomConfig& base, Index nz, Index nx, Index nt) {
  if (nz < 1 || nx < 1 || nt < 1) throw std::invalid_argument("phantom dims must be >= 1");
  const double sz = static_cast<double>(nz) / static_cast<double>(base.nz);
  const double sx = static_cast<double>(nx) / static_cast<double>(base.nx);
  auto scale = [](Index v, double s) { return static_cast<Index>(std::lround(static_cast<double>(v) * s)); };

  PhantomConfig c = base;
  c.nz = nz;
  c.nx = nx;
  c.nt = nt;
  Rect& v = c.vessel;
  v.height = std::clamp<Index>(scale(base.vessel.height, sz), std::min<Index>(3, nz), nz);
  v.top = std::clamp<Index>(scale(base.vessel.top, sz), 0, nz - v.height);
  v.width = std::clamp<Index>(scale(base.vessel.width, sx), 1, nx);
  v.left = std::clamp<Index>(scale(base.vessel.left, sx), 0, nx - v.width);

  auto fit = [&](const Rect& r) {
    Rect out;
    out.top = std::clamp<Index>(scale(r.top, sz), v.top + 1, std::max<Index>(v.top + 1, v.bottom() - 2));
    out.height = std::clamp<Index>(scale(r.height, sz), 1, std::max<Index>(1, v.bottom() - 1 - out.top));
    out.left = std::clamp<Index>(scale(r.left, sx), v.left, v.right() - 1);
    out.width = std::clamp<Index>(scale(r.width, sx), 1, v.right() - out.left);
    // Touching both vessel walls is not allowed.
    if (out.left == v.left && out.right() == v.right() && out.width > 1) --out.width;
    return out;
  };
  c.rect1 = fit(base.rect1);
  c.rect2 = fit(base.rect2);
  return c;
}

PhantomTruth simulate(const PhantomConfig& config) {
  config.validate();
  const Index nz = config.nz;
  const Index nx = config.nx;
  const Index nt = config.nt;
  const Psf psf = config.psf.make();
  const FrequencyOperator op = embed_psf(psf, nz, nx);

  // Static tissue scatterers outside the lumen.
  Image scatterers = Image::Zero(nz, nx);
  {
    auto rng = make_rng(config.seed, kTissue);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Rect& v = config.vessel;
    for (Index x = 0; x < nx; ++x) {
      for (Index z = 0; z < nz; ++z) {
        const bool in_lumen = z >= v.top && z < v.bottom() && x >= v.left && x < v.right();
        const bool occupied = u(rng) < config.tissue_density;
        const Complex a = complex_normal(rng, 1.0);
        if (!in_lumen && occupied) scatterers(z, x) = a;
      }
    }
  }
  const Eigen::VectorXcd tissue_frame = flatten(conv2_circ(scatterers, op));

  // Blood base content per rectangle, unit variance before scaling.
  const std::array<Rect, 2> rects{config.rect1, config.rect2};
  std::array<Image, 2> base;
  double blood_energy = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    auto rng = make_rng(config.seed, r == 0 ? kBlood1 : kBlood2);
    base[r] = Image(rects[r].height, rects[r].width);
    for (Index i = 0; i < base[r].size(); ++i) base[r].data()[i] = complex_normal(rng, 1.0);
    blood_energy += base[r].squaredNorm();
  }
  double amplitude = 0.0;
  if (config.blood_amplitude) {
    amplitude = *config.blood_amplitude;
  } else if (blood_energy > 0.0) {
    const double ratio = std::pow(10.0, config.blood_to_tissue_db / 10.0);
    amplitude = std::sqrt(ratio * scatterers.squaredNorm() / blood_energy);
  }

  std::array<std::vector<std::array<Index, 2>>, 2> shifts;
  ComplexMatrix blood = ComplexMatrix::Zero(nz * nx, nt);
  for (Index t = 0; t < nt; ++t) {
    auto rng = make_rng(config.seed, kShift, static_cast<std::uint64_t>(t));
    std::uniform_int_distribution<Index> d(-config.max_shift, config.max_shift);
    for (std::size_t r = 0; r < 2; ++r) {
      const Index dz = d(rng);
      const Index dx = d(rng);
      shifts[r].push_back({dz, dx});
      const Rect& rc = rects[r];
      for (Index j = 0; j < rc.width; ++j) {
        const Index sj = ((j - dx) % rc.width + rc.width) % rc.width;
        for (Index i = 0; i < rc.height; ++i) {
          const Index si = ((i - dz) % rc.height + rc.height) % rc.height;
          blood(flat_index(rc.top + i, rc.left + j, nz), t) = amplitude * base[r](si, sj);
        }
      }
    }
  }

  ComplexMatrix tissue = tissue_frame.replicate(1, nt);
  ComplexMatrix blurred = blood;
  detail::filter_frames(blurred, op.transfer(), false);
  CasoratiMatrix x_true(std::move(blood), nz, nx);
  PowerDopplerImage pd = power_doppler(x_true);

  PhantomTruth truth{CasoratiMatrix(blurred + tissue, nz, nx),
                     std::move(x_true),
                     CasoratiMatrix(std::move(tissue), nz, nx),
                     psf,
                     std::move(pd),
                     amplitude,
                     std::move(shifts),
                     std::nullopt};
  return truth;
}

double empirical_bsnr_db(const ComplexMatrix& blurred_blood, const ComplexMatrix& noise) {
  const Complex mean = blurred_blood.mean();
  const double signal = (blurred_blood.array() - mean).matrix().squaredNorm();
  return 10.0 * std::log10(signal / noise.squaredNorm());
}

PhantomTruth add_noise_bsnr(const PhantomTruth& truth, double bsnr_db, std::uint64_t seed) {
  if (std::isnan(bsnr_db) || bsnr_db == -std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("BSNR must be finite or +infinity");
  }
  if (std::isinf(bsnr_db)) return truth;

  const CasoratiMatrix& x = truth.x_true;
  ComplexMatrix hx = x.matrix();
  detail::filter_frames(hx, embed_psf(truth.psf_true, x.nz(), x.nx()).transfer(), false);
  const Complex mean = hx.mean();
  const double signal = (hx.array() - mean).matrix().squaredNorm();
  const double n = static_cast<double>(hx.size());
  const double variance = signal / (n * std::pow(10.0, bsnr_db / 10.0));

  ComplexMatrix noise(hx.rows(), hx.cols());
  auto rng = make_rng(seed, kNoise);
  for (Index i = 0; i < noise.size(); ++i) noise.data()[i] = complex_normal(rng, variance);

  PhantomTruth out = truth;
  out.s_observed = CasoratiMatrix(truth.s_observed.matrix() + noise, x.nz(), x.nx());
  out.noise = NoiseReport{bsnr_db, std::sqrt(variance), empirical_bsnr_db(hx, noise)};
  return out;
}

}  // namespace flowsep

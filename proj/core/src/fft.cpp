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

#include "flowsep/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <new>
#include <stdexcept>
#include <tuple>

namespace flowsep::fft {

namespace {

// fftw planning is not thread-safe; execution of an existing plan through
// the new-array interface is, given buffers of the planning alignment.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(Index nz, Index nx, int sign) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(nz, nx, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // In-place on an fftw-aligned buffer so the SIMD codelets are usable.
    // FFTW_ESTIMATE keeps the plan (and therefore rounding) identical from
    // run to run.
    fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(nz * nx));
    // fftw is row-major with the last dimension fastest; our z is fastest.
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(nx), static_cast<int>(nz), a, a, sign, FFTW_ESTIMATE);
    fftw_free(a);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<Index, Index, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

// Per-thread aligned work area. Every transform is staged through it, so
// the same plan runs whatever the alignment of the caller's memory.
struct Scratch {
  fftw_complex* data = nullptr;
  std::size_t size = 0;
  ~Scratch() { fftw_free(data); }
  fftw_complex* reserve(std::size_t n) {
    if (n > size) {
      fftw_free(data);
      data = fftw_alloc_complex(n);
      if (data == nullptr) throw std::bad_alloc();
      size = n;
    }
    return data;
  }
};

void execute(const Complex* in, Complex* out, Index nz, Index nx, int sign, double scale) {
  if (nz < 1 || nx < 1) throw std::invalid_argument("fft dims must be >= 1");
  fftw_plan plan = cache().get(nz, nx, sign);
  thread_local Scratch scratch;
  const auto n = static_cast<std::size_t>(nz * nx);
  fftw_complex* buf = scratch.reserve(n);
  std::copy(in, in + n, reinterpret_cast<Complex*>(buf));
  fftw_execute_dft(plan, buf, buf);
  const Complex* res = reinterpret_cast<const Complex*>(buf);
  if (scale == 1.0) {
    std::copy(res, res + n, out);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = res[i] * scale;
  }
}

}  // namespace

void forward(const Complex* in, Complex* out, Index nz, Index nx) { execute(in, out, nz, nx, FFTW_FORWARD, 1.0); }

void inverse(const Complex* in, Complex* out, Index nz, Index nx) {
  execute(in, out, nz, nx, FFTW_BACKWARD, 1.0 / static_cast<double>(nz * nx));
}

Image forward(const Image& image) {
  Image out(image.rows(), image.cols());
  forward(image.data(), out.data(), image.rows(), image.cols());
  return out;
}

Image inverse(const Image& spectrum) {
  Image out(spectrum.rows(), spectrum.cols());
  inverse(spectrum.data(), out.data(), spectrum.rows(), spectrum.cols());
  return out;
}

}  // namespace flowsep::fft

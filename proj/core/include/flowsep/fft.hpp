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

/// 2D DFT over nz x nx frames stored z-fastest (Eigen column-major).
/// Convention: unnormalized forward transform, 1/(nz*nx) on the inverse.
namespace flowsep::fft {

/// In-place capable: `in` and `out` may alias.
void forward(const Complex* in, Complex* out, Index nz, Index nx);
void inverse(const Complex* in, Complex* out, Index nz, Index nx);

Image forward(const Image& image);
Image inverse(const Image& spectrum);

}  // namespace flowsep::fft

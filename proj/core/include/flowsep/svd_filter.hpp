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

#include "flowsep/casorati.hpp"

namespace flowsep {

/// Inclusive, 1-based band of singular components kept as blood.
struct RankBand {
  Index tc = 2;
  Index tb = 15;
};

/// Sum of u_k sigma_k v_k^H for k in [tc, tb], singular values sorted
/// descending. Throws std::invalid_argument unless
/// 1 <= tc <= tb <= min(rows, cols).
CasoratiMatrix svd_filter(const CasoratiMatrix& s, const RankBand& band);

}  // namespace flowsep

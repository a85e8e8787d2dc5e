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

#include "flowsep/bdrpca.hpp"

#include <stdexcept>
#include <string>

#include "flowsep/casorati.hpp"
#include "flowsep/rpca.hpp"

namespace flowsep {

BdrpcaParams BdrpcaParams::reference(Index nz, Index nx, Index nt) {
  BdrpcaParams p;
  p.init_admm = reference_admm_params(nz, nx, nt, kRpcaMu0);
  p.admm = reference_admm_params(nz, nx, nt, kDeconvolutiveMu0);
  return p;
}

BdrpcaParams BdrpcaParams::tuned(Index nz, Index nx, Index nt) {
  BdrpcaParams p;
  p.init_admm = scaled_admm_params(nz, nx, nt, kRpcaMu0, kTunedRpcaScale);
  p.admm = scaled_admm_params(nz, nx, nt, kDeconvolutiveMu0, kTunedBdrpcaScale);
  p.outer_max = 3;
  return p;
}

SeparationResult bdrpca(const CasoratiMatrix& s, const BdrpcaParams& p) {
  p.init_admm.validate();
  p.admm.validate();
  if (p.psf_override) {
    SeparationResult r = drpca(s, *p.psf_override, p.admm);
    r.psf = p.psf_override->normalized_copy();
    return r;
  }
  p.bd.validate(s.nz(), s.nx());
  if (p.outer_max < 1) throw std::invalid_argument("outer_max must be >= 1");
  if (!(p.outer_tol >= 0.0)) throw std::invalid_argument("outer_tol must be >= 0");
  if (p.bd_alternations < 1) throw std::invalid_argument("bd_alternations must be >= 1");

  SeparationResult current = rpca(s, p.init_admm);
  std::vector<IterationRecord> trace = current.trace;
  int total_iterations = current.iterations;
  std::vector<OuterRecord> outer;
  std::optional<Psf> psf;
  bool converged = false;

  for (int k = 0; k < p.outer_max; ++k) {
    try {
      const CasoratiMatrix clutter_filtered(s.matrix() - current.tissue.matrix(), s.nz(), s.nx());
      const Image mean = temporal_mean(clutter_filtered);
      psf = blind_deconvolve(mean, p.bd, p.bd_alternations).psf;

      WarmStart warm{current.blood.matrix(), current.tissue.matrix(), current.dual};
      SeparationResult next = drpca(s, *psf, p.admm, warm);

      OuterRecord rec;
      rec.blood_change = (next.blood.matrix() - current.blood.matrix()).norm();
      rec.inner_iterations = next.iterations;
      rec.primal_residual = next.trace.empty() ? 0.0 : next.trace.back().primal_residual;
      outer.push_back(rec);
      trace.insert(trace.end(), next.trace.begin(), next.trace.end());
      total_iterations += next.iterations;
      current = std::move(next);
      if (rec.blood_change <= p.outer_tol) {
        converged = true;
        break;
      }
    } catch (const SolverError& e) {
      throw SolverError(std::string("BD-RPCA outer pass ") + std::to_string(k) + ": " + e.what(), e.iteration());
    }
  }

  current.psf = psf->normalized_copy();
  current.trace = std::move(trace);
  current.iterations = total_iterations;
  current.converged = converged;
  current.outer_trace = std::move(outer);
  return current;
}

SeparationResult bdrpca(const CasoratiMatrix& s, const AdmmParams& admm, const BdParams& bd, double outer_tol,
                        int outer_max) {
  BdrpcaParams p;
  p.admm = admm;
  p.init_admm = admm;
  p.init_admm.mu = kRpcaMu0 * admm.lambda;
  p.bd = bd;
  p.outer_tol = outer_tol;
  p.outer_max = outer_max;
  return bdrpca(s, p);
}

}  // namespace flowsep

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

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "flowsep/bdrpca.hpp"
#include "flowsep/fft.hpp"
#include "flowsep/io.hpp"
#include "flowsep/metrics.hpp"
#include "flowsep/parallel.hpp"
#include "flowsep/phantom.hpp"
#include "flowsep/svd_filter.hpp"
#include "manifest.hpp"

#ifndef FLOWSEP_VERSION
#define FLOWSEP_VERSION "0.0.0"
#endif

namespace flowsep::cli {

namespace fs = std::filesystem;

namespace {

// ------------------------------------------------------------ helpers

template <typename T>
std::optional<T> opt(const json& p, const char* key) {
  const json& v = p.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

double num(const json& p, const char* key) { return p.at(key).get<double>(); }
Index integer(const json& p, const char* key) { return p.at(key).get<Index>(); }
std::string str(const json& p, const char* key) { return p.at(key).get<std::string>(); }

json rect_json(const Rect& r) { return {{"top", r.top}, {"left", r.left}, {"height", r.height}, {"width", r.width}}; }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ------------------------------------------------------------ option tables

std::vector<OptionSpec> phantom_options() {
  return {
      {"preset", Kind::String, "full", "Phantom geometry preset", false, {"full", "desk"}},
      {"nz", Kind::Int, nullptr, "Axial samples (rescales the preset geometry)"},
      {"nx", Kind::Int, nullptr, "Lateral samples (rescales the preset geometry)"},
      {"nt", Kind::Int, nullptr, "Frames"},
      {"seed", Kind::Int, 0, "Phantom seed"},
      {"max_shift", Kind::Int, nullptr, "Max per-frame blood shift in pixels"},
      {"blood_to_tissue_db", Kind::Double, -20.0, "Blood/tissue scatterer energy ratio"},
      {"tissue_density", Kind::Double, 0.5, "Fraction of tissue pixels holding a scatterer"},
      {"kernel_fc", Kind::Double, 0.1, "Ground-truth PSF axial frequency (cycles/sample)"},
      {"kernel_sigma_z", Kind::Double, 1.5, "Ground-truth PSF axial width"},
      {"kernel_sigma_x", Kind::Double, 2.0, "Ground-truth PSF lateral width"},
      {"kernel_rows", Kind::Int, 15, "Ground-truth PSF support rows (odd)"},
      {"kernel_cols", Kind::Int, 15, "Ground-truth PSF support cols (odd)"},
  };
}

std::vector<OptionSpec> method_options() {
  return {
      {"method", Kind::String, nullptr, "Estimator", true, {"svd", "rpca", "drpca", "bdrpca"}},
      {"preset", Kind::String, "reference", "Default hyperparameters", false, {"reference", "tuned"}},
      {"lambda", Kind::Double, nullptr, "l1 weight (default: preset)"},
      {"mu", Kind::Double, nullptr, "ADMM penalty (default: mu0 * lambda)"},
      {"rho", Kind::Double, 1.0, "Nuclear-norm weight"},
      {"tol", Kind::Double, 1e-6, "Relative-change stopping tolerance"},
      {"max_iter", Kind::Int, 200, "ADMM iteration cap"},
      {"lambda_scale", Kind::Double, 1.0, "Multiplier on the preset lambda and mu (grid-sweep hook)"},
      {"tc", Kind::Int, 2, "SVD filter: first kept singular component (1-based)"},
      {"tb", Kind::Int, 15, "SVD filter: last kept singular component"},
      {"init_lambda", Kind::Double, nullptr, "BD-RPCA seeding RPCA lambda"},
      {"init_mu", Kind::Double, nullptr, "BD-RPCA seeding RPCA mu"},
      {"init_max_iter", Kind::Int, nullptr, "BD-RPCA seeding RPCA iteration cap"},
      {"outer_max", Kind::Int, nullptr, "BD-RPCA outer passes (reference 10, tuned 3)"},
      {"outer_tol", Kind::Double, 1e-6, "BD-RPCA outer stopping tolerance on ||dX||"},
      {"bd_alternations", Kind::Int, 2, "F/H alternations per blind-deconvolution call"},
      {"psf_rows", Kind::Int, 15, "Estimated PSF support rows"},
      {"psf_cols", Kind::Int, 15, "Estimated PSF support cols"},
      {"huber_gamma", Kind::Double, 0.002, "Huber penalty weight"},
      {"huber_a", Kind::Double, 0.05, "Huber knee"},
      {"cepstral_cutoff", Kind::Double, nullptr, "Cepstral lifter radius (default 5% of min dim)"},
      {"inner_tol", Kind::Double, 1e-6, "Reflectivity solver tolerance"},
      {"inner_max_iter", Kind::Int, 200, "Reflectivity solver iteration cap"},
      {"dynamic_range", Kind::Double, 35.0, "Power Doppler display range in dB"},
  };
}

std::vector<OptionSpec> cr_options() {
  return {
      {"cr_bg_top", Kind::Int, 0, "CR background patch top row"},
      {"cr_bg_left", Kind::Int, 0, "CR background patch left column"},
      {"patch_h", Kind::Int, 13, "CR patch height"},
      {"patch_w", Kind::Int, 12, "CR patch width"},
  };
}

OptionSpec out_option() { return {"out", Kind::Path, nullptr, "Output directory", true}; }

template <typename... Lists>
std::vector<OptionSpec> concat(Lists... lists) {
  std::vector<OptionSpec> all;
  (all.insert(all.end(), lists.begin(), lists.end()), ...);
  return all;
}

// ------------------------------------------------------------ phantom

PhantomConfig phantom_from(const json& p) {
  const PhantomConfig base = str(p, "preset") == "desk" ? PhantomConfig::desk_scale() : PhantomConfig::full_scale();
  PhantomConfig c = base;
  if (!p.at("nz").is_null() || !p.at("nx").is_null() || !p.at("nt").is_null()) {
    c = rescaled(base, opt<Index>(p, "nz").value_or(base.nz), opt<Index>(p, "nx").value_or(base.nx),
                 opt<Index>(p, "nt").value_or(base.nt));
  }
  c.seed = p.at("seed").get<std::uint64_t>();
  if (auto s = opt<Index>(p, "max_shift")) c.max_shift = *s;
  c.blood_to_tissue_db = num(p, "blood_to_tissue_db");
  c.tissue_density = num(p, "tissue_density");
  c.psf = PsfShape{num(p, "kernel_fc"), num(p, "kernel_sigma_z"), num(p, "kernel_sigma_x"), integer(p, "kernel_rows"),
                   integer(p, "kernel_cols")};
  c.validate();
  return c;
}

json phantom_json(const PhantomConfig& c, const PhantomTruth& t) {
  return {{"nz", c.nz},
          {"nx", c.nx},
          {"nt", c.nt},
          {"vessel", rect_json(c.vessel)},
          {"rect1", rect_json(c.rect1)},
          {"rect2", rect_json(c.rect2)},
          {"max_shift", c.max_shift},
          {"blood_amplitude", t.blood_amplitude}};
}

std::uint64_t noise_seed(const json& p) {
  return p.at("noise_seed").is_null() ? p.at("seed").get<std::uint64_t>() : p.at("noise_seed").get<std::uint64_t>();
}

json noise_json(const std::optional<NoiseReport>& n) {
  if (!n) return nullptr;
  return {{"requested_bsnr_db", n->bsnr_db}, {"sigma", n->sigma}, {"empirical_bsnr_db", n->empirical_bsnr_db}};
}

json run_simulate(const json& p, const fs::path& out) {
  const PhantomConfig c = phantom_from(p);
  PhantomTruth t = simulate(c);
  if (auto b = opt<double>(p, "bsnr")) t = add_noise_bsnr(t, *b, noise_seed(p));

  io::write_stack(out / "stack.iq", from_casorati(t.s_observed, c.metadata));
  io::write_stack(out / "blood_true.iq", from_casorati(t.x_true, c.metadata));
  io::write_stack(out / "tissue_true.iq", from_casorati(t.t_true, c.metadata));
  io::write_power_doppler(out / "pd_true.f64", t.pd_true);
  io::write_psf(out / "psf_true.iq", t.psf_true);
  return {{"phantom", phantom_json(c, t)}, {"noise", noise_json(t.noise)}};
}

// ------------------------------------------------------------ estimation

struct MethodSetup {
  std::string method;
  RankBand band;
  AdmmParams admm;
  BdrpcaParams bd;  ///< only for bdrpca; admm duplicated in bd.admm
  double dynamic_range = 35.0;
};

double preset_scale(const std::string& preset, const std::string& method) {
  if (preset != "tuned") return 1.0;
  if (method == "rpca") return kTunedRpcaScale;
  if (method == "drpca") return kTunedDrpcaScale;
  return kTunedBdrpcaScale;
}

MethodSetup setup_from(const json& p, const char* preset_key, Index nz, Index nx, Index nt) {
  MethodSetup s;
  s.method = str(p, "method");
  s.dynamic_range = num(p, "dynamic_range");
  s.band = RankBand{integer(p, "tc"), integer(p, "tb")};
  const std::string preset = str(p, preset_key);
  const double scale = num(p, "lambda_scale");
  if (!(scale > 0.0)) throw UsageError("--lambda-scale must be > 0");
  const double mu0 = s.method == "rpca" ? kRpcaMu0 : kDeconvolutiveMu0;
  const double lambda_ref = reference_hyperparams(nz, nx, nt, mu0).lambda;

  s.admm.lambda = opt<double>(p, "lambda").value_or(lambda_ref * preset_scale(preset, s.method) * scale);
  s.admm.mu = opt<double>(p, "mu").value_or(mu0 * s.admm.lambda);
  s.admm.rho = num(p, "rho");
  s.admm.tol = num(p, "tol");
  s.admm.max_iter = static_cast<int>(integer(p, "max_iter"));

  if (s.method == "bdrpca") {
    BdrpcaParams& b = s.bd;
    b.admm = s.admm;
    b.init_admm = s.admm;
    b.init_admm.lambda =
        opt<double>(p, "init_lambda").value_or(lambda_ref * (preset == "tuned" ? kTunedRpcaScale : 1.0) * scale);
    b.init_admm.mu = opt<double>(p, "init_mu").value_or(kRpcaMu0 * b.init_admm.lambda);
    b.init_admm.max_iter = static_cast<int>(opt<Index>(p, "init_max_iter").value_or(s.admm.max_iter));
    b.outer_max = static_cast<int>(opt<Index>(p, "outer_max").value_or(preset == "tuned" ? 3 : 10));
    b.outer_tol = num(p, "outer_tol");
    b.bd_alternations = static_cast<int>(integer(p, "bd_alternations"));
    b.bd.psf_rows = integer(p, "psf_rows");
    b.bd.psf_cols = integer(p, "psf_cols");
    b.bd.huber = HuberParams{num(p, "huber_gamma"), num(p, "huber_a")};
    b.bd.cepstral_cutoff = opt<double>(p, "cepstral_cutoff");
    b.bd.inner_tol = num(p, "inner_tol");
    b.bd.inner_max_iter = static_cast<int>(integer(p, "inner_max_iter"));
  }
  return s;
}

json admm_json(const AdmmParams& a) {
  return {{"lambda", a.lambda}, {"mu", a.mu}, {"rho", a.rho}, {"tol", a.tol}, {"max_iter", a.max_iter}};
}

json setup_json(const MethodSetup& s) {
  json j = {{"method", s.method}};
  if (s.method == "svd") {
    j["tc"] = s.band.tc;
    j["tb"] = s.band.tb;
  } else {
    j["admm"] = admm_json(s.admm);
  }
  if (s.method == "bdrpca") {
    j["init_admm"] = admm_json(s.bd.init_admm);
    j["outer_max"] = s.bd.outer_max;
    j["outer_tol"] = s.bd.outer_tol;
    j["bd_alternations"] = s.bd.bd_alternations;
    j["psf_rows"] = s.bd.bd.psf_rows;
    j["psf_cols"] = s.bd.bd.psf_cols;
    j["cepstral_cutoff"] = s.bd.bd.cepstral_cutoff ? json(*s.bd.bd.cepstral_cutoff) : json(nullptr);
    j["psf_override"] = s.bd.psf_override.has_value();
  }
  return j;
}

SeparationResult run_method(const MethodSetup& s, const CasoratiMatrix& data, const std::optional<Psf>& psf) {
  if (s.method == "svd") {
    CasoratiMatrix blood = svd_filter(data, s.band);
    CasoratiMatrix tissue(data.matrix() - blood.matrix(), data.nz(), data.nx());
    return SeparationResult{std::move(blood), std::move(tissue)};
  }
  if (s.method == "rpca") return rpca(data, s.admm);
  if (s.method == "drpca") return drpca(data, *psf, s.admm);
  return bdrpca(data, s.bd);
}

json trace_json(const SeparationResult& r) {
  json inner = json::array();
  for (const auto& t : r.trace) {
    inner.push_back(
        {{"primal_residual", t.primal_residual}, {"objective", t.objective}, {"relative_change", t.relative_change}});
  }
  json outer = json::array();
  for (const auto& o : r.outer_trace) {
    outer.push_back({{"blood_change", o.blood_change},
                     {"inner_iterations", o.inner_iterations},
                     {"primal_residual", o.primal_residual}});
  }
  return {{"iterations", r.iterations}, {"converged", r.converged}, {"trace", inner}, {"outer_trace", outer}};
}

void validate_estimate(const json& p) {
  if (str(p, "method") == "drpca" && p.at("psf").is_null()) {
    throw UsageError("--method drpca requires a kernel: pass --psf <file.iq>");
  }
}

json run_estimate(const json& p, const fs::path& out) {
  const IQStack stack = io::read_stack(str(p, "input"));
  const CasoratiMatrix data = to_casorati(stack);
  std::optional<Psf> psf;
  if (auto path = opt<std::string>(p, "psf")) psf = io::read_psf(*path);
  MethodSetup s = setup_from(p, "preset", data.nz(), data.nx(), data.nt());
  if (s.method == "bdrpca" && psf) s.bd.psf_override = psf;

  const SeparationResult r = run_method(s, data, s.method == "drpca" ? psf : std::nullopt);
  io::write_stack(out / "blood.iq", from_casorati(r.blood, stack.metadata()));
  io::write_stack(out / "tissue.iq", from_casorati(r.tissue, stack.metadata()));
  io::write_power_doppler(out / "pd.f64", power_doppler(r.blood, s.dynamic_range));
  if (r.psf) io::write_psf(out / "psf.iq", *r.psf);
  write_json(out / "trace.json", trace_json(r));
  return {{"resolved", setup_json(s)},
          {"dims", {{"nz", data.nz()}, {"nx", data.nx()}, {"nt", data.nt()}}},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"outer_passes", r.outer_trace.size()}};
}

// ------------------------------------------------------------ evaluation

json cr_json(const PowerDopplerImage& img, const json& p) {
  const PatchRect bg{integer(p, "cr_bg_top"), integer(p, "cr_bg_left"), integer(p, "patch_h"), integer(p, "patch_w")};
  const CrSweep sweep = cr_sweep(img, bg, bg.height, bg.width);
  return {{"background", {{"top", bg.top}, {"left", bg.left}, {"height", bg.height}, {"width", bg.width}}},
          {"median", sweep.median},
          {"quartiles", {sweep.q1, sweep.median, sweep.q3}},
          {"patch_rows", sweep.patch_rows},
          {"patch_cols", sweep.patch_cols},
          {"patch_count", sweep.values.size()},
          {"values", sweep.values}};
}

json run_evaluate(const json& p, const fs::path& out) {
  const PowerDopplerImage truth = io::read_power_doppler(str(p, "truth"));
  const PowerDopplerImage est = io::read_power_doppler(str(p, "estimate"));
  if (truth.db.rows() != est.db.rows() || truth.db.cols() != est.db.cols()) {
    throw std::invalid_argument("truth is " + std::to_string(truth.db.rows()) + "x" + std::to_string(truth.db.cols()) +
                                " but estimate is " + std::to_string(est.db.rows()) + "x" +
                                std::to_string(est.db.cols()));
  }
  const QualityScores q = compare_display(truth, est);
  const json report = {{"kind", "evaluate-report"},
                       {"format_version", io::kFormatVersion},
                       {"nrmse", q.nrmse},
                       {"psnr", finite_or_null(q.psnr)},
                       {"psnr_infinite", std::isinf(q.psnr)},
                       {"dynamic_range", truth.dynamic_range},
                       {"dims", {{"nz", truth.db.rows()}, {"nx", truth.db.cols()}}},
                       {"cr", cr_json(est, p)},
                       {"inputs", {{"truth", describe_input(str(p, "truth"))},
                                   {"estimate", describe_input(str(p, "estimate"))}}}};
  write_json(out / "report.json", report);
  return {{"nrmse", q.nrmse}, {"psnr", finite_or_null(q.psnr)}};
}

json run_sweep(const json& p, const fs::path& out) {
  const std::vector<double> grid = parse_grid(str(p, "bsnr"));
  std::vector<double> levels;
  if (p.at("noiseless").get<bool>()) levels.push_back(std::numeric_limits<double>::infinity());
  levels.insert(levels.end(), grid.begin(), grid.end());

  const PhantomConfig c = phantom_from(p);
  const PhantomTruth clean = simulate(c);
  const MethodSetup s = setup_from(p, "method_preset", c.nz, c.nx, c.nt);
  json rows = json::array();
  json seconds = json::array();
  for (const double b : levels) {
    const PhantomTruth noisy = add_noise_bsnr(clean, b, noise_seed(p));
    const auto t0 = std::chrono::steady_clock::now();
    const SeparationResult r = run_method(s, noisy.s_observed, clean.psf_true);
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    const PowerDopplerImage pd = power_doppler(r.blood, s.dynamic_range);
    const QualityScores q = compare_display(clean.pd_true, pd);
    json row = {{"bsnr_db", finite_or_null(b)},
                {"noise", noise_json(noisy.noise)},
                {"nrmse", q.nrmse},
                {"psnr", finite_or_null(q.psnr)},
                {"cr_median", cr_sweep(pd, PatchRect{integer(p, "cr_bg_top"), integer(p, "cr_bg_left"),
                                                     integer(p, "patch_h"), integer(p, "patch_w")},
                                       integer(p, "patch_h"), integer(p, "patch_w"))
                                  .median},
                {"iterations", r.iterations},
                {"converged", r.converged}};
    if (r.psf) row["psf_correlation"] = kernel_correlation(clean.psf_true, *r.psf);
    rows.push_back(row);
  }
  write_json(out / "sweep.json", {{"kind", "evaluate-sweep"},
                                  {"format_version", io::kFormatVersion},
                                  {"method", s.method},
                                  {"resolved", setup_json(s)},
                                  {"phantom", phantom_json(c, clean)},
                                  {"rows", rows}});
  return {{"levels", rows.size()}, {"seconds_per_level", seconds}};
}

// ------------------------------------------------------------ psf export

void validate_psf_export(const json& p) {
  if (p.at("nz").is_null() != p.at("nx").is_null()) throw UsageError("--nz and --nx must be given together");
}

json run_psf_export(const json& p, const fs::path& out) {
  Psf psf = Psf::delta();
  if (auto path = opt<std::string>(p, "input")) {
    psf = io::read_psf(*path).normalized_copy();
  } else {
    psf = synth_psf(num(p, "kernel_fc"), num(p, "kernel_sigma_z"), num(p, "kernel_sigma_x"), integer(p, "kernel_rows"),
                    integer(p, "kernel_cols"));
  }
  io::write_psf(out / "psf.iq", psf);
  json result = {{"rows", psf.rows()}, {"cols", psf.cols()}, {"energy", psf.energy()}};
  if (auto nz = opt<Index>(p, "nz")) {
    const Index nx = integer(p, "nx");
    const Image h = embed_psf(psf, *nz, nx).transfer();
    const double peak = h.cwiseAbs().maxCoeff();
    // Zero frequency moved to the centre for viewing.
    RealImage db(*nz, nx);
    for (Index x = 0; x < nx; ++x) {
      for (Index z = 0; z < *nz; ++z) {
        const double a = std::abs(h((z + (*nz + 1) / 2) % *nz, (x + (nx + 1) / 2) % nx));
        db(z, x) = a > 0.0 ? std::max(20.0 * std::log10(a / peak), kPowerFloorDb) : kPowerFloorDb;
      }
    }
    io::write_power_doppler(out / "spectrum.f64", PowerDopplerImage{db, num(p, "dynamic_range")});
    result["spectrum"] = {{"nz", *nz}, {"nx", nx}};
  }
  return result;
}

// ------------------------------------------------------------ registry

std::vector<Command> build_commands() {
  std::vector<Command> cmds;
  cmds.push_back({"simulate",
                  "Synthesize a vessel phantom: observed stack, ground truth, PSF",
                  concat(phantom_options(),
                         std::vector<OptionSpec>{
                             {"bsnr", Kind::Double, nullptr, "Add white noise at this BSNR in dB"},
                             {"noise_seed", Kind::Int, nullptr, "Noise seed (default: --seed)"},
                             out_option()}),
                  {},
                  &run_simulate});

  cmds.push_back({"estimate",
                  "Separate blood from tissue with svd, rpca, drpca or bdrpca",
                  concat(method_options(),
                         std::vector<OptionSpec>{{"input", Kind::Path, nullptr, "Input IQ stack (.iq)", true},
                                                 {"psf", Kind::Path, nullptr, "Known PSF (.iq); required by drpca, replaces blind estimation in bdrpca"},
                                                 out_option()}),
                  {"input", "psf"},
                  &run_estimate,
                  &validate_estimate});

  cmds.push_back({"evaluate",
                  "Score an estimated power Doppler image against the truth",
                  concat(std::vector<OptionSpec>{{"truth", Kind::Path, nullptr, "Reference power Doppler (.f64)", true},
                                                 {"estimate", Kind::Path, nullptr, "Estimated power Doppler (.f64)",
                                                  true}},
                         cr_options(), std::vector<OptionSpec>{out_option()}),
                  {"truth", "estimate"},
                  &run_evaluate});

  std::vector<OptionSpec> sweep = phantom_options();
  for (auto o : method_options()) {
    if (o.name == "preset") o.name = "method_preset";
    sweep.push_back(o);
  }
  sweep.push_back({"bsnr", Kind::String, "0:5:60", "BSNR grid in dB: start:step:stop or a comma list"});
  sweep.push_back({"noiseless", Kind::Flag, false, "Also run without noise"});
  sweep.push_back({"noise_seed", Kind::Int, nullptr, "Noise seed (default: --seed)"});
  for (const auto& o : cr_options()) sweep.push_back(o);
  sweep.push_back(out_option());
  cmds.push_back({"evaluate-sweep",
                  "Simulate once, then estimate and score across a BSNR grid",
                  sweep,
                  {},
                  &run_sweep});

  cmds.push_back({"psf-export",
                  "Write a PSF kernel (synthetic or from a file) and optionally its spectrum",
                  std::vector<OptionSpec>{
                      {"input", Kind::Path, nullptr, "Kernel to re-export (.iq); synthetic when omitted"},
                      {"kernel_fc", Kind::Double, 0.1, "Synthetic PSF axial frequency"},
                      {"kernel_sigma_z", Kind::Double, 1.5, "Synthetic PSF axial width"},
                      {"kernel_sigma_x", Kind::Double, 2.0, "Synthetic PSF lateral width"},
                      {"kernel_rows", Kind::Int, 15, "Synthetic PSF rows (odd)"},
                      {"kernel_cols", Kind::Int, 15, "Synthetic PSF cols (odd)"},
                      {"nz", Kind::Int, nullptr, "Also export |H| on an nz x nx grid"},
                      {"nx", Kind::Int, nullptr, "Also export |H| on an nz x nx grid"},
                      {"dynamic_range", Kind::Double, 40.0, "Display range of the spectrum image"},
                      out_option()},
                  {"input"},
                  &run_psf_export,
                  &validate_psf_export});
  return cmds;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void prepare_out(const fs::path& out, bool force) {
  if (fs::exists(out) && !fs::is_directory(out)) throw std::runtime_error(out.string() + " is not a directory");
  fs::create_directories(out);
  std::vector<fs::path> existing;
  for (const auto& e : fs::directory_iterator(out)) existing.push_back(e.path());
  if (existing.empty()) return;
  if (!force) throw std::runtime_error(out.string() + " is not empty (use --force to overwrite)");
  for (const auto& e : existing) {
    if (fs::is_regular_file(e)) fs::remove(e);
  }
}

}  // namespace

const std::vector<Command>& commands() {
  static const std::vector<Command> all = build_commands();
  return all;
}

const Command& find_command(const std::string& name) {
  for (const auto& c : commands()) {
    if (c.name == name) return c;
  }
  throw UsageError("unknown command '" + name + "'");
}

json execute(const Command& cmd, const json& params, bool force) {
  if (cmd.validate != nullptr) cmd.validate(params);
  const fs::path out = params.at("out").get<std::string>();
  json inputs = json::object();
  for (const auto& key : cmd.inputs) {
    if (!params.at(key).is_null()) inputs[key] = describe_input(params.at(key).get<std::string>());
  }
  prepare_out(out, force);

  const auto t0 = std::chrono::steady_clock::now();
  json result = cmd.run(params, out);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json seeds = json::object();
  for (const char* k : {"seed", "noise_seed"}) {
    if (params.contains(k)) seeds[k] = params.at(k);
  }
  if (params.contains("noise_seed") && params.at("noise_seed").is_null()) seeds["noise_seed"] = params.at("seed");

  json manifest = {{"kind", "flowsep-manifest"},
                   {"format_version", kManifestVersion},
                   {"data_format_version", io::kFormatVersion},
                   {"tool", {{"name", "flowsep"}, {"version", FLOWSEP_VERSION}}},
                   {"command", cmd.name},
                   {"params", params},
                   {"seeds", seeds},
                   {"inputs", inputs},
                   {"outputs", describe_outputs(out)},
                   {"result", result},
                   {"threads", thread_count()},
                   {"wall_time_s", seconds},
                   {"created_utc", utc_now()}};
  write_json(out / kManifestName, manifest);
  return manifest;
}

json replay(const fs::path& manifest_path, const fs::path& out, bool verify_inputs, bool force) {
  const json m = read_json(manifest_path);
  if (m.value("kind", "") != "flowsep-manifest") throw std::runtime_error(manifest_path.string() + " is not a manifest");
  if (m.value("format_version", 0) != kManifestVersion) {
    throw std::runtime_error("unsupported manifest version " + m.at("format_version").dump());
  }
  const Command& cmd = find_command(m.at("command").get<std::string>());
  json params = m.at("params");
  check_params(cmd.options, params);
  if (verify_inputs) {
    for (const auto& [key, rec] : m.at("inputs").items()) {
      const std::string path = rec.at("path").get<std::string>();
      if (!fs::exists(path)) throw std::runtime_error("input " + key + " (" + path + ") no longer exists");
      if (sha256_file(path) != rec.at("sha256").get<std::string>()) {
        throw std::runtime_error("input " + key + " (" + path + ") changed since the manifest was written");
      }
    }
  }
  params["out"] = fs::absolute(out).lexically_normal().string();
  const json fresh = execute(cmd, params, force);

  json mismatched = json::array();
  std::map<std::string, std::string> recorded;
  for (const auto& o : m.at("outputs")) recorded[o.at("file").get<std::string>()] = o.at("sha256").get<std::string>();
  std::map<std::string, std::string> now;
  for (const auto& o : fresh.at("outputs")) now[o.at("file").get<std::string>()] = o.at("sha256").get<std::string>();
  for (const auto& [file, digest] : recorded) {
    if (now.count(file) == 0 || now[file] != digest) mismatched.push_back(file);
  }
  for (const auto& [file, digest] : now) {
    if (recorded.count(file) == 0) mismatched.push_back(file);
  }
  return {{"outputs", now.size()}, {"mismatched", mismatched}};
}

}  // namespace flowsep::cli

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

#include "flowsep/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace flowsep::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename UInt>
void put_le(std::vector<char>& out, UInt v) {
  for (std::size_t b = 0; b < sizeof(UInt); ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

template <typename UInt>
UInt get_le(const char* p) {
  UInt v = 0;
  for (std::size_t b = 0; b < sizeof(UInt); ++b) v |= static_cast<UInt>(static_cast<unsigned char>(p[b])) << (8 * b);
  return v;
}

void write_bytes(const fs::path& path, const std::vector<char>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(f), {});
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << j.dump(2) << '\n';
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw std::runtime_error("bad JSON in " + path.string() + ": " + e.what());
  }
}

json check_sidecar(const fs::path& sidecar, const std::string& kind) {
  json j = read_json(sidecar);
  if (j.value("kind", "") != kind) throw std::runtime_error(sidecar.string() + " is not a " + kind + " sidecar");
  if (j.value("format_version", 0) != kFormatVersion) {
    throw std::runtime_error(sidecar.string() + ": unsupported format_version");
  }
  return j;
}

// Data path from either the data file or the sidecar.
fs::path data_path_of(const fs::path& path, const json& side) {
  if (path.extension() != ".json") return path;
  return path.parent_path() / side.at("data").get<std::string>();
}

std::vector<char> encode_complex64(const Complex* data, Index n) {
  std::vector<char> bytes;
  bytes.reserve(static_cast<std::size_t>(n) * 8);
  for (Index i = 0; i < n; ++i) {
    put_le(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(data[i].real())));
    put_le(bytes, std::bit_cast<std::uint32_t>(static_cast<float>(data[i].imag())));
  }
  return bytes;
}

std::vector<Complex> decode_complex64(const std::vector<char>& bytes, Index expected, const fs::path& path) {
  if (static_cast<Index>(bytes.size()) != expected * 8) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(expected * 8) + " bytes, found " +
                             std::to_string(bytes.size()));
  }
  std::vector<Complex> out(static_cast<std::size_t>(expected));
  for (Index i = 0; i < expected; ++i) {
    const char* p = bytes.data() + 8 * i;
    out[static_cast<std::size_t>(i)] = {std::bit_cast<float>(get_le<std::uint32_t>(p)),
                                        std::bit_cast<float>(get_le<std::uint32_t>(p + 4))};
  }
  return out;
}

json metadata_json(const StackMetadata& m) {
  json j = json::object();
  j["dz_cm"] = m.dz_cm ? json(*m.dz_cm) : json(nullptr);
  j["dx_cm"] = m.dx_cm ? json(*m.dx_cm) : json(nullptr);
  j["frame_rate_hz"] = m.frame_rate_hz ? json(*m.frame_rate_hz) : json(nullptr);
  return j;
}

std::optional<double> opt_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

fs::path sidecar_path(const fs::path& data_path) {
  fs::path p = data_path;
  p.replace_extension(".json");
  return p;
}

void write_stack(const fs::path& path, const IQStack& stack) {
  write_bytes(path, encode_complex64(stack.data().data(), static_cast<Index>(stack.data().size())));
  json side = {{"kind", "iq-stack"},
               {"format_version", kFormatVersion},
               {"data", path.filename().string()},
               {"sample_type", "complex64-le"},
               {"order", "z-fastest,x,t"},
               {"nz", stack.nz()},
               {"nx", stack.nx()},
               {"nt", stack.nt()},
               {"metadata", metadata_json(stack.metadata())}};
  write_json(sidecar_path(path), side);
}

IQStack read_stack(const fs::path& path) {
  const json side = check_sidecar(path.extension() == ".json" ? path : sidecar_path(path), "iq-stack");
  const fs::path data = data_path_of(path, side);
  const Index nz = side.at("nz").get<Index>();
  const Index nx = side.at("nx").get<Index>();
  const Index nt = side.at("nt").get<Index>();
  if (nz < 1 || nx < 1 || nt < 1) throw std::runtime_error(path.string() + ": non-positive dims");
  StackMetadata meta;
  if (side.contains("metadata")) {
    const json& m = side.at("metadata");
    meta.dz_cm = opt_number(m, "dz_cm");
    meta.dx_cm = opt_number(m, "dx_cm");
    meta.frame_rate_hz = opt_number(m, "frame_rate_hz");
  }
  return IQStack(nz, nx, nt, decode_complex64(read_bytes(data), nz * nx * nt, data), meta);
}

void write_casorati(const fs::path& path, const CasoratiMatrix& m, const StackMetadata& meta) {
  write_stack(path, from_casorati(m, meta));
}

CasoratiMatrix read_casorati(const fs::path& path) { return to_casorati(read_stack(path)); }

void write_psf(const fs::path& path, const Psf& psf) {
  write_bytes(path, encode_complex64(psf.kernel().data(), psf.kernel().size()));
  json side = {{"kind", "psf"},
               {"format_version", kFormatVersion},
               {"data", path.filename().string()},
               {"sample_type", "complex64-le"},
               {"order", "row-fastest"},
               {"rows", psf.rows()},
               {"cols", psf.cols()},
               {"center_row", psf.center_row()},
               {"center_col", psf.center_col()},
               {"normalized", psf.normalized()}};
  write_json(sidecar_path(path), side);
}

Psf read_psf(const fs::path& path) {
  const json side = check_sidecar(path.extension() == ".json" ? path : sidecar_path(path), "psf");
  const fs::path data = data_path_of(path, side);
  const Index rows = side.at("rows").get<Index>();
  const Index cols = side.at("cols").get<Index>();
  if (rows < 1 || cols < 1) throw std::runtime_error(path.string() + ": non-positive PSF dims");
  const std::vector<Complex> v = decode_complex64(read_bytes(data), rows * cols, data);
  ComplexMatrix k = Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
  return Psf(std::move(k), side.at("center_row").get<Index>(), side.at("center_col").get<Index>());
}

void write_pgm(const fs::path& path, const PowerDopplerImage& img) {
  const PowerDopplerImage shown = display_image(img);
  const Index nz = shown.db.rows();
  const Index nx = shown.db.cols();
  std::string header = "P5\n" + std::to_string(nx) + " " + std::to_string(nz) + "\n255\n";
  std::vector<char> bytes(header.begin(), header.end());
  // PGM rows are image rows (z), pixels along x.
  for (Index z = 0; z < nz; ++z) {
    for (Index x = 0; x < nx; ++x) {
      const double level = 255.0 * (shown.db(z, x) + shown.dynamic_range) / shown.dynamic_range;
      bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(level, 0.0, 255.0)))));
    }
  }
  write_bytes(path, bytes);
}

void write_power_doppler(const fs::path& path, const PowerDopplerImage& img) {
  std::vector<char> bytes;
  bytes.reserve(static_cast<std::size_t>(img.db.size()) * 8);
  for (Index i = 0; i < img.db.size(); ++i) put_le(bytes, std::bit_cast<std::uint64_t>(img.db.data()[i]));
  write_bytes(path, bytes);
  json side = {{"kind", "power-doppler"},
               {"format_version", kFormatVersion},
               {"data", path.filename().string()},
               {"sample_type", "float64-le"},
               {"unit", "dB"},
               {"order", "z-fastest,x"},
               {"nz", img.db.rows()},
               {"nx", img.db.cols()},
               {"dynamic_range_db", img.dynamic_range}};
  write_json(sidecar_path(path), side);
  fs::path pgm = path;
  pgm.replace_extension(".pgm");
  write_pgm(pgm, img);
}

PowerDopplerImage read_power_doppler(const fs::path& path) {
  const json side = check_sidecar(path.extension() == ".json" ? path : sidecar_path(path), "power-doppler");
  const fs::path data = data_path_of(path, side);
  const Index nz = side.at("nz").get<Index>();
  const Index nx = side.at("nx").get<Index>();
  const std::vector<char> bytes = read_bytes(data);
  if (static_cast<Index>(bytes.size()) != nz * nx * 8) throw std::runtime_error(data.string() + ": size mismatch");
  RealImage db(nz, nx);
  for (Index i = 0; i < nz * nx; ++i) db.data()[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + 8 * i));
  return {std::move(db), side.at("dynamic_range_db").get<double>()};
}

}  // namespace flowsep::io

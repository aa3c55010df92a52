// Copyright 2026 The smflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "smflow/serialization.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifndef SMFLOW_VERSION
#define SMFLOW_VERSION "unknown"
#endif

namespace smflow {

// ---------------------------------------------------------------------------
// CSV

std::string format_real(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

namespace {

constexpr std::size_t kColumns = 10;

void put(std::string& row, const std::optional<double>& v, bool last = false) {
  if (v) row += format_real(*v);
  if (!last) row += ',';
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  while (true) {
    const auto c = line.find(',');
    cells.push_back(line.substr(0, c));
    if (c == std::string_view::npos) break;
    line.remove_prefix(c + 1);
  }
  return cells;
}

std::optional<double> parse_cell(std::string_view cell, std::size_t row, const char* column) {
  if (cell.empty()) return std::nullopt;
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw IoError("timeseries row " + std::to_string(row) + ": malformed value for " + column);
  return v;
}

double require_cell(std::string_view cell, std::size_t row, const char* column) {
  auto v = parse_cell(cell, row, column);
  if (!v) throw IoError("timeseries row " + std::to_string(row) + ": missing value for " + column);
  return *v;
}

}  // namespace

std::string format_timeseries(std::vector<InvariantRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const InvariantRecord& a, const InvariantRecord& b) { return a.t < b.t; });
  std::string out = kTimeseriesHeader;
  out += '\n';
  for (const auto& r : records) {
    std::string row;
    put(row, r.t);
    put(row, r.sphere_violation);
    put(row, r.dirichlet_energy);
    put(row, r.q_value);
    put(row, r.h2_identity_residual);
    for (const auto& s : r.sobolev) put(row, s);
    put(row, r.boundary_flux_max);
    put(row, r.eps_dissipation_rate, true);
    out += row;
    out += '\n';
  }
  return out;
}

std::vector<InvariantRecord> parse_timeseries(const std::string& text) {
  std::string_view rest(text);
  auto next_line = [&]() {
    const auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest.remove_prefix(nl == std::string_view::npos ? rest.size() : nl + 1);
    return line;
  };
  if (next_line() != kTimeseriesHeader) throw IoError("timeseries header does not match the expected columns");
  std::vector<InvariantRecord> out;
  std::size_t row = 1;
  while (!rest.empty()) {
    const std::string_view line = next_line();
    ++row;
    const auto cells = split_csv(line);
    if (cells.size() != kColumns)
      throw IoError("timeseries row " + std::to_string(row) + ": expected " + std::to_string(kColumns) + " cells");
    InvariantRecord r;
    r.t = require_cell(cells[0], row, "t");
    r.sphere_violation = require_cell(cells[1], row, "sphere_violation");
    r.dirichlet_energy = require_cell(cells[2], row, "dirichlet_energy");
    r.q_value = parse_cell(cells[3], row, "q_value");
    r.h2_identity_residual = parse_cell(cells[4], row, "h2_identity_residual");
    r.sobolev[0] = parse_cell(cells[5], row, "h1");
    r.sobolev[1] = parse_cell(cells[6], row, "h2");
    r.sobolev[2] = parse_cell(cells[7], row, "h3");
    r.boundary_flux_max = require_cell(cells[8], row, "boundary_flux_max");
    r.eps_dissipation_rate = parse_cell(cells[9], row, "eps_dissipation_rate");
    out.push_back(r);
  }
  return out;
}

void write_timeseries(const std::string& path, const std::vector<InvariantRecord>& records) {
  write_text_file(path, format_timeseries(records));
}

std::vector<InvariantRecord> read_timeseries(const std::string& path) {
  try {
    return parse_timeseries(read_text_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Snapshots

namespace {

constexpr char kMagic[4] = {'S', 'P', 'F', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFFu);
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out += static_cast<char>((bits >> (8 * i)) & 0xFFu);
}

std::uint64_t get_le(const std::string& in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + static_cast<std::size_t>(i)])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_snapshot(const SphereField& u) {
  const BoxGrid& g = u.grid();
  std::string out(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(g.dims()));
  for (int a = 0; a < g.dims(); ++a) put_u32(out, static_cast<std::uint32_t>(g.nodes(a)));
  out.reserve(out.size() + 24 * u.size());
  for (const Vec3& v : u.values()) {
    put_f64(out, v.x);
    put_f64(out, v.y);
    put_f64(out, v.z);
  }
  return out;
}

Snapshot decode_snapshot(const std::string& bytes, const SnapshotReadOptions& options) {
  if (bytes.size() < 8 || !std::equal(kMagic, kMagic + 4, bytes.begin()))
    throw IoError("snapshot magic is not SPF1");
  const auto dims = get_le(bytes, 4, 4);
  if (dims < 1 || dims > 3) throw IoError("snapshot shape error: dims = " + std::to_string(dims));
  const std::size_t header = 8 + 4 * dims;
  if (bytes.size() < header) throw IoError("snapshot shape error: truncated header");
  std::vector<int> nodes;
  std::size_t count = 1;
  for (std::size_t a = 0; a < dims; ++a) {
    const auto n = get_le(bytes, 8 + 4 * a, 4);
    if (n < 3 || n > (1u << 20)) throw IoError("snapshot shape error: N = " + std::to_string(n));
    nodes.push_back(static_cast<int>(n));
    count *= n;
  }
  const std::size_t expected = header + 24 * count;
  if (bytes.size() != expected)
    throw IoError("snapshot shape error: expected " + std::to_string(expected) + " bytes, found " +
                  std::to_string(bytes.size()));

  BoxGrid grid(nodes);
  std::vector<Vec3> values(count);
  std::size_t at = header;
  for (auto& v : values) {
    for (int c = 0; c < 3; ++c, at += 8) v[c] = std::bit_cast<double>(get_le(bytes, at, 8));
    if (!is_finite(v)) throw IoError("snapshot holds a non-finite value");
  }
  Snapshot snap{SphereField(grid, std::move(values)), std::nullopt};
  const double violation = sphere_violation(snap.field);
  if (violation > options.sphere_tol) {
    std::ostringstream w;
    w << "snapshot violates the unit-sphere constraint: max ||u|-1| = " << violation << " > " << options.sphere_tol;
    if (options.renormalize) {
      renormalize(snap.field);
      w << " (renormalized)";
    }
    snap.warning = w.str();
  }
  return snap;
}

void write_snapshot(const std::string& path, const SphereField& u) { write_text_file(path, encode_snapshot(u)); }

Snapshot read_snapshot(const std::string& path, const SnapshotReadOptions& options) {
  try {
    return decode_snapshot(read_text_file(path), options);
  } catch (const IoError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw IoError(path + ": " + msg);
  }
}

// ---------------------------------------------------------------------------
// Reports, checksums, manifests

std::string compat_report_json(const std::vector<CompatReport>& reports) {
  using nlohmann::json;
  json arr = json::array();
  for (const auto& r : reports) {
    json residuals = json::array();
    for (const auto& x : r.residuals)
      residuals.push_back({{"level", x.level},
                           {"quantity", x.quantity},
                           {"axis", x.axis},
                           {"side", x.side == Side::Low ? "low" : "high"},
                           {"node", x.node},
                           {"raw", x.raw},
                           {"scaled", x.scaled}});
    json j = {{"condition", to_string(r.condition)},
              {"order", r.order},
              {"pass", r.pass},
              {"tolerance_used", r.tolerance_used},
              {"max_scaled_residual", r.max_scaled_residual},
              {"note", r.note},
              {"residuals", residuals}};
    j["first_failing_level"] = r.first_failing_level ? json(*r.first_failing_level) : json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_text_file(path)); }

RunManifest make_manifest(const std::string& config_text) {
  RunManifest m;
  m.config_text = config_text;
  m.version = SMFLOW_VERSION;
  std::string os = "unknown-os";
#if defined(__linux__)
  os = "linux";
#elif defined(__APPLE__)
  os = "darwin";
#elif defined(_WIN32)
  os = "windows";
#endif
  std::string arch = "unknown-arch";
#if defined(__x86_64__)
  arch = "x86_64";
#elif defined(__aarch64__)
  arch = "aarch64";
#endif
  std::string compiler = "unknown-compiler";
#if defined(__clang__)
  compiler = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  compiler = std::string("gcc ") + __VERSION__;
#endif
  m.platform = os + "-" + arch + "; " + compiler + "; " +
               (std::endian::native == std::endian::little ? "little-endian" : "big-endian");
  return m;
}

std::string format_manifest(const RunManifest& m) {
  std::string out = "smflow-manifest 1\n";
  out += "version = " + m.version + "\n";
  out += "platform = " + m.platform + "\n";
  out += "wall_clock_seconds = " + format_real(m.wall_clock_seconds) + "\n";
  out += "[checksums]\n";
  for (const auto& [name, sum] : m.checksums) out += name + " = " + sum + "\n";
  out += "[config]\n";
  out += m.config_text;
  return out;
}

RunManifest parse_manifest(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "smflow-manifest 1") throw IoError("not a smflow manifest");
  RunManifest m;
  enum { Header, Checksums } part = Header;
  auto value_of = [](const std::string& l, std::string& key) {
    const auto eq = l.find(" = ");
    if (eq == std::string::npos) throw IoError("malformed manifest line: " + l);
    key = l.substr(0, eq);
    return l.substr(eq + 3);
  };
  while (std::getline(in, line)) {
    if (line == "[checksums]") {
      part = Checksums;
      continue;
    }
    if (line == "[config]") {
      std::ostringstream rest;
      rest << in.rdbuf();
      m.config_text = rest.str();
      break;
    }
    std::string key;
    const std::string value = value_of(line, key);
    if (part == Checksums) {
      m.checksums[key] = value;
    } else if (key == "version") {
      m.version = value;
    } else if (key == "platform") {
      m.platform = value;
    } else if (key == "wall_clock_seconds") {
      m.wall_clock_seconds = std::stod(value);
    } else {
      throw IoError("unknown manifest field: " + key);
    }
  }
  return m;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace smflow

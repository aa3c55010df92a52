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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smflow/compatibility.hpp"
#include "smflow/invariants.hpp"

namespace smflow {

// ---------------------------------------------------------------------------
// Invariant time series (CSV)

inline constexpr const char* kTimeseriesHeader =
    "t,sphere_violation,dirichlet_energy,q_value,h2_identity_residual,h1,h2,h3,boundary_flux_max,"
    "eps_dissipation_rate";

/// `v` with 17 significant digits (enough to round-trip any double).
std::string format_real(double v);

/// Header plus one row per record, sorted by t, LF endings, empty cells for
/// absent values.
std::string format_timeseries(std::vector<InvariantRecord> records);
std::vector<InvariantRecord> parse_timeseries(const std::string& text);

void write_timeseries(const std::string& path, const std::vector<InvariantRecord>& records);
std::vector<InvariantRecord> read_timeseries(const std::string& path);

// ---------------------------------------------------------------------------
// SPF1 binary snapshots: "SPF1", uint32 dims, uint32 N per axis, then
// row-major xyz triples, all little-endian.

void write_snapshot(const std::string& path, const SphereField& u);

struct SnapshotReadOptions {
  double sphere_tol = 1e-6;
  bool renormalize = false;
};

struct Snapshot {
  SphereField field;
  std::optional<std::string> warning;  ///< set when the sphere check failed
};

Snapshot read_snapshot(const std::string& path, const SnapshotReadOptions& options = {});

std::string encode_snapshot(const SphereField& u);
Snapshot decode_snapshot(const std::string& bytes, const SnapshotReadOptions& options = {});

// ---------------------------------------------------------------------------
// Reports and manifests

/// Deterministic JSON: sorted keys, shortest round-trip reals.
std::string compat_report_json(const std::vector<CompatReport>& reports);

/// Lowercase hex SHA-256 of a byte string / a file.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct RunManifest {
  std::string config_text;
  std::string version;
  std::string platform;
  double wall_clock_seconds = 0.0;
  std::map<std::string, std::string> checksums;  ///< file name -> sha256
};

/// Fills version and platform for this build.
RunManifest make_manifest(const std::string& config_text);

std::string format_manifest(const RunManifest& m);
RunManifest parse_manifest(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace smflow

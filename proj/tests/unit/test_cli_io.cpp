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

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "smflow/cli.hpp"
#include "smflow/config.hpp"
#include "smflow/serialization.hpp"

namespace smflow {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("smflow_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "smflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// --- configuration ---------------------------------------------------------

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c;
  const auto parsed = parse_config(serialize_config(c));
  ASSERT_TRUE(parsed.ok()) << parsed.error_text();
  EXPECT_EQ(*parsed.config, c);
}

TEST(Config, NonDefaultValuesRoundTrip) {
  RunConfig c;
  c.dims = 2;
  c.nodes = {33, 17};
  c.initial.family = InitialFamily::ConstantNearBoundary;
  c.initial.amplitude = 0.1 + 0.2;  // not exactly representable in short decimal
  c.flow.eps = 1.0 / 3.0;
  c.flow.scheme = Scheme::Rk4Projected;
  c.flow.dt = 1e-5;
  c.flow.renormalize = Renormalize::On;
  c.eps_list = {0.2, 0.1, 0.0};
  c.output_dir = "results/run 1";
  c.keep_snapshots = false;
  const auto parsed = parse_config(serialize_config(c));
  ASSERT_TRUE(parsed.ok()) << parsed.error_text();
  EXPECT_EQ(*parsed.config, c);
}

TEST(Config, EmptyTextGivesDefaults) {
  const auto parsed = parse_config("# nothing but a comment\n\n");
  ASSERT_TRUE(parsed.ok());
  EXPECT_EQ(*parsed.config, RunConfig{});
}

TEST(Config, ReportsEveryErrorWithLineNumbers) {
  const std::string text =
      "[domain]\n"
      "dims = 2\n"
      "colour = blue\n"
      "[flow]\n"
      "eps = abc\n"
      "[bogus]\n"
      "dims = 1\n";
  const auto parsed = parse_config(text);
  ASSERT_FALSE(parsed.ok());
  ASSERT_EQ(parsed.errors.size(), 4u);
  EXPECT_EQ(parsed.errors[0].line, 3);
  EXPECT_EQ(parsed.errors[1].line, 5);
  EXPECT_EQ(parsed.errors[2].line, 6);
  EXPECT_EQ(parsed.errors[3].line, 7);
  EXPECT_NE(parsed.error_text().find("line 3: unknown key 'colour'"), std::string::npos);
}

TEST(Config, DuplicateAndOrphanKeys) {
  const auto dup = parse_config("[run]\nt_final = 1\nt_final = 2\n");
  ASSERT_FALSE(dup.ok());
  EXPECT_EQ(dup.errors[0].line, 3);
  EXPECT_NE(dup.errors[0].message.find("first set on line 2"), std::string::npos);
  const auto orphan = parse_config("dims = 1\n");
  ASSERT_FALSE(orphan.ok());
  EXPECT_EQ(orphan.errors[0].line, 1);
}

TEST(Config, SemanticErrorsPointAtTheOffendingLine) {
  const auto eps = parse_config("[run]\nt_final = 1\n[flow]\neps = 1.5\n");
  ASSERT_FALSE(eps.ok());
  EXPECT_EQ(eps.errors[0].line, 4);
  EXPECT_EQ(eps.errors[0].message, "eps must lie in [0,1]");

  const auto cfl = parse_config("[domain]\nnodes = 101\n[flow]\nscheme = rk4_projected\ndt = 1e-3\n");
  ASSERT_FALSE(cfl.ok());
  EXPECT_EQ(cfl.errors[0].line, 5);
  EXPECT_NE(cfl.errors[0].message.find("cfl_constant * h^2"), std::string::npos) << cfl.errors[0].message;
}

TEST(Config, MissingFileIsLineZero) {
  const auto r = load_config("/nonexistent/smflow.ini");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.errors[0].line, 0);
}

// --- time series -----------------------------------------------------------

InvariantRecord sample_record(double t) {
  InvariantRecord r;
  r.t = t;
  r.sphere_violation = 1e-16 * t;
  r.dirichlet_energy = 1.0 / 3.0 + t;
  r.q_value = -2.5e-7;
  r.sobolev = {1.0, std::nullopt, 3.0};
  r.boundary_flux_max = 0.1;
  return r;
}

TEST(Timeseries, HeaderOnlyForNoRecords) {
  EXPECT_EQ(format_timeseries({}), std::string(kTimeseriesHeader) + "\n");
  EXPECT_TRUE(parse_timeseries(format_timeseries({})).empty());
}

TEST(Timeseries, EmptyCellsForAbsentValues) {
  const std::string text = format_timeseries({sample_record(0.0)});
  const std::string row = text.substr(text.find('\n') + 1);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 9);
  EXPECT_NE(row.find(",,"), std::string::npos);
}

TEST(Timeseries, RoundTripIsExactAndSorted) {
  const std::vector<InvariantRecord> recs{sample_record(0.2), sample_record(0.0), sample_record(0.1)};
  const std::string text = format_timeseries(recs);
  const auto back = parse_timeseries(text);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0], recs[1]);
  EXPECT_EQ(back[1], recs[2]);
  EXPECT_EQ(back[2], recs[0]);
  EXPECT_EQ(format_timeseries(back), text);
}

TEST(Timeseries, RejectsMalformedInput) {
  EXPECT_THROW(parse_timeseries("t,energy\n"), IoError);
  EXPECT_THROW(parse_timeseries(std::string(kTimeseriesHeader) + "\n1,2,3\n"), IoError);
  EXPECT_THROW(parse_timeseries(std::string(kTimeseriesHeader) + "\nx,0,0,,,,,,0,\n"), IoError);
}

TEST(Timeseries, FileRoundTrip) {
  const auto dir = scratch_dir("ts");
  const std::vector<InvariantRecord> recs{sample_record(0.5)};
  write_timeseries((dir / "a.csv").string(), recs);
  EXPECT_EQ(read_timeseries((dir / "a.csv").string()), recs);
  EXPECT_THROW(read_timeseries((dir / "missing.csv").string()), IoError);
}

TEST(FormatReal, RoundTripsDoubles) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = d(rng) * std::pow(10.0, i % 40 - 20);
    EXPECT_EQ(std::stod(format_real(v)), v);
  }
}

// --- snapshots -------------------------------------------------------------

TEST(Snapshot, BitExactRoundTrip) {
  std::mt19937_64 rng(37);
  for (int d = 1; d <= 3; ++d) {
    const auto u = testing::random_sphere_field(BoxGrid(d, 5), rng);
    const std::string bytes = encode_snapshot(u);
    EXPECT_EQ(bytes.substr(0, 4), "SPF1");
    const auto snap = decode_snapshot(bytes);
    EXPECT_EQ(snap.field, u);
    EXPECT_FALSE(snap.warning.has_value());
    EXPECT_EQ(encode_snapshot(snap.field), bytes);
  }
}

TEST(Snapshot, LittleEndianLayout) {
  const VectorField u(BoxGrid(1, 3), Vec3{0, 0, 1});
  const std::string bytes = encode_snapshot(u);
  ASSERT_EQ(bytes.size(), 4u + 4u + 4u + 3u * 24u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3u);
  // 1.0 = 0x3FF0000000000000, most significant byte last
  EXPECT_EQ(static_cast<unsigned char>(bytes[12 + 16 + 7]), 0x3Fu);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12 + 16 + 6]), 0xF0u);
}

TEST(Snapshot, ShapeErrors) {
  const std::string bytes = encode_snapshot(VectorField(BoxGrid(2, 4), Vec3{1, 0, 0}));
  try {
    (void)decode_snapshot(bytes.substr(0, bytes.size() - 8));
    FAIL() << "truncated snapshot accepted";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("shape error"), std::string::npos);
  }
  EXPECT_THROW(decode_snapshot(bytes.substr(0, 10)), IoError);
  EXPECT_THROW(decode_snapshot("SPF2" + bytes.substr(4)), IoError);
}

TEST(Snapshot, OffSphereValuesWarnAndOptionallyRenormalize) {
  const VectorField u(BoxGrid(1, 4), Vec3{0, 0, 2});
  const auto kept = decode_snapshot(encode_snapshot(u));
  ASSERT_TRUE(kept.warning.has_value());
  EXPECT_EQ(kept.field, u);
  SnapshotReadOptions opt;
  opt.renormalize = true;
  const auto fixed = decode_snapshot(encode_snapshot(u), opt);
  EXPECT_TRUE(fixed.warning.has_value());
  EXPECT_EQ(sphere_violation(fixed.field), 0.0);
}

TEST(Snapshot, FileErrorsNameThePath) {
  const auto dir = scratch_dir("snap");
  const std::string path = (dir / "bad.spf").string();
  write_text_file(path, "SPF1");
  try {
    (void)read_snapshot(path);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_EQ(std::string(e.what()).rfind(path, 0), 0u);
  }
}

// --- reports and manifests -------------------------------------------------

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(CompatJson, DeterministicAndParsesBack) {
  const auto u = testing::Geodesic{1.0}.sample(BoxGrid(1, 33));
  const std::vector<CompatReport> reps{check_cc0(u), check_cc1_intrinsic(u)};
  const std::string a = compat_report_json(reps);
  EXPECT_EQ(a, compat_report_json(reps));
  EXPECT_NE(a.find("\"CC0\""), std::string::npos);
  EXPECT_NE(a.find("\"pass\": false"), std::string::npos);
}

TEST(Manifest, FormatParseRoundTrip) {
  RunManifest m = make_manifest("[run]\nt_final = 1\n");
  m.wall_clock_seconds = 1.25;
  m.checksums["a.csv"] = sha256_hex("a");
  m.checksums["final.spf"] = sha256_hex("b");
  EXPECT_FALSE(m.version.empty());
  EXPECT_FALSE(m.platform.empty());
  const RunManifest back = parse_manifest(format_manifest(m));
  EXPECT_EQ(back.config_text, m.config_text);
  EXPECT_EQ(back.version, m.version);
  EXPECT_EQ(back.platform, m.platform);
  EXPECT_EQ(back.wall_clock_seconds, m.wall_clock_seconds);
  EXPECT_EQ(back.checksums, m.checksums);
  EXPECT_THROW(parse_manifest("not a manifest\n"), IoError);
}

// --- command line ----------------------------------------------------------

std::string write_config(const fs::path& dir, const std::string& text) {
  const std::string path = (dir / "run.ini").string();
  write_text_file(path, text);
  return path;
}

const char* kSmallRun =
    "[domain]\nnodes = 33\n[flow]\ndt = 1e-3\n[run]\nt_final = 0.01\nmonitor_stride = 5\n";

TEST(Cli, NoSubcommandIsUsageError) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitPass);
}

TEST(Cli, SimulateWritesOutputsDeterministically) {
  const auto dir = scratch_dir("cli_sim");
  const auto cfg = write_config(dir, kSmallRun);
  std::vector<std::string> sums;
  for (const char* sub : {"a", "b"}) {
    const auto out = (dir / sub).string();
    const auto r = cli({"simulate", "--config", cfg, "--out", out, "--quiet"});
    ASSERT_EQ(r.code, kExitPass) << r.err;
    EXPECT_TRUE(r.out.empty());
    for (const char* f : {"compat.json", "initial.spf", "timeseries.csv", "final.spf", "manifest.txt"})
      EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
    sums.push_back(sha256_file((fs::path(out) / "final.spf").string()) +
                   sha256_file((fs::path(out) / "timeseries.csv").string()));
    const auto m = parse_manifest(read_text_file((fs::path(out) / "manifest.txt").string()));
    EXPECT_EQ(m.checksums.at("final.spf"), sha256_file((fs::path(out) / "final.spf").string()));
  }
  EXPECT_EQ(sums[0], sums[1]);
}

TEST(Cli, InvalidConfigExitsWithUsageAndLineNumbers) {
  const auto dir = scratch_dir("cli_bad");
  const auto cfg = write_config(dir, "[flow]\neps = 3\n");
  const auto r = cli({"simulate", "--config", cfg, "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("line 2: eps must lie in [0,1]"), std::string::npos) << r.err;
  EXPECT_EQ(cli({"simulate", "--config", (dir / "missing.ini").string()}).code, kExitUsage);
}

TEST(Cli, CheckCompatVerdicts) {
  const auto dir = scratch_dir("cli_cc");
  const auto good = write_config(dir, "[domain]\nnodes = 129\n");
  EXPECT_EQ(cli({"check-compat", "--config", good, "--out", (dir / "g").string(), "--quiet"}).code, kExitPass);
  const auto bad = write_config(dir, "[domain]\nnodes = 129\n[initial]\nfamily = geodesic\n");
  const auto r = cli({"check-compat", "--config", bad, "--out", (dir / "b").string()});
  EXPECT_EQ(r.code, kExitFail);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "b" / "compat.json"));
}

TEST(Cli, SimulateWarnsOnIncompatibleData) {
  const auto dir = scratch_dir("cli_warn");
  const auto cfg = write_config(dir, std::string(kSmallRun) + "[initial]\nfamily = geodesic\n");
  const auto r = cli({"simulate", "--config", cfg, "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitPass);
  EXPECT_NE(r.out.find("fails CC0"), std::string::npos);
}

TEST(Cli, LongrunRejectsDampedConfig) {
  const auto dir = scratch_dir("cli_long");
  const auto cfg = write_config(dir, "[flow]\neps = 0.1\n");
  const auto r = cli({"longrun", "--config", cfg, "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("longrun requires eps = 0"), std::string::npos);
}

}  // namespace
}  // namespace smflow

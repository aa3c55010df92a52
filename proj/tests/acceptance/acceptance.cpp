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

// Desk-scale acceptance run. Prints one line per criterion and exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "smflow/cli.hpp"
#include "smflow/experiments.hpp"
#include "smflow/serialization.hpp"

namespace {

using namespace smflow;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Reporter {
 public:
  void report(int n, const Verdict& v) {
    std::printf("criterion %d: %s  %s\n", n, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    all_ = all_ && v.pass;
  }
  bool all() const { return all_; }

 private:
  bool all_ = true;
};

template <class... Args>
std::string str(const Args&... args) {
  std::ostringstream s;
  s.precision(4);
  (s << ... << args);
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

InitialDataSpec cosine_profile(double alpha) {
  InitialDataSpec s;
  s.family = InitialFamily::MirrorSymmetricProfile;
  s.amplitudes = {alpha};
  return s;
}

FlowParams midpoint(double dt, double eps = 0.0) {
  FlowParams p;
  p.dt = dt;
  p.eps = eps;
  return p;
}

// Reference trajectory for criteria 1-4: theta = 0.5 cos(pi x), eps = 0, T = 1.
struct Reference {
  SphereField u0;
  Trajectory traj;
  double max_sphere = 0.0;
  double energy_drift = 0.0;
  double q0 = 0.0;
  double q_drift = 0.0;
  double max_h2_residual = 0.0;
};

Reference reference_run(int nodes, double dt) {
  const SphereField u0 = generate_initial_data(cosine_profile(0.5), BoxGrid(1, nodes));
  AdvanceOptions opt;
  opt.monitor_stride = static_cast<std::size_t>(std::lround(0.01 / dt));
  opt.sobolev = false;
  Reference r{u0, advance({0.0, u0, 0}, midpoint(dt), 1.0, opt)};
  const auto& first = r.traj.samples.front().record;
  r.q0 = *first.q_value;
  for (const auto& s : r.traj.samples) {
    const auto& rec = s.record;
    r.max_sphere = std::max(r.max_sphere, rec.sphere_violation);
    r.energy_drift = std::max(r.energy_drift, relative_drift(first.dirichlet_energy, rec.dirichlet_energy));
    r.q_drift = std::max(r.q_drift, std::fabs(*rec.q_value - r.q0) / std::max(std::fabs(r.q0), 1e-12));
    r.max_h2_residual = std::max(r.max_h2_residual, *rec.h2_identity_residual);
  }
  return r;
}

// --- 5: dissipativity --------------------------------------------------------

struct DissipationCheck {
  bool monotone = true;
  double rate_mismatch = 0.0;
};

DissipationCheck dissipation(int nodes, double dt) {
  const SphereField u0 = generate_initial_data(cosine_profile(0.5), BoxGrid(1, nodes));
  const FlowParams p = midpoint(dt, 0.1);
  const auto target = static_cast<std::size_t>(std::lround(0.25 / dt));
  std::vector<SphereField> around;  // fields at steps target-1, target, target+1
  AdvanceOptions opt;
  opt.monitor_stride = static_cast<std::size_t>(std::lround(0.01 / dt));
  opt.sobolev = false;
  opt.on_step = [&](const FlowState& s) {
    if (s.step_count + 1 >= target && s.step_count <= target + 1) around.push_back(s.u);
    return true;
  };
  const Trajectory t = advance({0.0, u0, 0}, p, 1.0, opt);
  DissipationCheck out;
  out.monotone = !t.failed;
  for (std::size_t i = 1; i < t.samples.size(); ++i)
    if (t.samples[i].record.dirichlet_energy > t.samples[i - 1].record.dirichlet_energy + 1e-10) out.monotone = false;
  if (around.size() != 3) return {false, INFINITY};
  const double centred = (dirichlet_energy(around[2]) - dirichlet_energy(around[0])) / (2.0 * dt);
  const double predicted = eps_dissipation_rate(around[1], 0.1);
  out.rate_mismatch = std::fabs(centred - predicted) / std::fabs(predicted);
  return out;
}

// --- 7: compatibility ----------------------------------------------------------

double max_scaled_over(const std::vector<CompatReport>& reps) {
  double m = 0.0;
  for (const auto& r : reps) m = std::max(m, r.max_scaled_residual);
  return m;
}

std::vector<CompatReport> all_checks(const SphereField& u, int k) {
  std::vector<CompatReport> out{check_cc0(u), check_cc1_intrinsic(u), check_cc_strong(u, k)};
  if (u.grid().dims() == 1) out.push_back(check_cc_tilde(u, k));
  return out;
}

Verdict compatibility() {
  std::ostringstream detail;
  bool pass = true;

  // (a) constant near the boundary: every residual is at rounding level.
  {
    InitialDataSpec s;
    s.family = InitialFamily::ConstantNearBoundary;
    s.amplitude = 1.2;
    s.mode_count = 1;
    double worst = 0.0;
    bool all_pass = true;
    for (int d = 1; d <= 2; ++d) {
      const auto reps = all_checks(generate_initial_data(s, BoxGrid(d, d == 1 ? 257 : 65)), 2);
      for (const auto& r : reps) all_pass = all_pass && r.pass;
      worst = std::max(worst, max_scaled_over(reps));
    }
    const bool ok = all_pass && worst <= 1e-12;
    pass = pass && ok;
    detail << "(a) " << (ok ? "ok" : "FAIL") << " max=" << worst << "; ";
  }

  // (b) mirror-symmetric data: passes, and each residual level converges.
  {
    const std::vector<int> grid{33, 65, 129, 257};
    std::vector<std::vector<CompatReport>> by_grid;
    bool all_pass = true;
    for (int n : grid) {
      by_grid.push_back(all_checks(generate_initial_data(cosine_profile(0.5), BoxGrid(1, n)), 2));
      for (const auto& r : by_grid.back()) all_pass = all_pass && r.pass;
    }
    double min_order = INFINITY;
    for (std::size_t c = 0; c < by_grid.front().size(); ++c)
      for (int level : {1, 3, 5})
        for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
          const double coarse = by_grid[g][c].max_raw(level);
          const double fine = by_grid[g + 1][c].max_raw(level);
          if (coarse <= 1e-12) continue;  // nothing to converge
          min_order = std::min(min_order, observed_order(coarse, fine).value_or(INFINITY));
        }
    const bool ok = all_pass && min_order >= 1.5;
    pass = pass && ok;
    detail << "(b) " << (ok ? "ok" : "FAIL") << " min order=" << min_order << "; ";
  }

  // (c) geodesic: O(1) failure at the first level.
  {
    InitialDataSpec s;
    s.family = InitialFamily::Geodesic;
    s.omega = 1.0;
    const auto u = generate_initial_data(s, BoxGrid(1, 257));
    const auto cc0 = check_cc0(u);
    const auto tilde = check_cc_tilde(u, 0);
    const bool ok = !cc0.pass && !tilde.pass && cc0.max_raw(1) > 0.5 && tilde.max_raw(1) > 0.5;
    pass = pass && ok;
    detail << "(c) " << (ok ? "ok" : "FAIL") << " raw=" << cc0.max_raw(1) << "; ";
  }

  // (d) strong implies tilde on generated admissible data.
  {
    std::mt19937_64 rng(20240611);
    int held = 0, strong_passed = 0;
    for (int i = 0; i < 100; ++i) {
      const auto u = generate_initial_data(random_admissible_spec(rng), BoxGrid(1, 129));
      const int k = i % 3;
      const auto rep = implication_check(u, k);
      held += rep.holds;
      strong_passed += rep.strong.pass;
    }
    const bool ok = held == 100;
    pass = pass && ok;
    detail << "(d) " << (ok ? "ok" : "FAIL") << " " << held << "/100 (strong passed " << strong_passed << ")";
  }
  return {pass, detail.str()};
}

// --- 10: determinism -----------------------------------------------------------

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "smflow_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string cfg = (root / "run.ini").string();
  write_text_file(cfg, "[domain]\nnodes = 128\n[flow]\ndt = 1e-4\n[run]\nt_final = 0.1\n");

  std::vector<std::map<std::string, std::string>> sums;
  for (const char* sub : {"a", "b"}) {
    const std::string out = (root / sub).string();
    const std::vector<std::string> args{"smflow", "simulate", "--config", cfg, "--out", out, "--quiet"};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    if (run_cli(static_cast<int>(argv.size()), argv.data(), o, e) != kExitPass)
      return {false, "simulate failed: " + e.str()};
    sums.push_back(parse_manifest(read_text_file((fs::path(out) / "manifest.txt").string())).checksums);
  }
  const bool same = !sums[0].empty() && sums[0] == sums[1];

  const auto snap = read_snapshot((root / "a" / "final.spf").string());
  const std::string again = (root / "again.spf").string();
  write_snapshot(again, snap.field);
  const bool bit_exact = read_text_file(again) == read_text_file((root / "a" / "final.spf").string()) &&
                         read_snapshot(again).field == snap.field;
  return {same && bit_exact, str(sums[0].size(), " checksums ", same ? "identical" : "DIFFER",
                                 "; snapshot round trip ", bit_exact ? "bit-exact" : "MISMATCH")};
}

}  // namespace

int main() {
  Reporter rep;
  const auto wall = std::chrono::steady_clock::now();

  // 1-4 share the reference run; 8 is independent and slow, so start it now.
  auto long_runs = std::async(std::launch::async, [] {
    std::vector<std::future<std::pair<LongRunResult, double>>> runs;
    for (double alpha : {0.5, 1.5})
      runs.push_back(std::async(std::launch::async, [alpha] {
        const auto start = std::chrono::steady_clock::now();
        const auto u0 = generate_initial_data(cosine_profile(alpha), BoxGrid(1, 256));
        LongRunOptions opt;
        auto r = global_existence_proxy(u0, midpoint(1e-4), opt);
        return std::make_pair(std::move(r), seconds_since(start));
      }));
    std::vector<std::pair<LongRunResult, double>> out;
    for (auto& f : runs) out.push_back(f.get());
    return out;
  });

  auto fine_future = std::async(std::launch::async, [] { return reference_run(511, 2.5e-5); });
  const Reference coarse = reference_run(256, 1e-4);
  const Reference fine = fine_future.get();
  const bool runs_ok = !coarse.traj.failed && !fine.traj.failed;

  rep.report(1, {runs_ok && coarse.max_sphere <= 1e-8 && !renormalizes(midpoint(1e-4)),
                 str("max sphere violation ", coarse.max_sphere, " (renormalization off)")});

  const double e_ratio = coarse.energy_drift / fine.energy_drift;
  rep.report(2, {runs_ok && coarse.energy_drift <= 1e-6 && e_ratio >= 3.5,
                 str("energy drift ", coarse.energy_drift, ", refined ", fine.energy_drift, ", ratio ", e_ratio)});

  const double q_order = std::log2(coarse.q_drift / fine.q_drift);
  rep.report(3, {runs_ok && coarse.q_drift <= 1e-3 && q_order >= 1.8,
                 str("Q drift ", coarse.q_drift, ", refined ", fine.q_drift, ", order ", q_order)});

  const double h2_bound = 1e-3 * (1.0 + std::fabs(coarse.q0));
  rep.report(4, {runs_ok && coarse.max_h2_residual <= h2_bound,
                 str("max H2-identity residual ", coarse.max_h2_residual, " vs ", h2_bound)});

  {
    DissipationCheck d = dissipation(256, 1e-4);
    std::string where = "N=256";
    if (d.monotone && d.rate_mismatch > 0.05) {
      d = dissipation(512, 2.5e-5);
      where = "N=512";
    }
    rep.report(5, {d.monotone && d.rate_mismatch <= 0.05,
                   str(where, " energy ", d.monotone ? "nonincreasing" : "INCREASES", ", rate mismatch ",
                       100.0 * d.rate_mismatch, "%")});
  }

  {
    SweepPlan plan;
    plan.grid = BoxGrid(1, 256);
    plan.t_final = 0.25;
    plan.params = midpoint(1e-4);
    plan.initial = cosine_profile(0.5);
    const SweepResult r = viscosity_sweep(plan);
    const auto d1 = r.distance_for(0.1), d2 = r.distance_for(0.05);
    const double ratio = d1 && d2 ? *d2 / *d1 : NAN;
    bool strictly = !r.failed;
    for (std::size_t i = 0; i + 2 < r.runs.size(); ++i)
      strictly = strictly && r.runs[i + 1].distance && *r.runs[i + 1].distance < *r.runs[i].distance;
    std::ostringstream orders;
    for (const auto& o : r.orders) orders << ' ' << (o ? str(*o) : "n/a");
    rep.report(6, {strictly && ratio >= 0.35 && ratio <= 0.65,
                   str("d(0.05)/d(0.1) = ", ratio, ", monotone ", strictly ? "yes" : "NO", ", orders", orders.str())});
  }

  rep.report(7, compatibility());

  {
    const auto results = long_runs.get();
    bool pass = true;
    std::ostringstream detail;
    const double alphas[] = {0.5, 1.5};
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& [r, secs] = results[i];
      const bool ok = r.pass && r.flatness <= 1.05 && secs <= 300.0;
      pass = pass && ok;
      detail << "alpha=" << alphas[i] << ": flatness " << r.flatness << ", sup ratio " << r.sup_ratio << ", "
             << secs << " s" << (ok ? "" : " FAIL") << (i + 1 < results.size() ? "; " : "");
    }
    rep.report(8, {pass, detail.str()});
  }

  {
    FlowParams rk = midpoint(1e-5);
    rk.scheme = Scheme::Rk4Projected;
    rk.override_cfl = true;  // dt = 1e-5 exceeds 0.25 h^2 at N = 256
    AdvanceOptions quiet;
    quiet.monitor_stride = 1000000;
    quiet.sobolev = false;
    auto rk_future = std::async(std::launch::async, [&] { return advance({0.0, coarse.u0, 0}, rk, 1.0, quiet); });
    const Trajectory rk_traj = rk_future.get();
    const double d = rk_traj.failed ? INFINITY : l2_distance(rk_traj.final_state.u, coarse.traj.final_state.u);
    rep.report(9, {d <= 1e-5, str("L2 distance RK4 vs midpoint at T=1: ", d)});
  }

  rep.report(10, determinism());

  std::printf("acceptance: %s (%.1f s)\n", rep.all() ? "ALL PASS" : "FAILURES", seconds_since(wall));
  return rep.all() ? 0 : 1;
}

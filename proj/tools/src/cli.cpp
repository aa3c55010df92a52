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

#include "smflow/cli.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smflow/config.hpp"
#include "smflow/experiments.hpp"
#include "smflow/serialization.hpp"

namespace smflow {
namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  bool quiet = false;
};

/// Collects written files so the manifest can checksum them.
class OutputDir {
 public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& content) {
    write_text_file((dir_ / name).string(), content);
    files_.push_back(name);
  }
  void snapshot(const std::string& name, const SphereField& u) {
    write_snapshot((dir_ / name).string(), u);
    files_.push_back(name);
  }
  void manifest(const RunConfig& cfg, double seconds) {
    RunManifest m = make_manifest(serialize_config(cfg));
    m.wall_clock_seconds = seconds;
    for (const auto& f : files_) m.checksums[f] = sha256_file((dir_ / f).string());
    write_text_file((dir_ / "manifest.txt").string(), format_manifest(m));
  }
  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

class Reporter {
 public:
  Reporter(std::ostream& out, bool quiet) : out_(out), quiet_(quiet) {}
  template <class... Args>
  void line(const Args&... args) {
    if (quiet_) return;
    (out_ << ... << args);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  bool quiet_;
};

std::string csv_cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::string join_reals(const std::vector<std::optional<double>>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += csv_cell(cells[i]);
  }
  return row + '\n';
}

std::vector<InvariantRecord> records_of(const Trajectory& t) {
  std::vector<InvariantRecord> out;
  for (const auto& s : t.samples) out.push_back(s.record);
  return out;
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

// --- subcommands -----------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, OutputDir& dir, Reporter& rep) {
  const SphereField u0 = generate_initial_data(cfg.initial, cfg.grid());
  CompatOptions copt;
  copt.c0 = cfg.compat_c0;
  const CompatReport cc0 = check_cc0(u0, copt);
  dir.text("compat.json", compat_report_json({cc0}));
  if (!cc0.pass)
    rep.line("warning: initial data fails CC0 (max residual ", cc0.max_scaled_residual, " > ", cc0.tolerance_used,
             "); simulating anyway");
  if (cfg.keep_snapshots) dir.snapshot("initial.spf", u0);

  AdvanceOptions opt;
  opt.monitor_stride = cfg.monitor_stride;
  const Trajectory traj = advance(FlowState{0.0, u0, 0}, cfg.flow, cfg.t_final, opt);
  dir.text("timeseries.csv", format_timeseries(records_of(traj)));
  if (cfg.keep_snapshots) dir.snapshot("final.spf", traj.final_state.u);

  rep.line("simulate: t=", traj.final_state.t, " steps=", traj.final_state.step_count,
           " max_iterations=", traj.max_iterations);
  if (traj.failed) {
    rep.line("simulate: run failed: ", traj.failure);
    return kExitFail;
  }
  return kExitPass;
}

int cmd_check_compat(const RunConfig& cfg, OutputDir& dir, Reporter& rep) {
  const SphereField u0 = generate_initial_data(cfg.initial, cfg.grid());
  CompatOptions copt;
  copt.c0 = cfg.compat_c0;
  std::vector<CompatReport> reports{check_cc0(u0, copt), check_cc1_intrinsic(u0, copt),
                                    check_cc_strong(u0, cfg.compat_order, copt)};
  if (cfg.dims == 1) reports.push_back(check_cc_tilde(u0, cfg.compat_order, copt));
  dir.text("compat.json", compat_report_json(reports));
  bool all = true;
  for (const auto& r : reports) {
    all = all && r.pass;
    rep.line(to_string(r.condition), "(", r.order, "): ", verdict(r.pass), " max_scaled=", r.max_scaled_residual,
             " tol=", r.tolerance_used);
  }
  rep.line("check-compat: ", verdict(all));
  return all ? kExitPass : kExitFail;
}

int cmd_sweep(const RunConfig& cfg, OutputDir& dir, Reporter& rep) {
  SweepPlan plan;
  plan.eps_list = cfg.eps_list;
  plan.grid = cfg.grid();
  plan.t_final = cfg.t_final;
  plan.params = cfg.flow;
  plan.initial = cfg.initial;
  plan.monitor_stride = cfg.monitor_stride;
  plan.concurrent = cfg.sweep_concurrent;
  const SweepResult r = viscosity_sweep(plan);

  std::string table = "eps,distance,order\n";
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const auto& run = r.runs[i];
    std::optional<double> order = i < r.orders.size() ? r.orders[i] : std::nullopt;
    table += join_reals({run.eps, run.distance, order});
    dir.text("timeseries_" + std::to_string(i) + ".csv", format_timeseries(records_of(run.trajectory)));
    rep.line("eps=", run.eps, " d=", run.distance ? format_real(*run.distance) : std::string("n/a"),
             run.trajectory.failed ? " (failed)" : "");
  }
  dir.text("sweep.csv", table);
  const bool pass = !r.failed && r.monotone();
  if (r.failed) rep.line("sweep-eps: ", r.failure);
  rep.line("sweep-eps: ", verdict(pass));
  return pass ? kExitPass : kExitFail;
}

int cmd_converge(const RunConfig& cfg, OutputDir& dir, Reporter& rep) {
  ConvergencePlan plan;
  plan.nodes_list = cfg.nodes_list;
  plan.reference_nodes = cfg.reference_nodes;
  plan.dims = cfg.dims;
  plan.t_final = cfg.t_final;
  plan.dt0 = cfg.dt0;
  plan.params = cfg.flow;
  plan.initial = cfg.initial;
  const ConvergenceResult r = mesh_convergence(plan);
  if (r.failed) {
    rep.line("converge: ", r.failure);
    return kExitFail;
  }
  std::string table = "nodes,dt,field_error,energy_drift,q_drift,field_order,energy_order,q_order\n";
  bool pass = true;
  auto at = [](const std::vector<std::optional<double>>& v, std::size_t i) {
    return i > 0 && i - 1 < v.size() ? v[i - 1] : std::nullopt;
  };
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    const auto& l = r.levels[i];
    const auto fo = at(r.field_orders, i), eo = at(r.energy_orders, i), qo = at(r.q_orders, i);
    table += join_reals({double(l.nodes), l.dt, l.field_error, l.energy_drift, l.q_drift, fo, eo, qo});
    for (const auto& o : {fo, eo, qo})
      if (o && *o < cfg.min_order) pass = false;
    rep.line("N=", l.nodes, " field_error=", l.field_error, " field_order=", fo ? format_real(*fo) : "undefined");
  }
  dir.text("convergence.csv", table);
  rep.line("converge: ", verdict(pass));
  return pass ? kExitPass : kExitFail;
}

int cmd_longrun(const RunConfig& cfg, OutputDir& dir, Reporter& rep) {
  const SphereField u0 = generate_initial_data(cfg.initial, cfg.grid());
  LongRunOptions opt;
  opt.t_long = cfg.t_long;
  opt.record_stride = cfg.record_stride;
  opt.bound_constant = cfg.bound_constant;
  opt.flat_window = cfg.flat_window;
  const LongRunResult r = global_existence_proxy(u0, cfg.flow, opt);
  std::string table = "t,h1,h2,h3,kinetic,kinetic_gradient\n";
  for (const auto& x : r.history) table += join_reals({x.t, x.h1, x.h2, x.h3, x.kinetic, x.kinetic_gradient});
  dir.text("longrun.csv", table);
  rep.line("longrun: ", r.diagnostics);
  rep.line("longrun: H2 flatness sup/early = ", r.flatness);
  rep.line("longrun: ", verdict(r.pass));
  return r.pass ? kExitPass : kExitFail;
}

using Command = std::function<int(const RunConfig&, OutputDir&, Reporter&)>;

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schrodinger map / LLG flow simulator and compatibility checker", "smflow"};
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    Experiment experiment;
    Command run;
  };
  const std::vector<Entry> entries{
      {"simulate", "advance one trajectory and record invariants", Experiment::Simulate, cmd_simulate},
      {"check-compat", "evaluate the boundary compatibility conditions of the initial data", Experiment::CheckCompat,
       cmd_check_compat},
      {"sweep-eps", "vanishing-damping sweep against the eps = 0 flow", Experiment::SweepEps, cmd_sweep},
      {"converge", "mesh-convergence study on nested grids", Experiment::Converge, cmd_converge},
      {"longrun", "long-time 1D run with bounded-norm verdict", Experiment::Longrun, cmd_longrun},
  };

  CommonFlags flags;
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", flags.config_path, "configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out_dir, "output directory (overrides run.output_dir)");
    sub->add_flag("--quiet", flags.quiet, "suppress progress output");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  const Entry& entry = entries[which];

  RunConfig cfg;
  std::string config_text;
  if (!flags.config_path.empty()) {
    const ConfigParseResult parsed = load_config(flags.config_path);
    if (!parsed.ok()) {
      err << flags.config_path << ": invalid configuration\n" << parsed.error_text();
      return kExitUsage;
    }
    cfg = *parsed.config;
  }
  cfg.experiment = entry.experiment;
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (const auto problems = validate_config(cfg); !problems.empty()) {
    err << "invalid configuration for " << entry.name << ":\n";
    for (const auto& p : problems) err << "  " << p << '\n';
    return kExitUsage;
  }

  Reporter rep(out, flags.quiet);
  const auto start = std::chrono::steady_clock::now();
  try {
    OutputDir dir(cfg.output_dir);
    const int code = entry.run(cfg, dir, rep);
    dir.manifest(cfg, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return code;
  } catch (const InvalidArgument& e) {
    err << entry.name << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << entry.name << ": " << e.what() << '\n';
    return kExitFail;
  }
}

}  // namespace smflow

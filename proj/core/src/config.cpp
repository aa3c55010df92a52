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

#include "smflow/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "smflow/experiments.hpp"

namespace smflow {

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Simulate:
      return "simulate";
    case Experiment::CheckCompat:
      return "check-compat";
    case Experiment::SweepEps:
      return "sweep-eps";
    case Experiment::Converge:
      return "converge";
    case Experiment::Longrun:
      return "longrun";
  }
  return "?";
}

const char* to_string(Scheme s) { return s == Scheme::Rk4Projected ? "rk4_projected" : "implicit_midpoint"; }

const char* to_string(Renormalize r) {
  switch (r) {
    case Renormalize::Auto:
      return "auto";
    case Renormalize::On:
      return "on";
    case Renormalize::Off:
      return "off";
  }
  return "?";
}

BoxGrid RunConfig::grid() const {
  if (nodes.size() == 1) return BoxGrid(dims, nodes.front());
  if (static_cast<int>(nodes.size()) != dims) throw InvalidArgument("nodes must list one count or one per axis");
  return BoxGrid(nodes);
}

std::string ConfigParseResult::error_text() const {
  std::ostringstream s;
  for (const auto& e : errors) s << "line " << e.line << ": " << e.message << '\n';
  return s.str();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto c = s.find(',');
    out.push_back(trim(s.substr(0, c)));
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>)
      out += format_number(xs[i]);
    else
      out += std::to_string(xs[i]);
  }
  return out;
}

using Setter = std::function<std::optional<std::string>(RunConfig&, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct KeySpec {
  std::string section;
  std::string name;
  Setter set;
  Getter get;
};

template <class Ref>
KeySpec real_key(std::string section, std::string name, Ref ref) {
  auto get = [ref](const RunConfig& c) { return format_number(ref(c)); };
  auto set = [ref, name](RunConfig& c, std::string_view v) -> std::optional<std::string> {
    const auto x = parse_number<double>(v);
    if (!x) return "expected a real number for '" + name + "'";
    ref(c) = *x;
    return std::nullopt;
  };
  return {std::move(section), std::move(name), set, get};
}

template <class I, class Ref>
KeySpec integer_key(std::string section, std::string name, Ref ref) {
  auto get = [ref](const RunConfig& c) { return std::to_string(ref(c)); };
  auto set = [ref, name](RunConfig& c, std::string_view v) -> std::optional<std::string> {
    const auto x = parse_number<I>(v);
    if (!x) return "expected an integer for '" + name + "'";
    ref(c) = *x;
    return std::nullopt;
  };
  return {std::move(section), std::move(name), set, get};
}

template <class Ref>
KeySpec bool_key(std::string section, std::string name, Ref ref) {
  auto get = [ref](const RunConfig& c) { return std::string(ref(c) ? "true" : "false"); };
  auto set = [ref, name](RunConfig& c, std::string_view v) -> std::optional<std::string> {
    if (v == "true") {
      ref(c) = true;
    } else if (v == "false") {
      ref(c) = false;
    } else {
      return "expected true or false for '" + name + "'";
    }
    return std::nullopt;
  };
  return {std::move(section), std::move(name), set, get};
}

template <class T, class Ref>
KeySpec list_key(std::string section, std::string name, Ref ref) {
  auto get = [ref](const RunConfig& c) { return join(ref(c)); };
  auto set = [ref, name](RunConfig& c, std::string_view v) -> std::optional<std::string> {
    std::vector<T> out;
    for (auto item : split_list(v)) {
      const auto x = parse_number<T>(item);
      if (!x) return "malformed list entry '" + std::string(item) + "' for '" + name + "'";
      out.push_back(*x);
    }
    ref(c) = std::move(out);
    return std::nullopt;
  };
  return {std::move(section), std::move(name), set, get};
}

template <class E, class Ref>
KeySpec enum_key(std::string section, std::string name, Ref ref, std::vector<E> values) {
  auto get = [ref](const RunConfig& c) { return std::string(to_string(ref(c))); };
  auto set = [ref, name, values](RunConfig& c, std::string_view v) -> std::optional<std::string> {
    std::string options;
    for (E e : values) {
      if (v == to_string(e)) {
        ref(c) = e;
        return std::nullopt;
      }
      options += options.empty() ? "" : ", ";
      options += to_string(e);
    }
    return "unknown value '" + std::string(v) + "' for '" + name + "' (expected one of: " + options + ")";
  };
  return {std::move(section), std::move(name), set, get};
}

// Accessor usable on both const and mutable configs.
#define SMFLOW_REF(field) [](auto& c) -> auto& { return c.field; }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back(integer_key<int>("domain", "dims", SMFLOW_REF(dims)));
    t.push_back(list_key<int>("domain", "nodes", SMFLOW_REF(nodes)));

    t.push_back(enum_key<InitialFamily>(
        "initial", "family", SMFLOW_REF(initial.family),
        {InitialFamily::ConstantNearBoundary, InitialFamily::MirrorSymmetricProfile, InitialFamily::Geodesic}));
    t.push_back(list_key<double>("initial", "amplitudes", SMFLOW_REF(initial.amplitudes)));
    t.push_back(real_key("initial", "amplitude", SMFLOW_REF(initial.amplitude)));
    t.push_back(real_key("initial", "blend_width", SMFLOW_REF(initial.blend_width)));
    t.push_back(integer_key<int>("initial", "mode_count", SMFLOW_REF(initial.mode_count)));
    t.push_back(real_key("initial", "omega", SMFLOW_REF(initial.omega)));

    t.push_back(real_key("flow", "eps", SMFLOW_REF(flow.eps)));
    t.push_back(enum_key<Scheme>("flow", "scheme", SMFLOW_REF(flow.scheme),
                                 {Scheme::Rk4Projected, Scheme::ImplicitMidpoint}));
    t.push_back(real_key("flow", "dt", SMFLOW_REF(flow.dt)));
    t.push_back(real_key("flow", "fp_tol", SMFLOW_REF(flow.fp_tol)));
    t.push_back(integer_key<int>("flow", "fp_max_iters", SMFLOW_REF(flow.fp_max_iters)));
    t.push_back(enum_key<Renormalize>("flow", "renormalize", SMFLOW_REF(flow.renormalize),
                                      {Renormalize::Auto, Renormalize::On, Renormalize::Off}));
    t.push_back(bool_key("flow", "renormalize_stages", SMFLOW_REF(flow.renormalize_stages)));
    t.push_back(real_key("flow", "cfl_constant", SMFLOW_REF(flow.cfl_constant)));
    t.push_back(bool_key("flow", "override_cfl", SMFLOW_REF(flow.override_cfl)));

    t.push_back(enum_key<Experiment>("run", "experiment", SMFLOW_REF(experiment),
                                     {Experiment::Simulate, Experiment::CheckCompat, Experiment::SweepEps,
                                      Experiment::Converge, Experiment::Longrun}));
    t.push_back(real_key("run", "t_final", SMFLOW_REF(t_final)));
    t.push_back(integer_key<std::size_t>("run", "monitor_stride", SMFLOW_REF(monitor_stride)));
    t.push_back({"run", "output_dir",
                 [](RunConfig& c, std::string_view v) -> std::optional<std::string> {
                   if (v.empty()) return "output_dir must not be empty";
                   c.output_dir = std::string(v);
                   return std::nullopt;
                 },
                 [](const RunConfig& c) { return c.output_dir; }});
    t.push_back(bool_key("run", "keep_snapshots", SMFLOW_REF(keep_snapshots)));

    t.push_back(integer_key<int>("compat", "order", SMFLOW_REF(compat_order)));
    t.push_back(real_key("compat", "c0", SMFLOW_REF(compat_c0)));

    t.push_back(list_key<double>("sweep", "eps_list", SMFLOW_REF(eps_list)));
    t.push_back(bool_key("sweep", "concurrent", SMFLOW_REF(sweep_concurrent)));

    t.push_back(list_key<int>("converge", "nodes_list", SMFLOW_REF(nodes_list)));
    t.push_back(integer_key<int>("converge", "reference_nodes", SMFLOW_REF(reference_nodes)));
    t.push_back(real_key("converge", "dt0", SMFLOW_REF(dt0)));
    t.push_back(real_key("converge", "min_order", SMFLOW_REF(min_order)));

    t.push_back(real_key("longrun", "t_long", SMFLOW_REF(t_long)));
    t.push_back(integer_key<std::size_t>("longrun", "record_stride", SMFLOW_REF(record_stride)));
    t.push_back(real_key("longrun", "bound_constant", SMFLOW_REF(bound_constant)));
    t.push_back(real_key("longrun", "flat_window", SMFLOW_REF(flat_window)));

    t.push_back(real_key("perturb", "delta", SMFLOW_REF(delta)));
    t.push_back(list_key<double>("perturb", "times", SMFLOW_REF(perturb_times)));
    return t;
  }();
  return table;
}

#undef SMFLOW_REF

struct KeyedIssue {
  std::string key;  ///< "section.name", empty for whole-config checks
  std::string message;
};

std::vector<KeyedIssue> validate_keyed(const RunConfig& c) {
  std::vector<KeyedIssue> out;
  auto fail = [&](std::string key, std::string msg) { out.push_back({std::move(key), std::move(msg)}); };

  bool grid_ok = true;
  if (c.dims < 1 || c.dims > 3) {
    fail("domain.dims", "dims must be 1, 2 or 3");
    grid_ok = false;
  }
  if (c.nodes.empty() || (c.nodes.size() != 1 && static_cast<int>(c.nodes.size()) != c.dims)) {
    fail("domain.nodes", "nodes must list one count or one per axis");
    grid_ok = false;
  }
  for (int n : c.nodes)
    if (n < 3) {
      fail("domain.nodes", "nodes per axis must be >= 3");
      grid_ok = false;
      break;
    }

  bool flow_ok = true;
  if (!(c.flow.eps >= 0.0 && c.flow.eps <= 1.0)) {
    fail("flow.eps", "eps must lie in [0,1]");
    flow_ok = false;
  }
  if (!(c.flow.dt > 0.0)) {
    fail("flow.dt", "dt must be positive");
    flow_ok = false;
  }
  if (!(c.flow.fp_tol > 0.0)) {
    fail("flow.fp_tol", "fp_tol must be positive");
    flow_ok = false;
  }
  if (c.flow.fp_max_iters < 1) {
    fail("flow.fp_max_iters", "fp_max_iters must be >= 1");
    flow_ok = false;
  }
  if (!(c.flow.cfl_constant > 0.0)) {
    fail("flow.cfl_constant", "cfl_constant must be positive");
    flow_ok = false;
  }
  if (grid_ok && flow_ok) {
    try {
      validate_flow_params(c.flow, c.grid());
    } catch (const InvalidArgument& e) {
      fail("flow.dt", e.what());
    }
  }

  if (grid_ok) {
    try {
      (void)generate_initial_data(c.initial, BoxGrid(c.dims, 3));
    } catch (const InvalidArgument& e) {
      fail("initial.family", e.what());
    }
  }

  if (!(c.t_final >= 0.0)) fail("run.t_final", "t_final must be >= 0");
  if (c.monitor_stride < 1) fail("run.monitor_stride", "monitor_stride must be >= 1");
  if (c.compat_order < 0 || c.compat_order > 2) fail("compat.order", "compat order must lie in {0,1,2}");
  if (!(c.compat_c0 > 0.0)) fail("compat.c0", "c0 must be positive");

  switch (c.experiment) {
    case Experiment::SweepEps:
      if (grid_ok && flow_ok) {
        SweepPlan plan;
        plan.eps_list = c.eps_list;
        plan.grid = c.grid();
        plan.t_final = c.t_final;
        plan.params = c.flow;
        try {
          validate_sweep_plan(plan);
        } catch (const InvalidArgument& e) {
          fail("sweep.eps_list", e.what());
        }
      }
      break;
    case Experiment::Converge:
      if (flow_ok) {
        ConvergencePlan plan;
        plan.nodes_list = c.nodes_list;
        plan.reference_nodes = c.reference_nodes;
        plan.dims = c.dims;
        plan.t_final = c.t_final;
        plan.dt0 = c.dt0;
        plan.params = c.flow;
        try {
          validate_convergence_plan(plan);
        } catch (const InvalidArgument& e) {
          fail("converge.nodes_list", e.what());
        }
      }
      break;
    case Experiment::Longrun:
      if (c.dims != 1) fail("domain.dims", "longrun requires dims = 1");
      if (c.flow.eps != 0.0) fail("flow.eps", "longrun requires eps = 0");
      if (!(c.t_long > 0.0)) fail("longrun.t_long", "t_long must be positive");
      if (c.record_stride < 1) fail("longrun.record_stride", "record_stride must be >= 1");
      if (!(c.bound_constant > 0.0)) fail("longrun.bound_constant", "bound_constant must be positive");
      break;
    case Experiment::Simulate:
    case Experiment::CheckCompat:
      break;
  }
  if (!(c.delta >= 0.0)) fail("perturb.delta", "delta must be >= 0");
  if (!std::is_sorted(c.perturb_times.begin(), c.perturb_times.end()))
    fail("perturb.times", "times must be ascending");
  return out;
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& config) {
  std::vector<std::string> out;
  for (auto& issue : validate_keyed(config)) out.push_back(std::move(issue.message));
  return out;
}

ConfigParseResult parse_config(std::string_view text) {
  ConfigParseResult result;
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::string section;
  int line_no = 0;

  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;

    const auto hash = line.find_first_of("#;");
    line = trim(line.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        result.errors.push_back({line_no, "malformed section header"});
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      const auto& table = key_table();
      if (std::none_of(table.begin(), table.end(), [&](const KeySpec& k) { return k.section == section; }))
        result.errors.push_back({line_no, "unknown section [" + section + "]"});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      result.errors.push_back({line_no, "expected key = value"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) {
      result.errors.push_back({line_no, "key '" + key + "' appears before any [section]"});
      continue;
    }
    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const KeySpec& k) { return k.section == section && k.name == key; });
    if (it == table.end()) {
      result.errors.push_back({line_no, "unknown key '" + key + "' in section [" + section + "]"});
      continue;
    }
    const std::string full = section + "." + key;
    if (seen.count(full)) {
      result.errors.push_back({line_no, "duplicate key '" + full + "' (first set on line " +
                                            std::to_string(seen[full]) + ")"});
      continue;
    }
    seen[full] = line_no;
    if (auto err = it->set(cfg, value)) result.errors.push_back({line_no, *err});
  }

  if (result.errors.empty()) {
    for (auto& issue : validate_keyed(cfg)) {
      const auto it = seen.find(issue.key);
      result.errors.push_back({it == seen.end() ? 0 : it->second, std::move(issue.message)});
    }
  }
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

ConfigParseResult load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigParseResult r;
    r.errors.push_back({0, "cannot open config file '" + path + "'"});
    return r;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& k : key_table()) {
    if (k.section != section) {
      if (!section.empty()) out += '\n';
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += k.name + " = " + k.get(config) + "\n";
  }
  return out;
}

}  // namespace smflow

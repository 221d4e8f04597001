// Copyright 2026 The wavesync Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavesync/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>

namespace wavesync::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  if (!out) throw InputError("write failed for '" + path + "'");
}

json parse_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw InputError("field '" + field + "': expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw InputError("field '" + field + "': expected an integer");
  return j.get<int>();
}

/// rows/cols < 0 accept any size.
Mat get_matrix(const json& j, const std::string& field, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) throw InputError("field '" + field + "': expected an array of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  if (rows >= 0 && r != rows) {
    throw InputError("field '" + field + "': expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
  }
  Eigen::Index c = cols;
  Mat out;
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    const std::string where = field + "[" + std::to_string(i) + "]";
    if (!row.is_array()) throw InputError("field '" + where + "': expected an array");
    const auto rc = static_cast<Eigen::Index>(row.size());
    if (c < 0) c = rc;
    if (rc != c) {
      throw InputError("field '" + where + "': expected " + std::to_string(c) + " entries, got " + std::to_string(rc));
    }
    if (i == 0) out.resize(r, c);
    for (Eigen::Index k = 0; k < c; ++k) {
      out(i, k) = get_number(row[static_cast<std::size_t>(k)], where + "[" + std::to_string(k) + "]");
    }
  }
  if (r == 0) out.resize(0, std::max<Eigen::Index>(c, 0));
  return out;
}

const json& require(const json& obj, const std::string& key) {
  if (!obj.contains(key)) throw InputError("missing field '" + key + "'");
  return obj.at(key);
}

GroupPartition parse_partition(const json& obj, int n) {
  if (!obj.contains("partition")) return GroupPartition::single(n);
  const json& p = obj.at("partition");
  if (!p.is_array()) throw InputError("field 'partition': expected an array of cut points");
  std::vector<int> cuts;
  for (std::size_t i = 0; i < p.size(); ++i) cuts.push_back(get_int(p[i], "partition[" + std::to_string(i) + "]"));
  try {
    return GroupPartition(cuts);
  } catch (const InputError& e) {
    throw InputError(std::string("field 'partition': ") + e.what());
  }
}

Mat resolve_profile(const json& init, const std::string& key, const std::string& preset, int n,
                    const Grid1D& grid) {
  if (!init.contains(key)) return Mat::Zero(n, grid.nodes());
  const std::string field = "initial." + key;
  if (preset == "modes") return standing_modes(grid, get_matrix(init.at(key), field, n, -1));
  Mat u = get_matrix(init.at(key), field, n, grid.nodes());
  u.col(0).setZero();
  return u;
}

WaveState resolve_initial(const json& obj, int n, const Grid1D& grid, std::uint64_t seed) {
  if (!obj.contains("initial")) return WaveState::zero(n, grid);
  const json& init = obj.at("initial");
  if (!init.is_object()) throw InputError("field 'initial': expected an object");
  const std::string preset = init.value("preset", std::string("zero"));
  if (preset == "zero") return WaveState::zero(n, grid);
  if (preset == "modes" || preset == "samples") {
    return {resolve_profile(init, "u0", preset, n, grid), resolve_profile(init, "u1", preset, n, grid)};
  }
  if (preset == "random") {
    const int modes = init.contains("modes") ? get_int(init.at("modes"), "initial.modes") : 3;
    if (modes < 1) throw InputError("field 'initial.modes': expected >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Mat a0(n, modes);
    Mat a1(n, modes);
    for (Mat* a : {&a0, &a1}) {
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < modes; ++m) (*a)(k, m) = dist(rng) / (m + 1);
      }
    }
    return {standing_modes(grid, a0), standing_modes(grid, a1)};
  }
  throw InputError("field 'initial.preset': unknown preset '" + preset + "' (zero, modes, samples, random)");
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

json vector_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0') throw InputError("--eps: cannot parse '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("--eps: empty epsilon list");
  return out;
}

Backend parse_backend(const std::string& s) {
  if (s == "serial") return Backend::Serial;
  if (s == "openmp") return Backend::OpenMP;
  throw InputError("--backend: expected serial or openmp");
}

void apply_threads_env() {
  const char* env = std::getenv("WAVESYNC_THREADS");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) throw InputError("WAVESYNC_THREADS must be a positive integer");
  omp_set_num_threads(static_cast<int>(n));
}

struct CommonFlags {
  std::string problem;
  std::string out;
  LoadOverrides overrides;
  std::string backend = "openmp";
  double rank_rel = Tolerances{}.rank_rel;
  double residual_abs = Tolerances{}.residual_abs;

  Tolerances tolerances() const {
    Tolerances tol{rank_rel, residual_abs};
    tol.validate();
    return tol;
  }
};

void add_sim_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--J", f.overrides.J, "grid intervals");
  cmd->add_option("--T", f.overrides.T, "horizon");
  cmd->add_option("--dt", f.overrides.dt, "time step");
  cmd->add_option("--cfl", f.overrides.cfl, "time step as a multiple of h");
  cmd->add_option("--seed", f.overrides.seed, "seed for the random initial-data preset");
  cmd->add_option("--backend", f.backend, "serial or openmp");
}

void add_tol_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--rank-rel", f.rank_rel, "relative singular value cutoff");
  cmd->add_option("--residual-abs", f.residual_abs, "absolute residual bound");
}

ProblemFile load_validated(const CommonFlags& f) {
  ProblemFile pf = load_problem(f.problem, f.overrides);
  pf.problem.validate(f.tolerances(), pf.allow_nonsymmetrizable_B);
  pf.sim.backend = parse_backend(f.backend);
  pf.sim.validate(pf.grid);
  return pf;
}

// ---- analyze ----

int cmd_analyze(const CommonFlags& f, std::ostream& out) {
  const Tolerances tol = f.tolerances();
  ProblemFile pf = load_problem(f.problem, f.overrides);
  pf.problem.validate(tol, pf.allow_nonsymmetrizable_B);
  const SyncAnalysis a = analyze(pf.problem, tol);

  json rep;
  rep["N"] = a.N;
  rep["p"] = a.p;
  rep["rank_R"] = a.rank_R;
  rep["dim_ker_RT"] = a.dim_ker_RT;
  rep["ker_RT"] = matrix_json(a.ker_RT.matrix().transpose());
  rep["cp_compatible_A"] = a.cp_compatible_A;
  rep["cp_compatible_B"] = a.cp_compatible_B;
  rep["reduced_A"] = a.reduced_A ? matrix_json(*a.reduced_A) : json(nullptr);
  rep["reduced_B"] = a.reduced_B ? matrix_json(*a.reduced_B) : json(nullptr);
  rep["rank_CpR"] = a.rank_CpR;
  rep["biorthonormal"] = a.biorthonormal;
  json E = json::array();
  for (const Vec& v : a.E_vectors) E.push_back(vector_json(v));
  rep["E_vectors"] = E;
  rep["necessary_ok"] = a.necessary_ok;
  if (!f.out.empty()) write_file(f.out, rep.dump(2) + "\n");

  const bool compatible = a.cp_compatible_A && a.cp_compatible_B;
  out << "N = " << a.N << ", p = " << a.p << ", M = " << pf.problem.M() << "\n";
  out << "rank R = " << a.rank_R << " (need >= " << a.N - a.p << "), dim Ker(R^T) = " << a.dim_ker_RT << "\n";
  out << "C_p-compatible: A " << (a.cp_compatible_A ? "yes" : "no") << ", B " << (a.cp_compatible_B ? "yes" : "no")
      << "\n";
  out << "rank C_p R = " << a.rank_CpR << ", bi-orthonormal: " << (a.biorthonormal ? "yes" : "no") << "\n";
  out << (a.necessary_ok && compatible ? "necessary conditions hold" : "a necessary condition fails") << "\n";
  return a.necessary_ok && compatible ? kExitOk : kExitCondition;
}

// ---- simulate ----

struct SimulateFlags {
  std::string ctrl = "zero";
  std::string trace_out;
  std::string energy_out;
  int stride = 0;
  double post = -1.0;
};

int cmd_simulate(const CommonFlags& f, const SimulateFlags& s, std::ostream& out) {
  ProblemFile pf = load_problem(f.problem, f.overrides);
  pf.problem.validate(f.tolerances(), pf.allow_nonsymmetrizable_B);
  pf.sim.backend = parse_backend(f.backend);
  if (s.stride > 0) pf.sim.stride = s.stride;
  if (s.post >= 0.0) pf.sim.post_window = s.post;
  pf.sim.validate(pf.grid);
  const ControlSchedule ctrl = s.ctrl == "zero" ? ControlSchedule::zero(pf.problem.M(), pf.sim)
                                                : read_schedule_csv(s.ctrl, pf.problem.M(), pf.sim);
  const WaveTrajectory traj = simulate(pf.problem, pf.grid, pf.sim, pf.init, ctrl);

  std::string csv = "t,k,j,U,V\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const WaveState& st = traj.states[i];
    const std::string t = num(traj.t[i]);
    for (Eigen::Index k = 0; k < st.U.rows(); ++k) {
      for (Eigen::Index j = 0; j < st.U.cols(); ++j) {
        csv += t + "," + std::to_string(k) + "," + std::to_string(j) + "," + num(st.U(k, j)) + "," +
               num(st.V(k, j)) + "\n";
      }
    }
  }
  if (f.out.empty()) {
    out << csv;
  } else {
    write_file(f.out, csv);
  }
  if (!s.trace_out.empty()) {
    std::string tr = "t,k,value\n";
    for (Eigen::Index n = 0; n < traj.trace.cols(); ++n) {
      const std::string t = num(traj.trace_t[static_cast<std::size_t>(n)]);
      for (Eigen::Index k = 0; k < traj.trace.rows(); ++k) {
        tr += t + "," + std::to_string(k) + "," + num(traj.trace(k, n)) + "\n";
      }
    }
    write_file(s.trace_out, tr);
  }
  if (!s.energy_out.empty()) {
    std::string en = "t,energy\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      en += num(traj.t[i]) + "," + num(discrete_energy(pf.problem.A, pf.problem.B, traj.states[i], pf.grid)) + "\n";
    }
    write_file(s.energy_out, en);
  }
  if (!f.out.empty()) {
    out << "simulated " << pf.sim.steps() + pf.sim.post_steps() << " steps, " << traj.states.size()
        << " stored states\n";
  }
  return kExitOk;
}

// ---- synchronize ----

struct SynchronizeFlags {
  std::string target = "sync";
  std::string eps;
  std::string schedule_prefix;
  int max_iters = SolverBudget{}.max_iters;
};

int cmd_synchronize(const CommonFlags& f, const SynchronizeFlags& s, std::ostream& out) {
  Target target;
  if (s.target == "null") {
    target = Target::Null;
  } else if (s.target == "sync") {
    target = Target::Sync;
  } else {
    throw InputError("--target: expected null or sync");
  }
  const std::vector<double> eps = parse_eps_list(s.eps);
  const ProblemFile pf = load_validated(f);
  SolverBudget budget;
  budget.max_iters = s.max_iters;

  const ControlSchedule none = ControlSchedule::zero(pf.problem.M(), pf.sim);
  SimConfig plain = pf.sim;
  plain.stride = pf.sim.steps();
  const WaveState free_end = simulate(pf.problem, pf.grid, plain, pf.init, none).states.back();
  const double free_full = norm2_M(free_end.U, pf.grid) + norm2_M(free_end.V, pf.grid);
  const double free_dev = uncontrolled_deviation(pf.problem, pf.grid, pf.sim, pf.init, target);

  const std::vector<SynthesisResult> sweep = epsilon_sweep(pf.problem, pf.grid, pf.sim, pf.init, target, eps, budget);
  std::string csv = "epsilon,iterations,terminal_dev,control_energy,full_energy_ratio\n";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const SynthesisResult& r = sweep[i];
    const double ratio = free_full > 0.0 ? r.full_energy / free_full : 0.0;
    csv += num(r.epsilon) + "," + std::to_string(r.iterations) + "," + num(r.terminal_dev) + "," +
           num(r.control_energy) + "," + num(ratio) + "\n";
    if (!s.schedule_prefix.empty()) {
      write_schedule_csv(s.schedule_prefix + "_" + std::to_string(i) + ".csv", r.schedule);
    }
  }
  if (f.out.empty()) {
    out << csv;
  } else {
    write_file(f.out, csv);
    const double last = sweep.back().terminal_dev;
    out << "uncontrolled terminal_dev = " << num(free_dev) << "\n";
    out << "final terminal_dev = " << num(last) << ", ratio = " << num(free_dev > 0.0 ? last / free_dev : 0.0)
        << "\n";
  }
  return kExitOk;
}

// ---- synthesize-d ----

int cmd_synthesize_d(const CommonFlags& f, std::ostream& out) {
  const Tolerances tol = f.tolerances();
  const json obj = parse_json(f.problem);
  if (!obj.is_object()) throw InputError("top level must be a JSON object");
  const int n = get_int(require(obj, "N"), "N");
  if (n < 1) throw InputError("field 'N': expected >= 1");
  Mat v = Mat::Zero(n, 0);
  if (obj.contains("V")) {
    const Mat rows = get_matrix(obj.at("V"), "V", -1, n);
    v = rows.transpose();
  }
  const SubspaceBasis V = v.cols() == 0 ? SubspaceBasis::zero(n) : SubspaceBasis::span_of(v, tol);
  const Mat D = synthesize_D(V, tol);

  json problem = obj;
  problem.erase("V");
  problem["M"] = D.cols();
  problem["D"] = matrix_json(D);
  if (!problem.contains("A")) problem["A"] = matrix_json(Mat::Zero(n, n));
  if (!problem.contains("B")) problem["B"] = matrix_json(Mat::Identity(n, n));
  if (!problem.contains("partition")) problem["partition"] = json::array({0, n});
  const std::string text = problem.dump(2) + "\n";
  if (f.out.empty()) {
    out << text;
  } else {
    write_file(f.out, text);
    out << "D has " << D.cols() << " columns; Im(D) is the orthogonal complement of V\n";
  }
  return kExitOk;
}

}  // namespace

ProblemFile load_problem(const std::string& path, const LoadOverrides& ov) {
  const json obj = parse_json(path);
  if (!obj.is_object()) throw InputError(path + ": top level must be a JSON object");
  ProblemFile pf;
  const int n = get_int(require(obj, "N"), "N");
  const int m = get_int(require(obj, "M"), "M");
  if (n < 1) throw InputError("field 'N': expected >= 1");
  if (m < 1 || m > n) throw InputError("field 'M': expected 1 <= M <= N");
  pf.problem.A = get_matrix(require(obj, "A"), "A", n, n);
  pf.problem.B = get_matrix(require(obj, "B"), "B", n, n);
  pf.problem.D = get_matrix(require(obj, "D"), "D", n, m);
  pf.problem.partition = parse_partition(obj, n);
  if (obj.contains("allow_nonsymmetrizable_B")) {
    const json& b = obj.at("allow_nonsymmetrizable_B");
    if (!b.is_boolean()) throw InputError("field 'allow_nonsymmetrizable_B': expected true or false");
    pf.allow_nonsymmetrizable_B = b.get<bool>();
  }

  if (obj.contains("grid")) {
    const json& g = obj.at("grid");
    if (g.contains("J")) pf.grid.J = get_int(g.at("J"), "grid.J");
  }
  if (ov.J > 0) pf.grid.J = ov.J;
  pf.grid.validate();

  double cfl = 0.0;
  bool has_dt = false;
  if (obj.contains("sim")) {
    const json& s = obj.at("sim");
    if (!s.is_object()) throw InputError("field 'sim': expected an object");
    if (s.contains("T")) pf.sim.T = get_number(s.at("T"), "sim.T");
    if (s.contains("dt")) {
      pf.sim.dt = get_number(s.at("dt"), "sim.dt");
      has_dt = true;
    }
    if (s.contains("cfl")) cfl = get_number(s.at("cfl"), "sim.cfl");
    if (s.contains("cfl_max")) pf.sim.cfl_max = get_number(s.at("cfl_max"), "sim.cfl_max");
    if (s.contains("post_window")) pf.sim.post_window = get_number(s.at("post_window"), "sim.post_window");
    if (s.contains("stride")) pf.sim.stride = get_int(s.at("stride"), "sim.stride");
  }
  if (ov.T > 0.0) pf.sim.T = ov.T;
  if (ov.cfl > 0.0) {
    cfl = ov.cfl;
    has_dt = false;
  }
  if (ov.dt > 0.0) {
    pf.sim.dt = ov.dt;
    has_dt = true;
    cfl = 0.0;
  }
  if (cfl > 0.0) {
    if (has_dt) throw InputError("field 'sim': give either dt or cfl, not both");
    pf.sim.dt = cfl * pf.grid.h();
  } else if (!has_dt) {
    pf.sim.dt = 0.5 * pf.grid.h();
  }
  pf.init = resolve_initial(obj, n, pf.grid, ov.seed);
  return pf;
}

void write_schedule_csv(const std::string& path, const ControlSchedule& ctrl) {
  std::string csv = "t,m,value\n";
  for (Eigen::Index n = 0; n < ctrl.H.cols(); ++n) {
    const std::string t = num(static_cast<double>(n) * ctrl.dt);
    for (Eigen::Index m = 0; m < ctrl.H.rows(); ++m) {
      csv += t + "," + std::to_string(m) + "," + num(ctrl.H(m, n)) + "\n";
    }
  }
  write_file(path, csv);
}

ControlSchedule read_schedule_csv(const std::string& path, Eigen::Index m, const SimConfig& cfg) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "t,m,value") {
    throw InputError(path + ": line 1: expected header 't,m,value'");
  }
  ControlSchedule ctrl = ControlSchedule::zero(m, cfg);
  const Eigen::Index levels = ctrl.H.cols();
  std::vector<char> seen(static_cast<std::size_t>(levels * m), 0);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ": line " + std::to_string(lineno);
    double t = 0.0;
    long idx = 0;
    double value = 0.0;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%ld,%lf%c", &t, &idx, &value, &tail) != 3) {
      throw InputError(where + ": expected 't,m,value'");
    }
    const double level = t / cfg.dt;
    const auto n = static_cast<Eigen::Index>(std::llround(level));
    if (std::abs(level - static_cast<double>(n)) > 1e-6 || n < 0 || n >= levels) {
      throw InputError(where + ": time " + num(t) + " is not a time level of the run");
    }
    if (idx < 0 || idx >= m) throw InputError(where + ": control index out of range");
    ctrl.H(idx, n) = value;
    seen[static_cast<std::size_t>(n * m + idx)] = 1;
  }
  for (char c : seen) {
    if (c == 0) throw InputError(path + ": schedule does not cover every (time level, control) pair");
  }
  return ctrl;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate boundary synchronization of coupled wave systems"};
  app.require_subcommand(1);
  CommonFlags f;
  SimulateFlags sim;
  SynchronizeFlags sync;

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "rank and compatibility conditions");
  analyze_cmd->add_option("problem", f.problem, "problem JSON")->required();
  analyze_cmd->add_option("--out", f.out, "JSON report path");
  add_tol_flags(analyze_cmd, f);

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "forward simulation to CSV");
  simulate_cmd->add_option("problem", f.problem, "problem JSON")->required();
  simulate_cmd->add_option("--out", f.out, "trajectory CSV (stdout when absent)");
  simulate_cmd->add_option("--ctrl", sim.ctrl, "schedule CSV or 'zero'");
  simulate_cmd->add_option("--trace-out", sim.trace_out, "boundary trace CSV");
  simulate_cmd->add_option("--energy-out", sim.energy_out, "discrete energy CSV");
  simulate_cmd->add_option("--stride", sim.stride, "store every n-th state");
  simulate_cmd->add_option("--post", sim.post, "uncontrolled window after T");
  add_sim_flags(simulate_cmd, f);
  add_tol_flags(simulate_cmd, f);

  CLI::App* sync_cmd = app.add_subcommand("synchronize", "epsilon sweep of penalized control synthesis");
  sync_cmd->add_option("problem", f.problem, "problem JSON")->required();
  sync_cmd->add_option("--out", f.out, "sweep CSV (stdout when absent)");
  sync_cmd->add_option("--target", sync.target, "null or sync");
  sync_cmd->add_option("--eps", sync.eps, "comma-separated, strictly decreasing")->required();
  sync_cmd->add_option("--schedule-prefix", sync.schedule_prefix, "write PREFIX_<i>.csv per epsilon");
  sync_cmd->add_option("--max-iters", sync.max_iters, "iterations per epsilon");
  add_sim_flags(sync_cmd, f);
  add_tol_flags(sync_cmd, f);

  CLI::App* synth_cmd = app.add_subcommand("synthesize-d", "control matrix with Im(D) = V^perp");
  synth_cmd->add_option("subspace", f.problem, "JSON with N and V (rows span V)")->required();
  synth_cmd->add_option("--out", f.out, "problem JSON (stdout when absent)");
  add_tol_flags(synth_cmd, f);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    apply_threads_env();
    if (*analyze_cmd) return cmd_analyze(f, out);
    if (*simulate_cmd) return cmd_simulate(f, sim, out);
    if (*sync_cmd) return cmd_synchronize(f, sync, out);
    if (*synth_cmd) return cmd_synthesize_d(f, out);
  } catch (const PreconditionError& e) {
    err << "condition failed: " << e.what() << "\n";
    return kExitCondition;
  } catch (const InstabilityError& e) {
    err << "instability: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace wavesync::cli

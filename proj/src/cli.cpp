#include "nstr/cli.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "nstr/io.hpp"
#include "nstr/problems.hpp"

namespace nstr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Typed access to the flat key=value config; every key must be consumed,
/// leftovers are reported as errors rather than warnings.
class ConfigReader {
public:
  explicit ConfigReader(Config config) : cfg_(std::move(config)) {}

  bool has(const std::string& key) {
    known_.insert(key);
    return cfg_.count(key) > 0;
  }

  std::string get_string(const std::string& key, const std::string& dflt) {
    known_.insert(key);
    auto it = cfg_.find(key);
    return it == cfg_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key, double dflt) {
    known_.insert(key);
    auto it = cfg_.find(key);
    if (it == cfg_.end()) return dflt;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw Error("config key '" + key + "': not a real number: " + it->second);
    }
  }

  int get_int(const std::string& key, int dflt) {
    known_.insert(key);
    auto it = cfg_.find(key);
    if (it == cfg_.end()) return dflt;
    try {
      std::size_t pos = 0;
      int v = std::stoi(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw Error("config key '" + key + "': not an integer: " + it->second);
    }
  }

  bool get_bool(const std::string& key, bool dflt) {
    known_.insert(key);
    auto it = cfg_.find(key);
    if (it == cfg_.end()) return dflt;
    if (it->second == "1" || it->second == "true" || it->second == "on") return true;
    if (it->second == "0" || it->second == "false" || it->second == "off") return false;
    throw Error("config key '" + key + "': not a boolean: " + it->second);
  }

  void finish() const {
    for (const auto& [k, v] : cfg_) {
      if (!known_.count(k)) throw Error("unknown config key: " + k);
    }
  }

private:
  Config cfg_;
  std::set<std::string> known_;
};

trcore::TrParams tr_params_from(ConfigReader& cfg, trcore::TrParams p) {
  p.delta_min = cfg.get_double("delta_min", p.delta_min);
  p.eta1 = cfg.get_double("eta1", p.eta1);
  p.eta2 = cfg.get_double("eta2", p.eta2);
  p.beta1 = cfg.get_double("beta1", p.beta1);
  p.beta2 = cfg.get_double("beta2", p.beta2);
  p.mu = cfg.get_double("mu", p.mu);
  p.delta0 = cfg.get_double("delta0", p.delta0);
  p.max_iter = cfg.get_int("max_iter", p.max_iter);
  p.tol_stationarity = cfg.get_double("tol_stationarity", p.tol_stationarity);
  p.tol_step = cfg.get_double("tol_step", p.tol_step);
  p.c_h = cfg.get_double("c_h", p.c_h);
  p.bundle_cap = cfg.get_int("bundle_cap", p.bundle_cap);
  p.radius_growth_floor = cfg.get_bool("radius_growth_floor", p.radius_growth_floor);
  p.rho_zeroing = cfg.get_bool("rho_zeroing", p.rho_zeroing);
  p.tol_radius_indicator =
      cfg.get_double("tol_radius_indicator", p.tol_radius_indicator);
  std::string hess = cfg.get_string(
      "hessian", p.hessian_mode == trcore::HessianMode::Bfgs ? "bfgs" : "zero");
  if (hess == "bfgs") {
    p.hessian_mode = trcore::HessianMode::Bfgs;
  } else if (hess == "zero") {
    p.hessian_mode = trcore::HessianMode::Zero;
  } else {
    throw Error("config key 'hessian': expected bfgs or zero, got " + hess);
  }
  p.h0_scale = cfg.get_double("h0_scale", p.h0_scale);
  return p;
}

json params_to_json(const trcore::TrParams& p) {
  return json{{"delta_min", p.delta_min},
              {"eta1", p.eta1},
              {"eta2", p.eta2},
              {"beta1", p.beta1},
              {"beta2", p.beta2},
              {"mu", p.mu},
              {"delta0", p.delta0},
              {"max_iter", p.max_iter},
              {"tol_stationarity", p.tol_stationarity},
              {"tol_step", p.tol_step},
              {"c_h", p.c_h},
              {"bundle_cap", p.bundle_cap},
              {"radius_growth_floor", p.radius_growth_floor},
              {"rho_zeroing", p.rho_zeroing},
              {"tol_radius_indicator", p.tol_radius_indicator},
              {"hessian", p.hessian_mode == trcore::HessianMode::Bfgs ? "bfgs" : "zero"},
              {"h0_scale", p.h0_scale}};
}

int exit_code_for(trcore::Status s) {
  switch (s) {
    case trcore::Status::StationarySubgradientZero:
    case trcore::Status::StationaryIndicator:
    case trcore::Status::StepTooSmall:
      return 0;
    case trcore::Status::MaxIter:
      return 2;
    case trcore::Status::Running:
      break;
  }
  return 1;
}

json summarize_run(const std::string& command, const trcore::RunResult& res,
                   const trcore::TrParams& params) {
  int n_standard = 0, n_modified = 0, n_null = 0;
  std::optional<double> last_psi;
  for (const auto& r : res.records) {
    switch (r.step_kind) {
      case trcore::StepKind::StandardSuccess: ++n_standard; break;
      case trcore::StepKind::ModifiedSuccess: ++n_modified; break;
      case trcore::StepKind::StandardNull:
      case trcore::StepKind::ModifiedNull: ++n_null; break;
      case trcore::StepKind::Stop: break;
    }
    if (r.psi) last_psi = r.psi;
  }
  double wall = 0.0;
  for (const auto& r : res.records) wall += r.wall_ms;

  const Vector& x = res.state.x;
  json final_x = {{"n", x.size()},
                  {"norm2", x.norm()},
                  {"min", x.size() ? x.minCoeff() : 0.0},
                  {"max", x.size() ? x.maxCoeff() : 0.0},
                  {"fnv1a", io::fnv1a_hex(x)}};
  if (x.size() <= 64) {
    json vals = json::array();
    for (int i = 0; i < x.size(); ++i) vals.push_back(x[i]);
    final_x["values"] = vals;
  }

  json s{{"schema_version", 1},
         {"command", command},
         {"status", trcore::to_string(res.state.status)},
         {"iterations", res.state.k},
         {"counts",
          {{"standard_success", n_standard},
           {"modified_success", n_modified},
           {"null", n_null}}},
         {"final",
          {{"f", res.state.f_x},
           {"norm_g", res.state.g.size() ? res.state.g.norm() : 0.0},
           {"delta", res.state.delta},
           {"x", final_x}}},
         {"params", params_to_json(params)},
         {"wall_ms_total", wall}};
  if (last_psi) s["final"]["psi"] = *last_psi;
  return s;
}

void write_summary(const fs::path& out_dir, const json& summary) {
  std::ofstream out(out_dir / "summary.json");
  if (!out) throw Error("cannot write summary.json in " + out_dir.string());
  out << summary.dump(2) << "\n";
}

fs::path prepare_out_dir(ConfigReader& cfg) {
  fs::path dir = cfg.get_string("out_dir", ".");
  fs::create_directories(dir);
  return dir;
}

Vector parse_vector_spec(const std::string& spec, int n) {
  if (spec == "zeros") return Vector::Zero(n);
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw Error("cannot open vector file: " + spec.substr(5));
    std::vector<double> vals;
    double v;
    while (in >> v) vals.push_back(v);
    if (static_cast<int>(vals.size()) != n)
      throw Error("vector file has " + std::to_string(vals.size()) +
                  " entries, expected " + std::to_string(n));
    return Eigen::Map<Vector>(vals.data(), n);
  }
  // comma-separated list, or a single scalar broadcast to every entry
  std::vector<double> vals;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error("bad vector literal: " + spec);
    }
  }
  if (vals.empty()) throw Error("empty vector spec");
  if (static_cast<int>(vals.size()) == 1) return Vector::Constant(n, vals[0]);
  if (static_cast<int>(vals.size()) != n)
    throw Error("vector literal has " + std::to_string(vals.size()) +
                " entries, expected " + std::to_string(n));
  return Eigen::Map<Vector>(vals.data(), n);
}

struct TrackedRun {
  trcore::RunResult result;
  int loose_iterations = 0;
};

/// Run with the two-phase tolerance schedule wired to the step-norm criterion.
TrackedRun run_tracked(const ProblemDef& def, const trcore::TrParams& params,
                       const Vector& x0,
                       const std::shared_ptr<vi::TolSchedule>& schedule) {
  TrackedRun out;
  const double x0_scale = std::max(1.0, x0.norm());
  auto observer = [&](const trcore::IterationEvent& ev) {
    if (schedule && !schedule->tight_phase()) ++out.loose_iterations;
    if (schedule && ev.record.step_kind != trcore::StepKind::Stop) {
      double rel = (ev.after.x - ev.before.x).norm() / x0_scale;
      if (ev.record.rho && *ev.record.rho > params.eta1) schedule->observe_step(rel);
    }
  };
  out.result = trcore::run(def, params, x0, observer);
  return out;
}

/// Stationarity of the final iterate, measured with the bundle at a small radius.
double post_check_psi(const ProblemDef& def, const Vector& x, double delta,
                      int cap) {
  models::GradientBundle bundle = def.bundle_for(x, delta, cap);
  return models::stationarity_measure(bundle).psi;
}

void write_vi_outputs(const fs::path& dir, const problems::ViTrackingProblem& prob,
                      const Vector& u_final) {
  vi::ViSolution sol = vi::solve_vi(*prob.data, u_final, 1e-12);
  const int row = prob.m > 0 ? prob.m : static_cast<int>(u_final.size());
  io::write_grid_file((dir / "control.dat").string(), u_final, row);
  io::write_grid_file((dir / "state.dat").string(), sol.y, row);
  io::write_grid_file((dir / "dual.dat").string(), sol.q, row);
}

trcore::TrParams experiment1_defaults() {
  trcore::TrParams p;
  p.delta_min = 1e-2;
  p.delta0 = 1.0;
  p.max_iter = 100;
  p.tol_stationarity = 1e-9;
  p.tol_step = 1e-7;
  p.tol_radius_indicator = 5e-7;
  p.radius_growth_floor = false;
  p.c_h = 1e6;
  return p;
}

trcore::TrParams experiment2_defaults() {
  trcore::TrParams p;
  p.delta_min = 1e-3;
  p.delta0 = 1.0;
  p.max_iter = 500;
  p.tol_stationarity = 1e-5;
  p.tol_step = 1e-6;
  p.tol_radius_indicator = 1e-5;
  p.radius_growth_floor = false;
  p.c_h = 1e6;
  return p;
}

trcore::TrParams counterexample_defaults() {
  trcore::TrParams p;
  p.beta1 = 0.4;
  p.beta2 = 1.2;
  p.eta1 = 0.9;
  p.eta2 = 0.95;
  p.delta_min = 2.0;
  p.delta0 = 1.3;
  p.max_iter = 40;
  p.tol_stationarity = 1e-300;
  p.tol_step = 1e-300;
  p.hessian_mode = trcore::HessianMode::Zero;
  p.radius_growth_floor = false;
  p.rho_zeroing = false;
  return p;
}

}  // namespace

int cmd_solve(Config config) {
  ConfigReader cfg(std::move(config));
  const std::string problem = cfg.get_string("problem", "");
  if (problem.empty()) throw Error("config key 'problem' is required");
  const fs::path out_dir = prepare_out_dir(cfg);

  if (problem == "counterexample") {
    problems::CounterexampleParams ce(cfg.get_double("a", 2.0),
                                      cfg.get_double("b", 1.0));
    trcore::TrParams params = tr_params_from(cfg, counterexample_defaults());
    const std::string model = cfg.get_string("model", "bundle");
    Vector x0(1);
    x0[0] = cfg.get_double("x0", -1.0);
    cfg.finish();

    ProblemDef def = model == "local"
                         ? problems::counterexample_problem_local_model(ce)
                         : problems::counterexample_problem(ce);
    trcore::RunResult res = trcore::run(def, params, x0);
    io::write_iterates_csv((out_dir / "iterates.csv").string(), res.records);
    io::write_grid_file((out_dir / "control.dat").string(), res.state.x, 1);

    json summary = summarize_run("solve", res, params);
    summary["problem"] = {{"name", "counterexample"}, {"a", ce.a}, {"b", ce.b},
                          {"model", model}};
    const double psi_post =
        post_check_psi(problems::counterexample_problem(ce), res.state.x,
                       std::max(1e-6, 2.0 * std::abs(res.state.x[0])), params.bundle_cap);
    summary["psi_post_check"] = psi_post;
    summary["non_stationary_limit"] = psi_post > 100.0 * params.tol_stationarity;
    write_summary(out_dir, summary);
    return exit_code_for(res.state.status);
  }

  if (problem == "experiment1") {
    const double alpha = cfg.get_double("alpha", 0.01);
    const double z_d = cfg.get_double("z_d", 1.0);
    const double u_d = cfg.get_double("u_d", -5.0);
    trcore::TrParams params = tr_params_from(cfg, experiment1_defaults());
    Vector u0(1);
    u0[0] = cfg.get_double("u0", -3.0);
    cfg.finish();

    problems::ViTrackingProblem prob = problems::experiment1_tracking(alpha, z_d, u_d);
    TrackedRun run = run_tracked(prob.def, params, u0, prob.schedule);
    io::write_iterates_csv((out_dir / "iterates.csv").string(), run.result.records);
    write_vi_outputs(out_dir, prob, run.result.state.x);

    json summary = summarize_run("solve", run.result, params);
    summary["problem"] = {{"name", "experiment1"}, {"alpha", alpha}, {"z_d", z_d},
                          {"u_d", u_d}};
    write_summary(out_dir, summary);
    return exit_code_for(run.result.state.status);
  }

  if (problem == "experiment2" || problem == "matrix") {
    const double alpha = cfg.get_double("alpha", 1e-3);
    const double nu = cfg.get_double("nu", 4.0);
    const bool two_phase = cfg.get_bool("two_phase_tol", true);
    const bool sampling = cfg.get_bool("allow_bundle_sampling", true);
    trcore::TrParams params = tr_params_from(cfg, experiment2_defaults());

    problems::ViTrackingProblem prob;
    json problem_echo;
    if (problem == "experiment2") {
      const int m = cfg.get_int("m", 19);
      const double x1_threshold = cfg.get_double("x1_threshold", 0.5);
      prob = problems::experiment2_problem(m, alpha, nu, two_phase, x1_threshold,
                                           sampling);
      problem_echo = {{"name", "experiment2"}, {"m", m}, {"alpha", alpha},
                      {"nu", nu}, {"x1_threshold", x1_threshold}};
    } else {
      const std::string path = cfg.get_string("matrix_file", "");
      if (path.empty()) throw Error("config key 'matrix_file' is required");
      linalg::SparseSpdMatrix a = linalg::read_matrix_market(path);
      const int n = a.dim();
      Vector z_d = parse_vector_spec(cfg.get_string("z_d", "zeros"), n);
      Vector u_d = parse_vector_spec(cfg.get_string("u_d", "zeros"), n);
      prob = problems::vi_tracking_problem(std::move(a), alpha, nu, std::move(z_d),
                                           std::move(u_d), two_phase, sampling);
      problem_echo = {{"name", "matrix"}, {"matrix_file", path}, {"alpha", alpha},
                      {"nu", nu}};
    }

    const std::string u0_spec = cfg.get_string("u0", "smooth");
    cfg.finish();
    Vector u0 = u0_spec == "smooth"
                    ? problems::smooth_warm_start(*prob.data->a, alpha, prob.z_d)
                    : parse_vector_spec(u0_spec, prob.def.dim);

    TrackedRun run = run_tracked(prob.def, params, u0, prob.schedule);
    io::write_iterates_csv((out_dir / "iterates.csv").string(), run.result.records);
    write_vi_outputs(out_dir, prob, run.result.state.x);

    json summary = summarize_run("solve", run.result, params);
    summary["problem"] = problem_echo;
    summary["loose_phase_iterations"] = run.loose_iterations;
    summary["heuristic_bundle_sampling"] = prob.sampling_used->load();
    vi::ViSolution sol = vi::solve_vi(*prob.data, run.result.state.x, 1e-12);
    summary["final"]["zero_count"] =
        prob.def.dim - sol.sets.inactive.size();
    summary["final"]["biactive_count"] = sol.sets.biactive.size();
    write_summary(out_dir, summary);
    return exit_code_for(run.result.state.status);
  }

  throw Error("unknown problem selector: " + problem);
}

int cmd_counterexample(Config config) {
  ConfigReader cfg(std::move(config));
  problems::CounterexampleParams ce(cfg.get_double("a", 2.0),
                                    cfg.get_double("b", 1.0));
  trcore::TrParams base = counterexample_defaults();
  const double x0v = cfg.get_double("x0", -1.0);
  base.delta0 = (base.beta1 * base.beta2 - 1.0) / base.beta1 * x0v;
  trcore::TrParams params = tr_params_from(cfg, base);
  const int bundle_max_iter = cfg.get_int("bundle_max_iter", 200);
  const fs::path out_dir = prepare_out_dir(cfg);
  cfg.finish();

  Vector x0(1);
  x0[0] = x0v;

  // Closed-form reference; validates the parameter inequalities.
  auto reference =
      problems::counterexample_reference_iterates(ce, params, x0v, params.max_iter);

  // Local model: replays the divergence-to-zero recurrence.
  std::vector<double> xs;
  auto capture = [&xs](const trcore::IterationEvent& ev) {
    xs.push_back(ev.before.x[0]);
  };
  trcore::RunResult local = trcore::run(
      problems::counterexample_problem_local_model(ce), params, x0, capture);
  xs.push_back(local.state.x[0]);
  io::write_iterates_csv((out_dir / "local_iterates.csv").string(), local.records);

  double replay_err = 0.0;
  for (std::size_t k = 0; k < xs.size() && k < reference.size(); ++k) {
    replay_err = std::max(replay_err, std::abs(xs[k] - reference[k].x));
  }
  for (std::size_t k = 0; k < local.records.size() && k < reference.size(); ++k) {
    replay_err =
        std::max(replay_err, std::abs(local.records[k].delta - reference[k].delta));
    if (local.records[k].rho)
      replay_err =
          std::max(replay_err, std::abs(*local.records[k].rho - reference[k].rho));
  }
  if (local.records.size() < reference.size()) {
    replay_err = std::max(
        replay_err,
        std::abs(local.state.delta - reference[local.records.size()].delta));
  }

  // Bundle model: escapes to the global minimum at x = 1.
  trcore::TrParams bundle_params = params;
  bundle_params.max_iter = bundle_max_iter;
  bundle_params.tol_stationarity = 1e-9;
  bundle_params.tol_radius_indicator = 5e-7;
  trcore::RunResult bundle =
      trcore::run(problems::counterexample_problem(ce), bundle_params, x0);
  io::write_iterates_csv((out_dir / "bundle_iterates.csv").string(), bundle.records);

  const double psi_post = post_check_psi(
      problems::counterexample_problem(ce), local.state.x,
      std::max(1e-6, 2.0 * std::abs(local.state.x[0])), params.bundle_cap);

  json verdict{
      {"schema_version", 1},
      {"command", "counterexample"},
      {"a", ce.a},
      {"b", ce.b},
      {"x0", x0v},
      {"theta", ce.theta(bundle_params.beta1, bundle_params.beta2)},
      {"replay_max_abs_err", replay_err},
      {"local_model_final_x", local.state.x[0]},
      {"local_model_limit_near_zero", std::abs(local.state.x[0]) <= 1e-5},
      {"bundle_model_final_x", bundle.state.x[0]},
      {"bundle_model_limit_near_one", std::abs(bundle.state.x[0] - 1.0) <= 1e-6},
      {"bundle_iterations", bundle.state.k},
      {"psi_post_check", psi_post},
      {"non_stationary_limit", psi_post > 1e-3},
      {"local_status", trcore::to_string(local.state.status)},
      {"bundle_status", trcore::to_string(bundle.state.status)},
  };
  std::ofstream out(out_dir / "verdict.json");
  out << verdict.dump(2) << "\n";
  write_summary(out_dir, verdict);
  return 0;
}

int cmd_experiment1(Config config) {
  Config pass = config;
  ConfigReader cfg(std::move(config));
  if (!cfg.get_bool("sweep", false)) {
    // Single run: same as `solve` with the experiment-1 problem selected.
    pass.erase("sweep");
    pass["problem"] = "experiment1";
    return cmd_solve(std::move(pass));
  }

  const fs::path out_dir = prepare_out_dir(cfg);
  trcore::TrParams params = tr_params_from(cfg, experiment1_defaults());
  const double z_d = cfg.get_double("z_d", 1.0);
  const double u_d = cfg.get_double("u_d", -5.0);
  cfg.finish();

  std::ofstream out(out_dir / "sweep.csv");
  if (!out) throw Error("cannot write sweep.csv in " + out_dir.string());
  out << "u0,alpha,iterations,final_u,status\n";
  bool all_ok = true;
  for (double alpha : {1e-4, 1e-3, 1e-2}) {
    for (int u0i = -5; u0i <= 5; ++u0i) {
      ProblemDef def = problems::experiment1_problem(alpha, z_d, u_d);
      Vector u0(1);
      u0[0] = u0i;
      trcore::RunResult res = trcore::run(def, params, u0);
      out << u0i << ',' << io::format_real(alpha) << ',' << res.state.k << ','
          << io::format_real(res.state.x[0]) << ','
          << trcore::to_string(res.state.status) << '\n';
      if (res.state.status == trcore::Status::MaxIter) all_ok = false;
    }
  }
  return all_ok ? 0 : 2;
}

int cmd_table1(Config config) {
  ConfigReader cfg(std::move(config));
  const fs::path out_dir = prepare_out_dir(cfg);
  trcore::TrParams params = tr_params_from(cfg, experiment2_defaults());
  const bool two_phase = cfg.get_bool("two_phase_tol", true);
  const bool sampling = cfg.get_bool("allow_bundle_sampling", true);
  const double x1_threshold = cfg.get_double("x1_threshold", 0.5);

  int workers = cfg.get_int("workers",
                            static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("NSTR_WORKERS")) workers = std::atoi(env);
  if (workers < 1) workers = 1;
  cfg.finish();

  struct Cell {
    int m = 0;
    double alpha = 0.0, nu = 0.0;
    int iters = 0, loose = 0;
    double indicator = std::numeric_limits<double>::quiet_NaN();
    std::string status = "FAIL";
    int zero_count = 0, biactive = 0;
    bool ok = false;
  };
  std::vector<Cell> cells;
  for (int m : {19, 39})
    for (double alpha : {1e-1, 1e-2, 1e-3, 1e-4})
      for (double nu : {4.0, 8.0, 12.0, 18.0})
        cells.push_back(Cell{m, alpha, nu, 0, 0,
                             std::numeric_limits<double>::quiet_NaN(), "FAIL", 0, 0,
                             false});

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      Cell& c = cells[i];
      try {
        problems::ViTrackingProblem prob = problems::experiment2_problem(
            c.m, c.alpha, c.nu, two_phase, x1_threshold, sampling);
        Vector u0 = problems::smooth_warm_start(*prob.data->a, c.alpha, prob.z_d);
        TrackedRun run = run_tracked(prob.def, params, u0, prob.schedule);
        c.iters = run.result.state.k;
        c.loose = run.loose_iterations;
        c.status = trcore::to_string(run.result.state.status);
        double psi = post_check_psi(prob.def, run.result.state.x,
                                    std::min(run.result.state.delta, 1e-5),
                                    params.bundle_cap);
        c.indicator = std::min(run.result.state.g.norm(), psi);
        vi::ViSolution sol = vi::solve_vi(*prob.data, run.result.state.x, 1e-12);
        c.zero_count = prob.def.dim - sol.sets.inactive.size();
        c.biactive = sol.sets.biactive.size();
        c.ok = run.result.state.status != trcore::Status::MaxIter &&
               run.result.state.status != trcore::Status::Running;
      } catch (const std::exception& e) {
        c.status = std::string("FAIL: ") + e.what();
        c.ok = false;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::ofstream out(out_dir / "table1.csv");
  out << "h,alpha,nu,iterations,inexact_iterations,indicator,zero_count,"
         "biactive_count,status\n";
  int ok_count = 0;
  for (const auto& c : cells) {
    out << "1/" << (c.m + 1) << ',' << io::format_real(c.alpha) << ','
        << io::format_real(c.nu) << ',' << c.iters << ',' << c.loose << ','
        << io::format_real(c.indicator) << ',' << c.zero_count << ',' << c.biactive
        << ',' << (c.ok ? c.status : "FAIL") << '\n';
    if (c.ok) ++ok_count;
  }
  json summary{{"schema_version", 1},
               {"command", "table1"},
               {"cells", cells.size()},
               {"converged", ok_count}};
  write_summary(out_dir, summary);
  return ok_count * 10 >= static_cast<int>(cells.size()) * 9 ? 0 : 1;
}

int main_entry(const std::vector<std::string>& args) {
  try {
    if (args.empty()) {
      std::cerr << "usage: nstr <solve|counterexample|experiment1|table1> "
                   "[config-file] [key=value ...]\n";
      return 1;
    }
    const std::string& command = args[0];
    Config config;
    std::vector<std::string> overrides;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i].find('=') == std::string::npos) {
        Config from_file = io::parse_config_file(args[i]);
        for (auto& [k, v] : from_file) config[k] = v;
      } else {
        overrides.push_back(args[i]);
      }
    }
    io::apply_overrides(config, overrides);

    if (command == "solve") return cmd_solve(std::move(config));
    if (command == "counterexample") return cmd_counterexample(std::move(config));
    if (command == "experiment1") return cmd_experiment1(std::move(config));
    if (command == "table1") return cmd_table1(std::move(config));
    std::cerr << "unknown command: " << command << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nstr::cli

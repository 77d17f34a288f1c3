#include "nstr/problems.hpp"

#include <atomic>
#include <cmath>
#include <deque>
#include <mutex>
#include <tuple>

namespace nstr::problems {

TrackingObjective::TrackingObjective(Vector z_d_in, Vector u_d_in, double alpha_in)
    : z_d(std::move(z_d_in)), u_d(std::move(u_d_in)), alpha(alpha_in) {
  require(alpha > 0.0, "TrackingObjective: alpha > 0");
  require(z_d.size() == u_d.size(), "TrackingObjective: dimension mismatch");
}

double TrackingObjective::value(const Vector& y, const Vector& u) const {
  return 0.5 * (y - z_d).squaredNorm() + 0.5 * alpha * (u - u_d).squaredNorm();
}

CounterexampleParams::CounterexampleParams(double a_in, double b_in)
    : a(a_in), b(b_in) {
  require(0.0 < b && b < a, "CounterexampleParams: 0 < b < a");
}

double CounterexampleParams::theta(double beta1, double beta2) const {
  return (b / a - 1.0) * beta1 / (beta1 * beta2 - 1.0) + b / a;
}

double counterexample_f(const CounterexampleParams& p, double x) {
  return std::max({-p.a * x, -p.b * x, x - (1.0 + p.b)});
}

double counterexample_subgradient(const CounterexampleParams& p, double x) {
  if (x <= 0.0) return -p.a;
  if (x <= 1.0) return -p.b;
  return 1.0;
}

std::vector<double> counterexample_neighborhood_slopes(
    const CounterexampleParams& p, double x, double delta) {
  std::vector<double> slopes;
  if (x - delta <= 0.0) slopes.push_back(-p.a);
  if (x + delta >= 0.0 && x - delta <= 1.0) slopes.push_back(-p.b);
  if (x + delta >= 1.0) slopes.push_back(1.0);
  return slopes;
}

namespace {

models::GradientBundle slopes_to_bundle(const std::vector<double>& slopes) {
  std::vector<Vector> gs;
  gs.reserve(slopes.size());
  for (double s : slopes) {
    Vector g(1);
    g[0] = s;
    gs.push_back(g);
  }
  return models::GradientBundle(std::move(gs));
}

}  // namespace

ProblemDef counterexample_problem(const CounterexampleParams& params) {
  ProblemDef def;
  def.dim = 1;
  def.eval_f = [params](const Vector& x) { return counterexample_f(params, x[0]); };
  def.subgradient = [params](const Vector& x) {
    Vector g(1);
    g[0] = counterexample_subgradient(params, x[0]);
    return g;
  };
  def.bundle_for = [params](const Vector& x, double delta, int) {
    return slopes_to_bundle(counterexample_neighborhood_slopes(params, x[0], delta));
  };
  return def;
}

ProblemDef counterexample_problem_local_model(const CounterexampleParams& params) {
  ProblemDef def = counterexample_problem(params);
  def.bundle_for = [params](const Vector& x, double, int) {
    // Clarke generators at the point itself; the radius is ignored.
    std::vector<double> slopes;
    const double v = x[0];
    if (v < 0.0) {
      slopes = {-params.a};
    } else if (v == 0.0) {
      slopes = {-params.a, -params.b};
    } else if (v < 1.0) {
      slopes = {-params.b};
    } else if (v == 1.0) {
      slopes = {-params.b, 1.0};
    } else {
      slopes = {1.0};
    }
    return slopes_to_bundle(slopes);
  };
  return def;
}

std::vector<ReferenceIterate> counterexample_reference_iterates(
    const CounterexampleParams& params, const trcore::TrParams& tr, double x0,
    int k_max) {
  const double b1 = tr.beta1;
  const double b2 = tr.beta2;
  require(b1 + b1 * b2 < 1.0, "counterexample: beta1 + beta1*beta2 < 1");
  const double theta = params.theta(b1, b2);
  require(theta > 0.0 && theta < 1.0, "counterexample: theta in (0,1)");
  require(tr.eta1 >= theta, "counterexample: eta1 >= theta");
  const double x0_lower = 1.0 / (1.0 + (b1 * b2 - 1.0) / b1);
  require(x0 > x0_lower && x0 < 0.0, "counterexample: x0 in (1/(1+(b1 b2-1)/b1), 0)");
  const double delta0 = (b1 * b2 - 1.0) / b1 * x0;
  require(std::abs(tr.delta0 - delta0) <= 1e-12 * std::max(1.0, std::abs(delta0)),
          "counterexample: delta0 = (beta1 beta2 - 1)/beta1 * x0");
  require(tr.delta_min > delta0, "counterexample: delta_min > delta0");

  std::vector<ReferenceIterate> seq;
  seq.reserve(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    const int j = k / 2;
    const double scale = std::pow(b1 * b2, j);
    ReferenceIterate it;
    it.x = scale * x0;
    it.delta = (k % 2 == 0) ? scale * delta0 : b1 * scale * delta0;
    it.rho = (k % 2 == 0) ? theta : 1.0;
    seq.push_back(it);
  }
  return seq;
}

double experiment1_solution_operator(double u) {
  if (u >= 1.0) return 0.5 * (u - 1.0);
  if (u <= -1.0) return 0.5 * (u + 1.0);
  return 0.0;
}

namespace {

// Shared state of a VI-constrained tracking problem: VI data, objective,
// tolerance schedule, and a small memo of recent solves so that f, subgradient
// and bundle queries at the same control reuse one solve.
struct ViTrackingCore {
  vi::ViProblemData data;
  TrackingObjective obj;
  std::shared_ptr<vi::TolSchedule> schedule;
  vi::LipschitzConstants lip;
  bool allow_sampling = false;
  std::shared_ptr<std::atomic<bool>> sampling_used =
      std::make_shared<std::atomic<bool>>(false);

  mutable std::mutex mutex;
  mutable std::deque<std::tuple<Vector, double, vi::ViSolution>> memo;

  ViTrackingCore(vi::ViProblemData d, TrackingObjective o,
                 std::shared_ptr<vi::TolSchedule> s, bool sampling)
      : data(std::move(d)),
        obj(std::move(o)),
        schedule(std::move(s)),
        lip(vi::LipschitzConstants::from_bounds(*data.a->cached_bounds(), data.nu)),
        allow_sampling(sampling) {}

  vi::ViSolution solve(const Vector& u) const {
    const double tol = schedule->current();
    {
      std::lock_guard<std::mutex> lock(mutex);
      for (const auto& [cu, ctol, csol] : memo) {
        if (ctol <= tol && cu.size() == u.size() && (cu.array() == u.array()).all())
          return csol;
      }
    }
    vi::ViSolution sol = vi::solve_vi(data, u, tol);
    {
      std::lock_guard<std::mutex> lock(mutex);
      memo.emplace_front(u, tol, sol);
      if (memo.size() > 6) memo.pop_back();
    }
    return sol;
  }
};

ViTrackingProblem make_tracking_problem(vi::ViProblemData data,
                                         TrackingObjective obj,
                                         std::shared_ptr<vi::TolSchedule> schedule,
                                         bool allow_sampling) {
  auto core = std::make_shared<ViTrackingCore>(std::move(data), std::move(obj),
                                               std::move(schedule), allow_sampling);
  ViTrackingProblem out;
  out.data = std::make_shared<vi::ViProblemData>(core->data);
  out.schedule = core->schedule;
  out.z_d = core->obj.z_d;

  ProblemDef def;
  def.dim = core->data.dim();
  def.eval_f = [core](const Vector& u) {
    return core->obj.value(core->solve(u).y, u);
  };
  def.subgradient = [core](const Vector& u) {
    vi::ViSolution sol = core->solve(u);
    IndexSet n_set = sol.sets.strongly_active.set_union(sol.sets.biactive);
    return vi::adjoint_gradient(core->data, n_set, core->obj.grad_y(sol.y),
                                core->obj.grad_u(u), core->schedule->current());
  };
  def.bundle_for = [core](const Vector& u, double delta, int cap) {
    vi::ViSolution sol = core->solve(u);
    vi::BundleOptions opts;
    opts.cap = cap;
    opts.allow_sampling = core->allow_sampling;
    opts.solve_tol = core->schedule->current();
    vi::BundleResult res =
        vi::gradient_bundle(core->data, sol, core->lip, delta,
                            core->obj.grad_y(sol.y), core->obj.grad_u(u), opts);
    if (res.sampled) core->sampling_used->store(true);
    return res.bundle;
  };
  out.def = std::move(def);
  out.sampling_used = core->sampling_used;
  return out;
}

}  // namespace

ViTrackingProblem experiment1_tracking(double alpha, double z_d, double u_d) {
  require(alpha > 0.0, "experiment1_problem: alpha > 0");
  SparseMatrix a(1, 1);
  a.insert(0, 0) = 2.0;
  Vector zd(1), ud(1);
  zd[0] = z_d;
  ud[0] = u_d;
  return make_tracking_problem(
      vi::ViProblemData(linalg::SparseSpdMatrix(std::move(a)), 1.0),
      TrackingObjective(std::move(zd), std::move(ud), alpha),
      std::make_shared<vi::TolSchedule>(vi::TolSchedule::fixed(1e-12)),
      /*allow_sampling=*/false);
}

ProblemDef experiment1_problem(double alpha, double z_d, double u_d) {
  return experiment1_tracking(alpha, z_d, u_d).def;
}

ViTrackingProblem experiment2_problem(int m, double alpha, double nu,
                                       bool two_phase_tol, double x1_threshold,
                                       bool allow_bundle_sampling) {
  require(m >= 2, "experiment2_problem: m >= 2");
  require(alpha > 0.0 && nu > 0.0, "experiment2_problem: alpha, nu > 0");
  linalg::SparseSpdMatrix a = linalg::assemble_laplacian_2d(m);
  const double h = 1.0 / (m + 1);
  Vector z_d(m * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      z_d[j * m + i] = ((i + 1) * h >= x1_threshold) ? 1.0 : 0.0;
  Vector u_d = Vector::Zero(m * m);

  auto schedule = std::make_shared<vi::TolSchedule>(
      two_phase_tol ? vi::TolSchedule(1e-6, 1e-12, 1e-2)
                    : vi::TolSchedule::fixed(1e-12));
  ViTrackingProblem out = make_tracking_problem(
      vi::ViProblemData(std::move(a), nu),
      TrackingObjective(std::move(z_d), std::move(u_d), alpha), schedule,
      allow_bundle_sampling);
  out.m = m;
  return out;
}

ViTrackingProblem vi_tracking_problem(linalg::SparseSpdMatrix a, double alpha,
                                       double nu, Vector z_d, Vector u_d,
                                       bool two_phase_tol,
                                       bool allow_bundle_sampling) {
  require(z_d.size() == a.dim() && u_d.size() == a.dim(),
          "vi_tracking_problem: dimension mismatch");
  auto schedule = std::make_shared<vi::TolSchedule>(
      two_phase_tol ? vi::TolSchedule(1e-6, 1e-12, 1e-2)
                    : vi::TolSchedule::fixed(1e-12));
  return make_tracking_problem(
      vi::ViProblemData(std::move(a), nu),
      TrackingObjective(std::move(z_d), std::move(u_d), alpha), schedule,
      allow_bundle_sampling);
}

Vector smooth_warm_start(const linalg::SparseSpdMatrix& a, double alpha,
                         const Vector& z_d) {
  const auto& m = a.matrix();
  SparseMatrix sys = SparseMatrix(m * m) * alpha;
  SparseMatrix eye(m.rows(), m.cols());
  eye.setIdentity();
  sys += eye;
  return linalg::cg_solve(linalg::SparseSpdMatrix(std::move(sys)), m * z_d, 1e-12,
                          20000);
}

}  // namespace nstr::problems

#pragma once

#include <atomic>
#include <memory>
#include <vector>

#include "nstr/common.hpp"
#include "nstr/problem.hpp"
#include "nstr/trcore.hpp"
#include "nstr/vi.hpp"

namespace nstr::problems {

/// Tracking objective J(y, u) = 0.5 ||y - z_d||^2 + (alpha/2) ||u - u_d||^2.
struct TrackingObjective {
  Vector z_d;
  Vector u_d;
  double alpha = 0.0;

  TrackingObjective(Vector z_d, Vector u_d, double alpha);

  double value(const Vector& y, const Vector& u) const;
  Vector grad_y(const Vector& y) const { return y - z_d; }
  Vector grad_u(const Vector& u) const { return alpha * (u - u_d); }
};

/// Parameters of the piecewise affine objective max{-a x, -b x, x - (1+b)}.
struct CounterexampleParams {
  double a = 2.0;
  double b = 1.0;

  CounterexampleParams(double a, double b);

  /// theta = (b/a - 1) beta1/(beta1 beta2 - 1) + b/a, the even-iteration
  /// quality indicator of the closed-form recurrence.
  double theta(double beta1, double beta2) const;
};

double counterexample_f(const CounterexampleParams& params, double x);

/// One Bouligand subgradient of the counterexample objective.
double counterexample_subgradient(const CounterexampleParams& params, double x);

/// Generators of conv(U(x, delta)): the branch slopes of all affine pieces the
/// closed ball [x - delta, x + delta] meets.
std::vector<double> counterexample_neighborhood_slopes(
    const CounterexampleParams& params, double x, double delta);

/// ProblemDef with the neighborhood bundle model phi.
ProblemDef counterexample_problem(const CounterexampleParams& params);

/// ProblemDef with the purely local model phi~ (bundle = Clarke generators at
/// the point itself, delta ignored).
ProblemDef counterexample_problem_local_model(const CounterexampleParams& params);

struct ReferenceIterate {
  double x = 0.0;
  double delta = 0.0;
  double rho = 0.0;  // rho_k of the step taken FROM this iterate
};

/// Closed-form reference sequence of the pathological run:
/// x_{2k} = (b1 b2)^k x0, x_{2k+1} = x_{2k}, Delta_{2k} = (b1 b2)^k Delta_0,
/// Delta_{2k+1} = b1 (b1 b2)^k Delta_0, rho_{2k} = theta, rho_{2k+1} = 1.
/// Preconditions (parameter inequalities and Delta_0 = (b1 b2 - 1)/b1 x0) are
/// verified and raise PreconditionViolated naming the failing one.
std::vector<ReferenceIterate> counterexample_reference_iterates(
    const CounterexampleParams& params, const trcore::TrParams& tr, double x0,
    int k_max);

struct ViTrackingProblem {
  ProblemDef def;
  std::shared_ptr<vi::ViProblemData> data;
  std::shared_ptr<vi::TolSchedule> schedule;
  std::shared_ptr<std::atomic<bool>> sampling_used;
  Vector z_d;
  int m = 0;
};

/// Scalar soft-thresholding problem: VI 2y(v-y) + |v| - |y| >= u(v-y) with
/// tracking objective. S(u) = (u-1)/2 for u >= 1, 0 on [-1,1], (u+1)/2 below.
ProblemDef experiment1_problem(double alpha, double z_d, double u_d);
ViTrackingProblem experiment1_tracking(double alpha, double z_d, double u_d);

/// Closed-form solution operator of the scalar VI (test oracle and plots).
double experiment1_solution_operator(double u);

/// 2D Laplacian sparse-state tracking problem on the m x m interior grid:
/// z_d is the indicator of the right half {x1 >= x1_threshold}, u_d = 0.
/// VI solves follow the two-phase tolerance schedule (loose until the relative
/// step norm falls under 1e-2, then tight).
ViTrackingProblem experiment2_problem(int m, double alpha, double nu,
                                      bool two_phase_tol = true,
                                      double x1_threshold = 0.5,
                                      bool allow_bundle_sampling = true);

/// Tracking problem over an arbitrary SPD matrix (custom matrix-file runs).
ViTrackingProblem vi_tracking_problem(linalg::SparseSpdMatrix a, double alpha,
                                      double nu, Vector z_d, Vector u_d,
                                      bool two_phase_tol,
                                      bool allow_bundle_sampling);

/// Smooth warm start for the tracking problem: solves (I + alpha A^2) u = A z_d,
/// the optimality system of the constraint-smooth problem A y = u.
Vector smooth_warm_start(const linalg::SparseSpdMatrix& a, double alpha,
                         const Vector& z_d);

}  // namespace nstr::problems

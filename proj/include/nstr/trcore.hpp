#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nstr/common.hpp"
#include "nstr/models.hpp"
#include "nstr/problem.hpp"

namespace nstr::trcore {

enum class HessianMode { Zero, Bfgs };

/// Trust-region configuration. Ordering constraints are checked at
/// construction via validate().
struct TrParams {
  double delta_min = 1e-3;
  double eta1 = 0.25;
  double eta2 = 0.75;
  double beta1 = 0.5;
  double beta2 = 1.1;
  double mu = 0.8;
  double delta0 = 1.0;
  int max_iter = 500;
  double tol_stationarity = 1e-6;  // TOL for min{||g||, psi}
  double tol_step = 1e-6;          // relative step + radius criterion
  double c_h = 1e8;                // spectral cap on H_k

  // Implementation knobs beyond the core parameter set.
  int bundle_cap = 14;            // powerset cap forwarded to bundle_for
  bool radius_growth_floor = true;   // apply max{delta_min, .} on non-null updates
  bool rho_zeroing = true;           // modified rho = 0 when psi <= ||g|| delta
  double tol_radius_indicator = 0.0; // if > 0, indicator stop also needs delta <= this
  HessianMode hessian_mode = HessianMode::Bfgs;
  double h0_scale = 1.0;

  void validate() const;
};

enum class Status {
  Running,
  StationarySubgradientZero,
  StationaryIndicator,
  StepTooSmall,
  MaxIter,
};

std::string to_string(Status s);

struct TrState {
  int k = 0;
  Vector x;
  double f_x = 0.0;
  double delta = 0.0;
  Matrix H;
  Vector g;
  Status status = Status::Running;
};

enum class StepKind {
  StandardSuccess,
  StandardNull,
  ModifiedSuccess,
  ModifiedNull,
  Stop,
};

std::string to_string(StepKind k);
StepKind step_kind_from_string(const std::string& s);

/// One row of the per-iteration audit trail.
struct IterateRecord {
  int k = 0;
  double f = 0.0;
  double norm_g = 0.0;
  std::optional<double> psi;
  double delta = 0.0;
  std::optional<double> rho;
  StepKind step_kind = StepKind::Stop;
  std::optional<int> bundle_size;
  double wall_ms = 0.0;
};

/// rho = (f_x - f_trial) / (f_x - q_d). The denominator must be positive:
/// non-positive values indicate a broken subproblem solver.
double quality_standard(double f_x, double f_trial, double q_d);

/// Modified quality indicator: 0 when psi <= norm_g * delta (null step forced),
/// otherwise the ratio with denominator f_x - qmod_d.
double quality_modified(double f_x, double f_trial, double qmod_d, double psi,
                        double norm_g, double delta);

/// Dogleg solution of min <g,d> + 0.5 d'Hd s.t. ||d|| <= delta. Returns the
/// Newton point when H is positive definite and it fits in the ball, the
/// dogleg path point otherwise, and the exact Cauchy point along -g when H is
/// not positive definite. Satisfies the generalized Cauchy-decrease condition
/// with mu = 1.
Vector dogleg_step(const Vector& g, const Matrix& h, double delta);

struct RadiusUpdate {
  Vector x;
  double delta = 0.0;
};

/// Iterate/radius update table: null step below eta1, radius shrink by beta1;
/// otherwise accept and keep or grow the radius, pushed up to delta_min when
/// growth_floor is set.
RadiusUpdate update(const Vector& x, const Vector& d, double delta, double rho,
                    const TrParams& params);

/// BFGS update with curvature safeguard and spectral cap: skipped when
/// <s, y> <= 1e-8 ||s|| ||y||; rescaled by c_h / estimate when the power-
/// iteration norm estimate exceeds c_h.
Matrix hessian_update(const Matrix& h, const Vector& s, const Vector& y_diff,
                      double c_h);

/// Power-iteration estimate of the spectral norm of a symmetric matrix.
double spectral_norm_estimate(const Matrix& m, int iters = 60);

struct IterationEvent {
  const TrState& before;  // state at iteration k (x_k, delta_k, ...)
  const TrState& after;   // state at k+1
  const IterateRecord& record;
};

using Observer = std::function<void(const IterationEvent&)>;

struct RunResult {
  TrState state;
  std::vector<IterateRecord> records;
};

/// The non-smooth trust-region loop: standard dogleg subproblem while
/// delta >= delta_min, bundle model with the modified Cauchy step below.
/// Every iteration asserts its Cauchy-decrease inequality and monotonicity of
/// f; violations raise instead of being absorbed.
RunResult run(const ProblemDef& problem, const TrParams& params, const Vector& x0,
              const Observer& observer = {});

}  // namespace nstr::trcore

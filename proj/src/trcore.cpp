#include "nstr/trcore.hpp"

#include <Eigen/Cholesky>

#include <chrono>
#include <cmath>
#include <limits>

namespace nstr::trcore {

void TrParams::validate() const {
  require(delta_min > 0.0, "TrParams: delta_min > 0");
  require(0.0 < eta1 && eta1 < eta2 && eta2 < 1.0, "TrParams: 0 < eta1 < eta2 < 1");
  require(0.0 < beta1 && beta1 < 1.0, "TrParams: beta1 in (0,1)");
  require(beta2 > 1.0, "TrParams: beta2 > 1");
  require(0.0 < mu && mu <= 1.0, "TrParams: mu in (0,1]");
  // Algorithm initialization asks for delta0 > delta_min, but the analysis of
  // the pathological example deliberately starts below the threshold, so only
  // positivity is enforced here.
  require(delta0 > 0.0, "TrParams: delta0 > 0");
  require(max_iter >= 1, "TrParams: max_iter >= 1");
  require(tol_stationarity > 0.0, "TrParams: tol_stationarity > 0");
  require(tol_step > 0.0, "TrParams: tol_step > 0");
  require(c_h > 0.0, "TrParams: c_h > 0");
  require(bundle_cap >= 0, "TrParams: bundle_cap >= 0");
  require(h0_scale >= 0.0, "TrParams: h0_scale >= 0");
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Running: return "running";
    case Status::StationarySubgradientZero: return "stationary_subgradient_zero";
    case Status::StationaryIndicator: return "stationary_indicator";
    case Status::StepTooSmall: return "step_too_small";
    case Status::MaxIter: return "max_iter";
  }
  return "unknown";
}

std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::StandardSuccess: return "standard_success";
    case StepKind::StandardNull: return "standard_null";
    case StepKind::ModifiedSuccess: return "modified_success";
    case StepKind::ModifiedNull: return "modified_null";
    case StepKind::Stop: return "stop";
  }
  return "unknown";
}

StepKind step_kind_from_string(const std::string& s) {
  if (s == "standard_success") return StepKind::StandardSuccess;
  if (s == "standard_null") return StepKind::StandardNull;
  if (s == "modified_success") return StepKind::ModifiedSuccess;
  if (s == "modified_null") return StepKind::ModifiedNull;
  if (s == "stop") return StepKind::Stop;
  throw Error("unknown step kind: " + s);
}

double quality_standard(double f_x, double f_trial, double q_d) {
  const double denom = f_x - q_d;
  if (!(denom > 0.0)) throw DegenerateDenominator(denom);
  return (f_x - f_trial) / denom;
}

double quality_modified(double f_x, double f_trial, double qmod_d, double psi,
                        double norm_g, double delta) {
  require(psi >= 0.0 && delta > 0.0, "quality_modified: psi >= 0, delta > 0");
  if (psi <= norm_g * delta) return 0.0;
  const double denom = f_x - qmod_d;
  if (!(denom > 0.0)) throw DegenerateDenominator(denom);
  return (f_x - f_trial) / denom;
}

double spectral_norm_estimate(const Matrix& m, int iters) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return 0.0;
  if (n == 1) return std::abs(m(0, 0));
  Vector v = Vector::Ones(n);
  v[0] += 0.5;  // break symmetry against alternating eigenvectors
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector mv = m * v;
    double norm = mv.norm();
    if (norm <= 1e-300) return 0.0;
    double next = norm;  // Rayleigh-free: |lambda|_max via norm growth
    v = mv / norm;
    if (it > 4 && std::abs(next - est) <= 1e-12 * std::max(1.0, next)) {
      est = next;
      break;
    }
    est = next;
  }
  return est;
}

Vector dogleg_step(const Vector& g, const Matrix& h, double delta) {
  require(delta > 0.0, "dogleg_step: delta > 0");
  const double gn = g.norm();
  require(gn > 0.0, "dogleg_step: g != 0");

  const Vector hg = h * g;
  const double ghg = g.dot(hg);

  // Non-positive curvature along -g: the exact Cauchy point is on the boundary.
  if (ghg <= 0.0) return (-delta / gn) * g;

  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) {
    // H not positive definite: exact Cauchy point along -g.
    const double t = std::min(delta, gn * gn * gn / ghg);
    return (-t / gn) * g;
  }

  const Vector newton = -llt.solve(g);
  if (newton.allFinite() && newton.norm() <= delta) return newton;

  const Vector cauchy = -(g.squaredNorm() / ghg) * g;
  const double cn = cauchy.norm();
  if (cn >= delta) return (-delta / gn) * g;

  // Root of ||pU + tau (pN - pU)|| = delta on the second dogleg leg.
  const Vector seg = newton - cauchy;
  const double a = seg.squaredNorm();
  const double b = 2.0 * cauchy.dot(seg);
  const double c = cauchy.squaredNorm() - delta * delta;
  const double disc = std::max(0.0, b * b - 4.0 * a * c);
  const double tau = (-b + std::sqrt(disc)) / (2.0 * a);
  return cauchy + tau * seg;
}

RadiusUpdate update(const Vector& x, const Vector& d, double delta, double rho,
                    const TrParams& params) {
  RadiusUpdate out;
  if (rho <= params.eta1) {
    out.x = x;
    out.delta = params.beta1 * delta;
  } else if (rho <= params.eta2) {
    out.x = x + d;
    out.delta = params.radius_growth_floor ? std::max(params.delta_min, delta) : delta;
  } else {
    out.x = x + d;
    out.delta = params.radius_growth_floor
                    ? std::max(params.delta_min, params.beta2 * delta)
                    : params.beta2 * delta;
  }
  return out;
}

Matrix hessian_update(const Matrix& h, const Vector& s, const Vector& y_diff,
                      double c_h) {
  const double sy = s.dot(y_diff);
  if (sy <= 1e-8 * s.norm() * y_diff.norm()) return h;  // curvature skip

  const Vector hs = h * s;
  const double shs = s.dot(hs);
  if (!(shs > 0.0)) return h;

  Matrix out = h;
  out.noalias() -= (hs * hs.transpose()) / shs;
  out.noalias() += (y_diff * y_diff.transpose()) / sy;

  const double est = spectral_norm_estimate(out) * 1.01;
  if (est > c_h) out *= c_h / est;
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cauchy_bound(double mu, double nu, double delta, double h_norm) {
  const double ratio = h_norm > 0.0 ? nu / h_norm : kInf;
  return 0.5 * mu * nu * std::min(delta, ratio);
}

void assert_cauchy(double pred, double bound) {
  const double slack = 1e-12 * std::max({1.0, pred, bound});
  if (pred + slack < bound) throw CauchyDecreaseViolation(pred, bound);
}

}  // namespace

RunResult run(const ProblemDef& problem, const TrParams& params, const Vector& x0,
              const Observer& observer) {
  params.validate();
  require(problem.dim == static_cast<int>(x0.size()), "run: x0 dimension mismatch");
  check_finite(x0, "run: x0");

  const int n = problem.dim;
  RunResult res;
  TrState& st = res.state;
  st.k = 0;
  st.x = x0;
  st.f_x = problem.eval_f(x0);
  st.delta = params.delta0;
  st.H = (params.hessian_mode == HessianMode::Bfgs)
             ? Matrix(params.h0_scale * Matrix::Identity(n, n))
             : Matrix(Matrix::Zero(n, n));
  st.status = Status::Running;

  double h_norm = spectral_norm_estimate(st.H);
  const double x0_scale = std::max(1.0, x0.norm());

  bool have_pair = false;
  Vector pair_s, pair_g;

  auto emit = [&](const TrState& before, const IterateRecord& rec) {
    res.records.push_back(rec);
    if (observer) observer(IterationEvent{before, st, res.records.back()});
  };

  while (true) {
    if (st.k >= params.max_iter) {
      st.status = Status::MaxIter;
      break;
    }
    const auto t0 = std::chrono::steady_clock::now();
    TrState before = st;

    Vector g = problem.subgradient(st.x);
    check_finite(g, "run: subgradient");
    if (have_pair && params.hessian_mode == HessianMode::Bfgs) {
      st.H = hessian_update(st.H, pair_s, g - pair_g, params.c_h);
      h_norm = spectral_norm_estimate(st.H);
      have_pair = false;
    }
    st.g = g;
    before = st;
    const double gn = g.norm();

    IterateRecord rec;
    rec.k = st.k;
    rec.f = st.f_x;
    rec.norm_g = gn;
    rec.delta = st.delta;

    if (gn == 0.0) {
      st.status = Status::StationarySubgradientZero;
      rec.step_kind = StepKind::Stop;
      rec.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0).count();
      emit(before, rec);
      break;
    }

    const bool standard = st.delta >= params.delta_min;
    Vector d;
    double rho = 0.0;
    double f_trial = st.f_x;
    bool trial_evaluated = false;

    if (standard) {
      d = dogleg_step(g, st.H, st.delta);
      const double pred = -(g.dot(d) + 0.5 * d.dot(st.H * d));
      assert_cauchy(pred, cauchy_bound(params.mu, gn, st.delta, h_norm * 1.01));
      if (!(pred > 0.0)) throw DegenerateDenominator(pred);
      f_trial = problem.eval_f(st.x + d);
      trial_evaluated = true;
      rho = (st.f_x - f_trial) / pred;
    } else {
      models::GradientBundle bundle =
          problem.bundle_for(st.x, st.delta, params.bundle_cap);
      rec.bundle_size = bundle.size();
      models::ModifiedStep step = models::modified_cauchy_step(bundle, st.H, st.delta);
      rec.psi = step.psi;

      const bool radius_ok = params.tol_radius_indicator <= 0.0 ||
                             st.delta <= params.tol_radius_indicator;
      if (std::min(gn, step.psi) <= params.tol_stationarity && radius_ok) {
        st.status = Status::StationaryIndicator;
        rec.step_kind = StepKind::Stop;
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();
        emit(before, rec);
        break;
      }

      if (step.degenerate) {
        // Degenerate bundle: direction undefined, force a null step.
        d = Vector::Zero(n);
        rho = 0.0;
      } else {
        d = step.d;
        const double pred = -step.qmod;
        assert_cauchy(pred,
                      cauchy_bound(params.mu, step.psi, st.delta, h_norm * 1.01));
        if (params.rho_zeroing && step.psi <= gn * st.delta) {
          rho = 0.0;  // eq. second case: comparison with the local model fails
        } else {
          if (!(pred > 0.0)) throw DegenerateDenominator(pred);
          f_trial = problem.eval_f(st.x + d);
          trial_evaluated = true;
          rho = (st.f_x - f_trial) / pred;
        }
      }
    }

    rec.rho = rho;
    const bool success = rho > params.eta1;
    rec.step_kind = standard
                        ? (success ? StepKind::StandardSuccess : StepKind::StandardNull)
                        : (success ? StepKind::ModifiedSuccess : StepKind::ModifiedNull);

    RadiusUpdate upd = update(st.x, d, st.delta, rho, params);
    double f_new = st.f_x;
    if (success) {
      if (!trial_evaluated) f_trial = problem.eval_f(upd.x);
      f_new = f_trial;
      if (f_new > st.f_x + 1e-12 * std::max(1.0, std::abs(st.f_x)))
        throw Error("run: objective increased across an accepted step");
      pair_s = d;
      pair_g = g;
      have_pair = true;
    }

    const double step_norm = success ? d.norm() : 0.0;
    st.x = upd.x;
    st.f_x = f_new;
    st.delta = upd.delta;
    st.k += 1;

    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0).count();
    emit(before, rec);

    if (step_norm / x0_scale < params.tol_step && st.delta < params.tol_step) {
      st.status = Status::StepTooSmall;
      break;
    }
  }
  return res;
}

}  // namespace nstr::trcore

#pragma once

#include <memory>
#include <optional>

#include "nstr/common.hpp"
#include "nstr/index_set.hpp"
#include "nstr/linalg.hpp"
#include "nstr/models.hpp"

namespace nstr::vi {

/// Data of the variational inequality of the second kind
///   <A y, v - y> + nu (||v||_1 - ||y||_1) >= <u, v - y>  for all v,
/// written through the scaled complementarity system A y + nu q = u,
/// |q_i| <= 1, y_i q_i = |y_i|.
struct ViProblemData {
  ViProblemData(linalg::SparseSpdMatrix a, double nu, double act_tol = 1e-9);

  std::shared_ptr<const linalg::SparseSpdMatrix> a;
  double nu = 1.0;
  double act_tol = 1e-9;

  int dim() const { return a->dim(); }
};

struct IndexClassification {
  IndexSet inactive;         // |y_i| > act_tol
  IndexSet strongly_active;  // |y_i| <= act_tol and |q_i| < 1 - act_tol
  IndexSet biactive;         // remainder
};

struct ViSolution {
  Vector y;
  Vector q;
  IndexClassification sets;
  double residual = 0.0;
};

/// Upper bounds on the Lipschitz moduli of u -> y (max-norm) and u -> q:
/// l_y = 1 / lambda_min_lower, l_q = (lambda_max_upper / lambda_min_lower + 1) / nu.
struct LipschitzConstants {
  double l_y = 0.0;
  double l_q = 0.0;

  static LipschitzConstants from_bounds(const linalg::SpectralBounds& b, double nu);
};

/// Partition of [0, n) by activity, tolerances as in IndexClassification.
IndexClassification classify_sets(const Vector& y, const Vector& q, double act_tol);

/// Primal active-set solve of the VI: iterate sign guesses, solve the reduced
/// SPD system on the tentative support, reclassify. Falls back to proximal-
/// gradient sweeps (soft thresholding with step 1/lambda_max_upper) when the
/// active-set loop stalls, then resumes polishing. The returned y is the unique
/// minimizer of 0.5 y'Ay - u'y + nu ||y||_1.
ViSolution solve_vi(const ViProblemData& data, const Vector& u, double tol = 1e-12);

/// Action of the Bouligand element A(N)^{-1} chi(N) on h, with N = As u B0:
/// zero on N, reduced solve on the complement. Independent of nu.
Vector bouligand_apply(const ViProblemData& data, const IndexSet& n_set,
                       const Vector& h, double tol = 1e-12);

/// Adjoint-based reduced gradient g = G' grad_y + grad_u with
/// G' = chi(N) A(N)^{-1}: the adjoint state is zeroed on N before adding
/// grad_u.
Vector adjoint_gradient(const ViProblemData& data, const IndexSet& n_set,
                        const Vector& grad_y, const Vector& grad_u,
                        double tol = 1e-12);

/// Possibly biactive indices {i : |y_i| < l_y delta and ||q_i| - 1| < l_q delta}.
IndexSet possibly_biactive(const ViSolution& sol, const LipschitzConstants& lip,
                           double delta);

struct BundleOptions {
  int cap = 14;                  // max |P| for exact powerset enumeration
  bool allow_sampling = false;   // structured + seeded sampling above the cap
  int sample_budget = 256;
  unsigned seed = 0x5eedu;
  double solve_tol = 1e-12;
};

struct BundleResult {
  models::GradientBundle bundle;
  bool sampled = false;  // heuristic: powerset was sampled, superset property void
};

/// Gradient bundle {chi(N) A(N)^{-1} grad_y + grad_u : N = As u B0, B0 in 2^P}.
/// Subsets are enumerated in canonical binary-counting order over the sorted
/// possibly-biactive set; throws BiactiveSetTooLarge when |P| exceeds the cap
/// unless sampling is explicitly allowed.
BundleResult gradient_bundle(const ViProblemData& data, const ViSolution& sol,
                             const LipschitzConstants& lip, double delta,
                             const Vector& grad_y, const Vector& grad_u,
                             const BundleOptions& opts);

/// Brute-force directional derivative eta = S'(u; h): enumerates sign patterns
/// of the biactive components of the cone-constrained derivative VI and
/// returns the unique pattern passing feasibility and optimality. Test-scale
/// oracle (|B| <= 8).
Vector directional_derivative_oracle(const ViProblemData& data, const Vector& u,
                                     const Vector& h, double tol = 1e-9);

/// Two-phase VI solve tolerance: loose while the trust-region step norm
/// criterion is above the switch threshold, tight afterwards (sticky).
class TolSchedule {
public:
  TolSchedule(double loose, double tight, double switch_at)
      : loose_(loose), tight_(tight), switch_at_(switch_at) {}
  static TolSchedule fixed(double tol) { return TolSchedule(tol, tol, 0.0); }

  double current() const { return tight_phase_ ? tight_ : loose_; }
  bool tight_phase() const { return tight_phase_; }
  /// Feed the relative step norm of the latest successful step.
  void observe_step(double rel_step_norm) {
    if (rel_step_norm < switch_at_) tight_phase_ = true;
  }

private:
  double loose_, tight_, switch_at_;
  bool tight_phase_ = false;
};

}  // namespace nstr::vi

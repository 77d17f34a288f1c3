#pragma once

#include <optional>
#include <vector>

#include "nstr/common.hpp"
#include "nstr/index_set.hpp"

namespace nstr::models {

/// Finite set of generators {g_j} of the polyhedral model
/// phi(d) = max_j <g_j, d>. Gradients closer than the dedup tolerance are
/// merged on construction; provenance optionally records which biactive subset
/// produced each retained gradient.
class GradientBundle {
public:
  static constexpr double kDedupTol = 1e-12;

  explicit GradientBundle(std::vector<Vector> gradients,
                          std::vector<IndexSet> provenance = {});

  int size() const { return static_cast<int>(gradients_.size()); }
  int dim() const { return static_cast<int>(gradients_.front().size()); }
  const std::vector<Vector>& gradients() const { return gradients_; }
  const Vector& gradient(int j) const { return gradients_[static_cast<std::size_t>(j)]; }
  const std::vector<IndexSet>& provenance() const { return provenance_; }

private:
  std::vector<Vector> gradients_;
  std::vector<IndexSet> provenance_;
};

/// phi(d) = max_j <g_j, d>. Positively homogeneous in d.
double phi_eval(const GradientBundle& bundle, const Vector& d);

struct StationarityResult {
  double psi = 0.0;       // distance from the origin to conv{g_j}
  Vector d_star;          // -gbar/||gbar||, or zero when degenerate
  Vector min_norm_point;  // gbar
  // psi at roundoff scale relative to the largest generator: the min-norm
  // point is numerically zero and no meaningful direction exists.
  bool degenerate = false;
};

/// Stationarity measure psi = -min_{||d||<=1} phi(d), computed as the distance
/// from the origin to the convex hull of the bundle by Wolfe's min-norm-point
/// algorithm. Ties in the linear minimization oracle are broken by lowest
/// index; the iteration cap is 10 * (bundle size + dimension).
StationarityResult stationarity_measure(const GradientBundle& bundle);

struct ModifiedStep {
  Vector d;           // step, ||d|| <= delta
  double zeta = 0.0;  // phi(d) = max_j <g_j, d>
  double qmod = 0.0;  // zeta + 0.5 d'Hd (model value relative to f(x))
  double psi = 0.0;
  Vector d_star;
  bool degenerate = false;  // zero step, caller must take a null step
};

/// Cauchy point of the modified trust-region subproblem along the min-norm
/// descent direction: t = delta if d*'H d* <= 0, else min{delta, psi/(d*'H d*)}.
/// The pair (d, zeta) is feasible for the linear-quadratic reformulation and
/// satisfies the modified Cauchy-decrease condition with mu = 1:
///   -zeta - 0.5 d'Hd >= (1/2) psi min{delta, psi/||H||}.
ModifiedStep modified_cauchy_step(const GradientBundle& bundle, const Matrix& h,
                                  double delta);

/// Distance from the origin to the convex hull by exhaustive face enumeration.
/// Exponential in the bundle size; exact reference for small bundles.
double hull_distance_bruteforce(const GradientBundle& bundle,
                                Vector* arg = nullptr);

}  // namespace nstr::models

#include "nstr/models.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace nstr::models {

GradientBundle::GradientBundle(std::vector<Vector> gradients,
                               std::vector<IndexSet> provenance) {
  if (gradients.empty())
    throw PreconditionViolated("GradientBundle: empty generator set");
  const auto dim = gradients.front().size();
  const bool with_prov = !provenance.empty();
  if (with_prov && provenance.size() != gradients.size())
    throw PreconditionViolated("GradientBundle: provenance size mismatch");

  for (std::size_t j = 0; j < gradients.size(); ++j) {
    const Vector& g = gradients[j];
    if (g.size() != dim)
      throw PreconditionViolated("GradientBundle: inconsistent dimensions");
    check_finite(g, "GradientBundle");
    bool dup = false;
    for (const Vector& kept : gradients_) {
      if ((kept - g).lpNorm<Eigen::Infinity>() <= kDedupTol) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      gradients_.push_back(g);
      if (with_prov) provenance_.push_back(provenance[j]);
    }
  }
}

double phi_eval(const GradientBundle& bundle, const Vector& d) {
  if (d.size() != bundle.dim())
    throw PreconditionViolated("phi_eval: dimension mismatch");
  double best = -std::numeric_limits<double>::infinity();
  for (const Vector& g : bundle.gradients()) best = std::max(best, g.dot(d));
  return best;
}

namespace {

// Min-norm point of the affine hull of the selected gradients: solve the
// KKT system [Gram 1; 1' 0][w; nu] = [0; 1]. A tiny ridge keeps the
// factorization stable when the corral is nearly affinely dependent.
bool affine_min_norm(const std::vector<Vector>& gs, const std::vector<int>& sel,
                     Eigen::VectorXd& w) {
  const int k = static_cast<int>(sel.size());
  Matrix kkt = Matrix::Zero(k + 1, k + 1);
  double scale = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      double v = gs[static_cast<std::size_t>(sel[static_cast<std::size_t>(i)])].dot(
          gs[static_cast<std::size_t>(sel[static_cast<std::size_t>(j)])]);
      kkt(i, j) = v;
      kkt(j, i) = v;
      scale = std::max(scale, std::abs(v));
    }
  }
  const double ridge = 1e-14 * std::max(1.0, scale);
  for (int i = 0; i < k; ++i) kkt(i, i) += ridge;
  for (int i = 0; i < k; ++i) {
    kkt(i, k) = 1.0;
    kkt(k, i) = 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs[k] = 1.0;
  // The KKT matrix is an indefinite saddle system; use full-pivot LU.
  Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  if (!sol.allFinite()) return false;
  w = sol.head(k);
  return true;
}

}  // namespace

StationarityResult stationarity_measure(const GradientBundle& bundle) {
  const auto& gs = bundle.gradients();
  const int m = bundle.size();
  const int n = bundle.dim();

  double scale2 = 0.0;
  for (const Vector& g : gs) scale2 = std::max(scale2, g.squaredNorm());
  const double tol = 1e-12 * std::max(1.0, scale2);

  // Start from the shortest generator (lowest index on ties).
  int start = 0;
  for (int j = 1; j < m; ++j)
    if (gs[static_cast<std::size_t>(j)].squaredNorm() <
        gs[static_cast<std::size_t>(start)].squaredNorm())
      start = j;

  std::vector<int> corral{start};
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(1);
  Vector x = gs[static_cast<std::size_t>(start)];

  const int max_iter = 10 * (m + n);
  int it = 0;
  for (; it < max_iter; ++it) {
    // Linear minimization oracle over the generators, lowest index on ties.
    int jmin = 0;
    double best = x.dot(gs[0]);
    for (int j = 1; j < m; ++j) {
      double v = x.dot(gs[static_cast<std::size_t>(j)]);
      if (v < best - 0.0) {
        best = v;
        jmin = j;
      }
    }
    if (x.squaredNorm() - best <= tol) break;  // x is the min-norm point
    bool present = false;
    for (int c : corral)
      if (c == jmin) present = true;
    if (present) break;

    corral.push_back(jmin);
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(static_cast<int>(corral.size()));
    lam.head(weights.size()) = weights;

    // Minor cycle: project onto the affine hull, walk back to the simplex
    // boundary and drop non-positive weights until interior.
    while (true) {
      Eigen::VectorXd w;
      if (!affine_min_norm(gs, corral, w) || corral.size() == 1) {
        weights = Eigen::VectorXd::Ones(1);
        corral.assign(1, corral.back());
        break;
      }
      const double eps = 1e-13;
      if ((w.array() > eps).all()) {
        weights = w;
        break;
      }
      double theta = 1.0;
      for (int i = 0; i < w.size(); ++i) {
        if (w[i] <= eps) {
          double denom = lam[i] - w[i];
          if (denom > 0.0) theta = std::min(theta, lam[i] / denom);
        }
      }
      lam = (1.0 - theta) * lam + theta * w;
      std::vector<int> next;
      std::vector<double> next_w;
      for (int i = 0; i < lam.size(); ++i) {
        if (lam[i] > eps) {
          next.push_back(corral[static_cast<std::size_t>(i)]);
          next_w.push_back(lam[i]);
        }
      }
      if (next.empty()) {
        next.push_back(corral.back());
        next_w.push_back(1.0);
      }
      corral = next;
      lam = Eigen::Map<Eigen::VectorXd>(next_w.data(),
                                        static_cast<int>(next_w.size()));
      double s = lam.sum();
      lam /= s;
      if (corral.size() == 1) {
        weights = lam;
        break;
      }
    }

    x = Vector::Zero(n);
    for (std::size_t i = 0; i < corral.size(); ++i)
      x += weights[static_cast<int>(i)] * gs[static_cast<std::size_t>(corral[i])];
  }
  if (it == max_iter)
    throw NotConverged("stationarity_measure(wolfe)", max_iter, x.norm());

  StationarityResult res;
  res.min_norm_point = x;
  res.psi = x.norm();
  const double degeneracy = std::max(1e-14, 1e-12 * std::sqrt(scale2));
  if (res.psi <= degeneracy) {
    res.degenerate = true;
    res.d_star = Vector::Zero(n);
  } else {
    res.d_star = -x / res.psi;
  }
  return res;
}

ModifiedStep modified_cauchy_step(const GradientBundle& bundle, const Matrix& h,
                                  double delta) {
  require(delta > 0.0, "modified_cauchy_step: delta > 0");
  if (h.rows() != bundle.dim() || h.cols() != bundle.dim())
    throw PreconditionViolated("modified_cauchy_step: H dimension mismatch");

  StationarityResult st = stationarity_measure(bundle);
  ModifiedStep out;
  out.psi = st.psi;
  out.d_star = st.d_star;
  out.degenerate = st.degenerate;
  if (st.degenerate) {
    out.d = Vector::Zero(bundle.dim());
    out.zeta = 0.0;
    out.qmod = 0.0;
    return out;
  }
  const double kappa = st.d_star.dot(h * st.d_star);
  const double t = (kappa <= 0.0) ? delta : std::min(delta, st.psi / kappa);
  out.d = t * st.d_star;
  out.zeta = phi_eval(bundle, out.d);
  out.qmod = out.zeta + 0.5 * out.d.dot(h * out.d);
  return out;
}

double hull_distance_bruteforce(const GradientBundle& bundle, Vector* arg) {
  const auto& gs = bundle.gradients();
  const int m = bundle.size();
  if (m > 20)
    throw PreconditionViolated("hull_distance_bruteforce: bundle too large");

  double best = std::numeric_limits<double>::infinity();
  Vector best_pt;
  for (unsigned long mask = 1; mask < (1ul << m); ++mask) {
    std::vector<int> sel;
    for (int j = 0; j < m; ++j)
      if (mask & (1ul << j)) sel.push_back(j);
    Eigen::VectorXd w;
    if (!affine_min_norm(gs, sel, w)) continue;
    if ((w.array() < -1e-12).any()) continue;
    Vector pt = Vector::Zero(bundle.dim());
    for (std::size_t i = 0; i < sel.size(); ++i)
      pt += w[static_cast<int>(i)] * gs[static_cast<std::size_t>(sel[i])];
    double norm = pt.norm();
    if (norm < best) {
      best = norm;
      best_pt = pt;
    }
  }
  if (arg) *arg = best_pt;
  return best;
}

}  // namespace nstr::models

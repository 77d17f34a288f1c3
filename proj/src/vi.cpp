#include "nstr/vi.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace nstr::vi {

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

Vector soft_threshold(const Vector& v, double thresh) {
  Vector out(v.size());
  for (int i = 0; i < v.size(); ++i) {
    double mag = std::abs(v[i]) - thresh;
    out[i] = mag > 0.0 ? sign_of(v[i]) * mag : 0.0;
  }
  return out;
}

}  // namespace

ViProblemData::ViProblemData(linalg::SparseSpdMatrix a_in, double nu_in,
                             double act_tol_in)
    : a(std::make_shared<linalg::SparseSpdMatrix>(std::move(a_in))),
      nu(nu_in),
      act_tol(act_tol_in) {
  require(nu > 0.0, "ViProblemData: nu > 0");
  require(act_tol >= 0.0, "ViProblemData: act_tol >= 0");
  if (!a->cached_bounds()) {
    auto b = linalg::spectral_bounds(*a);
    const_cast<linalg::SparseSpdMatrix&>(*a).cache_bounds(b);
  }
}

LipschitzConstants LipschitzConstants::from_bounds(const linalg::SpectralBounds& b,
                                                   double nu) {
  require(b.lambda_min_lower > 0.0 && nu > 0.0, "LipschitzConstants: positive inputs");
  LipschitzConstants l;
  l.l_y = 1.0 / b.lambda_min_lower;
  l.l_q = (b.lambda_max_upper / b.lambda_min_lower + 1.0) / nu;
  return l;
}

IndexClassification classify_sets(const Vector& y, const Vector& q, double act_tol) {
  if (y.size() != q.size())
    throw PreconditionViolated("classify_sets: dimension mismatch");
  std::vector<int> inact, strong, biact;
  for (int i = 0; i < y.size(); ++i) {
    if (std::abs(y[i]) > act_tol) {
      inact.push_back(i);
    } else if (std::abs(q[i]) < 1.0 - act_tol) {
      strong.push_back(i);
    } else {
      biact.push_back(i);
    }
  }
  return IndexClassification{IndexSet(std::move(inact)), IndexSet(std::move(strong)),
                             IndexSet(std::move(biact))};
}

namespace {

// Natural (proximal fixed point) residual of min 0.5 y'Ay - u'y + nu ||y||_1.
double prox_residual(const linalg::SparseSpdMatrix& a, double nu, const Vector& u,
                     const Vector& y, double step) {
  Vector z = soft_threshold(y - step * (a.apply(y) - u), step * nu);
  return (y - z).lpNorm<Eigen::Infinity>();
}

}  // namespace

ViSolution solve_vi(const ViProblemData& data, const Vector& u, double tol) {
  require(tol > 0.0, "solve_vi: tol > 0");
  const int n = data.dim();
  if (u.size() != n) throw PreconditionViolated("solve_vi: dimension mismatch");
  const auto& a = *data.a;
  const double nu = data.nu;
  const double lam_max = a.cached_bounds()->lambda_max_upper;
  const double prox_step = 1.0 / lam_max;
  const double target = tol * std::max(1.0, u.norm());

  std::vector<int> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    s[static_cast<std::size_t>(i)] = std::abs(u[i]) > nu ? sign_of(u[i]) : 0;

  Vector y = Vector::Zero(n);
  Vector q = u / nu;
  const double cg_tol = std::min(tol, 1e-12);

  double best_res = std::numeric_limits<double>::infinity();
  int stall = 0;
  const int max_sweeps = 60 + 4 * n;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    std::vector<int> active;
    Vector rhs = u;
    for (int i = 0; i < n; ++i) {
      if (s[static_cast<std::size_t>(i)] == 0)
        active.push_back(i);
      else
        rhs[i] -= nu * s[static_cast<std::size_t>(i)];
    }
    y = linalg::reduced_solve(a, IndexSet(std::move(active)), rhs, cg_tol);
    q = (u - a.apply(y)) / nu;

    // Primal-dual reclassification on w = q + y: optimal support satisfies
    // |w_i| > 1 with sign(w_i) = sign(y_i), zeros satisfy |w_i| <= 1.
    std::vector<int> s_new(static_cast<std::size_t>(n));
    bool sign_violation = false;
    for (int i = 0; i < n; ++i) {
      const double w = q[i] + y[i];
      s_new[static_cast<std::size_t>(i)] = std::abs(w) > 1.0 ? sign_of(w) : 0;
      if (s[static_cast<std::size_t>(i)] != 0 &&
          y[i] * s[static_cast<std::size_t>(i)] < 0.0)
        sign_violation = true;
    }

    const double res = prox_residual(a, nu, u, y, prox_step);
    if (res <= target && !sign_violation) {
      ViSolution sol;
      sol.y = y;
      sol.q = q;
      sol.residual = res;
      sol.sets = classify_sets(y, q, data.act_tol);
      return sol;
    }

    if (res < 0.9 * best_res) {
      best_res = res;
      stall = 0;
    } else {
      ++stall;
    }

    if (stall >= 5) {
      // Active-set cycling: damp with proximal-gradient sweeps, then resume.
      for (int j = 0; j < 200; ++j) {
        y = soft_threshold(y - prox_step * (a.apply(y) - u), prox_step * nu);
        if (prox_residual(a, nu, u, y, prox_step) < 0.5 * best_res) break;
      }
      q = (u - a.apply(y)) / nu;
      for (int i = 0; i < n; ++i) {
        const double w = q[i] + y[i];
        s_new[static_cast<std::size_t>(i)] = std::abs(w) > 1.0 ? sign_of(w) : 0;
      }
      stall = 0;
      best_res = prox_residual(a, nu, u, y, prox_step);
    }
    s = s_new;
  }
  throw NotConverged("solve_vi", max_sweeps, prox_residual(a, nu, u, y, prox_step));
}

Vector bouligand_apply(const ViProblemData& data, const IndexSet& n_set,
                       const Vector& h, double tol) {
  return linalg::reduced_solve(*data.a, n_set, h, tol);
}

Vector adjoint_gradient(const ViProblemData& data, const IndexSet& n_set,
                        const Vector& grad_y, const Vector& grad_u, double tol) {
  Vector p = linalg::reduced_solve(*data.a, n_set, grad_y, tol);
  return p + grad_u;
}

IndexSet possibly_biactive(const ViSolution& sol, const LipschitzConstants& lip,
                           double delta) {
  require(delta > 0.0, "possibly_biactive: delta > 0");
  std::vector<int> idx;
  for (int i = 0; i < sol.y.size(); ++i) {
    if (std::abs(sol.y[i]) < lip.l_y * delta &&
        std::abs(std::abs(sol.q[i]) - 1.0) < lip.l_q * delta)
      idx.push_back(i);
  }
  return IndexSet(std::move(idx));
}

BundleResult gradient_bundle(const ViProblemData& data, const ViSolution& sol,
                             const LipschitzConstants& lip, double delta,
                             const Vector& grad_y, const Vector& grad_u,
                             const BundleOptions& opts) {
  const IndexSet p_set = possibly_biactive(sol, lip, delta);
  const IndexSet& as = sol.sets.strongly_active;
  const int p = p_set.size();

  std::vector<unsigned long> masks;
  bool sampled = false;
  if (p <= opts.cap) {
    masks.resize(1ul << p);
    for (unsigned long m = 0; m < masks.size(); ++m) masks[m] = m;
  } else if (opts.allow_sampling) {
    // Structured + seeded random subsets, bounded by the sample budget:
    // empty set first (the base gradient), then full set, singletons and
    // co-singletons, then random masks.
    sampled = true;
    require(opts.sample_budget >= 1, "gradient_bundle: sample_budget >= 1");
    const unsigned long all = p >= 64 ? ~0ul : (1ul << p) - 1ul;
    std::vector<unsigned long> priority{0ul, all};
    for (int i = 0; i < p && i < 62; ++i) {
      priority.push_back(1ul << i);
      priority.push_back(all ^ (1ul << i));
    }
    std::mt19937_64 gen(opts.seed);
    std::uniform_int_distribution<unsigned long> dist(0ul, all);
    std::set<unsigned long> chosen;
    for (unsigned long m : priority) {
      if (static_cast<int>(chosen.size()) >= opts.sample_budget) break;
      chosen.insert(m);
    }
    while (static_cast<int>(chosen.size()) < opts.sample_budget &&
           chosen.size() < (1ull << std::min(p, 62))) {
      chosen.insert(dist(gen));
    }
    masks.assign(chosen.begin(), chosen.end());
  } else {
    throw BiactiveSetTooLarge(p, opts.cap);
  }

  std::vector<Vector> grads;
  std::vector<IndexSet> prov;
  grads.reserve(masks.size());
  for (unsigned long mask : masks) {
    std::vector<int> b0;
    for (int k = 0; k < p; ++k)
      if (mask & (1ul << k)) b0.push_back(p_set[k]);
    IndexSet b0_set(std::move(b0));
    Vector g = adjoint_gradient(data, as.set_union(b0_set), grad_y, grad_u,
                                opts.solve_tol);
    grads.push_back(std::move(g));
    prov.push_back(std::move(b0_set));
  }
  return BundleResult{models::GradientBundle(std::move(grads), std::move(prov)),
                      sampled};
}

Vector directional_derivative_oracle(const ViProblemData& data, const Vector& u,
                                     const Vector& h, double tol) {
  ViSolution sol = solve_vi(data, u, 1e-13);
  const IndexSet& biactive = sol.sets.biactive;
  const IndexSet& strongly = sol.sets.strongly_active;
  require(biactive.size() <= 8, "directional_derivative_oracle: |B| <= 8");

  const auto& a = data.a->matrix();
  const double feas_tol = tol * std::max(1.0, h.norm());
  const int nb = biactive.size();

  long patterns = 1;
  for (int i = 0; i < nb; ++i) patterns *= 3;

  for (long code = 0; code < patterns; ++code) {
    // Digits of `code` base 3 pick zero (0) / positive (1) / negative (2)
    // for each biactive component; skip patterns violating v_i q_i >= 0.
    long rem = code;
    std::vector<int> released;
    bool consistent = true;
    for (int k = 0; k < nb; ++k) {
      int digit = static_cast<int>(rem % 3);
      rem /= 3;
      int i = biactive[k];
      if (digit == 0) continue;
      int sig = digit == 1 ? 1 : -1;
      if (sig * sign_of(sol.q[i]) < 0) {
        consistent = false;
        break;
      }
      released.push_back(i);
    }
    if (!consistent) continue;

    IndexSet released_set(released);
    IndexSet zeroed = strongly.set_union(biactive.set_difference(released_set));
    Vector eta = linalg::reduced_solve(*data.a, zeroed, h, 1e-13);

    bool ok = true;
    for (int i : released_set) {
      if (eta[i] * sol.q[i] < -feas_tol) ok = false;  // cone feasibility
    }
    if (ok) {
      Vector r = a * eta - h;
      for (int k = 0; k < nb && ok; ++k) {
        int i = biactive[k];
        if (!released_set.contains(i) && r[i] * sol.q[i] < -feas_tol)
          ok = false;  // multiplier sign at a zeroed biactive index
      }
    }
    if (ok) {
      check_finite(eta, "directional_derivative_oracle");
      return eta;
    }
  }
  throw OracleFailure("directional_derivative_oracle: no sign pattern validated");
}

}  // namespace nstr::vi

#include <doctest.h>

#include <random>

#include "nstr/trcore.hpp"
#include "oracles.hpp"

using namespace nstr;
using namespace nstr::trcore;
using test::random_vector;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

double model_value(const Vector& g, const Matrix& h, const Vector& d) {
  return g.dot(d) + 0.5 * d.dot(h * d);
}

/// Grid minimization of the quadratic model over the disk, 2D oracle.
double grid_min_model_2d(const Vector& g, const Matrix& h, double delta) {
  double best = 0.0;
  const int nr = 400, nt = 2000;
  for (int ir = 0; ir <= nr; ++ir) {
    double r = delta * ir / nr;
    for (int it = 0; it < nt; ++it) {
      double t = 2.0 * M_PI * it / nt;
      Vector d = vec2(r * std::cos(t), r * std::sin(t));
      best = std::min(best, model_value(g, h, d));
    }
  }
  return best;
}

ProblemDef quadratic_problem(const Matrix& q, const Vector& c) {
  ProblemDef def;
  def.dim = static_cast<int>(q.rows());
  def.eval_f = [q, c](const Vector& x) { return 0.5 * x.dot(q * x) + c.dot(x); };
  def.subgradient = [q, c](const Vector& x) { return Vector(q * x + c); };
  def.bundle_for = [q, c](const Vector& x, double, int) {
    return models::GradientBundle({Vector(q * x + c)});
  };
  return def;
}

}  // namespace

TEST_CASE("dogleg_step worked examples") {
  Matrix eye = Matrix::Identity(2, 2);

  Vector d1 = dogleg_step(vec2(1, 0), eye, 2.0);
  CHECK(d1[0] == doctest::Approx(-1.0));
  CHECK(d1[1] == doctest::Approx(0.0));

  Vector d2 = dogleg_step(vec2(1, 0), eye, 0.5);
  CHECK(d2[0] == doctest::Approx(-0.5));
  CHECK(d2[1] == doctest::Approx(0.0));

  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = 4.0;
  Vector g = vec2(1, 1);
  Vector d3 = dogleg_step(g, h, 1.0);
  CHECK(d3.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // second-leg dogleg point, recomputed independently
  CHECK(d3[0] == doctest::Approx(-0.96601206).epsilon(1e-7));
  CHECK(d3[1] == doctest::Approx(-0.25849698).epsilon(1e-7));

  double decrease = -model_value(g, h, d3);
  double bound = 0.5 * g.norm() * std::min(1.0, g.norm() / 4.0);
  CHECK(decrease >= bound);
  // close to the global subproblem optimum
  CHECK(decrease >= -grid_min_model_2d(g, h, 1.0) - 1e-3);
}

TEST_CASE("dogleg_step satisfies Cauchy decrease on random instances") {
  std::mt19937 gen(31);
  std::uniform_real_distribution<double> ddist(0.05, 3.0);
  std::normal_distribution<double> nd(0.0, 2.0);
  for (int trial = 0; trial < 300; ++trial) {
    int dim = 1 + static_cast<int>(gen() % 5);
    Vector g = random_vector(dim, gen, 2.0);
    if (g.norm() < 1e-10) continue;
    Matrix h = Matrix::Zero(dim, dim);
    bool pd = (gen() % 2) == 0;
    if (pd) {
      h = test::to_dense(test::random_spd(dim, gen, 0.2, 6.0));
    } else {
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j <= i; ++j) {
          h(i, j) = nd(gen);
          h(j, i) = h(i, j);
        }
    }
    double delta = ddist(gen);
    Vector d = dogleg_step(g, h, delta);
    CHECK(d.norm() <= delta * (1.0 + 1e-12));
    double hnorm = test::dense_eigenvalues(h).cwiseAbs().maxCoeff();
    double bound =
        0.5 * g.norm() *
        std::min(delta, hnorm > 0 ? g.norm() / hnorm
                                  : std::numeric_limits<double>::infinity());
    CHECK(-model_value(g, h, d) >= bound - 1e-10 * std::max(1.0, bound));
  }
}

TEST_CASE("quality_standard worked examples") {
  CHECK(quality_standard(1.0, 0.5, 0.5) == doctest::Approx(1.0));
  CHECK(quality_standard(1.0, 1.2, 0.5) == doctest::Approx(-0.4));
  CHECK(quality_standard(2.0, 1.7, 1.6) == doctest::Approx(0.75));
  CHECK_THROWS_AS(quality_standard(1.0, 0.5, 1.0), DegenerateDenominator);
  CHECK_THROWS_AS(quality_standard(1.0, 0.5, 1.5), DegenerateDenominator);
}

TEST_CASE("quality_modified worked examples") {
  // psi <= ||g|| delta forces 0
  CHECK(quality_modified(1.0, 0.6, 0.5, 0.1, 1.0, 0.2) == 0.0);
  // ratio branch
  CHECK(quality_modified(1.0, 0.6, 0.5, 1.0, 1.0, 0.2) == doctest::Approx(0.8));
  // boundary of the case split
  CHECK(quality_modified(1.0, 0.6, 0.5, 0.0, 2.0, 0.5) == 0.0);
}

TEST_CASE("radius update table") {
  TrParams p;
  p.eta1 = 0.25;
  p.eta2 = 0.75;
  p.beta1 = 0.5;
  p.beta2 = 1.1;
  p.delta_min = 0.01;
  Vector x = vec2(1, 1), d = vec2(0.5, 0);

  auto null_step = update(x, d, 1.0, 0.1, p);
  CHECK(null_step.delta == doctest::Approx(0.5));
  CHECK((null_step.x - x).norm() == 0.0);

  auto mid = update(x, d, 0.005, 0.5, p);
  CHECK(mid.delta == doctest::Approx(0.01));  // pushed up to delta_min
  CHECK((mid.x - (x + d)).norm() == 0.0);

  auto good = update(x, d, 1.0, 0.9, p);
  CHECK(good.delta == doctest::Approx(1.1));
  CHECK((good.x - (x + d)).norm() == 0.0);

  TrParams nf = p;
  nf.radius_growth_floor = false;
  CHECK(update(x, d, 0.005, 0.5, nf).delta == doctest::Approx(0.005));
  CHECK(update(x, d, 0.005, 0.9, nf).delta == doctest::Approx(0.0055));
}

TEST_CASE("hessian_update: curvature skip and fixed point") {
  Matrix eye = Matrix::Identity(2, 2);
  Vector s = vec2(1, 0);

  Matrix same = hessian_update(eye, s, vec2(0, 1), 1e8);  // <s,y> = 0
  CHECK((same - eye).norm() == 0.0);

  Matrix fixed_point = hessian_update(eye, s, s, 1e8);  // Hs already equals y
  CHECK((fixed_point - eye).norm() <= 1e-15);
}

TEST_CASE("hessian_update satisfies the secant equation") {
  std::mt19937 gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    int dim = 2 + static_cast<int>(gen() % 5);
    Matrix h = test::to_dense(test::random_spd(dim, gen, 0.2, 5.0));
    Vector s = random_vector(dim, gen);
    Vector y = random_vector(dim, gen);
    if (s.dot(y) <= 1e-6 * s.norm() * y.norm()) y = s + 0.1 * y;  // force curvature
    Matrix hn = hessian_update(h, s, y, 1e8);
    CHECK((hn * s - y).lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, y.norm()));
    // result stays symmetric positive definite
    Vector eig = test::dense_eigenvalues(hn);
    CHECK(eig[0] > 0.0);
  }
}

TEST_CASE("hessian_update respects the spectral cap") {
  Matrix h = Matrix::Identity(2, 2);
  Vector s = vec2(1e-3, 0), y = vec2(10.0, 0);  // huge curvature
  double c_h = 5.0;
  Matrix hn = hessian_update(h, s, y, c_h);
  CHECK(spectral_norm_estimate(hn) <= c_h * (1.0 + 1e-9));
}

TEST_CASE("run: smooth quadratic converges") {
  Matrix q = Matrix::Identity(2, 2);
  Vector c = Vector::Zero(2);
  TrParams params;
  params.max_iter = 100;
  params.tol_stationarity = 1e-8;
  RunResult res = run(quadratic_problem(q, c), params, vec2(1, 1));
  CHECK(res.state.x.norm() <= 1e-6);
  CHECK(res.state.k <= 100);
  CHECK(res.state.status != Status::MaxIter);
}

TEST_CASE("run invariants on randomized quadratics") {
  std::mt19937 gen(33);
  for (int trial = 0; trial < 20; ++trial) {
    int dim = 1 + static_cast<int>(gen() % 6);
    Matrix q = test::to_dense(test::random_spd(dim, gen, 0.3, 6.0));
    Vector c = random_vector(dim, gen);
    TrParams params;
    params.max_iter = 200;
    params.tol_stationarity = 1e-9;
    RunResult res = run(quadratic_problem(q, c), params, random_vector(dim, gen, 2.0));
    CHECK(res.state.status != Status::MaxIter);

    // f non-increasing, null steps shrink the radius by beta1 exactly
    for (std::size_t i = 0; i + 1 < res.records.size(); ++i) {
      const auto& r = res.records[i];
      const auto& next = res.records[i + 1];
      CHECK(next.f <= r.f + 1e-12 * std::max(1.0, std::abs(r.f)));
      if (!r.rho) continue;
      if (*r.rho <= params.eta1) {
        CHECK(next.delta == doctest::Approx(params.beta1 * r.delta).epsilon(1e-15));
        CHECK(next.f == r.f);  // null step: x unchanged
      } else {
        CHECK(next.delta >= params.delta_min * (1.0 - 1e-15));
      }
    }
  }
}

TEST_CASE("run stops immediately at a stationary point") {
  Matrix q = Matrix::Identity(2, 2);
  Vector c = Vector::Zero(2);
  TrParams params;
  RunResult res = run(quadratic_problem(q, c), params, vec2(0, 0));
  CHECK(res.state.status == Status::StationarySubgradientZero);
  CHECK(res.state.k == 0);
}

TEST_CASE("TrParams validation") {
  TrParams p;
  p.eta1 = 0.8;
  p.eta2 = 0.5;
  CHECK_THROWS_AS(p.validate(), PreconditionViolated);
  TrParams p2;
  p2.mu = 1.5;
  CHECK_THROWS_AS(p2.validate(), PreconditionViolated);
  TrParams p3;
  p3.beta2 = 0.9;
  CHECK_THROWS_AS(p3.validate(), PreconditionViolated);
}

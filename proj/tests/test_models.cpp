#include <doctest.h>

#include <random>

#include "nstr/models.hpp"
#include "oracles.hpp"

using namespace nstr;
using namespace nstr::models;
using test::random_vector;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

GradientBundle bundle_of(std::vector<Vector> gs) { return GradientBundle(std::move(gs)); }

/// Deterministic pseudo-random unit directions, the sphere grid used by the
/// minimax cross-check.
std::vector<Vector> sphere_grid(int dim, int count, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<Vector> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector v(dim);
    do {
      for (int j = 0; j < dim; ++j) v[j] = dist(gen);
    } while (v.norm() < 1e-8);
    dirs.push_back(v / v.norm());
  }
  return dirs;
}

}  // namespace

TEST_CASE("phi_eval worked examples") {
  CHECK(phi_eval(bundle_of({vec2(1, 0)}), vec2(2, 3)) == doctest::Approx(2.0));
  CHECK(phi_eval(bundle_of({vec2(1, 0), vec2(0, 1)}), vec2(2, 3)) ==
        doctest::Approx(3.0));
  GradientBundle absval = bundle_of({vec2(1, 0), vec2(-1, 0)});
  for (double t : {-2.0, -0.5, 0.0, 0.7, 3.0})
    CHECK(phi_eval(absval, vec2(t, 0)) == doctest::Approx(std::abs(t)));
}

TEST_CASE("phi_eval positive homogeneity") {
  std::mt19937 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    int dim = 1 + static_cast<int>(gen() % 4);
    int m = 1 + static_cast<int>(gen() % 5);
    std::vector<Vector> gs;
    for (int j = 0; j < m; ++j) gs.push_back(random_vector(dim, gen));
    GradientBundle b(std::move(gs));
    Vector d = random_vector(dim, gen);
    std::uniform_real_distribution<double> tdist(0.0, 5.0);
    double t = tdist(gen);
    CHECK(phi_eval(b, t * d) ==
          doctest::Approx(t * phi_eval(b, d)).epsilon(1e-12));
  }
}

TEST_CASE("bundle deduplicates near-identical gradients") {
  GradientBundle b = bundle_of({vec2(1, 0), vec2(1, 0), vec2(1, 1e-15)});
  CHECK(b.size() == 1);
}

TEST_CASE("stationarity_measure worked examples") {
  GradientBundle single = bundle_of({vec2(3, 4)});
  auto r = stationarity_measure(single);
  CHECK(r.psi == doctest::Approx(5.0));
  CHECK(r.d_star[0] == doctest::Approx(-0.6));
  CHECK(r.d_star[1] == doctest::Approx(-0.8));

  auto r0 = stationarity_measure(bundle_of({vec2(1, 0), vec2(-1, 0)}));
  CHECK(r0.psi <= 1e-12);
  CHECK(r0.degenerate);
  CHECK(r0.d_star.norm() == 0.0);

  auto r2 = stationarity_measure(bundle_of({vec2(1, 0), vec2(0, 1)}));
  CHECK(r2.psi == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(r2.min_norm_point[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r2.min_norm_point[1] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("stationarity_measure equals the hull-distance oracle") {
  std::mt19937 gen(22);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = 1 + static_cast<int>(gen() % 4);
    int m = 1 + static_cast<int>(gen() % 5);
    std::vector<Vector> gs;
    for (int j = 0; j < m; ++j) gs.push_back(random_vector(dim, gen, 2.0));
    GradientBundle b(std::move(gs));
    double ref = hull_distance_bruteforce(b);
    auto r = stationarity_measure(b);
    CHECK(std::abs(r.psi - ref) <= 1e-8 * std::max(1.0, ref));
  }
}

TEST_CASE("stationarity_measure equals -min of phi over the unit sphere") {
  std::mt19937 gen(23);
  auto dirs_by_dim = std::vector<std::vector<Vector>>(5);
  for (int dim = 1; dim <= 4; ++dim)
    dirs_by_dim[static_cast<std::size_t>(dim)] = sphere_grid(dim, 4000, 77);

  // Covering-angle resolution of an N-point random grid on S^{dim-1}.
  auto grid_res = [](int dim, int count, double grad_scale) {
    if (dim == 1) return 1e-12 * std::max(1.0, grad_scale);
    double theta = 6.0 * std::pow(1.0 / count, 1.0 / (dim - 1));
    return grad_scale * theta;
  };

  for (int trial = 0; trial < 40; ++trial) {
    int dim = 1 + static_cast<int>(gen() % 4);
    int m = 1 + static_cast<int>(gen() % 5);
    std::vector<Vector> gs;
    for (int j = 0; j < m; ++j) gs.push_back(random_vector(dim, gen, 2.0));
    GradientBundle b(std::move(gs));
    double grad_scale = 0.0;
    for (const Vector& g : b.gradients()) grad_scale = std::max(grad_scale, g.norm());
    // phi is positively homogeneous, so the ball minimum is min(0, sphere min).
    double sphere_min = std::numeric_limits<double>::infinity();
    for (const Vector& d : dirs_by_dim[static_cast<std::size_t>(dim)])
      sphere_min = std::min(sphere_min, phi_eval(b, d));
    double ball_min = std::min(0.0, sphere_min);
    double psi = stationarity_measure(b).psi;
    CHECK(psi >= -ball_min - 1e-10);  // grid value is a lower bound for psi
    CHECK(psi <= -ball_min + grid_res(dim, 4000, grad_scale));
  }
}

TEST_CASE("modified_cauchy_step worked examples") {
  Matrix zero2 = Matrix::Zero(2, 2);

  auto s1 = modified_cauchy_step(bundle_of({vec2(1, 0)}), zero2, 0.5);
  CHECK(s1.d[0] == doctest::Approx(-0.5));
  CHECK(s1.d[1] == doctest::Approx(0.0));
  CHECK(s1.zeta == doctest::Approx(-0.5));

  auto s2 = modified_cauchy_step(bundle_of({vec2(1, 0), vec2(0, 1)}), zero2, 1.0);
  const double r = std::sqrt(2.0) / 2.0;
  CHECK(s2.d[0] == doctest::Approx(-r).epsilon(1e-10));
  CHECK(s2.d[1] == doctest::Approx(-r).epsilon(1e-10));
  CHECK(s2.zeta == doctest::Approx(-r).epsilon(1e-10));

  auto s3 = modified_cauchy_step(bundle_of({vec2(2, 0)}), Matrix::Identity(2, 2), 5.0);
  CHECK(s3.d[0] == doctest::Approx(-2.0));
  CHECK(s3.zeta == doctest::Approx(-4.0));
  // model decrease = -zeta - 0.5 d'Hd = 4 - 2 = 2 >= 0.5 * 2 * min(5, 2)
  CHECK(-s3.qmod == doctest::Approx(2.0));
  CHECK(-s3.qmod >= 0.5 * 2.0 * std::min(5.0, 2.0) - 1e-12);
}

TEST_CASE("modified_cauchy_step feasibility and decrease on random instances") {
  std::mt19937 gen(24);
  std::uniform_real_distribution<double> ddist(0.05, 3.0);
  std::normal_distribution<double> nd(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    int dim = 1 + static_cast<int>(gen() % 4);
    int m = 1 + static_cast<int>(gen() % 5);
    std::vector<Vector> gs;
    for (int j = 0; j < m; ++j) gs.push_back(random_vector(dim, gen, 2.0));
    GradientBundle b(std::move(gs));

    Matrix h = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j <= i; ++j) {
        h(i, j) = nd(gen);
        h(j, i) = h(i, j);
      }
    double hnorm = test::dense_eigenvalues(h).cwiseAbs().maxCoeff();
    if (hnorm > 10.0) {
      h *= 10.0 / hnorm;
      hnorm = 10.0;
    }

    double delta = ddist(gen);
    auto s = modified_cauchy_step(b, h, delta);
    if (s.degenerate) continue;

    CHECK(s.d.norm() <= delta * (1.0 + 1e-12));
    for (const Vector& g : b.gradients())
      CHECK(g.dot(s.d) <= s.zeta + 1e-10);  // feasible for the LQ reformulation

    double decrease = -s.zeta - 0.5 * s.d.dot(h * s.d);
    double bound = 0.5 * s.psi * std::min(delta, s.psi / std::max(hnorm, 1e-300));
    CHECK(decrease >= bound - 1e-10 * std::max(1.0, bound));
  }
}

#include "nstr/linalg.hpp"

#include <Eigen/SparseCore>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

namespace nstr::linalg {

SparseSpdMatrix::SparseSpdMatrix(SparseMatrix a) : a_(std::move(a)) {
  a_.makeCompressed();
  if (a_.rows() != a_.cols())
    throw PreconditionViolated("SparseSpdMatrix: matrix not square");
  SparseMatrix diff = SparseMatrix(a_.transpose()) - a_;
  if (diff.coeffs().size() > 0 && diff.coeffs().cwiseAbs().maxCoeff() != 0.0)
    throw PreconditionViolated("SparseSpdMatrix: matrix not symmetric");
}

void SparseSpdMatrix::cache_bounds(SpectralBounds b) {
  if (!(b.lambda_min_lower > 0.0) || b.lambda_min_lower > b.lambda_max_upper)
    throw PreconditionViolated("SparseSpdMatrix: invalid spectral bounds");
  bounds_ = b;
}

Vector cg_solve(const SparseSpdMatrix& a, const Vector& b, double tol,
                int max_iter) {
  require(tol > 0.0, "cg_solve: tol > 0");
  const auto& m = a.matrix();
  if (b.size() != m.rows())
    throw PreconditionViolated("cg_solve: dimension mismatch");

  const double target = tol * std::max(1.0, b.norm());
  Vector x = Vector::Zero(b.size());
  Vector r = b;
  if (r.norm() <= target) return x;

  Vector inv_diag(b.size());
  for (int i = 0; i < b.size(); ++i) {
    double d = m.coeff(i, i);
    if (!(d > 0.0))
      throw Error("cg_solve: non-positive diagonal entry, matrix not SPD");
    inv_diag[i] = 1.0 / d;
  }

  Vector z = inv_diag.asDiagonal() * r;
  Vector p = z;
  double rz = r.dot(z);
  for (int it = 0; it < max_iter; ++it) {
    Vector ap = m * p;
    double pap = p.dot(ap);
    if (!(pap > 0.0))
      throw Error("cg_solve: curvature <= 0, matrix not SPD");
    double alpha = rz / pap;
    x += alpha * p;
    r -= alpha * ap;
    if (r.norm() <= target) {
      check_finite(x, "cg_solve");
      return x;
    }
    z = inv_diag.asDiagonal() * r;
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  throw NotConverged("cg_solve", max_iter, r.norm());
}

Vector reduced_solve(const SparseSpdMatrix& a, const IndexSet& n_set,
                     const Vector& b, double tol, int max_iter) {
  const int n = a.dim();
  if (b.size() != n)
    throw PreconditionViolated("reduced_solve: dimension mismatch");
  if (!n_set.empty() && n_set.indices().back() >= n)
    throw PreconditionViolated("reduced_solve: index out of range");

  IndexSet free = n_set.complement(n);
  Vector z = Vector::Zero(n);
  if (free.empty()) return z;
  if (n_set.empty()) return cg_solve(a, b, tol, max_iter);

  // Remap of retained indices, then submatrix extraction by triplets.
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  for (int k = 0; k < free.size(); ++k) map[static_cast<std::size_t>(free[k])] = k;

  std::vector<Eigen::Triplet<double>> trips;
  const auto& m = a.matrix();
  trips.reserve(static_cast<std::size_t>(m.nonZeros()));
  for (int col = 0; col < n; ++col) {
    if (map[static_cast<std::size_t>(col)] < 0) continue;
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      int row = static_cast<int>(it.row());
      if (map[static_cast<std::size_t>(row)] < 0) continue;
      trips.emplace_back(map[static_cast<std::size_t>(row)],
                         map[static_cast<std::size_t>(col)], it.value());
    }
  }
  SparseMatrix sub(free.size(), free.size());
  sub.setFromTriplets(trips.begin(), trips.end());

  Vector b_free(free.size());
  for (int k = 0; k < free.size(); ++k) b_free[k] = b[free[k]];

  Vector z_free = cg_solve(SparseSpdMatrix(std::move(sub)), b_free, tol, max_iter);
  for (int k = 0; k < free.size(); ++k) z[free[k]] = z_free[k];
  return z;
}

namespace {

// Deterministic start vector for the power iterations; a fixed pseudo-random
// direction avoids accidental orthogonality to extremal eigenvectors.
Vector power_start(int n) {
  std::mt19937 gen(0x5eed5u);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(gen);
  return v / v.norm();
}

}  // namespace

SpectralBounds spectral_bounds(const SparseSpdMatrix& a, double tol) {
  require(tol > 0.0, "spectral_bounds: tol > 0");
  const int n = a.dim();
  const int max_iter = 20000;

  // Largest eigenvalue: plain power iteration with Rayleigh quotients.
  Vector v = power_start(n);
  double lam_max = 0.0;
  {
    double prev = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
      Vector av = a.apply(v);
      lam_max = v.dot(av);
      double norm = av.norm();
      if (!(norm > 0.0)) throw Error("spectral_bounds: zero matrix");
      v = av / norm;
      if (it > 2 && std::abs(lam_max - prev) <= tol * std::abs(lam_max)) break;
      prev = lam_max;
    }
    if (it == max_iter)
      throw NotConverged("spectral_bounds(max)", max_iter, std::abs(lam_max - prev));
  }

  // Smallest eigenvalue: inverse power iteration, CG inner solves.
  v = power_start(n);
  double lam_min = 0.0;
  {
    double prev = 0.0;
    int it = 0;
    for (; it < max_iter; ++it) {
      Vector w = cg_solve(a, v, std::min(1e-12, tol * 1e-2), 20000);
      double wnorm = w.norm();
      if (!(wnorm > 0.0)) throw Error("spectral_bounds: inverse iteration collapsed");
      v = w / wnorm;
      lam_min = v.dot(a.apply(v));
      if (it > 2 && std::abs(lam_min - prev) <= tol * std::abs(lam_min)) break;
      prev = lam_min;
    }
    if (it == max_iter)
      throw NotConverged("spectral_bounds(min)", max_iter, std::abs(lam_min - prev));
  }

  // Widen by a fixed 1% so containment survives iteration error.
  const double slack = std::max(0.01, 10.0 * tol);
  SpectralBounds b;
  b.lambda_min_lower = lam_min * (1.0 - slack);
  b.lambda_max_upper = lam_max * (1.0 + slack);
  if (!(b.lambda_min_lower > 0.0))
    throw Error("spectral_bounds: non-positive lower bound, matrix not SPD");
  return b;
}

SparseSpdMatrix assemble_laplacian_2d(int m) {
  require(m >= 1, "assemble_laplacian_2d: m >= 1");
  const double h = 1.0 / (m + 1);
  const double diag = 4.0 / (h * h);
  const double off = -1.0 / (h * h);
  const int n = m * m;

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(5 * n));
  auto id = [m](int i, int j) { return j * m + i; };
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      int p = id(i, j);
      trips.emplace_back(p, p, diag);
      if (i > 0) trips.emplace_back(p, id(i - 1, j), off);
      if (i < m - 1) trips.emplace_back(p, id(i + 1, j), off);
      if (j > 0) trips.emplace_back(p, id(i, j - 1), off);
      if (j < m - 1) trips.emplace_back(p, id(i, j + 1), off);
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  return SparseSpdMatrix(std::move(a));
}

SparseSpdMatrix parse_matrix_market(std::istream& in) {
  std::string header;
  if (!std::getline(in, header))
    throw Error("matrix market: empty stream");
  std::istringstream hs(header);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate" ||
      field != "real" || symmetry != "symmetric")
    throw Error("matrix market: expected 'matrix coordinate real symmetric' header, got: " + header);

  std::string line;
  long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    if (!(ls >> rows >> cols >> nnz))
      throw Error("matrix market: malformed size line: " + line);
    break;
  }
  if (rows < 0) throw Error("matrix market: missing size line");
  if (rows != cols) throw Error("matrix market: matrix not square");

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(2 * nnz));
  long seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    long i, j;
    double v;
    if (!(ls >> i >> j >> v))
      throw Error("matrix market: malformed entry line: " + line);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw Error("matrix market: entry out of range");
    trips.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    if (i != j)
      trips.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
    ++seen;
  }
  if (seen != nnz) throw Error("matrix market: truncated entry list");

  SparseMatrix a(static_cast<int>(rows), static_cast<int>(cols));
  a.setFromTriplets(trips.begin(), trips.end());
  return SparseSpdMatrix(std::move(a));
}

SparseSpdMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix file: " + path);
  return parse_matrix_market(in);
}

}  // namespace nstr::linalg

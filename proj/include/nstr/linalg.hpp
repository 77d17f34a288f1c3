#pragma once

#include <optional>
#include <string>
#include <utility>

#include "nstr/common.hpp"
#include "nstr/index_set.hpp"

namespace nstr::linalg {

/// Certified spectral interval: lower bound on the smallest and upper bound on
/// the largest eigenvalue of an SPD matrix.
struct SpectralBounds {
  double lambda_min_lower = 0.0;
  double lambda_max_upper = 0.0;
};

/// Symmetric positive definite sparse matrix. Structural symmetry is checked at
/// construction; positive definiteness is asserted operationally (every solve
/// must succeed or raise). Immutable after construction.
class SparseSpdMatrix {
public:
  explicit SparseSpdMatrix(SparseMatrix a);

  int dim() const { return static_cast<int>(a_.rows()); }
  const SparseMatrix& matrix() const { return a_; }

  Vector apply(const Vector& x) const { return a_ * x; }

  const std::optional<SpectralBounds>& cached_bounds() const { return bounds_; }
  void cache_bounds(SpectralBounds b);

private:
  SparseMatrix a_;
  std::optional<SpectralBounds> bounds_;
};

/// Jacobi-preconditioned conjugate gradients. Returns x with
/// ||A x - b|| <= tol * max(1, ||b||). Deterministic for fixed inputs.
Vector cg_solve(const SparseSpdMatrix& a, const Vector& b, double tol = 1e-12,
                int max_iter = 10000);

/// Solves the system with rows/columns in `n_set` eliminated: the result z has
/// z_i = 0 on n_set and satisfies sum_{j not in n_set} A_ij z_j = b_i on the
/// complement. Equals A(N)^{-1} chi(N) b.
Vector reduced_solve(const SparseSpdMatrix& a, const IndexSet& n_set,
                     const Vector& b, double tol = 1e-12, int max_iter = 10000);

/// Certified eigenvalue bounds via power iteration (largest) and inverse power
/// iteration with CG inner solves (smallest), widened by a fixed 1% slack so
/// the containment [lambda_min_lower, lambda_max_upper] is robust to iteration
/// error.
SpectralBounds spectral_bounds(const SparseSpdMatrix& a, double tol = 1e-10);

/// Five-point finite-difference discretization of the negative Laplacian on
/// (0,1)^2 with homogeneous Dirichlet boundary, m interior points per
/// dimension, h = 1/(m+1). Interior points are ordered row-major: grid point
/// (i,j) -> index j*m + i, with x1 = (i+1) h the horizontal coordinate.
SparseSpdMatrix assemble_laplacian_2d(int m);

/// Reads a symmetric sparse matrix in Matrix Market coordinate format.
/// Rejects non-symmetric and non-real headers.
SparseSpdMatrix read_matrix_market(const std::string& path);
SparseSpdMatrix parse_matrix_market(std::istream& in);

}  // namespace nstr::linalg

#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace nstr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Base class for all solver-level failures.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver ran out of its iteration budget.
class NotConverged : public Error {
public:
  NotConverged(const std::string& where, int max_iter, double residual)
      : Error(where + ": not converged after " + std::to_string(max_iter) +
              " iterations (residual " + std::to_string(residual) + ")"),
        max_iter(max_iter),
        residual(residual) {}
  int max_iter;
  double residual;
};

/// Quality-indicator denominator was non-positive although a subgradient was
/// nonzero. The Cauchy-decrease condition guarantees positivity, so this means
/// the subproblem solver is broken, not that the step should be rejected.
class DegenerateDenominator : public Error {
public:
  explicit DegenerateDenominator(double value)
      : Error("quality indicator denominator non-positive: " + std::to_string(value)),
        value(value) {}
  double value;
};

/// A computed trust-region step failed its Cauchy-decrease inequality.
class CauchyDecreaseViolation : public Error {
public:
  CauchyDecreaseViolation(double achieved, double required)
      : Error("Cauchy decrease violated: achieved " + std::to_string(achieved) +
              " < required " + std::to_string(required)),
        achieved(achieved),
        required(required) {}
  double achieved;
  double required;
};

/// The possibly-biactive set exceeded the powerset enumeration cap.
class BiactiveSetTooLarge : public Error {
public:
  BiactiveSetTooLarge(int size, int cap)
      : Error("possibly-biactive set of size " + std::to_string(size) +
              " exceeds powerset cap " + std::to_string(cap)),
        size(size),
        cap(cap) {}
  int size;
  int cap;
};

/// An analytic precondition on problem or algorithm parameters is violated.
class PreconditionViolated : public Error {
public:
  explicit PreconditionViolated(const std::string& which)
      : Error("precondition violated: " + which) {}
};

/// The brute-force directional-derivative oracle found no consistent sign pattern.
class OracleFailure : public Error {
public:
  explicit OracleFailure(const std::string& what) : Error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionViolated(what);
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void check_finite(const Vector& v, const char* where) {
  if (!v.allFinite()) throw Error(std::string(where) + ": non-finite entries");
}

}  // namespace nstr

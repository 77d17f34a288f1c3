#pragma once

#include <functional>

#include "nstr/common.hpp"
#include "nstr/models.hpp"

namespace nstr {

/// Oracle contract every concrete problem implements: objective value, one
/// (Bouligand where available) subgradient, and the neighborhood gradient
/// bundle generating the model phi(x, delta; d).
struct ProblemDef {
  int dim = 0;
  std::function<double(const Vector&)> eval_f;
  std::function<Vector(const Vector&)> subgradient;
  std::function<models::GradientBundle(const Vector&, double delta, int cap)>
      bundle_for;
};

}  // namespace nstr

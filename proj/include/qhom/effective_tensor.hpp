#pragma once

#include <utility>
#include <vector>

#include "qhom/common.hpp"

namespace qhom::tensor {

enum class Route { cell, hessian, extrapolated };

inline const char* to_string(Route r) {
  switch (r) {
    case Route::cell: return "cell";
    case Route::hessian: return "hessian";
    case Route::extrapolated: return "extrapolated";
  }
  return "?";
}

// Homogenized coefficient tensor with provenance. `delta` is 0 for the
// extrapolated route; `schedule` carries the per-delta tensors the
// extrapolation was fitted to.
struct EffectiveTensor {
  Mat q;
  Route route = Route::cell;
  double delta = 0;
  int N = 0;

  struct Diagnostics {
    double asymmetry = 0;        // max |q - q^T| before symmetrization
    double grad_norm = 0;        // ||grad lambda(0)|| when evaluated
    double cross_gap = 0;        // max-entry gap between routes when compared
    double extrap_residual = 0;  // ||q(delta_min) - q*||_inf
    double richardson = 0;       // FD error estimate (hessian route)
    double fitted_rate = 0;      // exponent s of the delta power fit
    bool no_extrapolation = false;
  } diag;

  std::vector<std::pair<double, Mat>> schedule;
};

}  // namespace qhom::tensor

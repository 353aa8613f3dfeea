#pragma once

#include "qhom/cell.hpp"
#include "qhom/common.hpp"
#include "qhom/effective_tensor.hpp"
#include "qhom/parallel.hpp"
#include "qhom/spectral.hpp"

namespace qhom::tensor {

// Central-difference gradient of lambda_1 at eta = 0. The eigenvalue has a
// critical point there, so the norm must stay below grad_tol; anything larger
// signals an assembly or solver bug.
inline Vec gradient_at_zero(spectral::BlochSolver& solver, double h, double grad_tol = 1e-8) {
  const int d = solver.d();
  if (!(h > 0 && 2 * h < 0.5))
    throw Error(Errc::malformed_input, "fd step must satisfy 2h < 1/2");
  Vec g(d);
  for (int l = 0; l < d; ++l) {
    Vec e = Vec::Unit(d, l);
    g[l] = (solver.lambda(h * e) - solver.lambda(-h * e)) / (2 * h);
  }
  if (g.norm() > grad_tol)
    throw Error(Errc::criticality_violation, "gradient of lambda at 0 exceeds tolerance");
  return g;
}

namespace detail {

inline Mat hessian_fd(spectral::BlochSolver& solver, double h) {
  const int d = solver.d();
  auto lam = [&](const Vec& eta) {
    const spectral::EigenPair& p = solver.eigenpair(eta);
    if (p.simplicity_warning)
      throw Error(Errc::degenerate_stencil,
                  "simplicity warning at a stencil point; shrink the fd step");
    return p.lambda;
  };
  double l0 = lam(Vec::Zero(d));
  Mat H(d, d);
  for (int k = 0; k < d; ++k) {
    Vec ek = Vec::Unit(d, k);
    H(k, k) = (lam(h * ek) + lam(-h * ek) - 2 * l0) / (h * h);
    for (int l = k + 1; l < d; ++l) {
      Vec el = Vec::Unit(d, l);
      double v = (lam(h * ek + h * el) - lam(h * ek - h * el) - lam(-h * ek + h * el) +
                  lam(-h * ek - h * el)) /
                 (4 * h * h);
      H(k, l) = H(l, k) = v;
    }
  }
  return H;
}

}  // namespace detail

// q = 1/2 Hessian of lambda_1 at eta = 0 by central differences at steps h
// and h/2; the h/2 value is returned, the Richardson gap recorded.
inline EffectiveTensor hessian_tensor(spectral::BlochSolver& solver, double h) {
  if (!(h > 0 && 2 * h < 0.5))
    throw Error(Errc::malformed_input, "fd step must satisfy 2h < 1/2");
  Mat qh = 0.5 * detail::hessian_fd(solver, h);
  Mat qh2 = 0.5 * detail::hessian_fd(solver, h / 2);

  EffectiveTensor out;
  out.diag.asymmetry = (qh2 - qh2.transpose()).lpNorm<Eigen::Infinity>();
  out.q = 0.5 * (qh2 + qh2.transpose());
  out.route = Route::hessian;
  out.delta = solver.delta();
  out.N = solver.N();
  out.diag.richardson = (qh2 - qh).lpNorm<Eigen::Infinity>() / 3.0;
  return out;
}

// Checks Theorem-level identity for the eigenvector derivative: the central
// difference of phi across +-h e_l minus i phi_1(0) psi_l is constant in y.
// With the unit-l2 normalization phi_1(.;0) == 1, so the check subtracts
// i psi_l, projects out the constant mode and returns the relative residual.
inline double eigvec_derivative_check(spectral::BlochSolver& solver, double h, int direction) {
  const int d = solver.d();
  Vec e = Vec::Unit(d, direction);
  const CVec phip = solver.eigenpair(h * e).phi;
  const CVec phim = solver.eigenpair(-h * e).phi;
  cell::Corrector c = cell::solve_cell(solver.Bhat(), solver.winding(), solver.delta(),
                                       solver.N(), direction, 1e-11);
  CVec resid = (phip - phim) / (2 * h) - Complex(0, 1) * c.psi;
  resid[solver.lattice().zero_index()] = 0;
  double scale = c.psi.norm();
  if (scale < 1e-300) return resid.norm();
  return resid.norm() / scale;
}

struct PowerFit {
  double qstar = 0;
  double rate = 0;
  double coeff = 0;
  bool flat = false;  // schedule already converged; no fit performed
};

// Fits v = qstar + c delta^s through the last three points of a decreasing
// delta schedule. The caller decides what to do with non-monotone input;
// divergent differences raise continuation-failure.
inline PowerFit extrapolate_power_fit(const std::vector<double>& deltas,
                                      const std::vector<double>& values) {
  if (deltas.size() < 3 || deltas.size() != values.size())
    throw Error(Errc::malformed_input, "power fit needs at least three points");
  std::size_t k = deltas.size();
  double d1 = values[k - 3] - values[k - 2];
  double d2 = values[k - 2] - values[k - 1];
  double scale = 1 + std::abs(values[k - 1]);
  PowerFit out;
  if (std::abs(d1) <= 1e-13 * scale && std::abs(d2) <= 1e-13 * scale) {
    out.qstar = values[k - 1];
    out.flat = true;
    return out;
  }
  if (std::abs(d2) >= std::abs(d1) * (1 + 1e-9))
    throw Error(Errc::continuation_failure, "differences grow along the delta schedule");
  out.rate = std::log(std::abs(d1 / d2)) / std::log(deltas[k - 3] / deltas[k - 2]);
  out.coeff = d2 / (std::pow(deltas[k - 2], out.rate) - std::pow(deltas[k - 1], out.rate));
  out.qstar = values[k - 1] - out.coeff * std::pow(deltas[k - 1], out.rate);
  return out;
}

// delta -> 0 continuation of the approximate homogenized tensor along a
// decreasing schedule. The rate of the power fit is a heuristic (the
// convergence lemma is qualitative), so the smallest-delta tensor is always
// kept in the schedule table; non-monotone sequences return it with the
// no-extrapolation flag instead of extrapolating.
inline EffectiveTensor delta_continuation(const MatrixField& Bhat, const WindingMap& w,
                                          const std::vector<double>& deltas, int N,
                                          Route route = Route::cell, double h = 1e-3,
                                          double tol = 1e-9, int threads = 1) {
  if (deltas.empty()) throw Error(Errc::malformed_input, "empty delta schedule");
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i)
    if (deltas[i + 1] >= deltas[i])
      throw Error(Errc::malformed_input, "delta schedule must be strictly decreasing");
  if (route == Route::extrapolated)
    throw Error(Errc::malformed_input, "route must be cell or hessian");

  const int d = w.d();
  std::vector<Mat> qs(deltas.size());
  parallel_for(int(deltas.size()), threads, [&](int i) {
    if (route == Route::cell) {
      std::vector<cell::Corrector> cs;
      for (int l = 0; l < d; ++l) cs.push_back(cell::solve_cell(Bhat, w, deltas[i], N, l));
      qs[i] = cell::tensor_from_cell(cs, Bhat, w).q;
    } else {
      spectral::BlochSolver solver(Bhat, w, deltas[i], N, std::nullopt, tol);
      qs[i] = hessian_tensor(solver, h).q;
    }
  });

  EffectiveTensor out;
  out.route = Route::extrapolated;
  out.delta = 0;
  out.N = N;
  for (std::size_t i = 0; i < deltas.size(); ++i) out.schedule.emplace_back(deltas[i], qs[i]);

  const Mat& qlast = qs.back();
  if (deltas.size() < 3) {
    out.q = qlast;
    out.diag.no_extrapolation = true;
    return out;
  }

  // Global rate from the matrix-norm differences; per-entry amplitude.
  std::size_t k = deltas.size();
  double D1 = (qs[k - 3] - qs[k - 2]).lpNorm<Eigen::Infinity>();
  double D2 = (qs[k - 2] - qs[k - 1]).lpNorm<Eigen::Infinity>();
  double scale = 1 + qlast.lpNorm<Eigen::Infinity>();
  if (D1 <= 1e-13 * scale && D2 <= 1e-13 * scale) {
    out.q = qlast;
    out.diag.extrap_residual = D2;
    return out;
  }
  if (D2 >= D1 * (1 + 1e-9))
    throw Error(Errc::continuation_failure, "tensor differences grow along the delta schedule");

  bool monotone = true;
  for (int a = 0; a < d && monotone; ++a)
    for (int b = 0; b < d && monotone; ++b) {
      double e1 = qs[k - 3](a, b) - qs[k - 2](a, b);
      double e2 = qs[k - 2](a, b) - qs[k - 1](a, b);
      if (std::abs(e1) <= 1e-12 * scale && std::abs(e2) <= 1e-12 * scale) continue;
      if (e1 * e2 < 0 && std::min(std::abs(e1), std::abs(e2)) > 1e-10 * scale) monotone = false;
    }
  if (!monotone) {
    out.q = qlast;
    out.diag.no_extrapolation = true;
    out.diag.extrap_residual = D2;
    return out;
  }

  double s = std::log(D1 / D2) / std::log(deltas[k - 3] / deltas[k - 2]);
  double denom = std::pow(deltas[k - 2], s) - std::pow(deltas[k - 1], s);
  Mat qstar(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double c = (qs[k - 2](a, b) - qs[k - 1](a, b)) / denom;
      qstar(a, b) = qs[k - 1](a, b) - c * std::pow(deltas[k - 1], s);
    }
  out.q = 0.5 * (qstar + qstar.transpose());
  out.diag.fitted_rate = s;
  out.diag.extrap_residual = (qlast - out.q).lpNorm<Eigen::Infinity>();
  return out;
}

}  // namespace qhom::tensor

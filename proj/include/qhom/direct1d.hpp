#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "qhom/common.hpp"
#include "qhom/effective_tensor.hpp"
#include "qhom/parallel.hpp"
#include "qhom/trigsum.hpp"

namespace qhom::fd1d {

struct Mesh1D {
  double a = 0, b = 1;
  int n_cells = 0;

  Mesh1D(double a_, double b_, int n) : a(a_), b(b_), n_cells(n) {
    if (!(b > a) || n < 2) throw Error(Errc::malformed_input, "bad 1d mesh");
  }
  double h() const { return (b - a) / n_cells; }
  double node(int i) const { return a + h() * i; }
  double midpoint(int i) const { return a + h() * (i + 0.5); }

  // Mesh resolving the microscale: cell width <= eps / cells_per_eps.
  static Mesh1D resolve_eps(double a, double b, double eps, int cells_per_eps = 64) {
    int n = int(std::ceil((b - a) * cells_per_eps / eps));
    return Mesh1D(a, b, std::max(n, 2));
  }
};

// Nodal solution with cell-centered flux a(x/eps) u'.
struct Solution1D {
  Mesh1D mesh;
  Vec values;  // nodes 0..n
  Vec flux;    // midpoints 0..n-1
};

namespace detail {

// Finite-volume scheme with the coefficient at cell midpoints; Thomas solve.
inline Solution1D solve_fv(const std::function<double(double)>& coef,
                           const std::function<double(double)>& f, const Mesh1D& mesh) {
  const int n = mesh.n_cells;
  const double h = mesh.h();
  Vec am(n);
  for (int i = 0; i < n; ++i) {
    am[i] = coef(mesh.midpoint(i));
    if (!(am[i] > 0))
      throw Error(Errc::coercivity_violation, "coefficient not positive on the mesh");
  }
  // interior unknowns u_1..u_{n-1}
  Vec diag(n - 1), rhs(n - 1);
  Vec off(n - 2);
  for (int i = 1; i < n; ++i) {
    diag[i - 1] = (am[i - 1] + am[i]) / (h * h);
    rhs[i - 1] = f(mesh.node(i));
  }
  for (int i = 1; i < n - 1; ++i) off[i - 1] = -am[i] / (h * h);

  // Thomas algorithm
  Vec dvec = rhs;
  Vec bb = diag;
  for (int i = 1; i < n - 1; ++i) {
    double w = off[i - 1] / bb[i - 1];
    bb[i] -= w * off[i - 1];
    dvec[i] -= w * dvec[i - 1];
  }
  Vec u = Vec::Zero(n + 1);
  u[n - 1] = dvec[n - 2] / bb[n - 2];
  for (int i = n - 3; i >= 0; --i) u[i + 1] = (dvec[i] - off[i] * u[i + 2]) / bb[i];

  Solution1D out{mesh, std::move(u), Vec(n)};
  for (int i = 0; i < n; ++i) out.flux[i] = am[i] * (out.values[i + 1] - out.values[i]) / h;
  return out;
}

}  // namespace detail

// Dirichlet solve of -(a(x/eps) u')' = f with homogeneous boundary values.
// The mesh must resolve the microscale (cell width <= eps/16).
inline Solution1D solve_eps(const TrigSum& a, double eps, const std::function<double(double)>& f,
                            const Mesh1D& mesh) {
  if (!(eps > 0)) throw Error(Errc::malformed_input, "eps must be positive");
  if (mesh.h() > eps / 16.0 * (1 + 1e-12))
    throw Error(Errc::resolution, "mesh does not resolve the microscale (need h <= eps/16)");
  return detail::solve_fv([&](double x) { return a.eval(x / eps); }, f, mesh);
}

// Constant-coefficient Dirichlet solve on the same mesh and scheme, so
// comparisons against solve_eps reflect homogenization error only.
inline Solution1D solve_homogenized(double qstar, const std::function<double(double)>& f,
                                    const Mesh1D& mesh) {
  if (!(qstar > 0)) throw Error(Errc::malformed_input, "homogenized coefficient must be positive");
  return detail::solve_fv([&](double) { return qstar; }, f, mesh);
}

inline Solution1D solve_homogenized(const tensor::EffectiveTensor& q,
                                    const std::function<double(double)>& f, const Mesh1D& mesh) {
  if (q.q.rows() != 1) throw Error(Errc::malformed_input, "1d solver needs a 1x1 tensor");
  return solve_homogenized(q.q(0, 0), f, mesh);
}

struct ConvergenceRow {
  double eps;
  double rel_l2;    // ||u_eps - u*|| / ||u*|| on the nodes
  double flux_err;  // max_k |int (a u_eps' - q u*') sin(k pi x) dx|, k = 1..4
};

// Per-eps comparison of the oscillatory solve against the homogenized one on
// the interval (0,1) with the mesh drawn from the resolution policy. Both
// error columns are expected to decrease along a decreasing schedule.
inline std::vector<ConvergenceRow> convergence_report(const TrigSum& a, double qstar,
                                                      const std::function<double(double)>& f,
                                                      const std::vector<double>& eps_schedule,
                                                      int cells_per_eps = 64, int threads = 1) {
  for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
    if (eps_schedule[i + 1] >= eps_schedule[i])
      throw Error(Errc::malformed_input, "eps schedule must be strictly decreasing");
  std::vector<ConvergenceRow> rows(eps_schedule.size());
  parallel_for(int(eps_schedule.size()), threads, [&](int r) {
    double eps = eps_schedule[r];
    Mesh1D mesh = Mesh1D::resolve_eps(0.0, 1.0, eps, cells_per_eps);
    Solution1D ue = solve_eps(a, eps, f, mesh);
    Solution1D us = solve_homogenized(qstar, f, mesh);
    const int n = mesh.n_cells;
    const double h = mesh.h();

    double num = 0, den = 0;
    for (int i = 0; i <= n; ++i) {
      double w = (i == 0 || i == n) ? 0.5 : 1.0;
      double d = ue.values[i] - us.values[i];
      num += w * d * d * h;
      den += w * us.values[i] * us.values[i] * h;
    }

    double worst = 0;
    for (int k = 1; k <= 4; ++k) {
      double acc = 0;
      for (int i = 0; i < n; ++i) {
        double xm = mesh.midpoint(i);
        acc += (ue.flux[i] - us.flux[i]) * std::sin(k * M_PI * xm) * h;
      }
      worst = std::max(worst, std::abs(acc));
    }
    rows[r] = {eps, std::sqrt(num / den), worst};
  });
  return rows;
}

// True when the sequence decreases with at most `allowed` upward steps.
inline bool decreasing_trend(const std::vector<double>& v, int allowed = 1) {
  int bad = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] >= v[i]) ++bad;
  return bad <= allowed;
}

}  // namespace qhom::fd1d

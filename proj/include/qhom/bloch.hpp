#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "qhom/common.hpp"
#include "qhom/spectral.hpp"

namespace qhom::bloch {

// Compactly supported function on a box, sampled on a uniform tensor grid for
// the transform quadrature. n_samples = 0 lets the transform size the grid
// from the oscillation it has to resolve; a fixed positive value is used as
// given (and rejected when too coarse).
struct CompactFunction {
  Vec lo, hi;
  std::function<double(const Vec&)> f;
  int n_samples = 0;          // per dimension, including both endpoints
  double boundary_tol = 1e-3;  // relative magnitude allowed on the boundary

  int d() const { return int(lo.size()); }

  static CompactFunction gaussian1d(double sigma = 1.0, double halfwidth = 6.0) {
    CompactFunction g;
    g.lo = Vec::Constant(1, -halfwidth * sigma);
    g.hi = Vec::Constant(1, halfwidth * sigma);
    g.f = [sigma](const Vec& x) { return std::exp(-x.squaredNorm() / (2 * sigma * sigma)); };
    return g;
  }

  // exp(-1/(1-|x/w|^2)) inside |x| < w, exactly zero outside
  static CompactFunction bump1d(double halfwidth = 4.0) {
    CompactFunction g;
    g.lo = Vec::Constant(1, -halfwidth);
    g.hi = Vec::Constant(1, halfwidth);
    g.f = [halfwidth](const Vec& x) {
      double t = x.squaredNorm() / (halfwidth * halfwidth);
      return t < 1.0 ? std::exp(-1.0 / (1.0 - t)) : 0.0;
    };
    return g;
  }

  static CompactFunction from_samples(double lo, double hi, std::vector<double> values) {
    if (values.size() < 2) throw Error(Errc::malformed_input, "need at least two samples");
    CompactFunction g;
    g.lo = Vec::Constant(1, lo);
    g.hi = Vec::Constant(1, hi);
    g.n_samples = int(values.size());
    auto vals = std::make_shared<std::vector<double>>(std::move(values));
    g.f = [lo, hi, vals](const Vec& x) {
      double t = (x[0] - lo) / (hi - lo) * double(vals->size() - 1);
      if (t <= 0) return vals->front();
      if (t >= double(vals->size() - 1)) return vals->back();
      int i = int(t);
      double w = t - i;
      return (1 - w) * (*vals)[i] + w * (*vals)[i + 1];
    };
    return g;
  }

  void validate() const {
    if (lo.size() != hi.size() || lo.size() < 1)
      throw Error(Errc::malformed_input, "bad support box");
    for (int c = 0; c < lo.size(); ++c)
      if (!(lo[c] < hi[c])) throw Error(Errc::malformed_input, "bad support box");
    // values must vanish on the support boundary to the declared tolerance
    double peak = std::abs(f(0.5 * (lo + hi)));
    for (int c = 0; c < lo.size(); ++c) {
      Vec a = 0.5 * (lo + hi), b = a;
      a[c] = lo[c];
      b[c] = hi[c];
      double edge = std::max(std::abs(f(a)), std::abs(f(b)));
      if (edge > boundary_tol * (peak + 1e-300))
        throw Error(Errc::malformed_input, "function does not vanish on the support boundary");
    }
  }
};

namespace detail {

struct QuadGrid {
  std::vector<Vec> pts;
  std::vector<double> wts;
  double step = 0;
};

inline QuadGrid make_grid(const CompactFunction& g, int per_dim) {
  const int d = g.d();
  QuadGrid q;
  long total = 1;
  for (int c = 0; c < d; ++c) total *= per_dim;
  q.pts.reserve(total);
  q.wts.reserve(total);
  Vec h(d);
  for (int c = 0; c < d; ++c) h[c] = (g.hi[c] - g.lo[c]) / double(per_dim - 1);
  q.step = h.maxCoeff();
  std::vector<int> k(d, 0);
  for (long idx = 0; idx < total; ++idx) {
    long r = idx;
    double wt = 1;
    Vec x(d);
    for (int c = d - 1; c >= 0; --c) {
      k[c] = int(r % per_dim);
      r /= per_dim;
      x[c] = g.lo[c] + h[c] * k[c];
      double wc = (k[c] == 0 || k[c] == per_dim - 1) ? 0.5 : 1.0;
      wt *= wc * h[c];
    }
    q.pts.push_back(std::move(x));
    q.wts.push_back(wt);
  }
  return q;
}

// sum_j w_j g(x_j) e^{-i x_j . kappa}; 1-d grids use a phase recurrence.
inline Complex oscillatory_quad(const QuadGrid& q, const std::vector<double>& gvals,
                                const Vec& kappa) {
  const long n = long(q.pts.size());
  if (kappa.size() == 1) {
    Complex rot = std::exp(Complex(0, -kappa[0] * (q.pts[1][0] - q.pts[0][0])));
    Complex z = std::exp(Complex(0, -kappa[0] * q.pts[0][0]));
    Complex acc = 0;
    for (long j = 0; j < n; ++j) {
      acc += q.wts[j] * gvals[j] * z;
      z *= rot;
    }
    return acc;
  }
  Complex acc = 0;
  for (long j = 0; j < n; ++j)
    acc += q.wts[j] * gvals[j] * std::exp(Complex(0, -q.pts[j].dot(kappa)));
  return acc;
}

inline bool in_zone(const Vec& eta) {
  for (int c = 0; c < eta.size(); ++c)
    if (eta[c] < -0.5 || eta[c] >= 0.5) return false;
  return true;
}

inline constexpr double kModeCutoff = 1e-13;

}  // namespace detail

// The restricted first Bloch wave at scale eps,
//   phi~(x; xi) = phi_1^delta(Lambda x / eps; eps xi),
// normalized so its value at xi = 0 is the constant (2 pi)^{-d/2}.
class BlochWave {
 public:
  BlochWave(spectral::BlochSolver& solver, double eps) : solver_(&solver), eps_(eps) {
    if (!(eps > 0)) throw Error(Errc::malformed_input, "eps must be positive");
  }

  double eps() const { return eps_; }
  int d() const { return solver_->d(); }
  spectral::BlochSolver& solver() { return *solver_; }

  Complex eval(const Vec& x, const Vec& xi) {
    Vec eta = eps_ * xi;
    if (!detail::in_zone(eta))
      throw Error(Errc::out_of_zone, "eps*xi outside Y'");
    const spectral::EigenPair& p = solver_->eigenpair(eta);
    const ModeLattice lat = solver_->lattice();
    double norm = std::pow(2 * M_PI, -0.5 * d());
    Complex acc = 0;
    for (int i = 0; i < lat.size(); ++i) {
      if (std::abs(p.phi[i]) < detail::kModeCutoff) continue;
      std::vector<int> n = lat.mode(i);
      acc += p.phi[i] * std::exp(Complex(0, solver_->winding().freq_of(n).dot(x) / eps_));
    }
    return norm * acc;
  }

 private:
  spectral::BlochSolver* solver_;
  double eps_;
};

struct TransformValue {
  Vec xi;
  Complex value;
  bool outside_zone = false;
  bool excluded_by_gap = false;  // simplicity flag treated as outside U^delta
};

// Dominant Bloch coefficient of g: quadrature over the support of
//   g(x) e^{-i x.xi} conj(phi~(x;xi)).
// eps*xi outside Y' yields zero by the extension convention. The same grid
// with the constant wave gives the reference Fourier transform, so the
// comparison isolates the wave factor.
class Transform {
 public:
  Transform(const CompactFunction& g, BlochWave& bw, int min_pts_per_period = 8,
            long max_grid_points = 40'000'000)
      : g_(g), bw_(&bw), min_ppp_(min_pts_per_period), max_grid_(max_grid_points) {
    g_.validate();
    if (g_.d() != bw.d())
      throw Error(Errc::malformed_input, "function/operator dimension mismatch");
  }

  // Highest oscillation the quadrature must resolve for this xi: the plane
  // wave plus the significant wave modes shifted by Lambda^T n / eps.
  double max_frequency(const Vec& xi) {
    double kmax = xi.lpNorm<Eigen::Infinity>();
    Vec eta = bw_->eps() * xi;
    if (!detail::in_zone(eta)) return kmax;
    const spectral::EigenPair& p = bw_->solver().eigenpair(eta);
    const ModeLattice lat = bw_->solver().lattice();
    double cutoff = detail::kModeCutoff * p.phi.cwiseAbs().maxCoeff();
    for (int i = 0; i < lat.size(); ++i) {
      if (std::abs(p.phi[i]) < cutoff) continue;
      std::vector<int> n = lat.mode(i);
      Vec k = xi + bw_->solver().winding().freq_of(n) / bw_->eps();
      kmax = std::max(kmax, k.lpNorm<Eigen::Infinity>());
    }
    return kmax;
  }

  std::vector<TransformValue> operator()(const std::vector<Vec>& xis) {
    prepare(xis);
    std::vector<TransformValue> out;
    out.reserve(xis.size());
    for (const auto& xi : xis) out.push_back(at(xi));
    return out;
  }

  // Reference Fourier transform by the identical quadrature (constant wave).
  Complex reference(const Vec& xi) {
    require_grid();
    double norm = std::pow(2 * M_PI, -0.5 * g_.d());
    return norm * detail::oscillatory_quad(grid_, gvals_, xi);
  }

  // Builds (or checks) the quadrature grid for a batch of xi values.
  void prepare(const std::vector<Vec>& xis) {
    double kmax = 1e-9;
    for (const auto& xi : xis) kmax = std::max(kmax, max_frequency(xi));
    double width = (g_.hi - g_.lo).maxCoeff();
    int needed = int(std::ceil(width * kmax / (2 * M_PI) * min_ppp_)) + 2;
    int per_dim = std::max(needed, 512);
    if (g_.n_samples > 0) {
      per_dim = g_.n_samples;
      if (per_dim < needed)
        throw Error(Errc::resolution,
                    "sample grid has fewer than the required points per period");
    }
    long total = 1;
    for (int c = 0; c < g_.d(); ++c) {
      total *= per_dim;
      if (total > max_grid_) throw Error(Errc::resolution, "quadrature grid would be too large");
    }
    if (per_dim != per_dim_) {
      per_dim_ = per_dim;
      grid_ = detail::make_grid(g_, per_dim_);
      gvals_.resize(grid_.pts.size());
      for (std::size_t j = 0; j < grid_.pts.size(); ++j) gvals_[j] = g_.f(grid_.pts[j]);
    }
  }

  TransformValue at(const Vec& xi) {
    require_grid();
    TransformValue tv;
    tv.xi = xi;
    Vec eta = bw_->eps() * xi;
    if (!detail::in_zone(eta)) {
      tv.value = 0;
      tv.outside_zone = true;
      return tv;
    }
    const spectral::EigenPair& p = bw_->solver().eigenpair(eta);
    if (p.simplicity_warning) {
      tv.value = 0;
      tv.excluded_by_gap = true;
      return tv;
    }
    const ModeLattice lat = bw_->solver().lattice();
    double cutoff = detail::kModeCutoff * p.phi.cwiseAbs().maxCoeff();
    double norm = std::pow(2 * M_PI, -0.5 * g_.d());
    Complex acc = 0;
    for (int i = 0; i < lat.size(); ++i) {
      if (std::abs(p.phi[i]) < cutoff) continue;
      std::vector<int> n = lat.mode(i);
      Vec kappa = xi + bw_->solver().winding().freq_of(n) / bw_->eps();
      acc += std::conj(p.phi[i]) * detail::oscillatory_quad(grid_, gvals_, kappa);
    }
    tv.value = norm * acc;
    return tv;
  }

 private:
  void require_grid() const {
    if (per_dim_ == 0)
      throw Error(Errc::internal_consistency, "transform used before prepare()");
  }

  CompactFunction g_;
  BlochWave* bw_;
  int min_ppp_;
  long max_grid_;
  int per_dim_ = 0;
  detail::QuadGrid grid_;
  std::vector<double> gvals_;
};

inline std::vector<TransformValue> bloch_transform(const CompactFunction& g, BlochWave& bw,
                                                   const std::vector<Vec>& xis,
                                                   int min_pts_per_period = 8) {
  Transform t(g, bw, min_pts_per_period);
  return t(xis);
}

struct ConvergenceRow {
  double eps;
  double sup_err;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope = 0;  // log-log fit; +inf when errors sit at the floor
};

// Error of the Bloch transform against the reference Fourier transform
// (identical quadrature, constant wave), swept over an eps schedule, with a
// fitted log-log slope.
inline ConvergenceReport transform_convergence(const CompactFunction& g,
                                               spectral::BlochSolver& solver,
                                               const std::vector<double>& eps_schedule,
                                               const std::vector<Vec>& xis) {
  if (eps_schedule.empty()) throw Error(Errc::malformed_input, "empty eps schedule");
  for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
    if (eps_schedule[i + 1] >= eps_schedule[i])
      throw Error(Errc::malformed_input, "eps schedule must be strictly decreasing");

  ConvergenceReport rep;
  for (double eps : eps_schedule) {
    BlochWave bw(solver, eps);
    Transform t(g, bw);
    t.prepare(xis);
    double sup = 0;
    for (const auto& xi : xis) {
      TransformValue tv = t.at(xi);
      Complex ref = t.reference(xi);
      sup = std::max(sup, std::abs(tv.value - ref));
    }
    rep.rows.push_back({eps, sup});
  }

  // least-squares slope over rows above the roundoff floor
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rep.rows) {
    if (r.sup_err <= 1e-14) continue;
    double x = std::log(r.eps), y = std::log(r.sup_err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  rep.slope = (n >= 2) ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : kInf;
  return rep;
}

// Negative-order-norm proxy for the regularization residual
// beta = sqrt(delta) Lap phi at scale eps:
//   ||beta|| = sqrt(delta) ( sum_n |n/eps|^4 (1+|n/eps|^2)^{-1} |phi(n)|^2 )^{1/2}.
inline double regularization_residual(spectral::BlochSolver& solver, const Vec& xi, double eps) {
  Vec eta = eps * xi;
  if (!detail::in_zone(eta)) throw Error(Errc::out_of_zone, "eps*xi outside Y'");
  const spectral::EigenPair& p = solver.eigenpair(eta);
  const ModeLattice lat = solver.lattice();
  double acc = 0;
  for (int i = 0; i < lat.size(); ++i) {
    double a2 = std::norm(p.phi[i]);
    if (a2 == 0) continue;
    std::vector<int> n = lat.mode(i);
    double n2 = 0;
    for (int v : n) n2 += double(v) * double(v);
    n2 /= eps * eps;
    acc += n2 * n2 / (1 + n2) * a2;
  }
  return std::sqrt(solver.delta()) * std::sqrt(acc);
}

}  // namespace qhom::bloch

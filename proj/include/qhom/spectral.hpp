#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "qhom/common.hpp"
#include "qhom/fourier.hpp"
#include "qhom/parallel.hpp"
#include "qhom/winding.hpp"

namespace qhom::spectral {

using SpMat = Eigen::SparseMatrix<Complex>;

// Gaarding shift making the assembled operator positive definite uniformly in
// eta and delta: (d+1) times the l1-of-coefficients bound on sup ||B||.
inline double choose_shift(const MatrixField& Bhat, double delta) {
  if (!(delta > 0 && delta < 1))
    throw Error(Errc::malformed_input, "delta must lie in (0,1)");
  if (Bhat.empty()) throw Error(Errc::malformed_input, "empty coefficient field");
  const int d = int(Bhat.coeffs().begin()->second.rows());
  return double(d + 1) * sup_bound(Bhat);
}

// The regularized shifted operator C^delta(eta) + C_* I on the truncated mode
// lattice, in the orthonormal exponential basis.
struct ShiftedOperator {
  MatrixField Bhat;
  WindingMap w;
  Vec eta;       // quasimomentum in Y' = [-1/2, 1/2)^d
  double delta;  // regularization, in (0,1)
  ModeLattice lattice;
  double shift;  // C_*
};

inline ShiftedOperator make_operator(MatrixField Bhat, WindingMap w, Vec eta, double delta,
                                     int N, std::optional<double> shift = std::nullopt) {
  if (!(delta > 0 && delta < 1))
    throw Error(Errc::malformed_input, "delta must lie in (0,1)");
  if (int(eta.size()) != w.d())
    throw Error(Errc::malformed_input, "eta dimension mismatch");
  for (int c = 0; c < eta.size(); ++c)
    if (eta[c] < -0.5 || eta[c] >= 0.5)
      throw Error(Errc::malformed_input, "eta outside Y'");
  Bhat.validate();
  double cs = shift ? *shift : choose_shift(Bhat, delta);
  ModeLattice lattice(w.M(), N);
  return ShiftedOperator{std::move(Bhat), std::move(w), std::move(eta), delta,
                         std::move(lattice), cs};
}

namespace detail {

// Galerkin matrix of the form a^delta[eta] (no shift): entry
//   (m,n) = (Lambda^T m + eta) . Bhat(m-n) (Lambda^T n + eta) + delta |n|^2 [m=n].
// Convolution differences outside the lattice are zero. Hermitian by
// construction: the lower triangle is computed and mirrored.
inline SpMat assemble_impl(const ShiftedOperator& op, double diag_shift) {
  const ModeLattice& lat = op.lattice;
  const int S = lat.size();
  const int d = op.w.d();

  std::vector<Vec> shifted_freq(S);  // Lambda^T n + eta
  std::vector<double> nsq(S);
  for (int i = 0; i < S; ++i) {
    std::vector<int> n = lat.mode(i);
    shifted_freq[i] = op.w.freq_of(n) + op.eta;
    double s = 0;
    for (int v : n) s += double(v) * double(v);
    nsq[i] = s;
  }

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(std::size_t(S) * (op.Bhat.coeffs().size() + 1));
  std::vector<int> m(lat.M());
  for (int in = 0; in < S; ++in) {
    std::vector<int> n = lat.mode(in);
    for (const auto& [k, Bk] : op.Bhat.coeffs()) {
      for (int j = 0; j < lat.M(); ++j) m[j] = n[j] + k[j];
      if (!lat.contains(m)) continue;
      int im = lat.index(m);
      if (im < in) continue;  // mirrored below
      Complex val = 0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) val += shifted_freq[im][a] * Bk(a, b) * shifted_freq[in][b];
      if (im == in) {
        trip.emplace_back(in, in, Complex(val.real(), 0));
      } else {
        trip.emplace_back(im, in, val);
        trip.emplace_back(in, im, std::conj(val));
      }
    }
    double dg = op.delta * nsq[in] + diag_shift;
    if (dg != 0) trip.emplace_back(in, in, Complex(dg, 0));
  }
  SpMat K(S, S);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  return K;
}

}  // namespace detail

// Assembled matrix including the Gaarding shift C_* on the diagonal.
inline SpMat assemble(const ShiftedOperator& op) {
  return detail::assemble_impl(op, op.shift);
}

// The form matrix alone (used internally; eigenvalues of `assemble` differ
// from these by exactly C_*).
inline SpMat assemble_form(const ShiftedOperator& op) {
  return detail::assemble_impl(op, 0.0);
}

struct EigenPair {
  double lambda = 0;  // first eigenvalue of C^delta(eta), shift removed
  CVec phi;           // unit l2 norm over the mode lattice, phase-fixed
  double norm_value = 1.0;
  std::string phase_convention;
  double residual = 0;
  double gap = 0;  // lambda_2 - lambda_1 (estimate on the iterative path)
  bool simplicity_warning = false;
};

namespace detail {

inline constexpr int kDenseThreshold = 600;
inline constexpr double kGapTolFactor = 1e-8;

inline void fix_phase(CVec& phi, int zero_index, std::string& convention) {
  double maxabs = phi.cwiseAbs().maxCoeff();
  int pivot = zero_index;
  if (std::abs(phi[zero_index]) > 1e-10 * maxabs) {
    convention = "zero-mode-real-positive";
  } else {
    pivot = 0;
    while (pivot < phi.size() && std::abs(phi[pivot]) <= 1e-10 * maxabs) ++pivot;
    convention = "first-nonzero-real-positive";
  }
  Complex p = phi[pivot];
  phi *= std::conj(p) / std::abs(p);
}

inline double rayleigh(const SpMat& K, const CVec& phi) {
  return (phi.adjoint() * (K * phi))(0, 0).real() / phi.squaredNorm();
}

inline double resid_norm(const SpMat& K, const CVec& phi, double lambda) {
  return (K * phi - lambda * phi).norm() / phi.norm();
}

// Lanczos with full reorthogonalization on (K + C_* I)^{-1}; the two largest
// Ritz values give the two smallest eigenvalues of K.
struct LanczosResult {
  double lambda1, lambda2;
  CVec phi;
  bool converged;
};

inline LanczosResult lanczos_smallest(const SpMat& K, double cstar, double tol, int maxit) {
  const int S = int(K.rows());
  SpMat Ks = K;
  for (int i = 0; i < S; ++i) Ks.coeffRef(i, i) += cstar;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt(Ks);
  if (ldlt.info() != Eigen::Success)
    throw Error(Errc::solver_failure, "factorization of the shifted operator failed");

  maxit = std::min(maxit, S);
  std::vector<CVec> V;
  V.reserve(maxit);
  std::vector<double> alpha, beta;

  SplitMix64 rng(0x3c6ef372fe94f82bull);
  CVec v(S);
  for (int i = 0; i < S; ++i) v[i] = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
  v.normalize();

  LanczosResult out{0, 0, CVec(), false};
  for (int j = 0; j < maxit; ++j) {
    V.push_back(v);
    CVec w = ldlt.solve(v);
    double a = (v.adjoint() * w)(0, 0).real();
    alpha.push_back(a);
    // full reorthogonalization, repeated once
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : V) w -= u * (u.adjoint() * w)(0, 0);
    double b = w.norm();

    bool check_now = (b < 1e-13) || (j + 1 == maxit) || (j >= 9 && (j + 1) % 5 == 0);
    if (check_now && int(alpha.size()) >= 2) {
      int k = int(alpha.size());
      Mat T = Mat::Zero(k, k);
      for (int i = 0; i < k; ++i) T(i, i) = alpha[i];
      for (int i = 0; i + 1 < k; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
      Eigen::SelfAdjointEigenSolver<Mat> es(T);
      // largest Ritz value of the inverse <-> smallest eigenvalue of K
      Vec y1 = es.eigenvectors().col(k - 1);
      CVec cand = CVec::Zero(S);
      for (int i = 0; i < k; ++i) cand += V[i] * y1[i];
      cand.normalize();
      double lam = rayleigh(K, cand);
      double res = resid_norm(K, cand, lam);
      double theta2 = es.eigenvalues()[k - 2];
      double lam2 = (theta2 > 0) ? 1.0 / theta2 - cstar : kInf;
      if (res <= tol) {
        out = {lam, lam2, std::move(cand), true};
        return out;
      }
      out = {lam, lam2, std::move(cand), false};
    }
    if (b < 1e-13) {
      // Krylov space became invariant; continue from a fresh direction.
      CVec f(S);
      for (int i = 0; i < S; ++i)
        f[i] = Complex(rng.next_double() - 0.5, rng.next_double() - 0.5);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : V) f -= u * (u.adjoint() * f)(0, 0);
      double fb = f.norm();
      if (fb < 1e-13) break;  // space exhausted
      beta.push_back(0.0);
      v = f / fb;
    } else {
      beta.push_back(b);
      v = w / b;
    }
  }
  return out;
}

}  // namespace detail

// Smallest eigenpair of the regularized shifted operator, shift undone.
// Dense full solve at small lattice sizes, shift-invert Lanczos above; a
// purely diagonal matrix (constant B) is read off exactly. The gap to the
// second eigenvalue is recorded and a warning flagged when it falls below
// 1e-8 (1+|lambda_2|), since analyticity guarantees simplicity only near
// eta = 0.
inline EigenPair first_eigenpair(const ShiftedOperator& op, double tol = 1e-9) {
  if (!(tol > 0)) throw Error(Errc::malformed_input, "tolerance must be positive");
  const int S = op.lattice.size();
  SpMat K = assemble_form(op);

  EigenPair out;
  bool diagonal = true;
  for (int c = 0; c < K.outerSize() && diagonal; ++c)
    for (SpMat::InnerIterator it(K, c); it; ++it)
      if (it.row() != it.col() && std::abs(it.value()) != 0.0) {
        diagonal = false;
        break;
      }

  if (diagonal) {
    int imin = 0, imin2 = -1;
    Vec diag = K.diagonal().real();
    for (int i = 1; i < S; ++i)
      if (diag[i] < diag[imin]) imin = i;
    for (int i = 0; i < S; ++i) {
      if (i == imin) continue;
      if (imin2 < 0 || diag[i] < diag[imin2]) imin2 = i;
    }
    out.lambda = diag[imin];
    out.phi = CVec::Zero(S);
    out.phi[imin] = 1.0;
    out.gap = (imin2 >= 0) ? diag[imin2] - diag[imin] : kInf;
    out.residual = 0.0;
  } else if (S <= detail::kDenseThreshold) {
    CMat Kd = CMat(K);
    Eigen::SelfAdjointEigenSolver<CMat> es(Kd);
    if (es.info() != Eigen::Success)
      throw Error(Errc::solver_failure, "dense eigensolver did not converge");
    out.phi = es.eigenvectors().col(0);
    out.lambda = detail::rayleigh(K, out.phi);
    out.gap = es.eigenvalues()[1] - out.lambda;
    out.residual = detail::resid_norm(K, out.phi, out.lambda);
  } else {
    auto lz = detail::lanczos_smallest(K, op.shift, tol, 260);
    if (!lz.converged && S <= 4096) {
      CMat Kd = CMat(K);
      Eigen::SelfAdjointEigenSolver<CMat> es(Kd);
      if (es.info() != Eigen::Success)
        throw Error(Errc::solver_failure, "dense fallback eigensolver did not converge");
      lz.phi = es.eigenvectors().col(0);
      lz.lambda1 = detail::rayleigh(K, lz.phi);
      lz.lambda2 = es.eigenvalues()[1];
      lz.converged = true;
    }
    if (!lz.converged)
      throw Error(Errc::solver_failure, "iterative eigensolver did not reach tolerance");
    out.phi = std::move(lz.phi);
    out.lambda = lz.lambda1;
    out.gap = lz.lambda2 - lz.lambda1;
    out.residual = detail::resid_norm(K, out.phi, out.lambda);
  }

  if (out.residual > tol)
    throw Error(Errc::solver_failure, "eigenpair residual exceeds tolerance");
  out.phi.normalize();
  detail::fix_phase(out.phi, op.lattice.zero_index(), out.phase_convention);
  double lam2 = out.lambda + out.gap;
  out.simplicity_warning = out.gap < detail::kGapTolFactor * (1 + std::abs(lam2));
  return out;
}

// Caching solver for a fixed (Bhat, Lambda, delta, N): eigenpairs are keyed
// by eta rounded to 1e-12. Safe for concurrent lookups with single-writer
// inserts; results do not depend on scheduling.
class BlochSolver {
 public:
  BlochSolver(MatrixField Bhat, WindingMap w, double delta, int N,
              std::optional<double> shift = std::nullopt, double tol = 1e-9)
      : Bhat_(std::move(Bhat)),
        w_(std::move(w)),
        delta_(delta),
        N_(N),
        tol_(tol) {
    Bhat_.validate();
    shift_ = shift ? *shift : choose_shift(Bhat_, delta);
  }

  const EigenPair& eigenpair(const Vec& eta) {
    std::vector<std::int64_t> key(eta.size());
    for (int i = 0; i < eta.size(); ++i) key[i] = std::llround(eta[i] * 1e12);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        ++hits_;
        return it->second;
      }
    }
    EigenPair pair =
        first_eigenpair(make_operator(Bhat_, w_, eta, delta_, N_, shift_), tol_);
    std::lock_guard<std::mutex> lock(mu_);
    ++misses_;
    return cache_.emplace(std::move(key), std::move(pair)).first->second;
  }

  double lambda(const Vec& eta) { return eigenpair(eta).lambda; }

  const MatrixField& Bhat() const { return Bhat_; }
  const WindingMap& winding() const { return w_; }
  double delta() const { return delta_; }
  int N() const { return N_; }
  double shift() const { return shift_; }
  double tol() const { return tol_; }
  int d() const { return w_.d(); }
  ModeLattice lattice() const { return ModeLattice(w_.M(), N_); }
  long cache_hits() const { return hits_; }
  long cache_misses() const { return misses_; }

 private:
  MatrixField Bhat_;
  WindingMap w_;
  double delta_;
  int N_;
  double shift_;
  double tol_;
  std::map<std::vector<std::int64_t>, EigenPair> cache_;
  std::mutex mu_;
  long hits_ = 0, misses_ = 0;
};

struct SweepRow {
  Vec eta;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  bool simplicity_warning = false;
  std::string error;  // empty on success
};

// One eigenpair summary per eta, in input order. Per-row failures are
// reported in the row instead of aborting the sweep.
inline std::vector<SweepRow> eigen_sweep(const MatrixField& Bhat, const WindingMap& w,
                                         double delta, int N, const std::vector<Vec>& etas,
                                         double tol = 1e-9, int threads = 1) {
  std::vector<SweepRow> rows(etas.size());
  double shift = choose_shift(Bhat, delta);
  parallel_for(int(etas.size()), threads, [&](int i) {
    rows[i].eta = etas[i];
    try {
      EigenPair p = first_eigenpair(make_operator(Bhat, w, etas[i], delta, N, shift), tol);
      rows[i].lambda = p.lambda;
      rows[i].gap = p.gap;
      rows[i].residual = p.residual;
      rows[i].simplicity_warning = p.simplicity_warning;
    } catch (const Error& e) {
      rows[i].error = e.what();
    }
  });
  return rows;
}

}  // namespace qhom::spectral

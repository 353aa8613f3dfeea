#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "qhom/common.hpp"
#include "qhom/effective_tensor.hpp"
#include "qhom/fourier.hpp"
#include "qhom/winding.hpp"

namespace qhom::cell {

// Solution of the regularized lifted cell problem in direction e_l,
//   -D.B D psi - delta Lap psi = D.B e_l,   D = Lambda^T grad_y,
// on the zero-mean subspace (psi(0) = 0 by the gauge).
struct Corrector {
  int direction = 0;  // 0-based
  int N = 0;
  double delta = 0;
  CVec psi;  // coefficients over ModeLattice(M, N), zero mode exactly 0
  struct Energy {
    double dpsi_sq = 0;   // ||D psi||^2
    double dgrad_sq = 0;  // delta ||grad psi||^2
  } energy;
  double residual = 0;
};

// A-priori bound constant for ||D psi||^2 + delta ||grad psi||^2 in terms of
// the sup bound of B and the coercivity constant alpha.
inline double apriori_bound_constant(const MatrixField& Bhat, double alpha) {
  double nb = sup_bound(Bhat);
  return nb * nb * (1 + alpha) / (alpha * alpha);
}

inline Corrector solve_cell(const MatrixField& Bhat, const WindingMap& w, double delta, int N,
                            int direction, double tol = 1e-11) {
  if (!(delta > 0 && delta < 1))
    throw Error(Errc::malformed_input, "delta must lie in (0,1)");
  if (direction < 0 || direction >= w.d())
    throw Error(Errc::malformed_input, "cell direction out of range");
  Bhat.validate();

  const ModeLattice lat(w.M(), N);
  const int S = lat.size();
  const int iz = lat.zero_index();
  const int d = w.d();
  auto reduced = [&](int i) { return i < iz ? i : i - 1; };

  // Right side at mode m: i (Lambda^T m).(Bhat(m) e_l).
  CVec rhs = CVec::Zero(S - 1);
  for (const auto& [m, Bm] : Bhat.coeffs()) {
    if (!lat.contains(m)) continue;
    int im = lat.index(m);
    if (im == iz) continue;
    Vec fm = w.freq_of(m);
    Complex v = 0;
    for (int a = 0; a < d; ++a) v += fm[a] * Bm(a, direction);
    rhs[reduced(im)] += Complex(0, 1) * v;
  }

  Corrector out;
  out.direction = direction;
  out.N = N;
  out.delta = delta;
  out.psi = CVec::Zero(S);
  if (rhs.norm() == 0.0) return out;  // constant B: psi = 0 exactly

  std::vector<Vec> freq(S);
  std::vector<double> nsq(S);
  for (int i = 0; i < S; ++i) {
    std::vector<int> n = lat.mode(i);
    freq[i] = w.freq_of(n);
    double s = 0;
    for (int v : n) s += double(v) * double(v);
    nsq[i] = s;
  }

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(std::size_t(S) * (Bhat.coeffs().size() + 1));
  std::vector<int> m(lat.M());
  for (int in = 0; in < S; ++in) {
    if (in == iz) continue;
    std::vector<int> n = lat.mode(in);
    for (const auto& [k, Bk] : Bhat.coeffs()) {
      for (int j = 0; j < lat.M(); ++j) m[j] = n[j] + k[j];
      if (!lat.contains(m)) continue;
      int im = lat.index(m);
      if (im == iz || im < in) continue;
      Complex val = 0;
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) val += freq[im][a] * Bk(a, b) * freq[in][b];
      if (im == in) {
        trip.emplace_back(reduced(in), reduced(in), Complex(val.real(), 0));
      } else {
        trip.emplace_back(reduced(im), reduced(in), val);
        trip.emplace_back(reduced(in), reduced(im), std::conj(val));
      }
    }
    trip.emplace_back(reduced(in), reduced(in), Complex(delta * nsq[in], 0));
  }
  Eigen::SparseMatrix<Complex> K(S - 1, S - 1);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<Complex>, Eigen::Lower> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw Error(Errc::solver_failure, "cell system factorization failed");
  CVec psi = ldlt.solve(rhs);
  double res = (K * psi - rhs).norm() / rhs.norm();
  if (!(res <= tol))
    throw Error(Errc::solver_failure, "cell solve residual exceeds tolerance");

  out.residual = res;
  for (int i = 0; i < S; ++i) {
    if (i == iz) continue;
    Complex c = psi[reduced(i)];
    out.psi[i] = c;
    out.energy.dpsi_sq += freq[i].squaredNorm() * std::norm(c);
    out.energy.dgrad_sq += delta * nsq[i] * std::norm(c);
  }
  return out;
}

// Approximate homogenized tensor by the mean-flux formula
//   q_kl = bhat_kl(0) + sum_n (Bhat(-n) e_k) . (i Lambda^T n psi_l(n)),
// symmetrized with the asymmetry recorded.
inline tensor::EffectiveTensor tensor_from_cell(const std::vector<Corrector>& correctors,
                                                const MatrixField& Bhat, const WindingMap& w,
                                                double asym_tol = 1e-8) {
  const int d = w.d();
  if (int(correctors.size()) != d)
    throw Error(Errc::malformed_input, "need one corrector per direction");
  for (int l = 0; l < d; ++l) {
    if (correctors[l].direction != l)
      throw Error(Errc::malformed_input, "correctors out of order");
    if (correctors[l].N != correctors[0].N || correctors[l].delta != correctors[0].delta)
      throw Error(Errc::malformed_input, "correctors must share (delta, N)");
  }
  const ModeLattice lat(w.M(), correctors[0].N);

  Mat q = Mat::Zero(d, d);
  std::vector<int> neg(w.M());
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      Complex acc = 0;
      std::vector<int> zero(w.M(), 0);
      if (const CMat* b0 = Bhat.find(zero)) acc += (*b0)(k, l);
      for (const auto& [n, Bn] : Bhat.coeffs()) {
        bool is_zero = true;
        for (int v : n) is_zero &= (v == 0);
        if (is_zero || !lat.contains(n)) continue;
        for (int j = 0; j < w.M(); ++j) neg[j] = -n[j];
        const CMat* Bneg = Bhat.find(neg);
        if (!Bneg) continue;
        Vec fn = w.freq_of(n);
        Complex psin = correctors[l].psi[lat.index(n)];
        Complex flux = 0;
        for (int a = 0; a < d; ++a) flux += (*Bneg)(k, a) * fn[a];
        acc += flux * Complex(0, 1) * psin;
      }
      if (std::abs(acc.imag()) > kRealityTol * (1 + std::abs(acc)))
        throw Error(Errc::consistency, "tensor entry evaluated to a non-real value");
      q(k, l) = acc.real();
    }

  double asym = (q - q.transpose()).lpNorm<Eigen::Infinity>();
  if (asym > 10 * asym_tol)
    throw Error(Errc::consistency, "cell tensor asymmetry exceeds tolerance");

  tensor::EffectiveTensor out;
  out.q = 0.5 * (q + q.transpose());
  out.route = tensor::Route::cell;
  out.delta = correctors[0].delta;
  out.N = correctors[0].N;
  out.diag.asymmetry = asym;
  return out;
}

// The quasiperiodic corrector N^l(x) = psi(Lambda x).
inline double evaluate_corrector(const Corrector& c, const WindingMap& w, const Vec& x) {
  const ModeLattice lat(w.M(), c.N);
  Complex acc = 0;
  for (int i = 0; i < lat.size(); ++i) {
    if (c.psi[i] == Complex(0, 0)) continue;
    std::vector<int> n = lat.mode(i);
    acc += c.psi[i] * std::exp(Complex(0, w.freq_of(n).dot(x)));
  }
  if (std::abs(acc.imag()) > kRealityTol * (1 + std::abs(acc)))
    throw Error(Errc::internal_consistency, "corrector evaluated to a non-real value");
  return acc.real();
}

}  // namespace qhom::cell

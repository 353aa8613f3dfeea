#pragma once

#include <map>
#include <span>
#include <vector>

#include "qhom/common.hpp"
#include "qhom/trigsum.hpp"
#include "qhom/winding.hpp"

namespace qhom {

// Modes n in Z^M with ||n||_inf <= N, flattened lexicographically: index =
// sum_j (n_j + N) (2N+1)^(M-1-j), so n_1 is the most significant digit and
// index 0 is (-N,...,-N).
class ModeLattice {
 public:
  ModeLattice(int M, int N) : M_(M), N_(N) {
    if (M < 1 || N < 0) throw Error(Errc::malformed_input, "bad lattice dimensions");
    long s = 1;
    for (int j = 0; j < M; ++j) {
      s *= (2L * N + 1);
      if (s > (1L << 26))
        throw Error(Errc::malformed_input, "mode lattice too large");
    }
    size_ = int(s);
  }

  int M() const { return M_; }
  int N() const { return N_; }
  int size() const { return size_; }

  int index(std::span<const int> n) const {
    int idx = 0;
    for (int j = 0; j < M_; ++j) {
      if (n[j] < -N_ || n[j] > N_)
        throw Error(Errc::internal_consistency, "mode outside lattice");
      idx = idx * (2 * N_ + 1) + (n[j] + N_);
    }
    return idx;
  }

  bool contains(std::span<const int> n) const {
    for (int j = 0; j < M_; ++j)
      if (n[j] < -N_ || n[j] > N_) return false;
    return true;
  }

  std::vector<int> mode(int idx) const {
    std::vector<int> n(M_);
    for (int j = M_ - 1; j >= 0; --j) {
      n[j] = idx % (2 * N_ + 1) - N_;
      idx /= (2 * N_ + 1);
    }
    return n;
  }

  int zero_index() const {
    std::vector<int> z(M_, 0);
    return index(z);
  }

 private:
  int M_, N_, size_;
};

namespace detail {
template <class Coeff>
struct CoeffOps;

template <>
struct CoeffOps<Complex> {
  static Complex conj(const Complex& c) { return std::conj(c); }
  static double dist(const Complex& a, const Complex& b) { return std::abs(a - b); }
  static double norm(const Complex& c) { return std::abs(c); }
  static bool symmetric(const Complex&, double) { return true; }
};

template <>
struct CoeffOps<CMat> {
  static CMat conj(const CMat& c) { return c.conjugate(); }
  static double dist(const CMat& a, const CMat& b) { return (a - b).norm(); }
  static double norm(const CMat& c) { return c.norm(); }
  static bool symmetric(const CMat& c, double tol) {
    return (c - c.transpose()).norm() <= tol * (1 + c.norm());
  }
};
}  // namespace detail

// Truncated Fourier coefficients on the M-torus, indexed by integer modes.
// Scalar coefficients for functions, d x d complex matrices for the lifted
// coefficient field B.
template <class Coeff>
class FourierField {
 public:
  using Map = std::map<std::vector<int>, Coeff>;

  explicit FourierField(int M) : M_(M) {}

  int M() const { return M_; }
  const Map& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  void set(std::vector<int> n, Coeff c) {
    if (int(n.size()) != M_) throw Error(Errc::malformed_input, "mode dimension mismatch");
    coeffs_[std::move(n)] = std::move(c);
  }

  const Coeff* find(std::span<const int> n) const {
    key_.assign(n.begin(), n.end());
    auto it = coeffs_.find(key_);
    return it == coeffs_.end() ? nullptr : &it->second;
  }

  // max ||n||_inf over stored modes
  int bandwidth() const {
    int b = 0;
    for (const auto& [n, c] : coeffs_)
      for (int v : n) b = std::max(b, std::abs(v));
    return b;
  }

  // Reality coeff(-n) = conj(coeff(n)), and entrywise symmetry for the
  // matrix variant.
  void validate() const {
    for (const auto& [n, c] : coeffs_) {
      std::vector<int> neg(n.size());
      for (std::size_t j = 0; j < n.size(); ++j) neg[j] = -n[j];
      auto it = coeffs_.find(neg);
      double scale = 1 + detail::CoeffOps<Coeff>::norm(c);
      if (it == coeffs_.end() ||
          detail::CoeffOps<Coeff>::dist(it->second, detail::CoeffOps<Coeff>::conj(c)) >
              kRealityTol * scale)
        throw Error(Errc::internal_consistency, "Fourier field violates reality");
      if (!detail::CoeffOps<Coeff>::symmetric(c, kRealityTol))
        throw Error(Errc::internal_consistency, "matrix Fourier coefficient not symmetric");
    }
  }

  std::uint64_t hash() const {
    Fnv64 h;
    h.add(M_);
    for (const auto& [n, c] : coeffs_) {
      for (int v : n) h.add(v);
      if constexpr (std::is_same_v<Coeff, Complex>) {
        h.add(c.real()).add(c.imag());
      } else {
        for (int i = 0; i < c.rows(); ++i)
          for (int j = 0; j < c.cols(); ++j) h.add(c(i, j).real()).add(c(i, j).imag());
      }
    }
    return h.value();
  }

 private:
  int M_;
  Map coeffs_;
  mutable std::vector<int> key_;
};

using ScalarField = FourierField<Complex>;
using MatrixField = FourierField<CMat>;

namespace detail {
// Unique integer representation xi = Lambda^T n (unique by injectivity);
// bounded box search, growing until the budget is exhausted.
inline std::optional<std::vector<int>> mode_of_frequency(const Vec& xi, const WindingMap& w,
                                                         int search_bound, double tol) {
  for (int b = 1; b <= search_bound; b *= 2) {
    long combos = 1;
    for (int j = 0; j < w.M(); ++j) combos *= (2L * b + 1);
    if (combos > 4'400'000) break;
    std::vector<Vec> gens;
    for (int j = 0; j < w.M(); ++j) gens.push_back(w.generator(j));
    if (auto n = find_integer_combo(xi, gens, b, tol)) return n;
  }
  return std::nullopt;
}
}  // namespace detail

// Lift a(x) = b(Lambda x): places the amplitude of each frequency Lambda^T n
// at mode n. Frequencies outside the module raise lift-mismatch.
inline MatrixField lift(const QPMatrix& A, const WindingMap& w, int search_bound = 16,
                        double tol = kFreqTol) {
  A.validate();
  if (A.dim() != w.d())
    throw Error(Errc::malformed_input, "coefficient/winding dimension mismatch");
  MatrixField b(w.M());
  const int s = A.size();
  std::map<std::vector<int>, CMat> acc;
  for (int k = 0; k < s; ++k)
    for (int l = 0; l < s; ++l)
      for (const auto& t : A.at(k, l).terms()) {
        auto n = detail::mode_of_frequency(t.freq, w, search_bound, tol);
        if (!n)
          throw Error(Errc::lift_mismatch, "frequency not representable in the module");
        auto it = acc.find(*n);
        if (it == acc.end())
          it = acc.emplace(*n, CMat::Zero(s, s)).first;
        it->second(k, l) += t.amp;
      }
  for (auto& [n, c] : acc) b.set(n, c);
  b.validate();
  return b;
}

inline ScalarField lift(const TrigSum& a, const WindingMap& w, int search_bound = 16,
                        double tol = kFreqTol) {
  QPMatrix m(a.dim(), 1);
  m.at(0, 0) = a;
  MatrixField f = lift(m, w, search_bound, tol);
  ScalarField out(w.M());
  for (const auto& [n, c] : f.coeffs()) out.set(n, c(0, 0));
  return out;
}

// Restriction along the winding line: sum_n bhat(n) e^{i n . Lambda x}.
// For a field produced by lift this reproduces A(x) to roundoff.
inline Mat restrict_eval(const MatrixField& b, const WindingMap& w, const Vec& x) {
  if (b.empty()) return Mat::Zero(0, 0);
  const int s = int(b.coeffs().begin()->second.rows());
  CMat acc = CMat::Zero(s, s);
  for (const auto& [n, c] : b.coeffs()) {
    double phase = 0;
    for (int j = 0; j < w.M(); ++j) phase += double(n[j]) * w.generator(j).dot(x);
    acc += c * std::exp(Complex(0, phase));
  }
  double scale = 1 + acc.norm();
  if (acc.imag().norm() > kRealityTol * scale)
    throw Error(Errc::internal_consistency, "restricted field evaluated to a non-real value");
  return acc.real();
}

inline double restrict_eval(const ScalarField& b, const WindingMap& w, const Vec& x) {
  Complex acc = 0;
  for (const auto& [n, c] : b.coeffs()) {
    double phase = 0;
    for (int j = 0; j < w.M(); ++j) phase += double(n[j]) * w.generator(j).dot(x);
    acc += c * std::exp(Complex(0, phase));
  }
  if (std::abs(acc.imag()) > kRealityTol * (1 + std::abs(acc)))
    throw Error(Errc::internal_consistency, "restricted field evaluated to a non-real value");
  return acc.real();
}

// Minimum over a dense torus grid of the smallest eigenvalue of B(y). By
// density of the winding line this dominates the restriction's infimum up to
// grid resolution. Grid points y_j = 2*pi*k/pts.
inline double coercivity_on_grid(const MatrixField& b, int pts_per_dim = 64) {
  b.validate();
  const int M = b.M();
  if (b.empty()) throw Error(Errc::coercivity_violation, "empty coefficient field");
  const int s = int(b.coeffs().begin()->second.rows());
  long total = 1;
  for (int j = 0; j < M; ++j) {
    total *= pts_per_dim;
    if (total > 40'000'000) throw Error(Errc::malformed_input, "torus grid too large");
  }
  double best = kInf;
  Eigen::SelfAdjointEigenSolver<Mat> es;
  std::vector<int> k(M, 0);
  for (long idx = 0; idx < total; ++idx) {
    long r = idx;
    for (int j = M - 1; j >= 0; --j) {
      k[j] = int(r % pts_per_dim);
      r /= pts_per_dim;
    }
    CMat acc = CMat::Zero(s, s);
    for (const auto& [n, c] : b.coeffs()) {
      double phase = 0;
      for (int j = 0; j < M; ++j) phase += 2.0 * M_PI * double(n[j]) * double(k[j]) / pts_per_dim;
      acc += c * std::exp(Complex(0, phase));
    }
    Mat a = acc.real();
    if (s == 1) {
      best = std::min(best, a(0, 0));
    } else {
      es.compute(a, Eigen::EigenvaluesOnly);
      best = std::min(best, es.eigenvalues().minCoeff());
    }
  }
  if (best <= 0)
    throw Error(Errc::coercivity_violation, "lifted coefficient field is not coercive on the torus");
  return best;
}

// l1-of-coefficients bound on sup_y ||B(y)||.
inline double sup_bound(const MatrixField& b) {
  double s = 0;
  for (const auto& [n, c] : b.coeffs()) s += c.norm();
  return s;
}

}  // namespace qhom

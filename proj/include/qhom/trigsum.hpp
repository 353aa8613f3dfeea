#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qhom/common.hpp"

namespace qhom {

// A real-valued quasiperiodic function as a finite trigonometric sum
//   f(x) = sum_xi c(xi) e^{i xi.x},  c(-xi) = conj(c(xi)).
// Frequencies are compared with the absolute tolerance kFreqTol; adding a
// term at an existing frequency merges amplitudes.
class TrigSum {
 public:
  struct Term {
    Vec freq;     // rad per unit length
    Complex amp;
  };

  explicit TrigSum(int dim) : dim_(dim) {
    if (dim < 1) throw Error(Errc::malformed_input, "TrigSum dimension must be >= 1");
  }

  static TrigSum constant(int dim, double c) {
    TrigSum f(dim);
    f.add_cos(Vec::Zero(dim), c);
    return f;
  }

  int dim() const { return dim_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // a * cos(freq.x); for freq = 0 this adds the constant a.
  TrigSum& add_cos(const Vec& freq, double a) {
    add_amp(freq, Complex(a / 2, 0));
    add_amp(-freq, Complex(a / 2, 0));
    return *this;
  }

  // b * sin(freq.x)
  TrigSum& add_sin(const Vec& freq, double b) {
    add_amp(freq, Complex(0, -b / 2));
    add_amp(-freq, Complex(0, b / 2));
    return *this;
  }

  // 1-d conveniences
  TrigSum& add_cos(double freq, double a) { return add_cos(vec1(freq), a); }
  TrigSum& add_sin(double freq, double b) { return add_sin(vec1(freq), b); }

  double eval(const Vec& x) const {
    Complex s = 0;
    for (const auto& t : terms_) s += t.amp * std::exp(Complex(0, t.freq.dot(x)));
    if (std::abs(s.imag()) > kRealityTol * (1 + std::abs(s)))
      throw Error(Errc::internal_consistency, "trig sum evaluated to a non-real value");
    return s.real();
  }
  double eval(double x) const { return eval(vec1(x)); }

  // Checks Hermitian symmetry and the no-duplicate invariant.
  void validate() const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      for (std::size_t j = i + 1; j < terms_.size(); ++j)
        if (close(terms_[i].freq, terms_[j].freq))
          throw Error(Errc::malformed_input, "duplicate frequency in trig sum");
      const Term* mirror = find(-terms_[i].freq);
      if (!mirror || std::abs(mirror->amp - std::conj(terms_[i].amp)) >
                         kRealityTol * (1 + std::abs(terms_[i].amp)))
        throw Error(Errc::malformed_input, "trig sum is not Hermitian symmetric");
    }
  }

  const Term* find(const Vec& freq) const {
    for (const auto& t : terms_)
      if (close(t.freq, freq)) return &t;
    return nullptr;
  }

  // Distinct nonzero frequencies (both signs present by symmetry; one
  // representative per +- pair, canonicalized so the first nonzero
  // component is positive).
  std::vector<Vec> frequencies() const {
    std::vector<Vec> out;
    for (const auto& t : terms_) {
      if (t.freq.lpNorm<Eigen::Infinity>() <= kFreqTol) continue;
      Vec f = canonical(t.freq);
      bool seen = false;
      for (const auto& g : out)
        if (close(f, g)) { seen = true; break; }
      if (!seen) out.push_back(f);
    }
    std::sort(out.begin(), out.end(), [](const Vec& a, const Vec& b) {
      for (int i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > kFreqTol) return a[i] < b[i];
      return false;
    });
    return out;
  }

  static bool close(const Vec& a, const Vec& b) {
    return (a - b).lpNorm<Eigen::Infinity>() <= kFreqTol;
  }

  static Vec canonical(const Vec& f) {
    for (int i = 0; i < f.size(); ++i) {
      if (f[i] > kFreqTol) return f;
      if (f[i] < -kFreqTol) return -f;
    }
    return f;
  }

 private:
  static Vec vec1(double x) {
    Vec v(1);
    v[0] = x;
    return v;
  }

  void add_amp(const Vec& freq, Complex a) {
    if (freq.size() != dim_)
      throw Error(Errc::malformed_input, "frequency dimension mismatch");
    for (auto& t : terms_) {
      if (close(t.freq, freq)) {
        t.amp += a;
        return;
      }
    }
    terms_.push_back({freq, a});
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
      for (int i = 0; i < a.freq.size(); ++i)
        if (a.freq[i] != b.freq[i]) return a.freq[i] < b.freq[i];
      return false;
    });
  }

  int dim_;
  std::vector<Term> terms_;
};

// Mean value M(f): the amplitude at frequency zero.
inline double mean(const TrigSum& f) {
  f.validate();
  const TrigSum::Term* z = f.find(Vec::Zero(f.dim()));
  if (!z) return 0.0;
  if (std::abs(z->amp.imag()) > kRealityTol * (1 + std::abs(z->amp)))
    throw Error(Errc::malformed_input, "zero-frequency amplitude is not real");
  return z->amp.real();
}

// Symmetric matrix of trigonometric sums. `dim` is the spatial dimension of
// the frequencies; `size` is the matrix block size (equal to dim when the
// matrix feeds the elliptic operator).
class QPMatrix {
 public:
  QPMatrix(int dim, int size) : dim_(dim), size_(size), entries_(size * size, TrigSum(dim)) {
    if (size < 1) throw Error(Errc::malformed_input, "QPMatrix size must be >= 1");
  }
  explicit QPMatrix(int dim) : QPMatrix(dim, dim) {}

  static QPMatrix scaled_identity(int dim, double c) {
    QPMatrix a(dim);
    for (int k = 0; k < dim; ++k) a.at(k, k) = TrigSum::constant(dim, c);
    return a;
  }

  int dim() const { return dim_; }
  int size() const { return size_; }
  TrigSum& at(int k, int l) { return entries_[k * size_ + l]; }
  const TrigSum& at(int k, int l) const { return entries_[k * size_ + l]; }

  Mat eval(const Vec& x) const {
    Mat m(size_, size_);
    for (int k = 0; k < size_; ++k)
      for (int l = 0; l < size_; ++l) m(k, l) = at(k, l).eval(x);
    return m;
  }

  // Symmetry a_kl = a_lk, term by term.
  void validate() const {
    for (int k = 0; k < size_; ++k)
      for (int l = 0; l < size_; ++l) {
        at(k, l).validate();
        for (const auto& t : at(k, l).terms()) {
          const TrigSum::Term* s = at(l, k).find(t.freq);
          if (!s || std::abs(s->amp - t.amp) > kRealityTol * (1 + std::abs(t.amp)))
            throw Error(Errc::malformed_input, "QPMatrix is not symmetric");
        }
      }
  }

  // Union of the entries' frequencies.
  std::vector<Vec> frequencies() const {
    TrigSum all(dim_);
    std::vector<Vec> out;
    for (const auto& e : entries_)
      for (const auto& t : e.terms()) {
        Vec f = TrigSum::canonical(t.freq);
        if (f.lpNorm<Eigen::Infinity>() <= kFreqTol) continue;
        bool seen = false;
        for (const auto& g : out)
          if (TrigSum::close(f, g)) { seen = true; break; }
        if (!seen) out.push_back(f);
      }
    std::sort(out.begin(), out.end(), [](const Vec& a, const Vec& b) {
      for (int i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > kFreqTol) return a[i] < b[i];
      return false;
    });
    return out;
  }

 private:
  int dim_;
  int size_;
  std::vector<TrigSum> entries_;  // row-major
};

// Minimum over quasirandom sample points of the smallest eigenvalue of A(x).
// Samples are a deterministic Weyl sequence over a box spanning many periods;
// the seed only shifts the sequence offset. Rejects non-coercive input.
inline double coercivity_estimate(const QPMatrix& A, int samples, std::uint64_t seed = 0) {
  if (samples < 1) throw Error(Errc::malformed_input, "samples must be >= 1");
  const int d = A.dim();
  // Irrational stride per coordinate; box of ~128 periods of the slowest mode.
  const double kBox = 256.0 * M_PI;
  static const double alphas[] = {0.6180339887498949, 0.7548776662466927,
                                  0.8191725133961644, 0.5698402909980532};
  SplitMix64 rng(seed ^ 0x51ab2ef1u);
  Vec offset(d);
  for (int c = 0; c < d; ++c) offset[c] = rng.next_double();
  double best = kInf;
  Eigen::SelfAdjointEigenSolver<Mat> es;
  for (int j = 0; j < samples; ++j) {
    Vec x(d);
    for (int c = 0; c < d; ++c) {
      double t = offset[c] + double(j + 1) * alphas[c % 4];
      x[c] = (t - std::floor(t)) * kBox;
    }
    Mat a = A.eval(x);
    if (A.size() == 1) {
      best = std::min(best, a(0, 0));
    } else {
      es.compute(a, Eigen::EigenvaluesOnly);
      best = std::min(best, es.eigenvalues().minCoeff());
    }
  }
  if (best <= 0)
    throw Error(Errc::coercivity_violation, "sampled coefficient matrix is not coercive");
  return best;
}

}  // namespace qhom

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qhom/common.hpp"
#include "qhom/trigsum.hpp"

namespace qhom {

namespace detail {

// min |Lambda^T p| over nonzero integer p with ||p||_inf <= bound, where the
// scan is capped by a work budget; returns {margin, bound actually scanned}.
// For d = 1 the innermost coordinate is optimized in closed form, which keeps
// bound = 1000 exact up to M = 3.
inline std::pair<double, int> injectivity_scan(const Mat& lambda, int bound, double budget = 2.2e7) {
  const int M = int(lambda.rows());
  const int d = int(lambda.cols());
  const int loops = (d == 1) ? M - 1 : M;
  int p_eff = bound;
  if (loops > 0) {
    double width = std::pow(budget, 1.0 / loops);
    int cap = std::max(1, int((width - 1) / 2));
    p_eff = std::min(bound, cap);
  }
  double best = kInf;
  std::vector<int> p(M, 0);
  if (d == 1) {
    const double g0 = lambda(0, 0);
    std::function<void(int)> rec = [&](int j) {
      if (j == M) {
        double s = 0;
        for (int i = 1; i < M; ++i) s += lambda(i, 0) * p[i];
        if (std::abs(g0) < 1e-300) {
          bool nz = false;
          for (int i = 1; i < M; ++i) nz |= (p[i] != 0);
          if (nz) best = std::min(best, std::abs(s));
          return;
        }
        long cand = std::lround(-s / g0);
        for (long q0 = cand - 1; q0 <= cand + 1; ++q0) {
          if (std::abs(double(q0)) > p_eff) continue;
          bool zero = (q0 == 0);
          for (int i = 1; i < M && zero; ++i) zero = (p[i] == 0);
          if (zero) continue;
          best = std::min(best, std::abs(g0 * double(q0) + s));
        }
        return;
      }
      for (p[j] = -p_eff; p[j] <= p_eff; ++p[j]) rec(j + 1);
    };
    if (M == 1) {
      best = std::abs(g0);
    } else {
      rec(1);
    }
  } else {
    std::function<void(int)> rec = [&](int j) {
      if (j == M) {
        bool zero = true;
        for (int i = 0; i < M; ++i) zero &= (p[i] == 0);
        if (zero) return;
        Vec f = Vec::Zero(d);
        for (int i = 0; i < M; ++i) f += lambda.row(i).transpose() * double(p[i]);
        best = std::min(best, f.lpNorm<Eigen::Infinity>());
        return;
      }
      for (p[j] = -p_eff; p[j] <= p_eff; ++p[j]) rec(j + 1);
    };
    rec(0);
  }
  return {best, p_eff};
}

}  // namespace detail

// Winding matrix Lambda (M x d) realizing a(x) = b(Lambda x). Generators of
// the frequency module are the rows of Lambda. The injectivity condition
// Lambda^T p != 0 is undecidable by finite search; the constructor checks it
// for ||p||_inf up to a bound and records that bound.
class WindingMap {
 public:
  explicit WindingMap(Mat lambda, int p_check = 1000, double tol = kFreqTol)
      : lambda_(std::move(lambda)) {
    M_ = int(lambda_.rows());
    d_ = int(lambda_.cols());
    if (M_ < d_ || d_ < 1)
      throw Error(Errc::malformed_input, "winding matrix must have M >= d >= 1");
    auto [margin, checked] = detail::injectivity_scan(lambda_, p_check);
    injectivity_margin_ = margin;
    checked_bound_ = checked;
    if (margin <= tol)
      throw Error(Errc::degenerate_winding,
                  "Lambda^T p vanishes for a nonzero integer p within the checked bound");
    periodic_ = (M_ == d_);
  }

  int d() const { return d_; }
  int M() const { return M_; }
  const Mat& lambda() const { return lambda_; }
  bool periodic() const { return periodic_; }
  int checked_bound() const { return checked_bound_; }
  double injectivity_margin() const { return injectivity_margin_; }

  Vec generator(int j) const { return lambda_.row(j).transpose(); }

  // Lambda^T n for an integer mode.
  Vec freq_of(std::span<const int> n) const {
    Vec f = Vec::Zero(d_);
    for (int j = 0; j < M_; ++j) f += lambda_.row(j).transpose() * double(n[j]);
    return f;
  }

  std::uint64_t hash() const {
    Fnv64 h;
    h.add(M_).add(d_);
    for (int i = 0; i < M_; ++i)
      for (int j = 0; j < d_; ++j) h.add(lambda_(i, j));
    return h.value();
  }

 private:
  Mat lambda_;
  int M_ = 0, d_ = 0;
  bool periodic_ = false;
  int checked_bound_ = 0;
  double injectivity_margin_ = 0;
};

namespace detail {

// Bounded search for an integer combination target = sum n_j gens[j] with
// |n_j| <= bound. Enumeration is capped; nullopt when nothing is found.
inline std::optional<std::vector<int>> find_integer_combo(const Vec& target,
                                                          const std::vector<Vec>& gens,
                                                          int bound, double tol,
                                                          long combo_cap = 2'200'000) {
  const int m = int(gens.size());
  if (m == 0) return std::nullopt;
  long combos = 1;
  for (int j = 0; j < m; ++j) {
    combos *= (2L * bound + 1);
    if (combos > combo_cap) return std::nullopt;
  }
  std::vector<int> n(m, 0);
  std::optional<std::vector<int>> found;
  std::function<void(int, const Vec&)> rec = [&](int j, const Vec& rest) {
    if (found) return;
    if (j == m) {
      if (rest.lpNorm<Eigen::Infinity>() <= tol) found = n;
      return;
    }
    for (int v = -bound; v <= bound && !found; ++v) {
      n[j] = v;
      rec(j + 1, rest - gens[j] * double(v));
    }
  };
  rec(0, target);
  return found;
}

// Best rational approximation p/q of r with q <= qmax, via continued
// fractions.
inline std::pair<long, long> rational_approx(double r, long qmax) {
  long p0 = 1, q0 = 0;          // h_{-1}/k_{-1}
  long p1 = std::lround(std::floor(r)), q1 = 1;
  double x = r;
  for (int it = 0; it < 64; ++it) {
    double frac = x - std::floor(x);
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    long a = std::lround(std::floor(x));
    long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > qmax || q2 < 0) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
  }
  return {p1, q1};
}

}  // namespace detail

// Detects a frequency module by bounded integer-relation search: frequencies
// with a small rational ratio share a generator (refined gcd-style); a
// reduction pass then drops generators that are integer combinations of the
// others. Purely periodic input (M == d) is returned with the periodic flag
// rather than rejected. Full lattice reduction is out of scope.
inline WindingMap detect_module(const std::vector<Vec>& frequencies, int p_check = 1000,
                                double tol = kFreqTol, int coeff_bound = 64) {
  if (frequencies.empty())
    throw Error(Errc::malformed_input, "detect_module needs at least one frequency");
  const int d = int(frequencies.front().size());

  // Canonical nonzero representatives, sorted for determinism.
  std::vector<Vec> freqs;
  for (const auto& f : frequencies) {
    if (int(f.size()) != d) throw Error(Errc::malformed_input, "mixed frequency dimensions");
    if (f.lpNorm<Eigen::Infinity>() <= tol) continue;
    Vec c = TrigSum::canonical(f);
    bool seen = false;
    for (const auto& g : freqs)
      if (TrigSum::close(c, g)) { seen = true; break; }
    if (!seen) freqs.push_back(c);
  }
  std::sort(freqs.begin(), freqs.end(), [](const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i)
      if (std::abs(a[i] - b[i]) > kFreqTol) return a[i] < b[i];
    return false;
  });

  std::vector<Vec> gens;
  if (freqs.empty()) {
    // Constant coefficient: trivial module, periodic embedding on T^d.
    return WindingMap(Mat::Identity(d, d), p_check, tol);
  }

  for (const auto& xi : freqs) {
    bool placed = false;
    for (auto& g : gens) {
      // Parallel test followed by a rational fit of the ratio.
      double r = xi.dot(g) / g.squaredNorm();
      if ((xi - g * r).lpNorm<Eigen::Infinity>() > tol) continue;
      auto [p, q] = detail::rational_approx(r, coeff_bound);
      if (q < 1 || std::abs(p) > coeff_bound) continue;
      if ((xi * double(q) - g * double(p)).lpNorm<Eigen::Infinity>() > tol * double(q)) continue;
      if (q > 1) g = g / double(q);  // gcd refinement: old members stay integer multiples
      placed = true;
      break;
    }
    if (!placed) gens.push_back(xi);
  }

  // Drop generators that other generators already produce.
  bool reduced = true;
  while (reduced && gens.size() > 1) {
    reduced = false;
    for (int c = int(gens.size()) - 1; c >= 0; --c) {
      std::vector<Vec> others;
      for (int j = 0; j < int(gens.size()); ++j)
        if (j != c) others.push_back(gens[j]);
      if (detail::find_integer_combo(gens[c], others, coeff_bound, tol)) {
        gens.erase(gens.begin() + c);
        reduced = true;
        break;
      }
    }
  }

  // Pad with unit directions if the module has fewer generators than d
  // (possible only for degenerate inputs living in a subspace).
  while (int(gens.size()) < d) {
    for (int c = 0; c < d; ++c) {
      Vec e = Vec::Unit(d, c);
      bool indep = true;
      for (const auto& g : gens)
        if ((g - e * (g.dot(e))).lpNorm<Eigen::Infinity>() <= tol) indep = false;
      if (indep) { gens.push_back(e); break; }
    }
  }

  Mat lambda(int(gens.size()), d);
  for (int j = 0; j < int(gens.size()); ++j) lambda.row(j) = gens[j].transpose();

  // Verification pass: every input frequency must be generated.
  for (const auto& xi : freqs)
    if (!detail::find_integer_combo(xi, gens, coeff_bound, tol))
      throw Error(Errc::module_detection_failure,
                  "frequency not representable over the detected generators within the bound");

  return WindingMap(std::move(lambda), p_check, tol);
}

// Empirical small-divisor constant: min over blocks i (rows of Lambda grouped
// by their unique nonzero column) with m_i >= 2 of |n.beta_i| |n|^tau over
// nonzero n with ||n||_inf <= n_search. Vacuous (all m_i < 2) gives +inf; a
// value near zero is a diagnostic warning, not an error. When Lambda is not
// block structured the scan runs over the whole lattice with ||Lambda^T n||.
inline double kozlov_diagnostic(const WindingMap& w, double tau, int n_search) {
  if (tau <= 0) throw Error(Errc::malformed_input, "tau must be positive");
  const Mat& L = w.lambda();
  const int M = w.M(), d = w.d();

  std::vector<std::vector<double>> blocks(d);
  bool structured = true;
  for (int i = 0; i < M && structured; ++i) {
    int col = -1;
    for (int c = 0; c < d; ++c) {
      if (std::abs(L(i, c)) > kFreqTol) {
        if (col >= 0) { structured = false; break; }
        col = c;
      }
    }
    if (col < 0) structured = false;
    if (structured) blocks[col].push_back(L(i, col));
  }

  auto scan = [&](const std::vector<Vec>& gens) {
    const int m = int(gens.size());
    double budget_width = std::pow(2.2e7, 1.0 / m);
    int bound = std::min(n_search, std::max(1, int((budget_width - 1) / 2)));
    double best = kInf;
    std::vector<int> n(m, 0);
    std::function<void(int)> rec = [&](int j) {
      if (j == m) {
        double norm2 = 0;
        bool zero = true;
        for (int i = 0; i < m; ++i) {
          norm2 += double(n[i]) * double(n[i]);
          zero &= (n[i] == 0);
        }
        if (zero) return;
        Vec f = Vec::Zero(gens[0].size());
        for (int i = 0; i < m; ++i) f += gens[i] * double(n[i]);
        best = std::min(best, f.norm() * std::pow(norm2, tau / 2.0));
        return;
      }
      for (n[j] = -bound; n[j] <= bound; ++n[j]) rec(j + 1);
    };
    rec(0);
    return best;
  };

  if (!structured) {
    std::vector<Vec> gens;
    for (int i = 0; i < M; ++i) gens.push_back(L.row(i).transpose());
    return scan(gens);
  }

  double best = kInf;
  for (int c = 0; c < d; ++c) {
    if (int(blocks[c].size()) < 2) continue;  // condition vacuous for m_i < 2
    std::vector<Vec> gens;
    for (double b : blocks[c]) {
      Vec v(1);
      v[0] = b;
      gens.push_back(v);
    }
    best = std::min(best, scan(gens));
  }
  return best;
}

}  // namespace qhom

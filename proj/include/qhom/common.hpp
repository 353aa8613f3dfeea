#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qhom {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

// Frequencies given as closed-form reals are identified when within this
// absolute distance (componentwise).
inline constexpr double kFreqTol = 1e-9;

// Reality checks on evaluated trigonometric sums / restricted fields.
inline constexpr double kRealityTol = 1e-12;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Errc {
  malformed_input,
  module_detection_failure,
  degenerate_winding,
  lift_mismatch,
  coercivity_violation,
  internal_consistency,
  solver_failure,
  resolution,
  out_of_zone,
  criticality_violation,
  degenerate_stencil,
  continuation_failure,
  consistency,
  config,
};

inline const char* to_string(Errc e) {
  switch (e) {
    case Errc::malformed_input: return "malformed-input";
    case Errc::module_detection_failure: return "module-detection-failure";
    case Errc::degenerate_winding: return "degenerate-winding";
    case Errc::lift_mismatch: return "lift-mismatch";
    case Errc::coercivity_violation: return "coercivity-violation";
    case Errc::internal_consistency: return "internal-consistency";
    case Errc::solver_failure: return "solver-failure";
    case Errc::resolution: return "resolution";
    case Errc::out_of_zone: return "out-of-zone";
    case Errc::criticality_violation: return "criticality-violation";
    case Errc::degenerate_stencil: return "degenerate-stencil";
    case Errc::continuation_failure: return "continuation-failure";
    case Errc::consistency: return "consistency";
    case Errc::config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Deterministic 64-bit generator (splitmix64). Used for solver start vectors
// and quasirandom sampling offsets; identical across platforms, unlike the
// standard-library distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [0,1)
  double next_double() { return double(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// FNV-1a, used for cache keys and config hashes.
class Fnv64 {
 public:
  Fnv64& bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= b[i];
      h_ *= 0x100000001b3ull;
    }
    return *this;
  }
  Fnv64& add(const std::string& s) { return bytes(s.data(), s.size()); }
  Fnv64& add(double x) { return bytes(&x, sizeof x); }
  Fnv64& add(std::int64_t x) { return bytes(&x, sizeof x); }
  Fnv64& add(int x) { return add(std::int64_t(x)); }
  std::uint64_t value() const { return h_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace qhom

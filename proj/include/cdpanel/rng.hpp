#pragma once

// Counter-based random streams built on Philox4x32-10 (Salmon et al., 2011).
// A stream is the value pair (seed, stream_id); the n-th draw of a stream is a
// pure function of (seed, stream_id, n), so any worker can regenerate the same
// sequence without shared state and results never depend on scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "cdpanel/errors.hpp"
#include "cdpanel/types.hpp"
#include "cdpanel/weights.hpp"

namespace cdpanel {

struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

namespace rng_detail {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> philox10(std::uint64_t seed, std::uint64_t stream_id,
                                             std::uint64_t pos) {
  std::uint32_t c0 = static_cast<std::uint32_t>(pos);
  std::uint32_t c1 = static_cast<std::uint32_t>(pos >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(stream_id);
  std::uint32_t c3 = static_cast<std::uint32_t>(stream_id >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

// splitmix64 finalizer, used to derive fresh 64-bit seeds for nested streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace rng_detail

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return rng_detail::mix64(seed ^ rng_detail::mix64(salt));
}

class PhiloxEngine {
 public:
  explicit PhiloxEngine(RngStream s) : seed_(s.seed), stream_id_(s.stream_id) {}

  std::uint64_t next_u64() {
    if (phase_ == 0) {
      block_ = rng_detail::philox10(seed_, stream_id_, pos_++);
      phase_ = 1;
      return static_cast<std::uint64_t>(block_[0]) | (static_cast<std::uint64_t>(block_[1]) << 32);
    }
    phase_ = 0;
    return static_cast<std::uint64_t>(block_[2]) | (static_cast<std::uint64_t>(block_[3]) << 32);
  }

  // Uniform on [0,1) with 53 random bits.
  double unit_co() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform on (0,1]; safe as a log() argument.
  double unit_oc() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  double uniform(double a, double b) { return a + (b - a) * unit_co(); }

  // chi^2(2) == Exp(mean 2); exact and branch-free via inversion.
  double chi2_2() { return -2.0 * std::log(unit_oc()); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = unit_oc();
    const double u2 = unit_co();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t pos_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int phase_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline WeightVector rademacher(RngStream stream, Eigen::Index n) {
  if (n < 1) fail(Errc::EmptyInput, "rademacher requires n >= 1");
  PhiloxEngine eng(stream);
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = eng.rademacher();
  return WeightVector{std::move(w), WeightKind::Rademacher};
}

inline Vector normal(RngStream stream, Eigen::Index n) {
  PhiloxEngine eng(stream);
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = eng.normal();
  return z;
}

inline Vector uniform(RngStream stream, Eigen::Index n, double a, double b) {
  if (!(a < b)) fail(Errc::BadInterval, "uniform requires a < b");
  PhiloxEngine eng(stream);
  Vector u(n);
  for (Eigen::Index i = 0; i < n; ++i) u[i] = eng.uniform(a, b);
  return u;
}

// Standardized chi^2(2): zero mean, variance target_var, support [-sqrt(target_var), inf).
inline Vector std_chi2_2(RngStream stream, Eigen::Index n, double target_var) {
  if (!(target_var > 0.0)) fail(Errc::BadInterval, "std_chi2_2 requires target_var > 0");
  PhiloxEngine eng(stream);
  const double scale = 0.5 * std::sqrt(target_var);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = (eng.chi2_2() - 2.0) * scale;
  return v;
}

}  // namespace cdpanel

#pragma once

// Counter-based random numbers. A draw is a pure function of (key, stream, counter),
// so any trial or step can be regenerated independently of scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace colim {

/// splitmix64 finalizer; used to derive keys and stream ids from structured seeds.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Combines a seed with structured identifiers (dimension, trial, purpose, ...).
template <class... Ids>
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, Ids... ids) noexcept {
  std::uint64_t h = mix64(seed);
  ((h = mix64(h ^ mix64(static_cast<std::uint64_t>(ids) + 0x632BE59BD9B4E019ULL))), ...);
  return h;
}

/// Philox4x32-10 block function.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit constexpr Philox4x32(std::uint64_t key) noexcept
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)} {}

  [[nodiscard]] constexpr Block operator()(Block ctr) const noexcept {
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  std::array<std::uint32_t, 2> key_;
};

/// Sequential view over one Philox stream: counter = (position, stream id).
/// Produces uniforms on (0, 1] and standard normals (Box-Muller, both outputs used).
class NormalStream {
 public:
  NormalStream(std::uint64_t key, std::uint64_t stream) noexcept : philox_(key), stream_(stream) {}

  [[nodiscard]] double uniform() noexcept {
    if (uniform_left_ == 0) refill_uniforms();
    return uniforms_[2 - uniform_left_--];
  }

  [[nodiscard]] double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  [[nodiscard]] std::uint64_t position() const noexcept { return position_; }

 private:
  void refill_uniforms() noexcept {
    const Philox4x32::Block out =
        philox_({static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
                 static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)});
    ++position_;
    const std::uint64_t a = (std::uint64_t{out[0]} << 32) | out[1];
    const std::uint64_t b = (std::uint64_t{out[2]} << 32) | out[3];
    // 53-bit mantissa, shifted to (0, 1] so log() is always finite.
    constexpr double kScale = 1.0 / 9007199254740992.0;
    uniforms_[0] = static_cast<double>((a >> 11) + 1) * kScale;
    uniforms_[1] = static_cast<double>((b >> 11) + 1) * kScale;
    uniform_left_ = 2;
  }

  Philox4x32 philox_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  std::array<double, 2> uniforms_{};
  int uniform_left_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace colim

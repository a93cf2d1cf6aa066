#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "holediff/model.hpp"

namespace holediff {

/// A half-open hole [lo, hi) on 64-bit words, rounded inward: a word m
/// (standing for [m, m+1) / 2^64) is reported inside only when its whole
/// cell lies in the hole. Exact for endpoints that are multiples of 2^-64.
struct WordInterval {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  bool to_top = false;  ///< hi is 2^64

  static WordInterval from(const Rational& a, const Rational& b);
  bool contains(std::uint64_t m) const { return m >= lo && (to_top || m < hi); }
};

struct WordHoles {
  WordInterval left;
  WordInterval right;
  explicit WordHoles(const ModelConfig& config);
  /// +1 in I_L, -1 in I_R, 0 otherwise.
  int jump(std::uint64_t m) const {
    if (left.contains(m)) return 1;
    if (right.contains(m)) return -1;
    return 0;
  }
};

/// One particle of the lifted map on the lattice, carrying the leading 64
/// bits of its fractional coordinate. Each reduced-map step shifts the word
/// left by one bit and feeds a fresh random bit into the lowest position;
/// on the tent map's decreasing branch the word is complemented first.
class BitstreamWalker {
 public:
  BitstreamWalker(MapKind kind, std::uint64_t mantissa, std::int64_t cell = 0)
      : kind_(kind), mantissa_(mantissa), cell_(cell) {}

  static std::uint64_t map_word(MapKind kind, std::uint64_t m, bool fresh_bit) {
    const bool top = (m >> 63) != 0;
    m <<= 1;
    if (kind == MapKind::Tent && top) m = ~m & ~std::uint64_t{1};
    return m | static_cast<std::uint64_t>(fresh_bit);
  }

  /// Jump from the current hole membership, then one reduced-map step.
  /// Returns the jump.
  int step(const WordHoles& holes, bool fresh_bit) {
    const int v = holes.jump(mantissa_);
    cell_ += v;
    mantissa_ = map_word(kind_, mantissa_, fresh_bit);
    return v;
  }

  std::int64_t cell() const { return cell_; }
  std::uint64_t mantissa() const { return mantissa_; }
  /// mantissa / 2^64.
  double fraction() const;

 private:
  MapKind kind_;
  std::uint64_t mantissa_;
  std::int64_t cell_;
};

/// Streams single random bits out of 64-bit draws.
class BitSource {
 public:
  explicit BitSource(std::mt19937_64& rng) : rng_(rng) {}
  bool next() {
    if (left_ == 0) {
      buffer_ = rng_();
      left_ = 64;
    }
    const bool bit = (buffer_ & 1u) != 0;
    buffer_ >>= 1;
    --left_;
    return bit;
  }

 private:
  std::mt19937_64& rng_;
  std::uint64_t buffer_ = 0;
  unsigned left_ = 0;
};

/// Independent generator for particle `index`, seeded through seed_seq from
/// (seed, index); identical arguments give identical streams.
std::mt19937_64 particle_generator(std::uint64_t seed, std::uint64_t index);

struct SimulationParams {
  std::size_t particles = 100'000;
  std::uint64_t steps = 10'000;
  std::uint64_t seed = 1;
  std::size_t batches = 32;  ///< batch means for standard errors
  std::size_t samples = 100; ///< log-spaced recording times
};

/// Lower bounds and resource guard for ensemble runs.
inline constexpr std::size_t kMinParticles = 1000;
inline constexpr std::uint64_t kMinSteps = 100;
inline constexpr double kMaxParticleSteps = 1e12;

struct MsdSeries {
  std::vector<std::uint64_t> n;
  std::vector<double> msd;
  std::vector<double> stderr_;
  /// Walkers whose coordinates x_0..x_n all avoided the holes.
  std::vector<std::uint64_t> survivors;
  /// msd per batch, batch_msd[b][k] at time n[k].
  std::vector<std::vector<double>> batch_msd;
};

/// Log-spaced integer times 1 <= n <= steps (at most `samples`, always
/// including `steps`).
std::vector<std::uint64_t> sample_times(std::uint64_t steps, std::size_t samples);

/// Runs the lifted dynamics for all particles from uniformly random words
/// and records the mean square displacement. Deterministic for a given seed
/// and independent of the number of threads. ConfigError below 10^3
/// particles or 10^2 steps, ResourceLimitError above 10^12 particle-steps.
MsdSeries simulate_ensemble(const ModelConfig& config, const SimulationParams& params);

struct DiffusionEstimate {
  double D = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  std::size_t points = 0;  ///< samples inside the fit window
  std::uint64_t n_first = 0;
  std::uint64_t n_last = 0;
};

/// Least-squares slope of msd against 2n over the last `window` fraction of
/// the recorded samples; the standard error comes from the spread of the
/// per-batch slopes (0 without batch data). ConfigError with fewer than 10
/// points in the window.
DiffusionEstimate estimate_D(const MsdSeries& series, double window = 0.5);

struct EscapeEstimate {
  double gamma = 0.0;
  double stderr_ = 0.0;
  std::uint64_t n_first = 0;
  std::uint64_t n_last = 0;
  std::vector<std::uint64_t> survivors;  ///< S(n) for n = 0..steps
};

struct EscapeFitParams {
  std::uint64_t transient = 10;
  /// The fit stops before the total survivor count drops below this.
  std::uint64_t min_survivors = 100;
};

/// Survival decay of walkers that have never entered a hole; gamma from a
/// least-squares fit of ln S(n) after the transient. Throws
/// ConvergenceError when fewer than 3 times are left for the fit.
EscapeEstimate estimate_escape(const ModelConfig& config, const SimulationParams& params,
                               const EscapeFitParams& fit = {});

}  // namespace holediff

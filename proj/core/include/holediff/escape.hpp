#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "holediff/model.hpp"
#include "holediff/periodic_orbits.hpp"
#include "holediff/rational.hpp"

namespace holediff {

inline constexpr unsigned kMaxTransferScale = 24;

/// Open-map transition matrix on the partition of [0,1) into 2^s equal cells.
///
/// Hole cells are removed together with their rows and columns. Each
/// surviving cell i sends weight 1/2 to each of the two cells covered by its
/// image, if those survive.
class TransferMatrix {
 public:
  static constexpr std::int32_t kRemoved = -1;

  TransferMatrix(MapKind kind, unsigned s, std::vector<std::uint32_t> surviving,
                 std::vector<std::array<std::int32_t, 2>> targets);

  MapKind kind() const { return kind_; }
  unsigned scale() const { return s_; }
  std::size_t size() const { return surviving_.size(); }
  /// Global cell index (cell c is [c/2^s, (c+1)/2^s)) of each surviving row.
  const std::vector<std::uint32_t>& surviving_cells() const { return surviving_; }
  /// Local column indices reached from local row i, kRemoved for hole cells.
  const std::array<std::int32_t, 2>& targets(std::size_t i) const { return targets_[i]; }
  /// 0, 1/2 or 1.
  double row_sum(std::size_t i) const;
  /// Entry (i -> j) in local indices: 0, 1/2 or 1 (both halves onto j).
  double entry(std::size_t i, std::size_t j) const;

  /// y_j = sum_i x_i P(i -> j): pushes a density forward one step.
  void push_forward(const std::vector<double>& x, std::vector<double>& y) const;

  /// True when the survivor graph has no cycle, i.e. P is nilpotent.
  bool is_nilpotent() const;

 private:
  MapKind kind_;
  unsigned s_;
  std::vector<std::uint32_t> surviving_;
  std::vector<std::array<std::int32_t, 2>> targets_;
};

/// ConfigError unless every endpoint is a multiple of 2^-s and 1 <= s <= 24.
TransferMatrix build_transfer_matrix(const ModelConfig& config, unsigned s);

struct EscapeResult {
  double nu = 1.0;     ///< leading eigenvalue
  double gamma = 0.0;  ///< -ln nu, +inf when nu = 0
  std::size_t iterations = 0;  ///< summed over all blocks
  double residual = 0.0;  ///< || x P - nu x ||_1 over the dominant block, sum(x) = 1
  bool escape_in_finite_time = false;
};

inline constexpr double kDefaultEscapeTol = 1e-13;
inline constexpr std::size_t kDefaultEscapeMaxIter = 1'000'000;

/// Leading eigenvalue: the largest spectral radius among the strongly
/// connected blocks of the survivor graph, each found by L1-normalized power
/// iteration on (P + 1)/2. A block stops once its Collatz-Wielandt bounds
/// min and max of (xP)_j / x_j are closer than tol. Throws ConvergenceError
/// (carrying the bound gap) after max_iter iterations in one block,
/// std::invalid_argument when tol <= 0.
EscapeResult escape_rate(const TransferMatrix& matrix, double tol = kDefaultEscapeTol,
                         std::size_t max_iter = kDefaultEscapeMaxIter);
EscapeResult escape_rate(const ModelConfig& config, unsigned s, double tol = kDefaultEscapeTol,
                         std::size_t max_iter = kDefaultEscapeMaxIter);

/// gamma / h as h -> 0 for the symmetric two-hole doubling model:
/// 2(1 - 2^-p) running, 2(1 - 2^-p/2) standing, 2 non-periodic.
/// std::invalid_argument for dyadic classes.
double escape_asymptotic(const OrbitClassification& classification);

struct EscapeScan {
  MapKind kind;
  Placement placement;
  unsigned s;
  std::vector<EscapeResult> results;  ///< indexed like markov_position
  double mean_arithmetic() const;
  /// 2h with h = 2^-s.
  double reference_2h() const;
};

/// Escape rates of all 2^(s-1) Markov positions, in parallel.
EscapeScan escape_scan(MapKind kind, Placement placement, unsigned s,
                       double tol = kDefaultEscapeTol);

struct DeviationRow {
  std::size_t index = 0;
  ModelConfig config = ModelConfig::no_holes(MapKind::Doubling);
  Rational D;
  Rational D_deviation;  ///< D - <D>
  double gamma = 0.0;
  double gamma_deviation = 0.0;  ///< gamma - arithmetic mean of gamma
  std::optional<PeriodicPoint> dominant;
  OrbitClassification classification;
  /// Small-hole predictions from the dominant orbit: +2h/(2^p - 1) and
  /// -2h/2^p (running), -2h/(2^(p/2) + 1) and -2h/2^(p/2) (standing), 0
  /// without a periodic point.
  Rational predicted_D_deviation;
  double predicted_gamma_deviation = 0.0;
  bool opposite_signs = false;  ///< D and gamma deviate in opposite directions
};

/// Per-position comparison of D and gamma deviations for the symmetric
/// doubling family at scale s.
std::vector<DeviationRow> deviation_report(unsigned s, double tol = kDefaultEscapeTol);

}  // namespace holediff

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "holediff/model.hpp"
#include "holediff/rational.hpp"

namespace holediff {

/// Which functional recursion the cumulative function obeys.
enum class TVariant {
  SymmetricDoubling,
  NonSymmetricDoubling,
  GeneralDoubling,
  TentGeneral,
};

TVariant t_variant(const ModelConfig& config);

/// A value of the cumulative function T(x) together with its recursion family.
struct TValue {
  Rational value;
  TVariant variant;
};

/// Single-step summand t(x) of the cumulative function:
/// 0 on [0,a1), x-a1 on [a1,a2), a2-a1 on [a2,a3), a4-x on [a3,a4), 0 on [a4,1].
/// For symmetric holes a4-x equals 1-x-a1. DomainError outside [0,1].
Rational single_step_term(const ModelConfig& config, const Rational& x);

/// Exact cumulative function T(x) = sum_k w_k t(M^k x).
///
/// The weight is multiplied by 1/2 per step of the doubling map, and by
/// -1/2 after every point on the decreasing branch of the tent map. The
/// orbit of a rational point is eventually periodic, so the series splits
/// into a finite head plus a geometric sum over one cycle.
TValue cumulative_exact(const ModelConfig& config, const Rational& x);

/// Truncated series for a real argument, accurate to within `tol`.
/// Sums k = 0..K with K = ceil(log2(h / tol)), whose tail is at most h 2^-K.
/// DomainError outside [0,1], std::invalid_argument when tol <= 0.
double cumulative_approx(const ModelConfig& config, double x, double tol);

/// Number of summed terms minus one (the K above) used by cumulative_approx.
unsigned cumulative_truncation_order(const Rational& hole_size, double tol);

struct DiffusionResult {
  Rational D;
  Rational D_random_walk;  ///< ((a4-a3) + (a2-a1)) / 2
  ModelConfig config;
};

/// Exact diffusion coefficient D = T(a2) - T(a1) - T(a4) + T(a3) - h.
/// Symmetric doubling configurations additionally evaluate 2T(a2) - 2T(a1) - h
/// and throw std::logic_error if the two routes disagree.
DiffusionResult diffusion_coefficient(const ModelConfig& config);

/// Parent-child split of a dyadic Markov hole of size 2^-s into its two halves.
struct ChildSplit {
  unsigned scale = 0;  ///< s of the parent
  Rational D_parent;
  Rational D_left;
  Rational D_right;
  ModelConfig left;
  ModelConfig right;
  /// D_parent == 2 D_left + 2 D_right - c with c = 2^-s (symmetric) or
  /// 2^(1-s) (holes with I_L pinned at zero).
  bool identity_holds = false;
};

/// Splits the moving hole (I_L for symmetric placement, I_R for the
/// non-symmetric one, whose I_L = [0,h) shrinks along). ConfigError unless
/// the parent is an aligned dyadic hole of size 2^-s.
ChildSplit child_diffusion(const ModelConfig& parent);

/// Both sides of the additivity of relative deviations over `generations`
/// levels of descendants: (D_s - <D_s>)/<D_s> and the sum of the same
/// quantity over all 2^generations descendants.
struct DeviationAdditivity {
  Rational parent_deviation;
  Rational descendant_sum;
  bool holds() const { return parent_deviation == descendant_sum; }
};

/// Symmetric placement only (mean 2^-s at every scale).
DeviationAdditivity relative_deviation_additivity(const ModelConfig& parent,
                                                  unsigned generations);

/// The position-average of D over all Markov holes of size 2^-s:
/// 2^-s for symmetric holes, 2(h - h^2) when I_L is pinned at zero.
Rational expected_position_mean(MapKind kind, Placement placement, unsigned s);

/// Markov hole number `index` of size 2^-s for the given family: I_L = [index h, (index+1) h)
/// for symmetric placement, I_R = [1/2 + index h, 1/2 + (index+1) h) otherwise.
ModelConfig markov_position(MapKind kind, Placement placement, unsigned s, std::size_t index);

/// Number of Markov positions at scale s: 2^(s-1).
std::size_t markov_position_count(unsigned s);

/// Exact D for every Markov position at scale s, stored as D * 4^s.
class PositionScan {
 public:
  PositionScan(MapKind kind, Placement placement, unsigned s, std::vector<std::int64_t> scaled);

  MapKind kind() const { return kind_; }
  Placement placement() const { return placement_; }
  unsigned scale() const { return s_; }
  std::size_t size() const { return scaled_.size(); }
  const std::vector<std::int64_t>& scaled_values() const { return scaled_; }

  Rational D(std::size_t index) const;
  ModelConfig config(std::size_t index) const;
  Rational mean() const;

 private:
  MapKind kind_;
  Placement placement_;
  unsigned s_;
  std::vector<std::int64_t> scaled_;
};

/// Largest scale accepted by the integer position kernel.
inline constexpr unsigned kMaxKernelScale = 30;

/// Scans all 2^(s-1) Markov positions with the dyadic integer kernel,
/// in parallel. ConfigError for General placement or s outside [1, 30].
PositionScan scan_positions(MapKind kind, Placement placement, unsigned s);

/// Integer kernel for a single Markov configuration at scale s <= 30;
/// returns D exactly. Cross-checks cumulative_exact in the tests.
Rational diffusion_dyadic(const ModelConfig& config, unsigned s);

/// Cumulative position function Phi_s(x) = 2^(s+1) int_0^x (D(y) - <D_s>) dy
/// at its breakpoints x_k = k / 2^s, k = 0 .. 2^(s-1). Phi is linear between
/// breakpoints. For the non-symmetric family the abscissa is the offset
/// a3 - 1/2 of the moving hole.
class PhiFunction {
 public:
  PhiFunction(unsigned s, std::vector<std::int64_t> scaled);

  unsigned scale() const { return s_; }
  std::size_t size() const { return scaled_.size(); }
  Rational breakpoint(std::size_t k) const;
  Rational value(std::size_t k) const;
  /// Piecewise-linear evaluation, x in [0, 1/2].
  Rational operator()(const Rational& x) const;

 private:
  unsigned s_;
  std::vector<std::int64_t> scaled_;  ///< Phi(x_k) * 4^s
};

inline constexpr unsigned kMaxPhiScale = 24;

/// DomainError unless 1 <= s <= 24.
PhiFunction phi_cumulative(unsigned s, MapKind kind = MapKind::Doubling,
                           Placement placement = Placement::Symmetric);

}  // namespace holediff

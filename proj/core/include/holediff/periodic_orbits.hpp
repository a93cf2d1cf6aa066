#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "holediff/model.hpp"
#include "holediff/rational.hpp"

namespace holediff {

/// A periodic point of the reduced map with its minimal period.
struct PeriodicPoint {
  Rational point;
  unsigned period = 0;

  friend bool operator==(const PeriodicPoint&, const PeriodicPoint&) = default;
};

enum class OrbitClass {
  Running,         ///< periodic, hole visits all through the same hole
  Standing,        ///< periodic, alternates between the mirror-image holes
  DyadicPreimage,  ///< i / 2^n, falls onto the pinned hole at zero
  NonPeriodic,
};

/// How a shrinking hole approaches its limit point.
enum class LimitMode {
  Interior,            ///< hole centred on the point
  FixedLeftEndpoint,   ///< a_left = point, hole extends to the right
  FixedRightEndpoint,  ///< a_right = point, hole extends to the left
};

std::string_view to_string(OrbitClass c);
std::string_view to_string(LimitMode m);
LimitMode parse_limit_mode(std::string_view text);

struct OrbitClassification {
  OrbitClass orbit_class = OrbitClass::NonPeriodic;
  /// Minimal period for Running/Standing, 0 otherwise.
  unsigned period = 0;
  /// Steps until a one-sided neighbourhood of the point comes back to the same
  /// side: the period, doubled for one-sided limits at orientation-reversing
  /// tent orbits. Equal to `period` for the doubling map.
  unsigned return_period = 0;
  /// n of a dyadic point i / 2^n (DyadicPreimage only).
  unsigned dyadic_exponent = 0;
  LimitMode limit_mode = LimitMode::Interior;
};

/// Map and hole placement; selects which small-hole law applies.
struct ModelFamily {
  MapKind kind = MapKind::Doubling;
  Placement placement = Placement::Symmetric;
};

inline constexpr unsigned kMaxEnumerationPeriod = 30;
/// Points whose orbit does not close within this many steps count as
/// non-periodic.
inline constexpr unsigned kDefaultPeriodCap = 10000;

/// All doubling-map periodic points r / (2^p - 1) in [0,1) with minimal
/// period p <= p_max. DomainError unless 1 <= p_max <= 30.
std::vector<PeriodicPoint> enumerate_periodic_points(unsigned p_max);

/// Periodic points of `kind` with minimal period <= p_max inside the closed
/// interval [lo, hi], sorted by (period, point).
std::vector<PeriodicPoint> enumerate_periodic_points(MapKind kind, unsigned p_max,
                                                     const Rational& lo, const Rational& hi);

/// Minimal period of x under the reduced map, or nullopt if x is not
/// periodic (or its orbit does not close within `cap` steps).
std::optional<unsigned> minimal_period(MapKind kind, const Rational& x,
                                       unsigned cap = kDefaultPeriodCap);

/// Lowest-period periodic point in [lo, hi]; ties go to the smallest point.
std::optional<PeriodicPoint> dominant_periodic_point(MapKind kind, const Rational& lo,
                                                     const Rational& hi,
                                                     unsigned max_period = 60);

/// Classifies the limit point of a shrinking hole.
///
/// Symmetric holes: a periodic point is Standing when some iterate before
/// the period hits the mirror point 1 - x, Running otherwise; a periodic
/// boundary point (endpoint limit modes) is always Running.
/// Holes pinned at zero: periodic points are Running, dyadic rationals are
/// DyadicPreimage (for the doubling map only while the point lies in the
/// half-open hole, i.e. not for FixedRightEndpoint), everything else is
/// NonPeriodic. x must lie in [0,1].
OrbitClassification classify(ModelFamily family, const Rational& x, LimitMode mode,
                             unsigned cap = kDefaultPeriodCap);

/// Exact factor J with D ~ J h as h -> 0.
///
/// symmetric doubling: (1+2^-p)/(1-2^-p) running, (1-2^-p/2)/(1+2^-p/2)
///   standing, 1 non-periodic;
/// symmetric tent: 1 for every point (D = h exactly);
/// pinned doubling: 1 + 1/(1-2^-p) running, 2 - 2^(1-n) dyadic, 2 otherwise;
/// pinned tent: 1 + 1/(1-2^-r) running with r the return period,
///   2 - 2^-n for one-sided limits onto a dyadic (2 - 2^(1-n) when centred),
///   2 otherwise.
/// std::invalid_argument for a class the family cannot produce.
Rational small_hole_factor(ModelFamily family, const OrbitClassification& c);

/// One group of identical terms in the periodic-orbit expansion.
struct ExpansionGroup {
  OrbitClass orbit_class = OrbitClass::Running;
  unsigned period = 0;           ///< minimal period, or n for dyadic points
  unsigned modified_length = 0;  ///< truncation key
  std::size_t multiplicity = 0;
  Rational J;
};

struct ExpansionTerm {
  Rational point;
  OrbitClassification classification;
  unsigned modified_length = 0;
  Rational J;
};

struct ExpansionResult {
  unsigned max_length = 0;
  Rational approximation;
  Rational exact;
  Rational residual;  ///< |approximation - exact|
  std::vector<ExpansionGroup> groups;
  std::vector<ExpansionTerm> terms;  ///< only filled when requested
};

/// Periodic-orbit expansion of D for a Markov configuration.
///
/// D_s ~ h (1 + sum (J - 1)) over the periodic points in the hole (symmetric
/// holes), or h (2 + sum (J - 2)) over periodic and dyadic points of the
/// moving hole I_R (holes pinned at zero). Each point counts once per
/// intersection, boundary points use the endpoint limit modes. Terms are
/// truncated by modified length: the period for running orbits, half the
/// period for standing orbits and n for dyadic points i/2^n; all terms with
/// modified length <= max_length are kept.
///
/// ConfigError for non-Markov or general-placement configs, DomainError
/// unless 1 <= max_length <= 30.
ExpansionResult po_expansion(const ModelConfig& config, unsigned max_length,
                             bool collect_terms = false);

struct AsymptoticSample {
  Rational h;
  ModelConfig config;
  Rational D;
  Rational J;
  Rational prediction;  ///< J h
};

/// Builds the hole of each size around `point` (centred or endpoint-fixed),
/// evaluates D exactly and pairs it with J h. For symmetric placement the
/// hole is I_L in [0,1/2]; for the pinned family it is I_R in [1/2,1] with
/// I_L = [0,h). ConfigError when a hole would leave its admissible range.
std::vector<AsymptoticSample> asymptotic_scan(ModelFamily family, const Rational& point,
                                              LimitMode mode,
                                              const std::vector<Rational>& h_values);

}  // namespace holediff

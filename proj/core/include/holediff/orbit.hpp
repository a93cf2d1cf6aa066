#pragma once

#include <cstddef>
#include <vector>

#include "holediff/model.hpp"
#include "holediff/rational.hpp"

namespace holediff {

/// Eventually periodic orbit of a rational point under the reduced map.
///
/// Iterating from preperiodic.front() visits the preperiodic points in order,
/// then enters the cycle at cycle.front() and repeats it forever.
struct OrbitDecomposition {
  std::vector<Rational> preperiodic;
  std::vector<Rational> cycle;

  std::size_t preperiod() const { return preperiodic.size(); }
  std::size_t period() const { return cycle.size(); }
  /// The k-th iterate, k >= 0.
  const Rational& at(std::size_t k) const;
};

/// Default cap on preperiod + period, about 4M points.
inline constexpr std::size_t kDefaultOrbitLimit = std::size_t{1} << 22;

/// Splits the orbit of x in [0,1] into preperiodic part and cycle.
///
/// Iterates on integer numerators over the fixed denominator of x, so the
/// cost is linear in the orbit length. Throws DomainError outside [0,1] and
/// ResourceLimitError if the orbit is longer than `limit`.
OrbitDecomposition decompose_orbit(MapKind kind, const Rational& x,
                                   std::size_t limit = kDefaultOrbitLimit);

}  // namespace holediff

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "holediff/rational.hpp"

namespace holediff {

/// The reduced (modulo one) dynamics on [0,1].
enum class MapKind {
  Doubling,  ///< x -> 2x mod 1, with x = 1 kept fixed
  Tent,      ///< x -> 2x on [0,1/2), 2 - 2x on [1/2,1]
};

/// How the two holes I_L = [a1,a2) and I_R = [a3,a4) are tied together.
enum class Placement {
  Symmetric,               ///< a4 = 1 - a1, a3 = 1 - a2
  NonSymmetricLeftAtZero,  ///< a1 = 0 and a4 - a3 = a2
  General,                 ///< any admissible pair of equal-size holes
};

std::string_view to_string(MapKind kind);
std::string_view to_string(Placement placement);
MapKind parse_map_kind(std::string_view text);
Placement parse_placement(std::string_view text);

/// Map kind, hole placement and the four hole endpoints.
///
/// Invariants (checked on construction, ConfigError otherwise):
///   0 <= a1 <= a2 <= 1/2 <= a3 <= a4 <= 1,
///   a4 - a3 = a2 - a1 (equal hole sizes keep the cumulative function
///   pinned at T(1) = 0), a1 = a2 only for the hole-free model,
///   plus the placement-specific constraints above.
class ModelConfig {
 public:
  ModelConfig(MapKind kind, Placement placement, Rational a1, Rational a2, Rational a3,
              Rational a4);

  /// I_L = [a1,a2), I_R = [1-a2, 1-a1).
  static ModelConfig symmetric(MapKind kind, Rational a1, Rational a2);
  /// I_L = [0,h), I_R = [a3, a3+h).
  static ModelConfig non_symmetric(MapKind kind, Rational h, Rational a3);
  /// The closed system: no holes at all (h = 0).
  static ModelConfig no_holes(MapKind kind);

  MapKind kind() const { return kind_; }
  Placement placement() const { return placement_; }
  const Rational& a1() const { return a1_; }
  const Rational& a2() const { return a2_; }
  const Rational& a3() const { return a3_; }
  const Rational& a4() const { return a4_; }

  /// h = a2 - a1.
  Rational hole_size() const { return a2_ - a1_; }
  bool has_holes() const { return a1_ != a2_; }

  /// True when every endpoint is of the form r / 2^s.
  bool is_markov(unsigned s) const;
  /// Smallest s for which is_markov(s) holds, if the endpoints are dyadic.
  std::optional<unsigned> markov_scale() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;

 private:
  MapKind kind_;
  Placement placement_;
  Rational a1_, a2_, a3_, a4_;
};

/// One step of the reduced map. DomainError unless 0 <= x <= 1.
Rational step_reduced(MapKind kind, const Rational& x);

/// Integer displacement v(x): +1 on [a1,a2), -1 on [a3,a4), 0 elsewhere.
/// DomainError unless 0 <= x <= 1.
int jump(const ModelConfig& config, const Rational& x);

/// One step of the degree-one lift on the real line:
/// M(b + x) = b + v(x) + reduced(x) for b = floor(X), x in [0,1).
Rational step_lifted(const ModelConfig& config, const Rational& position);

}  // namespace holediff

#include "holediff/diffusion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "holediff/error.hpp"
#include "holediff/orbit.hpp"

namespace holediff {

namespace {

const Rational kHalf(1, 2);
const Rational kMinusHalf(-1, 2);

void check_unit_interval(const Rational& x, const char* what) {
  if (x < 0 || x > 1) {
    throw DomainError(std::string(what) + ": point " + x.str() + " outside [0,1]");
  }
}

// Weight factor picked up when leaving point x: the tent map's decreasing
// branch reverses the orientation of the integral.
const Rational& step_weight(MapKind kind, const Rational& x) {
  return (kind == MapKind::Tent && x >= kHalf) ? kMinusHalf : kHalf;
}

// Size 2^-s of an aligned dyadic hole, or nullopt.
std::optional<unsigned> dyadic_hole_scale(const Rational& h) {
  if (h <= 0 || h.num() != 1 || !h.is_dyadic()) return std::nullopt;
  return h.dyadic_exponent();
}

}  // namespace

TVariant t_variant(const ModelConfig& config) {
  if (config.kind() == MapKind::Tent) return TVariant::TentGeneral;
  switch (config.placement()) {
    case Placement::Symmetric:
      return TVariant::SymmetricDoubling;
    case Placement::NonSymmetricLeftAtZero:
      return TVariant::NonSymmetricDoubling;
    case Placement::General:
      break;
  }
  return TVariant::GeneralDoubling;
}

Rational single_step_term(const ModelConfig& config, const Rational& x) {
  check_unit_interval(x, "single_step_term");
  if (x < config.a1()) return 0;
  if (x < config.a2()) return x - config.a1();
  if (x < config.a3()) return config.a2() - config.a1();
  if (x < config.a4()) return config.a4() - x;
  return 0;
}

TValue cumulative_exact(const ModelConfig& config, const Rational& x) {
  check_unit_interval(x, "cumulative_exact");
  const TVariant variant = t_variant(config);
  if (!config.has_holes()) return {Rational(0), variant};

  const OrbitDecomposition orbit = decompose_orbit(config.kind(), x);

  Rational head;
  Rational weight(1);
  for (const Rational& p : orbit.preperiodic) {
    head += weight * single_step_term(config, p);
    weight *= step_weight(config.kind(), p);
  }
  Rational cycle_sum;
  Rational cycle_weight(1);
  for (const Rational& p : orbit.cycle) {
    cycle_sum += cycle_weight * single_step_term(config, p);
    cycle_weight *= step_weight(config.kind(), p);
  }
  // |cycle_weight| = 2^-period < 1, so the geometric series converges.
  return {head + weight * cycle_sum / (1 - cycle_weight), variant};
}

unsigned cumulative_truncation_order(const Rational& hole_size, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("cumulative_approx: tol must be positive");
  const double ratio = hole_size.to_double() / tol;
  if (ratio <= 1.0) return 0;
  return static_cast<unsigned>(std::ceil(std::log2(ratio)));
}

double cumulative_approx(const ModelConfig& config, double x, double tol) {
  const unsigned order = cumulative_truncation_order(config.hole_size(), tol);
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("cumulative_approx: point outside [0,1]");
  }
  if (!config.has_holes()) return 0.0;

  const double a1 = config.a1().to_double();
  const double a2 = config.a2().to_double();
  const double a3 = config.a3().to_double();
  const double a4 = config.a4().to_double();
  const bool tent = config.kind() == MapKind::Tent;

  double sum = 0.0;
  double weight = 1.0;
  // Multiplication by two and the branch subtractions are exact in binary
  // floating point on [0,1], so the orbit itself carries no rounding error.
  for (unsigned k = 0; k <= order; ++k) {
    double term = 0.0;
    if (x < a1) {
      term = 0.0;
    } else if (x < a2) {
      term = x - a1;
    } else if (x < a3) {
      term = a2 - a1;
    } else if (x < a4) {
      term = a4 - x;
    }
    sum += weight * term;
    if (x < 0.5) {
      x = 2.0 * x;
      weight *= 0.5;
    } else if (tent) {
      x = 2.0 - 2.0 * x;
      weight *= -0.5;
    } else {
      x = x == 1.0 ? 1.0 : 2.0 * x - 1.0;
      weight *= 0.5;
    }
  }
  return sum;
}

DiffusionResult diffusion_coefficient(const ModelConfig& config) {
  const Rational h = config.hole_size();
  const Rational d_rw = ((config.a4() - config.a3()) + (config.a2() - config.a1())) / 2;
  if (!config.has_holes()) return {Rational(0), d_rw, config};

  const Rational t1 = cumulative_exact(config, config.a1()).value;
  const Rational t2 = cumulative_exact(config, config.a2()).value;
  const Rational t3 = cumulative_exact(config, config.a3()).value;
  const Rational t4 = cumulative_exact(config, config.a4()).value;
  Rational d = t2 - t1 - t4 + t3 - h;

  if (t_variant(config) == TVariant::SymmetricDoubling) {
    const Rational reduced = 2 * t2 - 2 * t1 - h;
    if (reduced != d) {
      throw std::logic_error("four-term and symmetric two-term diffusion formulas disagree: " +
                             d.str() + " vs " + reduced.str());
    }
  }
  return {std::move(d), d_rw, config};
}

ChildSplit child_diffusion(const ModelConfig& parent) {
  const auto s = dyadic_hole_scale(parent.hole_size());
  if (!s) throw ConfigError("child_diffusion: parent hole size must be 2^-s");
  const Rational h = parent.hole_size();
  const Rational half = h / 2;

  ChildSplit out{*s,
                 diffusion_coefficient(parent).D,
                 Rational(),
                 Rational(),
                 parent,
                 parent,
                 false};
  Rational correction;
  switch (parent.placement()) {
    case Placement::Symmetric: {
      if (!(parent.a1() / h).is_integer()) throw ConfigError("child_diffusion: parent hole not aligned");
      const Rational mid = parent.a1() + half;
      out.left = ModelConfig::symmetric(parent.kind(), parent.a1(), mid);
      out.right = ModelConfig::symmetric(parent.kind(), mid, parent.a2());
      correction = h;
      break;
    }
    case Placement::NonSymmetricLeftAtZero: {
      if (!((parent.a3() - kHalf) / h).is_integer()) {
        throw ConfigError("child_diffusion: parent hole not aligned");
      }
      out.left = ModelConfig::non_symmetric(parent.kind(), half, parent.a3());
      out.right = ModelConfig::non_symmetric(parent.kind(), half, parent.a3() + half);
      correction = 2 * h;
      break;
    }
    case Placement::General:
      throw ConfigError("child_diffusion: general placement has no parent-child relation");
  }
  out.D_left = diffusion_coefficient(out.left).D;
  out.D_right = diffusion_coefficient(out.right).D;
  out.identity_holds = out.D_parent == 2 * out.D_left + 2 * out.D_right - correction;
  return out;
}

DeviationAdditivity relative_deviation_additivity(const ModelConfig& parent,
                                                  unsigned generations) {
  if (parent.placement() != Placement::Symmetric) {
    throw ConfigError("relative deviation additivity is defined for symmetric holes");
  }
  const auto s = dyadic_hole_scale(parent.hole_size());
  if (!s) throw ConfigError("relative_deviation_additivity: parent hole size must be 2^-s");
  if (generations > 20) throw ResourceLimitError("relative_deviation_additivity: too many generations");

  const Rational h = parent.hole_size();
  DeviationAdditivity out;
  out.parent_deviation = (diffusion_coefficient(parent).D - h) / h;

  const Rational child_h = h * pow2_inverse(generations);
  const std::size_t children = std::size_t{1} << generations;
  for (std::size_t i = 0; i < children; ++i) {
    const Rational a1 = parent.a1() + child_h * Rational(static_cast<long>(i));
    const ModelConfig child = ModelConfig::symmetric(parent.kind(), a1, a1 + child_h);
    out.descendant_sum += (diffusion_coefficient(child).D - child_h) / child_h;
  }
  return out;
}

Rational expected_position_mean(MapKind kind, Placement placement, unsigned s) {
  (void)kind;
  const Rational h = pow2_inverse(s);
  switch (placement) {
    case Placement::Symmetric:
      return h;
    case Placement::NonSymmetricLeftAtZero:
      return 2 * (h - h * h);
    case Placement::General:
      break;
  }
  throw ConfigError("no position mean for general placement");
}

std::size_t markov_position_count(unsigned s) {
  if (s < 1 || s > 62) throw DomainError("markov_position_count: scale out of range");
  return std::size_t{1} << (s - 1);
}

ModelConfig markov_position(MapKind kind, Placement placement, unsigned s, std::size_t index) {
  if (index >= markov_position_count(s)) throw DomainError("markov_position: index out of range");
  const Rational h = pow2_inverse(s);
  const Rational offset = h * Rational(static_cast<long>(index));
  switch (placement) {
    case Placement::Symmetric:
      return ModelConfig::symmetric(kind, offset, offset + h);
    case Placement::NonSymmetricLeftAtZero:
      return ModelConfig::non_symmetric(kind, h, kHalf + offset);
    case Placement::General:
      break;
  }
  throw ConfigError("Markov position scans need symmetric or non-symmetric placement");
}

PositionScan::PositionScan(MapKind kind, Placement placement, unsigned s,
                           std::vector<std::int64_t> scaled)
    : kind_(kind), placement_(placement), s_(s), scaled_(std::move(scaled)) {}

Rational PositionScan::D(std::size_t index) const {
  return Rational::dyadic(mpz_class(static_cast<long>(scaled_.at(index))), 2 * s_);
}

ModelConfig PositionScan::config(std::size_t index) const {
  return markov_position(kind_, placement_, s_, index);
}

Rational PositionScan::mean() const {
  mpz_class total;
  for (std::int64_t v : scaled_) total += static_cast<long>(v);
  return Rational::dyadic(total, 2 * s_) / Rational(static_cast<long>(scaled_.size()));
}

PhiFunction::PhiFunction(unsigned s, std::vector<std::int64_t> scaled)
    : s_(s), scaled_(std::move(scaled)) {}

Rational PhiFunction::breakpoint(std::size_t k) const {
  return Rational::dyadic(mpz_class(static_cast<unsigned long>(k)), s_);
}

Rational PhiFunction::value(std::size_t k) const {
  return Rational::dyadic(mpz_class(static_cast<long>(scaled_.at(k))), 2 * s_);
}

Rational PhiFunction::operator()(const Rational& x) const {
  if (x < 0 || x > kHalf) throw DomainError("Phi: argument outside [0,1/2]");
  const Rational scaled_x = x * Rational(mpz_class(1) << s_, 1);
  const mpz_class cell = scaled_x.floor();
  const std::size_t k = cell.get_ui();
  if (k + 1 >= scaled_.size()) return value(scaled_.size() - 1);
  const Rational fraction = scaled_x - Rational(cell, 1);
  return value(k) + fraction * (value(k + 1) - value(k));
}

}  // namespace holediff

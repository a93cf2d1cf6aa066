#include "holediff/model.hpp"

#include <algorithm>
#include <string>

#include "holediff/error.hpp"

namespace holediff {

namespace {

const Rational kHalf(1, 2);

void check_unit_interval(const Rational& x, const char* what) {
  if (x < 0 || x > 1) {
    throw DomainError(std::string(what) + ": point " + x.str() + " outside [0,1]");
  }
}

}  // namespace

std::string_view to_string(MapKind kind) {
  return kind == MapKind::Doubling ? "doubling" : "tent";
}

std::string_view to_string(Placement placement) {
  switch (placement) {
    case Placement::Symmetric:
      return "symmetric";
    case Placement::NonSymmetricLeftAtZero:
      return "nonsymmetric";
    case Placement::General:
      return "general";
  }
  return "general";
}

MapKind parse_map_kind(std::string_view text) {
  if (text == "doubling" || text == "bernoulli") return MapKind::Doubling;
  if (text == "tent") return MapKind::Tent;
  throw ConfigError("unknown map kind '" + std::string(text) + "'");
}

Placement parse_placement(std::string_view text) {
  if (text == "symmetric") return Placement::Symmetric;
  if (text == "nonsymmetric" || text == "non-symmetric") return Placement::NonSymmetricLeftAtZero;
  if (text == "general") return Placement::General;
  throw ConfigError("unknown placement '" + std::string(text) + "'");
}

ModelConfig::ModelConfig(MapKind kind, Placement placement, Rational a1, Rational a2,
                         Rational a3, Rational a4)
    : kind_(kind),
      placement_(placement),
      a1_(std::move(a1)),
      a2_(std::move(a2)),
      a3_(std::move(a3)),
      a4_(std::move(a4)) {
  auto fail = [&](const std::string& why) {
    throw ConfigError("invalid hole configuration [" + a1_.str() + "," + a2_.str() + "] [" +
                      a3_.str() + "," + a4_.str() + "]: " + why);
  };
  if (!(0 <= a1_ && a1_ <= a2_ && a2_ <= kHalf && kHalf <= a3_ && a3_ <= a4_ && a4_ <= 1)) {
    fail("endpoints must satisfy 0 <= a1 <= a2 <= 1/2 <= a3 <= a4 <= 1");
  }
  if (a4_ - a3_ != a2_ - a1_) fail("holes must have equal size");
  switch (placement_) {
    case Placement::Symmetric:
      if (a4_ != 1 - a1_ || a3_ != 1 - a2_) fail("symmetric placement needs a4 = 1-a1, a3 = 1-a2");
      break;
    case Placement::NonSymmetricLeftAtZero:
      if (a1_ != 0) fail("non-symmetric placement needs a1 = 0");
      break;
    case Placement::General:
      break;
  }
}

ModelConfig ModelConfig::symmetric(MapKind kind, Rational a1, Rational a2) {
  Rational a3 = 1 - a2;
  Rational a4 = 1 - a1;
  return ModelConfig(kind, Placement::Symmetric, std::move(a1), std::move(a2), std::move(a3),
                     std::move(a4));
}

ModelConfig ModelConfig::non_symmetric(MapKind kind, Rational h, Rational a3) {
  Rational a4 = a3 + h;
  return ModelConfig(kind, Placement::NonSymmetricLeftAtZero, 0, std::move(h), std::move(a3),
                     std::move(a4));
}

ModelConfig ModelConfig::no_holes(MapKind kind) { return symmetric(kind, 0, 0); }

bool ModelConfig::is_markov(unsigned s) const {
  auto ok = [s](const Rational& a) { return a.is_dyadic() && a.dyadic_exponent() <= s; };
  return ok(a1_) && ok(a2_) && ok(a3_) && ok(a4_);
}

std::optional<unsigned> ModelConfig::markov_scale() const {
  unsigned s = 0;
  for (const Rational* a : {&a1_, &a2_, &a3_, &a4_}) {
    if (!a->is_dyadic()) return std::nullopt;
    s = std::max(s, a->dyadic_exponent());
  }
  return s;
}

Rational step_reduced(MapKind kind, const Rational& x) {
  check_unit_interval(x, "step_reduced");
  if (x < kHalf) return 2 * x;
  if (kind == MapKind::Doubling) return x == 1 ? x : 2 * x - 1;
  return 2 - 2 * x;
}

int jump(const ModelConfig& config, const Rational& x) {
  check_unit_interval(x, "jump");
  if (config.a1() <= x && x < config.a2()) return 1;
  if (config.a3() <= x && x < config.a4()) return -1;
  return 0;
}

Rational step_lifted(const ModelConfig& config, const Rational& position) {
  const mpz_class cell = position.floor();
  const Rational x = position - Rational(cell, 1);
  return Rational(cell, 1) + jump(config, x) + step_reduced(config.kind(), x);
}

}  // namespace holediff

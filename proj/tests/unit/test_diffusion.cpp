#include <doctest.h>

#include <cmath>
#include <random>

#include "holediff/diffusion.hpp"
#include "holediff/error.hpp"
#include "oracles.hpp"

using namespace holediff;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

Rational D_of(const ModelConfig& c) { return diffusion_coefficient(c).D; }

}  // namespace

TEST_SUITE("diffusion") {
  TEST_CASE("single_step_term") {
    const auto c = ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(1, 4));
    CHECK(single_step_term(c, q(0)) == 0);
    CHECK(single_step_term(c, q(3, 16)) == q(1, 16));
    CHECK(single_step_term(c, q(1, 2)) == q(1, 8));
    CHECK(single_step_term(c, q(13, 16)) == q(1, 16));
    CHECK(single_step_term(c, q(7, 8)) == 0);
    CHECK_THROWS_AS(single_step_term(c, q(9, 8)), DomainError);
  }

  TEST_CASE("closed-form values") {
    CHECK(D_of(ModelConfig::symmetric(MapKind::Doubling, q(0), q(1, 2))) == q(1, 2));
    CHECK(D_of(ModelConfig::symmetric(MapKind::Doubling, q(0), q(1, 4))) == q(1, 2));
    CHECK(D_of(ModelConfig::symmetric(MapKind::Doubling, q(1, 4), q(1, 2))) == 0);
    CHECK(D_of(ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(1, 4))) == q(1, 16));
    CHECK(D_of(ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(3, 16))) == q(5, 64));
    CHECK(D_of(ModelConfig::symmetric(MapKind::Tent, q(1, 8), q(1, 4))) == q(1, 8));
    CHECK(D_of(ModelConfig::no_holes(MapKind::Doubling)) == 0);
    const auto r = diffusion_coefficient(ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(1, 4)));
    CHECK(r.D_random_walk == q(1, 8));
  }

  TEST_CASE("T agrees with the truncated series oracle") {
    std::mt19937_64 rng(21);
    const ModelConfig configs[] = {
        ModelConfig::symmetric(MapKind::Doubling, q(1, 7), q(2, 7)),
        ModelConfig::symmetric(MapKind::Doubling, q(1, 10), q(1, 3)),
        ModelConfig::non_symmetric(MapKind::Doubling, q(1, 9), q(3, 5)),
        ModelConfig(MapKind::Doubling, Placement::General, q(1, 6), q(1, 4), q(2, 3), q(3, 4)),
        ModelConfig::symmetric(MapKind::Tent, q(1, 5), q(1, 3)),
        ModelConfig::non_symmetric(MapKind::Tent, q(1, 12), q(5, 7)),
    };
    for (const auto& c : configs) {
      for (int i = 0; i < 40; ++i) {
        const Rational x = oracle::random_rational(rng, 300);
        const double exact = cumulative_exact(c, x).value.to_double();
        const double series = oracle::partial_T(c, x, 80).to_double();
        CHECK(exact == doctest::Approx(series).epsilon(1e-13));
      }
      CHECK(D_of(c).to_double() == doctest::Approx(oracle::partial_D(c, 80).to_double()).epsilon(1e-13));
    }
  }

  TEST_CASE("T boundary values and variants") {
    const auto c = ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(3, 16));
    CHECK(cumulative_exact(c, q(0)).value == 0);
    CHECK(cumulative_exact(c, q(1)).value == 0);
    CHECK(t_variant(c) == TVariant::SymmetricDoubling);
    CHECK(t_variant(ModelConfig::non_symmetric(MapKind::Doubling, q(1, 8), q(1, 2))) ==
          TVariant::NonSymmetricDoubling);
    CHECK(t_variant(ModelConfig::symmetric(MapKind::Tent, q(0), q(1, 8))) == TVariant::TentGeneral);
  }

  TEST_CASE("cumulative_approx stays within tolerance") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto c = ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(1, 4));
    for (int i = 0; i < 200; ++i) {
      const double x = u(rng);
      const double approx = cumulative_approx(c, x, 1e-12);
      const double series = oracle::partial_T(c, Rational(mpq_class(x)), 60).to_double();
      CHECK(std::abs(approx - series) < 1e-11);
    }
    CHECK(cumulative_truncation_order(q(1, 8), 1e-3) == 7u);
    CHECK_THROWS_AS(cumulative_approx(c, 0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(cumulative_approx(c, 1.5, 1e-6), DomainError);
  }

  TEST_CASE("integer kernel matches exact T") {
    for (MapKind kind : {MapKind::Doubling, MapKind::Tent}) {
      for (Placement pl : {Placement::Symmetric, Placement::NonSymmetricLeftAtZero}) {
        for (unsigned s = 1; s <= 7; ++s) {
          for (std::size_t i = 0; i < markov_position_count(s); ++i) {
            const auto c = markov_position(kind, pl, s, i);
            CHECK(diffusion_dyadic(c, s) == D_of(c));
          }
        }
      }
    }
  }

  TEST_CASE("scan_positions") {
    const auto scan = scan_positions(MapKind::Doubling, Placement::Symmetric, 3);
    REQUIRE(scan.size() == 4u);
    CHECK(scan.D(0) == q(5, 16));
    CHECK(scan.D(1) == q(1, 16));
    for (std::size_t i = 0; i < scan.size(); ++i) CHECK(scan.D(i) == D_of(scan.config(i)));
    CHECK(scan.mean() == q(1, 8));
    CHECK(scan.config(1) == ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(1, 4)));
    CHECK_THROWS_AS(scan_positions(MapKind::Doubling, Placement::General, 3), ConfigError);
    CHECK_THROWS_AS(scan_positions(MapKind::Doubling, Placement::Symmetric, 0), ConfigError);
  }

  TEST_CASE("child splits") {
    const auto split = child_diffusion(ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(1, 4)));
    CHECK(split.scale == 3u);
    CHECK(split.identity_holds);
    CHECK(split.left.a2() == q(3, 16));
    CHECK_THROWS_AS(child_diffusion(ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(1, 3))),
                    ConfigError);
  }

  TEST_CASE("phi function") {
    const auto phi = phi_cumulative(3);
    REQUIRE(phi.size() == 5u);
    CHECK(phi.breakpoint(4) == q(1, 2));
    CHECK(phi.value(0) == 0);
    CHECK(phi.value(4) == 0);
    CHECK(phi.value(1) == q(3, 8));
    CHECK(phi(q(1, 16)) == q(3, 16));
    CHECK_THROWS_AS(phi_cumulative(0), DomainError);
    CHECK_THROWS_AS(phi_cumulative(kMaxPhiScale + 1), DomainError);
  }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "holediff/error.hpp"
#include "holediff/escape.hpp"
#include "holediff/simulator.hpp"
#include "oracles.hpp"

using namespace holediff;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

const mpz_class kTwo64 = mpz_class(1) << 64;

mpz_class to_mpz(std::uint64_t v) {
  mpz_class z(static_cast<unsigned long>(v >> 32));
  z <<= 32;
  z += static_cast<unsigned long>(v & 0xffffffffu);
  return z;
}

SimulationParams small_run(std::uint64_t seed = 7) {
  SimulationParams p;
  p.particles = 2000;
  p.steps = 200;
  p.seed = seed;
  p.samples = 40;
  return p;
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("word intervals round inward") {
    auto w = WordInterval::from(q(1, 4), q(1, 2));
    CHECK(w.lo == std::uint64_t{1} << 62);
    CHECK(w.hi == std::uint64_t{1} << 63);
    CHECK_FALSE(w.to_top);
    w = WordInterval::from(q(1, 2), q(1));
    CHECK(w.to_top);
    CHECK(w.contains(~std::uint64_t{0}));
    w = WordInterval::from(q(1, 3), q(2, 3));
    CHECK(to_mpz(w.lo) * 3 >= kTwo64);
    CHECK(to_mpz(w.lo - 1) * 3 < kTwo64);
    CHECK(to_mpz(w.hi) * 3 <= 2 * kTwo64);
    CHECK(to_mpz(w.hi + 1) * 3 > 2 * kTwo64);
  }

  TEST_CASE("word step matches the exact map on the leading bits") {
    std::mt19937_64 rng(99);
    for (MapKind kind : {MapKind::Doubling, MapKind::Tent}) {
      for (int i = 0; i < 2000; ++i) {
        const std::uint64_t m = rng();
        const bool c = (rng() & 1u) != 0;
        // x has the 64 leading bits m, then bit c, then 1/4 of a unit more.
        const Rational x(4 * (2 * to_mpz(m) + (c ? 1 : 0)) + 1, kTwo64 * 8);
        const Rational y = oracle::reduced_map(kind, x);
        const bool reversed = kind == MapKind::Tent && (m >> 63) != 0;
        const std::uint64_t word = BitstreamWalker::map_word(kind, m, reversed ? !c : c);
        CHECK(mpz_class(y.num() * kTwo64 / y.den()) == to_mpz(word));
      }
    }
  }

  TEST_CASE("walker jumps with hole membership") {
    const auto c = ModelConfig::symmetric(MapKind::Doubling, q(1, 4), q(1, 2));
    const WordHoles holes(c);
    BitstreamWalker w(MapKind::Doubling, std::uint64_t{3} << 61);  // 3/8
    CHECK(w.step(holes, false) == 1);
    CHECK(w.cell() == 1);
    CHECK(w.fraction() == 0.75);
    CHECK(w.step(holes, false) == 0);
    CHECK(w.fraction() == 0.5);
    CHECK(w.step(holes, false) == -1);
    CHECK(w.cell() == 0);
  }

  TEST_CASE("bit source consumes whole draws") {
    std::mt19937_64 a(5), b(5);
    BitSource bits(a);
    const std::uint64_t word = b();
    for (unsigned k = 0; k < 64; ++k) CHECK(bits.next() == (((word >> k) & 1u) != 0));
  }

  TEST_CASE("sample times") {
    const auto t = sample_times(1000, 20);
    CHECK(t.front() == 1u);
    CHECK(t.back() == 1000u);
    CHECK(t.size() <= 20u);
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t[i] > t[i - 1]);
  }

  TEST_CASE("ensembles are reproducible") {
    const auto c = ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(3, 16));
    const auto a = simulate_ensemble(c, small_run());
    const auto b = simulate_ensemble(c, small_run());
    CHECK(a.msd == b.msd);
    CHECK(a.survivors == b.survivors);
    const auto d = simulate_ensemble(c, small_run(8));
    CHECK(a.msd != d.msd);
    CHECK(particle_generator(3, 4)() == particle_generator(3, 4)());
    CHECK(particle_generator(3, 4)() != particle_generator(3, 5)());
  }

  TEST_CASE("closed system does not move and half-open halves walk") {
    const auto none = simulate_ensemble(ModelConfig::no_holes(MapKind::Doubling), small_run());
    for (double v : none.msd) CHECK(v == 0.0);
    const auto walk = simulate_ensemble(ModelConfig::symmetric(MapKind::Doubling, q(0), q(1, 2)),
                                        small_run());
    const auto est = estimate_D(walk);
    CHECK(std::abs(est.D - 0.5) < 4 * est.stderr_ + 1e-3);
    CHECK(walk.survivors.back() == 0u);
  }

  TEST_CASE("guards") {
    const auto c = ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(3, 16));
    SimulationParams p = small_run();
    p.particles = 10;
    CHECK_THROWS_AS(simulate_ensemble(c, p), ConfigError);
    p = small_run();
    p.steps = 5;
    CHECK_THROWS_AS(simulate_ensemble(c, p), ConfigError);
    p = small_run();
    p.particles = 10'000'000;
    p.steps = 1'000'000;
    CHECK_THROWS_AS(simulate_ensemble(c, p), ResourceLimitError);
    MsdSeries tiny;
    tiny.n = {1, 2, 3};
    tiny.msd = {1, 2, 3};
    CHECK_THROWS_AS(estimate_D(tiny), ConfigError);
  }

  TEST_CASE("escape fit") {
    const auto c = ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(5, 32));
    SimulationParams p = small_run();
    p.particles = 20000;
    p.steps = 100;
    const auto e = estimate_escape(c, p);
    const double gamma = escape_rate(c, 5).gamma;
    CHECK(std::abs(e.gamma - gamma) < 4 * e.stderr_ + 0.02);
    CHECK(e.survivors.front() <= p.particles);
    CHECK(e.survivors.back() < e.survivors.front());
    CHECK_THROWS_AS(estimate_escape(ModelConfig::symmetric(MapKind::Doubling, q(0), q(1, 2)), p),
                    ConvergenceError);
  }
}

// Fixed-point evaluation of T and D for Markov holes.
//
// With every endpoint of the form r / 2^s, the orbit of an endpoint stays on
// the grid r / 2^s and reaches 0 (or 1) within s steps, t(x) is a multiple of
// 2^-s and the weights are 2^-k with k < s. Hence T(x) * 4^s is an integer
// bounded by 2h 4^s <= 2^60 for s <= 30, and so is D * 4^s.

#include <cstdint>
#include <string>

#include "holediff/diffusion.hpp"
#include "holediff/error.hpp"
#include "parallel.hpp"

namespace holediff {

namespace {

struct GridHoles {
  std::int64_t a1, a2, a3, a4;  // numerators over 2^s
};

std::int64_t term_scaled(const GridHoles& g, std::int64_t r) {
  if (r < g.a1) return 0;
  if (r < g.a2) return r - g.a1;
  if (r < g.a3) return g.a2 - g.a1;
  if (r < g.a4) return g.a4 - r;
  return 0;
}

// T(r / 2^s) * 4^s.
std::int64_t cumulative_scaled(MapKind kind, unsigned s, const GridHoles& g, std::int64_t r) {
  const std::int64_t one = std::int64_t{1} << s;
  const std::int64_t half = one >> 1;
  std::int64_t total = 0;
  std::int64_t sign = 1;
  for (unsigned k = 0; k < s && r != 0; ++k) {
    total += sign * (term_scaled(g, r) << (s - k));
    if (r < half) {
      r <<= 1;
    } else if (kind == MapKind::Doubling) {
      if (r == one) break;  // fixed point, t(1) = 0
      r = 2 * r - one;
    } else {
      r = 2 * one - 2 * r;
      sign = -sign;
    }
  }
  return total;
}

// D * 4^s.
std::int64_t diffusion_scaled(MapKind kind, unsigned s, const GridHoles& g) {
  if (g.a1 == g.a2) return 0;
  const std::int64_t h_scaled = (g.a2 - g.a1) << s;
  return cumulative_scaled(kind, s, g, g.a2) - cumulative_scaled(kind, s, g, g.a1) -
         cumulative_scaled(kind, s, g, g.a4) + cumulative_scaled(kind, s, g, g.a3) - h_scaled;
}

void check_scale(unsigned s, const char* what) {
  if (s < 1 || s > kMaxKernelScale) {
    throw ConfigError(std::string(what) + ": scale s = " + std::to_string(s) +
                      " outside [1, " + std::to_string(kMaxKernelScale) + "]");
  }
}

GridHoles position_holes(Placement placement, unsigned s, std::int64_t index) {
  const std::int64_t one = std::int64_t{1} << s;
  if (placement == Placement::Symmetric) {
    return {index, index + 1, one - index - 1, one - index};
  }
  const std::int64_t a3 = (one >> 1) + index;
  return {0, 1, a3, a3 + 1};
}

}  // namespace

Rational diffusion_dyadic(const ModelConfig& config, unsigned s) {
  check_scale(s, "diffusion_dyadic");
  if (!config.is_markov(s)) {
    throw ConfigError("diffusion_dyadic: endpoints are not multiples of 2^-" + std::to_string(s));
  }
  auto grid = [s](const Rational& a) {
    const Rational scaled = a * Rational(mpz_class(1) << s, 1);
    return static_cast<std::int64_t>(scaled.num().get_si());  // integer by is_markov(s)
  };
  const GridHoles g{grid(config.a1()), grid(config.a2()), grid(config.a3()), grid(config.a4())};
  return Rational::dyadic(mpz_class(static_cast<long>(diffusion_scaled(config.kind(), s, g))),
                          2 * s);
}

PositionScan scan_positions(MapKind kind, Placement placement, unsigned s) {
  check_scale(s, "scan_positions");
  if (placement == Placement::General) {
    throw ConfigError("scan_positions: choose symmetric or non-symmetric placement");
  }
  const std::size_t count = markov_position_count(s);
  std::vector<std::int64_t> scaled(count);
  detail::parallel_for(count, [&](std::size_t i) {
    scaled[i] = diffusion_scaled(kind, s, position_holes(placement, s, static_cast<std::int64_t>(i)));
  });
  return PositionScan(kind, placement, s, std::move(scaled));
}

PhiFunction phi_cumulative(unsigned s, MapKind kind, Placement placement) {
  if (s < 1 || s > kMaxPhiScale) {
    throw DomainError("phi_cumulative: s = " + std::to_string(s) + " outside [1, " +
                      std::to_string(kMaxPhiScale) + "]");
  }
  const PositionScan scan = scan_positions(kind, placement, s);
  // <D_s> * 4^s is an integer: 2^s, or 2(2^s - 1) for holes pinned at zero.
  const std::int64_t one = std::int64_t{1} << s;
  const std::int64_t mean_scaled = placement == Placement::Symmetric ? one : 2 * (one - 1);

  std::vector<std::int64_t> phi(scan.size() + 1);
  // Phi(x_{k+1}) - Phi(x_k) = 2^(s+1) (D_k - <D>) 2^-s = 2 (D_k - <D>).
  for (std::size_t k = 0; k < scan.size(); ++k) {
    phi[k + 1] = phi[k] + 2 * (scan.scaled_values()[k] - mean_scaled);
  }
  return PhiFunction(s, std::move(phi));
}

}  // namespace holediff

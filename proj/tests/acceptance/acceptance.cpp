// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "holediff/diffusion.hpp"
#include "holediff/escape.hpp"
#include "holediff/periodic_orbits.hpp"
#include "holediff/simulator.hpp"
#include "oracles.hpp"

using namespace holediff;

namespace {

// Pinned tolerances.
constexpr double kAsymptoticTol = 1e-5;          // |D/h - J| at h = 2^-20
constexpr double kEscapeMeanTarget = 0.00393;    // <gamma> at s = 9, three significant figures
constexpr double kEscapeScanSeconds = 60.0;
constexpr double kEscapeLawTol = 1e-2;           // |gamma/h - law| at s = 16
constexpr double kEigenTol = 1e-10;              // power iteration vs dense eigensolver
constexpr double kApproxTol = 1e-12;             // truncated series tolerance
constexpr double kSigmas = 3.0;                  // Monte Carlo agreement
constexpr double kTrappingSlope = 1e-3;
constexpr double kMonteCarloSeconds = 300.0;
constexpr double kImproveFraction = 0.9;         // po-expansion: share of positions improving
constexpr unsigned kShortLength = 8;
constexpr unsigned kLongLength = 20;

Rational q(long p, long d = 1) { return Rational(p, d); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Verdict {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(const char* name, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.ok = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  if (!v.ok) ++failures;
  std::printf("%s  %-34s %6.1fs %s\n", v.ok ? "PASS" : "FAIL", name, seconds_since(t0),
              v.detail.str().c_str());
  std::fflush(stdout);
}

Rational D_of(const ModelConfig& c) { return diffusion_coefficient(c).D; }

void exact_constants(Verdict& v) {
  struct Case {
    MapKind kind;
    Rational a1, a2, D;
  };
  const Case cases[] = {
      {MapKind::Doubling, q(0), q(1, 2), q(1, 2)},      {MapKind::Doubling, q(0), q(1, 4), q(1, 2)},
      {MapKind::Doubling, q(1, 4), q(1, 2), q(0)},      {MapKind::Doubling, q(1, 8), q(1, 4), q(1, 16)},
      {MapKind::Doubling, q(1, 8), q(3, 16), q(5, 64)}, {MapKind::Tent, q(1, 8), q(1, 4), q(1, 8)},
  };
  for (const auto& c : cases) {
    const Rational D = D_of(ModelConfig::symmetric(c.kind, c.a1, c.a2));
    v.require(D == c.D, "[" + c.a1.str() + "," + c.a2.str() + "] gave " + D.str());
  }
  v.detail << "6 configurations exact";
}

void mean_laws(Verdict& v) {
  for (MapKind kind : {MapKind::Doubling, MapKind::Tent}) {
    for (unsigned s = 1; s <= 16; ++s) {
      const Rational h = pow2_inverse(s);
      v.require(scan_positions(kind, Placement::Symmetric, s).mean() == h, "symmetric s=" + std::to_string(s));
      v.require(scan_positions(kind, Placement::NonSymmetricLeftAtZero, s).mean() == 2 * (h - h * h),
                "pinned s=" + std::to_string(s));
    }
  }
  v.detail << "s = 1..16, both maps, both placements";
}

void parent_child(Verdict& v) {
  std::size_t checked = 0;
  for (Placement pl : {Placement::Symmetric, Placement::NonSymmetricLeftAtZero}) {
    for (unsigned s = 1; s <= 10; ++s) {
      const Rational c = pl == Placement::Symmetric ? pow2_inverse(s) : 2 * pow2_inverse(s);
      const auto parents = scan_positions(MapKind::Doubling, pl, s);
      const auto children = scan_positions(MapKind::Doubling, pl, s + 1);
      for (std::size_t i = 0; i < parents.size(); ++i) {
        const bool ok = parents.D(i) == 2 * children.D(2 * i) + 2 * children.D(2 * i + 1) - c;
        v.require(ok, "s=" + std::to_string(s) + " i=" + std::to_string(i));
        ++checked;
      }
    }
  }
  for (unsigned s = 1; s <= 6; ++s) {
    for (std::size_t i = 0; i < markov_position_count(s); ++i) {
      const auto parent = markov_position(MapKind::Doubling, Placement::Symmetric, s, i);
      v.require(relative_deviation_additivity(parent, 4).holds(), "additivity s=" + std::to_string(s));
    }
  }
  v.detail << checked << " identities, additivity over 4 generations";
}

void tent_independence(Verdict& v) {
  for (unsigned s = 1; s <= 14; ++s) {
    const auto scan = scan_positions(MapKind::Tent, Placement::Symmetric, s);
    for (std::size_t i = 0; i < scan.size(); ++i) {
      v.require(scan.D(i) == pow2_inverse(s), "s=" + std::to_string(s));
    }
  }
  v.detail << "D = h at every position, s = 1..14";
}

void asymptotics(Verdict& v) {
  struct Case {
    const char* name;
    Rational point;
    LimitMode mode;
    Rational J;
  };
  const ModelFamily family{MapKind::Doubling, Placement::Symmetric};
  const Case cases[] = {
      {"[0,h]", q(0), LimitMode::FixedLeftEndpoint, q(3)},
      {"centred 1/3", q(1, 3), LimitMode::Interior, q(1, 3)},
      {"centred 1/7", q(1, 7), LimitMode::Interior, q(9, 7)},
      {"left-fixed 1/3", q(1, 3), LimitMode::FixedLeftEndpoint, q(5, 3)},
  };
  for (const auto& c : cases) {
    const auto samples = asymptotic_scan(family, c.point, c.mode, {pow2_inverse(10), pow2_inverse(20)});
    v.require(samples[0].J == c.J, std::string(c.name) + " J=" + samples[0].J.str());
    const double e10 = std::abs((samples[0].D / samples[0].h - c.J).to_double());
    const double e20 = std::abs((samples[1].D / samples[1].h - c.J).to_double());
    v.require(e20 < kAsymptoticTol && e20 < e10, c.name);
    v.detail << c.name << ": " << e10 << " -> " << e20 << "; ";
  }
}

void escape_checks(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto scan = escape_scan(MapKind::Doubling, Placement::Symmetric, 9);
  const double elapsed = seconds_since(t0);
  const double mean = scan.mean_arithmetic();
  v.require(elapsed < kEscapeScanSeconds, "s=9 scan took " + std::to_string(elapsed) + "s");
  v.require(std::abs(mean - kEscapeMeanTarget) < 5e-6, "mean " + std::to_string(mean));
  v.detail << "<gamma>_9 = " << mean << " in " << elapsed << "s; ";

  const unsigned s = 16;
  const Rational h = pow2_inverse(s);
  const ModelFamily family{MapKind::Doubling, Placement::Symmetric};
  for (const Rational& x : {q(0), q(1, 3), q(1, 7), q(8773, 20029)}) {
    const Rational a1 = Rational((x / h).floor(), 1) * h;
    const auto r = escape_rate(ModelConfig::symmetric(MapKind::Doubling, a1, a1 + h), s);
    const auto cls = classify(family, x, x == a1 ? LimitMode::FixedLeftEndpoint : LimitMode::Interior);
    const double law = escape_asymptotic(cls);
    const double ratio = r.gamma / h.to_double();
    v.require(std::abs(ratio - law) < kEscapeLawTol, "law at " + x.str());
    v.detail << x << ": " << ratio << " vs " << law << "; ";
  }

  std::size_t pairs = 0;
  for (MapKind kind : {MapKind::Doubling, MapKind::Tent}) {
    for (unsigned sc = 2; sc <= 6; ++sc) {
      const Rational unit = pow2_inverse(sc);
      const long n = 1L << sc;
      std::vector<std::pair<ModelConfig, double>> all;
      for (long a1 = 0; a1 < n / 2; ++a1) {
        for (long a2 = a1 + 1; a2 <= n / 2; ++a2) {
          const auto c = ModelConfig::symmetric(kind, unit * a1, unit * a2);
          all.emplace_back(c, escape_rate(c, sc).gamma);
        }
      }
      for (long w = 1; w <= n / 2; ++w) {
        for (long a3 = n / 2; a3 + w <= n; ++a3) {
          const auto c = ModelConfig::non_symmetric(kind, unit * w, unit * a3);
          all.emplace_back(c, escape_rate(c, sc).gamma);
        }
      }
      auto inside = [](const ModelConfig& a, const ModelConfig& b) {
        return b.a1() <= a.a1() && a.a2() <= b.a2() && b.a3() <= a.a3() && a.a4() <= b.a4();
      };
      for (const auto& [a, ga] : all) {
        for (const auto& [b, gb] : all) {
          if (inside(a, b)) {
            ++pairs;
            v.require(gb >= ga - 1e-12, "monotonicity");
          }
        }
      }
    }
  }
  v.detail << pairs << " nested pairs monotone";
}

void cross_oracle(Verdict& v) {
  double worst = 0.0;
  for (MapKind kind : {MapKind::Doubling, MapKind::Tent}) {
    for (Placement pl : {Placement::Symmetric, Placement::NonSymmetricLeftAtZero}) {
      for (unsigned s = 1; s <= 6; ++s) {
        for (std::size_t i = 0; i < markov_position_count(s); ++i) {
          const auto c = markov_position(kind, pl, s, i);
          const double dense = oracle::spectral_radius(oracle::brute_transfer(c, s).P);
          worst = std::max(worst, std::abs(escape_rate(c, s).nu - dense));
        }
      }
    }
  }
  v.require(worst < kEigenTol, "eigenvalues");

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_t = 0.0;
  const ModelConfig configs[] = {
      ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(3, 16)),
      ModelConfig::non_symmetric(MapKind::Doubling, q(1, 12), q(3, 5)),
      ModelConfig::symmetric(MapKind::Tent, q(1, 7), q(2, 7)),
      ModelConfig::non_symmetric(MapKind::Tent, q(1, 16), q(11, 16)),
      ModelConfig(MapKind::Doubling, Placement::General, q(1, 6), q(1, 4), q(2, 3), q(3, 4)),
  };
  for (int i = 0; i < 500; ++i) {
    const auto& c = configs[i % 5];
    const double x = u(rng);
    const Rational exact = cumulative_exact(c, Rational(mpq_class(x))).value;
    worst_t = std::max(worst_t, std::abs(cumulative_approx(c, x, kApproxTol) - exact.to_double()));
  }
  v.require(worst_t < kApproxTol, "truncated series");
  v.detail << "eigenvalue gap " << worst << ", series gap " << worst_t << " over 500 points";
}

void monte_carlo(Verdict& v) {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationParams p;  // 10^5 particles, 10^4 steps
  const ModelConfig configs[] = {
      ModelConfig::symmetric(MapKind::Doubling, q(0), q(1, 2)),
      ModelConfig::symmetric(MapKind::Doubling, q(1, 8), q(3, 16)),
      ModelConfig::symmetric(MapKind::Tent, q(1, 16), q(1, 8)),
  };
  for (const auto& c : configs) {
    const auto est = estimate_D(simulate_ensemble(c, p));
    const double exact = D_of(c).to_double();
    v.require(std::abs(est.D - exact) <= kSigmas * est.stderr_, "D at [" + c.a1().str() + "," + c.a2().str() + "]");
    v.detail << exact << " ~ " << est.D << "+-" << est.stderr_ << "; ";
  }

  const auto trap = estimate_D(simulate_ensemble(ModelConfig::symmetric(MapKind::Doubling, q(1, 4), q(1, 2)), p));
  v.require(std::abs(trap.D) < kTrappingSlope, "trapping slope");
  v.detail << "trapped slope " << trap.D << "; ";

  for (std::size_t index : {std::size_t{0}, std::size_t{85}}) {
    const auto c = markov_position(MapKind::Doubling, Placement::Symmetric, 9, index);
    const double gamma = escape_rate(c, 9).gamma;
    const auto est = estimate_escape(c, p);
    v.require(std::abs(est.gamma - gamma) <= kSigmas * est.stderr_, "gamma at position " + std::to_string(index));
    v.detail << "gamma " << gamma << " ~ " << est.gamma << "+-" << est.stderr_ << "; ";
  }
  const double elapsed = seconds_since(t0);
  v.require(elapsed < kMonteCarloSeconds, "runtime");
}

void po_convergence(Verdict& v) {
  const unsigned s = 6;
  const double h = pow2_inverse(s).to_double();
  std::size_t improved = 0;
  std::vector<double> residuals;
  for (std::size_t i = 0; i < markov_position_count(s); ++i) {
    const auto c = markov_position(MapKind::Doubling, Placement::Symmetric, s, i);
    const Rational r_short = po_expansion(c, kShortLength).residual;
    const Rational r_long = po_expansion(c, kLongLength).residual;
    improved += r_long <= r_short;
    residuals.push_back(r_long.to_double());
  }
  std::sort(residuals.begin(), residuals.end());
  const double median = 0.5 * (residuals[residuals.size() / 2 - 1] + residuals[residuals.size() / 2]);
  const double share = static_cast<double>(improved) / static_cast<double>(residuals.size());
  v.require(share >= kImproveFraction, "improvement share");
  v.require(median < h / 10, "median residual");
  v.detail << improved << "/" << residuals.size() << " improve, median residual " << median
           << " (h/10 = " << h / 10 << ")";
}

}  // namespace

int main() {
  criterion("exact-constants", exact_constants);
  criterion("position-mean-laws", mean_laws);
  criterion("parent-child-and-additivity", parent_child);
  criterion("tent-position-independence", tent_independence);
  criterion("small-hole-asymptotics", asymptotics);
  criterion("escape-rates", escape_checks);
  criterion("cross-oracle", cross_oracle);
  criterion("monte-carlo", monte_carlo);
  criterion("periodic-orbit-expansion", po_convergence);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

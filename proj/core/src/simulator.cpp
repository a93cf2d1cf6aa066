#include "holediff/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "holediff/error.hpp"
#include "parallel.hpp"

namespace holediff {

namespace {

const mpz_class kWordScale = mpz_class(1) << 64;

std::uint64_t to_word(const mpz_class& v) {
  // mpz_get_ui is only 64 bits wide on LP64 targets; split to stay portable.
  const mpz_class high = v >> 32;
  const mpz_class low = v - (high << 32);
  return (static_cast<std::uint64_t>(high.get_ui()) << 32) | low.get_ui();
}

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Fit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  return f;
}

double standard_error(const std::vector<double>& values) {
  const std::size_t b = values.size();
  if (b < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(b);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
}

void check_params(const SimulationParams& p) {
  if (p.particles < kMinParticles) {
    throw ConfigError("simulation needs at least " + std::to_string(kMinParticles) + " particles");
  }
  if (p.steps < kMinSteps) {
    throw ConfigError("simulation needs at least " + std::to_string(kMinSteps) + " steps");
  }
  if (static_cast<double>(p.particles) * static_cast<double>(p.steps) > kMaxParticleSteps) {
    throw ResourceLimitError("simulation exceeds 10^12 particle-steps");
  }
  if (p.batches < 2) throw ConfigError("simulation needs at least 2 batches");
}

std::size_t batch_begin(std::size_t b, std::size_t batches, std::size_t particles) {
  return b * particles / batches;
}

}  // namespace

WordInterval WordInterval::from(const Rational& a, const Rational& b) {
  WordInterval w;
  if (a >= b) return w;  // empty: lo = hi = 0
  mpz_class lo = a.num() * kWordScale;
  mpz_cdiv_q(lo.get_mpz_t(), lo.get_mpz_t(), a.den().get_mpz_t());
  mpz_class hi = b.num() * kWordScale;
  mpz_fdiv_q(hi.get_mpz_t(), hi.get_mpz_t(), b.den().get_mpz_t());
  if (lo >= kWordScale || lo >= hi) return w;
  w.lo = to_word(lo);
  if (hi >= kWordScale) {
    w.to_top = true;
  } else {
    w.hi = to_word(hi);
  }
  return w;
}

WordHoles::WordHoles(const ModelConfig& config)
    : left(WordInterval::from(config.a1(), config.a2())),
      right(WordInterval::from(config.a3(), config.a4())) {}

double BitstreamWalker::fraction() const { return std::ldexp(static_cast<double>(mantissa_), -64); }

std::mt19937_64 particle_generator(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<std::uint64_t> sample_times(std::uint64_t steps, std::size_t samples) {
  if (steps == 0 || samples == 0) throw ConfigError("sample_times: need steps and samples");
  std::vector<std::uint64_t> out;
  const double log_steps = std::log(static_cast<double>(steps));
  for (std::size_t k = 0; k < samples; ++k) {
    const double frac = samples == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(samples - 1);
    auto t = static_cast<std::uint64_t>(std::llround(std::exp(log_steps * frac)));
    t = std::clamp<std::uint64_t>(t, 1, steps);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  if (out.back() != steps) out.push_back(steps);
  return out;
}

MsdSeries simulate_ensemble(const ModelConfig& config, const SimulationParams& params) {
  check_params(params);
  const WordHoles holes(config);
  const std::vector<std::uint64_t> times = sample_times(params.steps, params.samples);
  const std::size_t batches = std::min(params.batches, params.particles);
  const std::size_t k_max = times.size();

  std::vector<std::vector<double>> sums(batches, std::vector<double>(k_max, 0.0));
  std::vector<std::vector<std::uint64_t>> alive(batches, std::vector<std::uint64_t>(k_max, 0));

  detail::parallel_for(
      batches,
      [&](std::size_t b) {
        const std::size_t end = batch_begin(b + 1, batches, params.particles);
        for (std::size_t i = batch_begin(b, batches, params.particles); i < end; ++i) {
          std::mt19937_64 rng = particle_generator(params.seed, i);
          const std::uint64_t start = rng();
          BitSource bits(rng);
          BitstreamWalker walker(config.kind(), start);
          bool survived = true;
          std::size_t k = 0;
          for (std::uint64_t n = 1; n <= params.steps; ++n) {
            if (walker.step(holes, bits.next()) != 0) survived = false;
            if (n == times[k]) {
              const double x = static_cast<double>(walker.cell());
              sums[b][k] += x * x;
              if (survived && holes.jump(walker.mantissa()) == 0) ++alive[b][k];
              ++k;
            }
          }
        }
      },
      2);

  MsdSeries out;
  out.n = times;
  out.msd.assign(k_max, 0.0);
  out.stderr_.assign(k_max, 0.0);
  out.survivors.assign(k_max, 0);
  out.batch_msd.assign(batches, std::vector<double>(k_max, 0.0));
  for (std::size_t b = 0; b < batches; ++b) {
    const double size = static_cast<double>(batch_begin(b + 1, batches, params.particles) -
                                            batch_begin(b, batches, params.particles));
    for (std::size_t k = 0; k < k_max; ++k) {
      out.batch_msd[b][k] = sums[b][k] / size;
      out.msd[k] += sums[b][k];
      out.survivors[k] += alive[b][k];
    }
  }
  std::vector<double> column(batches);
  for (std::size_t k = 0; k < k_max; ++k) {
    out.msd[k] /= static_cast<double>(params.particles);
    for (std::size_t b = 0; b < batches; ++b) column[b] = out.batch_msd[b][k];
    out.stderr_[k] = standard_error(column);
  }
  return out;
}

DiffusionEstimate estimate_D(const MsdSeries& series, double window) {
  if (!(window > 0.0 && window <= 1.0)) throw ConfigError("estimate_D: window must be in (0,1]");
  const std::size_t count = series.n.size();
  const auto start = static_cast<std::size_t>(std::floor(static_cast<double>(count) * (1.0 - window)));
  const std::size_t points = count - std::min(start, count);
  if (points < 10) {
    throw ConfigError("estimate_D: " + std::to_string(points) + " points in the fit window, need 10");
  }
  std::vector<double> x(points);
  std::vector<double> y(points);
  for (std::size_t i = 0; i < points; ++i) {
    x[i] = 2.0 * static_cast<double>(series.n[start + i]);
    y[i] = series.msd[start + i];
  }
  const Fit total = least_squares(x, y);

  std::vector<double> slopes;
  for (const auto& batch : series.batch_msd) {
    for (std::size_t i = 0; i < points; ++i) y[i] = batch[start + i];
    slopes.push_back(least_squares(x, y).slope);
  }
  DiffusionEstimate est;
  est.D = total.slope;
  est.intercept = total.intercept;
  est.stderr_ = standard_error(slopes);
  est.points = points;
  est.n_first = series.n[start];
  est.n_last = series.n.back();
  return est;
}

EscapeEstimate estimate_escape(const ModelConfig& config, const SimulationParams& params,
                               const EscapeFitParams& fit) {
  check_params(params);
  const WordHoles holes(config);
  const std::size_t batches = std::min(params.batches, params.particles);
  const std::uint64_t steps = params.steps;

  // hits[b][t]: walkers of batch b whose first hole visit is x_t.
  std::vector<std::vector<std::uint64_t>> hits(batches, std::vector<std::uint64_t>(steps + 1, 0));
  detail::parallel_for(
      batches,
      [&](std::size_t b) {
        const std::size_t end = batch_begin(b + 1, batches, params.particles);
        for (std::size_t i = batch_begin(b, batches, params.particles); i < end; ++i) {
          std::mt19937_64 rng = particle_generator(params.seed, i);
          std::uint64_t m = rng();
          BitSource bits(rng);
          for (std::uint64_t t = 0; t <= steps; ++t) {
            if (holes.jump(m) != 0) {
              ++hits[b][t];
              break;
            }
            m = BitstreamWalker::map_word(config.kind(), m, bits.next());
          }
        }
      },
      2);

  std::vector<std::vector<double>> survival(batches, std::vector<double>(steps + 1));
  EscapeEstimate est;
  est.survivors.assign(steps + 1, 0);
  for (std::size_t b = 0; b < batches; ++b) {
    std::uint64_t remaining = batch_begin(b + 1, batches, params.particles) -
                              batch_begin(b, batches, params.particles);
    for (std::uint64_t t = 0; t <= steps; ++t) {
      remaining -= hits[b][t];
      survival[b][t] = static_cast<double>(remaining);
      est.survivors[t] += remaining;
    }
  }

  std::uint64_t last = fit.transient;
  while (last + 1 <= steps && est.survivors[last + 1] >= fit.min_survivors) {
    bool all_positive = true;
    for (std::size_t b = 0; b < batches && all_positive; ++b) all_positive = survival[b][last + 1] > 0;
    if (!all_positive) break;
    ++last;
  }
  if (last > steps || last < fit.transient + 2 || est.survivors[fit.transient] < fit.min_survivors) {
    throw ConvergenceError("estimate_escape: too few survivors for a fit after the transient",
                           std::nan(""));
  }

  const std::size_t points = last - fit.transient + 1;
  std::vector<double> x(points), y(points);
  for (std::size_t i = 0; i < points; ++i) {
    x[i] = static_cast<double>(fit.transient + i);
    y[i] = std::log(static_cast<double>(est.survivors[fit.transient + i]));
  }
  est.gamma = -least_squares(x, y).slope;
  std::vector<double> rates;
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < points; ++i) y[i] = std::log(survival[b][fit.transient + i]);
    rates.push_back(-least_squares(x, y).slope);
  }
  est.stderr_ = standard_error(rates);
  est.n_first = fit.transient;
  est.n_last = last;
  return est;
}

}  // namespace holediff

#include "holediff/escape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "holediff/diffusion.hpp"
#include "holediff/error.hpp"
#include "parallel.hpp"

namespace holediff {

namespace {

std::int64_t grid_index(const Rational& a, unsigned s) {
  const Rational scaled = a * Rational(mpz_class(1) << s, 1);
  return scaled.num().get_si();
}


struct BlockResult {
  double nu = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
};

// Iterative Tarjan; returns the component of every vertex and the count.
std::pair<std::vector<std::uint32_t>, std::size_t> strongly_connected_components(
    const TransferMatrix& m) {
  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = m.size();
  std::vector<std::uint32_t> index(n, kUnseen), low(n, 0), component(n, kUnseen);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, unsigned>> call;  // vertex, next edge
  std::uint32_t next_index = 0;
  std::size_t count = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnseen) continue;
    call.emplace_back(static_cast<std::uint32_t>(root), 0u);
    index[root] = low[root] = next_index++;
    stack.push_back(static_cast<std::uint32_t>(root));
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge < 2) {
        const std::int32_t t = m.targets(v)[edge++];
        if (t == TransferMatrix::kRemoved) continue;
        const auto w = static_cast<std::uint32_t>(t);
        if (index[w] == kUnseen) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          call.emplace_back(w, 0u);
        } else if (component[w] == kUnseen) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          component[w] = static_cast<std::uint32_t>(count);
        } while (w != done);
        ++count;
      }
    }
  }
  return {std::move(component), count};
}

// Spectral radius of the irreducible block `cells` by lazy power iteration,
// stopped once the Collatz-Wielandt bounds min/max (vP)_j / v_j, which
// enclose the radius, are closer than tol.
BlockResult block_radius(const TransferMatrix& m, const std::vector<std::uint32_t>& cells,
                         const std::vector<std::uint32_t>& component, double tol,
                         std::size_t max_iter) {
  BlockResult out;
  const std::size_t k = cells.size();
  const std::uint32_t id = component[cells.front()];
  std::vector<std::uint32_t> local(k);
  std::vector<std::array<std::int32_t, 2>> edges(k);
  std::unordered_map<std::uint32_t, std::int32_t> position;
  position.reserve(k);
  for (std::size_t a = 0; a < k; ++a) position.emplace(cells[a], static_cast<std::int32_t>(a));
  bool has_edge = false;
  for (std::size_t a = 0; a < k; ++a) {
    for (int e = 0; e < 2; ++e) {
      const std::int32_t t = m.targets(cells[a])[static_cast<std::size_t>(e)];
      const bool inside = t != TransferMatrix::kRemoved && component[static_cast<std::size_t>(t)] == id;
      edges[a][static_cast<std::size_t>(e)] = inside ? position.at(static_cast<std::uint32_t>(t)) : -1;
      has_edge |= inside;
    }
  }
  if (!has_edge) return out;  // single vertex without a loop

  std::vector<double> v(k, 1.0 / static_cast<double>(k)), y(k);
  auto push = [&] {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::int32_t b : edges[a]) {
        if (b >= 0) y[static_cast<std::size_t>(b)] += 0.5 * v[a];
      }
    }
  };
  double lo = 0.0, hi = 0.0;
  while (out.iterations < max_iter) {
    ++out.iterations;
    push();
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double mass = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      const double r = y[a] / v[a];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      mass += y[a];
    }
    out.nu = mass;  // sum(v) = 1
    if (hi - lo < tol) break;
    const double norm = 0.5 * (mass + 1.0);
    for (std::size_t a = 0; a < k; ++a) v[a] = 0.5 * (y[a] + v[a]) / norm;
  }
  if (hi - lo >= tol) {
    throw ConvergenceError("escape_rate: power iteration did not converge after " +
                               std::to_string(max_iter) + " iterations",
                           hi - lo);
  }
  for (std::size_t a = 0; a < k; ++a) out.residual += std::abs(y[a] - out.nu * v[a]);
  return out;
}

}  // namespace

TransferMatrix::TransferMatrix(MapKind kind, unsigned s, std::vector<std::uint32_t> surviving,
                               std::vector<std::array<std::int32_t, 2>> targets)
    : kind_(kind), s_(s), surviving_(std::move(surviving)), targets_(std::move(targets)) {}

double TransferMatrix::row_sum(std::size_t i) const {
  const auto& t = targets_.at(i);
  return 0.5 * ((t[0] != kRemoved) + (t[1] != kRemoved));
}

double TransferMatrix::entry(std::size_t i, std::size_t j) const {
  const auto& t = targets_.at(i);
  const auto col = static_cast<std::int32_t>(j);
  return 0.5 * ((t[0] == col) + (t[1] == col));
}

void TransferMatrix::push_forward(const std::vector<double>& x, std::vector<double>& y) const {
  y.assign(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const double half = 0.5 * x[i];
    for (std::int32_t t : targets_[i]) {
      if (t != kRemoved) y[static_cast<std::size_t>(t)] += half;
    }
  }
}

bool TransferMatrix::is_nilpotent() const {
  std::vector<std::uint32_t> indegree(size(), 0);
  for (const auto& t : targets_) {
    for (std::int32_t j : t) {
      if (j != kRemoved) ++indegree[static_cast<std::size_t>(j)];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < size(); ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    const std::size_t i = ready.back();
    ready.pop_back();
    ++removed;
    for (std::int32_t j : targets_[i]) {
      if (j != kRemoved && --indegree[static_cast<std::size_t>(j)] == 0) {
        ready.push_back(static_cast<std::size_t>(j));
      }
    }
  }
  return removed == size();
}

TransferMatrix build_transfer_matrix(const ModelConfig& config, unsigned s) {
  if (s < 1 || s > kMaxTransferScale) {
    throw ConfigError("transfer matrix scale s = " + std::to_string(s) + " outside [1, " +
                      std::to_string(kMaxTransferScale) + "]");
  }
  if (!config.is_markov(s)) {
    throw ConfigError("hole endpoints are not multiples of 2^-" + std::to_string(s));
  }
  const std::int64_t n = std::int64_t{1} << s;
  const std::int64_t a1 = grid_index(config.a1(), s), a2 = grid_index(config.a2(), s);
  const std::int64_t a3 = grid_index(config.a3(), s), a4 = grid_index(config.a4(), s);

  std::vector<std::int32_t> local(static_cast<std::size_t>(n), TransferMatrix::kRemoved);
  std::vector<std::uint32_t> surviving;
  for (std::int64_t c = 0; c < n; ++c) {
    const bool hole = (c >= a1 && c < a2) || (c >= a3 && c < a4);
    if (!hole) {
      local[static_cast<std::size_t>(c)] = static_cast<std::int32_t>(surviving.size());
      surviving.push_back(static_cast<std::uint32_t>(c));
    }
  }

  std::vector<std::array<std::int32_t, 2>> targets;
  targets.reserve(surviving.size());
  for (std::uint32_t c32 : surviving) {
    const std::int64_t c = c32;
    std::int64_t first = 2 * c;
    if (2 * c >= n) first = config.kind() == MapKind::Doubling ? 2 * c - n : 2 * n - 2 * c - 2;
    targets.push_back({local[static_cast<std::size_t>(first)],
                       local[static_cast<std::size_t>(first + 1)]});
  }
  return TransferMatrix(config.kind(), s, std::move(surviving), std::move(targets));
}

EscapeResult escape_rate(const TransferMatrix& matrix, double tol, std::size_t max_iter) {
  if (!(tol > 0)) throw std::invalid_argument("escape_rate: tol must be positive");
  EscapeResult out;
  const std::size_t n = matrix.size();
  if (n == 0 || matrix.is_nilpotent()) {
    out.nu = 0.0;
    out.gamma = std::numeric_limits<double>::infinity();
    out.escape_in_finite_time = true;
    return out;
  }
  bool closed = true;
  for (std::size_t i = 0; i < n && closed; ++i) closed = matrix.row_sum(i) == 1.0;
  if (closed) return out;  // stochastic: nu = 1 exactly

  // The spectral radius of a reducible matrix is the largest one among its
  // irreducible diagonal blocks.
  const auto [component, count] = strongly_connected_components(matrix);
  std::vector<std::vector<std::uint32_t>> members(count);
  for (std::size_t i = 0; i < n; ++i) members[component[i]].push_back(static_cast<std::uint32_t>(i));

  BlockResult best;
  for (std::size_t c = 0; c < count; ++c) {
    BlockResult r = block_radius(matrix, members[c], component, tol, max_iter);
    best.iterations += r.iterations;
    if (r.nu > best.nu) {
      best.nu = r.nu;
      best.residual = r.residual;
    }
  }
  out.nu = best.nu;
  out.gamma = best.nu > 0 ? -std::log(best.nu) : std::numeric_limits<double>::infinity();
  out.iterations = best.iterations;
  out.residual = best.residual;
  return out;
}

EscapeResult escape_rate(const ModelConfig& config, unsigned s, double tol, std::size_t max_iter) {
  if (!config.has_holes()) {
    if (s < 1 || s > kMaxTransferScale) throw ConfigError("transfer matrix scale out of range");
    return EscapeResult{};
  }
  return escape_rate(build_transfer_matrix(config, s), tol, max_iter);
}

double escape_asymptotic(const OrbitClassification& c) {
  switch (c.orbit_class) {
    case OrbitClass::Running:
      return 2.0 * (1.0 - std::ldexp(1.0, -static_cast<int>(c.period)));
    case OrbitClass::Standing:
      return 2.0 * (1.0 - std::ldexp(1.0, -static_cast<int>(c.period / 2)));
    case OrbitClass::NonPeriodic:
      return 2.0;
    case OrbitClass::DyadicPreimage:
      break;
  }
  throw std::invalid_argument("escape_asymptotic: no escape law for dyadic classes");
}

double EscapeScan::mean_arithmetic() const {
  double total = 0.0;
  for (const auto& r : results) total += r.gamma;
  return results.empty() ? 0.0 : total / static_cast<double>(results.size());
}

double EscapeScan::reference_2h() const { return std::ldexp(2.0, -static_cast<int>(s)); }

EscapeScan escape_scan(MapKind kind, Placement placement, unsigned s, double tol) {
  if (placement == Placement::General) {
    throw ConfigError("escape_scan: choose symmetric or non-symmetric placement");
  }
  if (s < 1 || s > kMaxTransferScale) throw ConfigError("escape_scan: scale out of range");
  const std::size_t count = markov_position_count(s);
  EscapeScan scan{kind, placement, s, std::vector<EscapeResult>(count)};
  detail::parallel_for(
      count,
      [&](std::size_t i) {
        scan.results[i] = escape_rate(markov_position(kind, placement, s, i), s, tol);
      },
      8);
  return scan;
}

std::vector<DeviationRow> deviation_report(unsigned s, double tol) {
  const ModelFamily family{MapKind::Doubling, Placement::Symmetric};
  const PositionScan positions = scan_positions(family.kind, family.placement, s);
  const EscapeScan escape = escape_scan(family.kind, family.placement, s, tol);
  const Rational mean_D = positions.mean();
  const double mean_gamma = escape.mean_arithmetic();
  const Rational h = pow2_inverse(s);

  std::vector<DeviationRow> rows(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    DeviationRow& row = rows[i];
    row.index = i;
    row.config = positions.config(i);
    row.D = positions.D(i);
    row.D_deviation = row.D - mean_D;
    row.gamma = escape.results[i].gamma;
    row.gamma_deviation = row.gamma - mean_gamma;
    row.dominant = dominant_periodic_point(family.kind, row.config.a1(), row.config.a2());
    if (row.dominant) {
      const Rational& x = row.dominant->point;
      LimitMode mode = LimitMode::Interior;
      if (x == row.config.a1()) mode = LimitMode::FixedLeftEndpoint;
      if (x == row.config.a2()) mode = LimitMode::FixedRightEndpoint;
      row.classification = classify(family, x, mode);
      const Rational J = small_hole_factor(family, row.classification);
      row.predicted_D_deviation = h * (J - 1);
      row.predicted_gamma_deviation =
          h.to_double() * (escape_asymptotic(row.classification) - 2.0);
    }
    row.opposite_signs = row.D_deviation.sign() * (row.gamma_deviation > 0 ? 1 : -1) < 0 &&
                         row.gamma_deviation != 0.0;
  }
  return rows;
}

}  // namespace holediff

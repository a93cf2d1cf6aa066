#include "holediff/periodic_orbits.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>

#include "holediff/diffusion.hpp"
#include "holediff/error.hpp"

namespace holediff {

namespace {

using u64 = std::uint64_t;

const Rational kHalf(1, 2);

// Cycle data of k/d under the reduced map, iterating integer numerators.
struct CycleInfo {
  unsigned period = 0;
  unsigned reversals = 0;    // cycle points on the decreasing tent branch
  unsigned mirror_step = 0;  // first q >= 1 with M^q x = 1 - x, 0 if none
};

template <typename Int>
Int step_numerator(MapKind kind, const Int& k, const Int& d) {
  const Int twice = k + k;
  if (twice < d) return twice;
  if (kind == MapKind::Doubling) return twice - d;  // keeps k = d fixed
  return d + d - twice;
}

template <typename Int>
std::optional<CycleInfo> cycle_info(MapKind kind, const Int& k0, const Int& d, unsigned cap) {
  const Int mirror = d - k0;
  CycleInfo info;
  Int k = k0;
  for (unsigned j = 1; j <= cap; ++j) {
    if (kind == MapKind::Tent && k + k >= d) ++info.reversals;
    k = step_numerator(kind, k, d);
    if (k == k0) {
      info.period = j;
      return info;
    }
    if (info.mirror_step == 0 && k == mirror) info.mirror_step = j;
  }
  return std::nullopt;
}

std::optional<CycleInfo> cycle_info(MapKind kind, const Rational& x, unsigned cap) {
  if (x < 0 || x > 1) throw DomainError("point " + x.str() + " outside [0,1]");
  if (x.den().fits_ulong_p() && x.den() < (mpz_class(1) << 62)) {
    return cycle_info<u64>(kind, x.num().get_ui(), x.den().get_ui(), cap);
  }
  return cycle_info<mpz_class>(kind, x.num(), x.den(), cap);
}

u64 mask_bits(unsigned p) { return p >= 64 ? ~u64{0} : (u64{1} << p) - 1; }

u64 rotate(u64 r, unsigned by, unsigned p) {
  by %= p;
  if (by == 0) return r;
  return ((r << by) | (r >> (p - by))) & mask_bits(p);
}

// r/(2^p - 1) has minimal doubling period p iff its p-bit word has no
// smaller rotational symmetry.
bool has_minimal_period(u64 r, unsigned p) {
  for (unsigned d = 1; d < p; ++d) {
    if (p % d == 0 && rotate(r, d, p) == r) return false;
  }
  return true;
}

// Integer range [ceil(lo d), floor(hi d)] of numerators k with lo <= k/d <= hi.
std::pair<mpz_class, mpz_class> numerator_range(const Rational& lo, const Rational& hi,
                                                const mpz_class& d) {
  mpz_class first;
  mpz_class last;
  mpz_class lo_scaled = lo.num() * d;
  mpz_cdiv_q(first.get_mpz_t(), lo_scaled.get_mpz_t(), lo.den().get_mpz_t());
  mpz_class hi_scaled = hi.num() * d;
  mpz_fdiv_q(last.get_mpz_t(), hi_scaled.get_mpz_t(), hi.den().get_mpz_t());
  if (first < 0) first = 0;
  if (last > d) last = d;
  return {first, last};
}

// Calls fn(k, d, info) for every k/d in [lo, hi] with d = 2^p + sign whose
// minimal period is exactly p.
template <typename Fn>
void visit_period(MapKind kind, unsigned p, int sign, const Rational& lo, const Rational& hi,
                  Fn&& fn) {
  const u64 d = (u64{1} << p) + static_cast<u64>(static_cast<std::int64_t>(sign));
  auto [first, last] = numerator_range(lo, hi, mpz_class(static_cast<unsigned long>(d)));
  for (u64 k = first.get_ui(); first <= last && k <= last.get_ui(); ++k) {
    if (kind == MapKind::Doubling && sign < 0) {
      // x = 1 is the doubling map's second fixed point.
      if ((k == d && p != 1) || !has_minimal_period(k, p)) continue;
      CycleInfo info{p, 0, 0};
      if (p % 2 == 0 && rotate(k, p / 2, p) == (~k & mask_bits(p))) info.mirror_step = p / 2;
      fn(k, d, info);
      continue;
    }
    const auto info = cycle_info<u64>(kind, k, d, p);
    if (info && info->period == p) fn(k, d, *info);
  }
}

// Every periodic point of minimal period p in [lo, hi], with its cycle data.
template <typename Fn>
void visit_periodic_points(MapKind kind, unsigned p, const Rational& lo, const Rational& hi,
                           Fn&& fn) {
  visit_period(kind, p, -1, lo, hi, fn);
  if (kind == MapKind::Tent) {
    // Tent cycles with an odd number of reversals satisfy x (2^p + 1) in Z.
    visit_period(kind, p, +1, lo, hi, [&](u64 k, u64 d, const CycleInfo& info) {
      if (k != 0) fn(k, d, info);
    });
  }
}

Rational point_of(u64 k, u64 d) {
  return Rational(mpz_class(static_cast<unsigned long>(k)), mpz_class(static_cast<unsigned long>(d)));
}

void check_period_bound(unsigned p_max) {
  if (p_max < 1 || p_max > kMaxEnumerationPeriod) {
    throw DomainError("maximal period " + std::to_string(p_max) + " outside [1, " +
                      std::to_string(kMaxEnumerationPeriod) + "]");
  }
}

Rational pow2(unsigned e) { return Rational(mpz_class(1) << e, 1); }

// 1 + 1/(1 - 2^-p) = (2^(p+1) - 1)/(2^p - 1).
Rational pinned_running_factor(unsigned p) {
  const Rational q = pow2(p);
  return (2 * q - 1) / (q - 1);
}

LimitMode boundary_mode(const Rational& x, const Rational& lo, const Rational& hi) {
  if (x == lo) return LimitMode::FixedLeftEndpoint;
  if (x == hi) return LimitMode::FixedRightEndpoint;
  return LimitMode::Interior;
}

OrbitClassification make_class(OrbitClass c, unsigned period, unsigned return_period,
                               unsigned n, LimitMode mode) {
  OrbitClassification out;
  out.orbit_class = c;
  out.period = period;
  out.return_period = return_period;
  out.dyadic_exponent = n;
  out.limit_mode = mode;
  return out;
}

OrbitClassification classify_symmetric(const std::optional<CycleInfo>& info, LimitMode mode) {
  if (!info) return make_class(OrbitClass::NonPeriodic, 0, 0, 0, mode);
  const bool standing = mode == LimitMode::Interior && info->mirror_step != 0;
  return make_class(standing ? OrbitClass::Standing : OrbitClass::Running, info->period,
                    info->period, 0, mode);
}

OrbitClassification classify_pinned(MapKind kind, const Rational& x,
                                    const std::optional<CycleInfo>& info, LimitMode mode) {
  if (info) {
    const bool one_sided = mode != LimitMode::Interior;
    const bool reversing = info->reversals % 2 == 1;
    const unsigned rp = (one_sided && reversing) ? 2 * info->period : info->period;
    return make_class(OrbitClass::Running, info->period, rp, 0, mode);
  }
  if (x.is_dyadic()) {
    // Under the doubling map the point itself must be inside [a3, a4).
    if (kind == MapKind::Doubling && mode == LimitMode::FixedRightEndpoint) {
      return make_class(OrbitClass::NonPeriodic, 0, 0, 0, mode);
    }
    return make_class(OrbitClass::DyadicPreimage, 0, 0, x.dyadic_exponent(), mode);
  }
  return make_class(OrbitClass::NonPeriodic, 0, 0, 0, mode);
}

[[noreturn]] void inconsistent(const OrbitClassification& c, ModelFamily f) {
  throw std::invalid_argument("class " + std::string(to_string(c.orbit_class)) +
                              " is not produced by " + std::string(to_string(f.kind)) + "/" +
                              std::string(to_string(f.placement)) + " holes");
}

struct GroupKey {
  OrbitClass c;
  unsigned period;
  unsigned length;
  Rational J;
  auto operator<=>(const GroupKey& o) const {
    if (auto r = std::tie(c, period, length) <=> std::tie(o.c, o.period, o.length); r != 0) {
      return r;
    }
    return J <=> o.J;
  }
  bool operator==(const GroupKey&) const = default;
};

class ExpansionBuilder {
 public:
  ExpansionBuilder(ModelFamily family, Rational baseline, bool collect)
      : family_(family), baseline_(std::move(baseline)), collect_(collect) {}

  void add(const Rational& x, const OrbitClassification& c, unsigned length) {
    const Rational J = small_hole_factor(family_, c);
    const unsigned period =
        c.orbit_class == OrbitClass::DyadicPreimage ? c.dyadic_exponent : c.period;
    ++groups_[GroupKey{c.orbit_class, period, length, J}];
    if (collect_) terms_.push_back({x, c, length, J});
  }

  void finish(ExpansionResult& out) {
    Rational correction;
    for (const auto& [key, count] : groups_) {
      correction += Rational(static_cast<long>(count)) * (key.J - baseline_);
      out.groups.push_back({key.c, key.period, key.length, count, key.J});
    }
    out.approximation = baseline_ + correction;
    auto weight = [this](const Rational& J) { return (J - baseline_).abs(); };
    std::stable_sort(out.groups.begin(), out.groups.end(),
                     [&](const ExpansionGroup& a, const ExpansionGroup& b) {
                       return weight(a.J) > weight(b.J);
                     });
    std::stable_sort(terms_.begin(), terms_.end(),
                     [&](const ExpansionTerm& a, const ExpansionTerm& b) {
                       if (weight(a.J) != weight(b.J)) return weight(a.J) > weight(b.J);
                       return a.point < b.point;
                     });
    out.terms = std::move(terms_);
  }

 private:
  ModelFamily family_;
  Rational baseline_;
  bool collect_;
  std::map<GroupKey, std::size_t> groups_;
  std::vector<ExpansionTerm> terms_;
};

}  // namespace

std::string_view to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::Running:
      return "running";
    case OrbitClass::Standing:
      return "standing";
    case OrbitClass::DyadicPreimage:
      return "dyadic";
    case OrbitClass::NonPeriodic:
      return "nonperiodic";
  }
  return "?";
}

std::string_view to_string(LimitMode m) {
  switch (m) {
    case LimitMode::Interior:
      return "center";
    case LimitMode::FixedLeftEndpoint:
      return "fix-left";
    case LimitMode::FixedRightEndpoint:
      return "fix-right";
  }
  return "?";
}

LimitMode parse_limit_mode(std::string_view text) {
  if (text == "center" || text == "centre" || text == "interior") return LimitMode::Interior;
  if (text == "fix-left" || text == "left") return LimitMode::FixedLeftEndpoint;
  if (text == "fix-right" || text == "right") return LimitMode::FixedRightEndpoint;
  throw ConfigError("unknown limit mode '" + std::string(text) + "'");
}

std::vector<PeriodicPoint> enumerate_periodic_points(unsigned p_max) {
  auto out = enumerate_periodic_points(MapKind::Doubling, p_max, Rational(0), Rational(1));
  std::erase_if(out, [](const PeriodicPoint& pp) { return pp.point == 1; });
  return out;
}

std::vector<PeriodicPoint> enumerate_periodic_points(MapKind kind, unsigned p_max,
                                                     const Rational& lo, const Rational& hi) {
  check_period_bound(p_max);
  const double width = std::max(0.0, (hi - lo).to_double());
  if (width * static_cast<double>(u64{1} << (p_max + 1)) > static_cast<double>(u64{1} << 26)) {
    throw ResourceLimitError("enumerate_periodic_points: more than 2^26 candidate points");
  }
  std::vector<PeriodicPoint> out;
  for (unsigned p = 1; p <= p_max; ++p) {
    const std::size_t begin = out.size();
    visit_periodic_points(kind, p, lo, hi, [&](u64 k, u64 d, const CycleInfo&) {
      out.push_back({point_of(k, d), p});
    });
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(begin), out.end(),
              [](const PeriodicPoint& a, const PeriodicPoint& b) { return a.point < b.point; });
  }
  return out;
}

std::optional<unsigned> minimal_period(MapKind kind, const Rational& x, unsigned cap) {
  const auto info = cycle_info(kind, x, cap);
  if (!info) return std::nullopt;
  return info->period;
}

std::optional<PeriodicPoint> dominant_periodic_point(MapKind kind, const Rational& lo,
                                                     const Rational& hi, unsigned max_period) {
  max_period = std::min(max_period, 60u);
  if (hi < lo) return std::nullopt;
  for (unsigned p = 1; p <= max_period; ++p) {
    std::optional<PeriodicPoint> best;
    auto consider = [&](u64 k, u64 d, const CycleInfo&) {
      Rational x = point_of(k, d);
      if (!best || x < best->point) best = PeriodicPoint{std::move(x), p};
    };
    if (kind == MapKind::Doubling) {
      // Numerators ascend, so the first hit is the smallest point.
      const u64 d = (u64{1} << p) - 1;
      auto [first, last] = numerator_range(lo, hi, mpz_class(static_cast<unsigned long>(d)));
      for (u64 k = first.get_ui(); first <= last && k <= last.get_ui(); ++k) {
        if (k < d && has_minimal_period(k, p)) {
          best = PeriodicPoint{point_of(k, d), p};
          break;
        }
      }
    } else {
      visit_periodic_points(kind, p, lo, hi, consider);
    }
    if (best) return best;
  }
  return std::nullopt;
}

OrbitClassification classify(ModelFamily family, const Rational& x, LimitMode mode,
                             unsigned cap) {
  const auto info = cycle_info(family.kind, x, cap);
  switch (family.placement) {
    case Placement::Symmetric:
      return classify_symmetric(info, mode);
    case Placement::NonSymmetricLeftAtZero:
      return classify_pinned(family.kind, x, info, mode);
    case Placement::General:
      break;
  }
  throw ConfigError("orbit classification needs symmetric or non-symmetric placement");
}

Rational small_hole_factor(ModelFamily family, const OrbitClassification& c) {
  if (family.placement == Placement::General) {
    throw ConfigError("no small-hole law for general placement");
  }
  const bool symmetric = family.placement == Placement::Symmetric;
  const bool tent = family.kind == MapKind::Tent;
  switch (c.orbit_class) {
    case OrbitClass::Running: {
      if (c.period == 0) inconsistent(c, family);
      if (symmetric) {
        if (tent) return 1;
        const Rational q = pow2(c.period);
        return (q + 1) / (q - 1);
      }
      return pinned_running_factor(tent ? c.return_period : c.period);
    }
    case OrbitClass::Standing: {
      if (!symmetric || c.period == 0) inconsistent(c, family);
      if (tent) return 1;
      if (c.period % 2 != 0) inconsistent(c, family);
      const Rational q = pow2(c.period / 2);
      return (q - 1) / (q + 1);
    }
    case OrbitClass::DyadicPreimage: {
      if (symmetric) inconsistent(c, family);
      const unsigned n = c.dyadic_exponent;
      if (tent && c.limit_mode != LimitMode::Interior) return 2 - pow2_inverse(n);
      return 2 - 2 * pow2_inverse(n);
    }
    case OrbitClass::NonPeriodic:
      return symmetric ? 1 : 2;
  }
  inconsistent(c, family);
}

ExpansionResult po_expansion(const ModelConfig& config, unsigned max_length, bool collect_terms) {
  check_period_bound(max_length);
  if (config.placement() == Placement::General) {
    throw ConfigError("po_expansion: general placement has no periodic-orbit expansion");
  }
  if (!config.has_holes() || !config.markov_scale()) {
    throw ConfigError("po_expansion: holes must have dyadic endpoints");
  }
  const ModelFamily family{config.kind(), config.placement()};
  const bool symmetric = config.placement() == Placement::Symmetric;
  const Rational lo = symmetric ? config.a1() : config.a3();
  const Rational hi = symmetric ? config.a2() : config.a4();
  const Rational h = config.hole_size();

  ExpansionResult out;
  out.max_length = max_length;
  out.exact = diffusion_coefficient(config).D;
  ExpansionBuilder builder(family, Rational(symmetric ? 1 : 2), collect_terms);

  for (unsigned p = 1; p <= max_length; ++p) {
    visit_periodic_points(config.kind(), p, lo, hi, [&](u64 k, u64 d, const CycleInfo& info) {
      const Rational x = point_of(k, d);
      const LimitMode mode = boundary_mode(x, lo, hi);
      const OrbitClassification c = symmetric ? classify_symmetric(info, mode)
                                              : classify_pinned(config.kind(), x, info, mode);
      // Standing orbits enter below with modified length mirror_step.
      if (c.orbit_class == OrbitClass::Running) builder.add(x, c, p);
    });
  }

  if (symmetric) {
    // M^q x = 1 - x forces x (2^q + 1) in Z for the doubling map; the tent
    // map also allows x (2^q - 1) in Z.
    for (unsigned q = 1; q <= max_length; ++q) {
      for (int sign : {+1, -1}) {
        if (sign < 0 && config.kind() == MapKind::Doubling) continue;
        const u64 d = (u64{1} << q) + static_cast<u64>(static_cast<std::int64_t>(sign));
        auto [first, last] = numerator_range(lo, hi, mpz_class(static_cast<unsigned long>(d)));
        for (u64 k = first.get_ui(); first <= last && k <= last.get_ui(); ++k) {
          const Rational x = point_of(k, d);
          if (x == lo || x == hi) continue;
          const auto info = cycle_info<u64>(config.kind(), k, d, 4 * q + 4);
          if (!info || info->mirror_step != q) continue;
          builder.add(x, classify_symmetric(info, LimitMode::Interior), q);
        }
      }
    }
  } else {
    for (unsigned n = 0; n <= max_length; ++n) {
      const mpz_class d = mpz_class(1) << n;
      auto [first, last] = numerator_range(lo, hi, d);
      for (mpz_class i = first; i <= last; ++i) {
        if (n > 0 && mpz_even_p(i.get_mpz_t())) continue;
        const Rational x(i, d);
        if (x.is_zero()) continue;
        // x = 1 is a fixed point of the doubling map, counted as running above.
        if (config.kind() == MapKind::Doubling && x == 1) continue;
        const OrbitClassification c =
            classify_pinned(config.kind(), x, std::nullopt, boundary_mode(x, lo, hi));
        if (c.orbit_class == OrbitClass::DyadicPreimage) builder.add(x, c, n);
      }
    }
  }

  builder.finish(out);
  out.approximation *= h;
  out.residual = (out.approximation - out.exact).abs();
  return out;
}

std::vector<AsymptoticSample> asymptotic_scan(ModelFamily family, const Rational& point,
                                              LimitMode mode,
                                              const std::vector<Rational>& h_values) {
  const Rational J = small_hole_factor(family, classify(family, point, mode));
  const bool symmetric = family.placement == Placement::Symmetric;
  const Rational range_lo = symmetric ? Rational(0) : kHalf;
  const Rational range_hi = symmetric ? kHalf : Rational(1);

  std::vector<AsymptoticSample> out;
  out.reserve(h_values.size());
  for (const Rational& h : h_values) {
    if (h <= 0) throw ConfigError("asymptotic_scan: hole sizes must be positive");
    Rational left = point;
    if (mode == LimitMode::Interior) left = point - h / 2;
    if (mode == LimitMode::FixedRightEndpoint) left = point - h;
    const Rational right = left + h;
    if (left < range_lo || right > range_hi) {
      throw ConfigError("asymptotic_scan: hole [" + left.str() + ", " + right.str() +
                        "] leaves [" + range_lo.str() + ", " + range_hi.str() + "]");
    }
    ModelConfig config = symmetric ? ModelConfig::symmetric(family.kind, left, right)
                                   : ModelConfig::non_symmetric(family.kind, h, left);
    Rational D = diffusion_coefficient(config).D;
    out.push_back({h, std::move(config), std::move(D), J, J * h});
  }
  return out;
}

}  // namespace holediff

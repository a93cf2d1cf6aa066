#include "holediff/orbit.hpp"

#include <string>
#include <unordered_map>

#include "holediff/error.hpp"

namespace holediff {

namespace {

struct MpzHash {
  std::size_t operator()(const mpz_class& z) const noexcept {
    if (z.get_mpz_t()->_mp_size == 0) return 0;
    std::size_t h = static_cast<std::size_t>(mpz_getlimbn(z.get_mpz_t(), 0));
    return h * 0x9E3779B97F4A7C15ULL ^ mpz_size(z.get_mpz_t());
  }
};

}  // namespace

const Rational& OrbitDecomposition::at(std::size_t k) const {
  if (k < preperiodic.size()) return preperiodic[k];
  return cycle[(k - preperiodic.size()) % cycle.size()];
}

OrbitDecomposition decompose_orbit(MapKind kind, const Rational& x, std::size_t limit) {
  if (x < 0 || x > 1) throw DomainError("decompose_orbit: point " + x.str() + " outside [0,1]");

  // Every iterate of k/q is again of the form k'/q with 0 <= k' <= q.
  const mpz_class q = x.den();
  const mpz_class twice_q = 2 * q;
  mpz_class k = x.num();

  std::vector<mpz_class> trajectory;
  std::unordered_map<mpz_class, std::size_t, MpzHash> seen;
  while (true) {
    auto [it, inserted] = seen.try_emplace(k, trajectory.size());
    if (!inserted) {
      const std::size_t start = it->second;
      OrbitDecomposition out;
      out.preperiodic.reserve(start);
      out.cycle.reserve(trajectory.size() - start);
      for (std::size_t i = 0; i < trajectory.size(); ++i) {
        (i < start ? out.preperiodic : out.cycle).emplace_back(trajectory[i], q);
      }
      return out;
    }
    if (trajectory.size() >= limit) {
      throw ResourceLimitError("decompose_orbit: orbit of " + x.str() + " longer than " +
                               std::to_string(limit));
    }
    trajectory.push_back(k);

    mpz_class next = 2 * k;
    if (next >= q) {
      if (kind == MapKind::Doubling) {
        next -= q;  // x = 1 stays fixed: 2q - q = q
      } else {
        next = twice_q - next;
      }
    }
    k = std::move(next);
  }
}

}  // namespace holediff

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace clonevet::testkit {

std::pair<std::int64_t, std::int64_t> oracle_overlap(const std::vector<std::string>& a,
                                                     const std::vector<std::string>& b) {
  std::vector<std::string> pool = b;
  std::int64_t shared = 0;
  for (const auto& t : a) {
    auto it = std::find(pool.begin(), pool.end(), t);
    if (it != pool.end()) {
      ++shared;
      pool.erase(it);
    }
  }
  const std::int64_t den = static_cast<std::int64_t>(std::max(a.size(), b.size()));
  if (den == 0) return {0, 1};
  return {shared, den};
}

double oracle_z(double confidence) {
  const double tail = (1.0 - confidence) / 2.0;
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2.0;
    // upper tail probability of N(0,1) at mid
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > tail)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2.0;
}

std::int64_t oracle_cochran(double confidence, double margin,
                            std::optional<std::int64_t> population) {
  const double z = oracle_z(confidence);
  // n0 is rounded up before the finite-population correction.
  const double n0 = std::ceil(z * z * 0.25 / (margin * margin) - 1e-9);
  if (!population) return static_cast<std::int64_t>(n0);
  const double N = static_cast<double>(*population);
  const double n = std::ceil(n0 / (1.0 + (n0 - 1.0) / N) - 1e-9);
  return std::min(static_cast<std::int64_t>(n), *population);
}

std::optional<bool> oracle_majority(const std::vector<bool>& votes) {
  int yes = 0;
  for (bool v : votes) yes += v ? 1 : 0;
  const int no = static_cast<int>(votes.size()) - yes;
  if (yes > no) return true;
  if (no > yes) return false;
  return std::nullopt;
}

}  // namespace clonevet::testkit

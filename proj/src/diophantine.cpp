#include "skewlab/diophantine.hpp"

#include <cmath>
#include <limits>

#include "skewlab/error.hpp"

namespace skewlab {

namespace {
// |omega - p/q| below this counts as an exact rational
constexpr long double kRationalTolerance = 1e-15L;
}

ContinuedFraction continued_fraction(double omega, int depth) {
  if (!(omega > 0.0 && omega < 1.0)) throw Error(ErrorKind::Argument, "continued_fraction needs 0 < omega < 1");
  if (depth < 1) throw Error(ErrorKind::Argument, "continued_fraction needs depth >= 1");

  ContinuedFraction cf;
  cf.omega = omega;
  const long double w = omega;

  // Remainders r_k = q_k w - p_k drive the quotients: a_{k+1} = floor(-r_{k-1} / r_k).
  std::int64_t p_prev = 1, q_prev = 0, p = 0, q = 1;
  long double r_prev = -1.0L, r = w;
  for (int k = 0; k < depth; ++k) {
    const long double ratio = -r_prev / r;
    if (!(ratio < static_cast<long double>(std::numeric_limits<std::int64_t>::max() / 4))) {
      cf.terminating = true;
      break;
    }
    const auto a = static_cast<std::int64_t>(std::floor(ratio));
    const std::int64_t p_next = a * p + p_prev;
    const std::int64_t q_next = a * q + q_prev;
    cf.quotients.push_back(a);
    cf.convergents.push_back({p_next, q_next});
    p_prev = p, q_prev = q, p = p_next, q = q_next;

    const long double r_next = static_cast<long double>(q) * w - static_cast<long double>(p);
    r_prev = r;
    r = r_next;
    if (std::fabs(r) <= kRationalTolerance * static_cast<long double>(q)) {
      cf.terminating = true;
      break;
    }
  }
  return cf;
}

Convergent best_approximant(const ContinuedFraction& cf, std::int64_t q_max) {
  Convergent best{static_cast<std::int64_t>(std::floor(cf.omega)), 1};
  for (const Convergent& c : cf.convergents) {
    if (c.q > q_max) break;
    best = c;
  }
  return best;
}

double dist_to_integer(long double t) {
  return static_cast<double>(std::fabs(t - std::nearbyint(t)));
}

DiophantineEstimate diophantine_check(const ContinuedFraction& cf, double alpha, std::int64_t n_max) {
  if (n_max < 2) throw Error(ErrorKind::Argument, "diophantine_check needs n_max >= 2");
  if (!(alpha > 1.0)) throw Error(ErrorKind::Argument, "diophantine_check needs alpha > 1");
  DiophantineEstimate out{std::numeric_limits<double>::infinity(), 0};
  const long double w = cf.omega;
  for (std::int64_t n = 2; n <= n_max; ++n) {
    const double value = dist_to_integer(static_cast<long double>(n) * w) * static_cast<double>(n) *
                         std::pow(std::log(static_cast<double>(n)), alpha);
    if (value < out.c_omega_estimate) out = {value, n};
  }
  return out;
}

}  // namespace skewlab

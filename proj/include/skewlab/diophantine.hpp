#pragma once

#include <cstdint>
#include <vector>

namespace skewlab {

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
};

/// omega = [0; a_1, a_2, ...]. convergents[k] = p_{k+1}/q_{k+1} matches
/// quotients[k]; the trivial 0/1 approximant is not listed.
struct ContinuedFraction {
  double omega = 0.0;
  std::vector<std::int64_t> quotients;
  std::vector<Convergent> convergents;
  /// The expansion ended (omega is rational to double precision) before the
  /// requested depth.
  bool terminating = false;
};

ContinuedFraction continued_fraction(double omega, int depth);

/// Largest convergent denominator not exceeding q_max (falls back to 0/1).
Convergent best_approximant(const ContinuedFraction& cf, std::int64_t q_max);

/// Distance to the nearest integer.
double dist_to_integer(long double t);

struct DiophantineEstimate {
  double c_omega_estimate = 0.0;
  std::int64_t worst_n = 0;
};

/// min over 2 <= n <= n_max of ||n omega|| n (log n)^alpha.
DiophantineEstimate diophantine_check(const ContinuedFraction& cf, double alpha, std::int64_t n_max);

}  // namespace skewlab

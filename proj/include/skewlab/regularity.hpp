#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "skewlab/driver.hpp"
#include "skewlab/potential.hpp"

namespace skewlab {

struct TrotterCheck {
  double lhs = 0.0;      // |L_n(E) - L_n(E')| on shared samples
  double rhs = 0.0;      // (C_v lambda)^(n-1) |E - E'|, +inf when not representable
  double log_rhs = 0.0;  // -inf when rhs = 0
  bool holds = false;
};

TrotterCheck trotter_check(const DriverFamily& family, const AnalyticPotential& p, double lambda, double energy,
                           double energy2, long long n, long long samples, std::uint64_t seed);

struct ScaleLadder {
  std::vector<long long> n_list;
  std::vector<double> L_values;
  std::vector<double> L_stderr;
  std::vector<double> second_diffs;  // |L_{n_{j+2}} - 2 L_{n_{j+1}} + L_{n_j}|
  std::vector<double> second_diff_stderr;
  bool truncated = false;  // scales beyond n_max were dropped
};

/// |v_{j+2} - 2 v_{j+1} + v_j| for consecutive triples.
std::vector<double> second_differences(std::span<const double> values);

/// L at n_j = n0 2^j, j < levels (capped at n_max), with second differences
/// taken per sample so the sampling noise is paired across scales.
ScaleLadder scale_ladder(const DriverFamily& family, const AnalyticPotential& p, double lambda, double energy,
                         long long n0, int levels, long long samples, std::uint64_t seed,
                         long long n_max = 1 << 16);

struct ModulusFit {
  double c = 0.0;
  double tau = 0.0;
  double r2 = 0.0;
};

/// Least-squares fit of log dL = -c |log t|^tau over pairs (t, dL); tau is
/// chosen on tau_grid and then refined by golden-section search between the
/// neighbours of the best grid point.
ModulusFit modulus_fit(std::span<const std::pair<double, double>> pairs,
                       std::span<const double> tau_grid = {});

}  // namespace skewlab

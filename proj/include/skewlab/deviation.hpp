#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "skewlab/potential.hpp"

namespace skewlab {

struct WeylSumRecord {
  long long k = 1;
  long long N = 1;
  double y = 0.0;
  double omega = 0.0;
  std::complex<double> value;
  double modulus = 0.0;
};

/// sum_{j=1}^N exp(2 pi i k (j y + j(j-1)/2 omega)), phases reduced exactly
/// modulo 1 in 64-bit fixed point.
WeylSumRecord weyl_sum(long long k, double y, double omega, long long N);

struct WeylDifferenceBound {
  double lhs = 0.0;  // |S|^(2^order)
  double rhs = 0.0;
  bool holds = false;
  int order = 1;
};

/// Evaluates both sides of the Weyl-differencing inequality
///   |sum_{x<=P} e(f(x))|^(2^k) <= 2^(2^k - 1) P^(2^k - k - 1)
///       sum_{y_1 < P_1} ... sum_{y_k < P_k} |sum_{x <= P_{k+1}} e(Delta_{y_1..y_k} f(x))|
/// with P_1 = P = N, P_{v+1} = P_v - y_v, by direct enumeration.
WeylDifferenceBound weyl_difference_bound(long long k, double y, double omega, long long N, int order);

struct MinSumBound {
  double lhs = 0.0;
  double rhs = 0.0;
  long long q_used = 1;
  bool holds = false;
};

/// lhs = sum_{x=1}^Q min(P, 1/||omega x + beta||),
/// rhs = 4 (1 + Q/q) (P + q log P), q the largest convergent denominator <= Q
/// (or q_override when positive).
MinSumBound minsum_bound(double omega, long long P, long long Q, double beta, long long q_override = 0);

/// u_n(x) = log ||M_n|| / n on the uniform grid x_i = i / grid_size for the
/// d = 2 skew-shift started at (x_i, y).
std::vector<double> u_n_profile(const AnalyticPotential& p, double lambda, double energy, double omega, double y,
                                long long n, long long grid_size);

struct FourierDecay {
  double sup_k_khat = 0.0;
  long long argmax_k = 0;
  std::vector<std::complex<double>> coeffs;  // k = 0 .. grid/2
};

/// Discrete Fourier coefficients u^(k) = (1/G) sum_i u(x_i) e^{-2 pi i k x_i} and
/// sup over 1 <= |k| <= G/4 of |k| |u^(k)|.
FourierDecay fourier_decay(std::span<const double> profile);

struct DeviationProfile {
  long long n = 0;
  double threshold = 0.0;  // absolute: threshold_factor * L_n_ref
  double fraction = 0.0;
  long long grid_size = 0;  // number of (x, y) samples
  double L_n_ref = 0.0;
  long long exceed_count = 0;
};

/// Samples of u_n over a jittered uniform x-grid times y_samples random values
/// of the remaining coordinates. Row-major: [y][x].
std::vector<double> deviation_samples(const AnalyticPotential& p, double lambda, double energy, double omega,
                                      long long n, long long x_grid, long long y_samples, std::uint64_t seed,
                                      std::size_t d = 2);

DeviationProfile deviation_from_samples(std::span<const double> samples, long long n, double threshold_factor);

/// Fraction of sampled (x, y) with |u_n - L_n| > threshold_factor * L_n.
DeviationProfile deviation_measure(const AnalyticPotential& p, double lambda, double energy, double omega,
                                   long long n, long long x_grid, long long y_samples, double threshold_factor,
                                   std::uint64_t seed, std::size_t d = 2);

struct BirkhoffComparison {
  double birkhoff_avg = 0.0;
  double L_n_ref = 0.0;
  double gap = 0.0;
  double max_shift_jump = 0.0;  // max_j |u_n(T^j xbar) - u_n(T^{j+1} xbar)|
  double shift_bound = 0.0;     // 2 log((2 C_v + 2) lambda) / n
  bool shift_ok = false;
};

/// Ergodic average (1/N) sum_{j=1}^N u_n(T^j (x, y)) against the x-grid mean
/// of u_n at fixed y.
BirkhoffComparison birkhoff_vs_mean(const AnalyticPotential& p, double lambda, double energy, double omega,
                                    double x, double y, long long n, long long N_birkhoff,
                                    long long grid_size = 1024);

}  // namespace skewlab

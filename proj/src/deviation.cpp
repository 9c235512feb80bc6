#include "skewlab/deviation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "skewlab/cocycle.hpp"
#include "skewlab/diophantine.hpp"
#include "skewlab/driver.hpp"
#include "skewlab/error.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// f(x) = k (x y + x(x-1)/2 omega) mod 1 in fixed point, for integer x >= 0.
struct QuadraticPhase {
  TorusFixed ky;
  TorusFixed komega;

  QuadraticPhase(long long k, double y, double omega)
      : ky(static_cast<TorusFixed>(k) * to_fixed(y)), komega(static_cast<TorusFixed>(k) * to_fixed(omega)) {}

  TorusFixed operator()(long long x) const noexcept {
    const auto ux = static_cast<TorusFixed>(x);
    const TorusFixed pairs = (ux % 2 == 0) ? (ux / 2) * (ux - 1) : ux * ((ux - 1) / 2);
    return static_cast<TorusFixed>(x) * ky + pairs * komega;
  }
};

std::complex<double> unit(TorusFixed phase) {
  const double angle = kTwoPi * from_fixed(phase);
  return {std::cos(angle), std::sin(angle)};
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

WeylSumRecord weyl_sum(long long k, double y, double omega, long long N) {
  if (k == 0) throw Error(ErrorKind::Argument, "weyl_sum needs k != 0");
  if (N < 1) throw Error(ErrorKind::Argument, "weyl_sum needs N >= 1");
  const QuadraticPhase f(k, y, omega);
  std::complex<double> sum = 0.0;
  for (long long j = 1; j <= N; ++j) sum += unit(f(j));
  return {k, N, y, omega, sum, std::abs(sum)};
}

WeylDifferenceBound weyl_difference_bound(long long k, double y, double omega, long long N, int order) {
  if (k == 0) throw Error(ErrorKind::Argument, "weyl_difference_bound needs k != 0");
  if (N < 1) throw Error(ErrorKind::Argument, "weyl_difference_bound needs N >= 1");
  if (order < 1 || order > 4) throw Error(ErrorKind::Argument, "weyl_difference_bound needs 1 <= order <= 4");

  const QuadraticPhase f(k, y, omega);
  std::vector<TorusFixed> table(static_cast<std::size_t>(N) + 1);
  for (long long x = 0; x <= N; ++x) table[static_cast<std::size_t>(x)] = f(x);

  std::complex<double> direct = 0.0;
  for (long long x = 1; x <= N; ++x) direct += unit(table[static_cast<std::size_t>(x)]);

  // Enumerate (y_1, ..., y_order); Delta f(x) = sum over subsets S of
  // (-1)^(order - |S|) f(x + sum_S y).
  std::vector<long long> shifts;
  double inner_total = 0.0;
  auto recurse = [&](auto&& self, int level, long long remaining) -> void {
    if (level == order) {
      const std::size_t subsets = std::size_t{1} << order;
      std::complex<double> s = 0.0;
      for (long long x = 1; x <= remaining; ++x) {
        TorusFixed phase = 0;
        for (std::size_t mask = 0; mask < subsets; ++mask) {
          long long offset = 0;
          int bits = 0;
          for (int b = 0; b < order; ++b)
            if (mask & (std::size_t{1} << b)) {
              offset += shifts[static_cast<std::size_t>(b)];
              ++bits;
            }
          const TorusFixed value = table[static_cast<std::size_t>(x + offset)];
          phase += ((order - bits) % 2 == 0) ? value : TorusFixed{0} - value;
        }
        s += unit(phase);
      }
      inner_total += std::abs(s);
      return;
    }
    for (long long h = 0; h < remaining; ++h) {
      shifts.push_back(h);
      self(self, level + 1, remaining - h);
      shifts.pop_back();
    }
  };
  recurse(recurse, 0, N);

  const double power = std::ldexp(1.0, order);  // 2^order
  WeylDifferenceBound out;
  out.order = order;
  out.lhs = std::pow(std::abs(direct), power);
  out.rhs = std::pow(2.0, power - 1.0) * std::pow(static_cast<double>(N), power - (order + 1)) * inner_total;
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

MinSumBound minsum_bound(double omega, long long P, long long Q, double beta, long long q_override) {
  if (P < 2) throw Error(ErrorKind::Argument, "minsum_bound needs P >= 2");
  if (Q < 1) throw Error(ErrorKind::Argument, "minsum_bound needs Q >= 1");

  MinSumBound out;
  const double reduced = omega - std::floor(omega);
  if (q_override > 0) {
    out.q_used = q_override;
  } else if (reduced == 0.0) {
    out.q_used = 1;
  } else {
    out.q_used = best_approximant(continued_fraction(reduced, 60), Q).q;
  }

  const long double w = omega, b = beta;
  for (long long x = 1; x <= Q; ++x) {
    const double dist = dist_to_integer(w * static_cast<long double>(x) + b);
    out.lhs += dist > 0.0 ? std::min(static_cast<double>(P), 1.0 / dist) : static_cast<double>(P);
  }
  const double q = static_cast<double>(out.q_used);
  out.rhs = 4.0 * (1.0 + static_cast<double>(Q) / q) * (static_cast<double>(P) + q * std::log(static_cast<double>(P)));
  out.holds = out.lhs <= out.rhs;
  return out;
}

std::vector<double> u_n_profile(const AnalyticPotential& p, double lambda, double energy, double omega, double y,
                                long long n, long long grid_size) {
  if (grid_size < 16) throw Error(ErrorKind::Argument, "u_n_profile needs grid_size >= 16");
  if (n < 1) throw Error(ErrorKind::Argument, "u_n_profile needs n >= 1");
  std::vector<double> profile(static_cast<std::size_t>(grid_size));
  parallel_for(profile.size(), [&](std::size_t i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid_size);
    const SkewShift driver(SkewShiftParams(2, omega, {x, y}));
    try {
      profile[i] = transfer_product(driver, p, lambda, energy, n).growth_rate();
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (grid index " + std::to_string(i) + ")");
    }
  });
  return profile;
}

FourierDecay fourier_decay(std::span<const double> profile) {
  const std::size_t g = profile.size();
  if (g < 64 || (g & (g - 1)) != 0)
    throw Error(ErrorKind::Argument, "fourier_decay needs a power-of-two grid of at least 64 points");

  std::vector<double> input(profile.begin(), profile.end());
  std::vector<fftw_complex> output(g / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(g), input.data(), output.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  FourierDecay out;
  out.coeffs.resize(g / 2 + 1);
  const double inv = 1.0 / static_cast<double>(g);
  for (std::size_t k = 0; k <= g / 2; ++k) out.coeffs[k] = {output[k][0] * inv, output[k][1] * inv};
  for (std::size_t k = 1; k <= g / 4; ++k) {
    const double value = static_cast<double>(k) * std::abs(out.coeffs[k]);
    if (value > out.sup_k_khat) {
      out.sup_k_khat = value;
      out.argmax_k = static_cast<long long>(k);
    }
  }
  return out;
}

std::vector<double> deviation_samples(const AnalyticPotential& p, double lambda, double energy, double omega,
                                      long long n, long long x_grid, long long y_samples, std::uint64_t seed,
                                      std::size_t d) {
  if (x_grid < 256) throw Error(ErrorKind::Argument, "deviation_measure needs x_grid >= 256");
  if (y_samples < 1) throw Error(ErrorKind::Argument, "deviation_measure needs y_samples >= 1");
  if (n < 1) throw Error(ErrorKind::Argument, "deviation_measure needs n >= 1");
  if (d < 1) throw Error(ErrorKind::Argument, "deviation_measure needs d >= 1");

  // one uniform grid offset per run; stream 0 is reserved for it
  const double offset = CounterRng(seed, 0).uniform();
  std::vector<std::vector<double>> rest(static_cast<std::size_t>(y_samples));
  for (long long s = 0; s < y_samples; ++s)
    rest[static_cast<std::size_t>(s)] = sample_torus_point(d - 1, seed, static_cast<std::uint64_t>(s) + 1);

  const auto nx = static_cast<std::size_t>(x_grid);
  std::vector<double> samples(nx * rest.size());
  parallel_for(samples.size(), [&](std::size_t idx) {
    const std::size_t s = idx / nx, i = idx % nx;
    std::vector<double> point;
    point.reserve(d);
    point.push_back((static_cast<double>(i) + offset) / static_cast<double>(x_grid));
    point.insert(point.end(), rest[s].begin(), rest[s].end());
    const SkewShift driver(SkewShiftParams(d, omega, std::move(point)));
    samples[idx] = transfer_product(driver, p, lambda, energy, n).growth_rate();
  });
  return samples;
}

DeviationProfile deviation_from_samples(std::span<const double> samples, long long n, double threshold_factor) {
  if (samples.empty()) throw Error(ErrorKind::Argument, "no samples");
  DeviationProfile out;
  out.n = n;
  out.grid_size = static_cast<long long>(samples.size());
  double sum = 0.0;
  for (double u : samples) sum += u;
  out.L_n_ref = sum / static_cast<double>(samples.size());
  if (!(out.L_n_ref > 0.0))
    throw Error(ErrorKind::Numeric, "L_n reference is not positive; relative threshold undefined");
  out.threshold = threshold_factor * out.L_n_ref;
  for (double u : samples)
    if (std::abs(u - out.L_n_ref) > out.threshold) ++out.exceed_count;
  out.fraction = static_cast<double>(out.exceed_count) / static_cast<double>(samples.size());
  return out;
}

DeviationProfile deviation_measure(const AnalyticPotential& p, double lambda, double energy, double omega,
                                   long long n, long long x_grid, long long y_samples, double threshold_factor,
                                   std::uint64_t seed, std::size_t d) {
  const auto samples = deviation_samples(p, lambda, energy, omega, n, x_grid, y_samples, seed, d);
  return deviation_from_samples(samples, n, threshold_factor);
}

BirkhoffComparison birkhoff_vs_mean(const AnalyticPotential& p, double lambda, double energy, double omega,
                                    double x, double y, long long n, long long N_birkhoff, long long grid_size) {
  if (N_birkhoff < 1) throw Error(ErrorKind::Argument, "birkhoff_vs_mean needs N_birkhoff >= 1");
  if (n < 1) throw Error(ErrorKind::Argument, "birkhoff_vs_mean needs n >= 1");

  // u_n(T^j xbar) for j = 1..N+1 uses the window theta_{j+1} .. theta_{j+n}
  const SkewShift driver(SkewShiftParams(2, omega, {x, y}));
  const auto theta = driver.phases(2, static_cast<std::size_t>(N_birkhoff + n));
  std::vector<double> diag(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) diag[i] = lambda * p(theta[i]);

  std::vector<double> along(static_cast<std::size_t>(N_birkhoff) + 1);
  for (std::size_t j = 0; j < along.size(); ++j) {
    const std::span<const double> window(diag.data() + j, static_cast<std::size_t>(n));
    along[j] = transfer_product(window, energy).growth_rate();
  }

  BirkhoffComparison out;
  double sum = 0.0;
  for (long long j = 0; j < N_birkhoff; ++j) sum += along[static_cast<std::size_t>(j)];
  out.birkhoff_avg = sum / static_cast<double>(N_birkhoff);

  const auto profile = u_n_profile(p, lambda, energy, omega, y, n, grid_size);
  double total = 0.0;
  for (double u : profile) total += u;
  out.L_n_ref = total / static_cast<double>(profile.size());
  out.gap = std::abs(out.birkhoff_avg - out.L_n_ref);

  for (std::size_t j = 0; j + 1 < along.size(); ++j)
    out.max_shift_jump = std::max(out.max_shift_jump, std::abs(along[j] - along[j + 1]));
  out.shift_bound = 2.0 * std::log((2.0 * p.sup_bound() + 2.0) * lambda) / static_cast<double>(n);
  out.shift_ok = out.max_shift_jump <= out.shift_bound;
  return out;
}

}  // namespace skewlab

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "skewlab/driver.hpp"
#include "skewlab/potential.hpp"

namespace skewlab {

using Matrix2 = std::array<double, 4>;  // row-major [[m0, m1], [m2, m3]]

double spectral_norm(const Matrix2& m) noexcept;
double spectral_norm(const std::array<std::complex<double>, 4>& m) noexcept;

/// Running product A_n ... A_1 of the one-step matrices
///   A_j = [[E - diag_j, -1], [1, 0]]
/// held as exp(log_scale) * m with max|m_ij| = 1 after every step, so that
/// ||m|| stays in [1, 2].
class TransferAccumulator {
 public:
  void push(double diag_value, double energy) noexcept;

  const Matrix2& matrix() const noexcept { return m_; }
  double log_scale() const noexcept { return log_scale_; }
  long long steps() const noexcept { return steps_; }

  /// log ||M_n||.
  double log_norm() const noexcept;
  /// u_n = log ||M_n|| / n.
  double growth_rate() const noexcept;
  /// exp(log_scale) * m; only meaningful while that does not overflow.
  Matrix2 reconstruct() const noexcept;

 private:
  Matrix2 m_{1.0, 0.0, 0.0, 1.0};
  double log_scale_ = 0.0;
  long long steps_ = 0;
};

TransferAccumulator transfer_product(const PhaseDriver& driver, const AnalyticPotential& p,
                                     double lambda, double energy, long long n);

/// Same product over a precomputed diagonal lambda * v(theta_j).
TransferAccumulator transfer_product(std::span<const double> diag, double energy);

struct LyapunovEntry {
  long long n = 0;
  double L_n = 0.0;
  double stderr_ = 0.0;
  long long samples = 0;
};

struct LyapunovCurve {
  std::vector<LyapunovEntry> entries;
  double lambda = 0.0;
  double energy = 0.0;

  /// |L_{2n} - L_n| for consecutive entries with doubled n, if present.
  std::optional<double> cauchy_gap(long long n) const;
};

/// Per-sample u_n at every n in n_list (strictly increasing), one pass per
/// sample. Row s holds sample s, drawn from the counter stream (seed, s).
std::vector<std::vector<double>> sample_growth_rates(const DriverFamily& family, const AnalyticPotential& p,
                                                     double lambda, double energy,
                                                     std::span<const long long> n_list, long long samples,
                                                     std::uint64_t seed);

LyapunovCurve lyapunov_curve(const DriverFamily& family, const AnalyticPotential& p, double lambda,
                             double energy, std::span<const long long> n_list, long long samples,
                             std::uint64_t seed);

struct PositivityRow {
  double energy = 0.0;
  double L_n = 0.0;
  double stderr_ = 0.0;
  double ratio = 0.0;
  bool in_spectrum = true;
};

struct PositivityScan {
  double min_ratio = 0.0;
  double argmin_energy = 0.0;
  double max_ratio = 0.0;
  std::vector<PositivityRow> table;
};

/// L_n(E) / log(lambda) across an energy grid. When spectrum points are
/// supplied, energies farther than 0.05 * lambda from all of them are marked
/// off-spectrum and excluded from min/max (strict mode).
PositivityScan positivity_scan(const DriverFamily& family, const AnalyticPotential& p, double lambda,
                               std::span<const double> energies, long long n, long long samples,
                               std::uint64_t seed, std::span<const double> spectrum = {});

struct ComplexBound {
  double u_n_complex = 0.0;
  double epsilon_est = 0.0;
  double bound = 0.0;
  bool holds = false;
  double argmin_x = 0.0;
};

/// Evaluates (1/n) log ||M_n|| for the cocycle with phases theta_j + i y0 and
/// compares it with log(lambda * eps - 1), where lambda * eps is the infimum
/// of |lambda v(x + i y0) - E| over a dense x-grid.
ComplexBound complex_lower_bound(const PhaseDriver& driver, const AnalyticPotential& p, double lambda,
                                 double energy, double y0, long long n, int x_grid = 4096,
                                 double tolerance = 1e-6);

}  // namespace skewlab

#include "skewlab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "skewlab/error.hpp"
#include "skewlab/parallel.hpp"

namespace skewlab {

double spectral_norm(const Matrix2& m) noexcept {
  const double a = m[0], b = m[1], c = m[2], d = m[3];
  return 0.5 * (std::hypot(a + d, c - b) + std::hypot(a - d, b + c));
}

double spectral_norm(const std::array<std::complex<double>, 4>& m) noexcept {
  const double frob = std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) + std::norm(m[3]);
  const double det = std::abs(m[0] * m[3] - m[1] * m[2]);
  const double disc = std::max(0.0, frob * frob - 4.0 * det * det);
  return std::sqrt(0.5 * (frob + std::sqrt(disc)));
}

void TransferAccumulator::push(double diag_value, double energy) noexcept {
  const double t = energy - diag_value;
  const Matrix2 next{t * m_[0] - m_[2], t * m_[1] - m_[3], m_[0], m_[1]};
  const double scale =
      std::max(std::max(std::abs(next[0]), std::abs(next[1])), std::max(std::abs(next[2]), std::abs(next[3])));
  m_ = {next[0] / scale, next[1] / scale, next[2] / scale, next[3] / scale};
  log_scale_ += std::log(scale);
  ++steps_;
}

double TransferAccumulator::log_norm() const noexcept { return log_scale_ + std::log(spectral_norm(m_)); }

double TransferAccumulator::growth_rate() const noexcept {
  return steps_ == 0 ? 0.0 : log_norm() / static_cast<double>(steps_);
}

Matrix2 TransferAccumulator::reconstruct() const noexcept {
  const double s = std::exp(log_scale_);
  return {s * m_[0], s * m_[1], s * m_[2], s * m_[3]};
}

TransferAccumulator transfer_product(std::span<const double> diag, double energy) {
  TransferAccumulator acc;
  for (std::size_t j = 0; j < diag.size(); ++j) {
    if (!std::isfinite(diag[j]))
      throw Error(ErrorKind::Numeric, "non-finite potential value at step " + std::to_string(j + 1));
    acc.push(diag[j], energy);
  }
  return acc;
}

TransferAccumulator transfer_product(const PhaseDriver& driver, const AnalyticPotential& p, double lambda,
                                     double energy, long long n) {
  if (n < 1) throw Error(ErrorKind::Argument, "transfer_product needs n >= 1");
  if (!(lambda > 0.0)) throw Error(ErrorKind::Argument, "transfer_product needs lambda > 0");
  const std::vector<double> theta = driver.phases(1, static_cast<std::size_t>(n));
  std::vector<double> diag(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) diag[j] = lambda * p(theta[j]);
  return transfer_product(diag, energy);
}

std::optional<double> LyapunovCurve::cauchy_gap(long long n) const {
  const LyapunovEntry* base = nullptr;
  const LyapunovEntry* twice = nullptr;
  for (const auto& e : entries) {
    if (e.n == n) base = &e;
    if (e.n == 2 * n) twice = &e;
  }
  if (base == nullptr || twice == nullptr) return std::nullopt;
  return std::abs(twice->L_n - base->L_n);
}

std::vector<std::vector<double>> sample_growth_rates(const DriverFamily& family, const AnalyticPotential& p,
                                                     double lambda, double energy,
                                                     std::span<const long long> n_list, long long samples,
                                                     std::uint64_t seed) {
  if (n_list.empty()) throw Error(ErrorKind::Argument, "n_list is empty");
  if (samples < 1) throw Error(ErrorKind::Argument, "samples must be >= 1");
  if (!(lambda > 0.0)) throw Error(ErrorKind::Argument, "lambda must be > 0");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) throw Error(ErrorKind::Argument, "every n must be >= 1");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw Error(ErrorKind::Argument, "n_list must be strictly increasing");
  }
  const long long n_max = n_list.back();

  std::vector<std::vector<double>> rates(static_cast<std::size_t>(samples), std::vector<double>(n_list.size()));
  parallel_for(static_cast<std::size_t>(samples), [&](std::size_t s) {
    const auto point = sample_torus_point(family.dimension(), seed, s);
    const auto driver = family.at(point);
    const auto theta = driver->phases(1, static_cast<std::size_t>(n_max));
    TransferAccumulator acc;
    std::size_t next = 0;
    for (long long j = 0; j < n_max; ++j) {
      const double diag = lambda * p(theta[static_cast<std::size_t>(j)]);
      if (!std::isfinite(diag))
        throw Error(ErrorKind::Numeric, "non-finite potential value at step " + std::to_string(j + 1));
      acc.push(diag, energy);
      if (acc.steps() == n_list[next]) rates[s][next++] = acc.growth_rate();
    }
  });
  return rates;
}

namespace {

std::pair<double, double> mean_and_stderr(const std::vector<double>& values) {
  const double count = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / count;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (count - 1.0)) / std::sqrt(count)};
}

}  // namespace

LyapunovCurve lyapunov_curve(const DriverFamily& family, const AnalyticPotential& p, double lambda,
                             double energy, std::span<const long long> n_list, long long samples,
                             std::uint64_t seed) {
  const auto rates = sample_growth_rates(family, p, lambda, energy, n_list, samples, seed);
  LyapunovCurve curve;
  curve.lambda = lambda;
  curve.energy = energy;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    std::vector<double> column(rates.size());
    for (std::size_t s = 0; s < rates.size(); ++s) column[s] = rates[s][i];
    const auto [mean, se] = mean_and_stderr(column);
    curve.entries.push_back({n_list[i], mean, se, samples});
  }
  return curve;
}

PositivityScan positivity_scan(const DriverFamily& family, const AnalyticPotential& p, double lambda,
                               std::span<const double> energies, long long n, long long samples,
                               std::uint64_t seed, std::span<const double> spectrum) {
  if (!(lambda > 1.0)) throw Error(ErrorKind::Argument, "positivity scan needs lambda > 1 (log lambda > 0)");
  if (energies.empty()) throw Error(ErrorKind::Argument, "energy grid is empty");
  const double limit = (p.sup_bound() + 1.0) * lambda;
  for (double e : energies)
    if (std::abs(e) > limit)
      throw Error(ErrorKind::Argument, "energy " + std::to_string(e) + " outside [-(C_v+1) lambda, (C_v+1) lambda]");

  std::vector<double> sorted_spec(spectrum.begin(), spectrum.end());
  std::sort(sorted_spec.begin(), sorted_spec.end());
  auto near_spectrum = [&](double e) {
    if (sorted_spec.empty()) return true;
    const auto it = std::lower_bound(sorted_spec.begin(), sorted_spec.end(), e);
    double dist = std::numeric_limits<double>::infinity();
    if (it != sorted_spec.end()) dist = std::min(dist, *it - e);
    if (it != sorted_spec.begin()) dist = std::min(dist, e - *std::prev(it));
    return dist <= 0.05 * lambda;
  };

  const long long n_list[] = {n};
  const double log_lambda = std::log(lambda);
  PositivityScan scan;
  scan.min_ratio = std::numeric_limits<double>::infinity();
  scan.max_ratio = -std::numeric_limits<double>::infinity();
  for (double e : energies) {
    const auto curve = lyapunov_curve(family, p, lambda, e, n_list, samples, seed);
    const auto& entry = curve.entries.front();
    PositivityRow row{e, entry.L_n, entry.stderr_, entry.L_n / log_lambda, near_spectrum(e)};
    if (row.in_spectrum) {
      if (row.ratio < scan.min_ratio) {
        scan.min_ratio = row.ratio;
        scan.argmin_energy = e;
      }
      scan.max_ratio = std::max(scan.max_ratio, row.ratio);
    }
    scan.table.push_back(row);
  }
  return scan;
}

ComplexBound complex_lower_bound(const PhaseDriver& driver, const AnalyticPotential& p, double lambda,
                                 double energy, double y0, long long n, int x_grid, double tolerance) {
  if (n < 1) throw Error(ErrorKind::Argument, "complex_lower_bound needs n >= 1");
  if (!(y0 > 0.0 && y0 < p.rho() / 5.0))
    throw Error(ErrorKind::StripViolation, "y0 must satisfy 0 < y0 < rho/5");
  if (x_grid < 16) throw Error(ErrorKind::Argument, "x_grid must be >= 16");

  ComplexBound out;
  double inf_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x_grid; ++i) {
    const double x = static_cast<double>(i) / x_grid;
    const double value = std::abs(lambda * p(std::complex<double>(x, y0)) - energy);
    if (value < inf_value) {
      inf_value = value;
      out.argmin_x = x;
    }
  }
  out.epsilon_est = inf_value / lambda;
  if (!(inf_value > 1.0))
    throw PreconditionError("lambda * epsilon = " + std::to_string(inf_value) + " <= 1 at x = " +
                                std::to_string(out.argmin_x),
                            out.argmin_x);
  out.bound = std::log(inf_value - 1.0);

  const auto theta = driver.phases(1, static_cast<std::size_t>(n));
  std::array<std::complex<double>, 4> m{1.0, 0.0, 0.0, 1.0};
  double log_scale = 0.0;
  for (long long j = 0; j < n; ++j) {
    const std::complex<double> t =
        energy - lambda * p(std::complex<double>(theta[static_cast<std::size_t>(j)], y0));
    const std::array<std::complex<double>, 4> next{t * m[0] - m[2], t * m[1] - m[3], m[0], m[1]};
    double scale = 0.0;
    for (const auto& z : next) scale = std::max(scale, std::abs(z));
    for (int k = 0; k < 4; ++k) m[k] = next[k] / scale;
    log_scale += std::log(scale);
  }
  out.u_n_complex = (log_scale + std::log(spectral_norm(m))) / static_cast<double>(n);
  out.holds = out.u_n_complex >= out.bound - tolerance;
  return out;
}

}  // namespace skewlab

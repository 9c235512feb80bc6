#include "skewlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skewlab/cocycle.hpp"
#include "skewlab/error.hpp"

namespace skewlab {

namespace {

struct MeanStd {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStd summarize(std::span<const double> xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return out;
}

struct FitAtTau {
  double c = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

FitAtTau fit_at(std::span<const double> s_log, std::span<const double> y, double tau) {
  double sxy = 0.0, sxx = 0.0;
  std::vector<double> s(s_log.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = std::pow(s_log[i], tau);
    sxy += s[i] * y[i];
    sxx += s[i] * s[i];
  }
  FitAtTau out;
  if (sxx <= 0.0) return out;
  out.c = -sxy / sxx;
  out.sse = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = y[i] + out.c * s[i];
    out.sse += r * r;
  }
  return out;
}

}  // namespace

TrotterCheck trotter_check(const DriverFamily& family, const AnalyticPotential& p, double lambda, double energy,
                           double energy2, long long n, long long samples, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorKind::Argument, "trotter_check needs n >= 1");
  if (samples < 1) throw Error(ErrorKind::Argument, "trotter_check needs samples >= 1");
  const long long n_list[] = {n};
  const auto a = sample_growth_rates(family, p, lambda, energy, n_list, samples, seed);
  const auto b = sample_growth_rates(family, p, lambda, energy2, n_list, samples, seed);
  double diff = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) diff += a[s][0] - b[s][0];

  TrotterCheck out;
  out.lhs = std::abs(diff / static_cast<double>(a.size()));
  const double dE = std::abs(energy - energy2);
  const double base = p.sup_bound() * lambda;
  if (dE == 0.0 || (base == 0.0 && n > 1)) {
    out.log_rhs = -std::numeric_limits<double>::infinity();
  } else {
    out.log_rhs = static_cast<double>(n - 1) * (n > 1 ? std::log(base) : 0.0) + std::log(dE);
  }
  out.rhs = std::exp(out.log_rhs);
  out.holds = out.lhs == 0.0 || std::log(out.lhs) <= out.log_rhs;
  return out;
}

std::vector<double> second_differences(std::span<const double> values) {
  std::vector<double> out;
  for (std::size_t j = 0; j + 2 < values.size(); ++j)
    out.push_back(std::abs(values[j + 2] - 2.0 * values[j + 1] + values[j]));
  return out;
}

ScaleLadder scale_ladder(const DriverFamily& family, const AnalyticPotential& p, double lambda, double energy,
                         long long n0, int levels, long long samples, std::uint64_t seed, long long n_max) {
  if (levels < 1) throw Error(ErrorKind::Argument, "scale_ladder needs levels >= 1");
  if (n0 < 1) throw Error(ErrorKind::Argument, "scale_ladder needs n0 >= 1");
  if (samples < 1) throw Error(ErrorKind::Argument, "scale_ladder needs samples >= 1");

  ScaleLadder out;
  long long n = n0;
  for (int j = 0; j < levels; ++j, n *= 2) {
    if (n > n_max) {
      out.truncated = true;
      break;
    }
    out.n_list.push_back(n);
  }
  if (out.n_list.empty()) return out;

  const auto rates = sample_growth_rates(family, p, lambda, energy, out.n_list, samples, seed);
  const std::size_t levels_kept = out.n_list.size();
  std::vector<double> column(rates.size());
  for (std::size_t j = 0; j < levels_kept; ++j) {
    for (std::size_t s = 0; s < rates.size(); ++s) column[s] = rates[s][j];
    const auto m = summarize(column);
    out.L_values.push_back(m.mean);
    out.L_stderr.push_back(m.stderr_);
  }
  for (std::size_t j = 0; j + 2 < levels_kept; ++j) {
    for (std::size_t s = 0; s < rates.size(); ++s)
      column[s] = rates[s][j + 2] - 2.0 * rates[s][j + 1] + rates[s][j];
    const auto m = summarize(column);
    out.second_diffs.push_back(std::abs(m.mean));
    out.second_diff_stderr.push_back(m.stderr_);
  }
  return out;
}

ModulusFit modulus_fit(std::span<const std::pair<double, double>> pairs, std::span<const double> tau_grid) {
  static constexpr double kDefaultGrid[] = {0.25, 0.5, 0.75, 1.0};
  if (tau_grid.empty()) tau_grid = kDefaultGrid;

  bool all_same = true;
  for (const auto& [t, dl] : pairs)
    if (t != pairs.front().first) all_same = false;
  if (pairs.empty() || all_same) throw Error(ErrorKind::FitUndefined, "modulus_fit: all energy gaps are equal");
  if (pairs.size() < 8) throw Error(ErrorKind::FitUndefined, "modulus_fit needs at least 8 pairs");

  double t_min = std::numeric_limits<double>::infinity(), t_max = 0.0;
  std::vector<double> s_log, y;
  for (const auto& [t, dl] : pairs) {
    if (!(t > 0.0) || !(dl > 0.0))
      throw Error(ErrorKind::FitUndefined, "modulus_fit needs positive energy gaps and Lyapunov differences");
    if (t == 1.0) throw Error(ErrorKind::FitUndefined, "modulus_fit: |log t| vanishes at t = 1");
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
    s_log.push_back(std::abs(std::log(t)));
    y.push_back(std::log(dl));
  }
  if (std::log10(t_max / t_min) < 3.0)
    throw Error(ErrorKind::FitUndefined, "modulus_fit needs energy gaps spanning at least 3 decades");

  std::size_t best = 0;
  FitAtTau best_fit;
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] > 0.0)) throw Error(ErrorKind::Argument, "modulus_fit: tau grid values must be positive");
    const auto f = fit_at(s_log, y, tau_grid[i]);
    if (f.sse < best_fit.sse) {
      best_fit = f;
      best = i;
    }
  }

  std::vector<double> sorted(tau_grid.begin(), tau_grid.end());
  std::sort(sorted.begin(), sorted.end());
  const auto pos = static_cast<std::size_t>(std::find(sorted.begin(), sorted.end(), tau_grid[best]) - sorted.begin());
  double lo = pos > 0 ? sorted[pos - 1] : sorted[pos] / 2.0;
  double hi = pos + 1 < sorted.size() ? sorted[pos + 1] : sorted[pos] * 1.5;
  double tau = tau_grid[best];

  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = fit_at(s_log, y, a).sse, fb = fit_at(s_log, y, b).sse;
  for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = fit_at(s_log, y, a).sse;
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = fit_at(s_log, y, b).sse;
    }
  }
  const double refined = (lo + hi) / 2.0;
  const auto refined_fit = fit_at(s_log, y, refined);
  if (refined_fit.sse < best_fit.sse) {
    best_fit = refined_fit;
    tau = refined;
  }

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double sst = 0.0;
  for (double v : y) sst += (v - mean) * (v - mean);

  ModulusFit out;
  out.c = best_fit.c;
  out.tau = tau;
  out.r2 = sst > 0.0 ? 1.0 - best_fit.sse / sst : (best_fit.sse == 0.0 ? 1.0 : 0.0);
  return out;
}

}  // namespace skewlab

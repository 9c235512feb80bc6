#include "skewlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "skewlab/driver.hpp"
#include "skewlab/error.hpp"
#include "skewlab/parallel.hpp"

namespace skewlab {

namespace {

double wrap_diff(double a, double b) {
  double d = a - b;
  d -= std::round(d);
  return d;
}

/// Sign change of f in [lo, hi]; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

bool AdmissibleSet::contains(double e) const noexcept {
  return std::any_of(intervals.begin(), intervals.end(), [e](const auto& iv) { return iv.first <= e && e <= iv.second; });
}

double AdmissibleSet::total_length() const noexcept {
  double total = 0.0;
  for (const auto& [a, b] : intervals) total += b - a;
  return total;
}

AdmissibleSet admissible_energies(const AnalyticPotential& p, double delta, int grid) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Argument, "admissible_energies needs delta > 0");
  if (grid < 64) throw Error(ErrorKind::Argument, "admissible_energies needs grid >= 64");

  AdmissibleSet out;
  out.delta = delta;
  const auto g = static_cast<std::size_t>(grid);
  const double h = 1.0 / grid;
  std::vector<char> good(g);
  bool any_good = false, all_good = true;
  for (std::size_t i = 0; i < g; ++i) {
    good[i] = std::abs(p.derivative(static_cast<double>(i) * h)) >= delta;
    any_good = any_good || good[i];
    all_good = all_good && good[i];
  }
  if (!any_good) return out;

  std::vector<std::pair<double, double>> images;
  if (all_good) {
    // cannot happen for a periodic v, but keep the image well defined
    double lo = p(0.0), hi = lo;
    for (std::size_t i = 0; i < g; ++i) {
      lo = std::min(lo, p(static_cast<double>(i) * h));
      hi = std::max(hi, p(static_cast<double>(i) * h));
    }
    images.emplace_back(lo, hi);
  } else {
    auto excess = [&](double x) { return std::abs(p.derivative(x)) - delta; };
    std::size_t start = 0;
    while (good[start] || !good[(start + 1) % g]) start = (start + 1) % g;
    // start is a bad point followed by a good one; walk the circle once
    for (std::size_t k = 0; k < g;) {
      const std::size_t i = (start + k) % g;
      if (!good[(i + 1) % g]) {
        ++k;
        continue;
      }
      // run begins at i + 1
      std::size_t len = 0;
      while (good[(i + 1 + len) % g]) ++len;
      const double run_first = static_cast<double>(start + k + 1) * h;
      const double run_last = static_cast<double>(start + k + len) * h;
      const double left = bisect(excess, run_first - h, run_first);
      const double right = bisect(excess, run_last, run_last + h);
      const double a = p(left), b = p(right);
      images.emplace_back(std::min(a, b), std::max(a, b));
      k += len + 1;
    }
  }

  std::sort(images.begin(), images.end());
  for (const auto& iv : images) {
    if (!out.intervals.empty() && iv.first <= out.intervals.back().second)
      out.intervals.back().second = std::max(out.intervals.back().second, iv.second);
    else
      out.intervals.push_back(iv);
  }
  return out;
}

std::vector<double> spectrum_union(const AnalyticPotential& p, double lambda, double omega, std::size_t d,
                                   long long N, long long x_samples, std::uint64_t seed) {
  if (N < 8) throw Error(ErrorKind::Argument, "spectrum_union needs N >= 8");
  if (x_samples < 1) throw Error(ErrorKind::Argument, "spectrum_union needs x_samples >= 1");
  const SkewShiftFamily family(d, omega);
  std::vector<std::vector<double>> per_sample(static_cast<std::size_t>(x_samples));
  std::vector<double> scales(per_sample.size());
  parallel_for(per_sample.size(), [&](std::size_t s) {
    const auto point = sample_torus_point(d, seed, s);
    const auto op = build_operator(*family.at(point), p, lambda, Interval{1, N});
    per_sample[s] = eigenvalues(op);
    scales[s] = op.scale();
  });

  std::vector<double> all;
  for (const auto& v : per_sample) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end());
  const double resolution = 1e-9 * *std::max_element(scales.begin(), scales.end());
  std::vector<double> out;
  for (double e : all)
    if (out.empty() || e - out.back() > resolution) out.push_back(e);
  return out;
}

CoverageRecord interval_coverage(const AdmissibleSet& adm, double lambda, std::span<const double> spec,
                                 int probe_count, double tol) {
  if (probe_count < 10) throw Error(ErrorKind::Argument, "interval_coverage needs probe_count >= 10");
  if (adm.empty()) throw Error(ErrorKind::CoverageVacuous, "admissible set is empty; coverage is vacuous");

  CoverageRecord out;
  const double total = adm.total_length();
  for (int i = 0; i < probe_count; ++i) {
    double s = total * static_cast<double>(i) / static_cast<double>(probe_count - 1);
    double e = adm.intervals.back().second;
    for (const auto& [a, b] : adm.intervals) {
      if (s <= b - a) {
        e = a + s;
        break;
      }
      s -= b - a;
    }
    out.probes.push_back(lambda * e);
  }

  for (double e : out.probes) {
    double dist = std::numeric_limits<double>::infinity();
    const auto it = std::lower_bound(spec.begin(), spec.end(), e);
    if (it != spec.end()) dist = std::min(dist, *it - e);
    if (it != spec.begin()) dist = std::min(dist, e - *std::prev(it));
    out.distances.push_back(dist);
    if (out.distances.size() == 1 || dist > out.max_gap) {
      out.max_gap = dist;
      out.worst_E = e;
    }
  }
  out.covered = out.max_gap <= tol;
  return out;
}

IsolationRecord isolated_eigenvalue(const FiniteVolumeOperator& op, double E0, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::Argument, "isolated_eigenvalue needs epsilon > 0");
  const auto values = eigenvalues(op);
  IsolationRecord out;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - E0) < std::abs(values[out.index] - E0)) out.index = i;
    if (std::abs(values[i] - E0) <= epsilon) ++inside;
  }
  out.offset = values[out.index] - E0;
  out.gap = std::numeric_limits<double>::infinity();
  if (out.index > 0) out.gap = std::min(out.gap, values[out.index] - values[out.index - 1]);
  if (out.index + 1 < values.size()) out.gap = std::min(out.gap, values[out.index + 1] - values[out.index]);
  const double resolution = 1e-10 * op.scale();
  out.isolated = inside == 1 && out.gap > resolution;
  return out;
}

FiniteVolumeOperator window_operator(const AnalyticPotential& p, double lambda, double omega, double x, double y,
                                     long long M) {
  if (M < 0) throw Error(ErrorKind::Argument, "window_operator needs M >= 0");
  const SkewShift driver(SkewShiftParams(2, omega, {y, x}));
  return build_operator(driver, p, lambda, Interval{-M, M});
}

double parametrization_grid_point(long long i, long long grid) {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
}

namespace {

struct BranchPoint {
  bool converged = false;
  double y = 0.0;
  EigenPair pair;
};

/// Eigenpair of the window at (x, y) nearest E0, preferring more mass at the
/// centre site when two are equally near.
EigenPair branch_pair(const FiniteVolumeOperator& op, double E0, long long M) {
  auto pairs = eigen_all(op);
  const auto centre = static_cast<std::size_t>(M);
  std::size_t best = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    const double di = std::abs(pairs[i].value - E0), db = std::abs(pairs[best].value - E0);
    const double tie = 1e-12 * op.scale();
    if (di < db - tie ||
        (std::abs(di - db) <= tie && std::abs(pairs[i].vector[centre]) > std::abs(pairs[best].vector[centre])))
      best = i;
  }
  return std::move(pairs[best]);
}

BranchPoint solve_branch(const AnalyticPotential& p, double lambda, double omega, double E0, long long M, double x,
                         double y_start) {
  BranchPoint out;
  double y = y_start;
  for (int it = 0; it < 60; ++it) {
    const auto op = window_operator(p, lambda, omega, x, y, M);
    auto pair = branch_pair(op, E0, M);
    const double f = pair.value - E0;
    if (std::abs(f) <= 1e-11 * op.scale()) {
      out.converged = true;
      out.y = y - std::floor(y);
      out.pair = std::move(pair);
      return out;
    }
    // Hellmann-Feynman: dE/dy = lambda sum_n psi_n^2 v'(theta_n)
    const SkewShift driver(SkewShiftParams(2, omega, {y, x}));
    const auto theta = driver.phases(-M, static_cast<std::size_t>(2 * M + 1));
    double slope = 0.0;
    for (std::size_t n = 0; n < theta.size(); ++n)
      slope += pair.vector[n] * pair.vector[n] * p.derivative(theta[n]);
    slope *= lambda;
    if (slope == 0.0) return out;
    double step = -f / slope;
    step = std::clamp(step, -0.05, 0.05);
    y += step;
  }
  return out;
}

}  // namespace

ParametrizationRecord parametrize(const AnalyticPotential& p, double lambda, double omega, double E0, long long M,
                                  long long x_grid, double epsilon, double L_cap) {
  if (M < 0) throw Error(ErrorKind::Argument, "parametrize needs M >= 0");
  if (x_grid < 2) throw Error(ErrorKind::Argument, "parametrize needs x_grid >= 2");
  if (!(epsilon > 0.0) || !(L_cap > 0.0)) throw Error(ErrorKind::Argument, "parametrize needs epsilon, L > 0");
  if (L_cap + epsilon > 1.0 / 3.0) throw Error(ErrorKind::Argument, "parametrize needs L + epsilon <= 1/3");
  if (!(lambda > 0.0)) throw Error(ErrorKind::Argument, "parametrize needs lambda > 0");

  ParametrizationRecord rec;
  rec.M = M;
  rec.E0 = E0;
  rec.epsilon = epsilon;
  rec.L_cap = L_cap;
  rec.grid_size = x_grid;

  // first root of v(y) = E0 / lambda in [0, 1)
  const double target = E0 / lambda;
  auto g = [&](double y) { return p(y) - target; };
  constexpr int scan = 4096;
  bool found = false;
  double prev = g(0.0);
  if (prev == 0.0) {
    rec.y0 = 0.0;
    found = true;
  }
  for (int i = 1; i <= scan && !found; ++i) {
    const double y = static_cast<double>(i) / scan;
    const double cur = g(y);
    if (cur == 0.0) {
      rec.y0 = y - std::floor(y);
      found = true;
    } else if ((cur > 0.0) != (prev > 0.0)) {
      rec.y0 = bisect(g, static_cast<double>(i - 1) / scan, y);
      found = true;
    }
    prev = cur;
  }
  if (!found) {
    // tangential roots: accept a grid minimum of |v - target| refined by bisection on v'
    double best_y = 0.0, best = std::abs(g(0.0));
    for (int i = 1; i < scan; ++i) {
      const double y = static_cast<double>(i) / scan;
      if (std::abs(g(y)) < best) {
        best = std::abs(g(y));
        best_y = y;
      }
    }
    const double h = 1.0 / scan;
    auto dv = [&](double y) { return p.derivative(y); };
    if ((dv(best_y - h) > 0.0) != (dv(best_y + h) > 0.0)) best_y = bisect(dv, best_y - h, best_y + h);
    if (std::abs(g(best_y)) > 1e-12 * std::max(1.0, std::abs(target)))
      throw Error(ErrorKind::OutOfRange, "E0 / lambda is outside the range of v");
    rec.y0 = best_y - std::floor(best_y);
  }

  rec.C1 = 10.0 * p.max_abs_derivative();
  rec.C2 = 0.1 * std::max(std::abs(p.derivative(rec.y0)), 1.0);
  rec.extension_threshold = rec.C1 > 0.0 ? std::pow(rec.C2, 5) / (2.0 * rec.C1) : 0.0;

  const auto n = static_cast<std::size_t>(x_grid);
  std::vector<BranchPoint> points(n);
  std::vector<IsolationRecord> isolation(n);
  parallel_for(n, [&](std::size_t i) {
    const double x = parametrization_grid_point(static_cast<long long>(i), x_grid);
    points[i] = solve_branch(p, lambda, omega, E0, M, x, rec.y0);
    if (points[i].converged)
      isolation[i] = isolated_eigenvalue(window_operator(p, lambda, omega, x, points[i].y, M), E0, epsilon);
  });

  std::vector<char> candidate(n);
  for (std::size_t i = 0; i < n; ++i) candidate[i] = points[i].converged && isolation[i].isolated;

  const double h = 1.0 / static_cast<double>(x_grid);
  std::vector<double> slope(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!candidate[i]) continue;
    const std::size_t l = (i + n - 1) % n, r = (i + 1) % n;
    const bool has_l = candidate[l] && l != i, has_r = candidate[r] && r != i;
    if (has_l && has_r)
      slope[i] = std::abs(wrap_diff(points[r].y, points[l].y)) / (2.0 * h);
    else if (has_r)
      slope[i] = std::abs(wrap_diff(points[r].y, points[i].y)) / h;
    else if (has_l)
      slope[i] = std::abs(wrap_diff(points[i].y, points[l].y)) / h;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!candidate[i] || slope[i] > L_cap) continue;
    rec.admitted.push_back(static_cast<long long>(i));
    rec.x_samples.push_back(parametrization_grid_point(static_cast<long long>(i), x_grid));
    rec.zeta_values.push_back(points[i].y);
    rec.isolation_gaps.push_back(isolation[i].gap);
    rec.eigenvectors.push_back(points[i].pair.vector);
    rec.slope_sup = std::max(rec.slope_sup, slope[i]);
  }
  if (rec.admitted.empty()) throw Error(ErrorKind::ParametrizationFailed, "no grid point admitted");

  rec.measure_est = static_cast<double>(rec.admitted.size()) / static_cast<double>(x_grid);
  rec.claims_valid = rec.slope_sup <= L_cap && L_cap + epsilon <= 1.0 / 3.0 &&
                     rec.measure_est >= 1.0 / std::sqrt(static_cast<double>(std::max<long long>(M, 1)));
  return rec;
}

ExtensionReport extension_check(const ParametrizationRecord& rec1, const ParametrizationRecord& rec2, double delta,
                                bool self_test) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Argument, "extension_check needs delta > 0");
  for (const auto* rec : {&rec1, &rec2}) {
    if (rec->eigenvectors.size() != rec->admitted.size() || rec->zeta_values.size() != rec->admitted.size())
      throw Error(ErrorKind::IncompleteRecord, "parametrization record is missing eigenvectors or zeta values");
    for (const auto& v : rec->eigenvectors)
      if (v.size() != static_cast<std::size_t>(2 * rec->M + 1))
        throw Error(ErrorKind::IncompleteRecord, "eigenvector length does not match the window");
  }
  if (rec1.grid_size != rec2.grid_size)
    throw Error(ErrorKind::Argument, "extension_check needs records on the same x-grid");
  if (rec1.M > rec2.M) throw Error(ErrorKind::Argument, "extension_check needs rec1.M <= rec2.M");

  ExtensionReport out;
  out.delta = delta;
  out.self_test = self_test;
  out.epsilon_ok = self_test ? rec2.epsilon <= rec1.epsilon : rec2.epsilon < rec1.epsilon;
  out.scale_ok = self_test ? rec2.M >= rec1.M : rec2.M > rec1.M;
  out.slope_ok = rec2.slope_sup <= rec1.slope_sup + delta;

  std::vector<std::size_t> index_of(static_cast<std::size_t>(rec1.grid_size), SIZE_MAX);
  for (std::size_t k = 0; k < rec1.admitted.size(); ++k) index_of[static_cast<std::size_t>(rec1.admitted[k])] = k;

  out.subset_ok = true;
  const long long shift = rec2.M - rec1.M;
  for (std::size_t k = 0; k < rec2.admitted.size(); ++k) {
    const std::size_t j = index_of[static_cast<std::size_t>(rec2.admitted[k])];
    if (j == SIZE_MAX) {
      out.subset_ok = false;
      continue;
    }
    out.zeta_distance = std::max(out.zeta_distance, std::abs(wrap_diff(rec1.zeta_values[j], rec2.zeta_values[k])));

    const auto& psi1 = rec1.eigenvectors[j];
    const auto& psi2 = rec2.eigenvectors[k];
    double best = std::numeric_limits<double>::infinity();
    for (double a : {1.0, -1.0}) {
      double sum = 0.0;
      for (std::size_t m = 0; m < psi2.size(); ++m) {
        const long long site = static_cast<long long>(m) - rec2.M;
        const long long m1 = static_cast<long long>(m) - shift;
        const double v1 = (m1 >= 0 && m1 < static_cast<long long>(psi1.size())) ? psi1[static_cast<std::size_t>(m1)] : 0.0;
        const double diff = v1 - a * psi2[m];
        sum += (1.0 + static_cast<double>(site * site)) * diff * diff;
      }
      best = std::min(best, std::sqrt(sum));
    }
    out.weighted_distance = std::max(out.weighted_distance, best);
  }
  out.zeta_close_ok = out.zeta_distance <= delta;
  out.eigenfunction_ok = out.weighted_distance <= delta;
  return out;
}

}  // namespace skewlab

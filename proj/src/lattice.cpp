#include "skewlab/lattice.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "skewlab/error.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SignedLog make_signed_log(double normalized, double log_scale) {
  if (normalized == 0.0) return {0, kNegInf};
  return {normalized > 0.0 ? 1 : -1, std::log(std::abs(normalized)) + log_scale};
}

SignedLog multiply(SignedLog x, SignedLog y) {
  if (x.sign == 0 || y.sign == 0) return {0, kNegInf};
  return {x.sign * y.sign, x.log_abs + y.log_abs};
}

/// Leading (or, when reversed, trailing) minors of S - E:
/// out[k] = det over the first k visited sites, out[0] = 1.
std::vector<SignedLog> running_minors(const std::vector<double>& diag, double energy, bool reverse) {
  const std::size_t n = diag.size();
  std::vector<SignedLog> out(n + 1);
  out[0] = {1, 0.0};
  double cur = 1.0, prev = 0.0, log_scale = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = reverse ? diag[n - 1 - k] : diag[k];
    const double next = (d - energy) * cur - prev;
    prev = cur;
    cur = next;
    out[k + 1] = make_signed_log(cur, log_scale);
    const double s = std::max(std::abs(cur), std::abs(prev));
    if (s > 0.0 && std::isfinite(s)) {
      cur /= s;
      prev /= s;
      log_scale += std::log(s);
    }
  }
  return out;
}

/// LU factorisation with partial pivoting of a tridiagonal matrix with
/// constant off-diagonals -1 and diagonal diag - shift (LAPACK dgttrf layout).
struct TridiagonalLU {
  std::vector<double> dl, d, du, du2;
  std::vector<std::size_t> ipiv;

  TridiagonalLU(const std::vector<double>& diag, double shift, double tiny) {
    const std::size_t n = diag.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = diag[i] - shift;
    dl.assign(n > 0 ? n - 1 : 0, -1.0);
    du.assign(n > 0 ? n - 1 : 0, -1.0);
    du2.assign(n > 1 ? n - 2 : 0, 0.0);
    ipiv.resize(n);
    std::iota(ipiv.begin(), ipiv.end(), std::size_t{0});
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] != 0.0) {
          const double fact = dl[i] / d[i];
          dl[i] = fact;
          d[i + 1] -= fact * du[i];
        }
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        ipiv[i] = i + 1;
      }
    }
    for (double& pivot : d)
      if (std::abs(pivot) < tiny) pivot = std::copysign(tiny, pivot == 0.0 ? 1.0 : pivot);
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const std::size_t ip = ipiv[i];
      const double temp = b[i + 1 - ip + i] - dl[i] * b[ip];
      b[i] = b[ip];
      b[i + 1] = temp;
    }
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    if (n > 2)
      for (std::size_t i = n - 2; i-- > 0;) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
  }
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

FiniteVolumeOperator::FiniteVolumeOperator(Interval interval, std::vector<double> diag)
    : interval_(interval), diag_(std::move(diag)) {
  if (interval_.a > interval_.b) throw Error(ErrorKind::Argument, "interval needs a <= b");
  if (diag_.size() != interval_.size())
    throw Error(ErrorKind::Argument, "diagonal length does not match the interval");
}

double FiniteVolumeOperator::scale() const noexcept {
  double m = 0.0;
  for (double d : diag_) m = std::max(m, std::abs(d));
  return m + 2.0;
}

FiniteVolumeOperator FiniteVolumeOperator::restrict_to(Interval window) const {
  if (window.a > window.b || !interval_.contains(window.a) || !interval_.contains(window.b))
    throw Error(ErrorKind::Argument, "window is not inside the operator's interval");
  const auto first = diag_.begin() + (window.a - interval_.a);
  return FiniteVolumeOperator(window, std::vector<double>(first, first + static_cast<long long>(window.size())));
}

std::vector<double> FiniteVolumeOperator::apply_shifted(const std::vector<double>& v, double energy) const {
  const std::size_t n = diag_.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = (diag_[i] - energy) * v[i];
    if (i > 0) s -= v[i - 1];
    if (i + 1 < n) s -= v[i + 1];
    out[i] = s;
  }
  return out;
}

FiniteVolumeOperator build_operator(const PhaseDriver& driver, const AnalyticPotential& p, double lambda,
                                    Interval interval) {
  if (interval.a > interval.b) throw Error(ErrorKind::Argument, "interval needs a <= b");
  const auto theta = driver.phases(interval.a, interval.size());
  std::vector<double> diag(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) diag[j] = lambda * p(theta[j]);
  return FiniteVolumeOperator(interval, std::move(diag));
}

double SignedLog::value() const noexcept { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

std::vector<double> DeterminantSequence::values() const {
  if (overflow) throw Error(ErrorKind::Numeric, "determinants overflow double range; use the log form");
  std::vector<double> out;
  out.reserve(minors.size());
  for (const auto& m : minors) out.push_back(m.value());
  return out;
}

DeterminantSequence determinant_sequence(const FiniteVolumeOperator& op, double energy) {
  auto all = running_minors(op.diag(), energy, false);
  DeterminantSequence seq;
  seq.minors.assign(all.begin() + 1, all.end());
  constexpr double kMaxLog = 709.0;
  constexpr double kMinLog = -708.0;
  for (const auto& m : seq.minors)
    if (m.sign != 0 && (m.log_abs > kMaxLog || m.log_abs < kMinLog)) seq.overflow = true;
  return seq;
}

Resolvent::Resolvent(const FiniteVolumeOperator& op, double energy)
    : n_(op.size()),
      scale_(op.scale()),
      left_(running_minors(op.diag(), energy, false)),
      right_(running_minors(op.diag(), energy, true)) {
  const SignedLog det = left_[n_];
  if (det.sign == 0) {
    distance_ = 0.0;
    return;
  }
  // tr G = sum_i left[i] right[n-1-i] / det
  double max_log = kNegInf;
  for (std::size_t i = 0; i < n_; ++i) {
    const SignedLog term = multiply(left_[i], right_[n_ - 1 - i]);
    if (term.sign != 0) max_log = std::max(max_log, term.log_abs);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const SignedLog term = multiply(left_[i], right_[n_ - 1 - i]);
    if (term.sign != 0) sum += term.sign * std::exp(term.log_abs - max_log);
  }
  if (sum == 0.0) {
    distance_ = std::numeric_limits<double>::infinity();
    return;
  }
  distance_ = std::exp(det.log_abs - max_log - std::log(std::abs(sum)));
}

bool Resolvent::singular() const noexcept { return distance_ < 1e-12 * scale_; }

void Resolvent::require_regular() const {
  if (singular())
    throw ResolventSingularError("energy within 1e-12 * scale of the spectrum (dist estimate " +
                                     std::to_string(distance_) + ")",
                                 distance_);
}

SignedLog Resolvent::entry_log(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw Error(ErrorKind::Argument, "resolvent index out of range");
  if (i > j) std::swap(i, j);
  const SignedLog num = multiply(left_[i], right_[n_ - 1 - j]);
  const SignedLog det = left_[n_];
  if (num.sign == 0) return {0, kNegInf};
  return {num.sign * det.sign, num.log_abs - det.log_abs};
}

double green_entry(const FiniteVolumeOperator& op, double energy, long long n1, long long n2) {
  const Interval& iv = op.interval();
  if (!iv.contains(n1) || !iv.contains(n2)) throw Error(ErrorKind::Argument, "green_entry site outside the interval");
  Resolvent g(op, energy);
  g.require_regular();
  return g.entry(static_cast<std::size_t>(n1 - iv.a), static_cast<std::size_t>(n2 - iv.a));
}

std::size_t sturm_count(const FiniteVolumeOperator& op, double energy) {
  std::size_t count = 0;
  double q = 1.0;
  bool first = true;
  for (double d : op.diag()) {
    q = first ? d - energy : d - energy - 1.0 / q;
    first = false;
    if (std::abs(q) < DBL_MIN) q = -DBL_MIN;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> eigenvalues(const FiniteVolumeOperator& op) {
  const std::size_t n = op.size();
  const auto [dmin, dmax] = std::minmax_element(op.diag().begin(), op.diag().end());
  const double scale = op.scale();
  const double lo0 = *dmin - 2.0 - DBL_EPSILON * scale;
  const double hi0 = *dmax + 2.0 + DBL_EPSILON * scale;

  struct Bracket {
    double lo, hi;
    std::size_t clo, chi;
  };
  std::vector<double> values(n);
  std::vector<Bracket> stack{{lo0, hi0, sturm_count(op, lo0), sturm_count(op, hi0)}};
  while (!stack.empty()) {
    const Bracket br = stack.back();
    stack.pop_back();
    if (br.chi == br.clo) continue;
    const double mid = 0.5 * (br.lo + br.hi);
    const double tol = std::max(2.0 * DBL_EPSILON * std::max(std::abs(br.lo), std::abs(br.hi)), 0.5 * DBL_EPSILON * scale);
    if (br.hi - br.lo <= tol || mid <= br.lo || mid >= br.hi) {
      for (std::size_t k = br.clo; k < br.chi; ++k) values[k] = mid;
      continue;
    }
    const std::size_t cm = sturm_count(op, mid);
    stack.push_back({mid, br.hi, cm, br.chi});
    stack.push_back({br.lo, mid, br.clo, cm});
  }
  return values;
}

std::vector<EigenPair> eigen_all(const FiniteVolumeOperator& op) {
  const std::size_t n = op.size();
  const double scale = op.scale();
  const std::vector<double> values = eigenvalues(op);
  const double cluster_gap = 1e-3 * scale;
  const double target = 1e-10 * scale;
  constexpr int kIterations = 6;
  constexpr int kRestarts = 2;

  std::vector<EigenPair> pairs(n);
  std::size_t cluster_start = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && values[k] - values[k - 1] > cluster_gap) cluster_start = k;
    EigenPair& pair = pairs[k];
    pair.value = values[k];

    const double shift = values[k] + 1e-12 * scale;
    const TridiagonalLU lu(op.diag(), shift, DBL_EPSILON * scale);

    std::vector<double> best;
    double best_residual = std::numeric_limits<double>::infinity();
    for (int attempt = 0; attempt <= kRestarts && best_residual > target; ++attempt) {
      CounterRng rng(0x5EEDC0DEull + k, static_cast<std::uint64_t>(attempt));
      std::vector<double> x(n);
      for (double& c : x) c = 2.0 * rng.uniform() - 1.0;
      for (int it = 0; it < kIterations; ++it) {
        lu.solve(x);
        for (int pass = 0; pass < 2; ++pass)
          for (std::size_t j = cluster_start; j < k; ++j) {
            const auto& u = pairs[j].vector;
            const double dot = std::inner_product(x.begin(), x.end(), u.begin(), 0.0);
            for (std::size_t i = 0; i < n; ++i) x[i] -= dot * u[i];
          }
        const double nx = norm2(x);
        if (!(nx > 0.0) || !std::isfinite(nx)) break;
        for (double& c : x) c /= nx;
        const double residual = norm2(op.apply_shifted(x, values[k]));
        if (residual < best_residual) {
          best_residual = residual;
          best = x;
        }
        if (it >= 1 && residual <= target) break;
      }
    }
    if (best.empty()) {
      best.assign(n, 0.0);
      best[0] = 1.0;
      best_residual = norm2(op.apply_shifted(best, values[k]));
    }
    // fix the sign: largest-magnitude entry positive
    const auto peak = std::max_element(best.begin(), best.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (*peak < 0.0)
      for (double& c : best) c = -c;
    pair.vector = std::move(best);
    pair.residual = best_residual;
    pair.converged = best_residual <= 1e-8 * scale;
  }
  return pairs;
}

double reconstruct_check(const FiniteVolumeOperator& op, const EigenPair& pair, Interval window) {
  const Interval& iv = op.interval();
  if (!(iv.a < window.a && window.a <= window.b && window.b < iv.b))
    throw Error(ErrorKind::Argument, "reconstruction window must lie strictly inside the interval");
  if (pair.vector.size() != op.size()) throw Error(ErrorKind::Argument, "eigenvector length mismatch");

  const FiniteVolumeOperator inner = op.restrict_to(window);
  const Resolvent g(inner, pair.value);
  g.require_regular();

  const auto psi = [&](long long site) { return pair.vector[static_cast<std::size_t>(site - iv.a)]; };
  const double left_boundary = psi(window.a - 1);
  const double right_boundary = psi(window.b + 1);
  const std::size_t last = inner.size() - 1;
  double worst = 0.0;
  for (long long site = window.a; site <= window.b; ++site) {
    const auto local = static_cast<std::size_t>(site - window.a);
    const double rebuilt = g.entry(local, 0) * left_boundary + g.entry(local, last) * right_boundary;
    worst = std::max(worst, std::abs(psi(site) - rebuilt));
  }
  return worst;
}

DecayFit decay_fit(const EigenPair& pair, double floor) {
  const auto& psi = pair.vector;
  if (psi.size() < 16) throw Error(ErrorKind::FitUndefined, "decay fit needs at least 16 entries");
  DecayFit fit;
  fit.center = static_cast<std::size_t>(std::distance(
      psi.begin(),
      std::max_element(psi.begin(), psi.end(), [](double a, double b) { return std::abs(a) < std::abs(b); })));

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double a = std::abs(psi[i]);
    if (a <= floor) continue;
    xs.push_back(std::abs(static_cast<double>(i) - static_cast<double>(fit.center)));
    ys.push_back(-std::log(a));
  }
  fit.points = xs.size();
  if (xs.size() < 4) throw Error(ErrorKind::FitUndefined, "fewer than 4 entries above the decay floor");

  const double m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::FitUndefined, "all usable entries sit at the same distance");
  fit.rate = sxy / sxx;
  const double ss_res = std::max(0.0, syy - fit.rate * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
  return fit;
}

GreenDecayScan green_decay_scan(const DriverFamily& family, const AnalyticPotential& p, double lambda,
                                double energy, long long N, long long x_samples, std::uint64_t seed) {
  if (N < 20) throw Error(ErrorKind::Argument, "green_decay_scan needs N >= 20");
  if (x_samples < 1) throw Error(ErrorKind::Argument, "green_decay_scan needs x_samples >= 1");
  GreenDecayScan scan;
  const double log_lambda = std::log(lambda);
  if (!(log_lambda > 0.0)) {
    scan.vacuous = true;
    scan.threshold = 1.0;
    return scan;
  }
  const double log_threshold = -static_cast<double>(N) * log_lambda / 20.0;
  scan.threshold = std::exp(log_threshold);
  const auto min_sep = static_cast<std::size_t>((N + 9) / 10);  // 10 |N1 - N2| >= N

  // 1 = violation, 0 = fine, -1 = every box singular
  std::vector<int> outcome(static_cast<std::size_t>(x_samples));
  parallel_for(outcome.size(), [&](std::size_t s) {
    const auto point = sample_torus_point(family.dimension(), seed, s);
    const auto driver = family.at(point);
    const FiniteVolumeOperator full = build_operator(*driver, p, lambda, {1, N});
    const Interval boxes[] = {{1, N}, {1, N - 1}, {2, N}, {2, N - 1}};

    const Resolvent* best = nullptr;
    std::vector<Resolvent> resolvents;
    resolvents.reserve(4);
    for (const auto& box : boxes) resolvents.emplace_back(full.restrict_to(box), energy);
    for (const auto& r : resolvents)
      if (!r.singular() && (best == nullptr || r.distance_estimate() > best->distance_estimate())) best = &r;
    if (best == nullptr) {
      outcome[s] = -1;
      return;
    }
    const std::size_t n = best->size();
    double worst = kNegInf;
    for (std::size_t i = 0; i + min_sep < n; ++i)
      for (std::size_t j = i + min_sep; j < n; ++j) {
        const SignedLog g = best->entry_log(i, j);
        if (g.sign != 0) worst = std::max(worst, g.log_abs);
      }
    outcome[s] = worst > log_threshold ? 1 : 0;
  });

  for (int o : outcome) {
    if (o < 0) {
      ++scan.singular_samples;
      continue;
    }
    ++scan.tested;
    scan.violations += o;
  }
  scan.violation_fraction = scan.tested > 0 ? static_cast<double>(scan.violations) / scan.tested : 0.0;
  return scan;
}

}  // namespace skewlab

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "skewlab/cocycle.hpp"
#include "skewlab/config.hpp"
#include "skewlab/deviation.hpp"
#include "skewlab/error.hpp"
#include "skewlab/lattice.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/regularity.hpp"
#include "skewlab/report.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/runner.hpp"
#include "skewlab/spectrum.hpp"

using namespace skewlab;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

FiniteVolumeOperator random_operator(CounterRng& rng, std::size_t n) {
  std::vector<double> d(n);
  for (double& v : d) v = 8.0 * (2.0 * rng.uniform() - 1.0);
  return FiniteVolumeOperator(Interval{1, static_cast<long long>(n)}, d);
}

using Dense = std::vector<std::vector<long double>>;

Dense shifted_dense(const FiniteVolumeOperator& op, double e) {
  const std::size_t n = op.size();
  Dense m(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] = static_cast<long double>(op.diag()[i]) - e;
    if (i + 1 < n) m[i][i + 1] = m[i + 1][i] = -1.0L;
  }
  return m;
}

long double cofactor_det(const Dense& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  long double det = 0.0L;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0.0L) continue;
    Dense minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<long double> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    det += ((c % 2) ? -1.0L : 1.0L) * m[0][c] * cofactor_det(minor);
  }
  return det;
}

Dense gauss_inverse(Dense a) {
  const std::size_t n = a.size();
  Dense inv(n, std::vector<long double>(n, 0.0L));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const long double p = a[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c][k] /= p;
      inv[c][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = a[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

Outcome c1() {
  const SkewShift driver(SkewShiftParams(2, kGolden, {0.2, 0.7}));
  const auto free3 = transfer_product(driver, AnalyticPotential::zero(), 1.0, 3.0, 10000);
  const double err3 = std::abs(free3.growth_rate() - std::log((3 + std::sqrt(5.0)) / 2));
  double worst0 = 0.0;
  for (long long n : {4LL, 100LL, 1000LL, 10000LL})
    worst0 = std::max(worst0, std::abs(transfer_product(driver, AnalyticPotential::zero(), 1.0, 0.0, n).growth_rate()));
  return {err3 <= 1e-3 && worst0 <= 1e-12, fmt("E=3 error %.3g (tol 1e-3); E=0 max |u_n| %.3g (tol 1e-12)", err3, worst0)};
}

Outcome c2() {
  const double lambda = 1e4;
  const auto v = AnalyticPotential::cosine();
  const auto spec = spectrum_union(v, lambda, kGolden, 2, 64, 16, 21);
  std::vector<double> energies(64);
  for (int i = 0; i < 64; ++i) energies[static_cast<std::size_t>(i)] = spec.front() + (spec.back() - spec.front()) * i / 63.0;
  const SkewShiftFamily fam(2, kGolden);
  const auto scan = positivity_scan(fam, v, lambda, energies, 1000, 200, 22);
  return {scan.min_ratio >= 0.9 && scan.max_ratio <= 1.1,
          fmt("min L_n/log lambda %.5f (>= 0.9), max %.5f (<= 1.1), argmin E %.1f", scan.min_ratio, scan.max_ratio,
              scan.argmin_energy)};
}

Outcome c3() {
  const SkewShift driver(SkewShiftParams(2, kGolden, {0.0, 0.0}));
  const auto b = complex_lower_bound(driver, AnalyticPotential::cosine(), 10.0, 0.0, 0.1, 50);
  const double target = std::log(10.0 * std::sinh(0.2 * kPi) - 1.0) - 0.01;
  return {b.u_n_complex >= target, fmt("u_n %.6f, bound %.6f", b.u_n_complex, target)};
}

Outcome c4() {
  CounterRng rng(40, 0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const auto op = random_operator(rng, n);
    const double e = 10.0 * (2.0 * rng.uniform() - 1.0);
    const auto seq = determinant_sequence(op, e).values();
    const long double ref = cofactor_det(shifted_dense(op, e));
    const double rel = static_cast<double>(std::fabs(static_cast<long double>(seq.back()) - ref) /
                                           std::max(std::fabs(ref), 1e-300L));
    worst = std::max(worst, rel);
  }
  return {worst <= 1e-10, fmt("max relative error %.3g over 200 operators (tol 1e-10)", worst)};
}

Outcome c5() {
  CounterRng rng(50, 0);
  double worst_entry = 0.0, worst_id = 0.0;
  int done = 0;
  while (done < 100) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 8);
    const auto op = random_operator(rng, n);
    const double e = 10.0 * (2.0 * rng.uniform() - 1.0);
    double dist = 1e300;
    for (double ev : eigenvalues(op)) dist = std::min(dist, std::abs(ev - e));
    if (dist < 1e-3) continue;
    ++done;
    const Resolvent g(op, e);
    const auto inv = gauss_inverse(shifted_dense(op, e));
    const auto a = shifted_dense(op, e);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        worst_entry = std::max(worst_entry, static_cast<double>(std::fabs(g.entry(i, j) - inv[i][j])));
        long double s = 0.0L;
        for (std::size_t k = 0; k < n; ++k) s += a[i][k] * g.entry(k, j);
        worst_id = std::max(worst_id, static_cast<double>(std::fabs(s - (i == j ? 1.0L : 0.0L))));
      }
  }
  return {worst_entry <= 1e-8 && worst_id <= 1e-8,
          fmt("max |G - inverse| %.3g, max |(S-E)G - I| %.3g (tol 1e-8)", worst_entry, worst_id)};
}

Outcome c6() {
  const FiniteVolumeOperator op(Interval{1, 100}, std::vector<double>(100, 0.0));
  const auto ev = eigenvalues(op);
  double worst = 0.0;
  for (int k = 1; k <= 100; ++k)
    worst = std::max(worst, std::abs(ev[static_cast<std::size_t>(k - 1)] + 2.0 * std::cos(k * kPi / 101.0)));
  CounterRng rng(60, 0);
  const auto rop = random_operator(rng, 100);
  const auto rev = eigenvalues(rop);
  int bad = 0;
  for (int t = 0; t < 100; ++t) {
    const double e = 20.0 * (2.0 * rng.uniform() - 1.0);
    const auto below = static_cast<std::size_t>(std::lower_bound(rev.begin(), rev.end(), e) - rev.begin());
    bad += sturm_count(rop, e) != below;
  }
  return {worst <= 1e-10 && bad == 0, fmt("max eigenvalue error %.3g (tol 1e-10); %d inconsistent Sturm counts", worst, bad)};
}

Outcome c7() {
  CounterRng rng(70, 0);
  const auto op = random_operator(rng, 60);
  const auto pairs = eigen_all(op);
  double worst = 0.0;
  int done = 0, skipped = 0;
  while (done < 50) {
    const auto& pair = pairs[static_cast<std::size_t>(rng.uniform() * 60)];
    const long long a = 2 + static_cast<long long>(rng.uniform() * 30);
    const long long b = a + static_cast<long long>(rng.uniform() * static_cast<double>(58 - a));
    double dist = 1e300;
    for (double e : eigenvalues(op.restrict_to({a, b}))) dist = std::min(dist, std::abs(e - pair.value));
    if (dist < 1e-6 * op.scale()) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, reconstruct_check(op, pair, {a, b}));
    ++done;
  }
  return {worst <= 1e-8,
          fmt("max residual %.3g over 50 windows (tol 1e-8); %d windows with E within 1e-6 scale of the window spectrum "
              "excluded",
              worst, skipped)};
}

Outcome c8() {
  const auto v = AnalyticPotential::cosine();
  std::vector<double> fr;
  std::string d;
  for (long long n : {50LL, 100LL, 200LL, 400LL}) {
    const auto prof = deviation_measure(v, 1e4, 0.0, kGolden, n, 1024, 8, 1.0 / 40.0, 80);
    fr.push_back(prof.fraction);
    d += fmt("n=%lld: %.5f ", n, prof.fraction);
  }
  bool mono = true;
  for (std::size_t i = 1; i < fr.size(); ++i) mono = mono && fr[i] <= fr[i - 1];
  return {mono && fr.back() <= 0.1, d + "(nonincreasing, <= 0.1 at n=400)"};
}

Outcome c9() {
  std::vector<double> sups;
  std::string d;
  for (long long n : {50LL, 100LL, 200LL}) {
    const auto prof = u_n_profile(AnalyticPotential::cosine(), 1e4, 0.0, kGolden, 0.3, n, 1024);
    sups.push_back(fourier_decay(prof).sup_k_khat);
    d += fmt("n=%lld: %.4g ", n, sups.back());
  }
  const auto [mn, mx] = std::minmax_element(sups.begin(), sups.end());
  const double ratio = *mx / *mn;
  return {ratio < 3.0, d + fmt("ratio %.3f (< 3)", ratio)};
}

Outcome c10() {
  CounterRng rng(100, 0);
  int weyl_ok = 0, min_ok = 0;
  for (int t = 0; t < 100; ++t) {
    const long long k = (rng.uniform() < 0.5 ? -1 : 1) * (1 + static_cast<long long>(rng.uniform() * 10));
    const long long N = 1 + static_cast<long long>(rng.uniform() * 400);
    weyl_ok += weyl_difference_bound(k, rng.uniform(), rng.uniform(), N, 1).holds;
  }
  for (int t = 0; t < 100; ++t) {
    const double om = rng.uniform();
    const long long P = 2 + static_cast<long long>(rng.uniform() * 5000);
    const long long Q = 1 + static_cast<long long>(rng.uniform() * 5000);
    min_ok += minsum_bound(om, P, Q, rng.uniform()).holds;
  }
  return {weyl_ok == 100 && min_ok == 100, fmt("differencing %d/100, min-sum %d/100", weyl_ok, min_ok)};
}

Outcome c11() {
  const SkewShiftFamily fam(2, kGolden);
  const auto scan = green_decay_scan(fam, AnalyticPotential::cosine(), 1e4, 0.0, 100, 500, 110);
  return {!scan.vacuous && scan.violation_fraction <= 0.1,
          fmt("violation fraction %.4f (<= 0.1), %lld tested, %lld singular", scan.violation_fraction, scan.tested,
              scan.singular_samples)};
}

Outcome c12() {
  const double lambda = 1e4;
  const SkewShiftFamily fam(2, kGolden);
  const auto op = build_operator(*fam.at(sample_torus_point(2, 120, 0)), AnalyticPotential::cosine(), lambda, {1, 512});
  const auto pairs = eigen_all(op);
  double min_rate = 1e300, min_r2 = 1.0;
  for (std::size_t i = 251; i < 261; ++i) {
    const auto fit = decay_fit(pairs[i]);
    min_rate = std::min(min_rate, fit.rate);
    min_r2 = std::min(min_r2, fit.r2);
  }
  const double target = 0.5 * std::log(lambda);
  return {min_rate >= target && min_r2 >= 0.9,
          fmt("min rate %.3f (>= %.3f), min r2 %.4f (>= 0.9)", min_rate, target, min_r2)};
}

Outcome c13() {
  const SkewShiftFamily fam(2, kGolden);
  const auto v = AnalyticPotential::cosine();
  const auto lad = scale_ladder(fam, v, 1e4, 0.0, 50, 4, 200, 130);
  bool ladder_ok = true;
  std::string d = "second diffs";
  for (std::size_t j = 0; j < lad.second_diffs.size(); ++j) {
    d += fmt(" %.3g(+-%.2g)", lad.second_diffs[j], lad.second_diff_stderr[j]);
    if (j > 0 && lad.second_diffs[j] > lad.second_diffs[j - 1] + 2.0 * lad.second_diff_stderr[j]) ladder_ok = false;
  }
  CounterRng rng(131, 0);
  int trotter_ok = 0;
  for (int t = 0; t < 50; ++t) {
    const double e = 20.0 * (2.0 * rng.uniform() - 1.0);
    const double e2 = e + 0.5 * (2.0 * rng.uniform() - 1.0);
    const long long n = 1 + static_cast<long long>(rng.uniform() * 6);
    trotter_ok += trotter_check(fam, v, 10.0, e, e2, n, 20, 132 + static_cast<std::uint64_t>(t)).holds;
  }
  return {ladder_ok && trotter_ok == 50, d + fmt("; Trotter %d/50", trotter_ok)};
}

Outcome c14() {
  const double lambda = 1e4;
  const auto v = AnalyticPotential::cosine();
  const auto adm = admissible_energies(v, 1.0);
  const auto spec = spectrum_union(v, lambda, kGolden, 2, 256, 128, 140);
  const auto cov = interval_coverage(adm, lambda, spec, 200, 0.01 * lambda);
  const double edge = std::sqrt(1.0 - 1.0 / (4.0 * kPi * kPi));
  const bool shape = adm.intervals.size() == 1 && std::abs(adm.intervals[0].second - edge) <= 1e-9 &&
                     std::abs(adm.intervals[0].first + edge) <= 1e-9;
  return {shape && cov.max_gap <= 0.01 * lambda,
          fmt("admissible set [%.9f, %.9f]; max gap %.3f at E=%.1f (<= %.0f)", adm.intervals.front().first,
              adm.intervals.front().second, cov.max_gap, cov.worst_E, 0.01 * lambda)};
}

Outcome c15() {
  const auto v = AnalyticPotential::cosine();
  const auto r0 = parametrize(v, 1.0, kGolden, 0.5, 0, 16, 0.2, 0.1);
  double zerr = std::abs(r0.y0 - 1.0 / 6.0);
  for (double z : r0.zeta_values) zerr = std::max(zerr, std::abs(z - 1.0 / 6.0));
  const double lambda = 1e4;
  const auto r1 = parametrize(v, lambda, kGolden, 0.3 * lambda, 0, 64, 0.2, 0.1);
  const auto r2 = parametrize(v, lambda, kGolden, 0.3 * lambda, 2, 64, 0.1, 0.1);
  const auto ext = extension_check(r1, r2, 0.1);
  return {zerr <= 1e-12 && ext.pass() && ext.weighted_distance <= 0.1,
          fmt("M=0 closed-form error %.3g (tol 1e-12); extension flags %d%d%d%d%d%d, weighted distance %.4f (<= 0.1)",
              zerr, ext.subset_ok, ext.epsilon_ok, ext.scale_ok, ext.slope_ok, ext.zeta_close_ok,
              ext.eigenfunction_ok, ext.weighted_distance)};
}

std::string all_csv(const RunReport& r) {
  std::ostringstream os;
  for (const auto& t : r.tables) emit_csv(r, t, os);
  return os.str();
}

Outcome c16() {
  const std::vector<std::map<std::string, std::string>> configs{
      {{"command", "lyapunov"}, {"lambda", "100"}, {"n_list", "50,100"}, {"samples", "40"}},
      {{"command", "ldt"}, {"lambda", "1000"}, {"n_list", "30,60"}, {"grid", "256"}, {"y_samples", "4"}},
      {{"command", "green"}, {"lambda", "1000"}, {"N", "40"}, {"samples", "40"}},
      {{"command", "spectrum"}, {"lambda", "1000"}, {"N", "64"}, {"samples", "16"}, {"probes", "50"}},
      {{"command", "continuity"}, {"lambda", "50"}, {"n_list", "20,40"}, {"samples", "30"}, {"levels", "3"}},
  };
  int same = 0;
  for (auto kv : configs) {
    kv["seed"] = "161";
    std::string ref;
    bool ok = true;
    for (const char* threads : {"1", "2", "7"}) {
      kv["threads"] = threads;
      const auto csv = all_csv(run(parse_config(kv)));
      if (ref.empty()) ref = csv;
      ok = ok && csv == ref && !csv.empty();
    }
    same += ok;
  }
  set_worker_count(0);
  return {same == static_cast<int>(configs.size()),
          fmt("%d/%zu configurations byte-identical across 1, 2, 7 workers", same, configs.size())};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{c1, c2,  c3,  c4,  c5,  c6,  c7,  c8,
                                                       c9, c10, c11, c12, c13, c14, c15, c16};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("criterion %2zu: %s  %s  [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

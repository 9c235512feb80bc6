#include "skewlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "skewlab/cocycle.hpp"
#include "skewlab/deviation.hpp"
#include "skewlab/error.hpp"
#include "skewlab/lattice.hpp"
#include "skewlab/regularity.hpp"
#include "skewlab/spectrum.hpp"

namespace skewlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double d(long long v) { return static_cast<double>(v); }

void run_lyapunov(const ExperimentConfig& c, const AnalyticPotential& p, RunReport& r) {
  const SkewShiftFamily family(c.d, c.omega);
  const auto curve = lyapunov_curve(family, p, c.lambda, c.energy, c.n_list, c.samples, c.seed);
  Table t{"curve", {"n", "L_n", "stderr", "samples"}, {}};
  for (const auto& e : curve.entries) t.rows.push_back({d(e.n), e.L_n, e.stderr_, d(e.samples)});
  r.tables.push_back(std::move(t));
  r.results.emplace_back("L_n_last", curve.entries.back().L_n);
  if (auto gap = curve.cauchy_gap(curve.entries.front().n)) r.results.emplace_back("cauchy_gap_first", *gap);
}

void run_positivity(const ExperimentConfig& c, const AnalyticPotential& p, RunReport& r) {
  const SkewShiftFamily family(c.d, c.omega);
  const auto spec = spectrum_union(p, c.lambda, c.omega, c.d, std::max<long long>(c.N, 8), 16, c.seed);
  std::vector<double> energies = c.energies;
  if (energies.empty()) {
    const double lo = c.energy_min.value_or(spec.front()), hi = c.energy_max.value_or(spec.back());
    for (long long i = 0; i < c.energy_count; ++i)
      energies.push_back(c.energy_count == 1 ? lo : lo + (hi - lo) * d(i) / d(c.energy_count - 1));
  }
  const auto scan = positivity_scan(family, p, c.lambda, energies, c.n, c.samples, c.seed, spec);
  Table t{"scan", {"energy", "L_n", "stderr", "ratio", "in_spectrum"}, {}};
  for (const auto& row : scan.table) t.rows.push_back({row.energy, row.L_n, row.stderr_, row.ratio, row.in_spectrum ? 1.0 : 0.0});
  r.tables.push_back(std::move(t));
  r.results.emplace_back("min_ratio", scan.min_ratio);
  r.results.emplace_back("max_ratio", scan.max_ratio);
  r.results.emplace_back("argmin_energy", scan.argmin_energy);
  if (scan.min_ratio < 1.0 - c.kappa) r.violations.push_back("min L_n / log lambda below 1 - kappa");
  if (scan.max_ratio > 1.0 + c.kappa) r.violations.push_back("max L_n / log lambda above 1 + kappa");
}

void run_ldt(const ExperimentConfig& c, const AnalyticPotential& p, RunReport& r) {
  Table t{"deviation", {"n", "threshold", "fraction", "grid", "L_n_ref", "seed"}, {}};
  double prev = std::numeric_limits<double>::infinity();
  for (long long n : c.n_list) {
    const auto prof =
        deviation_measure(p, c.lambda, c.energy, c.omega, n, c.grid, c.y_samples, c.threshold_factor, c.seed, c.d);
    t.rows.push_back({d(n), prof.threshold, prof.fraction, d(prof.grid_size), prof.L_n_ref, d(static_cast<long long>(c.seed))});
    if (prof.fraction > prev) r.violations.push_back("deviation fraction increased at n = " + std::to_string(n));
    prev = prof.fraction;
  }
  r.results.emplace_back("fraction_last", prev);
  if (prev > c.max_fraction) r.violations.push_back("deviation fraction at the largest n exceeds max_fraction");
  r.tables.push_back(std::move(t));
}

void run_weyl(const ExperimentConfig& c, RunReport& r) {
  const auto sum = weyl_sum(c.k, c.y, c.omega, c.N);
  const auto diff = weyl_difference_bound(c.k, c.y, c.omega, c.N, static_cast<int>(c.order));
  const auto ms = minsum_bound(c.omega, std::max<long long>(c.N, 2), c.N, c.y);
  r.tables.push_back({"sum", {"k", "N", "y", "omega", "re", "im", "modulus"},
                      {{d(c.k), d(c.N), c.y, c.omega, sum.value.real(), sum.value.imag(), sum.modulus}}});
  r.tables.push_back({"bounds", {"lemma", "lhs", "rhs", "holds", "q_used"},
                      {{1.0, diff.lhs, diff.rhs, diff.holds ? 1.0 : 0.0, kNaN},
                       {2.0, ms.lhs, ms.rhs, ms.holds ? 1.0 : 0.0, d(ms.q_used)}}});
  r.results.emplace_back("modulus", sum.modulus);
  if (!diff.holds) r.violations.push_back("Weyl differencing bound failed");
  if (!ms.holds) r.violations.push_back("min-sum bound failed");
}

void run_green(const ExperimentConfig& c, const AnalyticPotential& p, RunReport& r) {
  const SkewShiftFamily family(c.d, c.omega);
  const auto scan = green_decay_scan(family, p, c.lambda, c.energy, c.N, c.samples, c.seed);
  r.tables.push_back({"scan",
                      {"N", "threshold", "tested", "violations", "violation_fraction", "singular_samples", "vacuous"},
                      {{d(c.N), scan.threshold, d(scan.tested), d(scan.violations), scan.violation_fraction,
                        d(scan.singular_samples), scan.vacuous ? 1.0 : 0.0}}});
  r.results.emplace_back("violation_fraction", scan.violation_fraction);
  if (scan.violation_fraction > c.max_fraction) r.violations.push_back("Green decay violation fraction exceeds max_fraction");
}

void run_localize(const ExperimentConfig& c, const AnalyticPotential& p, RunReport& r) {
  const SkewShiftFamily family(c.d, c.omega);
  const auto point = sample_torus_point(c.d, c.seed, 0);
  const auto op = build_operator(*family.at(point), p, c.lambda, Interval{1, c.N});
  const auto pairs = eigen_all(op);
  const long long count = std::min<long long>(c.count, c.N);
  const long long first = (c.N - count) / 2;
  const double target = 0.5 * std::log(c.lambda);
  Table t{"eigenvectors", {"index", "energy", "rate", "r2", "center", "residual"}, {}};
  double min_rate = std::numeric_limits<double>::infinity(), min_r2 = 1.0;
  for (long long i = first; i < first + count; ++i) {
    const auto& pair = pairs[static_cast<std::size_t>(i)];
    const auto fit = decay_fit(pair);
    t.rows.push_back({d(i), pair.value, fit.rate, fit.r2, d(static_cast<long long>(fit.center)), pair.residual});
    min_rate = std::min(min_rate, fit.rate);
    min_r2 = std::min(min_r2, fit.r2);
  }
  r.tables.push_back(std::move(t));
  r.results.emplace_back("min_rate", min_rate);
  r.results.emplace_back("min_r2", min_r2);
  if (min_rate < target) r.violations.push_back("fitted decay rate below 0.5 log lambda");
  if (min_r2 < 0.9) r.violations.push_back("decay fit r2 below 0.9");
}

void run_spectrum(const ExperimentConfig& c, const AnalyticPotential& p, RunReport& r) {
  const auto adm = admissible_energies(p, c.delta);
  if (adm.empty())
    throw Error(ErrorKind::CoverageVacuous, "admissible set is empty for delta = " + format_number(c.delta) +
                                                "; coverage is vacuous");
  const auto spec = spectrum_union(p, c.lambda, c.omega, c.d, c.N, c.samples, c.seed);
  const auto cov = interval_coverage(adm, c.lambda, spec, static_cast<int>(c.probes), c.tol_factor * c.lambda);
  Table iv{"intervals", {"a", "b", "lambda_a", "lambda_b"}, {}};
  for (const auto& [a, b] : adm.intervals) iv.rows.push_back({a, b, c.lambda * a, c.lambda * b});
  Table probes{"probes", {"E", "dist"}, {}};
  for (std::size_t i = 0; i < cov.probes.size(); ++i) probes.rows.push_back({cov.probes[i], cov.distances[i]});
  r.tables.push_back(std::move(iv));
  r.tables.push_back(std::move(probes));
  r.results.emplace_back("max_gap", cov.max_gap);
  r.results.emplace_back("worst_E", cov.worst_E);
  r.results.emplace_back("spectrum_points", d(static_cast<long long>(spec.size())));
  if (!cov.covered) r.violations.push_back("coverage gap exceeds tol_factor * lambda");
}

void run_parametrize(const ExperimentConfig& c, const AnalyticPotential& p, RunReport& r) {
  std::vector<ParametrizationRecord> stages;
  Table st{"stages", {"stage", "M", "epsilon", "y0", "measure_est", "slope_sup", "admitted", "claims_valid"}, {}};
  for (std::size_t j = 0; j < c.M_list.size(); ++j) {
    const double eps = std::ldexp(c.epsilon, -static_cast<int>(j));
    stages.push_back(parametrize(p, c.lambda, c.omega, c.energy, c.M_list[j], c.grid, eps, c.L));
    const auto& rec = stages.back();
    st.rows.push_back({d(static_cast<long long>(j)), d(rec.M), rec.epsilon, rec.y0, rec.measure_est, rec.slope_sup,
                       d(static_cast<long long>(rec.admitted.size())), rec.claims_valid ? 1.0 : 0.0});
    if (!rec.claims_valid) r.violations.push_back("stage " + std::to_string(j) + " does not satisfy the parametrization conditions");
  }
  Table ext{"extensions",
            {"stage", "delta", "weighted_distance", "zeta_distance", "subset_ok", "epsilon_ok", "scale_ok", "slope_ok",
             "zeta_close_ok", "eigenfunction_ok", "pass"},
            {}};
  for (std::size_t j = 1; j < stages.size(); ++j) {
    const auto e = extension_check(stages[j - 1], stages[j], c.extension_delta);
    auto b = [](bool v) { return v ? 1.0 : 0.0; };
    ext.rows.push_back({d(static_cast<long long>(j)), e.delta, e.weighted_distance, e.zeta_distance, b(e.subset_ok),
                        b(e.epsilon_ok), b(e.scale_ok), b(e.slope_ok), b(e.zeta_close_ok), b(e.eigenfunction_ok),
                        b(e.pass())});
    if (!e.pass()) r.violations.push_back("stage " + std::to_string(j) + " is not an extension of stage " + std::to_string(j - 1));
  }
  const auto& last = stages.back();
  Table z{"zeta", {"x", "zeta", "isolation_gap"}, {}};
  for (std::size_t i = 0; i < last.x_samples.size(); ++i)
    z.rows.push_back({last.x_samples[i], last.zeta_values[i], last.isolation_gaps[i]});
  r.tables.push_back(std::move(st));
  r.tables.push_back(std::move(ext));
  r.tables.push_back(std::move(z));
  r.results.emplace_back("y0", stages.front().y0);
  r.results.emplace_back("C1", last.C1);
  r.results.emplace_back("C2", last.C2);
  r.results.emplace_back("extension_threshold", last.extension_threshold);
}

void run_continuity(const ExperimentConfig& c, const AnalyticPotential& p, RunReport& r) {
  const SkewShiftFamily family(c.d, c.omega);
  const auto tc = trotter_check(family, p, c.lambda, c.energy, c.energy2, c.n, c.samples, c.seed);
  r.results.emplace_back("trotter_lhs", tc.lhs);
  r.results.emplace_back("trotter_log_rhs", tc.log_rhs);
  if (!tc.holds) r.violations.push_back("Trotter bound failed");

  const auto ladder = scale_ladder(family, p, c.lambda, c.energy, c.n_list.front(), static_cast<int>(c.levels),
                                   c.samples, c.seed);
  Table lt{"ladder", {"j", "n", "L", "stderr", "second_diff", "second_diff_stderr"}, {}};
  for (std::size_t j = 0; j < ladder.n_list.size(); ++j) {
    const bool has = j < ladder.second_diffs.size();
    lt.rows.push_back({d(static_cast<long long>(j)), d(ladder.n_list[j]), ladder.L_values[j], ladder.L_stderr[j],
                       has ? ladder.second_diffs[j] : kNaN, has ? ladder.second_diff_stderr[j] : kNaN});
  }
  for (std::size_t j = 1; j < ladder.second_diffs.size(); ++j)
    if (ladder.second_diffs[j] > ladder.second_diffs[j - 1] + 2.0 * ladder.second_diff_stderr[j])
      r.violations.push_back("second difference " + std::to_string(j) + " exceeds its predecessor + 2 stderr");
  if (ladder.truncated) r.warnings.push_back("scale ladder truncated at the n cap");
  r.tables.push_back(std::move(lt));

  const long long n = c.n_list.back();
  const long long n_list[] = {n};
  constexpr int kPairs = 12;
  std::vector<std::pair<double, double>> pairs;
  const auto base = sample_growth_rates(family, p, c.lambda, c.energy, n_list, c.samples, c.seed);
  Table mt{"modulus", {"t", "dL"}, {}};
  for (int i = 0; i < kPairs; ++i) {
    const double t = std::pow(10.0, -4.0 + 3.0 * i / (kPairs - 1));
    const auto moved = sample_growth_rates(family, p, c.lambda, c.energy + t, n_list, c.samples, c.seed);
    double diff = 0.0;
    for (std::size_t s = 0; s < base.size(); ++s) diff += moved[s][0] - base[s][0];
    const double dL = std::abs(diff) / d(static_cast<long long>(base.size()));
    pairs.emplace_back(t, dL);
    mt.rows.push_back({t, dL});
  }
  r.tables.push_back(std::move(mt));
  try {
    const auto fit = modulus_fit(pairs);
    r.results.emplace_back("modulus_c", fit.c);
    r.results.emplace_back("modulus_tau", fit.tau);
    r.results.emplace_back("modulus_r2", fit.r2);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::FitUndefined) throw;
    r.warnings.push_back(std::string("modulus fit skipped: ") + e.what());
  }
}

}  // namespace

RunReport run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunReport r;
  r.command = to_string(config.command);
  r.version = SKEWLAB_VERSION;
  r.config = config.echo();
  r.warnings = config.warnings;

  if (config.command == Command::Weyl) {
    run_weyl(config, r);
  } else {
    const auto p = resolve_potential(config.potential, config.rho);
    switch (config.command) {
      case Command::Lyapunov: run_lyapunov(config, p, r); break;
      case Command::Positivity: run_positivity(config, p, r); break;
      case Command::Ldt: run_ldt(config, p, r); break;
      case Command::Green: run_green(config, p, r); break;
      case Command::Localize: run_localize(config, p, r); break;
      case Command::Spectrum: run_spectrum(config, p, r); break;
      case Command::Parametrize: run_parametrize(config, p, r); break;
      case Command::Continuity: run_continuity(config, p, r); break;
      case Command::Weyl: break;
    }
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int exit_code_for(const RunReport& report) { return report.property_ok() ? 0 : 2; }

std::string output_directory(const ExperimentConfig& config) {
  if (const char* env = std::getenv("SKEWLAB_OUTPUT_DIR"); env && *env) return env;
  return config.output_path;
}

RunOutcome run_and_write(const ExperimentConfig& config) {
  RunOutcome out;
  try {
    out.report = run(config);
    out.files = write_report(out.report, output_directory(config), config.format, config.plot_data);
    out.exit_code = exit_code_for(out.report);
  } catch (const Error& e) {
    out.exit_code = 1;
    out.error = std::string(to_string(e.kind())) + ": " + e.what();
  } catch (const std::exception& e) {
    out.exit_code = 1;
    out.error = e.what();
  }
  return out;
}

}  // namespace skewlab

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "skewlab/lattice.hpp"
#include "skewlab/potential.hpp"

namespace skewlab {

struct AdmissibleSet {
  double delta = 0.0;
  std::vector<std::pair<double, double>> intervals;  // sorted, disjoint, closed; units of v

  bool empty() const noexcept { return intervals.empty(); }
  bool contains(double e) const noexcept;
  double total_length() const noexcept;
};

/// {v(x) : |v'(x)| >= delta} from a dense grid of (v, v'), with run endpoints
/// refined by bisection on |v'| - delta.
AdmissibleSet admissible_energies(const AnalyticPotential& p, double delta, int grid = 1 << 14);

/// Sorted union of the eigenvalues of the operators on [1, N] at x_samples
/// random initial points of T^d, thinned at resolution 1e-9 * scale.
std::vector<double> spectrum_union(const AnalyticPotential& p, double lambda, double omega, std::size_t d,
                                   long long N, long long x_samples, std::uint64_t seed);

struct CoverageRecord {
  double max_gap = 0.0;
  double worst_E = 0.0;
  bool covered = false;
  std::vector<double> probes;
  std::vector<double> distances;
};

/// Probes spread uniformly over lambda * adm (by arc length) and their
/// distance to the nearest point of spec (sorted).
CoverageRecord interval_coverage(const AdmissibleSet& adm, double lambda, std::span<const double> spec,
                                 int probe_count, double tol);

struct IsolationRecord {
  bool isolated = false;
  double gap = 0.0;  // from the eigenvalue nearest E0 to the next nearest one
  std::size_t index = 0;
  double offset = 0.0;  // nearest eigenvalue - E0
};

IsolationRecord isolated_eigenvalue(const FiniteVolumeOperator& op, double E0, double epsilon);

/// Operator on [-M, M] with site n at phase y + n x + n(n-1)/2 omega.
FiniteVolumeOperator window_operator(const AnalyticPotential& p, double lambda, double omega, double x, double y,
                                     long long M);

struct ParametrizationRecord {
  long long M = 0;
  double E0 = 0.0;
  double epsilon = 0.0;
  double L_cap = 0.0;
  double y0 = 0.0;
  long long grid_size = 0;
  std::vector<long long> admitted;  // grid indices, x = (i + 1/2) / grid_size
  std::vector<double> x_samples;
  std::vector<double> zeta_values;
  std::vector<double> isolation_gaps;
  std::vector<std::vector<double>> eigenvectors;  // on [-M, M]
  double slope_sup = 0.0;
  double measure_est = 0.0;
  bool claims_valid = false;
  // constants of the induction step, reported only
  double C1 = 0.0;
  double C2 = 0.0;
  double extension_threshold = 0.0;  // C2^5 / (2 C1)
};

/// Grid point x_i = (i + 1/2) / grid.
double parametrization_grid_point(long long i, long long grid);

/// For each grid x, Newton iteration in y on the eigenvalue branch nearest E0
/// (seeded at y0, the first root of lambda v(y0) = E0), followed by the
/// epsilon-isolation and finite-difference slope tests.
ParametrizationRecord parametrize(const AnalyticPotential& p, double lambda, double omega, double E0, long long M,
                                  long long x_grid, double epsilon, double L_cap);

struct ExtensionReport {
  double delta = 0.0;
  bool subset_ok = false;
  bool epsilon_ok = false;
  bool scale_ok = false;
  bool slope_ok = false;
  bool zeta_close_ok = false;
  bool eigenfunction_ok = false;
  double weighted_distance = 0.0;  // max over shared x
  double zeta_distance = 0.0;
  bool self_test = false;
  bool pass() const noexcept {
    return subset_ok && epsilon_ok && scale_ok && slope_ok && zeta_close_ok && eigenfunction_ok;
  }
};

/// Whether rec2 is a delta-extension of rec1. self_test relaxes the strict
/// inequalities on epsilon and M to non-strict ones.
ExtensionReport extension_check(const ParametrizationRecord& rec1, const ParametrizationRecord& rec2, double delta,
                                bool self_test = false);

}  // namespace skewlab

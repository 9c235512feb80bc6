#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "skewlab/driver.hpp"
#include "skewlab/potential.hpp"

namespace skewlab {

/// Closed integer interval [a, b] of lattice sites.
struct Interval {
  long long a = 1;
  long long b = 1;

  std::size_t size() const noexcept { return static_cast<std::size_t>(b - a + 1); }
  bool contains(long long n) const noexcept { return a <= n && n <= b; }
};

/// Dirichlet restriction of the operator to [a, b]: diagonal lambda v(theta_j),
/// off-diagonal -1. Symmetric by construction.
class FiniteVolumeOperator {
 public:
  FiniteVolumeOperator(Interval interval, std::vector<double> diag);

  const Interval& interval() const noexcept { return interval_; }
  const std::vector<double>& diag() const noexcept { return diag_; }
  std::size_t size() const noexcept { return diag_.size(); }
  double diag_at(long long site) const { return diag_[static_cast<std::size_t>(site - interval_.a)]; }

  /// ||diag||_inf + 2, the Gershgorin scale.
  double scale() const noexcept;
  FiniteVolumeOperator restrict_to(Interval window) const;
  /// (S - E) v for a vector indexed by local position.
  std::vector<double> apply_shifted(const std::vector<double>& v, double energy) const;

 private:
  Interval interval_;
  std::vector<double> diag_;
};

FiniteVolumeOperator build_operator(const PhaseDriver& driver, const AnalyticPotential& p, double lambda,
                                    Interval interval);

/// sign * exp(log_abs); sign == 0 encodes an exact zero.
struct SignedLog {
  int sign = 1;
  double log_abs = 0.0;

  double value() const noexcept;
};

/// D_k = det(S^{[a, a+k-1]} - E) for k = 1..N via
///   D_k = (diag_k - E) D_{k-1} - D_{k-2},  D_0 = 1, D_{-1} = 0.
struct DeterminantSequence {
  std::vector<SignedLog> minors;  // D_1 .. D_N
  bool overflow = false;          // some |D_k| is not representable as a double

  /// Linear values; throws a numeric error when overflow is set.
  std::vector<double> values() const;
};

DeterminantSequence determinant_sequence(const FiniteVolumeOperator& op, double energy);

/// Resolvent (S - E)^{-1} by Cramer's rule on leading and trailing minors,
/// all held in signed-log form.
class Resolvent {
 public:
  Resolvent(const FiniteVolumeOperator& op, double energy);

  /// Newton estimate |D_N / D_N'| = 1 / |tr (S - E)^{-1}| of dist(E, spectrum).
  double distance_estimate() const noexcept { return distance_; }
  bool singular() const noexcept;
  /// Throws ResolventSingularError when singular().
  void require_regular() const;

  /// G(i, j) for local positions 0 <= i, j < N.
  SignedLog entry_log(std::size_t i, std::size_t j) const;
  double entry(std::size_t i, std::size_t j) const { return entry_log(i, j).value(); }

  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  double scale_;
  std::vector<SignedLog> left_;   // left_[k] = det of the first k sites, k = 0..N
  std::vector<SignedLog> right_;  // right_[k] = det of the last k sites, k = 0..N
  double distance_ = 0.0;
};

/// G(n1, n2) for sites n1, n2 of the operator's interval.
double green_entry(const FiniteVolumeOperator& op, double energy, long long n1, long long n2);

/// Number of eigenvalues strictly below E (Sturm sequence).
std::size_t sturm_count(const FiniteVolumeOperator& op, double energy);

/// All eigenvalues, ascending, by bisection on Sturm counts.
std::vector<double> eigenvalues(const FiniteVolumeOperator& op);

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit 2-norm, indexed by local position
  double residual = 0.0;       // ||(S - value) vector||_2
  bool converged = true;
};

/// Eigenvalues by bisection, eigenvectors by inverse iteration with
/// reorthogonalisation inside clusters.
std::vector<EigenPair> eigen_all(const FiniteVolumeOperator& op);

/// max over n in the window of |psi(n) - G(n, a') psi(a'-1) - G(n, b') psi(b'+1)|,
/// G the resolvent of the window restriction at the pair's eigenvalue.
double reconstruct_check(const FiniteVolumeOperator& op, const EigenPair& pair, Interval window);

struct DecayFit {
  double rate = 0.0;
  std::size_t center = 0;  // local position of max |psi|
  double r2 = 0.0;
  std::size_t points = 0;
};

DecayFit decay_fit(const EigenPair& pair, double floor = 1e-13);

struct GreenDecayScan {
  double violation_fraction = 0.0;
  double threshold = 1.0;  // exp(-N log(lambda) / 20)
  long long tested = 0;
  long long violations = 0;
  long long singular_samples = 0;
  bool vacuous = false;
};

/// For sampled initial points, checks |G_Lambda(N1, N2)| <= exp(-N log(lambda)/20)
/// for all 10 |N1 - N2| >= N on the best-conditioned of the boxes
/// [1, N], [1, N-1], [2, N], [2, N-1].
GreenDecayScan green_decay_scan(const DriverFamily& family, const AnalyticPotential& p, double lambda,
                                double energy, long long N, long long x_samples, std::uint64_t seed);

}  // namespace skewlab

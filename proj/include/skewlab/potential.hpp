#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace skewlab {

/// A 1-periodic real-analytic potential v(x) = sum_k c_k exp(2 pi i k x),
/// stored by its (finitely many) Fourier coefficients.
///
/// The coefficients satisfy c_{-k} = conj(c_k). Evaluation is allowed on the
/// strip |Im z| < rho / 5, where |v(z)| is bounded by
///   sup_bound = sum_k |c_k| exp(2 pi |k| rho / 5).
class AnalyticPotential {
 public:
  using Coefficients = std::map<int, std::complex<double>>;

  AnalyticPotential(Coefficients coeffs, double rho);

  /// v(x) = cos(2 pi x).
  static AnalyticPotential cosine(double rho = 1.0);
  /// v(x) = value, a constant.
  static AnalyticPotential constant(double value, double rho = 1.0);
  static AnalyticPotential zero(double rho = 1.0);
  /// Fourier coefficients of a real 1-periodic function, truncated at the
  /// smallest K with amplitude * exp(-rho K) < 1e-16.
  static AnalyticPotential from_function(const std::function<double(double)>& v, double rho,
                                         double amplitude);

  static int truncation_order(double amplitude, double rho);

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> z) const;
  double derivative(double x) const;

  double rho() const noexcept { return rho_; }
  double sup_bound() const noexcept { return sup_bound_; }
  /// A with |c_k| <= A exp(-rho |k|) for every stored k.
  double decay_constant() const noexcept { return decay_constant_; }
  int max_frequency() const noexcept { return max_frequency_; }
  const Coefficients& coefficients() const noexcept { return coeffs_; }
  std::complex<double> coefficient(int k) const;

  /// max |v'(x)| over a dense real grid.
  double max_abs_derivative(int grid = 4096) const;
  bool is_constant() const;

 private:
  std::complex<double> evaluate(std::complex<double> z) const;

  Coefficients coeffs_;
  std::vector<std::complex<double>> dense_;
  double rho_;
  double sup_bound_ = 0.0;
  double decay_constant_ = 0.0;
  int max_frequency_ = 0;
};

/// Text format:
///   # comment
///   rho = 1.0
///   <k> = <re> <im>
/// Every k must appear together with -k and the pair must be conjugate.
AnalyticPotential parse_potential(std::istream& in);
AnalyticPotential load_potential(const std::string& path);
void write_potential(std::ostream& out, const AnalyticPotential& p);

/// Resolves "cosine", "zero", "constant:<c>" or a potential file path.
AnalyticPotential resolve_potential(const std::string& spec, double rho = 1.0);

}  // namespace skewlab

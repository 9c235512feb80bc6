#include "skewlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "skewlab/error.hpp"

namespace skewlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRealnessTolerance = 1e-12;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidPotential: return "invalid-potential";
    case ErrorKind::StripViolation: return "strip-violation";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::PreconditionViolated: return "precondition-violated";
    case ErrorKind::ResolventSingular: return "resolvent-singular";
    case ErrorKind::FitUndefined: return "fit-undefined";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::ParametrizationFailed: return "parametrization-failed";
    case ErrorKind::IncompleteRecord: return "incomplete-record";
    case ErrorKind::CoverageVacuous: return "coverage-vacuous";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

AnalyticPotential::AnalyticPotential(Coefficients coeffs, double rho)
    : coeffs_(std::move(coeffs)), rho_(rho) {
  if (coeffs_.empty()) throw Error(ErrorKind::InvalidPotential, "coefficient table is empty");
  if (!(rho_ > 0.0) || !std::isfinite(rho_))
    throw Error(ErrorKind::InvalidPotential, "rho must be positive and finite");

  double scale = 0.0;
  for (const auto& [k, c] : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw Error(ErrorKind::InvalidPotential, "non-finite coefficient at k=" + std::to_string(k));
    scale = std::max(scale, std::abs(c));
  }
  const double tol = kRealnessTolerance * std::max(scale, 1.0);
  for (const auto& [k, c] : coeffs_) {
    const auto mirror = coeffs_.find(-k);
    if (mirror == coeffs_.end()) {
      if (std::abs(c) <= tol) continue;
      throw Error(ErrorKind::InvalidPotential,
                  "coefficient k=" + std::to_string(k) + " has no partner at k=" + std::to_string(-k));
    }
    if (std::abs(mirror->second - std::conj(c)) > tol)
      throw Error(ErrorKind::InvalidPotential,
                  "realness violated: c(" + std::to_string(-k) + ") != conj(c(" + std::to_string(k) + "))");
  }

  for (const auto& [k, c] : coeffs_) {
    const int ak = std::abs(k);
    max_frequency_ = std::max(max_frequency_, ak);
    sup_bound_ += std::abs(c) * std::exp(kTwoPi * ak * rho_ / 5.0);
    decay_constant_ = std::max(decay_constant_, std::abs(c) * std::exp(rho_ * ak));
  }
  dense_.assign(2 * max_frequency_ + 1, {});
  for (const auto& [k, c] : coeffs_) dense_[max_frequency_ + k] = c;
}

AnalyticPotential AnalyticPotential::cosine(double rho) {
  return AnalyticPotential({{-1, {0.5, 0.0}}, {1, {0.5, 0.0}}}, rho);
}

AnalyticPotential AnalyticPotential::constant(double value, double rho) {
  return AnalyticPotential({{0, {value, 0.0}}}, rho);
}

AnalyticPotential AnalyticPotential::zero(double rho) { return constant(0.0, rho); }

int AnalyticPotential::truncation_order(double amplitude, double rho) {
  if (!(amplitude > 0.0) || !(rho > 0.0))
    throw Error(ErrorKind::Argument, "truncation_order needs amplitude > 0 and rho > 0");
  const double k = std::log(amplitude / 1e-16) / rho;
  return std::max(0, static_cast<int>(std::floor(k)) + 1);
}

AnalyticPotential AnalyticPotential::from_function(const std::function<double(double)>& v,
                                                   double rho, double amplitude) {
  const int kmax = truncation_order(amplitude, rho);
  const int samples = std::max(64, 4 * kmax + 1);
  std::vector<double> values(samples);
  for (int j = 0; j < samples; ++j) values[j] = v(static_cast<double>(j) / samples);

  Coefficients coeffs;
  for (int k = 0; k <= kmax; ++k) {
    std::complex<double> sum = 0.0;
    for (int j = 0; j < samples; ++j) {
      const double angle = -kTwoPi * static_cast<double>(k) * j / samples;
      sum += values[j] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    sum /= static_cast<double>(samples);
    if (k == 0) {
      coeffs[0] = {sum.real(), 0.0};
    } else if (std::abs(sum) > 1e-16) {
      coeffs[k] = sum;
      coeffs[-k] = std::conj(sum);
    }
  }
  return AnalyticPotential(std::move(coeffs), rho);
}

std::complex<double> AnalyticPotential::coefficient(int k) const {
  const auto it = coeffs_.find(k);
  return it == coeffs_.end() ? std::complex<double>{} : it->second;
}

std::complex<double> AnalyticPotential::evaluate(std::complex<double> z) const {
  // w = exp(2 pi i z); positive and negative powers accumulated separately
  const std::complex<double> i_two_pi(0.0, kTwoPi);
  const std::complex<double> w = std::exp(i_two_pi * z);
  const std::complex<double> w_inv = std::exp(-i_two_pi * z);

  std::complex<double> sum = dense_[max_frequency_];
  std::complex<double> up = 1.0, down = 1.0;
  for (int k = 1; k <= max_frequency_; ++k) {
    up *= w;
    down *= w_inv;
    sum += dense_[max_frequency_ + k] * up + dense_[max_frequency_ - k] * down;
  }
  return sum;
}

double AnalyticPotential::operator()(double x) const {
  const double reduced = x - std::floor(x);
  return evaluate({reduced, 0.0}).real();
}

std::complex<double> AnalyticPotential::operator()(std::complex<double> z) const {
  if (!(std::abs(z.imag()) < rho_ / 5.0))
    throw Error(ErrorKind::StripViolation, "|Im z| = " + std::to_string(std::abs(z.imag())) +
                                               " outside the strip |Im z| < rho/5 = " +
                                               std::to_string(rho_ / 5.0));
  const double reduced = z.real() - std::floor(z.real());
  return evaluate({reduced, z.imag()});
}

double AnalyticPotential::derivative(double x) const {
  const double reduced = x - std::floor(x);
  double sum = 0.0;
  for (const auto& [k, c] : coeffs_) {
    if (k == 0) continue;
    const double angle = kTwoPi * k * reduced;
    // d/dx c e^{2 pi i k x} = 2 pi i k c e^{2 pi i k x}
    const std::complex<double> term =
        std::complex<double>(0.0, kTwoPi * k) * c * std::complex<double>(std::cos(angle), std::sin(angle));
    sum += term.real();
  }
  return sum;
}

double AnalyticPotential::max_abs_derivative(int grid) const {
  double best = 0.0;
  for (int j = 0; j < grid; ++j) best = std::max(best, std::abs(derivative(static_cast<double>(j) / grid)));
  return best;
}

bool AnalyticPotential::is_constant() const {
  for (const auto& [k, c] : coeffs_)
    if (k != 0 && std::abs(c) != 0.0) return false;
  return true;
}

AnalyticPotential parse_potential(std::istream& in) {
  AnalyticPotential::Coefficients coeffs;
  double rho = 1.0;
  bool have_rho = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::InvalidPotential, "line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::istringstream value(line.substr(eq + 1));
    if (key == "rho") {
      if (!(value >> rho)) throw Error(ErrorKind::InvalidPotential, "line " + std::to_string(line_no) + ": bad rho");
      have_rho = true;
      continue;
    }
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size())
      throw Error(ErrorKind::InvalidPotential,
                  "line " + std::to_string(line_no) + ": unknown key '" + key + "' (expected rho or an integer frequency)");
    double re = 0.0, im = 0.0;
    if (!(value >> re >> im))
      throw Error(ErrorKind::InvalidPotential, "line " + std::to_string(line_no) + ": expected '<re> <im>'");
    std::string extra;
    if (value >> extra)
      throw Error(ErrorKind::InvalidPotential, "line " + std::to_string(line_no) + ": trailing text '" + extra + "'");
    if (!coeffs.emplace(k, std::complex<double>(re, im)).second)
      throw Error(ErrorKind::InvalidPotential, "line " + std::to_string(line_no) + ": duplicate frequency " + key);
  }
  if (!have_rho) throw Error(ErrorKind::InvalidPotential, "missing rho");
  return AnalyticPotential(std::move(coeffs), rho);
}

AnalyticPotential load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open potential file '" + path + "'");
  return parse_potential(in);
}

void write_potential(std::ostream& out, const AnalyticPotential& p) {
  out.precision(17);
  out << "rho = " << p.rho() << '\n';
  for (const auto& [k, c] : p.coefficients()) out << k << " = " << c.real() << ' ' << c.imag() << '\n';
}

AnalyticPotential resolve_potential(const std::string& spec, double rho) {
  if (spec == "cosine") return AnalyticPotential::cosine(rho);
  if (spec == "zero") return AnalyticPotential::zero(rho);
  if (spec.rfind("constant:", 0) == 0) {
    try {
      return AnalyticPotential::constant(std::stod(spec.substr(9)), rho);
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::InvalidPotential, "bad constant potential '" + spec + "'");
    }
  }
  return load_potential(spec);
}

}  // namespace skewlab

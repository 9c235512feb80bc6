#include "skewlab/driver.hpp"

#include <cmath>

#include "skewlab/error.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {

TorusFixed to_fixed(double x) noexcept {
  double r = x - std::floor(x);
  if (!(r < 1.0)) r = 0.0;
  return static_cast<TorusFixed>(std::ldexp(r, 64));
}

double from_fixed(TorusFixed u) noexcept { return static_cast<double>(u >> 11) * 0x1.0p-53; }

SkewShiftParams::SkewShiftParams(std::size_t d_, double omega_, std::vector<double> x0_)
    : d(d_), omega(omega_ - std::floor(omega_)), x0(std::move(x0_)) {
  if (d == 0) throw Error(ErrorKind::Argument, "skew-shift dimension must be >= 1");
  if (x0.size() != d)
    throw Error(ErrorKind::Argument, "initial point has " + std::to_string(x0.size()) +
                                         " coordinates, expected " + std::to_string(d));
  for (double& c : x0) {
    c -= std::floor(c);
    if (!(c < 1.0)) c = 0.0;
  }
  if (!(omega < 1.0)) omega = 0.0;
}

SkewShift::SkewShift(const SkewShiftParams& params) : omega_(to_fixed(params.omega)) {
  if (params.d == 0 || params.x0.size() != params.d)
    throw Error(ErrorKind::Argument, "inconsistent skew-shift parameters");
  state_.reserve(params.d);
  for (double c : params.x0) state_.push_back(to_fixed(c));
}

void SkewShift::step_forward(std::vector<TorusFixed>& s) const noexcept {
  const std::size_t d = s.size();
  for (std::size_t i = 0; i + 1 < d; ++i) s[i] += s[i + 1];
  s[d - 1] += omega_;
}

void SkewShift::step_backward(std::vector<TorusFixed>& s) const noexcept {
  const std::size_t d = s.size();
  s[d - 1] -= omega_;
  for (std::size_t i = d - 1; i-- > 0;) s[i] -= s[i + 1];
}

std::vector<double> SkewShift::phases(long long first, std::size_t count) const {
  std::vector<TorusFixed> s = state_;
  for (long long j = 0; j < first; ++j) step_forward(s);
  for (long long j = 0; j > first; --j) step_backward(s);

  std::vector<double> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back(from_fixed(s[0]));
    step_forward(s);
  }
  return out;
}

std::unique_ptr<PhaseDriver> SkewShift::shifted(long long steps) const {
  std::vector<TorusFixed> s = state_;
  for (long long j = 0; j < steps; ++j) step_forward(s);
  for (long long j = 0; j > steps; --j) step_backward(s);
  return std::unique_ptr<PhaseDriver>(new SkewShift(std::move(s), omega_));
}

std::vector<double> SkewShift::point() const {
  std::vector<double> out;
  out.reserve(state_.size());
  for (TorusFixed u : state_) out.push_back(from_fixed(u));
  return out;
}

std::vector<double> Rotation::phases(long long first, std::size_t count) const {
  TorusFixed x = x_ + static_cast<TorusFixed>(first) * omega_;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back(from_fixed(x));
    x += omega_;
  }
  return out;
}

std::unique_ptr<PhaseDriver> Rotation::shifted(long long steps) const {
  return std::unique_ptr<PhaseDriver>(new Rotation(x_ + static_cast<TorusFixed>(steps) * omega_, omega_, 0));
}

std::vector<double> skew_orbit(const SkewShiftParams& params, std::size_t n) {
  return SkewShift(params).phases(1, n);
}

SkewShiftFamily::SkewShiftFamily(std::size_t d, double omega) : d_(d), omega_(omega) {
  if (d == 0) throw Error(ErrorKind::Argument, "skew-shift dimension must be >= 1");
}

std::unique_ptr<PhaseDriver> SkewShiftFamily::at(std::span<const double> point) const {
  return std::make_unique<SkewShift>(SkewShiftParams(d_, omega_, {point.begin(), point.end()}));
}

std::unique_ptr<PhaseDriver> RotationFamily::at(std::span<const double> point) const {
  if (point.size() != 1) throw Error(ErrorKind::Argument, "rotation family expects a point of T^1");
  return std::make_unique<Rotation>(point[0], omega_);
}

std::vector<double> sample_torus_point(std::size_t d, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::vector<double> point(d);
  for (double& c : point) c = rng.uniform();
  return point;
}

}  // namespace skewlab

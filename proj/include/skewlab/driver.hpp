#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace skewlab {

/// Points of the torus as 64-bit fixed-point fractions: u represents u / 2^64.
/// Addition wraps modulo 2^64, which is exact reduction modulo 1.
using TorusFixed = std::uint64_t;

TorusFixed to_fixed(double x) noexcept;
double from_fixed(TorusFixed u) noexcept;

struct SkewShiftParams {
  std::size_t d = 2;
  double omega = 0.0;
  std::vector<double> x0;  // d coordinates, reduced into [0, 1)

  SkewShiftParams() = default;
  SkewShiftParams(std::size_t d, double omega, std::vector<double> x0);
};

/// Generator of the phase sequence theta_j = pi_1(T^j xbar) for a map
/// T(x, y) = (x + f(y), g(y)).
class PhaseDriver {
 public:
  virtual ~PhaseDriver() = default;

  /// theta_j for j = first, ..., first + count - 1; first may be negative.
  virtual std::vector<double> phases(long long first, std::size_t count) const = 0;
  virtual std::size_t dimension() const = 0;
  /// The same driver started from T^steps(xbar).
  virtual std::unique_ptr<PhaseDriver> shifted(long long steps) const = 0;
};

/// T(x_1, ..., x_d) = (x_1 + x_2, ..., x_{d-1} + x_d, x_d + omega).
class SkewShift final : public PhaseDriver {
 public:
  explicit SkewShift(const SkewShiftParams& params);

  std::vector<double> phases(long long first, std::size_t count) const override;
  std::size_t dimension() const override { return state_.size(); }
  std::unique_ptr<PhaseDriver> shifted(long long steps) const override;

  /// Current point of the torus.
  std::vector<double> point() const;

 private:
  SkewShift(std::vector<TorusFixed> state, TorusFixed omega) : state_(std::move(state)), omega_(omega) {}

  void step_forward(std::vector<TorusFixed>& s) const noexcept;
  void step_backward(std::vector<TorusFixed>& s) const noexcept;

  std::vector<TorusFixed> state_;
  TorusFixed omega_;
};

/// x -> x + omega on the circle.
class Rotation final : public PhaseDriver {
 public:
  Rotation(double x, double omega) : x_(to_fixed(x)), omega_(to_fixed(omega)) {}

  std::vector<double> phases(long long first, std::size_t count) const override;
  std::size_t dimension() const override { return 1; }
  std::unique_ptr<PhaseDriver> shifted(long long steps) const override;

 private:
  Rotation(TorusFixed x, TorusFixed omega, int) : x_(x), omega_(omega) {}

  TorusFixed x_;
  TorusFixed omega_;
};

/// theta_1, ..., theta_n of the skew-shift started at params.x0.
std::vector<double> skew_orbit(const SkewShiftParams& params, std::size_t n);

/// A family of drivers indexed by initial points of T^d, used for averaging
/// over uniformly distributed starting points.
class DriverFamily {
 public:
  virtual ~DriverFamily() = default;
  virtual std::size_t dimension() const = 0;
  virtual double omega() const = 0;
  virtual std::unique_ptr<PhaseDriver> at(std::span<const double> point) const = 0;
};

class SkewShiftFamily final : public DriverFamily {
 public:
  SkewShiftFamily(std::size_t d, double omega);

  std::size_t dimension() const override { return d_; }
  double omega() const override { return omega_; }
  std::unique_ptr<PhaseDriver> at(std::span<const double> point) const override;

 private:
  std::size_t d_;
  double omega_;
};

class RotationFamily final : public DriverFamily {
 public:
  explicit RotationFamily(double omega) : omega_(omega) {}

  std::size_t dimension() const override { return 1; }
  double omega() const override { return omega_; }
  std::unique_ptr<PhaseDriver> at(std::span<const double> point) const override;

 private:
  double omega_;
};

/// Uniform point of T^d from the counter stream (seed, stream).
std::vector<double> sample_torus_point(std::size_t d, std::uint64_t seed, std::uint64_t stream);

}  // namespace skewlab

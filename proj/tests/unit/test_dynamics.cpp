#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "../oracles.hpp"
#include "skewlab/diophantine.hpp"
#include "skewlab/driver.hpp"
#include "skewlab/error.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/potential.hpp"
#include "skewlab/rng.hpp"

using namespace skewlab;
using doctest::Approx;

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("potential") {
  TEST_CASE("cosine values on the real line") {
    const auto v = AnalyticPotential::cosine();
    CHECK(v(0.0) == Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(v(0.25)) < 1e-15);
    CHECK(v(1.5) == Approx(-1.0).epsilon(1e-15));
  }

  TEST_CASE("two-term series at x = 1/2") {
    AnalyticPotential v({{1, 0.5}, {-1, 0.5}, {2, 0.25}, {-2, 0.25}}, 1.0);
    CHECK(v(0.5) == Approx(-0.5).epsilon(1e-14));
  }

  TEST_CASE("complex evaluation on the strip") {
    const auto v = AnalyticPotential::cosine();
    const auto a = v(std::complex<double>(0.0, 0.1));
    CHECK(a.real() == Approx(std::cosh(0.2 * kPi)).epsilon(1e-14));
    CHECK(std::abs(a.imag()) < 1e-14);
    const auto b = v(std::complex<double>(0.25, 0.1));
    CHECK(std::abs(b.real()) < 1e-14);
    CHECK(b.imag() == Approx(-std::sinh(0.2 * kPi)).epsilon(1e-14));
    for (double x : {0.0, 0.13, 0.5, 0.77}) CHECK(v(std::complex<double>(x, 0.0)).real() == v(x));
  }

  TEST_CASE("strip violation") {
    const auto v = AnalyticPotential::cosine(1.0);
    CHECK_THROWS_AS(v(std::complex<double>(0.1, 0.2)), Error);
    try {
      v(std::complex<double>(0.1, -0.25));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::StripViolation);
    }
  }

  TEST_CASE("invalid coefficient tables") {
    CHECK_THROWS_AS(AnalyticPotential({}, 1.0), Error);
    CHECK_THROWS_AS(AnalyticPotential({{1, 0.5}}, 1.0), Error);
    CHECK_THROWS_AS(AnalyticPotential({{1, {0.5, 0.1}}, {-1, {0.5, 0.1}}}, 1.0), Error);
    CHECK_THROWS_AS(AnalyticPotential({{0, 1.0}}, -1.0), Error);
  }

  TEST_CASE("realness, decay and sup bound") {
    const auto v = AnalyticPotential::from_function([](double x) { return std::exp(std::cos(2 * kPi * x)); }, 1.0,
                                                    std::exp(1.0));
    for (const auto& [k, c] : v.coefficients()) {
      CHECK(std::abs(v.coefficient(-k) - std::conj(c)) < 1e-14);
      CHECK(std::abs(c) <= v.decay_constant() * std::exp(-v.rho() * std::abs(k)) * (1 + 1e-12));
    }
    CHECK(v(0.3) == Approx(std::exp(std::cos(2 * kPi * 0.3))).epsilon(1e-12));
    const double h = v.rho() / 5 * (1 - 1e-9);
    double sup = 0;
    for (int i = 0; i < 512; ++i)
      for (double s : {-h, h}) sup = std::max(sup, std::abs(v(std::complex<double>(i / 512.0, s))));
    CHECK(v.sup_bound() >= sup);
  }

  TEST_CASE("derivative matches a centred difference") {
    const auto v = AnalyticPotential::cosine();
    for (double x : {0.1, 0.4, 0.9}) {
      const double h = 1e-6;
      CHECK(v.derivative(x) == Approx((v(x + h) - v(x - h)) / (2 * h)).epsilon(1e-6));
    }
    CHECK(v.max_abs_derivative() == Approx(2 * kPi).epsilon(1e-6));
  }

  TEST_CASE("potential file round trip") {
    AnalyticPotential v({{0, 0.2}, {1, {0.5, 0.1}}, {-1, {0.5, -0.1}}, {3, 0.05}, {-3, 0.05}}, 2.0);
    std::stringstream buf;
    write_potential(buf, v);
    const auto w = parse_potential(buf);
    CHECK(w.rho() == v.rho());
    for (double x : {0.0, 0.21, 0.77}) CHECK(w(x) == v(x));
  }

  TEST_CASE("potential file errors") {
    std::istringstream missing_pair("rho = 1\n1 = 0.5 0\n");
    CHECK_THROWS_AS(parse_potential(missing_pair), Error);
    std::istringstream garbage("rho = 1\nfoo\n");
    CHECK_THROWS_AS(parse_potential(garbage), Error);
    CHECK_THROWS_AS(resolve_potential("/nonexistent/file.pot"), Error);
    CHECK(resolve_potential("constant:2.5")(0.3) == Approx(2.5));
    CHECK(resolve_potential("zero").is_constant());
  }
}

TEST_SUITE("driver") {
  TEST_CASE("hand orbits") {
    CHECK(skew_orbit(SkewShiftParams(2, 0.3, {0.1, 0.2}), 3)[2] == Approx(0.6).epsilon(1e-15));
    CHECK(skew_orbit(SkewShiftParams(1, 0.25, {0.1}), 4)[3] == Approx(0.1).epsilon(1e-15));
    const double x1 = 0.11, x2 = 0.23, x3 = 0.37;
    const double expect = std::fmod(x1 + 2 * x2 + x3, 1.0);
    CHECK(skew_orbit(SkewShiftParams(3, 0.5, {x1, x2, x3}), 2)[1] == Approx(expect).epsilon(1e-15));
  }

  TEST_CASE("coordinates are reduced into [0, 1)") {
    const SkewShiftParams params(2, 1.3, {-0.25, 2.5});
    CHECK(params.x0[0] == 0.75);
    CHECK(params.x0[1] == 0.5);
    CHECK(params.omega == Approx(0.3));
    CHECK_THROWS_AS(SkewShiftParams(0, 0.1, {}), Error);
    CHECK_THROWS_AS(SkewShiftParams(2, 0.1, {0.1}), Error);
  }

  TEST_CASE("orbit agrees with the closed form up to j = 10^6") {
    for (std::size_t d : {1u, 2u, 3u}) {
      std::vector<double> x0;
      for (std::size_t m = 0; m < d; ++m) x0.push_back(0.1234567 + 0.2 * m);
      const SkewShift driver(SkewShiftParams(d, kGolden, x0));
      const auto theta = driver.phases(1, 1000000);
      double worst = 0;
      for (long long j = 1; j <= 1000000; j += 997) {
        const double exact = oracle::closed_form_orbit(x0, kGolden, j);
        double diff = std::abs(theta[static_cast<std::size_t>(j - 1)] - exact);
        worst = std::max(worst, std::min(diff, 1 - diff));
      }
      CHECK(worst <= 1e-9);
    }
  }

  TEST_CASE("d = 2 closed form in long double for moderate j") {
    const double x = 0.3, y = 0.71;
    const auto theta = skew_orbit(SkewShiftParams(2, kGolden, {x, y}), 2000);
    for (long long j = 1; j <= 2000; j += 37) {
      const long double ex = std::fmod(x + j * static_cast<long double>(y) + j * (j - 1) / 2.0L * kGolden, 1.0L);
      const double diff = std::abs(theta[static_cast<std::size_t>(j - 1)] - static_cast<double>(ex));
      CHECK(std::min(diff, 1 - diff) < 1e-11);
    }
  }

  TEST_CASE("pi_1 of T^j is a translation in the first coordinate") {
    CounterRng rng(11, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const double h = rng.uniform();
      const double x = rng.uniform(), y = rng.uniform();
      const auto a = skew_orbit(SkewShiftParams(2, kGolden, {x, y}), 50);
      const auto b = skew_orbit(SkewShiftParams(2, kGolden, {x + h, y}), 50);
      for (std::size_t j = 0; j < a.size(); ++j) {
        double diff = b[j] - a[j] - h;
        diff -= std::round(diff);
        CHECK(std::abs(diff) < 1e-12);
      }
    }
  }

  TEST_CASE("negative indices and shifted drivers") {
    const SkewShift driver(SkewShiftParams(2, kGolden, {0.2, 0.6}));
    const auto all = driver.phases(-5, 20);
    const auto shifted = driver.shifted(-5)->phases(0, 20);
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == shifted[i]);
    CHECK(driver.phases(0, 1)[0] == Approx(0.2));
    const auto forward = driver.shifted(3)->phases(1, 4);
    const auto direct = driver.phases(4, 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(forward[i] == direct[i]);
  }

  TEST_CASE("rotation driver") {
    const Rotation r(0.1, 0.25);
    const auto th = r.phases(1, 4);
    CHECK(th[3] == Approx(0.1).epsilon(1e-15));
    CHECK(r.shifted(2)->phases(1, 1)[0] == Approx(0.85));
    RotationFamily fam(0.25);
    const double pt[] = {0.5};
    CHECK(fam.at(pt)->phases(1, 1)[0] == Approx(0.75));
  }
}

TEST_SUITE("diophantine") {
  TEST_CASE("golden ratio quotients") {
    const auto cf = continued_fraction(kGolden, 6);
    REQUIRE(cf.quotients.size() == 6);
    for (auto a : cf.quotients) CHECK(a == 1);
    CHECK_FALSE(cf.terminating);
  }

  TEST_CASE("rational omega terminates") {
    const auto cf = continued_fraction(0.5, 10);
    CHECK(cf.terminating);
    REQUIRE(cf.quotients.size() == 1);
    CHECK(cf.quotients[0] == 2);
  }

  TEST_CASE("best approximant against exhaustive search") {
    const auto cf = continued_fraction(0.618034, 20);
    const auto best = best_approximant(cf, 10);
    CHECK(best.p == 5);
    CHECK(best.q == 8);
    CHECK(std::abs(0.618034 - 5.0 / 8.0) <= 1.0 / 80.0);
    for (double w : {kGolden, std::sqrt(2.0) - 1.0, std::numbers::pi - 3.0, 0.2718281828}) {
      const auto c = continued_fraction(w, 30);
      for (long long q_max : {5LL, 50LL, 500LL, 5000LL}) {
        const auto conv = best_approximant(c, q_max);
        const auto [p, q] = oracle::exhaustive_best(w, q_max);
        CHECK(std::abs(std::abs(w * q - p) - std::abs(w * conv.q - conv.p)) <= 1e-12);
        CHECK(conv.q <= q_max);
      }
    }
  }

  TEST_CASE("convergent recurrences and coprimality") {
    const auto cf = continued_fraction(std::numbers::pi - 3.0, 12);
    for (std::size_t k = 0; k < cf.convergents.size(); ++k) {
      const auto [p, q] = cf.convergents[k];
      CHECK(std::gcd(p, q) == 1);
      if (k >= 2) {
        CHECK(p == cf.quotients[k] * cf.convergents[k - 1].p + cf.convergents[k - 2].p);
        CHECK(q == cf.quotients[k] * cf.convergents[k - 1].q + cf.convergents[k - 2].q);
      }
      if (k + 1 < cf.convergents.size()) {
        CHECK(cf.convergents[k + 1].q > q);
        const long double err = std::fabs(static_cast<long double>(std::numbers::pi - 3.0) - static_cast<long double>(p) / q);
        CHECK(err < 1.0L / (static_cast<long double>(q) * cf.convergents[k + 1].q));
      }
    }
  }

  TEST_CASE("diophantine estimates") {
    const auto golden = diophantine_check(continued_fraction(kGolden, 40), 2.0, 10000);
    CHECK(golden.c_omega_estimate > 0.0);
    long double direct = 1e300L;
    for (long long n = 2; n <= 10000; ++n)
      direct = std::min(direct, oracle::dist_int(n * static_cast<long double>(kGolden)) * n * std::pow(std::log(static_cast<long double>(n)), 2.0L));
    CHECK(golden.c_omega_estimate == Approx(static_cast<double>(direct)).epsilon(1e-9));
    const auto half = diophantine_check(continued_fraction(0.5, 10), 2.0, 100);
    CHECK(half.c_omega_estimate == 0.0);
    CHECK(half.worst_n == 2);
    const auto single = diophantine_check(continued_fraction(0.3, 10), 1.5, 2);
    CHECK(single.c_omega_estimate == Approx(0.4 * 2 * std::pow(std::log(2.0), 1.5)).epsilon(1e-12));
  }
}

TEST_SUITE("rng and parallel") {
  TEST_CASE("Philox4x32-10 known answer") {
    // Random123 known-answer vectors
    const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  }

  TEST_CASE("streams are reproducible and distinct") {
    CounterRng a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i) {
      const double u = a.uniform();
      CHECK(u == b.uniform());
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      CHECK(u != c.uniform());
    }
  }

  TEST_CASE("uniform mean and variance") {
    CounterRng r(1, 0);
    double s = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = r.uniform();
      s += u;
      s2 += u * u;
    }
    CHECK(s / n == Approx(0.5).epsilon(0.01));
    CHECK(s2 / n - (s / n) * (s / n) == Approx(1.0 / 12).epsilon(0.01));
  }

  TEST_CASE("parallel_for is schedule independent") {
    std::vector<double> serial(1000), threaded(1000);
    set_worker_count(1);
    parallel_for(serial.size(), [&](std::size_t i) { serial[i] = CounterRng(9, i).uniform(); });
    set_worker_count(4);
    parallel_for(threaded.size(), [&](std::size_t i) { threaded[i] = CounterRng(9, i).uniform(); });
    set_worker_count(0);
    CHECK(serial == threaded);
  }

  TEST_CASE("parallel_for rethrows the lowest failing index") {
    set_worker_count(4);
    try {
      parallel_for(100, [](std::size_t i) {
        if (i % 10 == 3) throw Error(ErrorKind::Numeric, "fail " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const Error& e) {
      CHECK(std::string(e.what()) == "fail 3");
    }
    set_worker_count(0);
  }
}

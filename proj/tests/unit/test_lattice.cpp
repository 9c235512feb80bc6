#include <doctest.h>

#include <cmath>
#include <numbers>

#include "../oracles.hpp"
#include "skewlab/cocycle.hpp"
#include "skewlab/error.hpp"
#include "skewlab/lattice.hpp"
#include "skewlab/rng.hpp"

using namespace skewlab;
using doctest::Approx;

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
constexpr double kPi = std::numbers::pi;

FiniteVolumeOperator random_operator(std::uint64_t stream, std::size_t n, double amplitude) {
  CounterRng rng(123, stream);
  std::vector<double> d(n);
  for (double& v : d) v = amplitude * (2 * rng.uniform() - 1);
  return FiniteVolumeOperator(Interval{1, static_cast<long long>(n)}, d);
}

FiniteVolumeOperator zero_operator(long long n) {
  return FiniteVolumeOperator(Interval{1, n}, std::vector<double>(static_cast<std::size_t>(n), 0.0));
}
}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("building operators") {
    const SkewShift d0(SkewShiftParams(2, kGolden, {0.1, 0.2}));
    const auto z = build_operator(d0, AnalyticPotential::zero(), 1.0, {1, 5});
    CHECK(z.size() == 5);
    for (double v : z.diag()) CHECK(v == 0.0);
    const auto c = build_operator(d0, AnalyticPotential::constant(1.0), 3.0, {1, 2});
    CHECK(c.diag() == std::vector<double>{3.0, 3.0});

    // x = (0, 0), omega = 0.3: theta_1 = 0, theta_2 = 0.3, theta_3 = 0.9
    const SkewShift hand(SkewShiftParams(2, 0.3, {0.0, 0.0}));
    const auto h = build_operator(hand, AnalyticPotential::cosine(), 2.0, {1, 3});
    CHECK(h.diag()[0] == Approx(2.0));
    CHECK(h.diag()[1] == Approx(2 * std::cos(2 * kPi * 0.3)).epsilon(1e-14));
    CHECK(h.diag()[2] == Approx(2 * std::cos(2 * kPi * 0.9)).epsilon(1e-14));
    CHECK(h.diag_at(2) == h.diag()[1]);
    CHECK(h.scale() == Approx(4.0));
    CHECK_THROWS_AS(h.restrict_to({0, 2}), Error);
  }

  TEST_CASE("small determinants") {
    const FiniteVolumeOperator one(Interval{1, 1}, {5.0});
    CHECK(determinant_sequence(one, 2.0).values()[0] == Approx(3.0));
    const double a = 1.7, b = -0.4, e = 0.3;
    const FiniteVolumeOperator two(Interval{1, 2}, {a, b});
    CHECK(determinant_sequence(two, e).values()[1] == Approx((a - e) * (b - e) - 1).epsilon(1e-15));
  }

  TEST_CASE("continuant against cofactor expansion") {
    for (std::uint64_t s = 0; s < 200; ++s) {
      const std::size_t n = 1 + s % 8;
      const auto op = random_operator(s, n, 3.0);
      const double e = 2 * CounterRng(5, s).uniform() - 1;
      const auto values = determinant_sequence(op, e).values();
      for (std::size_t k = 1; k <= n; ++k) {
        const std::vector<double> lead(op.diag().begin(), op.diag().begin() + static_cast<long>(k));
        const long double exact = oracle::cofactor_det(oracle::shifted_matrix(lead, e));
        CHECK(std::fabs(values[k - 1] - exact) <= 1e-10L * std::max(1.0L, std::fabs(exact)));
      }
    }
  }

  TEST_CASE("large-N determinants stay in log form") {
    const auto op = random_operator(7, 600, 1e4);
    const auto seq = determinant_sequence(op, 0.1);
    CHECK(seq.overflow);
    CHECK_THROWS_AS(seq.values(), Error);
    CHECK(std::isfinite(seq.minors.back().log_abs));
  }

  TEST_CASE("continuant and transfer matrix agree") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const std::size_t n = 2 + s;
      const auto op = random_operator(100 + s, n, 2.0);
      const double e = 0.25;
      const auto dets = determinant_sequence(op, e).values();
      TransferAccumulator acc;
      for (double v : op.diag()) acc.push(v, e);
      const auto m = acc.reconstruct();
      // M_n = [[(-1)^n D_n, (-1)^n D'_{n-1}], [(-1)^{n-1} D_{n-1}, ...]]
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      CHECK(m[0] == Approx(sign * dets[n - 1]).epsilon(1e-9));
      CHECK(m[2] == Approx(-sign * dets[n - 2]).epsilon(1e-9));
    }
  }

  TEST_CASE("Green function examples") {
    const FiniteVolumeOperator op(Interval{1, 2}, {3.0, 3.0});
    CHECK(green_entry(op, 0.0, 1, 2) == Approx(0.125).epsilon(1e-15));
    const auto r = random_operator(3, 6, 2.0);
    for (long long i = 1; i <= 6; ++i)
      CHECK(green_entry(r, 1e6, i, i) == Approx(1.0 / (r.diag_at(i) - 1e6)).epsilon(1e-4));
    CHECK_THROWS_AS(green_entry(r, 0.0, 0, 2), Error);
  }

  TEST_CASE("Cramer resolvent against Gauss-Jordan inverse") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const std::size_t n = 1 + s % 8;
      const auto op = random_operator(500 + s, n, 3.0);
      const auto eig = eigenvalues(op);
      double e = 0.37 + 0.01 * static_cast<double>(s);
      for (double ev : eig)
        if (std::abs(ev - e) < 1e-3) e += 2e-3;
      const Resolvent g(op, e);
      const auto inv = oracle::gauss_inverse(oracle::shifted_matrix(op.diag(), e));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          CHECK(std::fabs(g.entry(i, j) - inv[i][j]) <= 1e-8L * std::max(1.0L, std::fabs(inv[i][j])));
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = g.entry(i, j);
        const auto prod = op.apply_shifted(col, e);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(prod[i] - (i == j ? 1.0 : 0.0)) <= 1e-8);
      }
    }
  }

  TEST_CASE("singular resolvent carries a distance estimate") {
    const auto op = zero_operator(3);
    try {
      green_entry(op, std::sqrt(2.0), 1, 1);
      FAIL("expected a singular resolvent");
    } catch (const ResolventSingularError& e) {
      CHECK(e.kind() == ErrorKind::ResolventSingular);
      CHECK(e.distance_estimate() < 1e-12);
    }
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto r = random_operator(900 + s, 12, 3.0);
      const auto eig = eigenvalues(r);
      const double e = eig[5] + 1e-4 * (1 + static_cast<double>(s % 5));
      double dist = 1e300;
      for (double ev : eig) dist = std::min(dist, std::abs(ev - e));
      const double est = Resolvent(r, e).distance_estimate();
      CHECK(est <= 2 * dist);
      CHECK(est >= dist / 2);
    }
  }

  TEST_CASE("eigenvalue examples") {
    const auto two = eigenvalues(zero_operator(2));
    CHECK(two[0] == Approx(-1.0));
    CHECK(two[1] == Approx(1.0));
    const auto three = eigenvalues(zero_operator(3));
    CHECK(three[0] == Approx(-std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(three[1]) < 1e-14);
    CHECK(three[2] == Approx(std::sqrt(2.0)).epsilon(1e-14));
    const auto hundred = eigenvalues(zero_operator(100));
    for (int k = 1; k <= 100; ++k) CHECK(std::abs(hundred[static_cast<std::size_t>(k - 1)] + 2 * std::cos(k * kPi / 101)) <= 1e-10);
  }

  TEST_CASE("eigenvalues against Jacobi, Gershgorin and Sturm counts") {
    for (std::uint64_t s = 0; s < 30; ++s) {
      const std::size_t n = 2 + s;
      const auto op = random_operator(1000 + s, n, 5.0);
      const auto ours = eigenvalues(op);
      const auto ref = oracle::jacobi_eigenvalues(oracle::shifted_matrix(op.diag(), 0.0));
      const auto [mn, mx] = std::minmax_element(op.diag().begin(), op.diag().end());
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(ours[i] == Approx(ref[i]).epsilon(1e-11).scale(op.scale()));
        CHECK(ours[i] >= *mn - 2);
        CHECK(ours[i] <= *mx + 2);
      }
      CounterRng rng(2, s);
      for (int t = 0; t < 10; ++t) {
        const double e = (*mn - 2.5) + (*mx - *mn + 5) * rng.uniform();
        const auto below = static_cast<std::size_t>(std::count_if(ours.begin(), ours.end(), [e](double v) { return v < e; }));
        CHECK(sturm_count(op, e) == below);
      }
    }
  }

  TEST_CASE("eigenpairs: residuals and orthogonality") {
    const SkewShift driver(SkewShiftParams(2, kGolden, {0.3, 0.8}));
    for (double lambda : {0.5, 3.0, 1e4}) {
      const auto op = build_operator(driver, AnalyticPotential::cosine(), lambda, {1, 120});
      const auto pairs = eigen_all(op);
      for (const auto& p : pairs) {
        CHECK(p.converged);
        CHECK(p.residual <= 1e-8 * op.scale());
      }
      for (std::size_t i = 0; i < pairs.size(); i += 7)
        for (std::size_t j = i + 1; j < pairs.size(); j += 5) {
          double dot = 0;
          for (std::size_t k = 0; k < op.size(); ++k) dot += pairs[i].vector[k] * pairs[j].vector[k];
          CHECK(std::abs(dot) <= 1e-8);
        }
    }
    const auto deg = eigen_all(FiniteVolumeOperator(Interval{1, 2}, {0.0, 0.0}));
    CHECK(deg[0].value == Approx(-1.0));
    CHECK(deg[1].value == Approx(1.0));
  }

  TEST_CASE("reconstruction identity") {
    const SkewShift driver(SkewShiftParams(2, kGolden, {0.15, 0.45}));
    const auto op = build_operator(driver, AnalyticPotential::cosine(), 5.0, {1, 60});
    const auto pairs = eigen_all(op);
    CounterRng rng(8, 0);
    int checked = 0;
    for (int t = 0; t < 50; ++t) {
      const auto& pair = pairs[static_cast<std::size_t>(rng.uniform() * 60)];
      const long long a = 2 + static_cast<long long>(rng.uniform() * 30);
      const long long b = a + static_cast<long long>(rng.uniform() * static_cast<double>(58 - a));
      double dist = 1e300;
      for (double e : eigenvalues(op.restrict_to({a, b}))) dist = std::min(dist, std::abs(e - pair.value));
      if (dist < 1e-6) continue;
      CHECK(reconstruct_check(op, pair, {a, b}) <= 1e-8);
      ++checked;
    }
    CHECK(checked >= 25);

    const auto free = zero_operator(10);
    EigenPair ground{-2 * std::cos(kPi / 11), std::vector<double>(10), 0.0, true};
    double norm = 0;
    for (int n = 1; n <= 10; ++n) norm += std::pow(std::sin(n * kPi / 11), 2);
    for (int n = 1; n <= 10; ++n) ground.vector[static_cast<std::size_t>(n - 1)] = std::sin(n * kPi / 11) / std::sqrt(norm);
    CHECK(reconstruct_check(free, ground, {2, 9}) <= 1e-10);

    auto noisy = ground;
    for (std::size_t i = 0; i < noisy.vector.size(); ++i) noisy.vector[i] += 1e-3 * std::cos(3.0 * static_cast<double>(i));
    CHECK(reconstruct_check(free, noisy, {2, 9}) > 1e-4);
    CHECK_THROWS_AS(reconstruct_check(free, ground, {1, 9}), Error);
  }

  TEST_CASE("decay fits") {
    EigenPair synthetic{0.0, std::vector<double>(101), 0.0, true};
    for (int n = 0; n < 101; ++n) synthetic.vector[static_cast<std::size_t>(n)] = std::exp(-0.7 * std::abs(n - 50));
    const auto fit = decay_fit(synthetic);
    CHECK(fit.rate == Approx(0.7).epsilon(1e-6));
    CHECK(fit.r2 == Approx(1.0).epsilon(1e-9));
    CHECK(fit.center == 50);

    EigenPair flat{0.0, std::vector<double>(64, 0.125), 0.0, true};
    bool undefined = false;
    try {
      const auto f = decay_fit(flat);
      CHECK(std::abs(f.rate) < 1e-12);
      CHECK(f.r2 < 1e-6);
    } catch (const Error& e) {
      undefined = e.kind() == ErrorKind::FitUndefined;
      CHECK(undefined);
    }

    EigenPair spike{0.0, std::vector<double>(32, 0.0), 0.0, true};
    spike.vector[3] = 1.0;
    CHECK_THROWS_AS(decay_fit(spike), Error);
  }

  TEST_CASE("localisation at large coupling") {
    const SkewShift driver(SkewShiftParams(2, kGolden, sample_torus_point(2, 21, 0)));
    const double lambda = 1e4;
    const auto op = build_operator(driver, AnalyticPotential::cosine(), lambda, {1, 512});
    const auto pairs = eigen_all(op);
    for (std::size_t k = 251; k < 261; ++k) {
      const auto fit = decay_fit(pairs[k]);
      CHECK(fit.rate >= 0.5 * std::log(lambda));
      CHECK(fit.r2 >= 0.9);
    }
  }

  TEST_CASE("Green decay scan") {
    const SkewShiftFamily fam(2, kGolden);
    const auto vac = green_decay_scan(fam, AnalyticPotential::zero(), 1.0, 0.0, 40, 10, 1);
    CHECK(vac.vacuous);
    CHECK(vac.threshold == 1.0);
    CHECK(vac.violation_fraction == 0.0);
    const auto scan = green_decay_scan(fam, AnalyticPotential::cosine(), 1e4, 0.0, 100, 100, 3);
    CHECK(scan.violation_fraction <= 0.1);
    CHECK(scan.tested + scan.singular_samples == 100);
    CHECK(scan.threshold == Approx(std::exp(-100 * std::log(1e4) / 20)));
    CHECK_THROWS_AS(green_decay_scan(fam, AnalyticPotential::cosine(), 10, 0, 10, 1, 1), Error);
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "lq/dvr.hpp"
#include "lq/error.hpp"

using namespace lq;
constexpr double pi = std::numbers::pi;

TEST_CASE("grid geometry") {
  const Grid g = build_grid(3, 299);
  CHECK(g.half_length == doctest::Approx(3 * pi / 2).epsilon(1e-15));
  CHECK(g.dx == doctest::Approx(3 * pi / 300).epsilon(1e-15));
  CHECK(g.dx * (g.n_points + 1) == doctest::Approx(2 * g.half_length).epsilon(1e-14));
  CHECK(g.points.front() == doctest::Approx(-g.half_length + g.dx));
  CHECK(g.points.back() < g.half_length);
  for (int a = 1; a < g.n_points; ++a) CHECK(g.points[a] - g.points[a - 1] == doctest::Approx(g.dx));

  CHECK(build_grid(5, 499).half_length == doctest::Approx(5 * pi / 2));
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(build_grid(4, 300), ConfigError);
  CHECK_THROWS_AS(build_grid(-3, 300), ConfigError);
  CHECK_THROWS_AS(build_grid(3, 63), ConfigError);
  CHECK_THROWS_AS(build_grid(5, 100), ConfigError);  // fewer than 32 points per well
  CHECK_NOTHROW(build_grid(3, 96));
}

TEST_CASE("kinetic matrix matches the sine-mode expansion") {
  // T = sum_n S_an k_n^2 S_nb with S_an = sqrt(2/(N+1)) sin(a n pi/(N+1))
  const Grid g = build_grid(3, 96);
  const Eigen::MatrixXd t = sine_dvr_kinetic(g);
  const int n = g.n_points;
  const double L = 2 * g.half_length;
  double worst = 0.0;
  for (int a = 1; a <= n; a += 7) {
    for (int b = 1; b <= n; ++b) {
      long double acc = 0;
      for (int m = 1; m <= n; ++m) {
        const long double k = m * pi / L;
        acc += 2.0L / (n + 1) * std::sin(a * m * pi / (n + 1)) * std::sin(b * m * pi / (n + 1)) * k * k;
      }
      worst = std::max(worst, std::abs(static_cast<double>(acc) - t(a - 1, b - 1)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("box spectrum is exact") {
  const Grid g = build_grid(3, 300);
  const Eigen::MatrixXd h = sp_hamiltonian(g, 0.0);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues()(0) == doctest::Approx(1.0 / 9.0).epsilon(1e-10));
  for (int n = 1; n <= 20; ++n) {
    const double exact = n * n / 9.0;
    CHECK(std::abs(es.eigenvalues()(n - 1) - exact) / exact < 1e-10);
  }
}

TEST_CASE("lattice spectrum: lowest band and grid convergence") {
  for (double V0 : {4.0, 10.0, 20.0}) {
    const Eigen::MatrixXd h1 = sp_hamiltonian(build_grid(3, 300), V0);
    const Eigen::MatrixXd h2 = sp_hamiltonian(build_grid(3, 600), V0);
    CHECK((h1 - h1.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(h1, Eigen::EigenvaluesOnly), e2(h2, Eigen::EigenvaluesOnly);
    for (int i = 0; i < 15; ++i) CHECK(std::abs(e1.eigenvalues()(i) - e2.eigenvalues()(i)) < 1e-9);
    if (V0 == 10.0) {
      const auto& ev = e1.eigenvalues();
      const double spread = ev(2) - ev(0), gap = ev(3) - ev(2);
      CHECK(spread < 0.05 * gap);
    }
  }
  CHECK_THROWS_AS(sp_hamiltonian(build_grid(3, 300), -1.0), ConfigError);
}

TEST_CASE("effective 1D interaction") {
  CHECK(effective_interaction_1d(0.0, 1.0) == 0.0);
  // independent evaluation with |zeta(1/2)| to 30 digits
  CHECK(effective_interaction_1d(0.01, 1.0) == doctest::Approx(0.0202086802024527405735595246500).epsilon(1e-14));
  const double pole = std::numbers::sqrt2 * 2.0 / kZetaHalfAbs;
  CHECK_THROWS_AS(effective_interaction_1d(pole, 2.0), ResonanceError);
  CHECK_THROWS_AS(effective_interaction_1d(0.1, 0.0), ConfigError);
}

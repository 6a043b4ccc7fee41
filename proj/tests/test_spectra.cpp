#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lq/error.hpp"
#include "lq/spectra.hpp"
#include "lq/system.hpp"

using namespace lq;

namespace {

ScanPoint two_level(double g, double delta, Parity upper_parity) {
  ScanPoint p;
  p.g = g;
  const double e = std::sqrt(g * g + delta * delta);
  if (upper_parity == Parity::even) {
    p.energies = Eigen::Vector2d(-e, e);
  } else {
    // opposite parity: diabatic lines cross, sorted order swaps labels
    const double a = g, b = -g;
    p.energies = Eigen::Vector2d(std::min(a, b), std::max(a, b));
  }
  p.parity = {Parity::even, upper_parity};
  if (upper_parity == Parity::odd && g > 0) p.parity = {Parity::odd, Parity::even};
  p.dominant = {g < 0 ? ClassLabel::T : ClassLabel::SE, g < 0 ? ClassLabel::SE : ClassLabel::T};
  p.dominant_weight = {1.0, 1.0};
  return p;
}

GScan family(double delta, Parity upper, double offset) {
  GScan s;
  s.levels = 2;
  for (int i = -20; i <= 20; ++i) s.points.push_back(two_level(0.05 * i + offset, delta, upper));
  return s;
}

System make(double V0, int bands) {
  SystemParams p;
  p.V0 = V0;
  p.n_bands = bands;
  p.allow_shallow = true;
  return build_system(p);
}

}  // namespace

TEST_CASE("synthetic avoided crossing") {
  const double delta = 0.02;
  const auto on_grid = detect_crossings(family(delta, Parity::even, 0.0));
  REQUIRE(on_grid.size() == 1);
  CHECK(on_grid[0].g_star == doctest::Approx(0.0).scale(1));
  CHECK(on_grid[0].delta_e == doctest::Approx(2 * delta).epsilon(1e-12));
  CHECK(on_grid[0].wide);
  CHECK(on_grid[0].class_left == ClassLabel::T);
  CHECK(on_grid[0].class_right == ClassLabel::SE);
  CHECK(on_grid[0].involves(ClassLabel::SE));

  const PointResolver exact = [&](double g) { return two_level(g, delta, Parity::even); };
  const auto refined = detect_crossings(family(delta, Parity::even, 0.013), exact);
  REQUIRE(refined.size() == 1);
  CHECK(std::abs(refined[0].g_star) < 1e-5);
  CHECK(refined[0].delta_e == doctest::Approx(2 * delta).epsilon(1e-8));
  CHECK(refined[0].bracketed);

  const auto narrow = detect_crossings(family(0.004, Parity::even, 0.0));
  REQUIRE(narrow.size() == 1);
  CHECK_FALSE(narrow[0].wide);
  CHECK(narrow[0].kind() == "narrow");
}

TEST_CASE("opposite-parity crossings are not reported") {
  CHECK(detect_crossings(family(0.0, Parity::odd, 0.013)).empty());
}

TEST_CASE("scan invariants on the triple well") {
  const System s = make(10.0, 2);
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.02 * i);
  const GScan serial = scan_g(s.ham, s.parity, s.tags, grid, 25, 1);
  const GScan parallel = scan_g(s.ham, s.parity, s.tags, grid, 25, 4);
  const double wnorm = s.ham.w_row_sum_bound();
  double prev_s = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = serial.points[i];
    REQUIRE(p.energies.size() == 25);
    CHECK((p.energies - parallel.points[i].energies).cwiseAbs().maxCoeff() == 0.0);
    for (int k = 1; k < 25; ++k) CHECK(p.energies(k) >= p.energies(k - 1));
    if (i > 0) {
      const double jump = (p.energies - serial.points[i - 1].energies).cwiseAbs().maxCoeff();
      CHECK(jump <= wnorm * 0.02 + 1e-12);
    }
    // S weight of the ground state grows monotonically through the SF -> MI crossover
    const Eigenpairs ep = lowest_eigenpairs(s.ham, grid[i], 1);
    const double w_s = class_weights(ep.vectors.col(0), s.tags)[static_cast<int>(ClassLabel::S)];
    CHECK(w_s > prev_s);
    prev_s = w_s;
  }
  CHECK(serial.points.back().dominant[0] == ClassLabel::S);
  CHECK(serial.points.front().parity[0] == Parity::even);
  CHECK_THROWS_AS(scan_g(s.ham, s.parity, s.tags, {0.5, 0.2}, 5), ConfigError);
}

TEST_CASE("crossing width is stable under grid refinement") {
  const System s = make(10.0, 2);
  const PointResolver resolve = [&](double g) { return analyze_point(s.ham, s.parity, s.tags, g, 25); };
  auto grid = [](double step) {
    std::vector<double> g;
    for (int i = 0; i * step <= 4.0 + 1e-12; ++i) g.push_back(i * step);
    return g;
  };
  const auto coarse = detect_crossings(scan_g(s.ham, s.parity, s.tags, grid(0.04), 25, 4), resolve);
  const auto fine = detect_crossings(scan_g(s.ham, s.parity, s.tags, grid(0.02), 25, 4), resolve);
  int matched = 0;
  for (const auto& c : coarse) {
    if (!c.wide || !c.bracketed) continue;
    for (const auto& f : fine) {
      if (f.parity == c.parity && f.rank == c.rank && std::abs(f.g_star - c.g_star) < 0.02) {
        CHECK(std::abs(f.delta_e - c.delta_e) <= 0.05 * c.delta_e);
        ++matched;
      }
    }
  }
  CHECK(matched > 0);
}

TEST_CASE("CSV layout") {
  const GScan s = family(0.02, Parity::even, 0.0);
  std::ostringstream os;
  write_scan_csv(os, s);
  CHECK(os.str().rfind("g,E_1,E_2,parity_1,parity_2,class_1,class_2\n", 0) == 0);
  std::ostringstream oc;
  write_crossings_csv(oc, detect_crossings(s));
  CHECK(oc.str().rfind("pair,g_star,delta_E,kind,class_left,class_right\n1-2,", 0) == 0);
}

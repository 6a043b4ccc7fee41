#include "lq/dvr.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lq/error.hpp"

namespace lq {

Grid build_grid(int m_wells, int n_points) {
  if (m_wells <= 0 || m_wells % 2 == 0) {
    throw ConfigError("m_wells must be a positive odd integer, got " + std::to_string(m_wells));
  }
  if (n_points < 64) {
    throw ConfigError("n_points must be >= 64, got " + std::to_string(n_points));
  }
  if (n_points < kMinPointsPerWell * m_wells) {
    throw ConfigError("n_points = " + std::to_string(n_points) + " under-resolves " +
                      std::to_string(m_wells) + " wells (need >= " +
                      std::to_string(kMinPointsPerWell) + " points per well)");
  }
  Grid g;
  g.m_wells = m_wells;
  g.n_points = n_points;
  g.half_length = m_wells * std::numbers::pi / 2.0;
  g.dx = 2.0 * g.half_length / (n_points + 1);
  g.points.resize(n_points);
  for (int a = 0; a < n_points; ++a) g.points[a] = -g.half_length + (a + 1) * g.dx;
  return g;
}

Eigen::MatrixXd sine_dvr_kinetic(const Grid& grid) {
  const int n = grid.n_points;
  const double np1 = n + 1.0;
  const double L = grid.box_length();
  const double pre = std::numbers::pi * std::numbers::pi / (2.0 * L * L);
  const double h = std::numbers::pi / (2.0 * np1);
  Eigen::MatrixXd t(n, n);
  for (int i = 1; i <= n; ++i) {
    const double si = std::sin(2.0 * h * i);
    t(i - 1, i - 1) = pre * ((2.0 * np1 * np1 + 1.0) / 3.0 - 1.0 / (si * si));
    for (int j = 1; j < i; ++j) {
      const double sm = std::sin(h * (i - j));
      const double sp = std::sin(h * (i + j));
      const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      const double v = pre * sign * (1.0 / (sm * sm) - 1.0 / (sp * sp));
      t(i - 1, j - 1) = v;
      t(j - 1, i - 1) = v;
    }
  }
  return t;
}

Eigen::MatrixXd sp_hamiltonian(const Grid& grid, double V0) {
  if (!(V0 >= 0.0)) throw ConfigError("lattice depth V0 must be >= 0");
  Eigen::MatrixXd h = sine_dvr_kinetic(grid);
  for (int a = 0; a < grid.n_points; ++a) {
    const double s = std::sin(grid.points[a]);
    h(a, a) += V0 * s * s;
  }
  return h;
}

double effective_interaction_1d(double a0, double a_perp) {
  if (!(a_perp > 0.0)) throw ConfigError("a_perp must be positive");
  const double denom = 1.0 - kZetaHalfAbs * a0 / (std::numbers::sqrt2 * a_perp);
  if (std::abs(denom) < 1e-12) {
    throw ResonanceError("confinement-induced resonance: a0 = sqrt(2) a_perp / |zeta(1/2)|");
  }
  return 2.0 * a0 / (a_perp * a_perp) / denom;
}

}  // namespace lq

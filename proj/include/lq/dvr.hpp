#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lq {

// Sine-DVR discretization of the hard-walled lattice [-m*pi/2, m*pi/2].
// Lengths are in units of 1/k; the walls sit at +-half_length and are not
// grid nodes.
struct Grid {
  int m_wells = 0;
  int n_points = 0;
  double half_length = 0.0;
  double dx = 0.0;
  std::vector<double> points;

  double box_length() const { return 2.0 * half_length; }
  // Node index of the mirror image x -> -x.
  int mirror(int alpha) const { return n_points - 1 - alpha; }
};

inline constexpr int kMinPointsPerWell = 32;

// Throws ConfigError for even/nonpositive m_wells, n_points < 64, or fewer
// than kMinPointsPerWell nodes per well.
Grid build_grid(int m_wells, int n_points);

// Dense single-particle Hamiltonian -d^2/dx^2 + V0 sin^2(x) on the grid
// nodes (energies in E_R). The kinetic part is the closed-form sine-DVR
// matrix, exact for the box.
Eigen::MatrixXd sp_hamiltonian(const Grid& grid, double V0);

Eigen::MatrixXd sine_dvr_kinetic(const Grid& grid);

// Olshanii effective 1D coupling with lengths in 1/k,
//   g1D = 2 a0 / a_perp^2 * (1 - |zeta(1/2)| a0 / (sqrt(2) a_perp))^-1,
// i.e. 2 hbar^2 a0 / (M a_perp^2) with hbar = M = 1. In the E_R = hbar^2 k^2 / 2M
// units of the lattice Hamiltonian (hbar^2 / M = 2) the coupling is twice this.
// Throws ResonanceError at the pole.
double effective_interaction_1d(double a0, double a_perp);

inline constexpr double kZetaHalfAbs = 1.4603545088095868;

}  // namespace lq

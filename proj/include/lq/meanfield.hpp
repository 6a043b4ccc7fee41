#pragma once

#include <vector>

#include <Eigen/Core>

#include "lq/dvr.hpp"
#include "lq/dynamics.hpp"

namespace lq {

// Gross-Pitaevskii reduction: one orbital phi on the grid, stored as unit-norm
// DVR coefficients (phi(x_a) = c_a / sqrt(dx)). Nonlinearity g (N-1) |phi|^2.
struct MfState {
  Eigen::VectorXcd c;
  int n_particles = 0;
};

struct MfOptions {
  double dt = 0.001;
  double norm_limit = 1e-6;
  double scf_tol = 1e-12;
  int scf_max_iter = 500;
};

// Self-consistent lowest orbital of T + V + g (N-1) |phi|^2.
MfState mf_ground_state(const Grid& grid, double V0, double g, int n_particles, const MfOptions& opt = {});

// Energy functional per particle.
double mf_energy(const Grid& grid, double V0, double g, const MfState& s);

using MfObserver = std::function<void(double t, const MfState& s)>;

struct MfStats {
  long steps = 0;
  double max_norm_drift = 0.0;
};

// Strang split-step with the kinetic part applied exactly in the sine basis.
// Samples at k * dt_out. Throws NumericalError when the norm drifts by more
// than opt.norm_limit.
MfStats evolve_mf(const Grid& grid, double V0, const QuenchProtocol& p, const MfState& phi0,
                  const MfObserver& observer, const MfOptions& opt = {});

// |<phi0|phi>|^(2N)
double mf_fidelity(const MfState& phi0, const MfState& phi);

// 1 - (weight of phi in the band-0 subspace)^N; `band0` has orthonormal columns.
double mf_excited_fraction(const Eigen::MatrixXd& band0, const MfState& phi);

}  // namespace lq

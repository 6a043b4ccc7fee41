#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lq/fock.hpp"
#include "lq/linalg.hpp"
#include "lq/mbham.hpp"

namespace lq {

// Linear interaction quench g(t) = g_i + (g_f - g_i) t / tau on [0, tau],
// g_f afterwards. tau = 0 is an abrupt quench.
struct QuenchProtocol {
  double g_i = 0.0;
  double g_f = 0.0;
  double tau = 0.0;
  double T = 500.0;
  double dt_out = 0.1;
  double dt_int = 0.0;  // ramp substep; 0 selects default_dt_int()

  double g_at(double t) const;
  double delta_g() const { return g_f - g_i; }
  double default_dt_int() const;
  double ramp_step() const { return dt_int > 0 ? dt_int : default_dt_int(); }
  int n_samples() const;  // samples at k * dt_out, k = 0 .. n_samples - 1
  double sample_time(int k) const { return k * dt_out; }
  void validate() const;  // throws ConfigError
};

inline constexpr double kNormDriftLimit = 1e-8;

using StateObserver = std::function<void(double t, const Eigen::VectorXcd& psi)>;

struct EvolutionStats {
  long ramp_substeps = 0;
  long krylov_steps = 0;
  double max_norm_drift = 0.0;
};

// Lowest eigenvector of H(g); throws NumericalError if it is not parity even.
Eigen::VectorXd ground_state(const HamiltonianPair& h, const SignedPermutation& parity, double g,
                             const EigenOptions& opt = {});

// Propagates psi across a linear ramp g_from -> g_to of length `duration`
// using midpoint-coupling substeps of at most dt_int. time_sign = -1 applies
// the inverse propagator (substeps traversed in reverse order).
EvolutionStats propagate_linear_ramp(const HamiltonianPair& h, double g_from, double g_to, double duration,
                                     double dt_int, Eigen::VectorXcd& psi, int time_sign = +1,
                                     const KrylovOptions& opt = {});

// Evolves psi0 under the protocol and calls `observer` at every sample time
// (including t = 0). Throws NumericalError on norm drift beyond 1e-8.
EvolutionStats evolve_quench(const HamiltonianPair& h, const QuenchProtocol& p, const Eigen::VectorXcd& psi0,
                             const StateObserver& observer, const KrylovOptions& opt = {});

// Stores every sample.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
  StateObserver recorder();
};

// Raw dump: little-endian (re, im) double pairs, state after state, plus a
// JSON header listing the basis order.
void write_state_dump(const std::string& bin_path, const std::string& header_path, const FockBasis& basis,
                      const Trajectory& traj);

}  // namespace lq

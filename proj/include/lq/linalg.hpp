#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "lq/mbham.hpp"

namespace lq {

// y = A x for a real symmetric operator.
using RealOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct Eigenpairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // unit-norm columns
  double max_residual = 0.0;
};

struct EigenOptions {
  std::size_t dense_threshold = 3000;  // dense solve below this dimension
  double tol = 1e-8;                   // on ||A v - lambda v||
  int max_restarts = 200;
  int basis_size = 0;  // 0 selects max(2K + 40, 100)
  std::uint64_t seed = 20170715;
};

// Thick-restart Lanczos (Rayleigh-Ritz on a fully reorthogonalized Krylov
// basis). Deterministic for a fixed seed.
Eigenpairs lanczos_lowest(const RealOperator& op, std::size_t dim, int k, const EigenOptions& opt = {});

Eigenpairs dense_lowest(const Eigen::MatrixXd& a, int k);

// K lowest eigenpairs of H0 + g W; throws ConvergenceError if the residual
// bound is not met.
Eigenpairs lowest_eigenpairs(const HamiltonianPair& h, double g, int k, const EigenOptions& opt = {});

struct KrylovOptions {
  double tol = 1e-10;  // local error estimate per step
  int max_dim = 40;
  double min_step = 1e-9;
};

// psi <- exp(-i H(g) dt) psi via a short-iteration Lanczos approximation with
// adaptive subspace size. A step whose error estimate is not met within
// max_dim vectors is split in halves; throws NumericalError on step-size
// underflow. Returns the number of Krylov steps taken.
int krylov_propagate(const HamiltonianPair& h, double g, double dt, Eigen::VectorXcd& psi,
                     const KrylovOptions& opt = {});

// Same on a dense Hermitian operator (used by the single-particle oracle paths).
int krylov_propagate(const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)>& op, double dt,
                     Eigen::VectorXcd& psi, const KrylovOptions& opt = {});

}  // namespace lq

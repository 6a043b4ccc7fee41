#include <doctest.h>

#include <cmath>
#include <complex>

#include "lq/error.hpp"
#include "lq/linalg.hpp"
#include "lq/meanfield.hpp"
#include "lq/spbands.hpp"

using namespace lq;

TEST_CASE("stationary box orbital") {
  const Grid g = build_grid(3, 300);
  const MfState phi0 = mf_ground_state(g, 0.0, 0.0, 3);
  QuenchProtocol p;
  p.T = 10;
  double worst = 0.0;
  evolve_mf(g, 0.0, p, phi0, [&](double, const MfState& s) { worst = std::max(worst, 1.0 - std::abs(phi0.c.dot(s.c))); });
  CHECK(worst < 1e-8);
}

TEST_CASE("linear limit matches Krylov propagation") {
  const Grid g = build_grid(3, 300);
  const Eigen::MatrixXd h = sp_hamiltonian(g, 10.0);
  const auto sp = solve_sp(h, 3);
  const WannierSet wan = build_wannier(sp, 0, g);
  MfState phi0;
  phi0.c = wan.orbitals.col(0).cast<std::complex<double>>();
  phi0.n_particles = 3;
  QuenchProtocol p;
  p.T = 2.0;
  p.dt_out = 0.5;
  std::vector<Eigen::VectorXcd> mf;
  MfOptions opt;
  opt.dt = 2.5e-4;
  evolve_mf(g, 10.0, p, phi0, [&](double, const MfState& s) { mf.push_back(s.c); }, opt);
  const std::function<void(const Eigen::VectorXcd&, Eigen::VectorXcd&)> op =
      [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { y = h.cast<std::complex<double>>() * x; };
  Eigen::VectorXcd psi = phi0.c;
  double worst = 0.0;
  for (std::size_t k = 1; k < mf.size(); ++k) {
    krylov_propagate(op, p.dt_out, psi);
    worst = std::max(worst, (psi - mf[k]).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("self-consistent ground state") {
  const Grid g = build_grid(3, 300);
  const MfState s = mf_ground_state(g, 10.0, 2.0, 3);
  CHECK(s.c.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::VectorXd c = s.c.real();
  Eigen::VectorXd hc = sp_hamiltonian(g, 10.0) * c;
  hc += 2.0 * 2 / g.dx * c.cwiseAbs2().cwiseProduct(c);
  const double mu = c.dot(hc);
  CHECK((hc - mu * c).norm() < 1e-8);
  // repulsion lowers the peak density relative to the linear ground state
  const MfState s0 = mf_ground_state(g, 10.0, 0.0, 3);
  CHECK(s.c.cwiseAbs().maxCoeff() < s0.c.cwiseAbs().maxCoeff());
  CHECK(mf_energy(g, 10.0, 2.0, s) > mf_energy(g, 10.0, 0.0, s0));
  CHECK_THROWS_AS(mf_ground_state(g, 10.0, 1.0, 0), ConfigError);
}

TEST_CASE("norm, fidelity and excitation fraction") {
  const Grid g = build_grid(3, 300);
  const auto sp = solve_sp(sp_hamiltonian(g, 10.0), 3);
  const MfState phi0 = mf_ground_state(g, 10.0, 0.0, 3);
  CHECK(mf_fidelity(phi0, phi0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(mf_excited_fraction(sp.states, phi0)) < 1e-12);
  QuenchProtocol p;
  p.g_f = 2.0;
  p.tau = 8;
  p.T = 50;
  double fmin = 1.0, emax = 0.0;
  const MfStats st = evolve_mf(g, 10.0, p, phi0, [&](double, const MfState& s) {
    fmin = std::min(fmin, mf_fidelity(phi0, s));
    emax = std::max(emax, mf_excited_fraction(sp.states, s));
  });
  CHECK(st.max_norm_drift < 1e-6);
  CHECK(fmin < 0.99);
  CHECK(fmin >= 0.0);
  CHECK(emax > 0.0);
  CHECK(emax < 1.0);
}

#include "lq/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lq/error.hpp"

namespace lq {

double QuenchProtocol::g_at(double t) const {
  if (tau <= 0.0 || t >= tau) return g_f;
  if (t <= 0.0) return g_i;
  return g_i + (g_f - g_i) * t / tau;
}

double QuenchProtocol::default_dt_int() const { return std::min(0.01, 0.005 * std::min(1.0, tau)); }

int QuenchProtocol::n_samples() const { return static_cast<int>(std::floor(T / dt_out + 1e-9)) + 1; }

void QuenchProtocol::validate() const {
  if (!(tau >= 0.0)) throw ConfigError("tau must be >= 0");
  if (!(T > 0.0)) throw ConfigError("T must be > 0");
  if (tau > T) throw ConfigError("tau must not exceed T");
  if (!(dt_out > 0.0)) throw ConfigError("dt_out must be > 0");
  if (dt_int < 0.0) throw ConfigError("dt_int must be >= 0");
  if (!std::isfinite(g_i) || !std::isfinite(g_f)) throw ConfigError("g_i and g_f must be finite");
}

Eigen::VectorXd ground_state(const HamiltonianPair& h, const SignedPermutation& parity, double g,
                             const EigenOptions& opt) {
  const int k = std::min<int>(2, static_cast<int>(h.dimension()) - 1);
  Eigenpairs ep = lowest_eigenpairs(h, g, std::max(k, 1), opt);
  Eigen::VectorXd v = ep.vectors.col(0);
  if (k >= 2 && ep.values(1) - ep.values(0) < 1e-10 * std::max(1.0, std::abs(ep.values(0)))) {
    throw DegeneracyError("ground state is degenerate at g = " + std::to_string(g));
  }
  const double pv = v.dot(parity.apply(v));
  if (std::abs(pv - 1.0) > 1e-8) {
    throw NumericalError("ground state parity expectation " + std::to_string(pv) + " at g = " + std::to_string(g));
  }
  return v;
}

EvolutionStats propagate_linear_ramp(const HamiltonianPair& h, double g_from, double g_to, double duration,
                                     double dt_int, Eigen::VectorXcd& psi, int time_sign,
                                     const KrylovOptions& opt) {
  EvolutionStats st;
  if (duration <= 0.0) return st;
  if (!(dt_int > 0.0)) throw ConfigError("dt_int must be > 0");
  const long n = static_cast<long>(std::ceil(duration / dt_int - 1e-9));
  const double h_step = duration / static_cast<double>(n);
  auto g_mid = [&](long j) { return g_from + (g_to - g_from) * (static_cast<double>(j) + 0.5) / static_cast<double>(n); };
  for (long s = 0; s < n; ++s) {
    const long j = time_sign > 0 ? s : n - 1 - s;
    st.krylov_steps += krylov_propagate(h, g_mid(j), time_sign * h_step, psi, opt);
  }
  st.ramp_substeps = n;
  return st;
}

EvolutionStats evolve_quench(const HamiltonianPair& h, const QuenchProtocol& p, const Eigen::VectorXcd& psi0,
                             const StateObserver& observer, const KrylovOptions& opt) {
  p.validate();
  if (static_cast<std::size_t>(psi0.size()) != h.dimension()) throw ConfigError("initial state has wrong dimension");
  if (std::abs(psi0.norm() - 1.0) > kNormDriftLimit) throw ConfigError("initial state is not normalized");

  EvolutionStats st;
  Eigen::VectorXcd psi = psi0;
  const double dt_int = p.ramp_step();
  auto check_norm = [&](double t) {
    const double drift = std::abs(psi.norm() - 1.0);
    st.max_norm_drift = std::max(st.max_norm_drift, drift);
    if (drift > kNormDriftLimit) {
      throw NumericalError("norm drift " + std::to_string(drift) + " at t = " + std::to_string(t));
    }
  };

  const int ns = p.n_samples();
  if (observer) observer(0.0, psi);
  double t = 0.0;
  for (int k = 1; k < ns; ++k) {
    const double t_next = p.sample_time(k);
    // ramp part of [t, t_next]
    if (t < p.tau) {
      const double t_end = std::min(t_next, p.tau);
      const auto r = propagate_linear_ramp(h, p.g_at(t), p.g_at(t_end), t_end - t, dt_int, psi, +1, opt);
      st.ramp_substeps += r.ramp_substeps;
      st.krylov_steps += r.krylov_steps;
      t = t_end;
    }
    if (t < t_next) {
      st.krylov_steps += krylov_propagate(h, p.g_f, t_next - t, psi, opt);
      t = t_next;
    }
    check_norm(t);
    if (observer) observer(t_next, psi);
  }
  return st;
}

StateObserver Trajectory::recorder() {
  return [this](double t, const Eigen::VectorXcd& psi) {
    times.push_back(t);
    states.push_back(psi);
  };
}

void write_state_dump(const std::string& bin_path, const std::string& header_path, const FockBasis& basis,
                      const Trajectory& traj) {
  static_assert(std::endian::native == std::endian::little, "raw dumps assume a little-endian host");
  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw ConfigError("cannot open " + bin_path);
  for (const auto& s : traj.states) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const double re = s(i).real(), im = s(i).imag();
      bin.write(reinterpret_cast<const char*>(&re), sizeof re);
      bin.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  }
  nlohmann::json hdr;
  hdr["format"] = "complex128 little-endian, (re, im) pairs, one state per sample";
  hdr["dimension"] = basis.dimension();
  hdr["n_particles"] = basis.n_particles();
  hdr["samples"] = traj.times.size();
  hdr["times"] = traj.times;
  nlohmann::json orbs = nlohmann::json::array();
  for (const auto& o : basis.orbitals()) orbs.push_back({{"band", o.band}, {"site", o.site + 1}});
  hdr["orbitals"] = orbs;
  nlohmann::json states = nlohmann::json::array();
  for (std::size_t i = 0; i < basis.dimension(); ++i) {
    const auto occ = basis.occupations(i);
    states.push_back(std::vector<int>(occ.begin(), occ.end()));
  }
  hdr["basis"] = states;
  std::ofstream(header_path) << hdr.dump(1) << '\n';
}

}  // namespace lq

#include "lq/observables.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lq/error.hpp"
#include "lq/meanfield.hpp"

namespace lq {

namespace {

constexpr std::array<ClassLabel, 6> kAllClasses = {ClassLabel::S,  ClassLabel::SP, ClassLabel::T,
                                                   ClassLabel::SE, ClassLabel::HE, ClassLabel::OTHER};

// Sample indices [first, last] with t in [t0, t1] (with rounding slack).
std::pair<std::size_t, std::size_t> window(const std::vector<double>& t, double t0, double t1) {
  const double eps = 1e-9 * std::max(1.0, std::abs(t1));
  std::size_t a = 0;
  while (a < t.size() && t[a] < t0 - eps) ++a;
  std::size_t b = a;
  while (b + 1 < t.size() && t[b + 1] <= t1 + eps) ++b;
  if (a >= t.size() || b <= a) throw ConfigError("averaging window contains fewer than two samples");
  return {a, b};
}

}  // namespace

double fidelity(const Eigen::VectorXcd& psi0, const Eigen::VectorXcd& psi) {
  if (psi0.size() != psi.size()) throw ConfigError("fidelity: basis mismatch");
  return std::norm(psi0.dot(psi));
}

FidelitySeries fidelity(const Trajectory& traj, const Eigen::VectorXcd& psi0) {
  FidelitySeries F;
  F.t = traj.times;
  for (const auto& s : traj.states) F.F.push_back(fidelity(psi0, s));
  return F;
}

double window_mean(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1) {
  if (t.size() != y.size()) throw ConfigError("series length mismatch");
  if (!(t1 > t0)) throw ConfigError("empty averaging window");
  const auto [a, b] = window(t, t0, t1);
  double acc = 0.0;
  for (std::size_t k = a; k < b; ++k) acc += 0.5 * (y[k] + y[k + 1]) * (t[k + 1] - t[k]);
  return acc / (t[b] - t[a]);
}

double mean_fidelity(const FidelitySeries& F, double tau, double T) { return window_mean(F.t, F.F, tau, T); }

double fidelity_variance_K(const FidelitySeries& F, double tau, double T, bool* clipped) {
  const double mean = mean_fidelity(F, tau, T);
  if (clipped) *clipped = false;
  if (mean < 1e-12) {
    if (clipped) *clipped = true;
    return 0.0;
  }
  std::vector<double> dev(F.F.size());
  for (std::size_t k = 0; k < dev.size(); ++k) dev[k] = (F.F[k] - mean) * (F.F[k] - mean);
  return std::sqrt(std::max(0.0, window_mean(F.t, dev, tau, T))) / mean;
}

SpectrumSeries series_spectrum(const std::vector<double>& t, const std::vector<double>& y, double tau, double T,
                               bool hann, double omega_max) {
  if (t.size() != y.size()) throw ConfigError("series length mismatch");
  if (!(T > tau)) throw ConfigError("spectrum window is empty");
  const auto [a, b] = window(t, tau, T);
  const std::size_t n = b - a + 1;
  if (n < static_cast<std::size_t>(kMinSpectrumSamples)) {
    throw ConfigError("fidelity spectrum needs at least 64 samples in the window");
  }
  const double dt = (t[b] - t[a]) / static_cast<double>(n - 1);
  const double mean = window_mean(t, y, tau, T);
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) {
    double w = 1.0;
    if (hann) w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / static_cast<double>(n - 1)));
    f[k] = w * (y[a + k] - mean);
  }
  const double span = T - tau;
  const double nyquist = std::numbers::pi / dt;
  const double wmax = omega_max > 0 ? std::min(omega_max, nyquist) : nyquist;
  SpectrumSeries s;
  for (std::size_t j = 0;; ++j) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(j) / span;
    if (w > wmax) break;
    // recurrence for exp(-i w t_k)
    const std::complex<double> step = std::polar(1.0, -w * dt);
    std::complex<double> ph = std::polar(1.0, -w * t[a]);
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += f[k] * ph;
      ph *= step;
      if ((k & 1023) == 1023) ph = std::polar(1.0, -w * (t[a] + static_cast<double>(k + 1) * dt));
    }
    s.omega.push_back(w);
    s.amplitude.push_back(std::abs(acc) * dt);
  }
  return s;
}

SpectrumSeries fidelity_spectrum(const FidelitySeries& F, double tau, double T, bool hann, double omega_max) {
  return series_spectrum(F.t, F.F, tau, T, hann, omega_max);
}

std::vector<Peak> find_peaks(const SpectrumSeries& s, double rel_threshold) {
  std::vector<Peak> peaks;
  const auto& A = s.amplitude;
  if (A.size() < 3) return peaks;
  const double top = *std::max_element(A.begin() + 1, A.end());
  if (!(top > 0)) return peaks;
  for (std::size_t j = 1; j + 1 < A.size(); ++j) {
    if (!(A[j] > A[j - 1] && A[j] >= A[j + 1])) continue;
    if (A[j] < rel_threshold * top) continue;
    Peak p;
    p.bin = j;
    p.amplitude = A[j];
    const double den = A[j - 1] - 2 * A[j] + A[j + 1];
    const double shift = den != 0.0 ? 0.5 * (A[j - 1] - A[j + 1]) / den : 0.0;
    p.omega = s.omega[j] + std::clamp(shift, -0.5, 0.5) * (s.omega[1] - s.omega[0]);
    peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) { return x.amplitude > y.amplitude; });
  return peaks;
}

const std::vector<double>& PopulationSeries::column(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return columns[i];
  throw ConfigError("unknown population target: " + label);
}

PopulationObserver::PopulationObserver(const System& sys, const std::vector<std::string>& tracked_kets)
    : sys_(&sys) {
  for (const auto& k : tracked_kets) {
    const NumberState n = parse_ket(k, sys.basis.orbitals(), sys.m_wells());
    if (n.total() != sys.n_particles()) throw ConfigError("target " + k + " has the wrong particle number");
    tracked_.push_back(sys.basis.rank(std::span<const int>(n.occupations)));
    series_.labels.push_back(k);
  }
  for (ClassLabel c : kAllClasses) series_.labels.push_back(to_string(c));
  series_.columns.resize(series_.labels.size());
}

void PopulationObserver::operator()(double t, const Eigen::VectorXcd& psi) {
  series_.t.push_back(t);
  std::size_t col = 0;
  for (std::size_t idx : tracked_) series_.columns[col++].push_back(std::norm(psi(static_cast<Eigen::Index>(idx))));
  std::array<double, 6> cls{};
  double p0 = 0.0;
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double p = std::norm(psi(i));
    cls[static_cast<int>(sys_->tags[i].label)] += p;
    if (sys_->band0[i]) p0 += p;
  }
  double sum = 0.0;
  for (double c : cls) {
    series_.columns[col++].push_back(c);
    sum += c;
  }
  series_.P0.push_back(p0);
  series_.class_sum_error.push_back(std::abs(sum / psi.squaredNorm() - 1.0));
}

double excitation_fraction(const std::vector<double>& t, const std::vector<double>& P0, double t0, double t1) {
  return 1.0 - window_mean(t, P0, t0, t1);
}

Eigen::VectorXcd initial_state(const System& sys, double g, const EigenOptions& opt) {
  return ground_state(sys.ham, sys.parity, g, opt).cast<std::complex<double>>();
}

QuenchRecord simulate_quench(const System& sys, const QuenchProtocol& p, const QuenchRecordOptions& opt) {
  p.validate();
  QuenchRecord r;
  r.protocol = p;
  r.V0 = sys.params.V0;
  const Eigen::VectorXcd psi0 = initial_state(sys, p.g_i, opt.eigen);
  r.ground_energy = sys.ham.expectation(p.g_i, psi0);
  PopulationObserver pops(sys, opt.tracked_kets);
  auto obs = [&](double t, const Eigen::VectorXcd& psi) {
    r.F.t.push_back(t);
    r.F.F.push_back(fidelity(psi0, psi));
    pops(t, psi);
    const double eps = 1e-9 * std::max(1.0, p.T);
    if (opt.track_energy) {
      r.energy.push_back(t >= p.tau - eps ? sys.ham.expectation(p.g_f, psi) : std::nan(""));
    }
    const Eigen::VectorXcd ppsi = sys.parity.apply(psi);
    r.parity.push_back(psi.dot(ppsi).real());
    if (opt.keep_states) opt.keep_states->recorder()(t, psi);
  };
  r.stats = evolve_quench(sys.ham, p, psi0, obs, opt.krylov);
  r.populations = pops.series();
  if (p.tau < p.T) {
    r.F_mean = mean_fidelity(r.F, p.tau, p.T);
    r.K = fidelity_variance_K(r.F, p.tau, p.T);
    r.P_exc_post = excitation_fraction(r.populations.t, r.populations.P0, p.tau, p.T);
  }
  r.P_exc = excitation_fraction(r.populations, p.T);
  return r;
}

MfRecord simulate_mf(const System& sys, const QuenchProtocol& p, double mf_dt) {
  MfRecord r;
  r.protocol = p;
  MfOptions opt;
  opt.dt = mf_dt;
  const MfState phi0 = mf_ground_state(sys.grid, sys.params.V0, p.g_i, sys.n_particles(), opt);
  const Eigen::MatrixXd band0 = sys.sp.states.leftCols(sys.m_wells());
  auto obs = [&](double t, const MfState& s) {
    r.F.t.push_back(t);
    r.F.F.push_back(mf_fidelity(phi0, s));
    r.excited.push_back(mf_excited_fraction(band0, s));
  };
  const MfStats st = evolve_mf(sys.grid, sys.params.V0, p, phi0, obs, opt);
  r.max_norm_drift = st.max_norm_drift;
  if (p.tau < p.T) {
    r.F_mean = mean_fidelity(r.F, p.tau, p.T);
    r.K = fidelity_variance_K(r.F, p.tau, p.T);
  }
  r.P_exc = window_mean(r.F.t, r.excited, 0.0, p.T);
  return r;
}

void write_fidelity_csv(std::ostream& os, const FidelitySeries& F) {
  os << "t,F\n";
  os.precision(12);
  for (std::size_t k = 0; k < F.t.size(); ++k) os << F.t[k] << ',' << F.F[k] << '\n';
}

void write_spectrum_csv(std::ostream& os, const SpectrumSeries& s) {
  os << "omega,amplitude\n";
  os.precision(12);
  for (std::size_t k = 0; k < s.omega.size(); ++k) os << s.omega[k] << ',' << s.amplitude[k] << '\n';
}

void write_populations_csv(std::ostream& os, const PopulationSeries& p) {
  os << "t";
  for (const auto& l : p.labels) os << ",\"" << l << '"';
  os << ",P0\n";
  os.precision(12);
  for (std::size_t k = 0; k < p.t.size(); ++k) {
    os << p.t[k];
    for (const auto& c : p.columns) os << ',' << c[k];
    os << ',' << p.P0[k] << '\n';
  }
}

std::string summary_json(const QuenchRecord& r) {
  nlohmann::json j;
  j["tau"] = r.protocol.tau;
  j["V0"] = r.V0;
  j["g_i"] = r.protocol.g_i;
  j["g_f"] = r.protocol.g_f;
  j["T"] = r.protocol.T;
  j["F_mean"] = r.F_mean;
  j["K"] = r.K;
  j["P_exc"] = r.P_exc;
  j["P_exc_post_ramp"] = r.P_exc_post;
  j["ground_energy"] = r.ground_energy;
  j["max_norm_drift"] = r.stats.max_norm_drift;
  return j.dump(2);
}

}  // namespace lq

#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lq/dynamics.hpp"
#include "lq/fock.hpp"
#include "lq/system.hpp"

namespace lq {

struct FidelitySeries {
  std::vector<double> t;
  std::vector<double> F;
};

struct SpectrumSeries {
  std::vector<double> omega;
  std::vector<double> amplitude;
};

inline constexpr int kMinSpectrumSamples = 64;
// Peak thresholds relative to the largest spectral amplitude.
inline constexpr double kPeakThreshold = 0.05;
inline constexpr double kDominantThreshold = 0.25;

double fidelity(const Eigen::VectorXcd& psi0, const Eigen::VectorXcd& psi);
FidelitySeries fidelity(const Trajectory& traj, const Eigen::VectorXcd& psi0);

// Trapezoidal mean of y over samples with t in [t0, t1].
double window_mean(const std::vector<double>& t, const std::vector<double>& y, double t0, double t1);

// (1/(T - tau)) * integral over [tau, T].
double mean_fidelity(const FidelitySeries& F, double tau, double T);

// sqrt(variance) / mean over [tau, T]. Returns 0 when the mean is below 1e-12
// and sets *clipped.
double fidelity_variance_K(const FidelitySeries& F, double tau, double T, bool* clipped = nullptr);

// |sum_k (y_k - ybar) exp(-i w t_k) dt| on w_j = 2 pi j / (T - tau), j >= 0,
// for samples in [tau, T]; up to omega_max (0: Nyquist).
SpectrumSeries series_spectrum(const std::vector<double>& t, const std::vector<double>& y, double tau, double T,
                               bool hann = false, double omega_max = 0.0);
SpectrumSeries fidelity_spectrum(const FidelitySeries& F, double tau, double T, bool hann = false,
                                 double omega_max = 0.0);

struct Peak {
  double omega = 0.0;      // parabolic interpolation between bins
  double amplitude = 0.0;
  std::size_t bin = 0;
};

// Interior local maxima with amplitude >= rel_threshold * max, sorted by
// descending amplitude. The zero-frequency bin is excluded.
std::vector<Peak> find_peaks(const SpectrumSeries& s, double rel_threshold = kPeakThreshold);

// Sampled populations. Columns: each tracked number state, then every class
// label, then P0 (all bosons in band 0).
struct PopulationSeries {
  std::vector<std::string> labels;
  std::vector<double> t;
  std::vector<std::vector<double>> columns;
  std::vector<double> P0;
  std::vector<double> class_sum_error;  // |sum over classes - 1|

  const std::vector<double>& column(const std::string& label) const;
};

class PopulationObserver {
 public:
  PopulationObserver(const System& sys, const std::vector<std::string>& tracked_kets);
  void operator()(double t, const Eigen::VectorXcd& psi);
  const PopulationSeries& series() const { return series_; }

 private:
  const System* sys_;
  std::vector<std::size_t> tracked_;
  PopulationSeries series_;
};

// 1 - (1/(t1 - t0)) * integral of P0 over [t0, t1].
double excitation_fraction(const std::vector<double>& t, const std::vector<double>& P0, double t0, double t1);
inline double excitation_fraction(const PopulationSeries& p, double T) { return excitation_fraction(p.t, p.P0, 0.0, T); }

// Everything measured for one quench of the many-body system.
struct QuenchRecord {
  QuenchProtocol protocol;
  double V0 = 0.0;
  double ground_energy = 0.0;
  FidelitySeries F;
  PopulationSeries populations;
  std::vector<double> energy;   // <H(g_f)> at samples t >= tau, NaN during the ramp
  std::vector<double> parity;   // <Pi>
  EvolutionStats stats;
  double F_mean = 0.0;
  double K = 0.0;
  double P_exc = 0.0;           // from t = 0
  double P_exc_post = 0.0;      // over [tau, T]
};

struct QuenchRecordOptions {
  std::vector<std::string> tracked_kets;
  bool track_energy = true;
  KrylovOptions krylov;
  EigenOptions eigen;
  Trajectory* keep_states = nullptr;
};

QuenchRecord simulate_quench(const System& sys, const QuenchProtocol& p, const QuenchRecordOptions& opt = {});

// Many-body ground state as a complex vector at coupling g.
Eigen::VectorXcd initial_state(const System& sys, double g, const EigenOptions& opt = {});

// Mean-field counterpart of QuenchRecord.
struct MfRecord {
  QuenchProtocol protocol;
  FidelitySeries F;
  std::vector<double> excited;  // 1 - w0^N per sample
  double F_mean = 0.0;
  double K = 0.0;
  double P_exc = 0.0;
  double max_norm_drift = 0.0;
};

MfRecord simulate_mf(const System& sys, const QuenchProtocol& p, double mf_dt = 0.001);

void write_fidelity_csv(std::ostream& os, const FidelitySeries& F);
void write_spectrum_csv(std::ostream& os, const SpectrumSeries& s);
void write_populations_csv(std::ostream& os, const PopulationSeries& p);
std::string summary_json(const QuenchRecord& r);

}  // namespace lq

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [criterion numbers...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "lq/dvr.hpp"
#include "lq/dynamics.hpp"
#include "lq/fits.hpp"
#include "lq/fock.hpp"
#include "lq/linalg.hpp"
#include "lq/meanfield.hpp"
#include "lq/observables.hpp"
#include "lq/spectra.hpp"
#include "lq/system.hpp"

using namespace lq;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

// Two bands wherever V0 < 5 takes part, since three are not resolved there.
System triple(double V0, int bands = 2) {
  SystemParams p;
  p.m_wells = 3;
  p.V0 = V0;
  p.n_bands = bands;
  return build_system(p);
}

System five(double V0) {
  SystemParams p;
  p.m_wells = 5;
  p.V0 = V0;
  p.n_bands = 2;
  p.n_particles = 5;
  return build_system(p);
}

QuenchProtocol protocol(double g_i, double g_f, double tau, double T = 500.0) {
  QuenchProtocol p;
  p.g_i = g_i;
  p.g_f = g_f;
  p.tau = tau;
  p.T = T;
  return p;
}

std::vector<double> log_space(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return v;
}

std::vector<double> lin_space(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

bool near(double omega, double target, double rel) { return std::abs(omega - target) <= rel * target; }

const Peak* match(const std::vector<Peak>& peaks, double target, double rel) {
  const Peak* best = nullptr;
  for (const auto& p : peaks)
    if (near(p.omega, target, rel) && (!best || p.amplitude > best->amplitude)) best = &p;
  return best;
}

std::string peak_list(const std::vector<Peak>& peaks, std::size_t n = 8) {
  std::string s;
  for (std::size_t i = 0; i < std::min(n, peaks.size()); ++i) s += (i ? " " : "") + fmt(peaks[i].omega, 3);
  return s;
}

std::vector<double> p_exc_scan(const System& sys, double g_i, double g_f, const std::vector<double>& taus,
                               std::vector<double>* K = nullptr) {
  std::vector<double> out;
  for (double tau : taus) {
    QuenchRecordOptions o;
    o.track_energy = false;
    const QuenchRecord r = simulate_quench(sys, protocol(g_i, g_f, tau), o);
    out.push_back(r.P_exc);
    if (K) K->push_back(r.K);
  }
  return out;
}

std::string series(const std::vector<double>& x, const std::vector<double>& y) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + fmt(x[i], 3) + ":" + fmt(y[i], 3);
  return s;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const System sys = triple(4.0);
  const int n_low = static_cast<int>(std::count(sys.band0.begin(), sys.band0.end(), 1));
  const ScanPoint p0 = analyze_point(sys.ham, sys.parity, sys.tags, 0.0, 30);
  const Eigen::VectorXd& e = p0.energies;
  double inner = 0.0;
  for (int i = 1; i < n_low; ++i) inner = std::max(inner, e(i) - e(i - 1));
  double upper = 0.0;
  for (int i = n_low + 1; i < 28; ++i) upper = std::max(upper, e(i) - e(i - 1));
  const double gap = e(n_low) - e(n_low - 1);
  o.detail << "g=0: lowest " << n_low << " levels span " << fmt(e(n_low - 1) - e(0)) << ", gap " << fmt(gap)
           << ", largest spacing above " << fmt(upper) << ";";
  o.require(gap > inner && gap > upper, "bunching at g = 0");

  const ScanPoint p1 = analyze_point(sys.ham, sys.parity, sys.tags, 1.0, kDefaultLevels);
  std::string seq;
  int stage = 0;
  bool ordered = true;
  std::map<ClassLabel, int> count;
  for (int i = 0; i < n_low; ++i) {
    const ClassLabel c = p1.dominant[i];
    seq += std::string(i ? " " : "") + to_string(c);
    ++count[c];
    const int s = c == ClassLabel::S ? 0 : c == ClassLabel::SP ? 1 : c == ClassLabel::T ? 2 : 3;
    if (s < stage || s == 3) ordered = false;
    stage = std::max(stage, s);
  }
  o.detail << " g=1 classes: " << seq;
  o.require(ordered, "S < SP < T block order");
  o.require(count[ClassLabel::S] == 1 && count[ClassLabel::SP] == 6 && count[ClassLabel::T] == 3, "block sizes 1/6/3");
  return o;
}

std::vector<AvoidedCrossing> cradle_crossings(double V0, double g_max) {
  const System sys = triple(V0);
  std::vector<double> grid;
  for (int i = 0; i * 0.02 <= g_max + 1e-12; ++i) grid.push_back(i * 0.02);
  const GScan scan = scan_g(sys.ham, sys.parity, sys.tags, grid, kDefaultLevels);
  const auto all = detect_crossings(scan, [&](double g) {
    return analyze_point(sys.ham, sys.parity, sys.tags, g, kDefaultLevels);
  });
  std::vector<AvoidedCrossing> out;
  for (const auto& c : all)
    if (c.wide && c.involves(ClassLabel::T) && (c.involves(ClassLabel::SE) || c.involves(ClassLabel::HE)))
      out.push_back(c);
  return out;
}

Outcome criterion2() {
  Outcome o;
  const auto c4 = cradle_crossings(4.0, 4.0);
  const auto c10 = cradle_crossings(10.0, 8.0);
  std::vector<double> g4, g10;
  for (const auto& c : c4) g4.push_back(c.g_star);
  for (const auto& c : c10) g10.push_back(c.g_star);
  auto in_window = std::count_if(g4.begin(), g4.end(), [](double g) { return g >= 1.0 && g <= 3.0; });
  o.detail << "wide T-SE/HE crossings V0=4:";
  for (const auto& c : c4) o.detail << " " << fmt(c.g_star, 3) << "(dE " << fmt(c.delta_e, 2) << ")";
  o.detail << "; V0=10:";
  for (const auto& c : c10) o.detail << " " << fmt(c.g_star, 3) << "(dE " << fmt(c.delta_e, 2) << ")";
  o.require(in_window > 0, "wide crossing in g in [1,3] at V0 = 4");
  o.require(!g10.empty(), "wide crossing at V0 = 10");
  if (in_window > 0 && !g10.empty()) {
    const double first4 = *std::find_if(g4.begin(), g4.end(), [](double g) { return g >= 1.0; });
    o.require(g10.front() > first4, "V0 = 10 crossings at larger g");
  }
  return o;
}

struct PositiveQuench {
  QuenchRecord mb;
  MfRecord mf;
};

const PositiveQuench& positive_quench() {
  static const PositiveQuench q = [] {
    const System sys = triple(10.0, 3);
    PositiveQuench r;
    r.mb = simulate_quench(sys, protocol(0.0, 2.0, 8.0));
    r.mf = simulate_mf(sys, protocol(0.0, 2.0, 8.0));
    return r;
  }();
  return q;
}

Outcome criterion3() {
  Outcome o;
  const auto& r = positive_quench().mb;
  const double tau = r.protocol.tau, T = r.protocol.T;
  const auto spec = fidelity_spectrum(r.F, tau, T, false, 6.0);
  const auto peaks = find_peaks(spec, kPeakThreshold);
  const double bin = 2 * std::numbers::pi / (T - tau);
  std::vector<std::vector<Peak>> class_peaks;
  for (const char* c : {"S", "SP", "T", "SE", "HE"}) {
    class_peaks.push_back(
        find_peaks(series_spectrum(r.populations.t, r.populations.column(c), tau, T, false, 6.0), kPeakThreshold));
  }
  o.detail << "peaks " << peak_list(peaks) << ";";
  for (double target : {0.2, 1.0, 1.8, 2.9, 3.75}) {
    const Peak* p = match(peaks, target, 0.15);
    o.detail << " " << target << "->" << (p ? fmt(p->omega, 3) : "none");
    o.require(p != nullptr, "peak near " + fmt(target));
    if (!p) continue;
    bool seen = false;
    for (const auto& cp : class_peaks)
      for (const auto& q : cp) seen = seen || std::abs(q.omega - p->omega) <= 2 * bin;
    if (!seen) o.detail << "(no class line)";
    o.require(seen, "class-population line at " + fmt(p->omega));
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto& q = positive_quench();
  const double tau = q.mf.protocol.tau, T = q.mf.protocol.T;
  const auto dom = find_peaks(fidelity_spectrum(q.mf.F, tau, T, false, 6.0), kDominantThreshold);
  o.detail << "MF dominant modes " << peak_list(dom) << "; MF P_exc " << fmt(q.mf.P_exc) << " vs MB "
           << fmt(q.mb.P_exc);
  o.require(dom.size() == 2, "exactly two dominant modes");
  o.require(match(dom, 0.65, 0.2) != nullptr, "mode near 0.65");
  o.require(match(dom, 1.35, 0.2) != nullptr, "mode near 1.35");
  o.require(q.mf.P_exc < q.mb.P_exc, "MF P_exc below many-body");
  return o;
}

struct TauScans {
  std::vector<double> taus;
  std::vector<double> p4, p10, k4;
};

const TauScans& tau_scans() {
  static const TauScans s = [] {
    TauScans r;
    r.taus = log_space(0.5, 100.0, 16);
    r.p4 = p_exc_scan(triple(4.0), 0.0, 2.0, r.taus, &r.k4);
    r.p10 = p_exc_scan(triple(10.0), 0.0, 2.0, r.taus);
    return r;
  }();
  return s;
}

Outcome criterion5() {
  Outcome o;
  const auto& s = tau_scans();
  const FitResult f = fit(FitModel::biexponential, s.taus, s.p10);
  const double t1 = f.params[1], t2 = f.params[3];
  o.detail << "V0=10 biexp R2 " << fmt(f.r2, 5) << " tau1 " << fmt(t1) << " tau2 " << fmt(t2) << ";";
  o.require(f.r2 > 0.98, "R2 > 0.98");
  o.require(t1 < t2 && t2 / t1 > 2.0, "tau2/tau1 > 2");
  std::vector<double> cross;
  for (std::size_t i = 1; i < s.taus.size(); ++i) {
    const double d0 = s.p4[i - 1] - s.p10[i - 1], d1 = s.p4[i] - s.p10[i];
    if ((d0 > 0) != (d1 > 0)) {
      const double u = d0 / (d0 - d1);
      cross.push_back(std::exp(std::log(s.taus[i - 1]) + u * (std::log(s.taus[i]) - std::log(s.taus[i - 1]))));
    }
  }
  o.detail << " curves cross at";
  for (double c : cross) o.detail << " " << fmt(c, 3);
  if (cross.empty()) o.detail << " none";
  o.detail << "; P(V0=4) " << series(s.taus, s.p4) << "; P(V0=10) " << series(s.taus, s.p10);
  o.require(std::any_of(cross.begin(), cross.end(), [](double c) { return c >= 10 && c <= 30; }),
            "crossing in [10, 30]");
  return o;
}

std::vector<double> v0_scan(const std::vector<double>& v0s, double g_i, double g_f, double tau, int m = 3) {
  std::vector<double> out;
  for (double v0 : v0s) {
    const System sys = m == 3 ? triple(v0) : five(v0);
    QuenchRecordOptions opt;
    opt.track_energy = false;
    out.push_back(simulate_quench(sys, protocol(g_i, g_f, tau), opt).P_exc);
  }
  return out;
}

Outcome criterion6() {
  Outcome o;
  const auto v0s = lin_space(3.0, 14.0, 12);
  const auto p25 = v0_scan(v0s, 0.0, 2.0, 25.0);
  const auto p1 = v0_scan(v0s, 0.0, 2.0, 1.0);
  const auto a25 = std::max_element(p25.begin(), p25.end()) - p25.begin();
  const auto a1 = std::max_element(p1.begin(), p1.end()) - p1.begin();
  o.detail << "tau=25 argmax V0 " << fmt(v0s[a25]) << ", tau=1 argmax V0 " << fmt(v0s[a1]) << "; tau=25 "
           << series(v0s, p25) << "; tau=1 " << series(v0s, p1);
  o.require(a25 > 0 && a25 + 1 < static_cast<long>(v0s.size()), "interior maximum at tau = 25");
  o.require(a1 == 0, "maximum at the left edge for tau = 1");
  return o;
}

Outcome criterion7() {
  Outcome o;
  const System sys = triple(10.0, 3);
  const auto taus = log_space(0.5, 100.0, 16);
  const auto pt = p_exc_scan(sys, 2.0, 0.0, taus);
  double worst = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i)
    if (taus[i] >= 1.0) worst = std::max(worst, pt[i]);
  o.detail << "max P_exc(tau >= 1) " << fmt(worst) << ";";
  o.require(worst < 0.02, "P_exc < 0.02 for tau >= 1");
  const FitResult ft = fit(FitModel::exponential, taus, pt);
  const auto v0s = lin_space(3.0, 14.0, 12);
  const auto pv = v0_scan(v0s, 2.0, 0.0, 1.0);
  const FitResult fv = fit(FitModel::exponential, v0s, pv);
  o.detail << " exp fit R2 tau " << fmt(ft.r2, 5) << ", V0 " << fmt(fv.r2, 5) << ";";
  o.require(ft.r2 > 0.95, "exponential in tau");
  o.require(fv.r2 > 0.95, "exponential in V0");

  auto dominant = [&](double g_f) {
    const QuenchRecord r = simulate_quench(sys, protocol(2.0, g_f, 8.0));
    return find_peaks(fidelity_spectrum(r.F, r.protocol.tau, r.protocol.T, false, 6.0), kDominantThreshold);
  };
  const auto d0 = dominant(0.0);
  o.detail << " g_f=0 dominant " << peak_list(d0) << ";";
  o.require(d0.size() == 1 && near(d0[0].omega, 0.1, 0.2), "single dominant mode near 0.1");
  const auto d5 = dominant(0.05);
  o.detail << " g_f=0.05 dominant " << peak_list(d5) << "; P(tau) " << series(taus, pt) << "; P(V0) "
           << series(v0s, pv);
  o.require(match(d5, 0.02, 0.3) && match(d5, 0.11, 0.3), "modes near 0.02 and 0.11");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto& s = tau_scans();
  const System sys = triple(4.0);
  const std::vector<double> mid = {17, 20, 23, 26, 29, 32}, late = {72, 77, 82, 87, 92, 97};
  std::vector<double> kmid, klate;
  p_exc_scan(sys, 0.0, 2.0, mid, &kmid);
  p_exc_scan(sys, 0.0, 2.0, late, &klate);
  bool bounded = true;
  for (const std::vector<double>* v : std::initializer_list<const std::vector<double>*>{&s.k4, &kmid, &klate})
    for (double k : *v) bounded = bounded && k >= 0.0 && k <= 1.0;
  auto mean = [](const std::vector<double>& v) {
    double a = 0;
    for (double x : v) a += x;
    return a / v.size();
  };
  o.detail << "mean K over (15,35) " << fmt(mean(kmid)) << ", over (70,100) " << fmt(mean(klate)) << "; K(tau) "
           << series(s.taus, s.k4);
  o.require(bounded, "K in [0, 1]");
  o.require(mean(kmid) > mean(klate), "K decreases from (15,35) to (70,100)");
  return o;
}

Outcome criterion9() {
  Outcome o;
  const System s3 = triple(10.0);
  const System s5 = five(10.0);
  QuenchRecordOptions opt;
  opt.track_energy = false;
  for (double tau : {1.0, 8.0}) {
    for (const auto& [gi, gf] : {std::pair{0.0, 2.0}, std::pair{2.0, 0.0}}) {
      const double p3 = simulate_quench(s3, protocol(gi, gf, tau), opt).P_exc;
      const double p5 = simulate_quench(s5, protocol(gi, gf, tau), opt).P_exc;
      o.detail << "tau=" << tau << " " << gi << "->" << gf << ": m=3 " << fmt(p3) << " m=5 " << fmt(p5) << "; ";
      o.require(p5 > p3, "five-well enhancement at tau " + fmt(tau) + " g " + fmt(gi) + "->" + fmt(gf));
    }
  }
  const QuenchRecord slow = simulate_quench(s5, protocol(0.0, 2.0, 25.0), opt);
  o.detail << "five-well tau=25 F_mean " << fmt(slow.F_mean);
  o.require(slow.F_mean < 0.3, "five-well long-time F_mean < 0.3");
  return o;
}

Outcome criterion10() {
  Outcome o;
  // conservation along a full quench
  {
    const System sys = triple(10.0, 3);
    const QuenchRecord r = simulate_quench(sys, protocol(0.0, 2.0, 8.0));
    double e0 = 0.0, drift = 0.0, par = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < r.energy.size(); ++k) {
      if (std::isnan(r.energy[k])) continue;
      if (first) e0 = r.energy[k], first = false;
      drift = std::max(drift, std::abs(r.energy[k] - e0) / std::abs(e0));
    }
    for (double p : r.parity) par = std::max(par, std::abs(p - 1.0));
    o.detail << "norm " << fmt(r.stats.max_norm_drift, 2) << " energy " << fmt(drift, 2) << " parity "
             << fmt(par, 2) << ";";
    o.require(r.stats.max_norm_drift < 1e-9, "norm conservation");
    o.require(drift < 1e-8, "post-ramp energy drift");
    o.require(par < 1e-8, "parity conservation");
  }
  // Krylov against dense exponential
  {
    const System sys = triple(6.0, 3);
    if (sys.basis.dimension() > 200) o.require(false, "dimension <= 200");
    const Eigen::MatrixXd h = sys.ham.dense(1.5);
    Eigen::VectorXcd psi = initial_state(sys, 0.0);
    const Eigen::VectorXcd ref = (Eigen::MatrixXcd(std::complex<double>(0, -3.0) * h.cast<std::complex<double>>()))
                                     .exp() * psi;
    krylov_propagate(sys.ham, 1.5, 3.0, psi);
    const double err = (psi - ref).norm();
    o.detail << " krylov " << fmt(err, 2) << ";";
    o.require(err < 1e-8, "Krylov vs dense expm");
  }
  // box spectrum
  {
    const Grid g = build_grid(3, 300);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sp_hamiltonian(g, 0.0), Eigen::EigenvaluesOnly);
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) worst = std::max(worst, std::abs(es.eigenvalues()(n - 1) - n * n / 9.0) / (n * n / 9.0));
    o.detail << " box " << fmt(worst, 2) << ";";
    o.require(worst < 1e-10, "box spectrum");
  }
  // two-body tensor symmetries
  {
    const System sys = triple(10.0, 3);
    const int n = sys.w2.size();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const double v = sys.w2(i, j, k, l);
            for (double u : {sys.w2(j, i, k, l), sys.w2(i, j, l, k), sys.w2(k, l, i, j), sys.w2(l, k, j, i)})
              worst = std::max(worst, std::abs(v - u));
          }
    o.detail << " tensor " << fmt(worst, 2) << ";";
    o.require(worst < 1e-12, "tensor symmetries");
  }
  // rank/unrank bijection
  {
    const System tri = triple(10.0);
    const System fiv = five(10.0);
    bool ok = true;
    for (const System* sys : {&tri, &fiv}) {
      const FockBasis& b = sys->basis;
      for (std::size_t i = 0; i < b.dimension(); ++i) ok = ok && b.rank(b.occupations(i)) == i;
    }
    o.require(ok, "rank/unrank bijection");
  }
  // fit recovery under 1% noise
  {
    std::mt19937_64 rng(20170715);
    std::normal_distribution<double> noise(0.0, 0.01);
    const std::vector<double> truth = {0.3, 2.0, 0.1, 30.0};
    const auto xs = log_space(0.5, 100.0, 16);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(evaluate(FitModel::biexponential, truth, x) * (1.0 + noise(rng)));
    const FitResult f = fit(FitModel::biexponential, xs, ys);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(f.params[i] - truth[i]) / truth[i]);
    o.detail << " fit " << fmt(worst, 2);
    o.require(worst < 0.10, "fit recovery within 10%");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (int i = 0; i < static_cast<int>(criteria.size()); ++i) {
    if (!selected.empty() && !selected.count(i + 1)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s (%.0f s) %s\n", i + 1, o.pass ? "PASS" : "FAIL", secs, o.detail.str().c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}

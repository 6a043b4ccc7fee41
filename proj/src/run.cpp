#include "lq/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "lq/error.hpp"
#include "lq/fits.hpp"
#include "lq/meanfield.hpp"
#include "lq/observables.hpp"
#include "lq/spectra.hpp"
#include "lq/system.hpp"

namespace lq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  std::ofstream open(const std::string& rel) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + p.string());
    files_.push_back(rel);
    return os;
  }

  fs::path path(const std::string& rel) {
    files_.push_back(rel);
    fs::create_directories((root_ / rel).parent_path());
    return root_ / rel;
  }

  const fs::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

int effective_jobs(const RunConfig& c) {
  if (c.jobs > 0) return c.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

SystemParams system_params(const RunConfig& c, int jobs) {
  SystemParams p;
  p.m_wells = c.m_wells;
  p.n_points = c.n_points;
  p.V0 = c.V0;
  p.n_bands = c.bands;
  p.n_particles = c.N;
  p.allow_shallow = c.allow_shallow;
  p.jobs = jobs;
  return p;
}

QuenchProtocol protocol(const RunConfig& c) {
  QuenchProtocol p;
  p.g_i = c.g_i;
  p.g_f = c.g_f;
  p.tau = c.tau;
  p.T = c.T;
  p.dt_out = c.dt_out;
  p.dt_int = c.dt_int;
  return p;
}

EigenOptions eigen_options(const RunConfig& c) {
  EigenOptions o;
  o.seed = c.seed;
  return o;
}

json peaks_json(const SpectrumSeries& s) {
  json out = json::array();
  for (const auto& p : find_peaks(s)) out.push_back({{"omega", p.omega}, {"amplitude", p.amplitude}});
  return out;
}

bool spectrum_possible(const QuenchProtocol& p) {
  return (p.T - p.tau) / p.dt_out + 1 >= kMinSpectrumSamples;
}

// Parallel map over indices with results kept in index order.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, int jobs, F&& f) {
  std::vector<R> out(n);
  std::vector<std::exception_ptr> err(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  const int nt = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  }
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
  return out;
}

void run_spectrum(const RunConfig& c, OutputDir& out, std::ostream& log) {
  const int jobs = effective_jobs(c);
  const System sys = build_system(system_params(c, jobs));
  log << "basis dimension " << sys.basis.dimension() << '\n';
  const auto opt = eigen_options(c);
  const GScan scan = scan_g(sys.ham, sys.parity, sys.tags, c.g_grid(), c.K_eigen, jobs, opt);
  const PointResolver resolver = [&](double g) { return analyze_point(sys.ham, sys.parity, sys.tags, g, c.K_eigen, opt); };
  const auto crossings = detect_crossings(scan, resolver);
  log << crossings.size() << " avoided crossings\n";
  {
    auto os = out.open("spectrum.csv");
    write_scan_csv(os, scan);
  }
  {
    auto os = out.open("crossings.csv");
    write_crossings_csv(os, crossings);
  }
  {
    auto os = out.open("orbitals.csv");
    write_orbitals_csv(os, sys.grid, sys.wannier);
  }
  json bands;
  bands["sp_energies"] = std::vector<double>(sys.sp.energies.data(), sys.sp.energies.data() + sys.sp.energies.size());
  for (const auto& b : sys.bands.bands) {
    json jb{{"lower", b.lower}, {"upper", b.upper}, {"bandwidth", b.bandwidth}};
    jb["gap_above"] = std::isfinite(b.gap_above) ? json(b.gap_above) : json(nullptr);
    bands["bands"].push_back(jb);
  }
  out.open("bands.json") << bands.dump(2) << '\n';
}

void write_quench_outputs(const System& sys, const QuenchRecord& r, const RunConfig& c, OutputDir& out,
                          const std::string& prefix) {
  {
    auto os = out.open(prefix + "fidelity.csv");
    write_fidelity_csv(os, r.F);
  }
  {
    auto os = out.open(prefix + "populations.csv");
    write_populations_csv(os, r.populations);
  }
  json summary = json::parse(summary_json(r));
  summary["basis_dimension"] = sys.basis.dimension();
  double drift = 0.0, e_ref = std::nan("");
  for (double e : r.energy) {
    if (std::isnan(e)) continue;
    if (std::isnan(e_ref)) e_ref = e;
    drift = std::max(drift, std::abs(e - e_ref) / std::max(1e-300, std::abs(e_ref)));
  }
  summary["energy_drift_post_ramp"] = drift;
  if (spectrum_possible(r.protocol)) {
    const auto spec = fidelity_spectrum(r.F, r.protocol.tau, r.protocol.T, c.hann, c.omega_max);
    {
      auto os = out.open(prefix + "fidelity_spectrum.csv");
      write_spectrum_csv(os, spec);
    }
    summary["fidelity_peaks"] = peaks_json(spec);
    auto os = out.open(prefix + "population_spectra.csv");
    os << "omega";
    std::vector<SpectrumSeries> cols;
    for (std::size_t i = 0; i < r.populations.labels.size(); ++i) {
      os << ",\"" << r.populations.labels[i] << '"';
      cols.push_back(series_spectrum(r.populations.t, r.populations.columns[i], r.protocol.tau, r.protocol.T, c.hann,
                                     c.omega_max));
    }
    cols.push_back(series_spectrum(r.populations.t, r.populations.P0, r.protocol.tau, r.protocol.T, c.hann,
                                   c.omega_max));
    os << ",P0\n";
    os.precision(12);
    for (std::size_t j = 0; j < spec.omega.size(); ++j) {
      os << spec.omega[j];
      for (const auto& s : cols) os << ',' << s.amplitude[j];
      os << '\n';
    }
  }
  out.open(prefix + "summary.json") << summary.dump(2) << '\n';
}

void run_quench(const RunConfig& c, OutputDir& out, std::ostream& log) {
  const System sys = build_system(system_params(c, effective_jobs(c)));
  log << "basis dimension " << sys.basis.dimension() << '\n';
  QuenchRecordOptions o;
  o.tracked_kets = c.track;
  o.eigen = eigen_options(c);
  Trajectory traj;
  if (c.dump_states) o.keep_states = &traj;
  const QuenchRecord r = simulate_quench(sys, protocol(c), o);
  log << "F_mean " << r.F_mean << "  K " << r.K << "  P_exc " << r.P_exc << '\n';
  write_quench_outputs(sys, r, c, out, "");
  if (c.dump_states) write_state_dump(out.path("states.bin").string(), out.path("states.json").string(), sys.basis, traj);
}

void run_mf(const RunConfig& c, OutputDir& out, std::ostream& log) {
  const System sys = build_system(system_params(c, effective_jobs(c)));
  const QuenchProtocol p = protocol(c);
  const MfRecord r = simulate_mf(sys, p, c.mf_dt);
  log << "MF F_mean " << r.F_mean << "  P_exc " << r.P_exc << '\n';
  {
    auto os = out.open("mf_fidelity.csv");
    os << "t,F,P_exc_instant\n";
    os.precision(12);
    for (std::size_t k = 0; k < r.F.t.size(); ++k) os << r.F.t[k] << ',' << r.F.F[k] << ',' << r.excited[k] << '\n';
  }
  json s{{"tau", p.tau}, {"V0", c.V0}, {"g_i", p.g_i}, {"g_f", p.g_f}, {"T", p.T}, {"F_mean", r.F_mean},
         {"K", r.K},     {"P_exc", r.P_exc}, {"max_norm_drift", r.max_norm_drift}, {"mf_dt", c.mf_dt}};
  if (spectrum_possible(p)) {
    const auto spec = fidelity_spectrum(r.F, p.tau, p.T, c.hann, c.omega_max);
    auto os = out.open("mf_fidelity_spectrum.csv");
    write_spectrum_csv(os, spec);
    s["fidelity_peaks"] = peaks_json(spec);
  }
  out.open("mf_summary.json") << s.dump(2) << '\n';
}

json fit_entry(FitModel m, const std::vector<double>& x, const std::vector<double>& y, FitResult* keep, int jobs) {
  try {
    FitResult r = fit(m, x, y, jobs);
    if (keep) *keep = r;
    return json::parse(fit_report_json(r, x, y));
  } catch (const NumericalError& e) {
    return json{{"model", to_string(m)}, {"error", e.what()}};
  } catch (const ConfigError& e) {
    return json{{"model", to_string(m)}, {"error", e.what()}};
  }
}

json fit_models(const std::vector<std::string>& models, const std::vector<double>& x, const std::vector<double>& y,
                int jobs) {
  json rep;
  rep["fits"] = json::array();
  FitResult exp_fit, biexp_fit;
  bool have_exp = false, have_biexp = false;
  for (const auto& name : models) {
    const FitModel m = parse_fit_model(name);
    FitResult r;
    json e = fit_entry(m, x, y, &r, jobs);
    if (!e.contains("error")) {
      if (m == FitModel::exponential) exp_fit = r, have_exp = true;
      if (m == FitModel::biexponential) biexp_fit = r, have_biexp = true;
    }
    rep["fits"].push_back(e);
  }
  if (have_exp && have_biexp && x.size() > 4) {
    const auto cmp = compare_models(exp_fit, biexp_fit, x.size());
    rep["comparison"] = {{"simple", "exponential"},
                         {"full", "biexponential"},
                         {"F", std::isfinite(cmp.F) ? json(cmp.F) : json(nullptr)},
                         {"p_value", cmp.p_value},
                         {"extra_terms_justified", cmp.extra_terms_justified}};
  }
  return rep;
}

struct ScanResult {
  QuenchRecord record;
  double mf_P_exc = std::nan("");
  double mf_F_mean = std::nan("");
};

void run_scan(const RunConfig& c, OutputDir& out, std::ostream& log) {
  const int jobs = effective_jobs(c);
  const auto values = c.scan_values();
  const bool vary_v0 = c.mode == "scan-v0";
  std::optional<System> shared;
  if (!vary_v0) shared.emplace(build_system(system_params(c, jobs)));
  if (shared) log << "basis dimension " << shared->basis.dimension() << '\n';

  auto results = parallel_map<ScanResult>(values.size(), jobs, [&](std::size_t i) {
    RunConfig pc = c;
    if (c.mode == "scan-tau") pc.tau = values[i];
    if (c.mode == "scan-gf") pc.g_f = values[i];
    if (c.mode == "scan-v0") pc.V0 = values[i];
    pc.validate();
    std::optional<System> own;
    if (vary_v0) own.emplace(build_system(system_params(pc, 1)));
    const System& sys = vary_v0 ? *own : *shared;
    QuenchRecordOptions o;
    o.tracked_kets = c.track;
    o.eigen = eigen_options(c);
    ScanResult r;
    r.record = simulate_quench(sys, protocol(pc), o);
    if (c.with_mf) {
      const MfRecord mf = simulate_mf(sys, protocol(pc), c.mf_dt);
      r.mf_P_exc = mf.P_exc;
      r.mf_F_mean = mf.F_mean;
    }
    return r;
  });

  const std::string var = c.mode == "scan-tau" ? "tau" : c.mode == "scan-gf" ? "g_f" : "V0";
  {
    auto os = out.open("scan.csv");
    os << var << ",P_exc,P_exc_post_ramp,F_mean,K";
    if (c.with_mf) os << ",mf_P_exc,mf_F_mean";
    os << '\n';
    os.precision(12);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const auto& r = results[i].record;
      os << values[i] << ',' << r.P_exc << ',' << r.P_exc_post << ',' << r.F_mean << ',' << r.K;
      if (c.with_mf) os << ',' << results[i].mf_P_exc << ',' << results[i].mf_F_mean;
      os << '\n';
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "points/%03zu_fidelity.csv", i);
    auto os = out.open(name);
    write_fidelity_csv(os, results[i].record.F);
  }
  std::vector<double> ys;
  for (const auto& r : results) ys.push_back(std::max(0.0, r.record.P_exc));
  std::vector<std::string> models;
  if (c.mode == "scan-tau") models = {"exponential", "biexponential"};
  if (c.mode == "scan-v0") models = {"exponential", "double_gaussian"};
  if (c.fit_model != "auto") models = {c.fit_model};
  if (!models.empty()) {
    json rep = fit_models(models, values, ys, jobs);
    rep["x"] = var;
    rep["y"] = "P_exc";
    out.open("fit_report.json") << rep.dump(2) << '\n';
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    log << var << ' ' << values[i] << "  P_exc " << results[i].record.P_exc << "  F_mean " << results[i].record.F_mean
        << '\n';
  }
}

void run_fit(const RunConfig& c, OutputDir& out, std::ostream& log) {
  std::ifstream in(c.fit_input);
  if (!in) throw ConfigError("cannot read fit input " + c.fit_input);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("fit input is empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::erase(item, '"');
      std::erase(item, '\r');
      v.push_back(item);
    }
    return v;
  };
  const auto header = split(line);
  auto col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("fit input has no column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ix = col(c.fit_x), iy = col(c.fit_y);
  std::vector<double> x, y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() <= std::max(ix, iy)) throw ConfigError("short row in fit input");
    try {
      x.push_back(std::stod(f[ix]));
      y.push_back(std::stod(f[iy]));
    } catch (const std::exception&) {
      throw ConfigError("non-numeric value in fit input: " + line);
    }
  }
  std::vector<std::string> models = {"exponential", "biexponential"};
  if (c.fit_model != "auto") models = {c.fit_model};
  json rep = fit_models(models, x, y, effective_jobs(c));
  rep["x"] = c.fit_x;
  rep["y"] = c.fit_y;
  rep["input"] = c.fit_input;
  out.open("fit_report.json") << rep.dump(2) << '\n';
  for (const auto& f : rep["fits"]) {
    if (f.contains("R2")) log << f["model"].get<std::string>() << "  R2 " << f["R2"].get<double>() << '\n';
  }
}

RunOutcome run_in(const RunConfig& config, const fs::path& dir, std::ostream& log) {
  config.validate();
  OutputDir out(dir);
  out.open("config.ini") << serialize(config);
  log << "mode " << config.mode << " -> " << dir.string() << '\n';
  if (config.mode == "spectrum") run_spectrum(config, out, log);
  else if (config.mode == "quench") run_quench(config, out, log);
  else if (config.mode == "mf") run_mf(config, out, log);
  else if (config.mode == "fit") run_fit(config, out, log);
  else run_scan(config, out, log);

  json m;
  m["mode"] = config.mode;
  m["config_hash"] = config_hash(config);
  m["seed"] = config.seed;
  m["files"] = json::array();
  for (const auto& f : out.files()) {
    m["files"].push_back({{"path", f}, {"bytes", fs::file_size(dir / f)}});
  }
  const fs::path mp = dir / "manifest.json";
  std::ofstream(mp) << m.dump(2) << '\n';
  RunOutcome r;
  r.out_dir = dir;
  r.files = out.files();
  r.manifest = mp.string();
  return r;
}

RunConfig with(RunConfig c, std::initializer_list<std::pair<const char*, const char*>> kv) {
  for (const auto& [k, v] : kv) set_field(c, k, v);
  return c;
}

std::vector<Recipe> make_recipes() {
  // Two bands wherever V0 < 5 takes part; three are not resolved there.
  RunConfig base;
  base.bands = 2;
  const RunConfig pos = with(base, {{"g_i", "0"}, {"g_f", "2"}});
  const RunConfig neg = with(base, {{"g_i", "2"}, {"g_f", "0"}});
  auto tau_scan = [](RunConfig c) {
    return with(c, {{"mode", "scan-tau"}, {"scan_min", "0.5"}, {"scan_max", "100"}, {"scan_points", "16"},
                    {"scan_spacing", "log"}});
  };
  auto v0_scan = [](RunConfig c, const char* tau) {
    return with(c, {{"mode", "scan-v0"}, {"tau", tau}, {"scan_min", "3"}, {"scan_max", "14"}, {"scan_points", "12"},
                    {"scan_spacing", "linear"}});
  };
  const RunConfig five = with(base, {{"m_wells", "5"}, {"N", "5"}});
  const RunConfig pos5 = with(five, {{"g_i", "0"}, {"g_f", "2"}});
  const RunConfig neg5 = with(five, {{"g_i", "2"}, {"g_f", "0"}});
  const char* kets = "1,1,1;1,2,0;0,2,1;0,3,0";

  std::vector<Recipe> r;
  r.push_back({"fig1a", "eigenspectrum vs g, triple well, V0 = 4",
               {with(base, {{"mode", "spectrum"}, {"V0", "4"}})}});
  r.push_back({"fig1b", "eigenspectrum vs g, triple well, V0 = 10",
               {with(base, {{"mode", "spectrum"}, {"V0", "10"}, {"bands", "3"}})}});
  r.push_back({"fig2a", "fidelity for varying tau, 0 -> 2, V0 = 4 (points/*_fidelity.csv)",
               {tau_scan(with(pos, {{"V0", "4"}}))}});
  r.push_back({"fig2b", "mean fidelity vs tau, 0 -> 2, V0 = 4 (scan.csv F_mean)", {tau_scan(with(pos, {{"V0", "4"}}))}});
  r.push_back({"fig2c", "K vs tau, 0 -> 2, V0 = 4 (scan.csv K)", {tau_scan(with(pos, {{"V0", "4"}}))}});
  r.push_back({"fig2d", "fidelity for varying tau, 0 -> 2, V0 = 10", {tau_scan(with(pos, {{"V0", "10"}, {"bands", "3"}}))}});
  r.push_back({"fig2e", "fidelity spectra at tau = 8: many-body V0 = 10 and 4, mean field V0 = 10",
               {with(pos, {{"mode", "quench"}, {"V0", "10"}, {"bands", "3"}}), with(pos, {{"mode", "quench"}, {"V0", "4"}}),
                with(pos, {{"mode", "mf"}, {"V0", "10"}, {"bands", "3"}})}});
  r.push_back({"fig3a", "P_exc vs tau, 0 -> 2, V0 = 4 and 10, with fits",
               {tau_scan(with(pos, {{"V0", "4"}})), tau_scan(with(pos, {{"V0", "10"}}))}});
  r.push_back({"fig3b", "P_exc vs V0 at tau = 1, 10, 25, 0 -> 2",
               {v0_scan(pos, "1"), v0_scan(pos, "10"), v0_scan(pos, "25")}});
  r.push_back({"fig3c", "P_exc vs g_f at tau = 10, V0 = 4 and 10",
               {with(pos, {{"mode", "scan-gf"}, {"V0", "4"}, {"tau", "10"}, {"scan_min", "0.2"}, {"scan_max", "4"},
                           {"scan_points", "20"}, {"scan_spacing", "linear"}}),
                with(pos, {{"mode", "scan-gf"}, {"V0", "10"}, {"tau", "10"}, {"scan_min", "0.2"}, {"scan_max", "4"},
                           {"scan_points", "20"}, {"scan_spacing", "linear"}})}});
  r.push_back({"fig4a", "fidelity for varying tau, 2 -> 0, V0 = 4", {tau_scan(with(neg, {{"V0", "4"}}))}});
  r.push_back({"fig4b", "fidelity for varying tau, 2 -> 0, V0 = 10", {tau_scan(with(neg, {{"V0", "10"}, {"bands", "3"}}))}});
  for (const char* n : {"fig4c", "fig4d", "fig4e"}) {
    r.push_back({n, "number-state probabilities P1, P2, P3 after 2 -> 0, V0 = 10, tau = 8",
                 {with(neg, {{"mode", "quench"}, {"V0", "10"}, {"bands", "3"}, {"track", kets}})}});
  }
  r.push_back({"fig4f", "K vs tau, 2 -> 0, V0 = 4", {tau_scan(with(neg, {{"V0", "4"}}))}});
  r.push_back({"fig4g", "fidelity spectra at tau = 8 after 2 -> 0 and 2 -> 0.05, V0 = 10; mean field",
               {with(neg, {{"mode", "quench"}, {"V0", "10"}, {"bands", "3"}}),
                with(neg, {{"mode", "quench"}, {"V0", "10"}, {"bands", "3"}, {"g_f", "0.05"}}),
                with(neg, {{"mode", "quench"}, {"V0", "4"}}), with(neg, {{"mode", "mf"}, {"V0", "10"}, {"bands", "3"}})}});
  r.push_back({"fig5a", "five wells, fidelity for varying tau, 0 -> 2", {tau_scan(with(pos5, {{"V0", "10"}}))}});
  r.push_back({"fig5b", "five wells, mean-field fidelity, 0 -> 2, tau = 1, 8, 25",
               {with(pos5, {{"mode", "mf"}, {"tau", "1"}}), with(pos5, {{"mode", "mf"}, {"tau", "8"}}),
                with(pos5, {{"mode", "mf"}, {"tau", "25"}})}});
  r.push_back({"fig5c", "five wells, fidelity for varying tau, 2 -> 0", {tau_scan(with(neg5, {{"V0", "10"}}))}});
  r.push_back({"fig5d", "five wells, mean-field fidelity, 2 -> 0, tau = 1, 8, 25",
               {with(neg5, {{"mode", "mf"}, {"tau", "1"}}), with(neg5, {{"mode", "mf"}, {"tau", "8"}}),
                with(neg5, {{"mode", "mf"}, {"tau", "25"}})}});
  r.push_back({"fig5e", "five wells, P_exc vs tau, 0 -> 2", {tau_scan(with(pos5, {{"V0", "10"}}))}});
  r.push_back({"fig5f", "five wells, P_exc vs tau, 2 -> 0", {tau_scan(with(neg5, {{"V0", "10"}}))}});
  r.push_back({"fig5g", "five wells, P_exc vs V0, 0 -> 2, tau = 1 and 25", {v0_scan(pos5, "1"), v0_scan(pos5, "25")}});
  r.push_back({"fig5h", "five wells, P_exc vs V0, 2 -> 0, tau = 1 and 25", {v0_scan(neg5, "1"), v0_scan(neg5, "25")}});
  for (auto& rec : r)
    for (auto& c : rec.configs) c.validate();
  return r;
}

}  // namespace

fs::path resolve_out_dir(const std::string& configured) {
  if (const char* env = std::getenv("LATTICEQUENCH_OUT"); env && *env) return fs::path(env);
  return fs::path(configured);
}

RunOutcome run(const RunConfig& config, std::ostream& log) { return run_in(config, resolve_out_dir(config.out_dir), log); }

const std::vector<Recipe>& recipes() {
  static const std::vector<Recipe> r = make_recipes();
  return r;
}

const Recipe& find_recipe(const std::string& name) {
  for (const auto& r : recipes())
    if (r.name == name) return r;
  std::string valid;
  for (const auto& r : recipes()) valid += (valid.empty() ? "" : ", ") + r.name;
  throw ConfigError("unknown recipe '" + name + "'; valid names: " + valid);
}

std::vector<RunOutcome> run_recipe(const Recipe& r, const std::string& out_dir, int jobs, std::ostream& log) {
  const fs::path base = resolve_out_dir(out_dir) / r.name;
  std::vector<RunOutcome> out;
  for (std::size_t i = 0; i < r.configs.size(); ++i) {
    RunConfig c = r.configs[i];
    c.out_dir = (base / std::to_string(i)).string();
    if (jobs > 0) c.jobs = jobs;
    out.push_back(run_in(c, c.out_dir, log));
  }
  return out;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return 2;
  } catch (const NumericalError&) {
    return 3;
  } catch (const std::bad_alloc&) {
    return 3;
  } catch (...) {
    return 1;
  }
}

}  // namespace lq

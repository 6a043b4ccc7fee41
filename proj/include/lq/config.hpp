#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lq {

inline const std::vector<std::string> kModes = {"spectrum", "quench", "scan-tau", "scan-v0", "scan-gf", "mf", "fit"};

struct RunConfig {
  // [run]
  std::string mode = "quench";
  std::string out_dir = "out";
  std::uint64_t seed = 20170715;
  int jobs = 0;  // 0: hardware concurrency
  // [system]
  int m_wells = 3;
  int n_points = 0;
  double V0 = 10.0;
  int bands = 0;
  int N = 0;
  bool allow_shallow = false;
  // [quench]
  double g_i = 0.0;
  double g_f = 2.0;
  double tau = 8.0;
  double T = 500.0;
  double dt_out = 0.1;
  double dt_int = 0.0;
  std::vector<std::string> track;  // kets, e.g. 1,1,1
  bool dump_states = false;
  // [spectrum]
  int K_eigen = 25;
  double g_min = 0.0;
  double g_max = 4.0;
  double g_step = 0.02;
  // [scan]
  double scan_min = 0.5;
  double scan_max = 100.0;
  int scan_points = 16;
  std::string scan_spacing = "log";  // log | linear
  bool with_mf = false;
  // [analysis]
  double omega_max = 6.0;
  bool hann = false;
  double mf_dt = 0.001;
  // [fit]
  std::string fit_input;
  std::string fit_x = "x";
  std::string fit_y = "P_exc";
  std::string fit_model = "auto";  // auto | biexponential | exponential | double_gaussian

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  // Throws ConfigError describing the first inconsistency.
  void validate() const;
  std::vector<double> scan_values() const;
  std::vector<double> g_grid() const;
};

// key = value text with [section] headers; '#' starts a comment.
std::string serialize(const RunConfig& c);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Sets one field by key name (as in the file, without section). Throws
// ConfigError for unknown keys or malformed values.
void set_field(RunConfig& c, const std::string& key, const std::string& value);
std::vector<std::string> field_names();

// Stable 64-bit FNV-1a hash of serialize(c), as 16 hex digits.
std::string config_hash(const RunConfig& c);

}  // namespace lq

#include "lq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <variant>

#include "lq/error.hpp"

namespace lq {

namespace {

using Member = std::variant<int RunConfig::*, double RunConfig::*, bool RunConfig::*, std::string RunConfig::*,
                            std::uint64_t RunConfig::*, std::vector<std::string> RunConfig::*>;

struct Field {
  const char* section;
  const char* key;
  Member member;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"run", "mode", &RunConfig::mode},
      {"run", "out_dir", &RunConfig::out_dir},
      {"run", "seed", &RunConfig::seed},
      {"run", "jobs", &RunConfig::jobs},
      {"system", "m_wells", &RunConfig::m_wells},
      {"system", "n_points", &RunConfig::n_points},
      {"system", "V0", &RunConfig::V0},
      {"system", "bands", &RunConfig::bands},
      {"system", "N", &RunConfig::N},
      {"system", "allow_shallow", &RunConfig::allow_shallow},
      {"quench", "g_i", &RunConfig::g_i},
      {"quench", "g_f", &RunConfig::g_f},
      {"quench", "tau", &RunConfig::tau},
      {"quench", "T", &RunConfig::T},
      {"quench", "dt_out", &RunConfig::dt_out},
      {"quench", "dt_int", &RunConfig::dt_int},
      {"quench", "track", &RunConfig::track},
      {"quench", "dump_states", &RunConfig::dump_states},
      {"spectrum", "K_eigen", &RunConfig::K_eigen},
      {"spectrum", "g_min", &RunConfig::g_min},
      {"spectrum", "g_max", &RunConfig::g_max},
      {"spectrum", "g_step", &RunConfig::g_step},
      {"scan", "scan_min", &RunConfig::scan_min},
      {"scan", "scan_max", &RunConfig::scan_max},
      {"scan", "scan_points", &RunConfig::scan_points},
      {"scan", "scan_spacing", &RunConfig::scan_spacing},
      {"scan", "with_mf", &RunConfig::with_mf},
      {"analysis", "omega_max", &RunConfig::omega_max},
      {"analysis", "hann", &RunConfig::hann},
      {"analysis", "mf_dt", &RunConfig::mf_dt},
      {"fit", "fit_input", &RunConfig::fit_input},
      {"fit", "fit_x", &RunConfig::fit_x},
      {"fit", "fit_y", &RunConfig::fit_y},
      {"fit", "fit_model", &RunConfig::fit_model},
  };
  return f;
}

const Field& find_field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.key) return f;
  throw ConfigError("unknown config key: " + key);
}

std::string trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return std::string(s.substr(a, b - a + 1));
}

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError("invalid value for " + key + ": '" + v + "'");
  }
  return out;
}

std::string to_text(const RunConfig& c, const Member& m) {
  return std::visit(
      [&](auto ptr) -> std::string {
        const auto& v = c.*ptr;
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, bool>) return v ? "true" : "false";
        else if constexpr (std::is_same_v<V, double>) return format_double(v);
        else if constexpr (std::is_same_v<V, std::string>) return v;
        else if constexpr (std::is_same_v<V, std::vector<std::string>>) {
          std::string s;
          for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + v[i];
          return s;
        } else return std::to_string(v);
      },
      m);
}

}  // namespace

void set_field(RunConfig& c, const std::string& key, const std::string& raw) {
  const Field& f = find_field(key);
  const std::string value = trim(raw);
  std::visit(
      [&](auto ptr) {
        auto& v = c.*ptr;
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, bool>) {
          if (value == "true" || value == "1") v = true;
          else if (value == "false" || value == "0") v = false;
          else throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
        } else if constexpr (std::is_same_v<V, std::string>) {
          v = value;
        } else if constexpr (std::is_same_v<V, std::vector<std::string>>) {
          v.clear();
          std::stringstream ss(value);
          std::string item;
          while (std::getline(ss, item, ';')) {
            item = trim(item);
            if (!item.empty()) v.push_back(item);
          }
        } else {
          v = parse_number<V>(key, value);
        }
      },
      f.member);
}

std::vector<std::string> field_names() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.emplace_back(f.key);
  return out;
}

std::string serialize(const RunConfig& c) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out += '\n';
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + to_text(c, f.member) + '\n';
  }
  return out;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const Field& f = find_field(key);
    if (!section.empty() && section != f.section) {
      throw ConfigError("line " + std::to_string(lineno) + ": key " + key + " belongs to [" + f.section + "]");
    }
    set_field(c, key, line.substr(eq + 1));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void RunConfig::validate() const {
  if (std::find(kModes.begin(), kModes.end(), mode) == kModes.end()) {
    throw ConfigError("unknown mode: " + mode);
  }
  if (m_wells < 1 || m_wells % 2 == 0) throw ConfigError("m_wells must be odd and positive");
  if (n_points < 0 || bands < 0 || N < 0) throw ConfigError("n_points, bands and N must be >= 0 (0 = default)");
  if (!(V0 >= 0)) throw ConfigError("V0 must be >= 0");
  if (!(tau >= 0)) throw ConfigError("tau must be >= 0");
  if (!(T > 0) || tau > T) throw ConfigError("need 0 <= tau <= T");
  if (!(dt_out > 0) || dt_int < 0) throw ConfigError("dt_out must be > 0 and dt_int >= 0");
  if (K_eigen < 1) throw ConfigError("K_eigen must be >= 1");
  if (!(g_step > 0) || !(g_max >= g_min)) throw ConfigError("g grid: need g_step > 0 and g_max >= g_min");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (!(mf_dt > 0)) throw ConfigError("mf_dt must be > 0");
  if (!(omega_max >= 0)) throw ConfigError("omega_max must be >= 0");
  if (mode.starts_with("scan-")) {
    if (scan_points < 1) throw ConfigError("scan_points must be >= 1");
    if (!(scan_max >= scan_min)) throw ConfigError("scan range is empty");
    if (scan_spacing != "log" && scan_spacing != "linear") throw ConfigError("scan_spacing must be log or linear");
    if (scan_spacing == "log" && !(scan_min > 0)) throw ConfigError("log spacing needs scan_min > 0");
    if (mode == "scan-tau" && scan_max > T) throw ConfigError("scan-tau: scan_max exceeds T");
    if (mode == "scan-v0" && scan_min < 0) throw ConfigError("scan-v0: V0 must be >= 0");
  }
  if (mode == "fit" && fit_input.empty()) throw ConfigError("fit mode needs fit_input");
  if (fit_model != "auto" && fit_model != "biexponential" && fit_model != "exponential" &&
      fit_model != "double_gaussian") {
    throw ConfigError("unknown fit_model: " + fit_model);
  }
}

std::vector<double> RunConfig::scan_values() const {
  std::vector<double> v;
  if (scan_points == 1) return {scan_min};
  for (int i = 0; i < scan_points; ++i) {
    const double f = static_cast<double>(i) / (scan_points - 1);
    v.push_back(scan_spacing == "log" ? scan_min * std::pow(scan_max / scan_min, f)
                                      : scan_min + f * (scan_max - scan_min));
  }
  v.back() = scan_max;
  return v;
}

std::vector<double> RunConfig::g_grid() const {
  std::vector<double> g;
  const int n = static_cast<int>(std::floor((g_max - g_min) / g_step + 1e-9));
  for (int i = 0; i <= n; ++i) g.push_back(g_min + i * g_step);
  return g;
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lq

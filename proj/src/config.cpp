#include "purify/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace purify {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

struct BadValue {
  std::string what;
};

double to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
    throw BadValue{"not a number: '" + std::string(s) + "'"};
  }
  return v;
}

template <typename Int>
Int to_integer(std::string_view s) {
  s = trim(s);
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw BadValue{"not an integer: '" + std::string(s) + "'"};
  }
  return v;
}

bool to_bool(std::string_view s) {
  s = trim(s);
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw BadValue{"not a boolean: '" + std::string(s) + "'"};
}

std::vector<double> to_list(std::string_view s) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
    out.push_back(to_double(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (double x : v) {
    if (!out.empty()) out += ',';
    out += fmt(x);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"protocol",
       [](RunConfig& c, std::string_view v) {
         const auto kind = parse_protocol(trim(v));
         if (!kind) throw BadValue{"unknown protocol '" + std::string(trim(v)) + "'"};
         c.protocol.kind = *kind;
       }},
      {"runs", [](RunConfig& c, std::string_view v) { c.runs = to_integer<std::size_t>(v); }},
      {"seed", [](RunConfig& c, std::string_view v) { c.seed = to_integer<std::uint64_t>(v); }},
      {"dt_fs", [](RunConfig& c, std::string_view v) { c.sim.step.dt = to_double(v) * 1e-15; }},
      {"tmax_ns", [](RunConfig& c, std::string_view v) { c.sim.t_max = to_double(v) * 1e-9; }},
      {"sample_stride",
       [](RunConfig& c, std::string_view v) { c.sim.step.sample_stride = to_integer<int>(v); }},
      {"scheme",
       [](RunConfig& c, std::string_view v) {
         v = trim(v);
         if (v == "exact") {
           c.sim.step.scheme = MeasurementScheme::exact_map;
         } else if (v == "euler") {
           c.sim.step.scheme = MeasurementScheme::euler_maruyama;
         } else {
           throw BadValue{"expected exact or euler"};
         }
       }},
      {"zlimit", [](RunConfig& c, std::string_view v) { c.protocol.z_limit = to_double(v); }},
      {"ng_lock", [](RunConfig& c, std::string_view v) { c.protocol.n_g_lock = to_double(v); }},
      {"delay_deg",
       [](RunConfig& c, std::string_view v) { c.protocol.delay_phase_deg = to_double(v); }},
      {"peak_window",
       [](RunConfig& c, std::string_view v) { c.protocol.peak_window = to_integer<int>(v); }},
      {"target_eps", [](RunConfig& c, std::string_view v) { c.sim.target_eps = to_double(v); }},
      {"snapshot_ns",
       [](RunConfig& c, std::string_view v) { c.sim.snapshot_time = to_double(v) * 1e-9; }},
      {"bins", [](RunConfig& c, std::string_view v) { c.bins = to_integer<int>(v); }},
      {"out", [](RunConfig& c, std::string_view v) { c.out = std::string(trim(v)); }},
      {"threads", [](RunConfig& c, std::string_view v) { c.threads = to_integer<unsigned>(v); }},
      {"nu_ghz",
       [](RunConfig& c, std::string_view v) {
         c.device.nu = 2.0 * std::numbers::pi * to_double(v) * 1e9;
       }},
      {"cj_af", [](RunConfig& c, std::string_view v) { c.device.c_j = to_double(v) * 1e-18; }},
      {"cg_af", [](RunConfig& c, std::string_view v) { c.device.c_g = to_double(v) * 1e-18; }},
      {"cp_af", [](RunConfig& c, std::string_view v) { c.device.c_p = to_double(v) * 1e-18; }},
      {"gamma", [](RunConfig& c, std::string_view v) { c.device.gamma = to_double(v); }},
      {"eps_grid", [](RunConfig& c, std::string_view v) { c.eps_grid = to_list(v); }},
      {"levels", [](RunConfig& c, std::string_view v) { c.levels = to_list(v); }},
      {"hist_lo", [](RunConfig& c, std::string_view v) { c.hist_lo = to_double(v); }},
      {"hist_hi", [](RunConfig& c, std::string_view v) { c.hist_hi = to_double(v); }},
      {"json", [](RunConfig& c, std::string_view v) { c.json = to_bool(v); }},
  };
  return table;
}

void check(std::vector<std::string>& problems, bool ok, const char* key, const char* message) {
  if (!ok) problems.push_back(std::string(key) + ": " + message);
}

void validate(const RunConfig& c, std::vector<std::string>& problems) {
  const DeviceParams& d = c.device;
  check(problems, d.nu > 0.0, "nu_ghz", "must be positive");
  check(problems, d.c_j > 0.0, "cj_af", "must be positive");
  check(problems, d.c_g > 0.0, "cg_af", "must be positive");
  check(problems, d.c_p > 0.0, "cp_af", "must be positive");
  check(problems, d.gamma >= 0.0, "gamma", "must be >= 0");

  const auto& st = c.sim.step;
  check(problems, st.dt > 0.0, "dt_fs", "must be positive");
  if (st.dt > 0.0) {
    check(problems, d.gamma * st.dt <= 1e-3, "dt_fs", "gamma*dt must not exceed 1e-3");
    if (d.nu > 0.0) {
      check(problems, st.dt <= d.josephson_period() / 200.0, "dt_fs",
            "must not exceed 1/200 of the Josephson period");
    }
  }
  check(problems, st.sample_stride >= 1, "sample_stride", "must be >= 1");
  check(problems, c.sim.t_max > 0.0, "tmax_ns", "must be positive");
  check(problems, c.sim.target_eps > 0.0 && c.sim.target_eps < 0.5, "target_eps",
        "must lie in (0, 0.5)");
  check(problems, c.sim.snapshot_time >= 0.0 && c.sim.snapshot_time <= c.sim.t_max,
        "snapshot_ns", "must lie in [0, tmax_ns]");

  const ProtocolSpec& p = c.protocol;
  check(problems, p.z_limit > 0.0 && p.z_limit < 1.0, "zlimit", "must lie in (0, 1)");
  check(problems, p.n_g_lock >= 0.5 && p.n_g_lock <= 0.75, "ng_lock", "must lie in [0.5, 0.75]");
  check(problems, p.delay_phase_deg >= 0.0, "delay_deg", "must be >= 0");
  check(problems, p.peak_window >= 1, "peak_window", "must be >= 1");

  check(problems, c.runs >= 1, "runs", "must be >= 1");
  check(problems, !c.bins || *c.bins >= 1, "bins", "must be >= 1");
  check(problems, !c.out.empty(), "out", "must not be empty");
  for (double e : c.eps_grid) {
    if (!(e > 0.0 && e < 0.5)) {
      check(problems, false, "eps_grid", "entries must lie in (0, 0.5)");
      break;
    }
  }
  for (double e : c.levels) {
    if (!(e > 0.0 && e < 0.5)) {
      check(problems, false, "levels", "entries must lie in (0, 0.5)");
      break;
    }
  }
  check(problems, c.hist_lo > 0.0 && c.hist_hi > c.hist_lo, "hist_lo",
        "need 0 < hist_lo < hist_hi");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

KeyValues read_key_values(std::string_view text) {
  KeyValues out;
  std::vector<std::string> problems;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back("line " + std::to_string(line_no) + ": expected key=value");
      continue;
    }
    out.emplace_back(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return out;
}

RunConfig parse_config(std::string_view file_text, const KeyValues& overrides) {
  RunConfig cfg;
  std::vector<std::string> problems;
  KeyValues entries;
  try {
    entries = read_key_values(file_text);
  } catch (const ConfigError& e) {
    problems = e.problems();
  }
  entries.insert(entries.end(), overrides.begin(), overrides.end());

  const auto& table = setters();
  for (const auto& [key, value] : entries) {
    const auto it = table.find(key);
    if (it == table.end()) {
      problems.push_back(key + ": unknown key");
      continue;
    }
    try {
      it->second(cfg, value);
    } catch (const BadValue& bad) {
      problems.push_back(key + ": " + bad.what);
    }
  }
  if (problems.empty()) validate(cfg, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

KeyValues config_echo(const RunConfig& c) {
  KeyValues kv;
  kv.emplace_back("protocol", std::string(to_string(c.protocol.kind)));
  kv.emplace_back("runs", std::to_string(c.runs));
  kv.emplace_back("seed", std::to_string(c.seed));
  kv.emplace_back("dt_fs", fmt(c.sim.step.dt * 1e15));
  kv.emplace_back("tmax_ns", fmt(c.sim.t_max * 1e9));
  kv.emplace_back("sample_stride", std::to_string(c.sim.step.sample_stride));
  kv.emplace_back("scheme", c.sim.step.scheme == MeasurementScheme::exact_map ? "exact" : "euler");
  kv.emplace_back("zlimit", fmt(c.protocol.z_limit));
  kv.emplace_back("ng_lock", fmt(c.protocol.n_g_lock));
  kv.emplace_back("delay_deg", fmt(c.protocol.delay_phase_deg));
  kv.emplace_back("peak_window", std::to_string(c.protocol.peak_window));
  kv.emplace_back("target_eps", fmt(c.sim.target_eps));
  kv.emplace_back("snapshot_ns", fmt(c.sim.snapshot_time * 1e9));
  kv.emplace_back("bins", c.bins ? std::to_string(*c.bins) : "default");
  kv.emplace_back("out", c.out);
  kv.emplace_back("nu_ghz", fmt(c.device.nu / (2.0 * std::numbers::pi) * 1e-9));
  kv.emplace_back("cj_af", fmt(c.device.c_j * 1e18));
  kv.emplace_back("cg_af", fmt(c.device.c_g * 1e18));
  kv.emplace_back("cp_af", fmt(c.device.c_p * 1e18));
  kv.emplace_back("gamma", fmt(c.device.gamma));
  kv.emplace_back("eps_grid", fmt_list(c.eps_grid));
  kv.emplace_back("levels", fmt_list(c.levels));
  kv.emplace_back("hist_lo", fmt(c.hist_lo));
  kv.emplace_back("hist_hi", fmt(c.hist_hi));
  kv.emplace_back("json", c.json ? "true" : "false");
  return kv;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view key) {
  try {
    return to_list(text);
  } catch (const BadValue& bad) {
    throw ConfigError({std::string(key) + ": " + bad.what});
  }
}

std::vector<std::string_view> config_keys() {
  std::vector<std::string_view> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

}  // namespace purify

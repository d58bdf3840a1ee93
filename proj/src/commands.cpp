#include "purify/commands.hpp"

#include "purify/baseline.hpp"
#include "purify/ensemble.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace purify {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

constexpr double kNs = 1e9;

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f.flush()) throw std::runtime_error("failed writing " + path.string());
}

nlohmann::ordered_json config_json(const RunConfig& cfg, std::string_view command) {
  nlohmann::ordered_json meta;
  meta["tool"] = "purify";
  meta["version"] = std::string(kVersion);
  meta["command"] = std::string(command);
  for (const auto& [k, v] : config_echo(cfg)) meta["config"][k] = v;
  return meta;
}

void write_json(const RunConfig& cfg, const std::filesystem::path& path,
                const nlohmann::ordered_json& doc, std::vector<std::filesystem::path>& written) {
  if (!cfg.json) return;
  std::filesystem::path p = path;
  p += ".json";
  write_file(p, doc.dump(1) + "\n");
  written.push_back(p);
}

SimulationConfig histogram_sim(const RunConfig& cfg) {
  SimulationConfig sim = cfg.sim;
  sim.record_transient = false;
  return sim;
}

}  // namespace

std::filesystem::path sibling_path(const std::filesystem::path& out, std::string_view tag) {
  std::filesystem::path p = out.parent_path() / out.stem();
  p += "_";
  p += std::string(tag);
  p += out.extension();
  return p;
}

std::string output_header(const RunConfig& cfg, std::string_view command) {
  std::ostringstream h;
  h << "# purify " << kVersion << "\n";
  h << "# command = " << command << "\n";
  for (const auto& [k, v] : config_echo(cfg)) h << "# " << k << " = " << v << "\n";
  h << "# master_seed = " << cfg.seed << "\n";
  h << "# rotation = dr/dt = Omega x r, Omega = (-nu, 0, omega_z), omega_z = (2e)^2/(hbar C_q) (1/2 - n_g)\n";
  h << "# first_passage = first sample-grid time with L <= target_eps (bias <= one sample interval = "
    << num(cfg.sim.sample_interval() * kNs) << " ns)\n";
  return h.str();
}

std::vector<std::filesystem::path> cmd_baseline(const RunConfig& cfg) {
  std::vector<std::filesystem::path> written;
  const double gamma = cfg.device.gamma;
  if (!(gamma > 0.0)) throw std::invalid_argument("baseline needs gamma > 0");
  const std::filesystem::path curves = cfg.out;
  const std::filesystem::path inversion = sibling_path(curves, "inversion");

  std::ostringstream c;
  c << output_header(cfg, "baseline") << "t_ns,L_bar_II,L_bar_I\n";
  nlohmann::ordered_json curves_doc = config_json(cfg, "baseline");
  const std::size_t n = cfg.sim.sample_count();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * cfg.sim.sample_interval();
    const double l2 = impurity_no_hamiltonian(t, gamma);
    const double l1 = impurity_ideal_I(t, gamma);
    c << num(t * kNs) << "," << num(l2) << "," << num(l1) << "\n";
    curves_doc["rows"].push_back({t * kNs, l2, l1});
  }
  write_file(curves, c.str());
  written.push_back(curves);
  write_json(cfg, curves, curves_doc, written);

  std::ostringstream inv;
  inv << output_header(cfg, "baseline") << "eps,T_II_ns,T_I_ns,S_I\n";
  nlohmann::ordered_json inv_doc = config_json(cfg, "baseline");
  for (double eps : cfg.eps_grid) {
    const double t2 = time_to_impurity_II(eps, gamma);
    const double t1 = time_to_impurity_I(eps, gamma);
    inv << num(eps) << "," << num(t2 * kNs) << "," << num(t1 * kNs) << "," << num(t2 / t1) << "\n";
    inv_doc["rows"].push_back({eps, t2 * kNs, t1 * kNs, t2 / t1});
  }
  write_file(inversion, inv.str());
  written.push_back(inversion);
  write_json(cfg, inversion, inv_doc, written);
  return written;
}

std::vector<std::filesystem::path> cmd_simulate(const RunConfig& cfg) {
  std::vector<std::filesystem::path> written;
  SimulationConfig sim = cfg.sim;
  sim.record_transient = true;
  const EnsembleStats stats =
      run_ensemble(cfg.protocol, cfg.device, sim, cfg.runs, cfg.seed, cfg.threads);

  const std::filesystem::path transient = cfg.out;
  const std::filesystem::path runs = sibling_path(transient, "runs");

  std::ostringstream t;
  t << output_header(cfg, "simulate") << "t_ns,mean_L,stderr_L\n";
  nlohmann::ordered_json t_doc = config_json(cfg, "simulate");
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    t << num(stats.times[k] * kNs) << "," << num(stats.mean_impurity[k]) << ","
      << num(stats.stderr_impurity[k]) << "\n";
    t_doc["rows"].push_back({stats.times[k] * kNs, stats.mean_impurity[k], stats.stderr_impurity[k]});
  }
  write_file(transient, t.str());
  written.push_back(transient);
  write_json(cfg, transient, t_doc, written);

  std::ostringstream r;
  r << output_header(cfg, "simulate") << "run_index,first_passage_ns,L_at_snapshot\n";
  nlohmann::ordered_json r_doc = config_json(cfg, "simulate");
  for (const RunSummary& s : stats.runs) {
    const std::string fp = s.first_passage ? num(*s.first_passage * kNs) : "OVER";
    r << s.index << "," << fp << "," << num(s.impurity_at_snapshot) << "\n";
    nlohmann::ordered_json fp_json = s.first_passage ? nlohmann::ordered_json(*s.first_passage * kNs)
                                                     : nlohmann::ordered_json("OVER");
    r_doc["rows"].push_back({s.index, fp_json, s.impurity_at_snapshot});
  }
  write_file(runs, r.str());
  written.push_back(runs);
  write_json(cfg, runs, r_doc, written);
  return written;
}

std::vector<std::filesystem::path> cmd_hist(const RunConfig& cfg, HistKind kind) {
  std::vector<std::filesystem::path> written;
  const EnsembleStats stats =
      run_ensemble(cfg.protocol, cfg.device, histogram_sim(cfg), cfg.runs, cfg.seed, cfg.threads);

  const bool fp = kind == HistKind::first_passage;
  const int bins = cfg.bins.value_or(fp ? 100 : 50);
  const Histogram h = fp ? first_passage_histogram(stats.runs, cfg.sim.t_max, bins)
                         : impurity_at_time_histogram(stats.runs, bins, cfg.hist_lo, cfg.hist_hi);
  const double scale = fp ? kNs : 1.0;

  std::ostringstream o;
  o << output_header(cfg, fp ? "hist first-passage" : "hist impurity-at");
  o << "# modal_bin_center = " << num(h.bin_center(h.modal_bin()) * scale) << "\n";
  o << "bin_lo,bin_hi,count\n";
  nlohmann::ordered_json doc = config_json(cfg, fp ? "hist first-passage" : "hist impurity-at");
  if (!fp) {
    o << "UNDERFLOW,UNDERFLOW," << h.underflow << "\n";
    doc["underflow"] = h.underflow;
  }
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    o << num(h.edges[i] * scale) << "," << num(h.edges[i + 1] * scale) << "," << h.counts[i] << "\n";
    doc["rows"].push_back({h.edges[i] * scale, h.edges[i + 1] * scale, h.counts[i]});
  }
  if (fp || h.overflow > 0) o << "OVERFLOW,OVERFLOW," << h.overflow << "\n";
  doc["overflow"] = h.overflow;
  doc["modal_bin_center"] = h.bin_center(h.modal_bin()) * scale;

  const std::filesystem::path out = cfg.out;
  write_file(out, o.str());
  written.push_back(out);
  write_json(cfg, out, doc, written);
  return written;
}

std::vector<std::filesystem::path> cmd_sweep(const RunConfig& cfg, std::string_view axis,
                                             const std::vector<double>& values) {
  std::vector<std::filesystem::path> written;
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  SweepResult result;
  if (axis == "zlimit") {
    result = sweep_zlimit(values, cfg.levels, cfg.protocol, cfg.device, cfg.sim, cfg.runs, cfg.seed,
                          cfg.threads);
  } else if (axis == "delay") {
    for (double v : values) {
      if (!(v >= 0.0)) throw std::invalid_argument("delay sweep phases must be >= 0");
    }
    result = sweep_delay(values, cfg.levels, cfg.protocol, cfg.device, cfg.sim, cfg.runs, cfg.seed,
                         cfg.threads);
  } else {
    throw std::invalid_argument("sweep axis must be zlimit or delay");
  }

  std::ostringstream o;
  o << output_header(cfg, "sweep " + std::string(axis));
  o << "value";
  for (double l : result.levels) o << ",S_" << num(l);
  o << "\n";
  nlohmann::ordered_json doc = config_json(cfg, "sweep " + std::string(axis));
  doc["levels"] = result.levels;
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    o << num(result.values[i]);
    nlohmann::ordered_json row;
    row["value"] = result.values[i];
    for (const SpeedupPoint& p : result.speedups[i]) {
      o << "," << (p.reached ? num(p.speedup) : "NA");
      row["speedup"].push_back(p.reached ? nlohmann::ordered_json(p.speedup) : nlohmann::ordered_json());
      row["stderr"].push_back(p.reached ? nlohmann::ordered_json(p.speedup_stderr)
                                        : nlohmann::ordered_json());
    }
    o << "\n";
    doc["rows"].push_back(row);
  }
  const std::filesystem::path out = cfg.out;
  write_file(out, o.str());
  written.push_back(out);
  write_json(cfg, out, doc, written);
  return written;
}

}  // namespace purify

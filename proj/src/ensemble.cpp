#include "purify/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace purify {

void SimulationConfig::validate(const DeviceParams& params) const {
  step.validate(params);
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::invalid_argument("tmax must be positive");
  if (!(target_eps > 0.0 && target_eps < 0.5)) {
    throw std::invalid_argument("target_eps must lie in (0, 0.5)");
  }
  if (!(snapshot_time >= 0.0 && snapshot_time <= t_max)) {
    throw std::invalid_argument("snapshot time must lie in [0, tmax]");
  }
}

long SimulationConfig::total_steps() const { return std::lround(t_max / step.dt); }

long SimulationConfig::snapshot_step() const { return std::lround(snapshot_time / step.dt); }

std::size_t SimulationConfig::sample_count() const {
  return static_cast<std::size_t>(total_steps() / step.sample_stride) + 1;
}

namespace {

bool counts_as_trigger(ControllerEvent e) {
  return e == ControllerEvent::pulse_start || e == ControllerEvent::delay_start ||
         e == ControllerEvent::lock;
}

}  // namespace

TrajectoryResult run_trajectory(const ProtocolSpec& spec, const DeviceParams& params,
                                const SimulationConfig& sim, std::uint64_t master_seed,
                                std::uint64_t index, bool log_events) {
  spec.validate();
  sim.validate(params);

  const double dt = sim.step.dt;
  const long stride = sim.step.sample_stride;
  const long total = sim.total_steps();
  const long snapshot = sim.snapshot_step();

  Stepper stepper(params, sim.step);
  Controller controller(spec, params, dt);
  NoiseStream noise(master_seed, index);

  TrajectoryResult result;
  result.index = index;
  result.sample_interval = sim.sample_interval();
  if (sim.record_transient) result.impurity.reserve(sim.sample_count());

  BlochState v = BlochState::Zero();
  auto observe = [&](long k) {
    if (k % stride == 0) {
      const double l = impurity(v);
      if (sim.record_transient) result.impurity.push_back(l);
      if (!result.first_passage && l <= sim.target_eps) {
        result.first_passage = static_cast<double>(k / stride) * result.sample_interval;
      }
    }
    if (k == snapshot) result.impurity_at_snapshot = impurity(v);
  };

  observe(0);
  for (long k = 1; k <= total; ++k) {
    const ControlOutput out = controller.command(v);
    if (log_events && controller.last_event() != ControllerEvent::none) {
      result.trigger_log.push_back({static_cast<double>(k - 1) * dt, controller.last_event()});
    }
    const double dW = noise.increment(dt);
    const StepOutcome o = controller.evolve(stepper, v, out, dW);
    if (o.clamped) ++result.clamp_count;
    v = controller.correct(o.state);
    result.steps = k;
    observe(k);
    if (!sim.record_transient && result.first_passage && k >= snapshot) break;
  }
  return result;
}

namespace {

constexpr std::size_t kChunk = 64;

// Per-sample running mean and sum of squared deviations (Welford).
struct ChunkPartial {
  double count = 0.0;
  std::vector<double> mean;
  std::vector<double> m2;
  std::vector<RunSummary> runs;
  long steps = 0;
  long clamps = 0;
};

ChunkPartial run_chunk(const ProtocolSpec& spec, const DeviceParams& params,
                       const SimulationConfig& sim, std::uint64_t master_seed,
                       std::size_t first, std::size_t last) {
  ChunkPartial part;
  if (sim.record_transient) {
    part.mean.assign(sim.sample_count(), 0.0);
    part.m2.assign(sim.sample_count(), 0.0);
  }
  for (std::size_t i = first; i < last; ++i) {
    TrajectoryResult r = run_trajectory(spec, params, sim, master_seed, i, true);
    part.count += 1.0;
    for (std::size_t k = 0; k < r.impurity.size(); ++k) {
      const double delta = r.impurity[k] - part.mean[k];
      part.mean[k] += delta / part.count;
      part.m2[k] += delta * (r.impurity[k] - part.mean[k]);
    }
    RunSummary s;
    s.index = i;
    s.first_passage = r.first_passage;
    s.impurity_at_snapshot = r.impurity_at_snapshot;
    s.triggers = std::count_if(r.trigger_log.begin(), r.trigger_log.end(),
                               [](const TrajectoryEvent& e) { return counts_as_trigger(e.event); });
    part.runs.push_back(s);
    part.steps += r.steps;
    part.clamps += r.clamp_count;
  }
  return part;
}

}  // namespace

EnsembleStats run_ensemble(const ProtocolSpec& spec, const DeviceParams& params,
                           const SimulationConfig& sim, std::size_t n_runs,
                           std::uint64_t master_seed, unsigned workers) {
  if (n_runs < 1) throw std::invalid_argument("run count must be >= 1");
  spec.validate();
  sim.validate(params);

  const std::size_t n_chunks = (n_runs + kChunk - 1) / kChunk;
  std::vector<ChunkPartial> parts(n_chunks);
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      parts[c] = run_chunk(spec, params, sim, master_seed, c * kChunk,
                           std::min(n_runs, (c + 1) * kChunk));
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  EnsembleStats stats;
  stats.spec = spec;
  stats.config = sim;
  stats.master_seed = master_seed;
  stats.run_count = n_runs;
  stats.runs.reserve(n_runs);

  // Chunks are merged in index order, so the result does not depend on scheduling.
  ChunkPartial total;
  if (sim.record_transient) {
    total.mean.assign(sim.sample_count(), 0.0);
    total.m2.assign(sim.sample_count(), 0.0);
  }
  for (const ChunkPartial& p : parts) {
    const double n = total.count + p.count;
    for (std::size_t k = 0; k < p.mean.size(); ++k) {
      const double delta = p.mean[k] - total.mean[k];
      total.mean[k] += delta * p.count / n;
      total.m2[k] += p.m2[k] + delta * delta * total.count * p.count / n;
    }
    total.count = n;
    stats.runs.insert(stats.runs.end(), p.runs.begin(), p.runs.end());
    stats.total_steps += p.steps;
    stats.clamp_count += p.clamps;
  }

  if (sim.record_transient) {
    const double n = static_cast<double>(n_runs);
    const std::size_t samples = total.mean.size();
    stats.times.resize(samples);
    stats.mean_impurity = total.mean;
    stats.stderr_impurity.resize(samples);
    for (std::size_t k = 0; k < samples; ++k) {
      stats.times[k] = static_cast<double>(k) * sim.sample_interval();
      const double var = n > 1 ? std::max(0.0, total.m2[k] / (n - 1.0)) : 0.0;
      stats.stderr_impurity[k] = std::sqrt(var / n);
    }
  }
  return stats;
}

std::vector<double> isotonic_non_increasing(std::span<const double> values) {
  struct Block {
    double mean;
    std::size_t count;
  };
  std::vector<Block> blocks;
  blocks.reserve(values.size());
  for (double v : values) {
    blocks.push_back({v, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean < blocks.back().mean) {
      const Block last = blocks.back();
      blocks.pop_back();
      Block& prev = blocks.back();
      const std::size_t n = prev.count + last.count;
      prev.mean = (prev.mean * prev.count + last.mean * last.count) / n;
      prev.count = n;
    }
  }
  std::vector<double> fit;
  fit.reserve(values.size());
  for (const Block& b : blocks) fit.insert(fit.end(), b.count, b.mean);
  return fit;
}

std::vector<SpeedupPoint> speedup_curve(std::span<const double> times,
                                        std::span<const double> mean,
                                        std::span<const double> stderr_mean,
                                        std::span<const double> levels, double gamma,
                                        const QuadratureConfig& quad) {
  if (times.size() != mean.size() || (!stderr_mean.empty() && stderr_mean.size() != mean.size())) {
    throw std::invalid_argument("speedup_curve: series length mismatch");
  }
  const std::vector<double> fit = isotonic_non_increasing(mean);
  std::vector<SpeedupPoint> curve;
  for (double eps : levels) {
    SpeedupPoint p;
    p.eps = eps;
    const auto it = std::find_if(fit.begin(), fit.end(), [eps](double l) { return l <= eps; });
    if (it == fit.end() || it == fit.begin()) {
      curve.push_back(p);
      continue;
    }
    const std::size_t i = static_cast<std::size_t>(it - fit.begin());
    const double l0 = fit[i - 1];
    const double l1 = fit[i];
    const double frac = l0 > l1 ? (l0 - eps) / (l0 - l1) : 1.0;
    p.t_test = times[i - 1] + frac * (times[i] - times[i - 1]);
    p.reached = true;
    p.speedup = time_to_impurity_II(eps, gamma, quad) / p.t_test;

    if (!stderr_mean.empty()) {
      // Slope of the raw transient over a few samples either side of the crossing.
      const std::size_t w = 5;
      const std::size_t a = i > w ? i - w : 0;
      const std::size_t b = std::min(mean.size() - 1, i + w);
      const double slope = (mean[b] - mean[a]) / (times[b] - times[a]);
      const double se_l = stderr_mean[i - 1] + frac * (stderr_mean[i] - stderr_mean[i - 1]);
      p.speedup_stderr = slope < 0.0 ? p.speedup * (se_l / -slope) / p.t_test
                                     : std::numeric_limits<double>::infinity();
    }
    curve.push_back(p);
  }
  return curve;
}

std::vector<SpeedupPoint> speedup_curve(const EnsembleStats& stats,
                                        std::span<const double> levels, double gamma,
                                        const QuadratureConfig& quad) {
  return speedup_curve(stats.times, stats.mean_impurity, stats.stderr_impurity, levels, gamma,
                       quad);
}

long Histogram::total() const {
  long n = underflow + overflow;
  for (long c : counts) n += c;
  return n;
}

std::size_t Histogram::modal_bin() const {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

Histogram first_passage_histogram(std::span<const RunSummary> runs, double t_max, int n_bins) {
  if (n_bins < 1 || !(t_max > 0.0)) throw std::invalid_argument("histogram needs bins >= 1, t_max > 0");
  Histogram h;
  h.counts.assign(n_bins, 0);
  h.edges.resize(n_bins + 1);
  for (int i = 0; i <= n_bins; ++i) h.edges[i] = t_max * i / n_bins;
  for (const RunSummary& r : runs) {
    if (!r.first_passage || *r.first_passage > t_max) {
      ++h.overflow;
      continue;
    }
    const auto bin = static_cast<long>(std::floor(*r.first_passage / t_max * n_bins));
    ++h.counts[std::clamp<long>(bin, 0, n_bins - 1)];
  }
  return h;
}

Histogram impurity_at_time_histogram(std::span<const RunSummary> runs, int n_bins, double lo,
                                     double hi) {
  if (n_bins < 1 || !(lo > 0.0) || !(hi > lo)) {
    throw std::invalid_argument("histogram needs bins >= 1 and 0 < lo < hi");
  }
  Histogram h;
  h.counts.assign(n_bins, 0);
  h.edges.resize(n_bins + 1);
  const double log_lo = std::log10(lo);
  const double log_hi = std::log10(hi);
  for (int i = 0; i <= n_bins; ++i) {
    h.edges[i] = std::pow(10.0, log_lo + (log_hi - log_lo) * i / n_bins);
  }
  h.edges.front() = lo;
  h.edges.back() = hi;
  for (const RunSummary& r : runs) {
    const double l = r.impurity_at_snapshot;
    if (l < lo) {
      ++h.underflow;
    } else if (l > hi) {
      ++h.overflow;
    } else {
      const auto bin = static_cast<long>(std::floor((std::log10(l) - log_lo) / (log_hi - log_lo) * n_bins));
      ++h.counts[std::clamp<long>(bin, 0, n_bins - 1)];
    }
  }
  return h;
}

namespace {

SweepResult sweep(std::string axis, std::span<const double> values, std::span<const double> levels,
                  const std::vector<ProtocolSpec>& specs, const DeviceParams& params,
                  const SimulationConfig& sim, std::size_t n_runs, std::uint64_t master_seed,
                  unsigned workers) {
  SweepResult out;
  out.axis = std::move(axis);
  out.values.assign(values.begin(), values.end());
  out.levels.assign(levels.begin(), levels.end());
  SimulationConfig cfg = sim;
  cfg.record_transient = true;
  for (const ProtocolSpec& spec : specs) {
    const EnsembleStats stats = run_ensemble(spec, params, cfg, n_runs, master_seed, workers);
    out.speedups.push_back(speedup_curve(stats, levels, params.gamma));
  }
  return out;
}

}  // namespace

SweepResult sweep_zlimit(std::span<const double> values, std::span<const double> levels,
                         const ProtocolSpec& spec_template, const DeviceParams& params,
                         const SimulationConfig& sim, std::size_t n_runs,
                         std::uint64_t master_seed, unsigned workers) {
  std::vector<ProtocolSpec> specs;
  for (double v : values) {
    if (!(v > 0.0)) throw std::invalid_argument("zlimit sweep values must be positive");
    ProtocolSpec s = spec_template;
    s.kind = ProtocolKind::practical_I;
    s.z_limit = v;
    // |z| never exceeds the Bloch length, so such a threshold never fires.
    if (v >= 1.0) s.kind = ProtocolKind::none;
    specs.push_back(s);
  }
  return sweep("zlimit", values, levels, specs, params, sim, n_runs, master_seed, workers);
}

SweepResult sweep_delay(std::span<const double> phases_deg, std::span<const double> levels,
                        const ProtocolSpec& spec_template, const DeviceParams& params,
                        const SimulationConfig& sim, std::size_t n_runs,
                        std::uint64_t master_seed, unsigned workers) {
  std::vector<ProtocolSpec> specs;
  for (double phase : phases_deg) {
    ProtocolSpec s = spec_template;
    s.kind = ProtocolKind::practical_I;
    s.delay_phase_deg = phase;
    specs.push_back(s);
  }
  return sweep("delay", phases_deg, levels, specs, params, sim, n_runs, master_seed, workers);
}

}  // namespace purify

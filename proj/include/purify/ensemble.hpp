#pragma once

#include "purify/baseline.hpp"
#include "purify/controllers.hpp"
#include "purify/physics.hpp"
#include "purify/sde.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace purify {

/// Time window and observation points shared by every trajectory of a run.
struct SimulationConfig {
  StepConfig step;
  double t_max = 20.0e-9;
  double target_eps = 1.0e-3;
  double snapshot_time = 7.5e-9;
  /// When false, trajectories stop as soon as both the first passage and the
  /// snapshot are known and no impurity series is kept.
  bool record_transient = true;

  void validate(const DeviceParams& params) const;

  long total_steps() const;
  long snapshot_step() const;
  std::size_t sample_count() const;
  double sample_interval() const { return step.dt * step.sample_stride; }
};

struct TrajectoryEvent {
  double time = 0.0;
  ControllerEvent event = ControllerEvent::none;
};

struct TrajectoryResult {
  std::uint64_t index = 0;
  double sample_interval = 0.0;
  std::vector<double> impurity;  ///< sample k is at time k * sample_interval
  /// First sample-grid time with impurity <= target; nullopt past t_max.
  std::optional<double> first_passage;
  double impurity_at_snapshot = 0.5;
  std::vector<TrajectoryEvent> trigger_log;
  long steps = 0;
  long clamp_count = 0;
};

/// Per-run scalars kept by an ensemble.
struct RunSummary {
  std::uint64_t index = 0;
  std::optional<double> first_passage;
  double impurity_at_snapshot = 0.5;
  long triggers = 0;
};

struct Histogram {
  std::vector<double> edges;  ///< counts.size() + 1 ascending edges
  std::vector<long> counts;
  long underflow = 0;
  long overflow = 0;

  long total() const;
  std::size_t modal_bin() const;
  double bin_center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
};

struct EnsembleStats {
  ProtocolSpec spec;
  SimulationConfig config;
  std::uint64_t master_seed = 0;
  std::size_t run_count = 0;
  std::vector<double> times;
  std::vector<double> mean_impurity;
  std::vector<double> stderr_impurity;
  std::vector<RunSummary> runs;  ///< ordered by run index
  long total_steps = 0;
  long clamp_count = 0;
};

/// Integrate one trajectory from the completely mixed state (0, 0, 0).
/// Deterministic in (spec, params, sim, master_seed, index).
TrajectoryResult run_trajectory(const ProtocolSpec& spec, const DeviceParams& params,
                                const SimulationConfig& sim, std::uint64_t master_seed,
                                std::uint64_t index, bool log_events = true);

/// Runs indices 0..n_runs-1 on `workers` threads (0 = hardware concurrency).
/// Results are bit-identical for any worker count.
EnsembleStats run_ensemble(const ProtocolSpec& spec, const DeviceParams& params,
                           const SimulationConfig& sim, std::size_t n_runs,
                           std::uint64_t master_seed, unsigned workers = 0);

struct SpeedupPoint {
  double eps = 0.0;
  bool reached = false;
  double t_test = 0.0;
  double speedup = 0.0;
  double speedup_stderr = 0.0;  ///< propagated from the transient's standard error
};

/// Time at which a non-increasing fit of the transient first reaches each
/// level (linear interpolation between samples) and the resulting speed-up.
/// Levels the transient never reaches are flagged, not extrapolated.
std::vector<SpeedupPoint> speedup_curve(std::span<const double> times,
                                        std::span<const double> mean,
                                        std::span<const double> stderr_mean,
                                        std::span<const double> levels, double gamma,
                                        const QuadratureConfig& quad = {});

std::vector<SpeedupPoint> speedup_curve(const EnsembleStats& stats,
                                        std::span<const double> levels, double gamma,
                                        const QuadratureConfig& quad = {});

/// Non-increasing least-squares fit (pool adjacent violators).
std::vector<double> isotonic_non_increasing(std::span<const double> values);

/// Uniform bins on [0, t_max]; runs that never reached the target go to overflow.
Histogram first_passage_histogram(std::span<const RunSummary> runs, double t_max, int n_bins);

/// Log-spaced bins on [lo, hi]; values below lo are counted as underflow.
Histogram impurity_at_time_histogram(std::span<const RunSummary> runs, int n_bins,
                                     double lo = 1e-8, double hi = 0.5);

struct SweepResult {
  std::string axis;
  std::vector<double> values;
  std::vector<double> levels;
  std::vector<std::vector<SpeedupPoint>> speedups;  ///< [value][level]
};

/// One practical-I ensemble per threshold; thresholds >= 1 run without feedback.
SweepResult sweep_zlimit(std::span<const double> values, std::span<const double> levels,
                         const ProtocolSpec& spec_template, const DeviceParams& params,
                         const SimulationConfig& sim, std::size_t n_runs,
                         std::uint64_t master_seed, unsigned workers = 0);

/// One practical-I ensemble per phase delay (degrees of a Josephson period).
SweepResult sweep_delay(std::span<const double> phases_deg, std::span<const double> levels,
                        const ProtocolSpec& spec_template, const DeviceParams& params,
                        const SimulationConfig& sim, std::size_t n_runs,
                        std::uint64_t master_seed, unsigned workers = 0);

}  // namespace purify

#include <doctest.h>

#include "purify/baseline.hpp"
#include "purify/ensemble.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace purify;

namespace {

SimulationConfig short_window() {
  SimulationConfig sim;
  sim.t_max = 2e-9;
  sim.snapshot_time = 1e-9;
  sim.target_eps = 0.2;
  return sim;
}

ProtocolSpec spec_of(ProtocolKind kind) {
  ProtocolSpec s;
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("trajectories are reproducible and index dependent") {
  const DeviceParams p;
  const SimulationConfig sim = short_window();
  const ProtocolSpec s = spec_of(ProtocolKind::practical_I);
  const TrajectoryResult a = run_trajectory(s, p, sim, 42, 3);
  const TrajectoryResult b = run_trajectory(s, p, sim, 42, 3);
  const TrajectoryResult c = run_trajectory(s, p, sim, 42, 4);
  CHECK(a.impurity == b.impurity);
  CHECK(a.impurity != c.impurity);
  CHECK(a.impurity.size() == sim.sample_count());
  CHECK(a.impurity.front() == 0.5);
  CHECK(a.steps == sim.total_steps());
  CHECK(a.impurity_at_snapshot == a.impurity[static_cast<std::size_t>(sim.snapshot_step() / sim.step.sample_stride)]);
  if (a.first_passage) CHECK(a.impurity[static_cast<std::size_t>(std::lround(*a.first_passage / a.sample_interval))] <= 0.2);
}

TEST_CASE("ensembles do not depend on the worker count") {
  const DeviceParams p;
  const SimulationConfig sim = short_window();
  for (auto kind : {ProtocolKind::none, ProtocolKind::practical_I, ProtocolKind::practical_II}) {
    const EnsembleStats one = run_ensemble(spec_of(kind), p, sim, 150, 9, 1);
    const EnsembleStats three = run_ensemble(spec_of(kind), p, sim, 150, 9, 3);
    CHECK(one.mean_impurity == three.mean_impurity);
    CHECK(one.stderr_impurity == three.stderr_impurity);
    REQUIRE(one.runs.size() == three.runs.size());
    for (std::size_t i = 0; i < one.runs.size(); ++i) {
      CHECK(one.runs[i].index == i);
      CHECK(one.runs[i].first_passage == three.runs[i].first_passage);
      CHECK(one.runs[i].impurity_at_snapshot == three.runs[i].impurity_at_snapshot);
    }
  }
}

TEST_CASE("early stop keeps the per-run summary") {
  const DeviceParams p;
  SimulationConfig full = short_window();
  SimulationConfig lean = full;
  lean.record_transient = false;
  const EnsembleStats a = run_ensemble(spec_of(ProtocolKind::practical_I), p, full, 64, 5, 1);
  const EnsembleStats b = run_ensemble(spec_of(ProtocolKind::practical_I), p, lean, 64, 5, 1);
  CHECK(b.mean_impurity.empty());
  CHECK(b.total_steps <= a.total_steps);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].first_passage == b.runs[i].first_passage);
    CHECK(a.runs[i].impurity_at_snapshot == b.runs[i].impurity_at_snapshot);
  }
}

TEST_CASE("ideal I ensemble is deterministic") {
  const DeviceParams p;
  const EnsembleStats s = run_ensemble(spec_of(ProtocolKind::ideal_I), p, short_window(), 20, 1, 1);
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    CHECK(s.stderr_impurity[k] < 1e-12);
    CHECK(std::abs(s.mean_impurity[k] - impurity_ideal_I(s.times[k], p.gamma)) < 1e-4);
  }
  for (const RunSummary& r : s.runs) CHECK(r.first_passage == s.runs.front().first_passage);
}

TEST_CASE("histograms account for every run") {
  std::vector<RunSummary> runs;
  for (int i = 0; i < 1000; ++i) {
    RunSummary r;
    r.index = static_cast<std::uint64_t>(i);
    if (i % 10 != 0) r.first_passage = (i % 97) * 0.2e-9;
    r.impurity_at_snapshot = std::pow(10.0, -(i % 11));
    runs.push_back(r);
  }
  const Histogram fp = first_passage_histogram(runs, 20e-9, 100);
  CHECK(fp.total() == 1000);
  CHECK(fp.overflow == 100);
  CHECK(fp.edges.front() == 0.0);
  CHECK(fp.edges.back() == doctest::Approx(20e-9));
  const Histogram im = impurity_at_time_histogram(runs, 50, 1e-8, 0.5);
  CHECK(im.total() == 1000);
  CHECK(im.underflow > 0);
  CHECK(im.overflow > 0);  // L = 1 in the synthetic data
  CHECK_THROWS_AS(first_passage_histogram(runs, 20e-9, 0), std::invalid_argument);
  CHECK_THROWS_AS(impurity_at_time_histogram(runs, 10, 0.0, 0.5), std::invalid_argument);

  Histogram h;
  h.counts = {1, 5, 5, 2};
  CHECK(h.modal_bin() == 1);
}

TEST_CASE("isotonic fit") {
  const std::vector<double> v{5, 4, 4.5, 3, 3.2, 3.1, 1};
  const std::vector<double> fit = isotonic_non_increasing(v);
  REQUIRE(fit.size() == v.size());
  for (std::size_t i = 1; i < fit.size(); ++i) CHECK(fit[i] <= fit[i - 1]);
  CHECK(fit[1] == doctest::Approx(4.25));
  CHECK(fit[3] == doctest::Approx((3 + 3.2 + 3.1) / 3));
  double sum_v = 0, sum_f = 0;
  for (std::size_t i = 0; i < v.size(); ++i) sum_v += v[i], sum_f += fit[i];
  CHECK(sum_f == doctest::Approx(sum_v));
}

TEST_CASE("speed-up curve recovers the ideal I envelope") {
  const double g = 7.5e7;
  std::vector<double> t, l;
  for (int k = 0; k <= 4000; ++k) {
    t.push_back(k * 1e-11);
    l.push_back(impurity_ideal_I(t.back(), g));
  }
  const std::vector<double> levels{1e-2, 1e-3, 1e-4, 1e-12};
  const std::vector<SpeedupPoint> c = speedup_curve(t, l, {}, levels, g);
  REQUIRE(c.size() == 4);
  for (int i = 0; i < 3; ++i) {
    CHECK(c[i].reached);
    CHECK(c[i].t_test == doctest::Approx(time_to_impurity_I(levels[i], g)).epsilon(1e-4));
    CHECK(c[i].speedup == doctest::Approx(time_to_impurity_II(levels[i], g) / time_to_impurity_I(levels[i], g)).epsilon(1e-4));
  }
  CHECK_FALSE(c[3].reached);
  CHECK_THROWS_AS(speedup_curve(t, std::vector<double>(3, 0.1), {}, levels, g), std::invalid_argument);
}

TEST_CASE("sweeps") {
  const DeviceParams p;
  SimulationConfig sim = short_window();
  const std::vector<double> levels{0.3, 1e-9};
  const SweepResult z = sweep_zlimit(std::vector<double>{0.333, 1.0}, levels, {}, p, sim, 64, 2, 1);
  REQUIRE(z.speedups.size() == 2);
  CHECK(z.speedups[0][0].reached);
  CHECK_FALSE(z.speedups[0][1].reached);
  // zlimit >= 1 never triggers and matches the no-feedback ensemble.
  const EnsembleStats none = run_ensemble(spec_of(ProtocolKind::none), p, sim, 64, 2, 1);
  CHECK(z.speedups[1][0].speedup == speedup_curve(none, levels, p.gamma)[0].speedup);
  const SweepResult d = sweep_delay(std::vector<double>{0.0, 90.0}, levels, {}, p, sim, 64, 2, 1);
  CHECK(d.speedups.size() == 2);
  CHECK(d.axis == "delay");
}

TEST_CASE("configuration errors") {
  const DeviceParams p;
  SimulationConfig sim = short_window();
  CHECK_THROWS_AS(run_ensemble(spec_of(ProtocolKind::none), p, sim, 0, 1), std::invalid_argument);
  sim.snapshot_time = 5e-9;
  CHECK_THROWS_AS(run_ensemble(spec_of(ProtocolKind::none), p, sim, 1, 1), std::invalid_argument);
}

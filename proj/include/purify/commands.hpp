#pragma once

#include "purify/config.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace purify {

enum class HistKind { first_passage, impurity_at };

/// `dir/stem.ext` -> `dir/stem_<tag>.ext`.
std::filesystem::path sibling_path(const std::filesystem::path& out, std::string_view tag);

/// Comment-prefixed header: tool version, command, every effective config
/// key, master seed and the conventions the data depend on.
std::string output_header(const RunConfig& cfg, std::string_view command);

/// Baseline curves (t_ns, L_bar_II, L_bar_I) at `out` and the inversion table
/// (eps, T_II_ns, T_I_ns, S_I) at sibling "inversion".
std::vector<std::filesystem::path> cmd_baseline(const RunConfig& cfg);

/// Mean transient (t_ns, mean_L, stderr_L) at `out` and per-run data
/// (run_index, first_passage_ns, L_at_snapshot; OVER past tmax) at sibling "runs".
std::vector<std::filesystem::path> cmd_simulate(const RunConfig& cfg);

/// Histogram rows (bin_lo, bin_hi, count) plus OVERFLOW (first passage) or
/// UNDERFLOW (impurity) rows so that counts sum to the run count.
std::vector<std::filesystem::path> cmd_hist(const RunConfig& cfg, HistKind kind);

/// value, then one speed-up column per level; NA where a level is not reached.
std::vector<std::filesystem::path> cmd_sweep(const RunConfig& cfg, std::string_view axis,
                                             const std::vector<double>& values);

}  // namespace purify

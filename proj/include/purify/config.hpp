#pragma once

#include "purify/controllers.hpp"
#include "purify/ensemble.hpp"
#include "purify/physics.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace purify {

inline constexpr std::string_view kVersion = "1.0.0";

struct RunConfig {
  DeviceParams device;
  ProtocolSpec protocol;
  SimulationConfig sim;
  std::size_t runs = 10000;
  std::uint64_t seed = 1;
  std::optional<int> bins;  ///< defaults: 100 first-passage, 50 impurity
  std::string out = "purify.csv";
  unsigned threads = 0;
  std::vector<double> eps_grid{0.3, 0.1, 0.03, 0.01, 3e-3, 1e-3, 3e-4, 1e-4};
  std::vector<double> levels{1e-2, 1e-3, 1e-4};
  double hist_lo = 1e-8;
  double hist_hi = 0.5;
  bool json = false;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Every problem found while building a RunConfig, one message per key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Reads `key=value` lines; `#` starts a comment, blank lines are skipped.
/// Throws ConfigError for lines without '='.
KeyValues read_key_values(std::string_view text);

/// Defaults, then `file_text` entries, then `overrides` (later wins), then
/// validation. Throws ConfigError listing every unknown key, unparsable
/// value and violated invariant.
RunConfig parse_config(std::string_view file_text, const KeyValues& overrides = {});

/// Canonical key=value view of the effective configuration.
KeyValues config_echo(const RunConfig& cfg);

/// Comma-separated numbers; throws ConfigError naming `key` on bad input.
std::vector<double> parse_number_list(std::string_view text, std::string_view key);

/// Keys accepted by parse_config.
std::vector<std::string_view> config_keys();

}  // namespace purify

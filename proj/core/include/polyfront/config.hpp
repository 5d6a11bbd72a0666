#ifndef POLYFRONT_CONFIG_HPP_
#define POLYFRONT_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "polyfront/entropy.hpp"
#include "polyfront/flux.hpp"
#include "polyfront/profile.hpp"

namespace polyfront {

struct FluxConfig {
  std::string family = "corey";
  double a0 = 1.0;
  double a_kappa = 0.25;
};

// Everything a run needs. Parsed from one JSON document; see README for the
// schema. Unknown keys are rejected.
struct RunConfig {
  FluxConfig flux;
  InitialData initial;
  std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  double T = 1.0;
  // Output and audit window [-window, window].
  double window = 5.0;
  // Snapshot times; defaults to {T}.
  std::vector<double> output_times;
  std::vector<std::string> entropies{"quadratic"};
  std::uint64_t seed = 0;
  // <= 0 defers to POLYFRONT_MAX_EVENTS or the built-in cap.
  long max_events = 0;
  // Rectangle of the positive-part measure; defaults to
  // [min(0.1, T), T] x [-window, window].
  std::optional<Rect> audit_rect;
  // Residual test functions; defaults to three bumps across the window.
  std::vector<TestFunction> test_functions;

  Rect rect() const;
  std::vector<TestFunction> tests() const;
  std::vector<double> snapshot_times() const;
};

// Throws ConfigError with a readable message.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Canonical JSON form; parse_config(to_json(cfg)) reproduces cfg.
std::string to_json(const RunConfig& cfg);

FluxModel make_model(const FluxConfig& cfg);

}  // namespace polyfront

#endif  // POLYFRONT_CONFIG_HPP_

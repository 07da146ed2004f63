#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weakarrival/units.hpp"

namespace weakarrival::cli {

/// Parse or validation failure; `line` is 0 when not tied to a file line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, std::size_t line, std::string key, const std::string& message);

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string key_;
};

enum class PotentialKind { none, harmonic, table };

struct ExperimentConfig {
  struct {
    double x0 = -10.0, p0 = 2.0, sigma_x = 1.0;
  } packet;
  struct {
    double X = 0.0, dt = 1.0;
  } arrival;
  struct {
    double lambda = 0.01, tau = 1.0;
  } coupling;
  struct {
    double sigma_q = 1.0, chirp = 0.0, mean_q = 0.0, mean_p = 0.0;
  } detector;
  struct {
    std::optional<double> x_min, x_max;  ///< both or neither; unset means auto_grid
    std::size_t x_n = 4096;
    double q_min = -16.0, q_max = 16.0;
    std::size_t q_n = 512;
  } grid;
  struct {
    PotentialKind kind = PotentialKind::none;
    double k = 1.0, center = 0.0;
    std::string file;  ///< two columns x V; relative paths resolve against the config file
    double max_step = 1e-2;
  } potential;
  struct {
    double start = 0.0, stop = 10.0, step = 0.25;
  } times;
  SimulationUnits units;
  std::uint64_t seed = 1;
  struct {
    std::size_t samples = 100000;
  } classical;
  struct {
    double p_min = -4.0, p_max = 10.0;
    std::size_t points = 1401;
  } diag;
  struct {
    double p = 1.0, dt_min = 0.01, dt_max = 30.0;
    std::size_t points = 200;
  } diag_dt;
  struct {
    std::optional<double> tolerance;  ///< exit 3 when max |w12_sim - w12_predicted| exceeds it
  } simulate;

  /// Directory that relative paths in the config are resolved against.
  std::string base_dir = ".";

  /// start, start + step, ... up to stop (inclusive within rounding).
  std::vector<double> time_points() const;
  /// Throws ConfigError on any inconsistent value.
  void validate() const;
  /// One `key = value` line per setting, in a fixed order; the config hash is taken over this.
  std::string canonical() const;
};

/// Parses `key = value` lines. `[section]` headers prefix the keys that follow;
/// `#` and `;` start comments. Unknown keys and malformed values are errors.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Applies one `key=value` override on top of an existing config.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& source = "--set", std::size_t line = 0);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace weakarrival::cli

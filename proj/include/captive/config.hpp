#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "captive/captivity.hpp"
#include "captive/circle_map.hpp"
#include "captive/cocycle.hpp"

namespace captive {

/// Configuration problem with a position ("line:column: field: message").
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct MapSpec {
  unsigned degree = 2;
  std::vector<double> sin;
  std::vector<double> cos;
};

struct TauSpec {
  double constant = 0.0;
  std::vector<double> sin;
  std::vector<double> cos;
  /// phi of an added coboundary phi o E - phi, when present
  std::optional<std::pair<std::vector<double>, std::vector<double>>> coboundary;
};

struct FamilySpec {
  std::size_t modes = 4;
  double scale = 1.0;
};

struct ExperimentConfig {
  MapSpec map;
  TauSpec tau;
  std::optional<FamilySpec> family;
  std::optional<double> R;
  std::optional<double> R_tilde;
  std::vector<std::size_t> depths;
  XStrategy strategy = GridStrategy{};
  std::optional<double> rho;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0;  ///< 0 = default_workers()
  std::vector<double> base_points;  ///< explicit x values for per-point commands
  std::vector<double> thresholds;   ///< b values for small-derivative counts
  std::size_t max_period = 8;
  std::optional<std::size_t> witness_N;
  std::optional<std::size_t> witness_q;
  std::size_t jac_p = 2;
  std::size_t jac_nu = 2;
  std::size_t jac_trials = 20;
  std::optional<std::string> json_path;
  std::optional<std::string> csv_path;

  CircleMap make_map() const;
  RoofFunction make_tau(const CircleMap& map) const;
  PerturbationFamily make_family(const CircleMap& map) const;
};

/// Parse a YAML experiment file. Throws ConfigError with positions.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace captive

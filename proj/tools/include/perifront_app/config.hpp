#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "perifront/model.hpp"

namespace perifront_app {

/// Malformed, incomplete or out-of-range configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KernelConfig {
  std::string profile = "bump";  ///< "bump" or "samples"
  std::vector<double> samples;

  perifront::KernelSpec build() const;

  bool operator==(const KernelConfig&) const = default;
};

struct MediumConfig {
  std::string kind = "constant";  ///< constant | fourier | samples | peak
  double mean = 1.0;             ///< value for constant, mean for fourier
  std::vector<double> amplitudes;
  std::vector<double> phases;
  std::vector<double> samples;
  double top = 0.0, slope = 0.0, center = 0.5, exponent = 1.0;

  perifront::Medium build() const;

  bool operator==(const MediumConfig&) const = default;
};

struct NumericsConfig {
  std::size_t M = 64;
  double eps = 0.0;
  double lambda = 0.0;
  std::vector<double> lambdas;  ///< mu-curve grid; empty: -3..3 step 0.1
  double tol = 1e-10;
  unsigned threads = 1;

  bool operator==(const NumericsConfig&) const = default;
};

struct FrontConfig {
  double c_factor = 1.5;  ///< c = c_factor * c*, unless c > 0
  double c = 0.0;
  double r = 40.0, R = 40.0;
  double k_norm = 10.0;
  double margin = 0.05;
  std::vector<std::array<double, 2>> schedule;  ///< (kappa, eps) pairs; empty: default

  bool operator==(const FrontConfig&) const = default;
};

struct SpeedConfig {
  std::vector<double> c_factors = {1.0, 1.25, 1.5, 2.0};

  bool operator==(const SpeedConfig&) const = default;
};

struct EvolutionConfig {
  double L = 300.0, T = 200.0, dt = 0.02;
  std::size_t snapshots = 200;
  double halfwidth = 2.0;
  double theta = 0.5;

  bool operator==(const EvolutionConfig&) const = default;
};

struct ProblemConfig {
  std::string experiment;  ///< optional default subcommand
  std::uint64_t seed = 0;
  KernelConfig kernel;
  MediumConfig medium;  ///< a(x)
  MediumConfig b;       ///< b(x)
  int direction = 1;
  NumericsConfig numerics;
  FrontConfig front;
  SpeedConfig speed;
  EvolutionConfig evolution;

  perifront::Problem problem() const;

  bool operator==(const ProblemConfig&) const = default;
};

ProblemConfig parse_config(std::string_view text, std::string_view source = "<string>");
ProblemConfig load_config(const std::filesystem::path& path);
/// Canonical TOML with every field; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ProblemConfig& config);

}  // namespace perifront_app

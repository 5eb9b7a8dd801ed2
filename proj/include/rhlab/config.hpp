#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rhlab/eigensolver.hpp"
#include "rhlab/elliptic_operator.hpp"
#include "rhlab/mesh.hpp"
#include "rhlab/potentials.hpp"
#include "rhlab/rhi.hpp"

namespace rhlab {

enum class Command { run, solve, mc_norm, fp_calibrate, verify, moser, payne_rayner };

/// Parses a subcommand name; nullopt when unknown.
std::optional<Command> parse_command(const std::string& name);
const char* to_string(Command command);

struct DomainConfig {
  int dimension = 3;
  std::string shape = "box";
  /// Grid box; for a ball it defaults to the bounding box of the ball.
  Point lower{};
  Point upper{};
  Point center{};
  double radius = 0.0;
  int nodes_per_axis = 0;
};

struct CoefficientConfig {
  std::string kind = "identity";
  Point entries{1.0, 1.0, 1.0};
  Matrix matrix{};
  double amplitude = 0.0;
};

struct PotentialTermConfig {
  std::string kind = "zero";
  double amplitude = 1.0;
  Point center{};
  double exponent = 1.0;
  double value = 0.0;
  double depth = 1.0;
  double radius = 1.0;
};

struct CalibrationConfig {
  /// C_n used in C_alpha. When absent it is calibrated on the fly.
  std::optional<double> cn;
  /// Raw estimate behind cn and where it came from, carried for the report.
  std::optional<double> estimate;
  std::string source;
  double safety_factor = 2.0;
  double r = 1.4;
  int bank_size = 16;
  /// The calibration grid is [-half_width, half_width]^n.
  int nodes_per_axis = 33;
  double half_width = 1.0;
};

struct MoserConfig {
  bool enabled = false;
  double p = 2.0;
  int levels = 6;
};

struct RunConfig {
  std::uint64_t seed = 12345;
  int eigenpairs = 1;
  /// Which eigenpair the verification stages use.
  int eigen_index = 0;
  DomainConfig domain;
  CoefficientConfig coefficient;
  std::vector<PotentialTermConfig> potential;
  MCParams mc;
  SolverConfig solver;
  std::vector<NormQuery> queries;
  MoserConfig moser;
  CalibrationConfig calibration;
  bool eigen_csv = true;
};

/// Parses the sectioned key = value format. Relative calibration files are
/// resolved against base_dir and loaded immediately. Throws ConfigError on
/// unknown sections or keys, malformed values and inconsistent dimensions.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

/// Reads a config file, or the config embedded in a JSON report.
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text of the fully resolved config. Parsing it back and serializing
/// again gives the same text.
std::string serialize(const RunConfig& config);

/// Checks the invariants that the given subcommand relies on. Throws
/// ConfigError, or HypothesisError for a Moser ladder below p = 2.
void validate(const RunConfig& config, Command command);

Grid make_grid(const RunConfig& config);
DomainShape make_shape(const RunConfig& config);
CoefficientField make_coefficient(const RunConfig& config);
/// The declared potential with singular centers moved off the grid nodes.
PotentialSpec make_potential(const RunConfig& config, const Grid& grid);

/// "inf" for infinity, shortest round-trip text otherwise.
std::string format_number(double v);

}  // namespace rhlab

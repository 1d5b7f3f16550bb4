#pragma once

// Experiment configuration: a line-oriented `key = value` format with
// [section] headers and '#' comments.
//
//   [grid]      lo, hi (comma lists), h
//   [problem]   example (+ alpha, eps) or f, g, phi, psi; c0; solve
//   [schedule]  eps (list), tolerance, accept_tol, max_iterations, inner_sweeps
//   [analysis]  checks, points ("x y; x y"), radii_min_cells, radii_max,
//               kappa, blowup_radii, blowup_samples
//   [output]    directory, formats

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ifb/coupled.hpp"
#include "ifb/exact.hpp"
#include "ifb/expression.hpp"
#include "ifb/field.hpp"

namespace ifb {

enum class Check { oracle, solve, nonnegativity, inclusions, classification, exponents, density, porosity, box };

std::string_view to_string(Check check);
const std::vector<Check>& all_checks();

struct GridBlock {
  std::vector<double> lo{-1.0, -1.0};
  std::vector<double> hi{1.0, 1.0};
  double h = 1.0 / 64.0;

  bool operator==(const GridBlock&) const = default;
};

struct ProblemBlock {
  std::string example;  // radial | halfspace | uncoupled | shifted-paraboloid
  std::optional<double> alpha;
  std::optional<double> eps;
  std::optional<Expression> f;
  std::optional<Expression> g;
  std::optional<Expression> phi;
  std::optional<Expression> psi;
  double c0 = 0.0;
  /// Examples are analyzed as sampled closed forms unless solve is set;
  /// expression problems are always solved.
  bool solve = false;

  bool operator==(const ProblemBlock&) const = default;
};

struct ScheduleBlock {
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  double tolerance = 1e-6;
  double acceptTol = 5e-2;
  int maxIterations = 200;
  int innerSweeps = 200;

  bool operator==(const ScheduleBlock&) const = default;
};

struct AnalysisBlock {
  std::vector<Check> checks = all_checks();
  std::vector<Point> points;  // empty: chosen from the coupled free boundary
  double radiiMinCells = 8.0;
  double radiiMax = 0.25;
  double kappa = 0.5;
  /// Empty: those of 0.2, 0.1, 0.05 that are at least 4h (or 4h alone).
  std::vector<double> blowupRadii;
  int blowupSamples = 32;

  std::vector<double> blowup_radii(double h) const;

  bool operator==(const AnalysisBlock&) const = default;
};

struct OutputBlock {
  std::string directory = "out";
  std::vector<std::string> formats{"csv"};  // csv, pgm

  bool operator==(const OutputBlock&) const = default;
};

struct ExperimentConfig {
  GridBlock grid;
  ProblemBlock problem;
  ScheduleBlock schedule;
  AnalysisBlock analysis;
  OutputBlock output;

  bool operator==(const ExperimentConfig&) const = default;

  bool wants(Check check) const;
  Grid make_grid() const;
  /// The named example with its parameters; BadParameter for expression problems.
  ExactPair example_pair() const;
  ProblemSpec problem_spec() const;
  PenalizationSchedule penalization() const;
  CoupledParams coupled_params() const;
};

/// ParseError ("line N: ...") for malformed lines, unknown sections or keys
/// and bad values; ValidationError ("field: ...") when the parsed config is
/// inconsistent.
ExperimentConfig parse_config(std::string_view text);

/// ValidationError as above.
void validate(const ExperimentConfig& config);

/// Text that parse_config maps back to an equal config.
std::string serialize(const ExperimentConfig& config);

}  // namespace ifb

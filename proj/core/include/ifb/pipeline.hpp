#pragma once

// The batch runner behind the command-line tool: obtain (u, v), run the
// requested checks, write artifacts and a summary.

#include <optional>
#include <string>
#include <vector>

#include "ifb/config.hpp"

namespace ifb {

enum class Status { pass, fail, expectedFail, unexpectedPass, skip };

std::string_view to_string(Status status);

/// Combines an outcome with the example's expectation for it.
Status judge(bool passed, bool expectedToPass = true);

struct CheckLine {
  std::string check;
  std::string name;
  Status status = Status::skip;
  std::string detail;
};

struct RunSummary {
  std::string problem;
  std::vector<CheckLine> lines;
  std::vector<std::string> findings;
  std::vector<std::string> artifacts;

  /// False when any line is FAIL or UNEXPECTED-PASS.
  bool ok() const;
  const CheckLine* find(std::string_view name) const;
  std::string describe() const;
};

struct RunOptions {
  unsigned threads = 1;
  bool writeArtifacts = true;
  /// Stop after obtaining the fields (and the solve/oracle checks).
  bool fieldsOnly = false;
};

/// Never throws for solver or analysis failures: they become FAIL lines and
/// whatever was computed so far is still written. summary.txt is always
/// written last when artifacts are enabled.
RunSummary run(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace ifb

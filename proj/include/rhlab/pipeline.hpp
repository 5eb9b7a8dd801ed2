#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>

#include "rhlab/config.hpp"

namespace rhlab {

/// Files produced by one invocation, keyed by file name.
struct PipelineResult {
  int exit_code = 0;
  std::map<std::string, std::string> files;
};

/// One subcommand over a validated config.
///
/// Construction validates the config and builds the grid, domain, coefficient
/// and potential; errors there propagate and no output exists yet. execute()
/// runs the stages in order and turns a stage failure into an error record in
/// report.json together with the matching exit code. Stage timings go to the
/// log stream only, so reports do not depend on the machine.
class Pipeline {
 public:
  Pipeline(const RunConfig& config, Command command);
  ~Pipeline();

  PipelineResult execute(bool dump_matrix, std::ostream* log = nullptr);

 private:
  struct State;
  std::unique_ptr<State> state_;
};

/// Writes every file of a result into dir, creating it when needed.
void write_outputs(const PipelineResult& result, const std::filesystem::path& dir);

}  // namespace rhlab

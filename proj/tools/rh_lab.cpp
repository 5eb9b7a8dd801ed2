#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rhlab/config.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/parallel.hpp"
#include "rhlab/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rh-lab: eigenpairs of elliptic operators and reverse Hölder checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rh-lab 1.0.0");

  std::string config_path;
  std::string out_dir = ".";
  int workers = 1;
  bool dump_matrix = false;
  bool quiet = false;

  const char* commands[][2] = {
      {"run", "assemble, solve, compute norms and constants, verify, trace the ladder"},
      {"solve", "smallest eigenpairs of the configured operator"},
      {"mc-norm", "Morrey-Campanato norm of the configured potential"},
      {"fp-calibrate", "empirical Fefferman-Phong constant, written to calibration.json"},
      {"verify", "reverse Hölder rows over the configured (p, q) queries"},
      {"moser", "Moser iteration ladder of the selected eigenfunction"},
      {"payne-rayner", "planar Payne-Rayner check of the first Dirichlet eigenfunction"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run config, or a report.json to rerun")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--dump-matrix", dump_matrix, "write the assembled matrix as matrix.mtx");
    sub->add_flag("--quiet", quiet, "no stage timings on stderr");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  const auto command = rhlab::parse_command(name);
  rhlab::parallel::set_workers(workers);
  try {
    const rhlab::RunConfig config = rhlab::load_config(config_path);
    rhlab::Pipeline pipeline(config, *command);
    const rhlab::PipelineResult result = pipeline.execute(dump_matrix, quiet ? nullptr : &std::cerr);
    rhlab::write_outputs(result, out_dir);
    std::cout << "rh-lab " << name << ": " << (result.exit_code == 0 ? "ok" : "failed") << ", "
              << result.files.size() << " file(s) in " << out_dir << '\n';
    return result.exit_code;
  } catch (const rhlab::Error& e) {
    std::cerr << "rh-lab " << name << ": " << rhlab::to_string(e.kind()) << " error: " << e.what() << '\n';
    return rhlab::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "rh-lab " << name << ": " << e.what() << '\n';
    return 1;
  }
}

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mchom/errors.hpp"
#include "mchom/pipeline.hpp"

namespace {

void configure_logging() {
  const char* env = std::getenv("MCHOM_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
}

int run_stage(mchom::Pipeline& p, const std::string& stage) {
  using namespace mchom;
  if (stage == "generate-media") {
    p.generate_media();
  } else if (stage == "solve-fine" || stage == "fine") {
    p.solve_fine();
  } else if (stage == "solve-cells" || stage == "cells") {
    p.solve_cells();
  } else if (stage == "upscale") {
    p.upscale();
  } else if (stage == "solve-macro" || stage == "macro") {
    p.solve_macro();
  } else if (stage == "compare") {
    std::cout << format_error_table(p.compare());
  } else if (stage == "full") {
    std::cout << format_error_table(p.full());
  } else if (stage == "zero-order") {
    const ZeroOrderResult r = p.zero_order();
    std::cout << fmt::format("blocks {} continua {} max_relative_error {:.3e} max_offdiagonal {:.3e}\n",
                             r.trajectory.blocks, r.trajectory.continua, r.max_relative_error, r.max_offdiagonal);
  } else {
    throw std::invalid_argument("unknown stage " + stage);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Multicontinuum upscaling of time-fractional diffusion-wave problems"};
  app.require_subcommand(1);

  std::string config_path;
  int jobs = 1;
  std::string out;
  const char* verbs[][2] = {
      {"generate-media", "write the coefficient raster"},
      {"solve-fine", "fine-grid reference trajectory"},
      {"solve-cells", "cell problems on oversampled regions"},
      {"upscale", "effective tensors per coarse block"},
      {"solve-macro", "coarse multicontinuum trajectory"},
      {"compare", "error table from stored trajectories"},
      {"full", "every stage, reusing finished artifacts"},
      {"zero-order", "decoupled zero-order model with a scalar ODE check"},
      {"run", "the stage named by the config's mode"},
  };
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--jobs", jobs, "worker threads for cell problems")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory (overrides the config)");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    mchom::RunConfig config = mchom::load_config(config_path);
    if (!out.empty()) config.output = out;
    mchom::Pipeline pipeline(config, jobs);
    std::string stage = verb;
    if (verb == "run") stage = config.mode;
    return run_stage(pipeline, stage);
  } catch (const mchom::ConfigError& e) {
    spdlog::error("invalid config: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{} failed: {}", verb, e.what());
    return 1;
  }
}

#include "mchom/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mchom/caputo.hpp"
#include "mchom/errors.hpp"

namespace mchom {

using nlohmann::json;

std::string content_hash(const json& j) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return fmt::format("{:016x}", h);
}

ArtifactNames artifact_names(const RunConfig& config) {
  const json c = to_json(config);
  const json medium{{"medium", c["medium"]}, {"fine", c["fine"]}};
  const json time{{"alpha", c["alpha"]}, {"tau", c["tau"]}, {"T", c["T"]}, {"u0", c["u0"]},
                  {"psi", c["psi"]}, {"boundary", c["boundary"]}, {"snapshots", c["snapshots"]}};
  json coarse = c["coarse"];
  coarse["layers"] = config.effective_layers();
  coarse.erase("load");
  json source_space = c["source"];
  source_space.erase("time");

  const json fine{{"medium", medium}, {"time", time}, {"source", c["source"]}};
  const json cells{{"medium", medium}, {"coarse", coarse}};
  const json effective{{"cells", cells}, {"source", source_space}};
  const json macro{{"effective", effective}, {"time", time}, {"source", c["source"]}, {"load", c["coarse"]["load"]}};
  const json errors{{"fine", fine}, {"macro", macro}};
  const json zero{{"medium", medium}, {"M", config.M}, {"A", c["zero_order"]["A"]}, {"time", time},
                  {"source", c["source"]}};

  ArtifactNames n;
  n.medium = "medium-" + content_hash(medium) + ".raster";
  n.fine = "fine-" + content_hash(fine) + ".traj";
  n.cells = "cells-" + content_hash(cells) + ".bin";
  n.effective = "effective-" + content_hash(effective) + ".txt";
  n.macro = "macro-" + content_hash(macro) + ".traj";
  n.errors = "errors-" + content_hash(errors) + ".csv";
  n.zero_order = "zero-order-" + content_hash(zero) + ".csv";
  return n;
}

std::vector<double> report_times(const RunConfig& config) {
  std::vector<double> t = config.snapshots;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

Pipeline::Pipeline(RunConfig config, int jobs)
    : config_(std::move(config)),
      jobs_(std::max(jobs, 1)),
      mesh_((config_.validate(), build_fine_mesh(config_.nx, config_.ny))),
      part_(build_coarse_partition(mesh_, config_.M)),
      names_(artifact_names(config_)) {
  std::filesystem::create_directories(config_.output);
}

MediumField Pipeline::medium() {
  if (medium_) return *medium_;
  const MediumSpec& m = config_.medium;
  if (m.kind == "crossed") {
    medium_ = crossed_field(mesh_, m.crossed);
  } else if (m.kind == "layered") {
    medium_ = layered_field(mesh_, m.layered);
  } else if (m.kind == "homogeneous") {
    medium_ = homogeneous_field(mesh_, m.value);
  } else {
    medium_ = load_raster(m.raster, mesh_);
  }
  if (config_.alphas.size() > 1 && static_cast<int>(config_.alphas.size()) != medium_->continua) {
    throw ConfigError(fmt::format("alpha: {} orders given for {} continua", config_.alphas.size(),
                                  medium_->continua));
  }
  return *medium_;
}

MediumField Pipeline::generate_media() {
  MediumField f = medium();
  save_raster(path(names_.medium), f, mesh_);
  spdlog::info("medium: {} continua, contrast {:g} -> {}", f.continua, f.contrast(), names_.medium);
  return f;
}

Trajectory Pipeline::solve_fine() {
  const MediumField f = medium();
  const SourceTerm source = config_.source_term();
  Trajectory traj = mchom::solve_fine(mesh_, f, config_.transient(), source, config_.initial_value.function(),
                                      config_.initial_velocity.function());
  write_trajectory(path(names_.fine), traj);
  spdlog::info("fine: {} snapshots -> {}", traj.times.size(), names_.fine);
  return traj;
}

CellLibrary Pipeline::solve_cells() {
  UpscaleOptions opt;
  opt.layers = config_.effective_layers();
  opt.jobs = jobs_;
  opt.extension = config_.extension;
  CellLibrary lib = solve_cell_library(mesh_, part_, medium(), opt);
  save_cell_library(path(names_.cells), lib);
  spdlog::info("cells: {} classes -> {}", lib.solutions.size(), names_.cells);
  return lib;
}

std::vector<EffectiveBlock> Pipeline::upscale(UpscaleReport* report) {
  const CellLibrary lib = cells();
  UpscaleReport local;
  std::vector<EffectiveBlock> blocks =
      effective_blocks(mesh_, part_, medium(), lib, config_.source.function(), jobs_, &local);
  save_effective_blocks(path(names_.effective), blocks);
  spdlog::info("upscale: constraint residual {:.3g}, stationarity {:.3g}, symmetry {:.3g}, mass split {:.3g} -> {}",
               local.max_constraint_residual, local.max_stationarity_residual, local.max_symmetry_defect,
               local.max_mass_split_defect, names_.effective);
  if (report) *report = local;
  return blocks;
}

Trajectory Pipeline::solve_macro() {
  const std::vector<EffectiveBlock> blocks = effective();
  const MediumField f = medium();
  const Vector U0 = macro_initial_conditions(mesh_, part_, f, interpolate(mesh_, config_.initial_value.function()));
  const Vector V0 =
      macro_initial_conditions(mesh_, part_, f, interpolate(mesh_, config_.initial_velocity.function()));
  Trajectory traj = mchom::solve_macro(part_, blocks, config_.transient(), config_.source_time.function(), U0, V0,
                                       config_.load);
  write_trajectory(path(names_.macro), traj);
  spdlog::info("macro: {} snapshots -> {}", traj.times.size(), names_.macro);
  return traj;
}

ErrorTable Pipeline::compare() {
  for (const auto& name : {names_.fine, names_.macro}) {
    if (!std::filesystem::exists(path(name))) {
      throw std::runtime_error(fmt::format("compare: {} is missing; run the solve stages first", path(name).string()));
    }
  }
  const Trajectory fine_traj = read_trajectory(path(names_.fine));
  const Trajectory macro_traj = read_trajectory(path(names_.macro));
  ErrorTable table = compare_trajectories(mesh_, part_, medium(), fine_traj, macro_traj, report_times(config_));
  write_error_table(path(names_.errors), table);
  spdlog::info("compare -> {}", names_.errors);
  return table;
}

Trajectory Pipeline::fine() {
  if (std::filesystem::exists(path(names_.fine))) return read_trajectory(path(names_.fine));
  return solve_fine();
}

CellLibrary Pipeline::cells() {
  if (std::filesystem::exists(path(names_.cells))) return load_cell_library(path(names_.cells));
  return solve_cells();
}

std::vector<EffectiveBlock> Pipeline::effective() {
  if (std::filesystem::exists(path(names_.effective))) return load_effective_blocks(path(names_.effective));
  return upscale();
}

Trajectory Pipeline::macro() {
  if (std::filesystem::exists(path(names_.macro))) return read_trajectory(path(names_.macro));
  return solve_macro();
}

ErrorTable Pipeline::full() {
  if (!std::filesystem::exists(path(names_.medium))) generate_media();
  fine();
  macro();
  return compare();
}

ZeroOrderResult Pipeline::zero_order() {
  const MediumField geometry = medium();
  const std::vector<double>& A = config_.zero_order_values;
  if (static_cast<int>(A.size()) != geometry.continua) {
    throw ConfigError(fmt::format("zero_order.A: {} values given for {} continua", A.size(), geometry.continua));
  }
  const MediumField field = with_continuum_values(geometry, A);
  const auto g = config_.source.function();
  const TransientSettings settings = config_.transient();
  const int N = field.continua;
  const int nb = part_.num_blocks();

  ZeroOrderResult out;
  out.blocks.reserve(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    out.blocks.push_back(zero_order_constants(build_rve_mesh(mesh_, part_, field, b), g));
    const auto& z = out.blocks.back();
    for (int i = 0; i < N; ++i) {
      const double diag = std::max(std::abs(z.gamma_full[i][i][i]), std::abs(z.beta_full[i][i]));
      for (int j = 0; j < N; ++j) {
        if (j != i) out.max_offdiagonal = std::max(out.max_offdiagonal, std::abs(z.beta_full[i][j]) / diag);
        for (int k = 0; k < N; ++k) {
          if (i == j && j == k) continue;
          out.max_offdiagonal = std::max(out.max_offdiagonal, std::abs(z.gamma_full[i][j][k]) / diag);
        }
      }
    }
  }
  out.trajectory = solve_zero_order(out.blocks, settings, config_.source_time.function());

  // Independent reference: D^alpha_i U + A_i U = (masked block mean of g) h(t).
  const auto h = config_.source_time.function();
  const std::vector<int> snaps = settings.snapshot_steps();
  out.reference.assign(snaps.size(), std::vector<double>(static_cast<std::size_t>(N) * nb));
  out.relative_error.assign(static_cast<std::size_t>(N) * nb, 0.0);
  for (int b = 0; b < nb; ++b) {
    for (int i = 0; i < N; ++i) {
      double area = 0.0;
      double integral = 0.0;
      for (int t : part_.block_elements[b]) {
        if (field.label[t] != i) continue;
        area += mesh_.area(t);
        integral += mesh_.area(t) * g(mesh_.barycenter(t));
      }
      const double mean = integral / area;
      const double alpha = settings.alphas.size() > 1 ? settings.alphas[i] : settings.alphas.front();
      const auto u = solve_scalar_fractional_ode({alpha}, {1.0}, A[i], settings.tau, settings.steps(),
                                                 [&](double t) { return mean * h(t); }, 0.0, 0.0);
      const std::size_t k = static_cast<std::size_t>(i) * nb + b;
      double peak = 0.0;
      for (std::size_t s = 0; s < snaps.size(); ++s) {
        out.reference[s][k] = u[snaps[s]];
        peak = std::max(peak, std::abs(u[snaps[s]]));
      }
      double err = 0.0;
      for (std::size_t s = 0; s < snaps.size(); ++s) {
        const double d = std::abs(out.trajectory.value(static_cast<int>(s), i, b) - out.reference[s][k]);
        err = std::max(err, peak > 0.0 ? d / peak : d);
      }
      out.relative_error[k] = err;
      out.max_relative_error = std::max(out.max_relative_error, err);
    }
  }

  std::string report = "# mchom zero-order v1\nblock,continuum,C,gamma,beta,b,max_relative_error\n";
  for (int b = 0; b < nb; ++b) {
    const auto& z = out.blocks[b];
    for (int i = 0; i < N; ++i) {
      report += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.3e}\n", b, i + 1, z.C[i], z.gamma[i], z.beta[i],
                            z.b[i], out.relative_error[static_cast<std::size_t>(i) * nb + b]);
    }
  }
  std::ofstream os(path(names_.zero_order));
  os << report;
  if (!os) throw std::runtime_error("write failed: " + path(names_.zero_order).string());
  spdlog::info("zero-order: max relative error vs scalar ODE {:.3e}, off-diagonal {:.3e} -> {}",
               out.max_relative_error, out.max_offdiagonal, names_.zero_order);
  return out;
}

}  // namespace mchom

// Batch front end: gpe_mg run <config> [--mode m] [--out dir] [--export-vtk] [--quiet]

#include "gpe/config.hpp"
#include "gpe/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

int exit_code(const gpe::Error &e) {
  switch (e.category()) {
  case gpe::Error::Category::config:
  case gpe::Error::Category::argument:
    return 2;
  case gpe::Error::Category::solver:
    return 3;
  case gpe::Error::Category::io:
    return 4;
  }
  return 1;
}

std::string_view category_name(const gpe::Error &e) {
  switch (e.category()) {
  case gpe::Error::Category::config:
    return "config";
  case gpe::Error::Category::argument:
    return "argument";
  case gpe::Error::Category::solver:
    return "solver";
  case gpe::Error::Category::io:
    return "io";
  }
  return "unknown";
}

// Error messages must stay on one line.
std::string one_line(std::string s) {
  for (char &c : s)
    if (c == '\n' || c == '\r')
      c = ' ';
  return s;
}

void export_vtk(const fs::path &dir, const gpe::MultigridRun &run) {
  for (const auto &level : run.levels) {
    const auto &mesh = run.hierarchy->mesh(static_cast<std::size_t>(level.level - 1));
    gpe::write_file(dir, "level_" + std::to_string(level.level) + ".vtk",
                    [&](std::ostream &out) { gpe::write_vtk(out, mesh, &level.pair.u); });
  }
}

void write_run(const fs::path &dir, const std::string &name,
               const gpe::MultigridRun &run) {
  gpe::write_file(dir, name, [&](std::ostream &o) { gpe::write_run_csv(o, run); });
}

int execute(const gpe::RunConfig &cfg, bool vtk, bool quiet) {
  const fs::path dir = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw gpe::IoError("cannot create output directory '" + dir.string() +
                       "': " + ec.message());

  const bool reference = cfg.mode == gpe::RunMode::both;
  const int built_levels = cfg.n_levels + (reference ? 1 : 0);
  const auto hierarchy = std::make_shared<const gpe::LevelHierarchy>(
      gpe::build_hierarchy(cfg.params.domain, cfg.cells_per_axis, built_levels));

  std::optional<gpe::MultigridRun> multigrid;
  std::optional<gpe::MultigridRun> direct;
  if (cfg.mode != gpe::RunMode::direct)
    multigrid = gpe::run_multigrid(cfg.params, hierarchy, cfg.n_levels, cfg.settings);
  if (cfg.mode != gpe::RunMode::multigrid)
    direct = gpe::run_direct_all_levels(cfg.params, hierarchy, cfg.n_levels,
                                        cfg.settings);

  const gpe::MultigridRun &primary = multigrid ? *multigrid : *direct;
  write_run(dir, "run.csv", primary);
  gpe::write_file(dir, "scf.csv", [&](std::ostream &o) {
    gpe::write_scf_csv(o, primary.coarse_history);
  });
  if (multigrid)
    gpe::write_file(dir, "newton.csv", [&](std::ostream &o) {
      gpe::write_newton_csv(o, *multigrid);
    });

  if (reference) {
    write_run(dir, "run_direct.csv", *direct);
    const auto gaps = gpe::compare_runs(*multigrid, *direct);
    gpe::write_file(dir, "compare.csv", [&](std::ostream &o) {
      gpe::write_compare_csv(o, *multigrid, *direct, gaps);
    });

    const auto ref_pos = static_cast<std::size_t>(cfg.n_levels);
    const auto ref_ops = gpe::assemble_level(hierarchy->mesh_ptr(ref_pos), cfg.params);
    const auto &last = direct->levels.back().pair;
    gpe::EigenPair start{last.lambda,
                         gpe::prolongate(hierarchy->prolongation(ref_pos - 1), last.u)};
    auto scf = cfg.settings.scf;
    scf.residual_tol = cfg.reference_tol;
    const auto ref = gpe::solve_coarse(ref_ops, scf, cfg.settings.solver, start);
    const auto errors = gpe::error_vs_reference(*multigrid, ref.pair, ref_ops);
    gpe::write_file(dir, "errors.csv", [&](std::ostream &o) {
      gpe::write_errors_csv(o, errors);
    });
    gpe::write_file(dir, "errors_level.dat", [&](std::ostream &o) {
      gpe::write_errors_dat(o, errors, false);
    });
    gpe::write_file(dir, "errors_dofs.dat", [&](std::ostream &o) {
      gpe::write_errors_dat(o, errors, true);
    });
  }
  if (vtk)
    export_vtk(dir, primary);

  if (!quiet) {
    if (multigrid)
      gpe::print_summary(std::cout, *multigrid, "multigrid");
    if (direct)
      gpe::print_summary(std::cout, *direct, "direct");
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Ground state of the Gross-Pitaevskii eigenproblem by a "
               "coarse SCF solve plus one Newton step per refined level"};
  app.require_subcommand(1);
  app.footer(std::string(gpe::config_reference()) + "\n\n" +
             std::string(gpe::csv_reference()) +
             "\n\nExit codes: 0 ok, 1 unexpected, 2 config or arguments, 3 solver, 4 io, 5 out of memory.");

  auto *run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path;
  std::string mode;
  std::string out_dir;
  bool vtk = false;
  bool quiet = false;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--mode", mode, "multigrid | direct | both (overrides config)");
  run->add_option("--out", out_dir, "Output directory (overrides config)");
  run->add_flag("--export-vtk", vtk, "Write level_k.vtk for every solved level");
  run->add_flag("--quiet", quiet, "Suppress the summary table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0)
      return app.exit(e);
    std::cerr << "error[argument]: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    auto cfg = gpe::load_config(config_path);
    if (!mode.empty())
      cfg.mode = gpe::parse_mode(mode);
    if (!out_dir.empty())
      cfg.output_dir = out_dir;
    return execute(cfg, vtk, quiet);
  } catch (const gpe::Error &e) {
    std::cerr << "error[" << category_name(e) << "]: " << one_line(e.what()) << '\n';
    return exit_code(e);
  } catch (const std::bad_alloc &) {
    std::cerr << "error[resource]: out of memory\n";
    return 5;
  } catch (const std::exception &e) {
    std::cerr << "error[internal]: " << one_line(e.what()) << '\n';
    return 1;
  }
}

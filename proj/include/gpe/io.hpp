#pragma once

#include "gpe/diagnostics.hpp"

#include <filesystem>
#include <ostream>
#include <span>
#include <string_view>

namespace gpe {

// Column layouts are fixed; see csv_reference().
void write_run_csv(std::ostream &out, const MultigridRun &run);
void write_newton_csv(std::ostream &out, const MultigridRun &run);
void write_scf_csv(std::ostream &out, std::span<const ScfRecord> history);
void write_errors_csv(std::ostream &out, std::span<const ErrorRecord> errors);
void write_compare_csv(std::ostream &out, const MultigridRun &multigrid,
                       const MultigridRun &direct,
                       std::span<const ErrorRecord> gaps);

/// Whitespace-separated columns for log-log plots; `by_dofs` switches the
/// abscissa from level to dof count.
void write_errors_dat(std::ostream &out, std::span<const ErrorRecord> errors,
                      bool by_dofs);

/// Level / elements / seconds table in the style of a timing report.
void print_summary(std::ostream &out, const MultigridRun &run,
                   std::string_view title);

/// Opens `dir / name` for writing (truncating) and runs `fn` on the stream.
/// Throws IoError on failure.
template <typename Fn>
void write_file(const std::filesystem::path &dir, const std::string &name,
                Fn &&fn);

std::string_view csv_reference();

} // namespace gpe

#include <fstream>

template <typename Fn>
void gpe::write_file(const std::filesystem::path &dir, const std::string &name,
                     Fn &&fn) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  fn(out);
  out.flush();
  if (!out)
    throw IoError("write to '" + path.string() + "' failed");
}

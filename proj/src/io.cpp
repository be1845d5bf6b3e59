#include "gpe/io.hpp"

#include <cstdio>
#include <string>

namespace gpe {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double> &v) {
  return v ? num(*v) : std::string();
}

} // namespace

void write_run_csv(std::ostream &out, const MultigridRun &run) {
  out << "level,elements,dofs,lambda,residual,norm_drift,seconds\n";
  for (const auto &l : run.levels)
    out << l.level << ',' << l.elements << ',' << l.dofs << ','
        << num(l.pair.lambda) << ',' << num(l.residual.norm) << ','
        << num(l.norm_drift) << ',' << num(l.seconds) << '\n';
}

void write_newton_csv(std::ostream &out, const MultigridRun &run) {
  out << "level,solver_residual,constraint_gap,lambda_before,lambda_after,"
         "rayleigh_after,norm_after,tolerance,iterations,direct\n";
  for (const auto &l : run.levels) {
    if (!l.newton)
      continue;
    const auto &r = *l.newton;
    out << r.level << ',' << num(r.solver_residual) << ','
        << num(r.constraint_gap) << ',' << num(r.lambda_before) << ','
        << num(r.lambda_after) << ',' << num(r.rayleigh_after) << ','
        << num(r.norm_after) << ',' << num(r.tolerance) << ','
        << r.iterations << ',' << (r.direct ? 1 : 0) << '\n';
  }
}

void write_scf_csv(std::ostream &out, std::span<const ScfRecord> history) {
  out << "iteration,lambda,residual,energy\n";
  for (const auto &r : history)
    out << r.iteration << ',' << num(r.lambda) << ',' << num(r.residual) << ','
        << num(r.energy) << '\n';
}

void write_errors_csv(std::ostream &out, std::span<const ErrorRecord> errors) {
  out << "level,err_lambda,err_h1,err_l2,order_lambda,order_h1,order_l2\n";
  for (const auto &e : errors)
    out << e.level << ',' << num(e.err_lambda) << ',' << num(e.err_h1) << ','
        << num(e.err_l2) << ',' << opt(e.order_lambda) << ','
        << opt(e.order_h1) << ',' << opt(e.order_l2) << '\n';
}

void write_compare_csv(std::ostream &out, const MultigridRun &multigrid,
                       const MultigridRun &direct,
                       std::span<const ErrorRecord> gaps) {
  out << "level,elements,dofs,lambda_multigrid,lambda_direct,gap_lambda,"
         "gap_h1,gap_l2,seconds_multigrid,seconds_direct\n";
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    const auto &g = gaps[k];
    out << g.level << ',' << g.elements << ',' << g.dofs << ','
        << num(multigrid.levels[k].pair.lambda) << ','
        << num(direct.levels[k].pair.lambda) << ',' << num(g.err_lambda) << ','
        << num(g.err_h1) << ',' << num(g.err_l2) << ','
        << num(multigrid.levels[k].seconds) << ','
        << num(direct.levels[k].seconds) << '\n';
  }
}

void write_errors_dat(std::ostream &out, std::span<const ErrorRecord> errors,
                      bool by_dofs) {
  out << (by_dofs ? "# dofs" : "# level") << " err_lambda err_h1 err_l2\n";
  for (const auto &e : errors)
    out << (by_dofs ? e.dofs : e.level) << ' ' << num(e.err_lambda) << ' '
        << num(e.err_h1) << ' ' << num(e.err_l2) << '\n';
}

void print_summary(std::ostream &out, const MultigridRun &run,
                   std::string_view title) {
  char buf[160];
  out << title << '\n';
  std::snprintf(buf, sizeof buf, "%6s %12s %10s %20s %11s %10s\n", "level",
                "elements", "dofs", "lambda", "residual", "seconds");
  out << buf;
  for (const auto &l : run.levels) {
    std::snprintf(buf, sizeof buf, "%6d %12lld %10lld %20.12f %11.3e %10.3f\n",
                  l.level, static_cast<long long>(l.elements),
                  static_cast<long long>(l.dofs), l.pair.lambda,
                  l.residual.norm, l.seconds);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "total %.3f s (hierarchy %.3f s)\n",
                run.total_seconds(), run.hierarchy_seconds);
  out << buf;
}

std::string_view csv_reference() {
  return R"(Outputs (written to the output directory, overwritten on rerun):
  run.csv          level,elements,dofs,lambda,residual,norm_drift,seconds
                   (the direct run in direct mode)
  run_direct.csv   same columns, direct reference run (mode both)
  newton.csv       level,solver_residual,constraint_gap,lambda_before,
                   lambda_after,rayleigh_after,norm_after,tolerance,
                   iterations,direct
  scf.csv          iteration,lambda,residual,energy   (level-1 SCF log)
  compare.csv      level,elements,dofs,lambda_multigrid,lambda_direct,
                   gap_lambda,gap_h1,gap_l2,seconds_multigrid,seconds_direct
                   (mode both)
  errors.csv       level,err_lambda,err_h1,err_l2,order_lambda,order_h1,
                   order_l2  (mode both; reference = direct solve one level
                   finer; orders empty on level 1)
  errors_level.dat, errors_dofs.dat
                   gnuplot columns: level|dofs err_lambda err_h1 err_l2
  level_k.vtk      legacy VTK with the eigenfunction (--export-vtk))";
}

} // namespace gpe

#include "gpe/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace gpe {

namespace {

constexpr const char *kRequired[] = {"dim", "cells_per_axis", "n_levels",
                                     "zeta", "gammas"};
constexpr const char *kOptional[] = {
    "lower",     "upper",           "damping",  "residual_tol",
    "max_iters", "direct_max_dofs", "tol_base", "c_tol",
    "mode",      "output_dir",      "refinement_index", "reference_tol"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(int line, const std::string &msg) {
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

template <typename T> T parse_number(const Entry &e, const std::string &key) {
  T out{};
  const std::string_view v = trim(e.value);
  const auto *end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    fail(e.line, "malformed value '" + std::string(v) + "' for " + key);
  return out;
}

std::vector<double> parse_list(const Entry &e, const std::string &key) {
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_number<double>({item, e.line}, key));
  if (out.empty())
    fail(e.line, "empty list for " + key);
  return out;
}

Eigen::VectorXd to_vector(const std::vector<double> &v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

// Re-raises validation failures with the line that supplied the value.
template <typename Fn> void checked(int line, Fn &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    fail(line, e.what());
  }
}

} // namespace

RunMode parse_mode(std::string_view text) {
  if (text == "multigrid")
    return RunMode::multigrid;
  if (text == "direct")
    return RunMode::direct;
  if (text == "both")
    return RunMode::both;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (expected multigrid, direct or both)");
}

std::string_view to_string(RunMode mode) {
  switch (mode) {
  case RunMode::multigrid:
    return "multigrid";
  case RunMode::direct:
    return "direct";
  case RunMode::both:
    return "both";
  }
  return "?";
}

RunConfig parse_config(std::string_view text) {
  const std::set<std::string> known = [] {
    std::set<std::string> s(std::begin(kRequired), std::end(kRequired));
    s.insert(std::begin(kOptional), std::end(kOptional));
    return s;
  }();

  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known.contains(key))
      fail(line_no, "unknown key '" + key + "'");
    if (value.empty())
      fail(line_no, "missing value for " + key);
    if (entries.contains(key))
      fail(line_no, "duplicate key '" + key + "'");
    entries[key] = {value, line_no};
  }

  std::string missing;
  for (const char *key : kRequired)
    if (!entries.contains(key))
      missing += (missing.empty() ? "" : ", ") + std::string(key);
  if (!missing.empty())
    throw ConfigError("missing required keys: " + missing);

  RunConfig cfg;
  const Entry &dim_e = entries["dim"];
  const int dim = parse_number<int>(dim_e, "dim");
  if (dim < 1 || dim > 3)
    fail(dim_e.line, "dim must be 1, 2 or 3");

  const Entry &cells_e = entries["cells_per_axis"];
  cfg.cells_per_axis = parse_number<int>(cells_e, "cells_per_axis");
  if (cfg.cells_per_axis < 1)
    fail(cells_e.line, "cells_per_axis must be positive");

  const Entry &levels_e = entries["n_levels"];
  cfg.n_levels = parse_number<int>(levels_e, "n_levels");
  if (cfg.n_levels < 1)
    fail(levels_e.line, "n_levels must be positive");

  auto &domain = cfg.params.domain;
  domain = BoxDomain::unit(dim);
  if (entries.contains("lower")) {
    const Entry &e = entries["lower"];
    domain.lower = to_vector(parse_list(e, "lower"));
    if (domain.lower.size() != dim)
      fail(e.line, "lower needs " + std::to_string(dim) + " entries");
  }
  if (entries.contains("upper")) {
    const Entry &e = entries["upper"];
    domain.upper = to_vector(parse_list(e, "upper"));
    if (domain.upper.size() != dim)
      fail(e.line, "upper needs " + std::to_string(dim) + " entries");
  }
  checked(entries.contains("upper") ? entries["upper"].line : dim_e.line,
          [&] { domain.validate(); });

  const Entry &zeta_e = entries["zeta"];
  cfg.params.zeta = parse_number<double>(zeta_e, "zeta");
  const Entry &gam_e = entries["gammas"];
  cfg.params.potential.gammas = to_vector(parse_list(gam_e, "gammas"));
  checked(zeta_e.line, [&] {
    if (!(cfg.params.zeta >= 0.0))
      throw ConfigError("zeta must be non-negative");
  });
  checked(gam_e.line, [&] { cfg.params.potential.validate(dim); });

  auto &scf = cfg.settings.scf;
  scf = ScfConfig::defaults_for(cfg.params.zeta);
  auto &solver = cfg.settings.solver;
  const auto set_double = [&](const char *key, double &field) {
    if (entries.contains(key)) {
      const Entry &e = entries[key];
      field = parse_number<double>(e, key);
    }
  };
  set_double("damping", scf.damping);
  set_double("residual_tol", scf.residual_tol);
  set_double("tol_base", solver.tol_base);
  set_double("c_tol", solver.c_tol);
  set_double("reference_tol", cfg.reference_tol);
  if (entries.contains("max_iters"))
    scf.max_iters = parse_number<int>(entries["max_iters"], "max_iters");
  if (entries.contains("direct_max_dofs"))
    solver.direct_max_dofs =
        parse_number<Index>(entries["direct_max_dofs"], "direct_max_dofs");

  const auto line_of = [&](std::initializer_list<const char *> keys) {
    for (const char *k : keys)
      if (entries.contains(k))
        return entries[k].line;
    return 0;
  };
  checked(line_of({"damping", "residual_tol", "max_iters"}),
          [&] { scf.validate(); });
  checked(line_of({"direct_max_dofs", "tol_base", "c_tol"}),
          [&] { solver.validate(); });
  if (!(cfg.reference_tol > 0.0))
    fail(entries["reference_tol"].line, "reference_tol must be positive");

  if (entries.contains("refinement_index")) {
    const Entry &e = entries["refinement_index"];
    if (parse_number<int>(e, "refinement_index") != 2)
      fail(e.line, "refinement_index is fixed to 2 (regular refinement)");
  }
  if (entries.contains("mode")) {
    const Entry &e = entries["mode"];
    checked(e.line, [&] { cfg.mode = parse_mode(e.value); });
  }
  if (entries.contains("output_dir"))
    cfg.output_dir = entries["output_dir"].value;
  return cfg;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string_view config_reference() {
  return R"(Config file: one `key = value` per line, `#` starts a comment.
  required  dim               1, 2 or 3
            cells_per_axis    cells per box edge on level 1 (d! simplices each)
            n_levels          number of levels, >= 1
            zeta              interaction strength, >= 0
            gammas            potential W = sum_i gamma_i x_i^2, d comma-separated values
  optional  lower, upper      box corners (default unit box)
            mode              multigrid | direct | both (default multigrid)
            output_dir        directory for artifacts (default .)
            damping           SCF mixing weight in (0,1] (0.7, or 0.1 if zeta > 10)
            residual_tol      SCF residual tolerance (1e-10)
            max_iters         SCF iteration cap (500)
            direct_max_dofs   direct linear solves up to this size (20000)
            tol_base, c_tol   linear tolerance min(tol_base, c_tol h^2) (1e-10, 1e-2)
            reference_tol     residual tolerance of the reference solve (1e-11)
            refinement_index  must be 2)";
}

} // namespace gpe

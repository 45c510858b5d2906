#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdcl/pdhg.hpp"
#include "pdcl/strategies.hpp"

namespace pdcl {

/// Malformed configuration, with the offending key and line when known.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& field, int line, const std::string& msg);
  std::string field;
  int line;
};

enum class StrategyKind { Vanilla, Refine, OneTimestep };
std::string to_string(StrategyKind k);
StrategyKind parse_strategy(const std::string& s);

/// Everything needed to reproduce one run.
struct RunConfig {
  std::string problem = "heat";
  std::map<std::string, double> problem_params;  // overrides only
  std::optional<std::string> space_scheme;
  std::optional<std::string> time_scheme;
  int nx = 64;
  int nt = 16;
  double tau_u = 0.8;
  double tau_phi = 0.8;
  double tau_lambda = 0.99;
  std::optional<double> tau_u0;
  double eps = 1e-6;
  int max_iters = 10000;
  bool enforce_bound = false;
  StrategyKind strategy = StrategyKind::Vanilla;
  int refine_m0 = 5;
  int refine_start = 0;
  int refine_coarse_iters = 1000;
  std::string out_dir = ".";
  std::uint64_t seed = 1;

  bool operator==(const RunConfig&) const = default;

  ProblemSpec problem_spec() const;
  SchemeConfig scheme(const ProblemSpec& p) const;
  PdhgConfig pdhg() const;
};

/// Flat `key = value` text with dotted keys; `#` starts a comment.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Every field in a fixed order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);
/// FNV-1a of the serialized config, as 16 hex digits.
std::string config_hash(const RunConfig& c);

/// Numbers with 17 significant digits.
std::string fmt_num(double v);

/// Columns t, x, dof, u; levels outermost, then cells, then dofs.
void write_solution_csv(const Field& u, const SpaceTimeGrid& grid, const std::string& path,
                        const std::vector<std::string>& metadata = {});

/// Columns iter, res_primal, res_dual and, when given, error_vs_reference.
void write_residual_csv(const std::vector<ResidualRecord>& history, const std::string& path,
                        const std::vector<std::string>& metadata = {},
                        const std::vector<double>& error_vs_reference = {});

struct SolutionRow {
  double t, x;
  int dof;
  double u;
};
std::vector<SolutionRow> read_solution_csv(const std::string& path);
std::vector<ResidualRecord> read_residual_csv(const std::string& path);

/// Metadata lines for a run: config hash, grid, step sizes and CFL ratios.
std::vector<std::string> run_metadata(const RunConfig& c, const SpaceTimeGrid& grid);

}  // namespace pdcl

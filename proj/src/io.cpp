#include "pdcl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pdcl {

ConfigError::ConfigError(const std::string& f, int l, const std::string& msg)
    : std::runtime_error("config" + (l > 0 ? " line " + std::to_string(l) : std::string()) +
                         (f.empty() ? std::string() : " (" + f + ")") + ": " + msg),
      field(f),
      line(l) {}

std::string to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::Vanilla: return "vanilla";
    case StrategyKind::Refine: return "refine";
    case StrategyKind::OneTimestep: return "one-timestep";
  }
  return "?";
}

StrategyKind parse_strategy(const std::string& s) {
  if (s == "vanilla") return StrategyKind::Vanilla;
  if (s == "refine") return StrategyKind::Refine;
  if (s == "one-timestep") return StrategyKind::OneTimestep;
  throw ArgumentError("unknown strategy '" + s + "'");
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ProblemSpec RunConfig::problem_spec() const { return make_problem(problem, problem_params); }

SchemeConfig RunConfig::scheme(const ProblemSpec& p) const {
  std::optional<TimeScheme> t;
  std::optional<SpaceScheme> s;
  if (time_scheme) t = parse_time_scheme(*time_scheme);
  if (space_scheme) s = parse_space_scheme(*space_scheme);
  return scheme_for(p, t, s);
}

PdhgConfig RunConfig::pdhg() const {
  PdhgConfig c;
  c.tau_u = tau_u;
  c.tau_phi = tau_phi;
  c.tau_lambda = tau_lambda;
  c.tau_u0 = tau_u0;
  c.eps = eps;
  c.max_iters = max_iters;
  c.enforce_bound = enforce_bound;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key, line, "expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, int line, const std::string& v) {
  try {
    std::size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key, line, "expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, int line, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, line, "expected true or false, got '" + v + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("", line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq)), v = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("", line, "empty key");
    if (v.empty()) throw ConfigError(key, line, "empty value");
    try {
      if (key == "problem.name") c.problem = v;
      else if (key.rfind("problem.", 0) == 0) c.problem_params[key.substr(8)] = to_double(key, line, v);
      else if (key == "scheme.space") c.space_scheme = (parse_space_scheme(v), v);
      else if (key == "scheme.time") c.time_scheme = (parse_time_scheme(v), v);
      else if (key == "grid.nx") c.nx = static_cast<int>(to_long(key, line, v));
      else if (key == "grid.nt") c.nt = static_cast<int>(to_long(key, line, v));
      else if (key == "pdhg.tau_u") c.tau_u = to_double(key, line, v);
      else if (key == "pdhg.tau_phi") c.tau_phi = to_double(key, line, v);
      else if (key == "pdhg.tau_lambda") c.tau_lambda = to_double(key, line, v);
      else if (key == "pdhg.tau_u0") c.tau_u0 = to_double(key, line, v);
      else if (key == "pdhg.eps") c.eps = to_double(key, line, v);
      else if (key == "pdhg.max_iters") c.max_iters = static_cast<int>(to_long(key, line, v));
      else if (key == "pdhg.enforce_bound") c.enforce_bound = to_bool(key, line, v);
      else if (key == "strategy.kind") c.strategy = parse_strategy(v);
      else if (key == "strategy.m0") c.refine_m0 = static_cast<int>(to_long(key, line, v));
      else if (key == "strategy.start") c.refine_start = static_cast<int>(to_long(key, line, v));
      else if (key == "strategy.coarse_iters") c.refine_coarse_iters = static_cast<int>(to_long(key, line, v));
      else if (key == "output.dir") c.out_dir = v;
      else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(key, line, v));
      else throw ConfigError(key, line, "unknown key");
    } catch (const ArgumentError& e) {
      throw ConfigError(key, line, e.what());
    }
  }
  if (c.nx < 2) throw ConfigError("grid.nx", 0, "must be at least 2");
  if (c.nt < 1) throw ConfigError("grid.nt", 0, "must be at least 1");
  if (c.max_iters < 0) throw ConfigError("pdhg.max_iters", 0, "must be nonnegative");
  for (double t : {c.tau_u, c.tau_phi, c.tau_lambda, c.eps})
    if (!(t > 0)) throw ConfigError("pdhg", 0, "step sizes and eps must be positive");
  try {
    (void)c.problem_spec();
  } catch (const ArgumentError& e) {
    throw ConfigError("problem", 0, e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", 0, "cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  o << "problem.name = " << c.problem << "\n";
  for (const auto& [k, v] : c.problem_params) o << "problem." << k << " = " << fmt_num(v) << "\n";
  if (c.space_scheme) o << "scheme.space = " << *c.space_scheme << "\n";
  if (c.time_scheme) o << "scheme.time = " << *c.time_scheme << "\n";
  o << "grid.nx = " << c.nx << "\n"
    << "grid.nt = " << c.nt << "\n"
    << "pdhg.tau_u = " << fmt_num(c.tau_u) << "\n"
    << "pdhg.tau_phi = " << fmt_num(c.tau_phi) << "\n"
    << "pdhg.tau_lambda = " << fmt_num(c.tau_lambda) << "\n";
  if (c.tau_u0) o << "pdhg.tau_u0 = " << fmt_num(*c.tau_u0) << "\n";
  o << "pdhg.eps = " << fmt_num(c.eps) << "\n"
    << "pdhg.max_iters = " << c.max_iters << "\n"
    << "pdhg.enforce_bound = " << (c.enforce_bound ? "true" : "false") << "\n"
    << "strategy.kind = " << to_string(c.strategy) << "\n"
    << "strategy.m0 = " << c.refine_m0 << "\n"
    << "strategy.start = " << c.refine_start << "\n"
    << "strategy.coarse_iters = " << c.refine_coarse_iters << "\n"
    << "output.dir = " << c.out_dir << "\n"
    << "seed = " << c.seed << "\n";
  return o.str();
}

std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> run_metadata(const RunConfig& c, const SpaceTimeGrid& g) {
  return {"config_hash=" + config_hash(c),
          "problem=" + c.problem + " strategy=" + to_string(c.strategy),
          "grid nx=" + std::to_string(g.nx) + " nt=" + std::to_string(g.nt) + " hx=" + fmt_num(g.hx()) +
              " ht=" + fmt_num(g.ht()),
          "tau_u=" + fmt_num(c.tau_u) + " tau_phi=" + fmt_num(c.tau_phi) + " tau_lambda=" + fmt_num(c.tau_lambda) +
              " tau_u0=" + fmt_num(c.pdhg().effective_tau_u0()) + " eps=" + fmt_num(c.eps),
          // Explicit-scheme step ratios, for checking how far past the CFL limit a run sits.
          "cfl ht/hx^2=" + fmt_num(g.ht() / (g.hx() * g.hx())) +
              " alpha*ht/hx=" + fmt_num(std::abs(c.problem_spec().flux.alpha) * g.ht() / g.hx())};
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path, std::size_t min_cols) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (cols.size() < min_cols) throw std::runtime_error("short row in '" + path + "'");
    rows.push_back(std::move(cols));
  }
  return rows;
}

}  // namespace

void write_solution_csv(const Field& u, const SpaceTimeGrid& grid, const std::string& path,
                        const std::vector<std::string>& metadata) {
  auto f = open_out(path);
  for (const auto& m : metadata) f << "# " << m << "\n";
  f << "t,x,dof,u\n";
  for (int l = u.first_level(); l <= u.last_level(); ++l)
    for (int j = 0; j < u.nx(); ++j)
      for (int d = 0; d < u.dofs(); ++d) {
        const double x = u.layout() == Layout::FD ? grid.node(j) : grid.dg_point(j, d);
        f << fmt_num(grid.t(l)) << "," << fmt_num(x) << "," << d << "," << fmt_num(u(l, j, d)) << "\n";
      }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_residual_csv(const std::vector<ResidualRecord>& history, const std::string& path,
                        const std::vector<std::string>& metadata, const std::vector<double>& error_vs_reference) {
  if (!error_vs_reference.empty() && error_vs_reference.size() != history.size())
    throw ArgumentError("write_residual_csv: error column length differs from history");
  auto f = open_out(path);
  for (const auto& m : metadata) f << "# " << m << "\n";
  f << "iter,res_primal,res_dual" << (error_vs_reference.empty() ? "" : ",error_vs_reference") << "\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    f << history[i].iteration << "," << fmt_num(history[i].primal) << "," << fmt_num(history[i].dual);
    if (!error_vs_reference.empty()) f << "," << fmt_num(error_vs_reference[i]);
    f << "\n";
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<SolutionRow> read_solution_csv(const std::string& path) {
  std::vector<SolutionRow> out;
  for (const auto& c : read_rows(path, 4))
    out.push_back({std::stod(c[0]), std::stod(c[1]), std::stoi(c[2]), std::stod(c[3])});
  return out;
}

std::vector<ResidualRecord> read_residual_csv(const std::string& path) {
  std::vector<ResidualRecord> out;
  for (const auto& c : read_rows(path, 3)) out.push_back({std::stoi(c[0]), std::stod(c[1]), std::stod(c[2])});
  return out;
}

}  // namespace pdcl

#include "ifb/config.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "ifb/analysis.hpp"
#include "ifb/error.hpp"

namespace ifb {

namespace {

constexpr std::pair<Check, std::string_view> kCheckNames[] = {
    {Check::oracle, "oracle"},           {Check::solve, "solve"},
    {Check::nonnegativity, "nonnegativity"}, {Check::inclusions, "inclusions"},
    {Check::classification, "classification"}, {Check::exponents, "exponents"},
    {Check::density, "density"},         {Check::porosity, "porosity"},
    {Check::box, "box"},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t k = s.find(sep, start);
    out.push_back(trim(s.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start)));
    if (k == std::string_view::npos) break;
    start = k + 1;
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

std::string number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join_numbers(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? ", " : "") + number(xs[k]);
  return out;
}

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::ValidationError, field + ": " + message);
}

// Wraps value errors with the line they came from.
struct LineContext {
  int line = 0;

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + message);
  }

  template <class F>
  auto guard(F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) fail(e.what());
      throw;
    }
  }

  double real(const std::string& v) const {
    return guard([&] { return eval_constant(v); });
  }

  int integer(const std::string& v) const {
    const double x = real(v);
    if (x != static_cast<double>(static_cast<int>(x))) fail("'" + v + "' is not an integer");
    return static_cast<int>(x);
  }

  std::vector<double> reals(const std::string& v) const {
    std::vector<double> out;
    for (const std::string& item : split(v, ',')) out.push_back(real(item));
    if (out.empty()) fail("empty list");
    return out;
  }

  bool boolean(const std::string& v) const {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail("'" + v + "' is not a boolean");
  }

  Expression expression(const std::string& v) const {
    return guard([&] { return Expression::parse(v); });
  }
};

using Setter = std::function<void(ExperimentConfig&, const std::string&, const LineContext&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"grid",
       {
           {"lo", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.grid.lo = l.reals(v); }},
           {"hi", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.grid.hi = l.reals(v); }},
           {"h", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.grid.h = l.real(v); }},
       }},
      {"problem",
       {
           {"example", [](ExperimentConfig& c, const std::string& v, const LineContext&) { c.problem.example = v; }},
           {"alpha", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.problem.alpha = l.real(v); }},
           {"eps", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.problem.eps = l.real(v); }},
           {"f", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.problem.f = l.expression(v); }},
           {"g", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.problem.g = l.expression(v); }},
           {"phi", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.problem.phi = l.expression(v); }},
           {"psi", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.problem.psi = l.expression(v); }},
           {"c0", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.problem.c0 = l.real(v); }},
           {"solve", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.problem.solve = l.boolean(v); }},
       }},
      {"schedule",
       {
           {"eps", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.schedule.eps = l.reals(v); }},
           {"tolerance",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.schedule.tolerance = l.real(v); }},
           {"accept_tol",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.schedule.acceptTol = l.real(v); }},
           {"max_iterations",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.schedule.maxIterations = l.integer(v); }},
           {"inner_sweeps",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.schedule.innerSweeps = l.integer(v); }},
       }},
      {"analysis",
       {
           {"checks",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) {
              c.analysis.checks.clear();
              for (const std::string& name : split(v, ',')) {
                if (name == "all") {
                  c.analysis.checks = all_checks();
                  continue;
                }
                const auto* it = std::find_if(std::begin(kCheckNames), std::end(kCheckNames),
                                              [&](const auto& e) { return e.second == name; });
                if (it == std::end(kCheckNames)) l.fail("unknown check '" + name + "'");
                if (!c.wants(it->first)) c.analysis.checks.push_back(it->first);
              }
              std::sort(c.analysis.checks.begin(), c.analysis.checks.end());
            }},
           {"points",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) {
              c.analysis.points.clear();
              for (const std::string& item : split(v, ';')) {
                std::istringstream in(item);
                std::string a;
                std::string b;
                in >> a >> b;
                std::string rest;
                if (a.empty() || (in >> rest)) l.fail("a point is written 'x y'");
                c.analysis.points.push_back({l.real(a), b.empty() ? 0.0 : l.real(b)});
              }
            }},
           {"radii_min_cells",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.analysis.radiiMinCells = l.real(v); }},
           {"radii_max",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.analysis.radiiMax = l.real(v); }},
           {"kappa", [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.analysis.kappa = l.real(v); }},
           {"blowup_radii",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.analysis.blowupRadii = l.reals(v); }},
           {"blowup_samples",
            [](ExperimentConfig& c, const std::string& v, const LineContext& l) { c.analysis.blowupSamples = l.integer(v); }},
       }},
      {"output",
       {
           {"directory", [](ExperimentConfig& c, const std::string& v, const LineContext&) { c.output.directory = v; }},
           {"formats",
            [](ExperimentConfig& c, const std::string& v, const LineContext&) { c.output.formats = split(v, ','); }},
       }},
  };
  return table;
}

bool is_example(const std::string& name) {
  return name == "radial" || name == "halfspace" || name == "uncoupled" || name == "shifted-paraboloid";
}

}  // namespace

std::string_view to_string(Check check) {
  for (const auto& [c, name] : kCheckNames) {
    if (c == check) return name;
  }
  return "?";
}

const std::vector<Check>& all_checks() {
  static const std::vector<Check> all = [] {
    std::vector<Check> out;
    for (const auto& entry : kCheckNames) out.push_back(entry.first);
    return out;
  }();
  return all;
}

std::vector<double> AnalysisBlock::blowup_radii(double h) const {
  if (!blowupRadii.empty()) return blowupRadii;
  std::vector<double> out;
  for (const double r : {0.2, 0.1, 0.05}) {
    if (r >= 4.0 * h) out.push_back(r);
  }
  if (out.empty()) out.push_back(4.0 * h);
  return out;
}

bool ExperimentConfig::wants(Check check) const {
  return std::find(analysis.checks.begin(), analysis.checks.end(), check) != analysis.checks.end();
}

Grid ExperimentConfig::make_grid() const { return ifb::make_grid(grid.lo, grid.hi, grid.h); }

ExactPair ExperimentConfig::example_pair() const {
  const std::string& name = problem.example;
  if (name == "radial") return example_radial();
  if (name == "uncoupled") return example_uncoupled();
  if (name == "halfspace") {
    const double eps = problem.eps.value_or(0.0);
    return example_halfspace(problem.alpha.value_or(eps > 0.0 ? 1.0 : 0.0), eps);
  }
  if (name == "shifted-paraboloid") return example_shifted_paraboloid(problem.eps.value_or(0.1));
  throw Error(ErrorCode::BadParameter, "no example named '" + name + "'");
}

ProblemSpec ExperimentConfig::problem_spec() const {
  ProblemSpec spec;
  spec.grid = make_grid();
  if (!problem.example.empty()) {
    const ExactPair pair = example_pair();
    spec.f = sample(pair.f, spec.grid, FieldKind::source);
    spec.g = sample(pair.g, spec.grid, FieldKind::source);
    spec.phi = sample(pair.u, spec.grid, FieldKind::solution);
    spec.psi = sample(pair.v, spec.grid, FieldKind::solution);
  } else {
    spec.f = sample(problem.f->function(), spec.grid, FieldKind::source);
    spec.g = sample(problem.g->function(), spec.grid, FieldKind::source);
    spec.phi = sample(problem.phi->function(), spec.grid, FieldKind::solution);
    spec.psi = sample(problem.psi->function(), spec.grid, FieldKind::solution);
  }
  spec.c0Check = problem.c0;
  return spec;
}

PenalizationSchedule ExperimentConfig::penalization() const {
  PenalizationSchedule s;
  s.eps = schedule.eps;
  s.perEpsilonTol = schedule.tolerance;
  s.fixedPointMaxIters = schedule.maxIterations;
  return s;
}

CoupledParams ExperimentConfig::coupled_params() const {
  CoupledParams p;
  p.acceptTol = schedule.acceptTol;
  p.innerSweepCap = schedule.innerSweeps;
  return p;
}

void validate(const ExperimentConfig& c) {
  const GridBlock& gb = c.grid;
  if (gb.lo.size() != gb.hi.size() || gb.lo.empty() || gb.lo.size() > 2) {
    invalid("grid.lo", "lo and hi need one or two coordinates each");
  }
  for (std::size_t k = 0; k < gb.lo.size(); ++k) {
    if (!(gb.hi[k] > gb.lo[k])) invalid("grid.hi", "hi must exceed lo on every axis");
  }
  if (!(gb.h > 0.0)) invalid("grid.h", "h must be positive");
  Grid grid;
  try {
    grid = c.make_grid();
  } catch (const Error& e) {
    invalid("grid.h", e.what());
  }

  const ProblemBlock& p = c.problem;
  const bool anyExpr = p.f || p.g || p.phi || p.psi;
  if (!p.example.empty() && anyExpr) invalid("problem", "give either an example or expressions, not both");
  if (p.example.empty() && !anyExpr) invalid("problem", "give an example or the expressions f, g, phi, psi");
  if (!p.example.empty()) {
    if (!is_example(p.example)) invalid("problem.example", "unknown example '" + p.example + "'");
    if (p.alpha && p.example != "halfspace") invalid("problem.alpha", "only the halfspace example takes alpha");
    if (p.eps && p.example != "halfspace" && p.example != "shifted-paraboloid") {
      invalid("problem.eps", "only the halfspace and shifted-paraboloid examples take eps");
    }
    if (grid.dimension != 2) invalid("grid.lo", "the examples live in two dimensions");
    try {
      (void)c.example_pair();
    } catch (const Error& e) {
      invalid("problem", e.what());
    }
  } else {
    if (!(p.f && p.g && p.phi && p.psi)) invalid("problem", "expression problems need all of f, g, phi, psi");
    if (p.alpha || p.eps) invalid("problem", "alpha and eps belong to examples");
  }
  if (!(p.c0 >= 0.0)) invalid("problem.c0", "c0 must be nonnegative");

  const ScheduleBlock& s = c.schedule;
  c.penalization().validate(grid);
  if (!(s.tolerance > 0.0)) invalid("schedule.tolerance", "must be positive");
  if (!(s.acceptTol > 0.0)) invalid("schedule.accept_tol", "must be positive");
  if (s.maxIterations < 1) invalid("schedule.max_iterations", "must be at least 1");
  if (s.innerSweeps < 0) invalid("schedule.inner_sweeps", "must be nonnegative");

  const AnalysisBlock& a = c.analysis;
  for (const Point& pt : a.points) {
    if (!grid.contains(pt)) invalid("analysis.points", "(" + number(pt[0]) + ", " + number(pt[1]) + ") is outside the domain");
  }
  if (!(a.radiiMinCells >= 4.0)) invalid("analysis.radii_min_cells", "must be at least 4");
  if (!(a.radiiMax > 0.0)) invalid("analysis.radii_max", "must be positive");
  if (!(a.kappa > 0.0)) invalid("analysis.kappa", "must be positive");
  for (const double r : a.blowupRadii) {
    if (r < 4.0 * grid.h * (1.0 - 1e-12)) invalid("analysis.blowup_radii", "radii must be at least 4h");
  }
  if (a.blowupSamples < 1) invalid("analysis.blowup_samples", "must be at least 1");

  if (c.output.directory.empty()) invalid("output.directory", "must not be empty");
  for (const std::string& f : c.output.formats) {
    if (f != "csv" && f != "pgm") invalid("output.formats", "unknown format '" + f + "'");
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::string section;
  std::map<std::string, int> seen;
  LineContext ctx;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++ctx.line;
    std::string line(text.substr(start, end - start));
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!setters().contains(section)) ctx.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected 'key = value'");
    if (section.empty()) ctx.fail("key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    const auto& keys = setters().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) ctx.fail("unknown key '" + key + "' in [" + section + "]");
    if (seen[section + "." + key]++) ctx.fail("duplicate key '" + key + "'");
    it->second(config, value, ctx);
  }
  validate(config);
  return config;
}

std::string serialize(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "lo = " << join_numbers(c.grid.lo) << "\n";
  out << "hi = " << join_numbers(c.grid.hi) << "\n";
  out << "h = " << number(c.grid.h) << "\n\n[problem]\n";
  if (!c.problem.example.empty()) out << "example = " << c.problem.example << "\n";
  if (c.problem.alpha) out << "alpha = " << number(*c.problem.alpha) << "\n";
  if (c.problem.eps) out << "eps = " << number(*c.problem.eps) << "\n";
  const std::pair<const char*, const std::optional<Expression>*> exprs[] = {
      {"f", &c.problem.f}, {"g", &c.problem.g}, {"phi", &c.problem.phi}, {"psi", &c.problem.psi}};
  for (const auto& [key, e] : exprs) {
    if (*e) out << key << " = " << (*e)->source() << "\n";
  }
  out << "c0 = " << number(c.problem.c0) << "\n";
  out << "solve = " << (c.problem.solve ? "true" : "false") << "\n\n[schedule]\n";
  out << "eps = " << join_numbers(c.schedule.eps) << "\n";
  out << "tolerance = " << number(c.schedule.tolerance) << "\n";
  out << "accept_tol = " << number(c.schedule.acceptTol) << "\n";
  out << "max_iterations = " << c.schedule.maxIterations << "\n";
  out << "inner_sweeps = " << c.schedule.innerSweeps << "\n\n[analysis]\n";
  out << "checks = ";
  for (std::size_t k = 0; k < c.analysis.checks.size(); ++k) out << (k ? ", " : "") << to_string(c.analysis.checks[k]);
  out << "\n";
  if (!c.analysis.points.empty()) {
    out << "points = ";
    for (std::size_t k = 0; k < c.analysis.points.size(); ++k) {
      out << (k ? "; " : "") << number(c.analysis.points[k][0]) << " " << number(c.analysis.points[k][1]);
    }
    out << "\n";
  }
  out << "radii_min_cells = " << number(c.analysis.radiiMinCells) << "\n";
  out << "radii_max = " << number(c.analysis.radiiMax) << "\n";
  out << "kappa = " << number(c.analysis.kappa) << "\n";
  if (!c.analysis.blowupRadii.empty()) out << "blowup_radii = " << join_numbers(c.analysis.blowupRadii) << "\n";
  out << "blowup_samples = " << c.analysis.blowupSamples << "\n\n[output]\n";
  out << "directory = " << c.output.directory << "\n";
  out << "formats = ";
  for (std::size_t k = 0; k < c.output.formats.size(); ++k) out << (k ? ", " : "") << c.output.formats[k];
  out << "\n";
  return out.str();
}

}  // namespace ifb

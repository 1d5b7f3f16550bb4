#include "ifb/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "ifb/analysis.hpp"
#include "ifb/error.hpp"
#include "ifb/exact.hpp"
#include "ifb/free_boundary.hpp"

namespace ifb {

namespace {

constexpr double kSlopeTol = 0.15;
constexpr double kRecoveryTol = 5e-2;
constexpr double kDensityFloor = 0.2;
constexpr double kMinOrder = 1.5;

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::string point_text(const Point& p) { return fmt("(%.6g, %.6g)", p[0], p[1]); }

// Runs body(k) for k in [0, n) on up to `threads` workers; results must be
// stored by index so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) body(k);
    });
  }
}

class Writer {
 public:
  Writer(const ExperimentConfig& config, bool enabled, RunSummary& summary)
      : dir_(config.output.directory), enabled_(enabled), summary_(summary) {
    if (enabled_) std::filesystem::create_directories(dir_);
  }

  template <class F>
  void write(const std::string& name, F&& fill) {
    if (!enabled_) return;
    std::ofstream out(dir_ / name);
    fill(out);
    summary_.artifacts.push_back((dir_ / name).string());
  }

 private:
  std::filesystem::path dir_;
  bool enabled_;
  RunSummary& summary_;
};

ScalarField clamped_intrinsic(const ScalarField& u, const ScalarField& v) {
  ScalarField w = ScalarField::constant(u.grid(), 0.0);
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = std::sqrt(std::max(u[n], 0.0)) + std::cbrt(std::max(v[n], 0.0));
  return w;
}

// Snapped cells of `fb` closest to the box center, at most `count`.
std::vector<Point> central_points(const FreeBoundaryCells& fb, const ScalarField& w, std::size_t count) {
  const Grid& g = fb.grid;
  const Point mid{0.5 * (g.lo[0] + g.hi[0]), 0.5 * (g.lo[1] + g.hi[1])};
  std::vector<std::pair<double, Cell>> order;
  for (const Cell& c : fb.cells) {
    const Point p = fb.center(c);
    order.push_back({std::hypot(p[0] - mid[0], p[1] - mid[1]), c});
  }
  std::sort(order.begin(), order.end());
  std::vector<Point> out;
  for (const auto& [d, c] : order) {
    const Point p = snap_to_fb(w, c);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    if (out.size() >= count) break;
  }
  return out;
}

}  // namespace

std::string_view to_string(Status status) {
  switch (status) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::expectedFail: return "EXPECTED-FAIL";
    case Status::unexpectedPass: return "UNEXPECTED-PASS";
    case Status::skip: return "SKIP";
  }
  return "?";
}

Status judge(bool passed, bool expectedToPass) {
  if (expectedToPass) return passed ? Status::pass : Status::fail;
  return passed ? Status::unexpectedPass : Status::expectedFail;
}

bool RunSummary::ok() const {
  return std::none_of(lines.begin(), lines.end(), [](const CheckLine& l) {
    return l.status == Status::fail || l.status == Status::unexpectedPass;
  });
}

const CheckLine* RunSummary::find(std::string_view name) const {
  for (const CheckLine& l : lines) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

std::string RunSummary::describe() const {
  std::ostringstream out;
  out << "problem: " << problem << "\n";
  for (const CheckLine& l : lines) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %-40s %-15s ", l.check.c_str(), l.name.c_str(),
                  std::string(to_string(l.status)).c_str());
    out << buf << l.detail << "\n";
  }
  for (const std::string& f : findings) out << "finding: " << f << "\n";
  out << "overall: " << (ok() ? "PASS" : "FAIL") << "\n";
  return out.str();
}

RunSummary run(const ExperimentConfig& config, const RunOptions& options) {
  RunSummary summary;
  const bool isExample = !config.problem.example.empty();
  std::optional<ExactPair> pair;
  if (isExample) pair = config.example_pair();
  summary.problem = isExample ? pair->name : "f = " + config.problem.f->source() + ", g = " + config.problem.g->source();
  Writer writer(config, options.writeArtifacts, summary);
  const auto add = [&](Check check, std::string name, Status status, std::string detail) {
    summary.lines.push_back({std::string(to_string(check)), std::move(name), status, std::move(detail)});
  };
  const auto finish = [&] {
    writer.write("summary.txt", [&](std::ostream& out) { out << summary.describe(); });
    return summary;
  };

  const Grid grid = config.make_grid();
  const ExpectedChecks expected = pair ? pair->expected : ExpectedChecks{};

  if (pair && config.wants(Check::oracle)) {
    try {
      const OracleReport rep = verify_example(*pair, grid);
      const bool ok = rep.uOrder >= kMinOrder && rep.vOrder >= kMinOrder;
      add(Check::oracle, "residual_order", judge(ok), rep.describe());
    } catch (const Error& e) {
      add(Check::oracle, "residual_order", Status::fail, e.what());
    }
  }

  ScalarField u;
  ScalarField v;
  ScalarField g;
  const bool solving = !isExample || config.problem.solve;
  try {
    const ProblemSpec spec = config.problem_spec();
    g = spec.g;
    if (solving) {
      spec.validate(config.problem.c0 > 0.0);
      SolutionPair sol = solve_coupled(spec, config.penalization(), config.coupled_params());
      writer.write("diagnostics.txt", [&](std::ostream& out) { out << sol.diagnostics(); });
      if (config.wants(Check::solve)) {
        add(Check::solve, "accepted", judge(sol.accepted),
            fmt("worst residual %.3e (tolerance %.1e), converged %s", sol.residuals.worst(), config.schedule.acceptTol,
                sol.converged ? "yes" : "no"));
      }
      u = std::move(sol.u);
      v = std::move(sol.v);
      if (pair && config.wants(Check::solve)) {
        const double eu = sup_abs_difference(u, sample(pair->u, grid));
        const double ev = sup_abs_difference(v, sample(pair->v, grid));
        add(Check::solve, "recovery", judge(eu <= kRecoveryTol && ev <= kRecoveryTol),
            fmt("sup error u %.3e, v %.3e (tolerance %.0e)", eu, ev, kRecoveryTol));
      }
    } else {
      u = sample(pair->u, grid, FieldKind::solution);
      v = sample(pair->v, grid, FieldKind::solution);
    }
  } catch (const Error& e) {
    add(Check::solve, "solve", Status::fail, e.what());
    return finish();
  }

  const bool csv = std::find(config.output.formats.begin(), config.output.formats.end(), "csv") != config.output.formats.end();
  const bool pgm = std::find(config.output.formats.begin(), config.output.formats.end(), "pgm") != config.output.formats.end();
  if (csv) {
    writer.write("u.csv", [&](std::ostream& out) { write_csv(u, out); });
    writer.write("v.csv", [&](std::ostream& out) { write_csv(v, out); });
  }
  if (pgm) {
    writer.write("u.pgm", [&](std::ostream& out) { write_pgm(u, out); });
    writer.write("v.pgm", [&](std::ostream& out) { write_pgm(v, out); });
  }
  if (options.fieldsOnly) return finish();

  const double h = grid.h;
  const Thresholds tau = Thresholds::scaled(h, config.analysis.kappa);
  const ScalarField w = clamped_intrinsic(u, v);
  bool nonnegative = true;

  if (config.wants(Check::nonnegativity)) {
    try {
      (void)intrinsic_norm(u, v);
      add(Check::nonnegativity, "intrinsic_norm_defined", judge(true, expected.nonnegative), "u, v >= 0 up to 1e-6");
    } catch (const Error& e) {
      nonnegative = false;
      std::size_t count = 0;
      double reach = 0.0;
      for (std::size_t n = 0; n < grid.size(); ++n) {
        if (u[n] < -1e-6 || v[n] < -1e-6) {
          ++count;
          const Point p = grid.coord(n);
          reach = std::max(reach, std::hypot(p[0], p[1]));
        }
      }
      add(Check::nonnegativity, "intrinsic_norm_defined", judge(false, expected.nonnegative),
          fmt("%zu negative nodes, farthest at radius %.4g", count, reach));
    }
  }

  const FreeBoundaryCells fbU = extract_fb(positivity_set(u, tau.u));
  const FreeBoundaryCells fbV = extract_fb(positivity_set(v, tau.v));
  const FreeBoundaryCells fbI = intrinsic_fb(u, v, tau);
  summary.findings.push_back(fmt("free boundary cells: u %zu, v %zu, intrinsic %zu", fbU.size(), fbV.size(), fbI.size()));
  if (fbI.empty()) {
    summary.findings.push_back(std::string("intrinsic free boundary is empty") +
                               (expected.intrinsicFbEmpty ? " (expected for this example)" : ""));
  }

  if (config.wants(Check::inclusions)) {
    const InclusionReport rep = check_inclusions(u, v, tau);
    const std::pair<const InclusionCheck*, bool> items[] = {{&rep.fbUInFbV, expected.fbUInFbV},
                                                            {&rep.vInsideU, expected.vInsideU},
                                                            {&rep.intrinsicMatchesU, expected.intrinsicMatchesU}};
    for (const auto& [c, exp] : items) {
      add(Check::inclusions, c->name, judge(c->pass, exp), fmt("value %g, tolerance %g", c->value, c->tolerance));
    }
    writer.write("inclusions.csv", [&](std::ostream& out) { rep.write_csv(out); });
  }

  if (config.wants(Check::classification)) {
    if (grid.dimension != 2 || fbV.empty()) {
      add(Check::classification, "blowup", Status::skip, grid.dimension != 2 ? "two-dimensional only" : "FB(v) is empty");
    } else {
      const std::size_t want = static_cast<std::size_t>(config.analysis.blowupSamples);
      const std::size_t stride = std::max<std::size_t>(1, fbV.size() / want);
      std::vector<Point> points;
      for (std::size_t k = 0; k < fbV.size() && points.size() < want; k += stride) {
        points.push_back(snap_to_fb(v, fbV.cells[k]));
      }
      std::vector<std::optional<BlowupClassification>> results(points.size());
      std::vector<std::string> errors(points.size());
      parallel_for(points.size(), options.threads, [&](std::size_t k) {
        try {
          results[k] = classify_blowup(v, points[k], config.analysis.blowup_radii(h), tau.v);
        } catch (const Error& e) {
          errors[k] = e.what();
        }
      });
      std::vector<BlowupClassification> done;
      std::size_t regular = 0;
      std::size_t degenerate = 0;
      std::string firstError;
      for (std::size_t k = 0; k < points.size(); ++k) {
        if (!results[k]) {
          if (firstError.empty()) firstError = errors[k];
          continue;
        }
        done.push_back(*results[k]);
        regular += results[k]->verdict == BlowupVerdict::regular;
        degenerate += results[k]->degenerate;
      }
      add(Check::classification, "blowup", judge(firstError.empty()),
          fmt("%zu points: %zu regular, %zu singular, %zu degenerate%s%s", done.size(), regular, done.size() - regular,
              degenerate, firstError.empty() ? "" : "; ", firstError.c_str()));
      writer.write("classifications.csv", [&](std::ostream& out) { write_classifications_csv(done, out); });
    }
  }

  const double rMin = config.analysis.radiiMinCells * h;
  const std::vector<double> radii = dyadic_radii(rMin, std::max(config.analysis.radiiMax, rMin));
  std::vector<Point> points = config.analysis.points;
  if (points.empty() && !fbI.empty()) points = central_points(fbI, w, 1);

  if (config.wants(Check::exponents)) {
    if (points.empty()) {
      add(Check::exponents, "growth", Status::skip, "no coupled free boundary point");
    } else {
      std::vector<std::pair<std::string, ExponentFit>> fits;
      std::ostringstream profiles;
      bool header = true;
      const double gInf = g.min();
      for (const Point& y : points) {
        const std::pair<const char*, const ScalarField*> targets[] = {{"u", &u}, {"v", &v}, {"intrinsic", &w}};
        const double slopes[] = {4.0 / 3.0, 2.0, 2.0 / 3.0};
        for (int k = 0; k < 3; ++k) {
          const std::string name = std::string("slope_") + targets[k].first + " at " + point_text(y);
          if (k == 2 && !nonnegative) {
            add(Check::exponents, name, Status::skip, "intrinsic norm undefined on negative data");
            continue;
          }
          try {
            const ExponentFit fit = growth_exponent(*targets[k].second, y, radii);
            add(Check::exponents, name, judge(std::abs(fit.slope - slopes[k]) <= kSlopeTol),
                fmt("slope %.4f +- %.1e, target %.4f +- %.2f", fit.slope, fit.slopeStdError, slopes[k], kSlopeTol));
            fits.emplace_back(targets[k].first, fit);
          } catch (const Error& e) {
            std::string detail = e.what();
            if (radii.size() < 4) {
              detail += fmt("; radii in [%g, %g] give %zu, refine h", rMin, config.analysis.radiiMax, radii.size());
            }
            add(Check::exponents, name, Status::fail, detail);
          }
        }
        const std::string name = "nondegeneracy at " + point_text(y);
        if (!nonnegative) {
          add(Check::exponents, name, Status::skip, "intrinsic norm undefined on negative data");
        } else if (!(gInf > 0.0)) {
          add(Check::exponents, name, Status::skip, fmt("inf g = %g, the lower bound needs inf g > 0", gInf));
        } else {
          try {
            const NondegeneracyProfile prof = nondegeneracy_profile(u, v, y, radii, gInf);
            add(Check::exponents, name, judge(prof.pass),
                fmt("min ratio %.4f, threshold %.4f", prof.minRatio, prof.threshold));
            std::ostringstream one;
            write_profile_csv(prof, one);
            std::string text = one.str();
            if (!header) text.erase(0, text.find('\n') + 1);
            header = false;
            profiles << text;
          } catch (const Error& e) {
            add(Check::exponents, name, Status::fail, e.what());
          }
        }
      }
      writer.write("fits.csv", [&](std::ostream& out) { write_fits_csv(fits, out); });
      writer.write("nondegeneracy.csv", [&](std::ostream& out) { out << profiles.str(); });
    }
  }

  if (config.wants(Check::density)) {
    if (points.empty()) {
      add(Check::density, "density", Status::skip, "no coupled free boundary point");
    } else {
      std::ostringstream table;
      bool header = true;
      for (const Point& y : points) {
        const std::string name = "density at " + point_text(y);
        try {
          const DensityProfile prof = density_profile(u, v, y, radii, tau);
          add(Check::density, name, judge(prof.minFraction >= kDensityFloor),
              fmt("min fraction %.4f, floor %.2f", prof.minFraction, kDensityFloor));
          std::ostringstream one;
          write_density_csv(prof, one);
          std::string text = one.str();
          if (!header) text.erase(0, text.find('\n') + 1);
          header = false;
          table << text;
        } catch (const Error& e) {
          add(Check::density, name, Status::fail, e.what());
        }
      }
      writer.write("density.csv", [&](std::ostream& out) { out << table.str(); });
    }
  }

  const std::pair<const char*, const FreeBoundaryCells*> sets[] = {{"fb_u", &fbU}, {"fb_v", &fbV}, {"fb_intrinsic", &fbI}};

  if (config.wants(Check::porosity)) {
    std::ostringstream table;
    table << "set,x,y,radius,delta\n";
    for (const auto& [label, fb] : sets) {
      if (fb->empty()) continue;
      const PorosityEstimate est = porosity_estimate(*fb, radii);
      add(Check::porosity, std::string("porosity_") + label, judge(est.delta > 0.0),
          fmt("delta %.4f over %zu samples%s%s", est.delta, est.samples.size(), est.warning.empty() ? "" : "; ",
              est.warning.c_str()));
      for (const PorositySample& s : est.samples) {
        table << label << fmt(",%.17g,%.17g,%.17g,%.17g\n", s.center[0], s.center[1], s.radius, s.delta);
      }
    }
    writer.write("porosity.csv", [&](std::ostream& out) { out << table.str(); });
  }

  if (config.wants(Check::box)) {
    std::ostringstream table;
    table << "set,size,count\n";
    const double bound = grid.dimension - 1 + 0.1;
    const int levels = std::max(4, static_cast<int>(std::floor(std::log2(config.analysis.radiiMax / h))) - 1);
    for (const auto& [label, fb] : sets) {
      if (fb->empty()) continue;
      const BoxDimension box = box_dimension(*fb, dyadic_box_sizes(h, levels));
      add(Check::box, std::string("box_dimension_") + label, judge(box.slope <= bound),
          fmt("slope %.4f, bound %.1f", box.slope, bound));
      for (std::size_t k = 0; k < box.sizes.size(); ++k) {
        table << label << fmt(",%.17g,%.17g\n", box.sizes[k], box.counts[k]);
      }
    }
    writer.write("box.csv", [&](std::ostream& out) { out << table.str(); });
  }

  return finish();
}

}  // namespace ifb

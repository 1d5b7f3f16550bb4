#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ifb/config.hpp"
#include "ifb/error.hpp"
#include "ifb/exact.hpp"
#include "ifb/expression.hpp"
#include "ifb/pipeline.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ifb::Error(ifb::ErrorCode::ParseError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Options {
  std::string config;
  std::string out;
  unsigned threads = 1;
  bool seedless = false;
};

ifb::ExperimentConfig load(const Options& opt) {
  ifb::ExperimentConfig cfg = ifb::parse_config(read_file(opt.config));
  if (!opt.out.empty()) cfg.output.directory = opt.out;
  return cfg;
}

int finish(const ifb::RunSummary& summary) {
  std::cout << summary.describe();
  return summary.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled infinity-Laplacian / Laplacian free boundary experiments"};
  app.require_subcommand(1);
  Options opt;
  const auto common = [&opt](CLI::App* sub, bool needConfig) {
    auto* c = sub->add_option("--config", opt.config, "experiment configuration file");
    if (needConfig) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (overrides [output] directory)");
    sub->add_option("--threads", opt.threads, "worker threads for independent analysis tasks")->check(CLI::Range(1u, 256u));
    sub->add_flag("--seedless", opt.seedless, "assert that no randomness is used (always true)");
  };

  CLI::App* solve = app.add_subcommand("solve", "obtain (u, v) and write the fields and diagnostics");
  common(solve, true);
  CLI::App* verify = app.add_subcommand("verify-example", "residual orders of a closed-form example");
  common(verify, false);
  std::string example;
  std::string spacing = "1/64";
  verify->add_option("--example", example, "radial, halfspace, uncoupled or shifted-paraboloid");
  verify->add_option("--spacing", spacing, "grid spacing when no config is given, e.g. 1/128");
  CLI::App* analyze = app.add_subcommand("analyze", "run every configured check and write the report");
  common(analyze, true);
  CLI::App* report = app.add_subcommand("report", "print the summary of an earlier run");
  common(report, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt.seedless) std::cerr << "seedless: no random number generator is used anywhere\n";
    if (solve->parsed()) {
      ifb::ExperimentConfig cfg = load(opt);
      cfg.problem.solve = true;
      cfg.analysis.checks = {ifb::Check::solve};
      return finish(ifb::run(cfg, {opt.threads, true, true}));
    }
    if (verify->parsed()) {
      ifb::ExperimentConfig cfg;
      if (!opt.config.empty()) {
        cfg = load(opt);
      } else {
        if (example.empty()) throw ifb::Error(ifb::ErrorCode::ValidationError, "verify-example needs --config or --example");
        std::ostringstream text;
        text << "[grid]\nh = " << spacing << "\n[problem]\nexample = " << example << "\n";
        // The schedule is unused here; keep it above this grid's floor.
        const double h = ifb::eval_constant(spacing);
        std::string eps;
        for (const double e : {1e-1, 1e-2, 1e-3}) {
          if (e >= 2.0 * h * h) eps += (eps.empty() ? "" : ", ") + std::to_string(e);
        }
        text << "[schedule]\neps = " << (eps.empty() ? std::to_string(2.0 * h * h) : eps) << "\n";
        cfg = ifb::parse_config(text.str());
        if (!opt.out.empty()) cfg.output.directory = opt.out;
      }
      if (cfg.problem.example.empty()) throw ifb::Error(ifb::ErrorCode::ValidationError, "verify-example needs an example");
      cfg.problem.solve = false;
      cfg.analysis.checks = {ifb::Check::oracle};
      return finish(ifb::run(cfg, {opt.threads, !opt.out.empty(), true}));
    }
    if (analyze->parsed()) return finish(ifb::run(load(opt), {opt.threads, true, false}));
    if (report->parsed()) {
      std::string dir = opt.out;
      if (dir.empty()) dir = opt.config.empty() ? std::string("out") : load(opt).output.directory;
      std::cout << read_file(dir + "/summary.txt");
      return 0;
    }
  } catch (const ifb::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

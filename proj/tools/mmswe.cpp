// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run a named benchmark, sweep a resolution list for a
// convergence table, or list what is registered. Exit codes: 0 success, 2 usage or
// configuration problem, 3 numerical failure (lost positivity, tangled mesh, ...),
// 4 a --check verification failed.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "mmswe/driver.hpp"

namespace {

using namespace mmswe;

struct CliOptions {
  std::string scenario;
  std::string config_file;
  int n = 0;
  int ny = 0;
  int degree = 0;
  double t_end = -1.0;
  double cfl = 0.0;
  double m_tvb = -1.0;
  std::string mesh = "moving";
  std::string b_update = "dg-interp";
  std::string monitor = "equilibrium-depth";
  std::string out_dir;
  std::string ns = "40,80,160,320";
  int ref_n = 2560;
  bool check = false;
};

// Key-value config file: one `key = value` per line, '#' comments. Keys mirror the
// long flag names without the leading dashes.
void apply_config_file(const std::string& path, CliOptions& o) {
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    auto trim = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const size_t b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "scenario") o.scenario = val;
    else if (key == "n") o.n = std::stoi(val);
    else if (key == "ny") o.ny = std::stoi(val);
    else if (key == "degree") o.degree = std::stoi(val);
    else if (key == "t-end") o.t_end = std::stod(val);
    else if (key == "cfl") o.cfl = std::stod(val);
    else if (key == "m-tvb") o.m_tvb = std::stod(val);
    else if (key == "mesh") o.mesh = val;
    else if (key == "b-update") o.b_update = val;
    else if (key == "monitor") o.monitor = val;
    else if (key == "out") o.out_dir = val;
    else if (key == "ns") o.ns = val;
    else if (key == "ref-n") o.ref_n = std::stoi(val);
    else throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

RunConfig to_run_config(const CliOptions& o) {
  RunConfig cfg;
  cfg.n = o.n;
  cfg.ny = o.ny;
  cfg.degree = o.degree;
  cfg.t_end = o.t_end;
  cfg.cfl = o.cfl;
  cfg.m_tvb = o.m_tvb;
  cfg.out_dir = o.out_dir;
  if (o.mesh == "moving") cfg.mesh_mode = MeshMode::kMoving;
  else if (o.mesh == "fixed") cfg.mesh_mode = MeshMode::kFixed;
  else throw ConfigError("--mesh must be 'fixed' or 'moving'");
  if (o.b_update == "dg-interp") cfg.bottom_update = BottomUpdate::kTransport;
  else if (o.b_update == "l2-project") cfg.bottom_update = BottomUpdate::kProject;
  else throw ConfigError("--b-update must be 'dg-interp' or 'l2-project'");
  if (o.monitor == "equilibrium-depth") cfg.monitor = MonitorKind::kEquilibriumDepth;
  else if (o.monitor == "entropy") cfg.monitor = MonitorKind::kEntropy;
  else throw ConfigError("--monitor must be 'equilibrium-depth' or 'entropy'");
  return cfg;
}

const Scenario& resolve_scenario(const std::string& name) {
  const Scenario* sc = find_scenario(name);
  if (sc == nullptr) {
    std::string known;
    for (const Scenario& s : scenario_registry()) known += "\n  " + s.name;
    throw ConfigError("unknown scenario '" + name + "'; known scenarios:" + known);
  }
  return *sc;
}

std::vector<int> parse_ns(const std::string& spec) {
  std::vector<int> ns;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    ns.push_back(std::stoi(tok));
  }
  if (ns.size() < 2) throw ConfigError("--ns needs at least two comma-separated sizes");
  return ns;
}

// Post-run verification for --check: conservation always; surface balance when the
// scenario is a lake-at-rest case.
bool check_report(const Scenario& sc, const RunReport& rep) {
  bool ok = true;
  const double mass_rel = std::abs(rep.max_mass_residual) / std::max(1e-300, rep.mass_initial);
  if (!(mass_rel <= 1e-11)) {
    std::cout << "check FAILED: relative mass residual " << mass_rel << " > 1e-11\n";
    ok = false;
  }
  if (std::isfinite(sc.rest_surface)) {
    const double tol = rep.bottom_update == BottomUpdate::kTransport ? 1e-12 : 1e-2;
    if (!(rep.max_surface_dev <= tol)) {
      std::cout << "check FAILED: surface deviation " << rep.max_surface_dev << " > " << tol
                << "\n";
      ok = false;
    }
  }
  if (!(rep.min_depth_seen >= -1e-13)) {
    std::cout << "check FAILED: special-point depth " << rep.min_depth_seen << " < -1e-13\n";
    ok = false;
  }
  if (ok) std::cout << "check passed\n";
  return ok;
}

void print_report(const RunReport& rep) {
  std::printf("scenario          %s\n", rep.scenario.c_str());
  if (rep.ny > 0)
    std::printf("resolution        %d x %d x 4, degree %d\n", rep.n, rep.ny, rep.degree);
  else
    std::printf("resolution        %d, degree %d\n", rep.n, rep.degree);
  std::printf("mesh mode         %s\n", rep.mesh_mode == MeshMode::kMoving ? "moving" : "fixed");
  std::printf("bottom update     %s\n",
              rep.bottom_update == BottomUpdate::kTransport ? "dg-interp" : "l2-project");
  std::printf("steps to t=%-8g %ld\n", rep.t_end, rep.steps);
  std::printf("mass              %.17g -> %.17g\n", rep.mass_initial, rep.mass_final);
  std::printf("max mass residual %.3e\n", rep.max_mass_residual);
  if (std::isfinite(rep.max_surface_dev))
    std::printf("max surface dev   %.3e\n", rep.max_surface_dev);
  std::printf("min depth seen    %.3e\n", rep.min_depth_seen);
  std::printf("wall seconds      %.2f\n", rep.wall_seconds);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moving-mesh discontinuous Galerkin shallow water solver"};
  app.require_subcommand(1);

  CliOptions opt;

  CLI::App* run = app.add_subcommand("run", "run one scenario");
  run->add_option("scenario", opt.scenario, "scenario name (see `list`)");
  run->add_option("--config", opt.config_file, "key = value config file");
  run->add_option("--n", opt.n, "cells along x (0 = scenario default)");
  run->add_option("--ny", opt.ny, "cells along y, 2D only");
  run->add_option("--degree", opt.degree, "polynomial degree 1 or 2");
  run->add_option("--t-end", opt.t_end, "override final time");
  run->add_option("--cfl", opt.cfl, "override CFL number");
  run->add_option("--m-tvb", opt.m_tvb, "override the TVB constant");
  run->add_option("--mesh", opt.mesh, "fixed | moving");
  run->add_option("--b-update", opt.b_update, "dg-interp | l2-project");
  run->add_option("--monitor", opt.monitor, "equilibrium-depth | entropy");
  run->add_option("--out", opt.out_dir, "directory for CSV output");
  run->add_flag("--check", opt.check, "verify conservation/balance, exit 4 on failure");

  CLI::App* conv = app.add_subcommand("convergence", "resolution sweep with observed orders");
  conv->add_option("scenario", opt.scenario, "scenario name (see `list`)");
  conv->add_option("--config", opt.config_file, "key = value config file");
  conv->add_option("--ns", opt.ns, "comma-separated resolutions");
  conv->add_option("--ref-n", opt.ref_n, "fixed-mesh reference resolution");
  conv->add_option("--degree", opt.degree, "polynomial degree 1 or 2");
  conv->add_option("--t-end", opt.t_end, "override final time");
  conv->add_option("--mesh", opt.mesh, "fixed | moving");
  conv->add_option("--b-update", opt.b_update, "dg-interp | l2-project");
  conv->add_option("--monitor", opt.monitor, "equilibrium-depth | entropy");
  conv->add_option("--out", opt.out_dir, "directory for CSV output");

  CLI::App* list = app.add_subcommand("list", "list registered scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const Scenario& s : scenario_registry())
        std::printf("%-20s %dD  %s\n", s.name.c_str(), s.dim, s.blurb.c_str());
      return 0;
    }
    // The config file sets the base values; flags given on the command line override.
    if (!opt.config_file.empty()) {
      CLI::App* sub = run->parsed() ? run : conv;
      CliOptions merged;
      apply_config_file(opt.config_file, merged);
      if (sub->count("scenario") > 0) merged.scenario = opt.scenario;
      if (sub == run && run->count("--n") > 0) merged.n = opt.n;
      if (sub == run && run->count("--ny") > 0) merged.ny = opt.ny;
      if (sub->count("--degree") > 0) merged.degree = opt.degree;
      if (sub->count("--t-end") > 0) merged.t_end = opt.t_end;
      if (sub == run && run->count("--cfl") > 0) merged.cfl = opt.cfl;
      if (sub == run && run->count("--m-tvb") > 0) merged.m_tvb = opt.m_tvb;
      if (sub->count("--mesh") > 0) merged.mesh = opt.mesh;
      if (sub->count("--b-update") > 0) merged.b_update = opt.b_update;
      if (sub->count("--monitor") > 0) merged.monitor = opt.monitor;
      if (sub->count("--out") > 0) merged.out_dir = opt.out_dir;
      if (sub == conv && conv->count("--ns") > 0) merged.ns = opt.ns;
      if (sub == conv && conv->count("--ref-n") > 0) merged.ref_n = opt.ref_n;
      merged.check = opt.check;
      merged.config_file = opt.config_file;
      opt = merged;
    }
    if (opt.scenario.empty()) throw ConfigError("no scenario given");

    const Scenario& sc = resolve_scenario(opt.scenario);
    const RunConfig cfg = to_run_config(opt);

    if (run->parsed()) {
      const RunReport rep = run_scenario(sc, cfg);
      print_report(rep);
      if (opt.check && !check_report(sc, rep)) return 4;
      return 0;
    }

    const std::vector<int> ns = parse_ns(opt.ns);
    const auto rows = convergence_study(sc, ns, cfg, opt.ref_n);
    std::printf("%8s %12s %12s %7s %12s %12s %7s\n", "n", "h L1", "h Linf", "order", "hu L1",
                "hu Linf", "order");
    for (const ConvergenceRow& r : rows)
      std::printf("%8d %12.4e %12.4e %7.2f %12.4e %12.4e %7.2f\n", r.n, r.h.l1, r.h.linf,
                  r.order_h, r.hu.l1, r.hu.linf, r.order_hu);
    if (!cfg.out_dir.empty()) write_convergence_csv(rows, cfg.out_dir);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include "mmswe/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>

namespace mmswe {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<Scenario> make_registry() {
  std::vector<Scenario> v;

  {
    Scenario s;
    s.name = "acc1d";
    s.blurb = "smooth periodic 1D flow for convergence studies";
    s.dim = 1;
    s.xa = 0.0;
    s.xb = 1.0;
    s.n = 100;
    s.degree = 2;
    s.t_end = 0.1;
    s.m_tvb = 40.0;
    s.bc = {BcType::kPeriodic, BcType::kPeriodic, BcType::kTransmissive,
            BcType::kTransmissive};
    s.bottom = [](Vec2 p) {
      const double sp = std::sin(kPi * p.x);
      return sp * sp;
    };
    s.initial = [](Vec2 p) -> std::array<double, 3> {
      const double c = std::cos(2.0 * kPi * p.x);
      return {5.0 + std::exp(c), std::sin(c), 0.0};
    };
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "wb1d-smooth";
    s.blurb = "1D lake at rest over a smooth hump";
    s.dim = 1;
    s.xa = 0.0;
    s.xb = 10.0;
    s.n = 50;
    s.degree = 2;
    s.t_end = 0.5;
    s.bottom = [](Vec2 p) { return 5.0 * std::exp(-0.4 * (p.x - 5.0) * (p.x - 5.0)); };
    s.initial = [b = s.bottom](Vec2 p) -> std::array<double, 3> {
      return {10.0 - b(p), 0.0, 0.0};
    };
    s.rest_surface = 10.0;
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "wb1d-step";
    s.blurb = "1D lake at rest over a discontinuous step";
    s.dim = 1;
    s.xa = 0.0;
    s.xb = 10.0;
    s.n = 50;
    s.degree = 2;
    s.t_end = 0.5;
    s.bottom = [](Vec2 p) { return (p.x > 4.0 && p.x < 8.0) ? 4.0 : 0.0; };
    s.initial = [b = s.bottom](Vec2 p) -> std::array<double, 3> {
      return {10.0 - b(p), 0.0, 0.0};
    };
    s.rest_surface = 10.0;
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "wb1d-dry";
    s.blurb = "1D lake at rest touching a dry hump crest";
    s.dim = 1;
    s.xa = 0.0;
    s.xb = 10.0;
    s.n = 50;
    s.degree = 2;
    s.t_end = 0.5;
    s.reduced_cfl = true;
    s.bottom = [](Vec2 p) { return 10.0 * std::exp(-0.4 * (p.x - 5.0) * (p.x - 5.0)); };
    s.initial = [b = s.bottom](Vec2 p) -> std::array<double, 3> {
      return {std::max(0.0, 10.0 - b(p)), 0.0, 0.0};
    };
    s.rest_surface = 10.0;
    v.push_back(std::move(s));
  }

  // Cosine bump bathymetry shared by the perturbation cases.
  auto cos_bump = [](double scale) {
    return [scale](Vec2 p) {
      if (p.x <= 1.4 || p.x >= 1.6) return 0.0;
      return scale * (std::cos(10.0 * kPi * (p.x - 1.5)) + 1.0);
    };
  };
  auto pulse_init = [](std::function<double(Vec2)> b, double eps) {
    return [b = std::move(b), eps](Vec2 p) -> std::array<double, 3> {
      const double base = std::max(0.0, 1.0 - b(p));
      const double bump = (p.x >= 1.1 && p.x <= 1.2) ? eps : 0.0;
      return {base + bump, 0.0, 0.0};
    };
  };

  {
    Scenario s;
    s.name = "perturb1d";
    s.blurb = "large surface pulse crossing a submerged bump";
    s.dim = 1;
    s.xa = 0.0;
    s.xb = 2.0;
    s.n = 160;
    s.degree = 2;
    s.t_end = 0.2;
    s.bottom = cos_bump(0.25);
    s.initial = pulse_init(s.bottom, 0.2);
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "perturb1d-small";
    s.blurb = "tiny surface pulse (1e-5) crossing a submerged bump";
    s.dim = 1;
    s.xa = 0.0;
    s.xb = 2.0;
    s.n = 160;
    s.degree = 2;
    s.t_end = 0.2;
    s.bottom = cos_bump(0.25);
    s.initial = pulse_init(s.bottom, 1e-5);
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "perturb1d-dry";
    s.blurb = "tiny surface pulse over a bump that touches the surface";
    s.dim = 1;
    s.xa = 0.0;
    s.xb = 2.0;
    s.n = 160;
    s.degree = 2;
    s.t_end = 0.2;
    s.reduced_cfl = true;
    s.bottom = cos_bump(0.5);
    s.initial = pulse_init(s.bottom, 1e-5);
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "riemann1d-step";
    s.blurb = "dam-break style Riemann problem over a bottom step";
    s.dim = 1;
    s.xa = -10.0;
    s.xb = 10.0;
    s.n = 100;
    s.degree = 2;
    s.t_end = 1.0;
    s.bottom = [](Vec2 p) { return p.x > 0.0 ? 1.0 : 0.0; };
    s.initial = [](Vec2 p) -> std::array<double, 3> {
      if (p.x <= 0.0) return {4.0, 4.0 * 5.0, 0.0};
      return {1.0, 1.0 * -0.9, 0.0};
    };
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "rarefaction1d";
    s.blurb = "rarefaction plus shock on a flat bottom";
    s.dim = 1;
    s.xa = -10.0;
    s.xb = 10.0;
    s.n = 100;
    s.degree = 2;
    s.t_end = 1.0;
    s.bottom = [](Vec2) { return 0.0; };
    s.initial = [](Vec2 p) -> std::array<double, 3> {
      if (p.x < 1.0) return {2.0, 2.0 * 1.0, 0.0};
      return {0.35, 0.0, 0.0};
    };
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "rarefaction1d-wavy";
    s.blurb = "rarefaction plus shocks over a wavy bump";
    s.dim = 1;
    s.xa = -10.0;
    s.xb = 10.0;
    s.n = 160;
    s.degree = 2;
    s.t_end = 1.0;
    s.bottom = [](Vec2 p) {
      if (p.x < 0.0 || p.x > 2.0) return 0.0;
      const double c = std::cos(0.5 * kPi * (p.x - 1.0));
      return 0.3 * std::pow(c, 30);
    };
    s.initial = [b = s.bottom](Vec2 p) -> std::array<double, 3> {
      if (p.x < 1.0) return {2.0 - b(p), 2.0 - b(p), 0.0};
      return {0.35 - b(p), 0.0, 0.0};
    };
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "wb2d";
    s.blurb = "2D lake at rest over an isolated hump";
    s.dim = 2;
    s.xa = 0.0;
    s.xb = 1.0;
    s.ya = 0.0;
    s.yb = 1.0;
    s.n = 10;
    s.ny = 10;
    s.degree = 2;
    s.t_end = 0.1;
    s.bc = {BcType::kPeriodic, BcType::kPeriodic, BcType::kPeriodic, BcType::kPeriodic};
    s.bottom = [](Vec2 p) {
      const double dx = p.x - 0.5, dy = p.y - 0.5;
      return 0.8 * std::exp(-50.0 * (dx * dx + dy * dy));
    };
    s.initial = [b = s.bottom](Vec2 p) -> std::array<double, 3> {
      return {1.0 - b(p), 0.0, 0.0};
    };
    s.rest_surface = 1.0;
    v.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "perturb2d";
    s.blurb = "2D surface pulse passing an elongated hump";
    s.dim = 2;
    s.xa = -1.0;
    s.xb = 2.0;
    s.ya = 0.0;
    s.yb = 1.0;
    s.n = 45;
    s.ny = 15;
    s.degree = 2;
    s.t_end = 0.12;
    s.bc = {BcType::kReflective, BcType::kReflective, BcType::kReflective,
            BcType::kReflective};
    s.bottom = [](Vec2 p) {
      const double dx = p.x - 0.9, dy = p.y - 0.5;
      return 0.8 * std::exp(-5.0 * dx * dx - 50.0 * dy * dy);
    };
    s.initial = [b = s.bottom](Vec2 p) -> std::array<double, 3> {
      const double bump = (p.x > 0.05 && p.x < 0.15) ? 0.01 : 0.0;
      return {1.0 - b(p) + bump, 0.0, 0.0};
    };
    v.push_back(std::move(s));
  }

  return v;
}

// Rethrow an inner-module error with run position information prepended, preserving
// the concrete type so exit-code mapping still works.
template <typename Fn>
auto at_phase(long step, const char* phase, Fn&& fn) {
  const auto annotate = [&](const Error& e) {
    return "step " + std::to_string(step) + ", " + phase + ": " + e.what();
  };
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(annotate(e));
  } catch (const TangledMeshError& e) {
    throw TangledMeshError(annotate(e));
  } catch (const PositivityError& e) {
    throw PositivityError(annotate(e));
  } catch (const PointLocationError& e) {
    throw PointLocationError(annotate(e));
  } catch (const StructureError& e) {
    throw StructureError(annotate(e));
  } catch (const NumericError& e) {
    throw NumericError(annotate(e));
  }
}

// Sample points for error measurement: 21 per element (equispaced on [0,1] in 1D, the
// degree-5 barycentric lattice on the reference triangle in 2D).
const std::vector<Vec2>& sample_points(int dim) {
  static const std::vector<Vec2> line = [] {
    std::vector<Vec2> p;
    for (int i = 0; i <= 20; ++i) p.push_back({i / 20.0, 0.0});
    return p;
  }();
  static const std::vector<Vec2> tri = [] {
    std::vector<Vec2> p;
    for (int i = 0; i <= 5; ++i)
      for (int j = 0; j <= 5 - i; ++j) p.push_back({i / 5.0, j / 5.0});
    return p;
  }();
  return dim == 1 ? line : tri;
}

double surface_deviation(const SweFields& f, double rest) {
  const SimplicialMesh& mesh = *f.mesh();
  const auto& pts = sample_points(mesh.conn->dim);
  double dev = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (const Vec2& r : pts)
      dev = std::max(dev, std::abs(f.h.eval(e, r) + f.b.eval(e, r) - rest));
  return dev;
}

double min_special_depth(const SweFields& f) {
  const SimplicialMesh& mesh = *f.mesh();
  const SpecialPointSet& sp = special_points(mesh.conn->dim, f.degree());
  double mn = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (const Vec2& r : sp.pts) mn = std::min(mn, f.h.eval(e, r));
  return mn;
}

MeshPtr build_scenario_mesh(const Scenario& sc, int n, int ny) {
  MeshPtr mesh = sc.dim == 1 ? build_interval_mesh(sc.xa, sc.xb, n)
                             : build_cross_rectangle(sc.xa, sc.xb, sc.ya, sc.yb, n, ny);
  const bool periodic = std::any_of(sc.bc.begin(), sc.bc.end(), [](BcType t) {
    return t == BcType::kPeriodic;
  });
  if (!periodic) return mesh;
  auto conn = std::make_shared<MeshConnectivity>(*mesh->conn);
  pair_periodic_faces(*conn, mesh->X);
  return std::make_shared<SimplicialMesh>(conn, std::vector<Vec2>(mesh->X));
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> reg = make_registry();
  return reg;
}

const Scenario* find_scenario(const std::string& name) {
  for (const Scenario& s : scenario_registry())
    if (s.name == name) return &s;
  return nullptr;
}

RunReport run_scenario(const Scenario& sc, const RunConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();

  if (cfg.n < 0 || cfg.ny < 0) throw ConfigError("mesh resolution must be positive");
  const int n = cfg.n > 0 ? cfg.n : sc.n;
  const int ny = sc.dim == 2 ? (cfg.ny > 0 ? cfg.ny : (sc.ny > 0 ? sc.ny : n)) : 0;
  const int degree = cfg.degree > 0 ? cfg.degree : sc.degree;
  const double t_end = cfg.t_end >= 0.0 ? cfg.t_end : sc.t_end;
  if (degree < 1 || degree > 2) throw ConfigError("degree must be 1 or 2");

  MeshPtr mesh = build_scenario_mesh(sc, n, ny);

  BcSet bc;
  for (int s = 0; s < 4; ++s) bc[s].type = sc.bc[s];

  SweParams prm = SweParams::defaults(sc.dim, degree);
  if (sc.reduced_cfl) prm.cfl = prm.cfl_dry;
  if (cfg.cfl > 0.0) prm.cfl = prm.cfl_dry = cfg.cfl;
  prm.m_tvb = cfg.m_tvb >= 0.0 ? cfg.m_tvb : sc.m_tvb;

  SweFields f(mesh, degree);
  f.b = l2_project(sc.bottom, mesh, degree);
  f.h = l2_project([&](Vec2 p) { return sc.initial(p)[0]; }, mesh, degree);
  f.mx = l2_project([&](Vec2 p) { return sc.initial(p)[1]; }, mesh, degree);
  if (sc.dim == 2)
    f.my = l2_project([&](Vec2 p) { return sc.initial(p)[2]; }, mesh, degree);
  at_phase(0, "initial limiting", [&] { limit_cascade(f, prm, bc, 0.0, nullptr); });

  RunReport rep;
  rep.scenario = sc.name;
  rep.n = n;
  rep.ny = ny;
  rep.degree = degree;
  rep.mesh_mode = cfg.mesh_mode;
  rep.bottom_update = cfg.bottom_update;
  rep.t_end = t_end;
  rep.mass_initial = f.h.integral();
  rep.min_depth_seen = std::numeric_limits<double>::infinity();

  const bool lake = std::isfinite(sc.rest_surface);
  if (!lake) rep.max_surface_dev = std::numeric_limits<double>::quiet_NaN();

  MmpdeParams mprm;
  mprm.monitor.gravity = prm.gravity;
  mprm.monitor.dry_tol = prm.dry_tol;
  if (cfg.monitor == MonitorKind::kEntropy) mprm.monitor.use_entropy = true;

  const std::vector<Vec2> xi_ref = mesh->X;

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    write_snapshot_csv(f, cfg.out_dir, 0);
  }

  double t = 0.0;
  double outflow = 0.0;
  const double t_tiny = 1e-12 * std::max(1.0, t_end);
  double dt_prev =
      t_end > 0.0 ? at_phase(0, "time step estimate", [&] { return compute_dt(f, prm, bc, t); })
                  : 0.0;

  while (t_end - t > t_tiny) {
    if (rep.steps >= cfg.max_steps) throw ConfigError("step budget exhausted before final time");
    const long step = rep.steps + 1;
    int remap_steps = 0;
    int mesh_substeps = 0;

    if (cfg.mesh_mode == MeshMode::kMoving) {
      MoveStats ms;
      MeshPtr moved = at_phase(step, "mesh movement",
                               [&] { return move_mesh(f, xi_ref, dt_prev, mprm, &ms); });
      mesh_substeps = ms.substeps;
      rep.mesh_monotone = rep.mesh_monotone && ms.monotone;
      if (ms.moved) {
        if (cfg.bottom_update == BottomUpdate::kTransport) {
          const RemapStats rs = at_phase(step, "solution transfer",
                                         [&] { return remap_flow(f, moved, prm.pos_floor); });
          remap_steps = rs.steps;
        } else {
          std::vector<DGField*> fields{&f.h, &f.mx, &f.my};
          const std::vector<uint8_t> pp{1, 0, 0};
          const RemapStats rs = at_phase(step, "solution transfer", [&] {
            return remap_fields(fields, pp, *f.mesh(), *moved, prm.pos_floor);
          });
          remap_steps = rs.steps;
          f.h.mesh = f.mx.mesh = f.my.mesh = moved;
          f.b = l2_project(sc.bottom, moved, degree);
        }
        mesh = moved;
      }
    }

    double dt = at_phase(step, "time step estimate", [&] { return compute_dt(f, prm, bc, t); });
    if (t + dt > t_end) dt = t_end - t;
    const StepStats st =
        at_phase(step, "flow update", [&] { return ssp_rk3_step(f, dt, prm, bc, t); });
    t += dt;
    ++rep.steps;
    dt_prev = dt;
    outflow += st.boundary_mass_flux;

    LedgerRow row;
    row.step = rep.steps;
    row.t = t;
    row.dt = dt;
    row.mass = f.h.integral();
    row.mass_residual = row.mass - rep.mass_initial + outflow;
    row.surface_dev =
        lake ? surface_deviation(f, sc.rest_surface) : std::numeric_limits<double>::quiet_NaN();
    row.min_depth = min_special_depth(f);
    row.min_volume = std::numeric_limits<double>::infinity();
    for (int e = 0; e < mesh->n_elems(); ++e)
      row.min_volume = std::min(row.min_volume, mesh->egeo[e].volume);
    row.remap_steps = remap_steps;
    row.mesh_substeps = mesh_substeps;
    rep.ledger.push_back(row);

    rep.max_mass_residual = std::max(rep.max_mass_residual, std::abs(row.mass_residual));
    if (lake) rep.max_surface_dev = std::max(rep.max_surface_dev, row.surface_dev);
    rep.min_depth_seen = std::min(rep.min_depth_seen, row.min_depth);
  }

  rep.state = f;
  rep.mass_final = f.h.integral();
  if (rep.ledger.empty()) rep.min_depth_seen = min_special_depth(f);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  if (!cfg.out_dir.empty()) {
    write_snapshot_csv(f, cfg.out_dir, 1);
    write_run_csv(rep, cfg.out_dir);
  }
  return rep;
}

ErrorNorms error_norms(const DGField& f, const std::function<double(Vec2)>& exact) {
  const SimplicialMesh& mesh = *f.mesh;
  const auto& pts = sample_points(mesh.conn->dim);
  ErrorNorms out;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double w = mesh.egeo[e].volume / static_cast<double>(pts.size());
    for (const Vec2& r : pts) {
      const double d = std::abs(f.eval(e, r) - exact(mesh.to_phys(e, r)));
      out.l1 += w * d;
      out.linf = std::max(out.linf, d);
    }
  }
  return out;
}

ErrorNorms error_norms(const DGField& f, const DGField& reference) {
  if (reference.mesh.get() == f.mesh.get()) {
    // Same mesh: evaluate both polynomials at the same reference point, keeping the
    // comparison free of point-location round-off.
    const SimplicialMesh& mesh = *f.mesh;
    const auto& pts = sample_points(mesh.conn->dim);
    ErrorNorms out;
    for (int e = 0; e < mesh.n_elems(); ++e) {
      const double w = mesh.egeo[e].volume / static_cast<double>(pts.size());
      for (const Vec2& r : pts) {
        const double d = std::abs(f.eval(e, r) - reference.eval(e, r));
        out.l1 += w * d;
        out.linf = std::max(out.linf, d);
      }
    }
    return out;
  }
  const SimplicialMesh& ref_mesh = *reference.mesh;
  int seed = 0;
  return error_norms(f, [&](Vec2 p) {
    const LocatedPoint lp = locate_point(ref_mesh, p, seed);
    seed = lp.elem;
    return reference.eval(lp.elem, lp.ref);
  });
}

std::vector<ConvergenceRow> convergence_study(const Scenario& sc, const std::vector<int>& ns,
                                              const RunConfig& cfg, int ref_n) {
  if (ns.size() < 2) throw ConfigError("convergence study needs at least two resolutions");

  RunConfig ref_cfg = cfg;
  ref_cfg.n = ref_n;
  ref_cfg.ny = 0;
  ref_cfg.degree = 2;
  ref_cfg.mesh_mode = MeshMode::kFixed;
  ref_cfg.out_dir.clear();
  const RunReport ref = run_scenario(sc, ref_cfg);

  std::vector<int> sorted = ns;
  std::sort(sorted.begin(), sorted.end());

  std::vector<ConvergenceRow> rows;
  for (const int n : sorted) {
    RunConfig rc = cfg;
    rc.n = n;
    rc.out_dir.clear();
    const RunReport rr = run_scenario(sc, rc);
    ConvergenceRow row;
    row.n = n;
    row.h = error_norms(rr.state.h, ref.state.h);
    row.hu = error_norms(rr.state.mx, ref.state.mx);
    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      const double ratio = std::log(static_cast<double>(n) / prev.n);
      row.order_h = std::log(prev.h.l1 / row.h.l1) / ratio;
      row.order_hu = std::log(prev.hu.l1 / row.hu.l1) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_run_csv(const RunReport& rep, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/report.csv");
    out << "key,value\n";
    out << "scenario," << rep.scenario << "\n";
    out << "n," << rep.n << "\n";
    out << "ny," << rep.ny << "\n";
    out << "degree," << rep.degree << "\n";
    out << "mesh_mode," << (rep.mesh_mode == MeshMode::kMoving ? "moving" : "fixed") << "\n";
    out << "bottom_update,"
        << (rep.bottom_update == BottomUpdate::kTransport ? "dg-interp" : "l2-project") << "\n";
    out << "t_end," << fmt(rep.t_end) << "\n";
    out << "steps," << rep.steps << "\n";
    out << "mass_initial," << fmt(rep.mass_initial) << "\n";
    out << "mass_final," << fmt(rep.mass_final) << "\n";
    out << "max_mass_residual," << fmt(rep.max_mass_residual) << "\n";
    out << "max_surface_dev," << fmt(rep.max_surface_dev) << "\n";
    out << "min_depth_seen," << fmt(rep.min_depth_seen) << "\n";
    // wall_seconds stays out of the file so identical configs give identical bytes.
  }
  {
    std::ofstream out(dir + "/ledger.csv");
    out << "step,t,dt,mass,mass_residual,surface_dev,min_depth,min_volume,remap_steps,"
           "mesh_substeps\n";
    for (const LedgerRow& r : rep.ledger)
      out << r.step << ',' << fmt(r.t) << ',' << fmt(r.dt) << ',' << fmt(r.mass) << ','
          << fmt(r.mass_residual) << ',' << fmt(r.surface_dev) << ',' << fmt(r.min_depth) << ','
          << fmt(r.min_volume) << ',' << r.remap_steps << ',' << r.mesh_substeps << "\n";
  }
}

void write_snapshot_csv(const SweFields& f, const std::string& dir, int index) {
  std::filesystem::create_directories(dir);
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "%04d.csv", index);

  const SimplicialMesh& mesh = *f.mesh();
  {
    std::ofstream out(dir + "/mesh_" + suffix);
    out << "vertex,x,y\n";
    for (int v = 0; v < mesh.conn->n_vertices; ++v)
      out << v << ',' << fmt(mesh.X[v].x) << ',' << fmt(mesh.X[v].y) << "\n";
  }
  const std::pair<const char*, const DGField*> fields[] = {
      {"h", &f.h}, {"hu", &f.mx}, {"hv", &f.my}, {"b", &f.b}};
  for (const auto& [name, field] : fields) {
    std::ofstream out(dir + "/field_" + std::string(name) + "_" + suffix);
    out << "element";
    for (int j = 0; j < field->nb; ++j) out << ",c" << j;
    out << "\n";
    for (int e = 0; e < mesh.n_elems(); ++e) {
      out << e;
      for (int j = 0; j < field->nb; ++j) out << ',' << fmt(field->coef(e, j));
      out << "\n";
    }
  }
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/convergence.csv");
  out << "n,h_l1,h_linf,h_order,hu_l1,hu_linf,hu_order\n";
  for (const ConvergenceRow& r : rows)
    out << r.n << ',' << fmt(r.h.l1) << ',' << fmt(r.h.linf) << ',' << fmt(r.order_h) << ','
        << fmt(r.hu.l1) << ',' << fmt(r.hu.linf) << ',' << fmt(r.order_hu) << "\n";
}

}  // namespace mmswe

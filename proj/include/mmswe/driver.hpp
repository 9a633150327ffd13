// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mmswe/mmpde.hpp"
#include "mmswe/remap.hpp"
#include "mmswe/swe.hpp"

namespace mmswe {

enum class MeshMode { kFixed, kMoving };

// How the bottom elevation follows a mesh move: transported together with the water
// surface (keeps a flat surface exactly flat), or re-projected from the analytic
// bathymetry on the new mesh (cheaper-looking but breaks the flat-surface balance;
// kept as a control).
enum class BottomUpdate { kTransport, kProject };

enum class MonitorKind { kEquilibriumDepth, kEntropy };

// A named benchmark configuration: domain, bathymetry, initial state, boundaries,
// final time, and solver defaults. All quantities are plain data so a scenario can be
// run repeatedly with overrides.
struct Scenario {
  std::string name;
  std::string blurb;
  int dim = 1;
  double xa = 0.0, xb = 1.0;  // domain extent (x)
  double ya = 0.0, yb = 1.0;  // domain extent (y), 2D only
  int n = 100;                // default cells along x (1D: elements)
  int ny = 0;                 // default cells along y (2D: each cell splits into 4)
  int degree = 2;
  double t_end = 1.0;
  double m_tvb = 0.0;
  bool reduced_cfl = false;   // run at the dry-case CFL number throughout
  std::array<BcType, 4> bc{BcType::kTransmissive, BcType::kTransmissive,
                           BcType::kTransmissive, BcType::kTransmissive};
  std::function<double(Vec2)> bottom;                       // B(x,y)
  std::function<std::array<double, 3>(Vec2)> initial;       // (h, hu, hv) at t = 0
  // When finite, the run is a lake-at-rest case with surface h + B == rest_surface;
  // the per-step ledger then records the largest pointwise surface deviation.
  double rest_surface = std::numeric_limits<double>::quiet_NaN();
};

const std::vector<Scenario>& scenario_registry();
// nullptr when the name is unknown.
const Scenario* find_scenario(const std::string& name);

// Per-run overrides; zero/negative sentinel values mean "use the scenario default".
struct RunConfig {
  int n = 0;
  int ny = 0;
  int degree = 0;
  double t_end = -1.0;
  double cfl = 0.0;
  double m_tvb = -1.0;
  MeshMode mesh_mode = MeshMode::kMoving;
  BottomUpdate bottom_update = BottomUpdate::kTransport;
  MonitorKind monitor = MonitorKind::kEquilibriumDepth;
  std::string out_dir;          // when nonempty, CSV outputs are written there
  long max_steps = 2000000;     // hard stop guarding against a stalled dt
};

// One row per time step: conservation and balance bookkeeping.
struct LedgerRow {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  // mass - initial mass + accumulated boundary outflow; zero for a conservative run.
  double mass_residual = 0.0;
  // max |h + B - rest_surface| over the error sample points (NaN when the scenario
  // declares no rest surface).
  double surface_dev = 0.0;
  double min_depth = 0.0;       // smallest special-point depth of the post-step state
  double min_volume = 0.0;      // smallest element volume of the step's mesh
  int remap_steps = 0;
  int mesh_substeps = 0;
};

struct RunReport {
  std::string scenario;
  int n = 0, ny = 0, degree = 0;
  MeshMode mesh_mode = MeshMode::kMoving;
  BottomUpdate bottom_update = BottomUpdate::kTransport;
  double t_end = 0.0;
  long steps = 0;
  SweFields state;              // final fields; state.mesh() is the final mesh
  std::vector<LedgerRow> ledger;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double max_mass_residual = 0.0;   // absolute, max over steps
  double max_surface_dev = 0.0;     // NaN when not a lake-at-rest scenario
  double min_depth_seen = 0.0;
  // True when every accepted mesh-relaxation substep of the run had non-increasing
  // energy (vacuously true for fixed meshes).
  bool mesh_monotone = true;
  double wall_seconds = 0.0;
};

// Projects the initial data, then advances to the final time: mesh move, solution
// transfer, CFL step, SSP-RK3 with the limiter cascade. Fixed-mesh mode skips the
// first two. Errors from inner modules are re-thrown with the step index and phase
// prepended to the message.
RunReport run_scenario(const Scenario& sc, const RunConfig& cfg);

struct ErrorNorms {
  double l1 = 0.0;
  double linf = 0.0;
};

// Field-vs-callable norms sampled at 21 points per element (equispaced in 1D, a
// symmetric barycentric lattice in 2D); L1 weights each sample by |K|/21.
ErrorNorms error_norms(const DGField& f, const std::function<double(Vec2)>& exact);
// Field-vs-field norms with the reference on its own mesh over the same domain; the
// reference is evaluated at the sample points by point location.
ErrorNorms error_norms(const DGField& f, const DGField& reference);

struct ConvergenceRow {
  int n = 0;
  ErrorNorms h, hu;
  // L1 observed orders against the previous row (NaN on the first row).
  double order_h = std::numeric_limits<double>::quiet_NaN();
  double order_hu = std::numeric_limits<double>::quiet_NaN();
};

// Runs the scenario at each resolution and measures self-convergence of h and hu
// against a fixed-mesh degree-2 reference run at ref_n cells (ref_n should be well
// above the largest entry of ns).
std::vector<ConvergenceRow> convergence_study(const Scenario& sc, const std::vector<int>& ns,
                                              const RunConfig& cfg, int ref_n);

// CSV emission (deterministic %.17g formatting): report.csv, ledger.csv, and
// mesh/field snapshots with the given 4-digit index.
void write_run_csv(const RunReport& rep, const std::string& dir);
void write_snapshot_csv(const SweFields& f, const std::string& dir, int index);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, const std::string& dir);

}  // namespace mmswe

// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <functional>

#include "mmswe/dg.hpp"
#include "mmswe/mesh.hpp"

namespace mmswe {

// Shallow water state per point: u[0]=depth h, u[1]=x-momentum, u[2]=y-momentum.

struct SweParams {
  double gravity = 9.812;
  double dry_tol = 1e-6;        // velocity desingularization / dry-cell momentum zeroing
  double dry_cell_avg = 1e-3;   // a cell average below this switches to the dry CFL number
  double m_tvb = 0.0;           // TVB constant M
  double cfl = 0.3;
  double cfl_dry = 0.3;
  double pos_floor = 0.0;       // positivity floor for the depth

  // CFL numbers sized to the RK3-DG stability bound, which tightens with the degree.
  static SweParams defaults(int dim, int degree) {
    SweParams p;
    if (dim == 1) {
      p.cfl = degree >= 2 ? 0.18 : 0.3;
      p.cfl_dry = degree >= 2 ? 0.15 : 0.3;
    } else {
      p.cfl = degree >= 2 ? 0.1 : 0.2;
      p.cfl_dry = p.cfl;
    }
    return p;
  }
};

enum class BcType { kPeriodic, kTransmissive, kReflective, kInflow };

struct BoundaryCondition {
  BcType type = BcType::kTransmissive;
  // Prescribed exterior state for kInflow, evaluated at the face point and stage time.
  std::function<std::array<double, 3>(Vec2, double)> inflow;
};

// One condition per mesh side (left,right,bottom,top); 1D uses the first two.
using BcSet = std::array<BoundaryCondition, 4>;

// Flow state: depth, momenta, and the bottom elevation, all in the same broken space.
struct SweFields {
  DGField h, mx, my, b;
  SweFields() = default;
  SweFields(MeshPtr mesh, int degree) : h(mesh, degree), mx(mesh, degree), my(mesh, degree),
                                        b(mesh, degree) {}
  MeshPtr mesh() const { return h.mesh; }
  int degree() const { return h.degree; }
};

// Desingularized velocity: momentum/depth when the depth is resolvable, else zero.
inline double safe_vel(double h, double m, double dry_tol) {
  return h >= dry_tol ? m / h : 0.0;
}

// F(U).n with desingularized velocities (momentum advection uses h*u*u, not m*m/h).
std::array<double, 3> physical_flux_n(const double* u, const Vec2& n, double gravity,
                                      double dry_tol);

// Characteristic speeds u.n - c, u.n, u.n + c.
std::array<double, 3> wave_speeds_n(const double* u, const Vec2& n, double gravity,
                                    double dry_tol);

// Lax-Friedrichs flux with a caller-supplied dissipation speed alpha. Exactly antisymmetric:
// lf_flux(ur, ul, -n, alpha) == -lf_flux(ul, ur, n, alpha) bitwise.
std::array<double, 3> lf_flux(const double* ul, const double* ur, const Vec2& n, double alpha,
                              double gravity, double dry_tol);

// Hydrostatic reconstruction of one side's state against the higher of the two bottom
// traces: h* = max(0, h + b_in - max(b_in, b_ex)), momenta rebuilt as h* times velocity.
void hydrostatic_reconstruct(const double* u, double b_in, double b_ex, double dry_tol,
                             double* ustar);

struct ResidualOut {
  double max_speed = 0.0;           // largest |u.n|+c over all face traces (pre-reconstruction)
  double boundary_mass_rate = 0.0;  // instantaneous mass outflow through physical boundaries
};

// Semi-discrete residual: fills d(coefficient)/dt for depth and momenta. Well balanced:
// at lake at rest (h+b constant where wet, zero momenta) the rates vanish to round-off.
ResidualOut swe_residual(const SweFields& f, const SweParams& prm, const BcSet& bc, double t,
                         std::vector<double>& dh, std::vector<double>& dmx,
                         std::vector<double>& dmy);

// Smallest element altitude over the mesh (cell width in 1D).
double min_cell_height(const SimplicialMesh& mesh);

// Largest |u.n|+c over all face traces; used for the CFL bound and LF dissipation.
double max_wave_speed(const SweFields& f, const SweParams& prm, const BcSet& bc, double t);

// CFL time step: cfl * min altitude / max speed, with the dry CFL number when any cell
// average of the depth falls below dry_cell_avg.
double compute_dt(const SweFields& f, const SweParams& prm, const BcSet& bc, double t);

struct StepStats {
  double boundary_mass_flux = 0.0;  // time-integrated outflow over the step
  double max_speed = 0.0;
  int tvb_flagged = 0;
  int char_fallbacks = 0;
  int pp_modified = 0;
  double min_theta = 1.0;
  double min_depth_seen = 0.0;      // smallest special-point depth before scaling
};

// Limiter cascade: TVB on (h+b, mx, my) characteristic-wise, depth rebuilt from the
// limited surface on flagged cells only, positivity scaling on the depth with the bottom
// adjusted so the surface is untouched, and momenta zeroed on dry cells. t feeds inflow
// ghost states.
void limit_cascade(SweFields& f, const SweParams& prm, const BcSet& bc, double t,
                   StepStats* stats);

// One SSP-RK3 step of size dt from time t, applying the limiter cascade after each stage.
StepStats ssp_rk3_step(SweFields& f, double dt, const SweParams& prm, const BcSet& bc, double t);

}  // namespace mmswe

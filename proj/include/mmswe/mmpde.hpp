// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mmswe/swe.hpp"

namespace mmswe {

// Symmetric positive definite d-by-d adaptation tensors attached to a mesh: one per
// element (drives the mesh energy) and one per vertex (scales the nodal relaxation
// rate). Only the upper-left dim-by-dim block of each Mat2 is meaningful.
struct MetricField {
  int dim = 1;
  std::vector<Mat2> elem;
  std::vector<Mat2> vertex;
};

// Controls how the adaptation tensor is built from the flow state. The tensor follows
// the interpolation-error ansatz det(aI + |H|)^{-1/(d+4)} (aI + |H|) per watched
// variable, where H is a recovered Hessian and the regularization a is chosen so that
// the regularized and raw curvature masses balance two-to-one. Watched variables are
// the equilibrium variable 0.5(u^2+v^2) + g(h+B) and the water depth h; their unit-
// normalized tensors are combined by matrix intersection with the depth tensor scaled
// by depth_weight.
struct MonitorParams {
  bool use_flow_energy = true;
  bool use_depth = true;
  // Watch the total energy 0.5 h(u^2+v^2) + 0.5 g h^2 + g h B alone instead of the
  // pair above (kept as a comparison monitor; it concentrates less sharply on small
  // surface perturbations).
  bool use_entropy = false;
  double depth_weight = 0.1;
  double trace_bound = 1000.0;  // eigenvalue ceiling of the combined tensor
  int smoothing_passes = 2;     // vertex-neighbor averaging sweeps
  double gravity = 9.812;
  double dry_tol = 1e-6;  // depth floor for velocity evaluation
};

struct MmpdeParams {
  MonitorParams monitor;
  double tau_scale = 0.1;  // relaxation time = tau_scale * n_elems^(-1/dim)
  int max_substeps = 20;   // accepted relaxation substeps per move
  int max_rejects = 40;    // step halvings before giving up
};

struct MoveStats {
  int substeps = 0;       // accepted pseudo-time steps
  int rejects = 0;        // halvings due to energy increase or tangling
  bool moved = false;     // the returned mesh differs from the input mesh
  bool monotone = true;   // every accepted substep had non-increasing energy
  double energy_begin = 0.0;
  double energy_end = 0.0;
  double max_displacement = 0.0;
};

// Least-squares quadratic fit of per-element samples (taken as values at element
// centroids) over vertex patches; returns one symmetric Hessian estimate per element
// (the average of its vertex fits). Patches grow by rings until they hold enough
// samples to determine the fit.
std::vector<Mat2> recover_hessians(const SimplicialMesh& mesh,
                                   const std::vector<double>& cell_values);

// Solves sum |K| det(aI + |H_K|)^(2/(d+4)) = 2 sum |K| det(|H_K|)^(2/(d+4)) for the
// regularization parameter a (with a small positive floor so flat data yields a
// uniform tensor).
double hessian_regularization(const SimplicialMesh& mesh, const std::vector<Mat2>& abs_h);

// Matrix intersection of two SPD tensors: the smallest SPD tensor dominating both,
// computed by simultaneous diagonalization.
Mat2 metric_intersection(const Mat2& a, const Mat2& b, int dim);

// Builds the combined adaptation tensor field from the flow state.
MetricField build_monitor(const SweFields& f, const MonitorParams& mp);

// Riemann-sum mesh energy of the deformation between the physical mesh and the
// computational coordinates xi (one per vertex, same connectivity). Returns +infinity
// when some computational element is inverted or degenerate.
double mesh_energy(const SimplicialMesh& phys, const std::vector<Vec2>& xi,
                   const MetricField& metric);

// Analytic gradient of mesh_energy with respect to the computational coordinates.
std::vector<Vec2> mesh_energy_gradient(const SimplicialMesh& phys,
                                       const std::vector<Vec2>& xi,
                                       const MetricField& metric);

// One mesh-movement update over the time span dt: relax the computational coordinates
// from xi_ref down the energy gradient (corners pinned, boundary vertices sliding
// tangentially, periodic partners moving together), then place each vertex by
// evaluating the piecewise-linear correspondence at its reference coordinate. The
// returned mesh shares the input mesh's connectivity; on any failure the input mesh
// is returned unchanged.
MeshPtr move_mesh(const SweFields& f, const std::vector<Vec2>& xi_ref, double dt,
                  const MmpdeParams& prm, MoveStats* stats = nullptr);

}  // namespace mmswe

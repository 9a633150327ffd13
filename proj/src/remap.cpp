// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "mmswe/remap.hpp"

namespace mmswe {

namespace {

// Largest face-normal deformation speed over all faces of a mesh snapshot, with the
// per-vertex displacements xd interpolated linearly along each face.
double max_normal_speed(const SimplicialMesh& mesh, const std::vector<Vec2>& xd) {
  const int dim = mesh.dim();
  double s = 0.0;
  for (size_t fid = 0; fid < mesh.conn->faces.size(); ++fid) {
    const Face& fc = mesh.conn->faces[fid];
    const Vec2 n = mesh.fgeo[fid].normal;
    if (dim == 1) {
      s = std::max(s, std::abs(xd[fc.v[0]].dot(n)));
    } else {
      // The normal component is linear along the edge; extremes sit at the endpoints.
      s = std::max({s, std::abs(xd[fc.v[0]].dot(n)), std::abs(xd[fc.v[1]].dot(n))});
    }
  }
  return s;
}

// One evaluation of the transport operator for all fields on a mesh snapshot:
//   A_j(K) = -sum_faces int phi_j F ds - int_K q xdot . grad(phi_j) dx
// with the local Lax-Friedrichs flux F = -q_int w - (w + alpha)/2 (q_ext - q_int),
// w = xdot.n, alpha = max |w| along the face. vdot accumulates the per-element volume
// rate sum_faces int xdot.n ds from the same quadrature points, so a constant field's
// moment update matches the volume update to round-off.
void assemble(const SimplicialMesh& mesh, const std::vector<Vec2>& xd,
              const std::vector<DGField*>& fields, int degree,
              std::vector<std::vector<double>>& A, std::vector<double>& vdot) {
  const int dim = mesh.dim();
  const Basis& basis = Basis::get(dim, degree);
  const int nb = basis.nb;
  const int nf = static_cast<int>(fields.size());
  const int ne = mesh.n_elems();
  for (int f = 0; f < nf; ++f) A[f].assign(static_cast<size_t>(ne) * nb, 0.0);
  vdot.assign(ne, 0.0);

  // Volume terms.
  const QuadratureRule& vq = volume_rule(dim, 3 * std::max(degree, 1));
  std::vector<double> phi;
  std::vector<Vec2> gref;
  basis.tabulate(vq.pts, phi);
  basis.tabulate_grad(vq.pts, gref);
  for (int e = 0; e < ne; ++e) {
    const ElementGeometry& eg = mesh.egeo[e];
    const Mat2 invET = eg.invE.transpose(dim);
    const auto& ev = mesh.conn->elems[e];
    const Vec2 xd0 = xd[ev[0]], xd1 = xd[ev[1]];
    const Vec2 xd2 = dim == 2 ? xd[ev[2]] : Vec2{0.0, 0.0};
    for (int q = 0; q < vq.size(); ++q) {
      const Vec2 r = vq.pts[q];
      const double l0 = dim == 1 ? 1.0 - r.x : 1.0 - r.x - r.y;
      Vec2 vel = xd0 * l0 + xd1 * r.x;
      if (dim == 2) vel += xd2 * r.y;
      const double wq = vq.w[q] * eg.detE;
      for (int f = 0; f < nf; ++f) {
        double qv = 0.0;
        for (int j = 0; j < nb; ++j) qv += fields[f]->coef(e, j) * phi[q * nb + j];
        const double s = wq * qv;
        double* a = &A[f][static_cast<size_t>(e) * nb];
        for (int j = 0; j < nb; ++j) {
          const Vec2 gj = invET.mul(gref[q * nb + j], dim);
          a[j] -= s * (vel.x * gj.x + vel.y * gj.y);
        }
      }
    }
  }

  // Face terms; a periodic pair is owned by its lower face id.
  const QuadratureRule& fq = face_rule(3 * std::max(degree, 1));
  const int nq = dim == 1 ? 1 : fq.size();
  std::vector<double> phi_i(nb), phi_e(nb), qi(nf), qe(nf), wn(nq);
  std::vector<Vec2> fpts(nq);
  for (int fid = 0; fid < static_cast<int>(mesh.conn->faces.size()); ++fid) {
    const Face& fc = mesh.conn->faces[fid];
    const bool periodic = fc.elem[1] < 0 && fc.periodic_partner >= 0;
    if (periodic && fc.periodic_partner < fid) continue;
    const Vec2 a = mesh.X[fc.v[0]];
    const Vec2 bpt = dim == 1 ? a : mesh.X[fc.v[1]];
    const Vec2 n = mesh.fgeo[fid].normal;
    // Normal deformation speed at each quadrature point and the face dissipation bound.
    double alpha = 0.0;
    for (int q = 0; q < nq; ++q) {
      const double tq = dim == 1 ? 0.0 : fq.pts[q].x;
      fpts[q] = dim == 1 ? a : a + (bpt - a) * tq;
      const Vec2 vel =
          dim == 1 ? xd[fc.v[0]] : xd[fc.v[0]] * (1.0 - tq) + xd[fc.v[1]] * tq;
      wn[q] = vel.dot(n);
      alpha = std::max(alpha, std::abs(wn[q]));
    }
    const int ei = fc.elem[0];
    int ee = fc.elem[1];
    Vec2 shift{0.0, 0.0};
    if (periodic) {
      ee = mesh.conn->faces[fc.periodic_partner].elem[0];
      shift = mesh.fgeo[fc.periodic_partner].midpoint - mesh.fgeo[fid].midpoint;
    }
    for (int q = 0; q < nq; ++q) {
      const double wfac = dim == 1 ? 1.0 : fq.w[q] * mesh.fgeo[fid].measure;
      const Vec2 ri = mesh.to_ref(ei, fpts[q]);
      for (int j = 0; j < nb; ++j) phi_i[j] = basis.value(j, ri);
      if (ee >= 0) {
        const Vec2 re = mesh.to_ref(ee, fpts[q] + shift);
        for (int j = 0; j < nb; ++j) phi_e[j] = basis.value(j, re);
      }
      for (int f = 0; f < nf; ++f) {
        qi[f] = 0.0;
        qe[f] = 0.0;
        for (int j = 0; j < nb; ++j) qi[f] += fields[f]->coef(ei, j) * phi_i[j];
        if (ee >= 0)
          for (int j = 0; j < nb; ++j) qe[f] += fields[f]->coef(ee, j) * phi_e[j];
        else
          qe[f] = qi[f];
      }
      vdot[ei] += wfac * wn[q];
      if (ee >= 0) vdot[ee] -= wfac * wn[q];
      for (int f = 0; f < nf; ++f) {
        const double flux = -qi[f] * wn[q] - 0.5 * (wn[q] + alpha) * (qe[f] - qi[f]);
        double* ai = &A[f][static_cast<size_t>(ei) * nb];
        for (int j = 0; j < nb; ++j) ai[j] -= wfac * phi_i[j] * flux;
        if (ee >= 0) {
          double* ae = &A[f][static_cast<size_t>(ee) * nb];
          for (int j = 0; j < nb; ++j) ae[j] += wfac * phi_e[j] * flux;
        }
      }
    }
  }
}

}  // namespace

RemapStats remap_fields(const std::vector<DGField*>& fields, const std::vector<uint8_t>& pp,
                        const SimplicialMesh& from, const SimplicialMesh& to,
                        double pos_floor) {
  RemapStats stats;
  if (fields.empty()) return stats;
  if (pp.size() != fields.size())
    throw ConfigError("one positivity flag per transferred field is required");
  if (from.conn->uid != to.conn->uid)
    throw ConfigError("field transfer requires meshes sharing one connectivity");
  const int dim = from.dim();
  const int degree = fields[0]->degree;
  const int nb = fields[0]->nb;
  const int ne = from.n_elems();
  for (const DGField* f : fields)
    if (f->degree != degree) throw ConfigError("transferred fields must share a degree");

  const int nv = from.n_vertices();
  std::vector<Vec2> xd(nv);
  bool moved = false;
  for (int i = 0; i < nv; ++i) {
    xd[i] = to.X[i] - from.X[i];
    moved = moved || xd[i].x != 0.0 || xd[i].y != 0.0;
  }
  if (!moved) return stats;

  const double speed = std::max(max_normal_speed(from, xd), max_normal_speed(to, xd));
  double amin = std::numeric_limits<double>::infinity();
  for (const auto& eg : from.egeo) amin = std::min(amin, eg.min_height);
  for (const auto& eg : to.egeo) amin = std::min(amin, eg.min_height);
  int nsteps = 1;
  if (speed > 0.0) {
    const double cp = 1.0 / (2.0 * std::max(degree, 1) + 2.0);
    const double dsig = cp * amin / speed;
    if (dsig < 1.0) nsteps = static_cast<int>(std::ceil(1.0 / dsig - 1e-12));
  }
  if (nsteps > 4096) throw ConfigError("mesh deformation too large to transfer fields");
  stats.steps = nsteps;

  // Stage meshes along the straight-line path; cur holds the start-of-step snapshot.
  auto cur = std::make_shared<SimplicialMesh>(from);
  auto nxt = std::make_shared<SimplicialMesh>(from);
  auto mid = std::make_shared<SimplicialMesh>(from);
  auto blend_to = [&](SimplicialMesh& m, double s) {
    for (int i = 0; i < nv; ++i) m.X[i] = from.X[i] * (1.0 - s) + to.X[i] * s;
    m.update_geometry();
  };

  const int nf = static_cast<int>(fields.size());
  const double dsig = 1.0 / nsteps;
  const double vfac = dim == 1 ? 1.0 : 2.0;  // volume rate to edge-matrix determinant rate
  const SpecialPointSet& sp = special_points(dim, degree);
  std::vector<double> det0(ne), det1(ne), det2(ne), det3(ne), vdot;
  std::vector<std::vector<double>> A(nf), c0(nf);
  for (int e = 0; e < ne; ++e) det0[e] = from.egeo[e].detE;

  auto apply_pp = [&](int stage_unused) {
    (void)stage_unused;
    for (int f = 0; f < nf; ++f) {
      if (!pp[f]) continue;
      PpResult pr = pp_limit(*fields[f], pos_floor, sp);
      stats.pp_modified += pr.modified;
      stats.min_theta = std::min(stats.min_theta, pr.min_theta);
    }
  };

  for (int step = 0; step < nsteps; ++step) {
    const double s1 = static_cast<double>(step + 1) / nsteps;
    const double sh = (static_cast<double>(step) + 0.5) / nsteps;
    blend_to(*nxt, s1);
    blend_to(*mid, sh);
    for (int f = 0; f < nf; ++f) c0[f] = fields[f]->c;

    // Stage 1: evaluate on the step-start mesh.
    assemble(*cur, xd, fields, degree, A, vdot);
    for (int e = 0; e < ne; ++e) {
      det1[e] = det0[e] + dsig * vfac * vdot[e];
      for (int f = 0; f < nf; ++f) {
        double* c = &fields[f]->c[static_cast<size_t>(e) * nb];
        const double* z = &c0[f][static_cast<size_t>(e) * nb];
        const double* a = &A[f][static_cast<size_t>(e) * nb];
        for (int j = 0; j < nb; ++j) c[j] = (det0[e] * z[j] + dsig * a[j]) / det1[e];
      }
    }
    apply_pp(1);

    // Stage 2: evaluate on the step-end mesh.
    assemble(*nxt, xd, fields, degree, A, vdot);
    for (int e = 0; e < ne; ++e) {
      det2[e] = 0.75 * det0[e] + 0.25 * (det1[e] + dsig * vfac * vdot[e]);
      for (int f = 0; f < nf; ++f) {
        double* c = &fields[f]->c[static_cast<size_t>(e) * nb];
        const double* z = &c0[f][static_cast<size_t>(e) * nb];
        const double* a = &A[f][static_cast<size_t>(e) * nb];
        for (int j = 0; j < nb; ++j)
          c[j] = (0.75 * det0[e] * z[j] + 0.25 * (det1[e] * c[j] + dsig * a[j])) / det2[e];
      }
    }
    apply_pp(2);

    // Stage 3: evaluate on the midpoint mesh.
    assemble(*mid, xd, fields, degree, A, vdot);
    const double third = 1.0 / 3.0, two_thirds = 2.0 / 3.0;
    for (int e = 0; e < ne; ++e) {
      det3[e] = third * det0[e] + two_thirds * (det2[e] + dsig * vfac * vdot[e]);
      for (int f = 0; f < nf; ++f) {
        double* c = &fields[f]->c[static_cast<size_t>(e) * nb];
        const double* z = &c0[f][static_cast<size_t>(e) * nb];
        const double* a = &A[f][static_cast<size_t>(e) * nb];
        for (int j = 0; j < nb; ++j)
          c[j] = (third * det0[e] * z[j] + two_thirds * (det2[e] * c[j] + dsig * a[j])) /
                 det3[e];
      }
    }
    apply_pp(3);

    det0 = det3;
    std::swap(cur, nxt);
  }

  for (int e = 0; e < ne; ++e)
    stats.max_volume_err =
        std::max(stats.max_volume_err, std::abs(det0[e] - to.egeo[e].detE) / to.egeo[e].detE);
  return stats;
}

RemapStats remap_flow(SweFields& f, MeshPtr to, double pos_floor) {
  MeshPtr from = f.mesh();
  DGField eta = f.h;
  for (size_t i = 0; i < eta.c.size(); ++i) eta.c[i] += f.b.c[i];
  std::vector<DGField*> fields{&f.h, &f.mx, &f.my, &eta};
  RemapStats stats = remap_fields(fields, {1, 0, 0, 0}, *from, *to, pos_floor);
  if (stats.steps > 0)
    for (size_t i = 0; i < f.b.c.size(); ++i) f.b.c[i] = eta.c[i] - f.h.c[i];
  f.h.mesh = to;
  f.mx.mesh = to;
  f.my.mesh = to;
  f.b.mesh = to;
  return stats;
}

}  // namespace mmswe

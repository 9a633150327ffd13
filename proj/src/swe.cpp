// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "mmswe/swe.hpp"

namespace mmswe {

std::array<double, 3> physical_flux_n(const double* u, const Vec2& n, double gravity,
                                      double dry_tol) {
  const double h = u[0];
  const double vx = safe_vel(h, u[1], dry_tol);
  const double vy = safe_vel(h, u[2], dry_tol);
  const double un = vx * n.x + vy * n.y;
  const double p = 0.5 * gravity * h * h;
  return {h * un, h * vx * un + p * n.x, h * vy * un + p * n.y};
}

std::array<double, 3> wave_speeds_n(const double* u, const Vec2& n, double gravity,
                                    double dry_tol) {
  const double vx = safe_vel(u[0], u[1], dry_tol);
  const double vy = safe_vel(u[0], u[2], dry_tol);
  const double un = vx * n.x + vy * n.y;
  const double c = std::sqrt(gravity * std::max(u[0], 0.0));
  return {un - c, un, un + c};
}

std::array<double, 3> lf_flux(const double* ul, const double* ur, const Vec2& n, double alpha,
                              double gravity, double dry_tol) {
  const auto fl = physical_flux_n(ul, n, gravity, dry_tol);
  const auto fr = physical_flux_n(ur, n, gravity, dry_tol);
  std::array<double, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = 0.5 * ((fl[i] + fr[i]) - alpha * (ur[i] - ul[i]));
  return out;
}

void hydrostatic_reconstruct(const double* u, double b_in, double b_ex, double dry_tol,
                             double* ustar) {
  const double hs = std::max(0.0, u[0] + b_in - std::max(b_in, b_ex));
  ustar[0] = hs;
  ustar[1] = hs * safe_vel(u[0], u[1], dry_tol);
  ustar[2] = hs * safe_vel(u[0], u[2], dry_tol);
}

namespace {

// Trace data at all face quadrature points. A periodic pair is owned by its lower face id
// and contributes a single flux evaluation to both elements so that conservation
// telescopes exactly.
//
// Traces carry the water surface eta = h + b rather than the depth: eta is evaluated from
// per-mode coefficient sums (h_j + b_j), so where the surface is flat the two sides agree
// to an ulp and every still-water face term below is a difference of near-equal numbers
// instead of a cancellation of large ones.
struct FaceBatch {
  int nb = 0;
  std::vector<int> e_int, e_ext;   // e_ext = -1 at a physical boundary
  std::vector<Vec2> normal;        // outward from e_int
  std::vector<double> wmeas;       // quadrature weight times face measure
  std::vector<double> ui, ue;      // (eta, hu, hv) per point
  std::vector<double> bi, be;      // bottom traces
  std::vector<double> phi_i, phi_e;  // nb basis values per point (phi_e junk at boundaries)
  int size() const { return static_cast<int>(e_int.size()); }
};

void eval_trace(const SweFields& f, int e, const Vec2& ref, const Basis& basis, double* u,
                double* b, double* phi) {
  const int nb = f.h.nb;
  u[0] = u[1] = u[2] = 0.0;
  *b = 0.0;
  for (int j = 0; j < nb; ++j) {
    const double v = basis.value(j, ref);
    phi[j] = v;
    u[0] += (f.h.coef(e, j) + f.b.coef(e, j)) * v;
    u[1] += f.mx.coef(e, j) * v;
    u[2] += f.my.coef(e, j) * v;
    *b += f.b.coef(e, j) * v;
  }
}

void build_face_batch(const SweFields& f, const BcSet& bc, double t, FaceBatch& out) {
  const SimplicialMesh& mesh = *f.mesh();
  const MeshConnectivity& conn = *mesh.conn;
  const int dim = mesh.dim();
  const int degree = f.degree();
  const Basis& basis = Basis::get(dim, degree);
  const int nb = f.h.nb;
  out.nb = nb;
  const QuadratureRule& fq = face_rule(3 * std::max(degree, 1));
  const int nq = dim == 1 ? 1 : fq.size();

  const int npts_guess = static_cast<int>(conn.faces.size()) * nq;
  out.e_int.clear();
  out.e_ext.clear();
  out.normal.clear();
  out.wmeas.clear();
  out.ui.clear();
  out.ue.clear();
  out.bi.clear();
  out.be.clear();
  out.phi_i.clear();
  out.phi_e.clear();
  out.e_int.reserve(npts_guess);

  double u_tmp[3], b_tmp;
  std::vector<double> phi_tmp(nb);
  for (int fid = 0; fid < static_cast<int>(conn.faces.size()); ++fid) {
    const Face& fc = conn.faces[fid];
    const bool periodic = fc.elem[1] < 0 && fc.periodic_partner >= 0;
    if (periodic && fc.periodic_partner < fid) continue;  // partner already owns the pair
    const Vec2 a = mesh.X[fc.v[0]];
    const Vec2 bpt = dim == 1 ? a : mesh.X[fc.v[1]];
    for (int q = 0; q < nq; ++q) {
      const double tq = dim == 1 ? 0.0 : fq.pts[q].x;
      const Vec2 p = dim == 1 ? a : a + (bpt - a) * tq;
      const double w = dim == 1 ? 1.0 : fq.w[q] * mesh.fgeo[fid].measure;
      out.e_int.push_back(fc.elem[0]);
      out.normal.push_back(mesh.fgeo[fid].normal);
      out.wmeas.push_back(w);
      // Interior trace.
      eval_trace(f, fc.elem[0], mesh.to_ref(fc.elem[0], p), basis, u_tmp, &b_tmp,
                 phi_tmp.data());
      for (int i = 0; i < 3; ++i) out.ui.push_back(u_tmp[i]);
      out.bi.push_back(b_tmp);
      out.phi_i.insert(out.phi_i.end(), phi_tmp.begin(), phi_tmp.end());
      // Exterior trace.
      if (fc.elem[1] >= 0) {
        out.e_ext.push_back(fc.elem[1]);
        eval_trace(f, fc.elem[1], mesh.to_ref(fc.elem[1], p), basis, u_tmp, &b_tmp,
                   phi_tmp.data());
        for (int i = 0; i < 3; ++i) out.ue.push_back(u_tmp[i]);
        out.be.push_back(b_tmp);
        out.phi_e.insert(out.phi_e.end(), phi_tmp.begin(), phi_tmp.end());
        continue;
      }
      if (periodic) {
        const int g = fc.periodic_partner;
        const int eg = conn.faces[g].elem[0];
        const Vec2 shift = mesh.fgeo[g].midpoint - mesh.fgeo[fid].midpoint;
        out.e_ext.push_back(eg);
        eval_trace(f, eg, mesh.to_ref(eg, p + shift), basis, u_tmp, &b_tmp, phi_tmp.data());
        for (int i = 0; i < 3; ++i) out.ue.push_back(u_tmp[i]);
        out.be.push_back(b_tmp);
        out.phi_e.insert(out.phi_e.end(), phi_tmp.begin(), phi_tmp.end());
        continue;
      }
      // Physical boundary: ghost state from the side's condition.
      out.e_ext.push_back(-1);
      const int npt = out.size() - 1;
      const double* uin = &out.ui[3 * npt];
      const double bin = out.bi[npt];
      const Vec2 n = out.normal[npt];
      double ug[3] = {uin[0], uin[1], uin[2]};  // (eta, hu, hv)
      double bg = bin;
      if (fc.side < 0) throw StructureError("physical boundary face without a side tag");
      const BoundaryCondition& cond = bc[fc.side];
      switch (cond.type) {
        case BcType::kTransmissive: {
          // Ghost = interior cell means rather than the high-order trace. For
          // constant in-cell data (in particular any flat-surface rest state,
          // where the mean surface is the same per-mode sum as the trace) the
          // two are bitwise identical, so the balanced flux stays exact. For
          // non-constant data the mean/trace mismatch activates the interface
          // dissipation, damping the otherwise undamped uniform through-flow
          // mode that open boundaries admit; a trace-copy ghost produces a
          // zero jump, leaves that mode neutral, and lets round-off in the
          // initial data pump a secular surface drift.
          const int e0 = fc.elem[0];
          const double p0 = basis.const_mode();
          ug[0] = (f.h.coef(e0, 0) + f.b.coef(e0, 0)) * p0;
          ug[1] = f.mx.coef(e0, 0) * p0;
          ug[2] = f.my.coef(e0, 0) * p0;
          bg = f.b.coef(e0, 0) * p0;
          break;
        }
        case BcType::kReflective: {
          const double mn = uin[1] * n.x + uin[2] * n.y;
          ug[1] = uin[1] - 2.0 * mn * n.x;
          ug[2] = uin[2] - 2.0 * mn * n.y;
          break;
        }
        case BcType::kInflow: {
          if (!cond.inflow) throw ConfigError("inflow boundary without a state function");
          const auto st = cond.inflow(p, t);  // prescribed (h, hu, hv)
          ug[0] = st[0] + bg;
          ug[1] = st[1];
          ug[2] = st[2];
          break;
        }
        case BcType::kPeriodic:
          throw ConfigError("periodic side without paired faces; pair the mesh first");
      }
      for (int i = 0; i < 3; ++i) out.ue.push_back(ug[i]);
      out.be.push_back(bg);
      for (int j = 0; j < nb; ++j) out.phi_e.push_back(0.0);
    }
  }
}

double batch_max_speed(const FaceBatch& fb, const SweParams& prm) {
  double s = 0.0;
  for (int p = 0; p < fb.size(); ++p) {
    const Vec2 n = fb.normal[p];
    const double b[2] = {fb.bi[p], fb.be[p]};
    const double* tr[2] = {&fb.ui[3 * p], &fb.ue[3 * p]};
    for (int side = 0; side < 2; ++side) {
      const double u[3] = {tr[side][0] - b[side], tr[side][1], tr[side][2]};
      const auto ws = wave_speeds_n(u, n, prm.gravity, prm.dry_tol);
      s = std::max({s, std::abs(ws[0]), std::abs(ws[2])});
    }
  }
  return s;
}

}  // namespace

ResidualOut swe_residual(const SweFields& f, const SweParams& prm, const BcSet& bc, double t,
                         std::vector<double>& dh, std::vector<double>& dmx,
                         std::vector<double>& dmy) {
  const SimplicialMesh& mesh = *f.mesh();
  const int dim = mesh.dim();
  const int degree = f.degree();
  const Basis& basis = Basis::get(dim, degree);
  const int nb = f.h.nb;
  const double g = prm.gravity;
  dh.assign(f.h.c.size(), 0.0);
  dmx.assign(f.h.c.size(), 0.0);
  dmy.assign(f.h.c.size(), 0.0);

  // Volume terms in surface-gradient form: the pressure gradient and the bottom-slope
  // source combine, via integration by parts inside the element, into a single
  // -g h grad(eta) phi source plus a surface-pressure boundary term that is folded into
  // the face loop below. The discrete result is identical (the quadrature is exact for
  // every integrand involved), but the still-water state now evaluates through the
  // gradient of eta = h + b, which is a sum of per-mode coefficient sums and vanishes to
  // round-off, instead of through two large terms that must cancel.
  const QuadratureRule& vq = volume_rule(dim, 3 * std::max(degree, 1));
  std::vector<double> phi;
  std::vector<Vec2> gref;
  basis.tabulate(vq.pts, phi);
  basis.tabulate_grad(vq.pts, gref);
  std::vector<double> esum(nb);
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const ElementGeometry& eg = mesh.egeo[e];
    const Mat2 invET = eg.invE.transpose(dim);
    double* rh = &dh[static_cast<size_t>(e) * nb];
    double* rmx = &dmx[static_cast<size_t>(e) * nb];
    double* rmy = &dmy[static_cast<size_t>(e) * nb];
    for (int j = 0; j < nb; ++j) esum[j] = f.h.coef(e, j) + f.b.coef(e, j);
    for (int q = 0; q < vq.size(); ++q) {
      double h = 0.0, mx = 0.0, my = 0.0;
      Vec2 ge{0.0, 0.0};
      for (int j = 0; j < nb; ++j) {
        const double v = phi[q * nb + j];
        h += f.h.coef(e, j) * v;
        mx += f.mx.coef(e, j) * v;
        my += f.my.coef(e, j) * v;
        ge += gref[q * nb + j] * esum[j];
      }
      const Vec2 grad_eta = invET.mul(ge, dim);
      const double vx = safe_vel(h, mx, prm.dry_tol);
      const double vy = safe_vel(h, my, prm.dry_tol);
      const double fx[3] = {h * vx, h * vx * vx, h * vy * vx};
      const double fy[3] = {h * vy, h * vx * vy, h * vy * vy};
      const double sx = -g * h * grad_eta.x;
      const double sy = -g * h * grad_eta.y;
      const double wq = vq.w[q] * eg.detE;
      for (int j = 0; j < nb; ++j) {
        const Vec2 gj = invET.mul(gref[q * nb + j], dim);
        const double v = phi[q * nb + j];
        rh[j] += wq * (fx[0] * gj.x + fy[0] * gj.y);
        rmx[j] += wq * (fx[1] * gj.x + fy[1] * gj.y + sx * v);
        rmy[j] += wq * (fx[2] * gj.x + fy[2] * gj.y + sy * v);
      }
    }
  }

  // Face terms. Depths are reconstructed against the higher bottom trace,
  // h^* = max(0, eta - max(b_int, b_ext)), the numerical flux is a global
  // Lax-Friedrichs flux of the reconstructed states, and each side adds back the
  // hydrostatic correction g/2 (h^2 - h*^2) n. Folding in the surface-pressure boundary
  // term g/2 h^2 n from the volume integration by parts, the per-side momentum
  // contribution reduces algebraically to
  //     interior:  D n - A + d,     exterior:  D n + A - d,
  // with D = g/4 (h*_int^2 - h*_ext^2) the pressure imbalance, A the average advective
  // flux, and d the momentum dissipation. Every piece is a difference of traces, so a
  // flat surface with zero momentum yields face terms at round-off level rather than a
  // cancellation of O(g h^2) quantities.
  FaceBatch fb;
  build_face_batch(f, bc, t, fb);
  ResidualOut out;
  out.max_speed = batch_max_speed(fb, prm);
  const double alpha = out.max_speed;
  for (int p = 0; p < fb.size(); ++p) {
    const double* ui = &fb.ui[3 * p];
    const double* ue = &fb.ue[3 * p];
    const double etai = ui[0], etae = ue[0];
    const double bint = fb.bi[p], bext = fb.be[p];
    const Vec2 n = fb.normal[p];
    const double bmax = std::max(bint, bext);
    const double hsi = std::max(0.0, etai - bmax);
    const double hse = std::max(0.0, etae - bmax);
    // Surface jump: when neither depth clips, (eta - bmax) differences telescope to a
    // single subtraction of the two (nearly equal) surface traces.
    const double jump = (hsi > 0.0 && hse > 0.0) ? etae - etai : hse - hsi;
    const double vxi = safe_vel(etai - bint, ui[1], prm.dry_tol);
    const double vyi = safe_vel(etai - bint, ui[2], prm.dry_tol);
    const double vxe = safe_vel(etae - bext, ue[1], prm.dry_tol);
    const double vye = safe_vel(etae - bext, ue[2], prm.dry_tol);
    const double uni = vxi * n.x + vyi * n.y;
    const double une = vxe * n.x + vye * n.y;
    const double msxi = hsi * vxi, msyi = hsi * vyi;
    const double msxe = hse * vxe, msye = hse * vye;
    const double fh = 0.5 * ((hsi * uni + hse * une) - alpha * jump);
    const double dpr = -0.25 * g * jump * (hsi + hse);
    const double ax = 0.5 * (msxi * uni + msxe * une);
    const double ay = 0.5 * (msyi * uni + msye * une);
    const double ddx = 0.5 * alpha * (msxe - msxi);
    const double ddy = 0.5 * alpha * (msye - msyi);
    const double w = fb.wmeas[p];
    const int ei = fb.e_int[p];
    const double gi[2] = {dpr * n.x - ax + ddx, dpr * n.y - ay + ddy};
    double* rh = &dh[static_cast<size_t>(ei) * nb];
    double* rmx = &dmx[static_cast<size_t>(ei) * nb];
    double* rmy = &dmy[static_cast<size_t>(ei) * nb];
    for (int j = 0; j < nb; ++j) {
      const double v = w * fb.phi_i[static_cast<size_t>(p) * nb + j];
      rh[j] -= v * fh;
      rmx[j] += v * gi[0];
      rmy[j] += v * gi[1];
    }
    const int ee = fb.e_ext[p];
    if (ee >= 0) {
      const double gex[2] = {dpr * n.x + ax - ddx, dpr * n.y + ay - ddy};
      double* sh = &dh[static_cast<size_t>(ee) * nb];
      double* smx = &dmx[static_cast<size_t>(ee) * nb];
      double* smy = &dmy[static_cast<size_t>(ee) * nb];
      for (int j = 0; j < nb; ++j) {
        const double v = w * fb.phi_e[static_cast<size_t>(p) * nb + j];
        sh[j] += v * fh;
        smx[j] += v * gex[0];
        smy[j] += v * gex[1];
      }
    } else {
      out.boundary_mass_rate += w * fh;
    }
  }

  // The reference mass matrix is the identity, so the physical one is detE times it.
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double inv = 1.0 / mesh.egeo[e].detE;
    for (int j = 0; j < nb; ++j) {
      dh[static_cast<size_t>(e) * nb + j] *= inv;
      dmx[static_cast<size_t>(e) * nb + j] *= inv;
      dmy[static_cast<size_t>(e) * nb + j] *= inv;
    }
  }
  return out;
}

double min_cell_height(const SimplicialMesh& mesh) {
  double a = std::numeric_limits<double>::infinity();
  for (const auto& eg : mesh.egeo) a = std::min(a, eg.min_height);
  return a;
}

double max_wave_speed(const SweFields& f, const SweParams& prm, const BcSet& bc, double t) {
  FaceBatch fb;
  build_face_batch(f, bc, t, fb);
  return batch_max_speed(fb, prm);
}

double compute_dt(const SweFields& f, const SweParams& prm, const BcSet& bc, double t) {
  const double a = min_cell_height(*f.mesh());
  const double s = std::max(max_wave_speed(f, prm, bc, t), 1e-12);
  bool dry = false;
  for (int e = 0; e < f.mesh()->n_elems() && !dry; ++e)
    if (f.h.cell_avg(e) < prm.dry_cell_avg) dry = true;
  return (dry ? prm.cfl_dry : prm.cfl) * a / s;
}

void limit_cascade(SweFields& f, const SweParams& prm, const BcSet& bc, double t,
                   StepStats* stats) {
  const SimplicialMesh& mesh = *f.mesh();
  const int dim = mesh.dim();
  const int nb = f.h.nb;
  const double g = prm.gravity;

  if (f.degree() >= 1) {
    // Slope-limit the water surface (not the depth) together with the momenta.
    DGField eta = f.h;
    for (size_t i = 0; i < eta.c.size(); ++i) eta.c[i] += f.b.c[i];
    CharMatrixFn char_fn = [&](int e, const Vec2& n, double* L, double* R) {
      const double hb = f.h.cell_avg(e);
      if (hb <= prm.dry_tol) return false;
      const double u = f.mx.cell_avg(e) / hb;
      const double v = f.my.cell_avg(e) / hb;
      const double c = std::sqrt(g * hb);
      const double un = u * n.x + v * n.y;
      const double ut = v * n.x - u * n.y;
      const double r[9] = {1.0, 0.0,  1.0,  u - c * n.x, -n.y, u + c * n.x,
                           v - c * n.y, n.x, v + c * n.y};
      const double l[9] = {(un + c) / (2 * c), -n.x / (2 * c), -n.y / (2 * c),
                           -ut,                -n.y,           n.x,
                           (c - un) / (2 * c), n.x / (2 * c),  n.y / (2 * c)};
      std::memcpy(R, r, sizeof(r));
      std::memcpy(L, l, sizeof(l));
      return true;
    };
    GhostAvgFn ghost = [&](int face, const double* uin, double* ug) {
      const Face& fc = mesh.conn->faces[face];
      if (fc.periodic_partner >= 0) {
        const int eg = mesh.conn->faces[fc.periodic_partner].elem[0];
        ug[0] = f.h.cell_avg(eg) + f.b.cell_avg(eg);
        ug[1] = f.mx.cell_avg(eg);
        ug[2] = f.my.cell_avg(eg);
        const Vec2 shift = mesh.fgeo[face].midpoint - mesh.fgeo[fc.periodic_partner].midpoint;
        return mesh.egeo[eg].centroid + shift;
      }
      const Vec2 n = mesh.fgeo[face].normal;
      const Vec2 b0 = mesh.egeo[fc.elem[0]].centroid;
      const Vec2 mid = mesh.fgeo[face].midpoint;
      const Vec2 gc = b0 + n * (2.0 * (mid - b0).dot(n));
      ug[0] = uin[0];
      ug[1] = uin[1];
      ug[2] = uin[2];
      const BoundaryCondition& cond = bc[fc.side];
      if (cond.type == BcType::kReflective) {
        const double mn = uin[1] * n.x + uin[2] * n.y;
        ug[1] = uin[1] - 2.0 * mn * n.x;
        ug[2] = uin[2] - 2.0 * mn * n.y;
      } else if (cond.type == BcType::kInflow && cond.inflow) {
        const auto st = cond.inflow(mid, t);
        ug[0] = st[0] + f.b.cell_avg(fc.elem[0]);
        ug[1] = st[1];
        ug[2] = st[2];
      }
      return gc;
    };
    TvbResult tr = tvb_limit({&eta, &f.mx, &f.my}, prm.m_tvb, char_fn, ghost);
    // Rebuild the depth from the limited surface only where the limiter fired, so
    // untouched cells keep their coefficients bit for bit.
    for (int e = 0; e < mesh.n_elems(); ++e) {
      if (!tr.flags[e]) continue;
      for (int j = 0; j < nb; ++j) f.h.coef(e, j) = eta.coef(e, j) - f.b.coef(e, j);
    }
    if (stats) {
      stats->tvb_flagged += tr.flagged;
      stats->char_fallbacks += tr.char_fallbacks;
    }
  }

  // Positivity of the depth; the bottom absorbs the change so the surface is untouched.
  const SpecialPointSet& sp = special_points(dim, f.degree());
  std::vector<double> hpre = f.h.c;
  PpResult pr = pp_limit(f.h, prm.pos_floor, sp);
  if (pr.modified > 0)
    for (size_t i = 0; i < f.b.c.size(); ++i) f.b.c[i] += hpre[i] - f.h.c[i];
  if (stats) {
    stats->pp_modified += pr.modified;
    stats->min_theta = std::min(stats->min_theta, pr.min_theta);
    stats->min_depth_seen = std::min(stats->min_depth_seen, pr.min_before);
  }

  // Dry cells carry no momentum.
  for (int e = 0; e < mesh.n_elems(); ++e) {
    if (f.h.cell_avg(e) >= prm.dry_tol) continue;
    for (int j = 0; j < nb; ++j) {
      f.mx.coef(e, j) = 0.0;
      f.my.coef(e, j) = 0.0;
    }
  }
}

StepStats ssp_rk3_step(SweFields& f, double dt, const SweParams& prm, const BcSet& bc,
                       double t) {
  StepStats st;
  st.min_depth_seen = std::numeric_limits<double>::infinity();
  const size_t n = f.h.c.size();
  std::vector<double> dh, dmx, dmy;
  const std::vector<double> h0 = f.h.c, mx0 = f.mx.c, my0 = f.my.c;
  std::vector<double> ih(n, 0.0), imx(n, 0.0), imy(n, 0.0);

  // Shu-Osher stages in incremental form,
  //   inc <- fac * (inc + dt L(u)),   u <- u0 + inc,
  // with fac = 1, 1/4, 2/3, which reproduces the usual convex combinations exactly but
  // rounds each coefficient once per stage. A state with a zero residual is then a
  // bitwise fixed point of the whole step. After limiting, the increment is refreshed
  // from the state so limiter changes are absorbed (the subtraction is exact whenever
  // the increment is small against the state).
  auto stage = [&](double fac, double stage_t, double limit_t, double flux_w) {
    const ResidualOut r = swe_residual(f, prm, bc, stage_t, dh, dmx, dmy);
    for (size_t i = 0; i < n; ++i) {
      ih[i] = fac * (ih[i] + dt * dh[i]);
      imx[i] = fac * (imx[i] + dt * dmx[i]);
      imy[i] = fac * (imy[i] + dt * dmy[i]);
      f.h.c[i] = h0[i] + ih[i];
      f.mx.c[i] = mx0[i] + imx[i];
      f.my.c[i] = my0[i] + imy[i];
    }
    limit_cascade(f, prm, bc, limit_t, &st);
    for (size_t i = 0; i < n; ++i) {
      ih[i] = f.h.c[i] - h0[i];
      imx[i] = f.mx.c[i] - mx0[i];
      imy[i] = f.my.c[i] - my0[i];
    }
    st.boundary_mass_flux += flux_w * dt * r.boundary_mass_rate;
    st.max_speed = std::max(st.max_speed, r.max_speed);
  };
  stage(1.0, t, t + dt, 1.0 / 6.0);
  stage(0.25, t + dt, t + 0.5 * dt, 1.0 / 6.0);
  stage(2.0 / 3.0, t + 0.5 * dt, t + dt, 2.0 / 3.0);
  return st;
}

}  // namespace mmswe

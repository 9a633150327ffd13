// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "mmswe/dg.hpp"

namespace mmswe {

namespace {

constexpr double kFlagTol = 1e-12;

double minmod(double a, double b, double c) {
  if (a > 0 && b > 0 && c > 0) return std::min({a, b, c});
  if (a < 0 && b < 0 && c < 0) return std::max({a, b, c});
  return 0.0;
}

double minmod2(double a, double b) {
  if (a > 0 && b > 0) return std::min(a, b);
  if (a < 0 && b < 0) return std::max(a, b);
  return 0.0;
}

// Apply row-major nv x nv matrix.
void apply_mat(const double* M, const double* x, double* y, int nv) {
  for (int i = 0; i < nv; ++i) {
    double s = 0.0;
    for (int j = 0; j < nv; ++j) s += M[i * nv + j] * x[j];
    y[i] = s;
  }
}

struct NeighborAvg {
  bool valid = false;
  Vec2 centroid;
  double avg[3] = {0, 0, 0};
};

NeighborAvg neighbor_avg(const std::vector<DGField*>& fields, const SimplicialMesh& mesh,
                         int e, int lf, const GhostAvgFn& ghost_fn) {
  const int nv = static_cast<int>(fields.size());
  NeighborAvg out;
  const int fid = mesh.conn->elem_faces[e][lf];
  const Face& f = mesh.conn->faces[fid];
  const int nbr = (f.elem[0] == e) ? f.elem[1] : f.elem[0];
  if (nbr >= 0) {
    out.valid = true;
    out.centroid = mesh.egeo[nbr].centroid;
    for (int v = 0; v < nv; ++v) out.avg[v] = fields[v]->cell_avg(nbr);
    return out;
  }
  double ui[3];
  for (int v = 0; v < nv; ++v) ui[v] = fields[v]->cell_avg(e);
  if (ghost_fn) {
    out.valid = true;
    out.centroid = ghost_fn(fid, ui, out.avg);
    return out;
  }
  // Default ghost: copy interior averages, mirror the centroid across the face.
  out.valid = true;
  const Vec2 mid = mesh.fgeo[fid].midpoint;
  const Vec2 n = mesh.fgeo[fid].normal;
  const Vec2 b0 = mesh.egeo[e].centroid;
  const double dist = (mid - b0).dot(n);
  out.centroid = b0 + n * (2.0 * dist);
  for (int v = 0; v < nv; ++v) out.avg[v] = ui[v];
  return out;
}

TvbResult tvb_limit_1d(std::vector<DGField*>& fields, double m_tvb, const CharMatrixFn& char_fn,
                       const GhostAvgFn& ghost_fn) {
  TvbResult res;
  const int nv = static_cast<int>(fields.size());
  const SimplicialMesh& mesh = *fields[0]->mesh;
  const Basis& basis = Basis::get(1, fields[0]->degree);
  const int nb = fields[0]->nb;
  // Endpoint values of each basis function and the linear mode's endpoint deviation.
  std::vector<double> phiL(nb), phiR(nb);
  for (int j = 0; j < nb; ++j) {
    phiL[j] = basis.value(j, {0.0, 0.0});
    phiR[j] = basis.value(j, {1.0, 0.0});
  }
  std::vector<std::vector<double>> newc(nv);
  res.flags.assign(mesh.n_elems(), 0);
  for (int v = 0; v < nv; ++v) newc[v].assign(fields[v]->c.size(), 0.0);

  double L[9], R[9];
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const double h = mesh.egeo[e].volume;
    const double thresh = m_tvb * h * h;
    double ubar[3], devR[3], devL[3], dfwd[3], dbwd[3], lin[3];
    for (int v = 0; v < nv; ++v) {
      const DGField& f = *fields[v];
      ubar[v] = f.cell_avg(e);
      double uL = 0.0, uR = 0.0;
      for (int j = 0; j < nb; ++j) {
        uL += f.coef(e, j) * phiL[j];
        uR += f.coef(e, j) * phiR[j];
      }
      devR[v] = uR - ubar[v];
      devL[v] = ubar[v] - uL;
      lin[v] = f.coef(e, 1) * phiR[1];  // right-endpoint deviation of the linear mode
    }
    const NeighborAvg left = neighbor_avg(fields, mesh, e, 0, ghost_fn);
    const NeighborAvg right = neighbor_avg(fields, mesh, e, 1, ghost_fn);
    for (int v = 0; v < nv; ++v) {
      dfwd[v] = right.avg[v] - ubar[v];
      dbwd[v] = ubar[v] - left.avg[v];
    }
    bool use_char = false;
    if (char_fn) {
      use_char = char_fn(e, {1.0, 0.0}, L, R);
      if (!use_char) ++res.char_fallbacks;
    }
    double wR[3], wL[3], wf[3], wb[3], wlin[3];
    if (use_char) {
      apply_mat(L, devR, wR, nv);
      apply_mat(L, devL, wL, nv);
      apply_mat(L, dfwd, wf, nv);
      apply_mat(L, dbwd, wb, nv);
      apply_mat(L, lin, wlin, nv);
    } else {
      std::memcpy(wR, devR, sizeof(double) * nv);
      std::memcpy(wL, devL, sizeof(double) * nv);
      std::memcpy(wf, dfwd, sizeof(double) * nv);
      std::memcpy(wb, dbwd, sizeof(double) * nv);
      std::memcpy(wlin, lin, sizeof(double) * nv);
    }
    bool flagged = false;
    double wlim[3];
    for (int v = 0; v < nv; ++v) {
      const double mR =
          std::abs(wR[v]) <= thresh ? wR[v] : minmod(wR[v], wb[v], wf[v]);
      const double mL =
          std::abs(wL[v]) <= thresh ? wL[v] : minmod(wL[v], wb[v], wf[v]);
      if (std::abs(mR - wR[v]) > kFlagTol * (1.0 + std::abs(wR[v])) ||
          std::abs(mL - wL[v]) > kFlagTol * (1.0 + std::abs(wL[v])))
        flagged = true;
      wlim[v] = std::abs(wlin[v]) <= thresh ? wlin[v] : minmod(wlin[v], wb[v], wf[v]);
    }
    res.flags[e] = flagged ? 1 : 0;
    if (!flagged) continue;
    ++res.flagged;
    // Replace with the limited linear reconstruction (higher modes dropped).
    double dev[3];
    if (use_char)
      apply_mat(R, wlim, dev, nv);
    else
      std::memcpy(dev, wlim, sizeof(double) * nv);
    for (int v = 0; v < nv; ++v) {
      double* out = newc[v].data() + static_cast<size_t>(e) * nb;
      out[0] = fields[v]->coef(e, 0);
      out[1] = dev[v] / phiR[1];
    }
  }
  for (int e = 0; e < mesh.n_elems(); ++e) {
    if (!res.flags[e]) continue;
    for (int v = 0; v < nv; ++v)
      for (int j = 0; j < nb; ++j) fields[v]->coef(e, j) = newc[v][static_cast<size_t>(e) * nb + j];
  }
  return res;
}

TvbResult tvb_limit_2d(std::vector<DGField*>& fields, double m_tvb, const CharMatrixFn& char_fn,
                       const GhostAvgFn& ghost_fn) {
  TvbResult res;
  const int nv = static_cast<int>(fields.size());
  const SimplicialMesh& mesh = *fields[0]->mesh;
  const int degree = fields[0]->degree;
  const Basis& basis = Basis::get(2, degree);
  const int nb = fields[0]->nb;
  const double nu = 1.5;  // expansion factor on the geometric average difference

  // Reference-edge midpoints, indexed like local faces (midpoint of edge opposite vtx i).
  const Vec2 ref_mid[3] = {{0.5, 0.5}, {0.0, 0.5}, {0.5, 0.0}};
  std::vector<double> phi_mid;
  basis.tabulate({ref_mid[0], ref_mid[1], ref_mid[2]}, phi_mid);
  // Projection of a linear function from its edge-midpoint values: psi_i = 1 - 2*lambda_i.
  const QuadratureRule& vq = volume_rule(2, 2 * std::max(degree, 1));
  std::vector<double> phi_vq;
  basis.tabulate(vq.pts, phi_vq);

  std::vector<std::vector<double>> newc(nv);
  res.flags.assign(mesh.n_elems(), 0);
  for (int v = 0; v < nv; ++v) newc[v].assign(fields[v]->c.size(), 0.0);

  double L[9], R[9];
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const Vec2 b0 = mesh.egeo[e].centroid;
    const double thresh = m_tvb * mesh.egeo[e].diameter * mesh.egeo[e].diameter;
    double ubar[3];
    for (int v = 0; v < nv; ++v) ubar[v] = fields[v]->cell_avg(e);
    NeighborAvg nbs[3];
    for (int lf = 0; lf < 3; ++lf) nbs[lf] = neighbor_avg(fields, mesh, e, lf, ghost_fn);

    bool flagged = false;
    double delta[3][3];  // [edge][var] limited midpoint deviations
    for (int lf = 0; lf < 3; ++lf) {
      const Vec2 mid = mesh.to_phys(e, ref_mid[lf]);
      // Nonnegative expansion m - b0 = a1*(bi - b0) + a2*(bj - b0) over a neighbor pair.
      double a1 = 0.0, a2 = 0.0;
      int i1 = -1, i2 = -1;
      const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
      for (const auto& pr : pairs) {
        const Vec2 d1 = nbs[pr[0]].centroid - b0;
        const Vec2 d2 = nbs[pr[1]].centroid - b0;
        const double det = d1.x * d2.y - d1.y * d2.x;
        if (std::abs(det) < 1e-300) continue;
        const Vec2 rhs = mid - b0;
        const double c1 = (rhs.x * d2.y - rhs.y * d2.x) / det;
        const double c2 = (d1.x * rhs.y - d1.y * rhs.x) / det;
        if (c1 >= -1e-12 && c2 >= -1e-12) {
          a1 = std::max(c1, 0.0);
          a2 = std::max(c2, 0.0);
          i1 = pr[0];
          i2 = pr[1];
          break;
        }
      }
      double dev[3], davg[3];
      for (int v = 0; v < nv; ++v) {
        double um = 0.0;
        for (int j = 0; j < nb; ++j) um += fields[v]->coef(e, j) * phi_mid[lf * nb + j];
        dev[v] = um - ubar[v];
        davg[v] = (i1 >= 0) ? a1 * (nbs[i1].avg[v] - ubar[v]) + a2 * (nbs[i2].avg[v] - ubar[v])
                            : 0.0;
      }
      Vec2 dir = mid - b0;
      const double dn = dir.norm();
      if (dn > 0) dir = dir * (1.0 / dn);
      bool use_char = false;
      if (char_fn) {
        use_char = char_fn(e, dir, L, R);
        if (!use_char) ++res.char_fallbacks;
      }
      double wdev[3], wavg[3], wlim[3];
      if (use_char) {
        apply_mat(L, dev, wdev, nv);
        apply_mat(L, davg, wavg, nv);
      } else {
        std::memcpy(wdev, dev, sizeof(double) * nv);
        std::memcpy(wavg, davg, sizeof(double) * nv);
      }
      for (int v = 0; v < nv; ++v) {
        wlim[v] = std::abs(wdev[v]) <= thresh ? wdev[v] : minmod2(wdev[v], nu * wavg[v]);
        if (std::abs(wlim[v] - wdev[v]) > kFlagTol * (1.0 + std::abs(wdev[v]))) flagged = true;
      }
      if (use_char)
        apply_mat(R, wlim, delta[lf], nv);
      else
        std::memcpy(delta[lf], wlim, sizeof(double) * nv);
    }
    res.flags[e] = flagged ? 1 : 0;
    if (!flagged) continue;
    ++res.flagged;
    // Enforce a zero-sum correction so the average is untouched, then rebuild the linear
    // polynomial from its midpoint values via psi_i = 1 - 2 lambda_i.
    for (int v = 0; v < nv; ++v) {
      double pos = 0.0, neg = 0.0;
      for (int lf = 0; lf < 3; ++lf) {
        pos += std::max(delta[lf][v], 0.0);
        neg += std::max(-delta[lf][v], 0.0);
      }
      double dhat[3];
      if (pos > 0.0 && neg > 0.0) {
        const double tp = std::min(1.0, neg / pos);
        const double tn = std::min(1.0, pos / neg);
        for (int lf = 0; lf < 3; ++lf)
          dhat[lf] = tp * std::max(delta[lf][v], 0.0) - tn * std::max(-delta[lf][v], 0.0);
      } else {
        for (int lf = 0; lf < 3; ++lf) dhat[lf] = 0.0;
      }
      double* out = newc[v].data() + static_cast<size_t>(e) * nb;
      for (int k = 0; k < vq.size(); ++k) {
        const double lam[3] = {1.0 - vq.pts[k].x - vq.pts[k].y, vq.pts[k].x, vq.pts[k].y};
        double uval = ubar[v];
        for (int lf = 0; lf < 3; ++lf) uval += dhat[lf] * (1.0 - 2.0 * lam[lf]);
        const double wq = uval * vq.w[k];
        for (int j = 0; j < nb; ++j) out[j] += wq * phi_vq[k * nb + j];
      }
    }
  }
  for (int e = 0; e < mesh.n_elems(); ++e) {
    if (!res.flags[e]) continue;
    for (int v = 0; v < nv; ++v)
      for (int j = 0; j < nb; ++j) fields[v]->coef(e, j) = newc[v][static_cast<size_t>(e) * nb + j];
  }
  return res;
}

}  // namespace

TvbResult tvb_limit(std::vector<DGField*> fields, double m_tvb, const CharMatrixFn& char_fn,
                    const GhostAvgFn& ghost_fn) {
  if (fields.empty() || fields.size() > 3) throw ConfigError("tvb_limit takes 1..3 fields");
  for (auto* f : fields)
    if (f->mesh != fields[0]->mesh || f->degree != fields[0]->degree)
      throw ConfigError("tvb_limit fields must share mesh and degree");
  if (fields[0]->degree < 1) {
    TvbResult r;
    r.flags.assign(fields[0]->mesh->n_elems(), 0);
    return r;
  }
  if (fields[0]->mesh->dim() == 1) return tvb_limit_1d(fields, m_tvb, char_fn, ghost_fn);
  return tvb_limit_2d(fields, m_tvb, char_fn, ghost_fn);
}

PpResult pp_limit(DGField& f, double floor_value, const SpecialPointSet& sp) {
  PpResult res;
  const Basis& basis = Basis::get(f.mesh->dim(), f.degree);
  std::vector<double> phi;
  basis.tabulate(sp.pts, phi);
  const int nb = f.nb;
  res.min_before = std::numeric_limits<double>::infinity();
  for (int e = 0; e < f.mesh->n_elems(); ++e) {
    const double avg = f.cell_avg(e);
    double mn = std::numeric_limits<double>::infinity();
    for (size_t q = 0; q < sp.pts.size(); ++q) {
      double val = 0.0;
      for (int j = 0; j < nb; ++j) val += f.coef(e, j) * phi[q * nb + j];
      mn = std::min(mn, val);
    }
    res.min_before = std::min(res.min_before, mn);
    if (mn >= floor_value) continue;
    if (avg < floor_value - 1e-13)
      throw PositivityError("cell average " + std::to_string(avg) + " below floor in element " +
                            std::to_string(e));
    double theta = 0.0;
    if (avg - mn > 0.0) theta = std::min(1.0, (avg - floor_value) / (avg - mn));
    theta = std::max(theta, 0.0);
    for (int j = 1; j < nb; ++j) f.coef(e, j) *= theta;
    ++res.modified;
    res.min_theta = std::min(res.min_theta, theta);
  }
  return res;
}

}  // namespace mmswe

// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include "mmswe/mmpde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmswe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct EigSym {
  double lam[2];
  Vec2 vec[2];
};

// Closed-form eigendecomposition of a symmetric matrix (upper-left dim block).
EigSym eig_sym(const Mat2& m, int dim) {
  EigSym r;
  if (dim == 1) {
    r.lam[0] = m(0, 0);
    r.lam[1] = 0.0;
    r.vec[0] = {1.0, 0.0};
    r.vec[1] = {0.0, 1.0};
    return r;
  }
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
  const double mid = 0.5 * (a + c);
  const double disc = std::hypot(0.5 * (a - c), b);
  r.lam[0] = mid + disc;
  r.lam[1] = mid - disc;
  Vec2 v{b, r.lam[0] - a};
  const double n = v.norm();
  if (n > 1e-300) {
    v = v * (1.0 / n);
  } else {
    v = a >= c ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
  }
  r.vec[0] = v;
  r.vec[1] = {-v.y, v.x};
  return r;
}

Mat2 rank_one(const Vec2& v, double s) {
  Mat2 r;
  r(0, 0) = s * v.x * v.x;
  r(0, 1) = r(1, 0) = s * v.x * v.y;
  r(1, 1) = s * v.y * v.y;
  return r;
}

Mat2 abs_sym(const Mat2& m, int dim) {
  if (dim == 1) {
    Mat2 r;
    r(0, 0) = std::abs(m(0, 0));
    return r;
  }
  const EigSym e = eig_sym(m, 2);
  return rank_one(e.vec[0], std::abs(e.lam[0])).plus(rank_one(e.vec[1], std::abs(e.lam[1])), 2);
}

double max_abs_entry(const Mat2& m, int dim) {
  double r = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

// Dense symmetric-system solve by Gaussian elimination with partial pivoting.
// Returns false when the system is numerically singular.
bool solve_dense(int n, double a[6][6], double b[6], double x[6]) {
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    if (std::abs(a[p][k]) < 1e-300) return false;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(a[p][j], a[k][j]);
      std::swap(b[p], b[k]);
    }
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return true;
}

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<Mat2> recover_hessians(const SimplicialMesh& mesh,
                                   const std::vector<double>& cell_values) {
  const MeshConnectivity& c = *mesh.conn;
  const int dim = c.dim;
  const int nun = dim == 1 ? 3 : 6;    // quadratic coefficients
  const int need = nun + 1;            // samples for an overdetermined fit
  std::vector<Mat2> vert_h(c.n_vertices);

  for (int v = 0; v < c.n_vertices; ++v) {
    std::vector<int> verts{v};
    std::vector<int> patch;
    for (int ring = 0; ring < 6; ++ring) {
      patch.clear();
      for (int w : verts)
        patch.insert(patch.end(), c.vertex_elems[w].begin(), c.vertex_elems[w].end());
      sort_unique(patch);
      if (static_cast<int>(patch.size()) >= need) break;
      std::vector<int> grown = verts;
      for (int w : verts)
        grown.insert(grown.end(), c.vertex_nbrs[w].begin(), c.vertex_nbrs[w].end());
      sort_unique(grown);
      if (grown.size() == verts.size()) break;  // patch cannot grow further
      verts.swap(grown);
    }

    double r = 0.0;
    for (int e : patch) r = std::max(r, (mesh.egeo[e].centroid - mesh.X[v]).norm());
    if (r < 1e-300 || static_cast<int>(patch.size()) < nun) continue;  // leave zero

    double a[6][6] = {};
    double rhs[6] = {};
    for (int e : patch) {
      const Vec2 z = (mesh.egeo[e].centroid - mesh.X[v]) * (1.0 / r);
      double mono[6];
      if (dim == 1) {
        mono[0] = 1.0;
        mono[1] = z.x;
        mono[2] = z.x * z.x;
      } else {
        mono[0] = 1.0;
        mono[1] = z.x;
        mono[2] = z.y;
        mono[3] = z.x * z.x;
        mono[4] = z.x * z.y;
        mono[5] = z.y * z.y;
      }
      for (int i = 0; i < nun; ++i) {
        for (int j = 0; j < nun; ++j) a[i][j] += mono[i] * mono[j];
        rhs[i] += mono[i] * cell_values[e];
      }
    }
    double diag = 0.0;
    for (int i = 0; i < nun; ++i) diag += a[i][i];
    for (int i = 0; i < nun; ++i) a[i][i] += 1e-12 * (diag / nun + 1.0);

    double coef[6];
    if (!solve_dense(nun, a, rhs, coef)) continue;
    Mat2& h = vert_h[v];
    if (dim == 1) {
      h(0, 0) = 2.0 * coef[2] / (r * r);
    } else {
      h(0, 0) = 2.0 * coef[3] / (r * r);
      h(0, 1) = h(1, 0) = coef[4] / (r * r);
      h(1, 1) = 2.0 * coef[5] / (r * r);
    }
  }

  std::vector<Mat2> out(mesh.n_elems());
  for (int e = 0; e < mesh.n_elems(); ++e) {
    Mat2 acc;
    for (int k = 0; k <= dim; ++k) acc = acc.plus(vert_h[c.elems[e][k]], dim);
    out[e] = acc.scaled(1.0 / (dim + 1), dim);
  }
  return out;
}

double hessian_regularization(const SimplicialMesh& mesh, const std::vector<Mat2>& abs_h) {
  const int dim = mesh.dim();
  const double expo = 2.0 / (dim + 4);
  double target = 0.0;
  double max_h = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    target += mesh.egeo[e].volume * std::pow(std::max(abs_h[e].det(dim), 0.0), expo);
    max_h = std::max(max_h, max_abs_entry(abs_h[e], dim));
  }
  target *= 2.0;
  const double floor_a = 1e-8 * (1.0 + max_h);
  if (target <= 0.0) return floor_a;

  auto mass = [&](double alpha) {
    double s = 0.0;
    for (int e = 0; e < mesh.n_elems(); ++e) {
      const Mat2 m = abs_h[e].plus(Mat2::identity(dim).scaled(alpha, dim), dim);
      s += mesh.egeo[e].volume * std::pow(m.det(dim), expo);
    }
    return s;
  };

  double lo = 0.0;
  double hi = 1.0 + max_h;
  while (mass(hi) < target && hi < 1e200) hi *= 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < target ? lo : hi) = mid;
  }
  return std::max(0.5 * (lo + hi), floor_a);
}

Mat2 metric_intersection(const Mat2& a, const Mat2& b, int dim) {
  if (dim == 1) {
    Mat2 r;
    r(0, 0) = std::max(a(0, 0), b(0, 0));
    return r;
  }
  // Simultaneous diagonalization through the Cholesky factor of a.
  const double l00 = std::sqrt(a(0, 0));
  const double l10 = a(1, 0) / l00;
  const double l11 = std::sqrt(std::max(a(1, 1) - l10 * l10, 1e-300));
  const double i00 = 1.0 / l00;
  const double i10 = -l10 / (l00 * l11);
  const double i11 = 1.0 / l11;
  const double b00 = b(0, 0), b01 = 0.5 * (b(0, 1) + b(1, 0)), b11 = b(1, 1);
  const double t00 = i00 * b00, t01 = i00 * b01;
  const double t10 = i10 * b00 + i11 * b01, t11 = i10 * b01 + i11 * b11;
  Mat2 cmat;
  cmat(0, 0) = t00 * i00;
  cmat(0, 1) = cmat(1, 0) = t00 * i10 + t01 * i11;
  cmat(1, 1) = t10 * i10 + t11 * i11;
  const EigSym e = eig_sym(cmat, 2);
  Mat2 out;
  for (int k = 0; k < 2; ++k) {
    const Vec2 q = e.vec[k];
    const Vec2 s{l00 * q.x, l10 * q.x + l11 * q.y};  // L * q
    out = out.plus(rank_one(s, std::max(1.0, e.lam[k])), 2);
  }
  return out;
}

MetricField build_monitor(const SweFields& f, const MonitorParams& mp) {
  const SimplicialMesh& mesh = *f.mesh();
  const MeshConnectivity& c = *mesh.conn;
  const int dim = c.dim;
  const int ne = mesh.n_elems();

  auto tensor_for = [&](const std::vector<double>& vals) {
    const std::vector<Mat2> hess = recover_hessians(mesh, vals);
    std::vector<Mat2> abs_h(ne);
    for (int e = 0; e < ne; ++e) abs_h[e] = abs_sym(hess[e], dim);
    const double alpha = hessian_regularization(mesh, abs_h);
    std::vector<Mat2> m(ne);
    double norm = 0.0;
    for (int e = 0; e < ne; ++e) {
      const Mat2 reg = abs_h[e].plus(Mat2::identity(dim).scaled(alpha, dim), dim);
      m[e] = reg.scaled(std::pow(reg.det(dim), -1.0 / (dim + 4)), dim);
      norm = std::max(norm, max_abs_entry(m[e], dim));
    }
    for (Mat2& t : m) t = t.scaled(1.0 / norm, dim);
    return m;
  };

  std::vector<Mat2> combined;
  if (mp.use_entropy) {
    std::vector<double> qent(ne);
    for (int e = 0; e < ne; ++e) {
      const double hb = f.h.cell_avg(e);
      const double u = safe_vel(hb, f.mx.cell_avg(e), mp.dry_tol);
      const double v = safe_vel(hb, f.my.cell_avg(e), mp.dry_tol);
      qent[e] = 0.5 * hb * (u * u + v * v) + 0.5 * mp.gravity * hb * hb +
                mp.gravity * hb * f.b.cell_avg(e);
    }
    combined = tensor_for(qent);
  } else if (mp.use_flow_energy || mp.use_depth) {
    std::vector<double> qe(ne), qh(ne);
    for (int e = 0; e < ne; ++e) {
      const double hb = f.h.cell_avg(e);
      const double u = safe_vel(hb, f.mx.cell_avg(e), mp.dry_tol);
      const double v = safe_vel(hb, f.my.cell_avg(e), mp.dry_tol);
      qe[e] = 0.5 * (u * u + v * v) + mp.gravity * (hb + f.b.cell_avg(e));
      qh[e] = hb;
    }
    if (mp.use_flow_energy && mp.use_depth) {
      const std::vector<Mat2> me = tensor_for(qe);
      const std::vector<Mat2> mh = tensor_for(qh);
      combined.resize(ne);
      for (int e = 0; e < ne; ++e)
        combined[e] = metric_intersection(me[e], mh[e].scaled(mp.depth_weight, dim), dim);
    } else {
      combined = tensor_for(mp.use_flow_energy ? qe : qh);
    }
  } else {
    combined.assign(ne, Mat2::identity(dim));
  }

  for (Mat2& t : combined) {
    const double tr = t.trace(dim) / mp.trace_bound;
    t = t.scaled(1.0 / std::sqrt(1.0 + tr * tr), dim);
  }

  MetricField out;
  out.dim = dim;
  out.vertex.resize(c.n_vertices);
  for (int v = 0; v < c.n_vertices; ++v) {
    Mat2 acc;
    double w = 0.0;
    for (int e : c.vertex_elems[v]) {
      acc = acc.plus(combined[e].scaled(mesh.egeo[e].volume, dim), dim);
      w += mesh.egeo[e].volume;
    }
    out.vertex[v] = acc.scaled(1.0 / w, dim);
  }
  for (int pass = 0; pass < mp.smoothing_passes; ++pass) {
    std::vector<Mat2> next(c.n_vertices);
    for (int v = 0; v < c.n_vertices; ++v) {
      Mat2 acc = out.vertex[v];
      for (int w : c.vertex_nbrs[v]) acc = acc.plus(out.vertex[w], dim);
      next[v] = acc.scaled(1.0 / (1.0 + c.vertex_nbrs[v].size()), dim);
    }
    out.vertex.swap(next);
  }
  out.elem.resize(ne);
  for (int e = 0; e < ne; ++e) {
    Mat2 acc;
    for (int k = 0; k <= dim; ++k) acc = acc.plus(out.vertex[c.elems[e][k]], dim);
    out.elem[e] = acc.scaled(1.0 / (dim + 1), dim);
  }
  return out;
}

namespace {

Mat2 edge_matrix(const std::vector<Vec2>& pos, const std::array<int, 3>& v, int dim) {
  Mat2 e;
  e(0, 0) = pos[v[1]].x - pos[v[0]].x;
  if (dim == 2) {
    e(1, 0) = pos[v[1]].y - pos[v[0]].y;
    e(0, 1) = pos[v[2]].x - pos[v[0]].x;
    e(1, 1) = pos[v[2]].y - pos[v[0]].y;
  }
  return e;
}

}  // namespace

double mesh_energy(const SimplicialMesh& phys, const std::vector<Vec2>& xi,
                   const MetricField& metric) {
  const MeshConnectivity& c = *phys.conn;
  const int dim = c.dim;
  const double p = 0.75 * dim;
  double total = 0.0;
  for (int e = 0; e < phys.n_elems(); ++e) {
    const Mat2 exi = edge_matrix(xi, c.elems[e], dim);
    const double detc = exi.det(dim);
    if (!(detc > 0.0)) return kInf;
    const Mat2 jac = exi.mul(phys.egeo[e].invE, dim);
    const double detj = jac.det(dim);
    const Mat2& mk = metric.elem[e];
    const double sdet = std::sqrt(mk.det(dim));
    const double theta = jac.mul(mk.inverse(dim), dim).mul(jac.transpose(dim), dim).trace(dim);
    const double g = (std::pow(theta, p) +
                      std::pow(dim, p) * std::pow(detj / sdet, 1.5)) *
                     sdet / 3.0;
    total += phys.egeo[e].volume * g;
  }
  return total;
}

std::vector<Vec2> mesh_energy_gradient(const SimplicialMesh& phys, const std::vector<Vec2>& xi,
                                       const MetricField& metric) {
  const MeshConnectivity& c = *phys.conn;
  const int dim = c.dim;
  const double p = 0.75 * dim;
  std::vector<Vec2> grad(c.n_vertices);
  for (int e = 0; e < phys.n_elems(); ++e) {
    const Mat2 exi = edge_matrix(xi, c.elems[e], dim);
    const Mat2 jac = exi.mul(phys.egeo[e].invE, dim);
    const double detj = jac.det(dim);
    const Mat2& mk = metric.elem[e];
    const double detm = mk.det(dim);
    const double sdet = std::sqrt(detm);
    const Mat2 minv = mk.inverse(dim);
    const double theta = jac.mul(minv, dim).mul(jac.transpose(dim), dim).trace(dim);

    const Mat2 dg_dj =
        minv.mul(jac.transpose(dim), dim)
            .scaled(0.5 * dim * sdet * std::pow(theta, p - 1.0), dim);
    const double dg_ddet =
        0.5 * std::pow(dim, p) * std::pow(detm, -0.25) * std::sqrt(detj);

    const Mat2 vel = phys.egeo[e].invE.mul(dg_dj, dim).scaled(-1.0, dim).plus(
        exi.inverse(dim).scaled(-dg_ddet * detj, dim), dim);

    const double vol = phys.egeo[e].volume;
    Vec2 sum{};
    for (int k = 0; k < dim; ++k) {
      const Vec2 vk{vel(k, 0), dim == 2 ? vel(k, 1) : 0.0};
      grad[c.elems[e][k + 1]] -= vol * vk;
      sum += vk;
    }
    grad[c.elems[e][0]] += vol * sum;  // local vertex 0 carries minus the row sum
  }
  return grad;
}

MeshPtr move_mesh(const SweFields& f, const std::vector<Vec2>& xi_ref, double dt,
                  const MmpdeParams& prm, MoveStats* stats) {
  MoveStats st;
  auto finish = [&](MeshPtr m) {
    if (stats) *stats = st;
    return m;
  };

  MeshPtr phys = f.mesh();
  const SimplicialMesh& mesh = *phys;
  const MeshConnectivity& c = *mesh.conn;
  const int dim = c.dim;
  if (static_cast<int>(xi_ref.size()) != c.n_vertices)
    throw ConfigError("move_mesh: reference coordinate count does not match the mesh");

  const MetricField metric = build_monitor(f, prm.monitor);
  std::vector<Vec2> xi = xi_ref;
  double energy = mesh_energy(mesh, xi, metric);
  st.energy_begin = st.energy_end = energy;
  if (!std::isfinite(energy)) return finish(phys);

  std::vector<double> scale(c.n_vertices);
  const double tau = prm.tau_scale * std::pow(static_cast<double>(mesh.n_elems()), -1.0 / dim);
  for (int v = 0; v < c.n_vertices; ++v)
    scale[v] = std::sqrt(metric.vertex[v].det(dim)) / tau;

  const int pin_x = (1 << kSideLeft) | (1 << kSideRight);
  const int pin_y = (1 << kSideBottom) | (1 << kSideTop);

  double tleft = dt;
  double hsub = 0.25 * dt;
  std::vector<Vec2> xi_new(c.n_vertices);
  while (tleft > 1e-14 * dt && st.substeps < prm.max_substeps && st.rejects < prm.max_rejects) {
    std::vector<Vec2> rate = mesh_energy_gradient(mesh, xi, metric);
    for (int v = 0; v < c.n_vertices; ++v) rate[v] = rate[v] * (-scale[v]);
    // Periodic partners share one patch across the seam: combine their pulls.
    if (!c.periodic_vertex_x.empty()) {
      for (int v = 0; v < c.n_vertices; ++v) {
        const int w = c.periodic_vertex_x[v];
        if (w > v) rate[v] = rate[w] = rate[v] + rate[w];
      }
    }
    if (!c.periodic_vertex_y.empty()) {
      for (int v = 0; v < c.n_vertices; ++v) {
        const int w = c.periodic_vertex_y[v];
        if (w > v) rate[v] = rate[w] = rate[v] + rate[w];
      }
    }
    for (int v = 0; v < c.n_vertices; ++v) {
      const int s = c.vertex_sides[v];
      if (dim == 1) {
        if (s != 0) rate[v] = {0.0, 0.0};
      } else {
        if (s & pin_x) rate[v].x = 0.0;
        if (s & pin_y) rate[v].y = 0.0;
      }
    }

    const double step = std::min(hsub, tleft);
    for (int v = 0; v < c.n_vertices; ++v) xi_new[v] = xi[v] + step * rate[v];
    const double trial = mesh_energy(mesh, xi_new, metric);
    if (std::isfinite(trial) && trial <= energy) {
      xi.swap(xi_new);
      energy = trial;
      tleft -= step;
      ++st.substeps;
    } else {
      hsub *= 0.5;
      ++st.rejects;
    }
  }
  st.energy_end = energy;
  if (st.substeps == 0) return finish(phys);

  double moved = 0.0;
  for (int v = 0; v < c.n_vertices; ++v) moved = std::max(moved, (xi[v] - xi_ref[v]).norm());
  if (moved == 0.0) return finish(phys);

  // Read the new vertex positions off the piecewise-linear correspondence between the
  // relaxed coordinates and the (fixed) physical mesh.
  SimplicialMesh ximesh(mesh);
  ximesh.X = xi;
  try {
    ximesh.update_geometry(true);
  } catch (const TangledMeshError&) {
    return finish(phys);
  }
  std::vector<Vec2> xnew(c.n_vertices);
  try {
    for (int v = 0; v < c.n_vertices; ++v) {
      const int s = c.vertex_sides[v];
      const bool fixed = dim == 1 ? s != 0 : (s & pin_x) && (s & pin_y);
      if (fixed) {
        xnew[v] = mesh.X[v];
        continue;
      }
      const LocatedPoint lp = locate_point(ximesh, xi_ref[v], c.vertex_elems[v].front());
      Vec2 x = mesh.to_phys(lp.elem, lp.ref);
      if (dim == 2) {  // snap sliding boundary vertices back onto their side
        if (s & pin_x) x.x = mesh.X[v].x;
        if (s & pin_y) x.y = mesh.X[v].y;
      }
      xnew[v] = x;
    }
  } catch (const PointLocationError&) {
    return finish(phys);
  }

  auto out = std::make_shared<SimplicialMesh>(mesh);
  out->X = xnew;
  try {
    out->update_geometry(true);
  } catch (const TangledMeshError&) {
    return finish(phys);
  }
  for (int v = 0; v < c.n_vertices; ++v)
    st.max_displacement = std::max(st.max_displacement, (xnew[v] - mesh.X[v]).norm());
  st.moved = st.max_displacement > 0.0;
  if (!st.moved) return finish(phys);
  return finish(out);
}

}  // namespace mmswe

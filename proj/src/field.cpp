// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include "mmswe/dg.hpp"

namespace mmswe {

DGField::DGField(MeshPtr m, int deg) : mesh(std::move(m)), degree(deg) {
  nb = Basis::get(mesh->dim(), degree).nb;
  c.assign(static_cast<size_t>(mesh->n_elems()) * nb, 0.0);
}

double DGField::eval(int e, const Vec2& ref) const {
  const Basis& b = Basis::get(mesh->dim(), degree);
  double s = 0.0;
  for (int j = 0; j < nb; ++j) s += coef(e, j) * b.value(j, ref);
  return s;
}

double DGField::cell_avg(int e) const {
  return coef(e, 0) * Basis::get(mesh->dim(), degree).const_mode();
}

double DGField::integral() const {
  double s = 0.0;
  for (int e = 0; e < mesh->n_elems(); ++e) s += cell_avg(e) * mesh->egeo[e].volume;
  return s;
}

DGField l2_project(const std::function<double(Vec2)>& f, MeshPtr mesh, int degree,
                   int quad_degree) {
  DGField out(mesh, degree);
  const Basis& b = Basis::get(mesh->dim(), degree);
  const QuadratureRule& q =
      volume_rule(mesh->dim(), quad_degree > 0 ? quad_degree : 3 * std::max(degree, 1));
  std::vector<double> phi;
  b.tabulate(q.pts, phi);
  for (int e = 0; e < mesh->n_elems(); ++e) {
    for (int k = 0; k < q.size(); ++k) {
      const double fv = f(mesh->to_phys(e, q.pts[k])) * q.w[k];
      for (int j = 0; j < out.nb; ++j) out.coef(e, j) += fv * phi[k * out.nb + j];
    }
  }
  return out;
}

}  // namespace mmswe

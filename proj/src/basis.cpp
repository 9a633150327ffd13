// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <map>
#include <mutex>

#include "mmswe/dg.hpp"

namespace mmswe {

namespace {

// Exact integral of x^a (1D, over [0,1]) or x^a y^b (2D, over the unit triangle).
long double monomial_integral(int dim, int a, int b) {
  if (dim == 1) return 1.0L / (a + 1);
  // a! b! / (a+b+2)!
  long double r = 1.0L;
  for (int k = 1; k <= a; ++k) r *= k;
  for (int k = 1; k <= b; ++k) r *= k;
  for (int k = 1; k <= a + b + 2; ++k) r /= k;
  return r;
}

}  // namespace

Basis::Basis(int dim_, int degree_) : dim(dim_), degree(degree_) {
  if (dim < 1 || dim > 2 || degree < 0) throw ConfigError("unsupported basis request");
  for (int total = 0; total <= degree; ++total)
    for (int py = 0; py <= (dim == 2 ? total : 0); ++py) {
      mono_px_.push_back(total - py);
      mono_py_.push_back(py);
    }
  nb = static_cast<int>(mono_px_.size());

  // Inner products of monomials, then modified Gram-Schmidt with one reorthogonalization
  // pass in extended precision. gram[i][j] = <m_i, m_j> over the reference element.
  std::vector<std::vector<long double>> gram(nb, std::vector<long double>(nb));
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j)
      gram[i][j] = monomial_integral(dim, mono_px_[i] + mono_px_[j], mono_py_[i] + mono_py_[j]);
  // work[j] = coefficients of basis function j in the monomial basis.
  std::vector<std::vector<long double>> work(nb, std::vector<long double>(nb, 0.0L));
  for (int j = 0; j < nb; ++j) work[j][j] = 1.0L;
  auto inner = [&](const std::vector<long double>& u, const std::vector<long double>& v) {
    long double s = 0.0L;
    for (int i = 0; i < nb; ++i) {
      if (u[i] == 0.0L) continue;
      long double row = 0.0L;
      for (int j = 0; j < nb; ++j) row += gram[i][j] * v[j];
      s += u[i] * row;
    }
    return s;
  };
  for (int j = 0; j < nb; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < j; ++k) {
        const long double proj = inner(work[k], work[j]);
        for (int i = 0; i < nb; ++i) work[j][i] -= proj * work[k][i];
      }
    const long double nrm = sqrtl(inner(work[j], work[j]));
    for (int i = 0; i < nb; ++i) work[j][i] /= nrm;
  }
  coef_.assign(nb, std::vector<double>(nb));
  for (int j = 0; j < nb; ++j)
    for (int i = 0; i < nb; ++i) coef_[j][i] = static_cast<double>(work[j][i]);
}

double Basis::value(int j, const Vec2& p) const {
  double s = 0.0;
  for (int m = 0; m < nb; ++m) {
    if (coef_[j][m] == 0.0) continue;
    double t = coef_[j][m];
    for (int k = 0; k < mono_px_[m]; ++k) t *= p.x;
    for (int k = 0; k < mono_py_[m]; ++k) t *= p.y;
    s += t;
  }
  return s;
}

Vec2 Basis::grad(int j, const Vec2& p) const {
  Vec2 g{0.0, 0.0};
  for (int m = 0; m < nb; ++m) {
    if (coef_[j][m] == 0.0) continue;
    const int px = mono_px_[m], py = mono_py_[m];
    if (px > 0) {
      double t = coef_[j][m] * px;
      for (int k = 0; k < px - 1; ++k) t *= p.x;
      for (int k = 0; k < py; ++k) t *= p.y;
      g.x += t;
    }
    if (py > 0) {
      double t = coef_[j][m] * py;
      for (int k = 0; k < px; ++k) t *= p.x;
      for (int k = 0; k < py - 1; ++k) t *= p.y;
      g.y += t;
    }
  }
  return g;
}

void Basis::tabulate(const std::vector<Vec2>& pts, std::vector<double>& values) const {
  values.resize(pts.size() * nb);
  for (size_t q = 0; q < pts.size(); ++q)
    for (int j = 0; j < nb; ++j) values[q * nb + j] = value(j, pts[q]);
}

void Basis::tabulate_grad(const std::vector<Vec2>& pts, std::vector<Vec2>& grads) const {
  grads.resize(pts.size() * nb);
  for (size_t q = 0; q < pts.size(); ++q)
    for (int j = 0; j < nb; ++j) grads[q * nb + j] = grad(j, pts[q]);
}

const Basis& Basis::get(int dim, int degree) {
  static std::map<std::pair<int, int>, Basis> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(dim, degree);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, Basis(dim, degree)).first;
  return it->second;
}

const SpecialPointSet& special_points(int dim, int degree) {
  static std::map<std::pair<int, int>, SpecialPointSet> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(dim, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  SpecialPointSet sp;
  // Gauss-Lobatto with 2n-3 >= degree represents the cell average with positive weights.
  const int nlob = std::max(2, (degree + 4) / 2);
  const QuadratureRule lob = gauss_lobatto01(nlob);
  if (dim == 1) {
    sp.pts = lob.pts;
  } else {
    const QuadratureRule& fq = face_rule(3 * degree);
    const Vec2 vtx[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (int i = 0; i < 3; ++i) {
      const Vec2 a = vtx[(i + 1) % 3], b = vtx[(i + 2) % 3];
      for (const Vec2& lq : lob.pts) {
        const double lam = lq.x;
        for (const Vec2& tq : fq.pts) {
          const double t = tq.x;
          const Vec2 edge = a + (b - a) * t;
          sp.pts.push_back(edge + (vtx[i] - edge) * lam);
        }
      }
    }
  }
  return cache.emplace(key, std::move(sp)).first->second;
}

}  // namespace mmswe

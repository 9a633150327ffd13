// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <map>
#include <mutex>

#include "mmswe/dg.hpp"

namespace mmswe {

namespace {

// Legendre P_n(x) and derivative on [-1,1].
void legendre_eval(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadratureRule gauss_legendre01(int n) {
  if (n < 1) throw ConfigError("gauss_legendre01 needs n >= 1");
  QuadratureRule r;
  r.pts.resize(n);
  r.w.resize(n);
  r.exact_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    // Newton from the Chebyshev initial guess; roots ordered ascending on [-1,1].
    double x = -std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre_eval(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre_eval(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.pts[i] = {0.5 * (x + 1.0), 0.0};
    r.w[i] = 0.5 * w;
  }
  return r;
}

QuadratureRule gauss_lobatto01(int n) {
  QuadratureRule r;
  r.exact_degree = 2 * n - 3;
  auto push = [&](double x, double w) {
    r.pts.push_back({0.5 * (x + 1.0), 0.0});
    r.w.push_back(0.5 * w);
  };
  switch (n) {
    case 2:
      push(-1.0, 1.0);
      push(1.0, 1.0);
      break;
    case 3:
      push(-1.0, 1.0 / 3.0);
      push(0.0, 4.0 / 3.0);
      push(1.0, 1.0 / 3.0);
      break;
    case 4: {
      const double a = std::sqrt(1.0 / 5.0);
      push(-1.0, 1.0 / 6.0);
      push(-a, 5.0 / 6.0);
      push(a, 5.0 / 6.0);
      push(1.0, 1.0 / 6.0);
      break;
    }
    case 5: {
      const double a = std::sqrt(3.0 / 7.0);
      push(-1.0, 0.1);
      push(-a, 49.0 / 90.0);
      push(0.0, 32.0 / 45.0);
      push(a, 49.0 / 90.0);
      push(1.0, 0.1);
      break;
    }
    default:
      throw ConfigError("gauss_lobatto01 supports n in 2..5");
  }
  return r;
}

namespace {

QuadratureRule make_volume_rule(int dim, int degree) {
  degree = std::max(degree, 1);
  if (dim == 1) return gauss_legendre01((degree + 2) / 2);
  // Duffy map from the unit square: (u,v) -> (u*(1-v), v), Jacobian (1-v). A polynomial
  // of total degree p becomes degree <= p in u and <= p+1 in v including the Jacobian.
  const QuadratureRule gu = gauss_legendre01((degree + 2) / 2);
  const QuadratureRule gv = gauss_legendre01((degree + 3) / 2);
  QuadratureRule r;
  r.exact_degree = degree;
  for (int j = 0; j < gv.size(); ++j)
    for (int i = 0; i < gu.size(); ++i) {
      const double u = gu.pts[i].x, v = gv.pts[j].x;
      r.pts.push_back({u * (1.0 - v), v});
      r.w.push_back(gu.w[i] * gv.w[j] * (1.0 - v));
    }
  return r;
}

}  // namespace

const QuadratureRule& volume_rule(int dim, int degree) {
  static std::map<std::pair<int, int>, QuadratureRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(dim, degree);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, make_volume_rule(dim, degree)).first;
  return it->second;
}

const QuadratureRule& face_rule(int degree) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const int n = (std::max(degree, 1) + 2) / 2;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre01(n)).first;
  return it->second;
}

}  // namespace mmswe

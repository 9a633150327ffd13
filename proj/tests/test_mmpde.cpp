// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mmswe/mmpde.hpp"

using namespace mmswe;

namespace {

std::shared_ptr<SimplicialMesh> deform(const SimplicialMesh& base, uint32_t seed,
                                       double rel) {
  auto m = std::make_shared<SimplicialMesh>(base);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-rel, rel);
  for (int v = 0; v < m->n_vertices(); ++v) {
    if (base.conn->vertex_sides[v] != 0) continue;
    double hloc = std::numeric_limits<double>::infinity();
    for (int e : base.conn->vertex_elems[v]) hloc = std::min(hloc, base.egeo[e].min_height);
    m->X[v].x += u(rng) * hloc;
    if (base.dim() == 2) m->X[v].y += u(rng) * hloc;
  }
  m->update_geometry();
  return m;
}

MetricField random_metric(const SimplicialMesh& mesh, uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> mu(0.5, 3.0);
  std::uniform_real_distribution<double> ang(0.0, 3.141592653589793);
  MetricField m;
  m.dim = mesh.dim();
  m.elem.resize(mesh.n_elems());
  m.vertex.assign(mesh.conn->n_vertices, Mat2::identity(m.dim));
  for (Mat2& t : m.elem) {
    if (m.dim == 1) {
      t(0, 0) = mu(rng);
    } else {
      const double a = ang(rng), m1 = mu(rng), m2 = mu(rng);
      const double cs = std::cos(a), sn = std::sin(a);
      t(0, 0) = m1 * cs * cs + m2 * sn * sn;
      t(0, 1) = t(1, 0) = (m1 - m2) * cs * sn;
      t(1, 1) = m1 * sn * sn + m2 * cs * cs;
    }
  }
  return m;
}

}  // namespace

TEST_CASE("analytic energy gradient matches central finite differences") {
  for (int dim : {1, 2}) {
    for (uint32_t seed = 1; seed <= 20; ++seed) {
      CAPTURE(dim);
      CAPTURE(seed);
      MeshPtr base = dim == 1 ? build_interval_mesh(0.0, 10.0, 24)
                              : build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 4, 4);
      auto phys = deform(*base, seed, dim == 1 ? 0.25 : 0.12);
      auto ximesh = deform(*base, seed + 100, dim == 1 ? 0.25 : 0.12);
      const std::vector<Vec2> xi = ximesh->X;
      const MetricField metric = random_metric(*phys, seed + 200);

      const std::vector<Vec2> grad = mesh_energy_gradient(*phys, xi, metric);
      double gscale = 0.0;
      for (const Vec2& g : grad) gscale = std::max(gscale, g.norm());

      const double fd_h = dim == 1 ? 1e-6 : 1e-7;
      double worst = 0.0;
      for (int v = 0; v < phys->conn->n_vertices; ++v) {
        for (int comp = 0; comp < dim; ++comp) {
          std::vector<Vec2> xp = xi, xm = xi;
          (comp == 0 ? xp[v].x : xp[v].y) += fd_h;
          (comp == 0 ? xm[v].x : xm[v].y) -= fd_h;
          const double fd =
              (mesh_energy(*phys, xp, metric) - mesh_energy(*phys, xm, metric)) / (2.0 * fd_h);
          const double an = comp == 0 ? grad[v].x : grad[v].y;
          worst = std::max(worst, std::abs(fd - an) / gscale);
        }
      }
      CHECK(worst <= 1e-5);
    }
  }
}

TEST_CASE("hessian regularization matches the closed form for uniform curvature") {
  // With |H| = lambda I the balance equation gives a + lambda = 2^{(d+4)/(2d)} lambda.
  for (int dim : {1, 2}) {
    CAPTURE(dim);
    MeshPtr mesh = dim == 1 ? build_interval_mesh(0.0, 1.0, 10)
                            : build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 3, 3);
    const double lambda = 2.5;
    std::vector<Mat2> abs_h(mesh->n_elems(), Mat2::identity(dim).scaled(lambda, dim));
    const double expected = (std::pow(2.0, 0.5 * (dim + 4) / dim) - 1.0) * lambda;
    const double alpha = hessian_regularization(*mesh, abs_h);
    CHECK(alpha == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("least-squares recovery reproduces quadratic curvature") {
  SUBCASE("line") {
    auto mesh = deform(*build_interval_mesh(0.0, 10.0, 30), 3, 0.2);
    std::vector<double> vals(mesh->n_elems());
    for (int e = 0; e < mesh->n_elems(); ++e) {
      const double x = mesh->egeo[e].centroid.x;
      vals[e] = 3.0 + 2.0 * x - 0.7 * x * x;
    }
    const std::vector<Mat2> h = recover_hessians(*mesh, vals);
    for (const Mat2& m : h) CHECK(m(0, 0) == doctest::Approx(-1.4).epsilon(1e-4));
  }
  SUBCASE("plane") {
    auto mesh = deform(*build_cross_rectangle(0.0, 2.0, 0.0, 1.0, 6, 4), 4, 0.1);
    std::vector<double> vals(mesh->n_elems());
    for (int e = 0; e < mesh->n_elems(); ++e) {
      const Vec2 p = mesh->egeo[e].centroid;
      vals[e] = p.x * p.x + 3.0 * p.x * p.y - 2.0 * p.y * p.y + p.x - p.y + 2.0;
    }
    const std::vector<Mat2> h = recover_hessians(*mesh, vals);
    for (const Mat2& m : h) {
      CHECK(m(0, 0) == doctest::Approx(2.0).epsilon(1e-4));
      CHECK(m(0, 1) == doctest::Approx(3.0).epsilon(1e-4));
      CHECK(m(1, 1) == doctest::Approx(-4.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("matrix intersection dominates both arguments") {
  SUBCASE("diagonal pair") {
    Mat2 a, b;
    a(0, 0) = 4.0;
    a(1, 1) = 1.0;
    b(0, 0) = 1.0;
    b(1, 1) = 9.0;
    const Mat2 m = metric_intersection(a, b, 2);
    CHECK(m(0, 0) == doctest::Approx(4.0));
    CHECK(m(1, 1) == doctest::Approx(9.0));
    CHECK(std::abs(m(0, 1)) <= 1e-12);
  }
  SUBCASE("idempotent") {
    Mat2 a;
    a(0, 0) = 2.0;
    a(0, 1) = a(1, 0) = 0.5;
    a(1, 1) = 1.0;
    const Mat2 m = metric_intersection(a, a, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(m(i, j) == doctest::Approx(a(i, j)).epsilon(1e-12));
  }
  SUBCASE("random pairs stay above both") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
      auto rand_spd = [&]() {
        Mat2 t;
        const double a = u(rng), b = u(rng), c = 0.5 * std::min(a, b) * (2.0 * u(rng) - 2.0) / 2.0;
        t(0, 0) = a;
        t(1, 1) = b;
        t(0, 1) = t(1, 0) = c;
        return t;
      };
      const Mat2 a = rand_spd(), b = rand_spd();
      const Mat2 m = metric_intersection(a, b, 2);
      for (const Mat2* low : {&a, &b}) {
        const Mat2 d = m.plus(low->scaled(-1.0, 2), 2);
        // d must be positive semidefinite: nonnegative trace and determinant.
        CHECK(d.trace(2) >= -1e-10);
        CHECK(d.det(2) >= -1e-10);
      }
    }
  }
  SUBCASE("scalar case is the maximum") {
    Mat2 a, b;
    a(0, 0) = 0.3;
    b(0, 0) = 1.7;
    CHECK(metric_intersection(a, b, 1)(0, 0) == doctest::Approx(1.7));
  }
}

TEST_CASE("a uniform mesh with a uniform tensor is stationary") {
  for (int dim : {1, 2}) {
    CAPTURE(dim);
    MeshPtr mesh = dim == 1 ? build_interval_mesh(0.0, 10.0, 20)
                            : build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 5, 5);
    MetricField metric;
    metric.dim = dim;
    metric.elem.assign(mesh->n_elems(), Mat2::identity(dim));
    metric.vertex.assign(mesh->conn->n_vertices, Mat2::identity(dim));
    // Interior vertices feel no pull; boundary vertices carry the (constrained-away)
    // domain-boundary terms and are pinned by the mover, so they are not checked.
    const std::vector<Vec2> grad = mesh_energy_gradient(*mesh, mesh->X, metric);
    double g = 0.0;
    for (int v = 0; v < mesh->conn->n_vertices; ++v)
      if (mesh->conn->vertex_sides[v] == 0) g = std::max(g, grad[v].norm());
    CHECK(g <= 1e-10);
  }
}

TEST_CASE("mesh movement concentrates cells and never increases the energy") {
  MeshPtr mesh = build_interval_mesh(0.0, 10.0, 60);
  const std::vector<Vec2> xi_ref = mesh->X;
  auto hfun = [](Vec2 p) {
    return 1.0 + std::exp(-4.0 * (p.x - 4.0) * (p.x - 4.0));
  };
  MmpdeParams prm;
  const double dt = 0.01;
  double min_dx = 10.0 / 60.0;
  for (int it = 0; it < 10; ++it) {
    SweFields f(mesh, 2);
    f.h = l2_project(hfun, mesh, 2);
    MoveStats st;
    MeshPtr next = move_mesh(f, xi_ref, dt, prm, &st);
    CHECK(st.monotone);
    CHECK(st.energy_end <= st.energy_begin);
    CHECK(std::isfinite(st.energy_end));
    mesh = next;
    min_dx = 10.0;
    for (int e = 0; e < mesh->n_elems(); ++e) min_dx = std::min(min_dx, mesh->egeo[e].volume);
  }
  // End vertices never move; interior cells concentrate near the bump.
  CHECK(mesh->X.front().x == 0.0);
  CHECK(mesh->X.back().x == 10.0);
  CHECK(min_dx < 0.8 * (10.0 / 60.0));
  int tightest = 0;
  for (int e = 0; e < mesh->n_elems(); ++e)
    if (mesh->egeo[e].volume < mesh->egeo[tightest].volume) tightest = e;
  CHECK(std::abs(mesh->egeo[tightest].centroid.x - 4.0) <= 1.5);
}

TEST_CASE("planar movement respects the boundary and stays untangled") {
  MeshPtr mesh = build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 6, 6);
  const std::vector<Vec2> xi_ref = mesh->X;
  const std::vector<Vec2> x0 = mesh->X;
  auto hfun = [](Vec2 p) {
    const double r2 = (p.x - 0.5) * (p.x - 0.5) + (p.y - 0.5) * (p.y - 0.5);
    return 1.0 + std::exp(-20.0 * r2);
  };
  MmpdeParams prm;
  MoveStats st;
  for (int it = 0; it < 5; ++it) {
    SweFields f(mesh, 1);
    f.h = l2_project(hfun, mesh, 1);
    mesh = move_mesh(f, xi_ref, 0.01, prm, &st);
    CHECK(st.monotone);
  }
  CHECK(st.moved);
  double interior_disp = 0.0;
  for (int v = 0; v < mesh->conn->n_vertices; ++v) {
    const int s = mesh->conn->vertex_sides[v];
    const Vec2 p = mesh->X[v];
    if (s & ((1 << kSideLeft))) CHECK(p.x == x0[v].x);
    if (s & ((1 << kSideRight))) CHECK(p.x == x0[v].x);
    if (s & ((1 << kSideBottom))) CHECK(p.y == x0[v].y);
    if (s & ((1 << kSideTop))) CHECK(p.y == x0[v].y);
    if (s == 0) interior_disp = std::max(interior_disp, (p - x0[v]).norm());
  }
  CHECK(interior_disp > 1e-4);
  // update_geometry(true) inside move_mesh guarantees validity; spot-check volumes.
  for (int e = 0; e < mesh->n_elems(); ++e) CHECK(mesh->egeo[e].volume > 0.0);
}

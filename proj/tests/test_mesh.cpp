// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <set>

#include "mmswe/mesh.hpp"

using namespace mmswe;

TEST_CASE("interval mesh: structure and geometry") {
  auto mesh = build_interval_mesh(0.0, 1.0, 10);
  CHECK(mesh->n_vertices() == 11);
  CHECK(mesh->n_elems() == 10);
  CHECK(mesh->conn->faces.size() == 11);
  int boundary = 0;
  for (const auto& f : mesh->conn->faces)
    if (f.elem[1] == -1) ++boundary;
  CHECK(boundary == 2);
  double vol = 0.0;
  for (const auto& g : mesh->egeo) {
    CHECK(g.volume == doctest::Approx(0.1).epsilon(1e-14));
    vol += g.volume;
  }
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-14));
  // Endpoints are exact and tagged.
  CHECK(mesh->X.front().x == 0.0);
  CHECK(mesh->X.back().x == 1.0);
  CHECK(mesh->conn->vertex_sides[0] == (1 << kSideLeft));
  CHECK(mesh->conn->vertex_sides[10] == (1 << kSideRight));
}

TEST_CASE("cross-triangulated rectangle: counts, orientation, partition of volume") {
  auto mesh = build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 10, 10);
  CHECK(mesh->n_vertices() == 121 + 100);
  CHECK(mesh->n_elems() == 400);
  double vol = 0.0;
  for (const auto& g : mesh->egeo) {
    CHECK(g.detE > 0.0);  // positive orientation everywhere
    vol += g.volume;
  }
  CHECK(vol == doctest::Approx(1.0).epsilon(1e-13));
  // Every interior face has two adjacent elements that agree on its vertices.
  int boundary = 0;
  for (const auto& f : mesh->conn->faces) {
    if (f.elem[1] == -1) {
      ++boundary;
      CHECK(f.side >= 0);
    } else {
      CHECK(f.side == -1);
      for (int s = 0; s < 2; ++s) {
        auto fv = mesh->conn->face_vertices(f.elem[s], f.local[s]);
        std::set<int> a{fv[0], fv[1]}, b{f.v[0], f.v[1]};
        CHECK(a == b);
      }
    }
  }
  CHECK(boundary == 4 * 10);
}

TEST_CASE("face normals point outward and are consistent") {
  auto mesh = build_cross_rectangle(-1.0, 2.0, 0.0, 1.0, 3, 2);
  for (size_t i = 0; i < mesh->conn->faces.size(); ++i) {
    const Face& f = mesh->conn->faces[i];
    const FaceGeometry& fg = mesh->fgeo[i];
    CHECK(fg.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const Vec2 out = fg.midpoint - mesh->egeo[f.elem[0]].centroid;
    CHECK(fg.normal.dot(out) > 0.0);
    if (f.elem[1] != -1) {
      const Vec2 in = fg.midpoint - mesh->egeo[f.elem[1]].centroid;
      CHECK(fg.normal.dot(in) < 0.0);
    }
  }
}

TEST_CASE("min altitude of a cross triangle") {
  auto mesh = build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 10, 10);
  // Each triangle: base 0.1 on the cell edge, apex at the center -> altitude 0.05,
  // area 0.1*0.05/2 = 0.0025, longest edge 0.1.
  for (const auto& g : mesh->egeo) {
    CHECK(g.volume == doctest::Approx(0.0025).epsilon(1e-12));
    CHECK(g.min_height == doctest::Approx(0.05).epsilon(1e-12));
  }
}

TEST_CASE("locate_point: interior, edge tie, vertex tie, outside") {
  auto mesh = build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 4, 4);
  // Strictly interior point of some element.
  const Vec2 p{0.131, 0.207};
  auto loc = locate_point(*mesh, p, 7);
  const Vec2 back = mesh->to_phys(loc.elem, loc.ref);
  CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
  // A grid vertex: many elements contain it; the lowest id must win.
  const Vec2 vtx{0.25, 0.25};
  auto lv = locate_point(*mesh, vtx, 0);
  for (int e = 0; e < lv.elem; ++e) {
    const Vec2 r = mesh->to_ref(e, vtx);
    const double lam0 = 1.0 - r.x - r.y;
    const bool inside = r.x >= -1e-10 && r.y >= -1e-10 && lam0 >= -1e-10;
    CHECK_FALSE(inside);
  }
  // Seeding from any element gives the same answer.
  for (int seed : {0, 3, 17, 63}) CHECK(locate_point(*mesh, vtx, seed).elem == lv.elem);
  CHECK_THROWS_AS(locate_point(*mesh, {1.5, 0.5}), PointLocationError);
}

TEST_CASE("locate_point in 1D") {
  auto mesh = build_interval_mesh(0.0, 2.0, 8);
  auto loc = locate_point(*mesh, {0.9, 0.0}, 5);
  CHECK(loc.elem == 3);
  CHECK(mesh->to_phys(loc.elem, loc.ref).x == doctest::Approx(0.9).epsilon(1e-14));
  // Shared vertex between elements 3 and 4 -> element 3 (lower id).
  CHECK(locate_point(*mesh, {1.0, 0.0}, 7).elem == 3);
}

TEST_CASE("periodic pairing of a rectangle") {
  auto mesh = build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 4, 3);
  MeshConnectivity conn = *mesh->conn;
  pair_periodic_faces(conn, mesh->X);
  int paired = 0;
  for (size_t i = 0; i < conn.faces.size(); ++i) {
    const Face& f = conn.faces[i];
    if (f.elem[1] != -1) {
      CHECK(f.periodic_partner == -1);
      continue;
    }
    ++paired;
    REQUIRE(f.periodic_partner >= 0);
    CHECK(conn.faces[f.periodic_partner].periodic_partner == static_cast<int>(i));
  }
  CHECK(paired == 14);
  // Vertex partners: left edge vertex pairs with the right edge vertex at the same y,
  // and corners additionally pair across bottom/top.
  for (int v = 0; v < conn.n_vertices; ++v) {
    if (conn.vertex_sides[v] & (1 << kSideLeft)) {
      const int w = conn.periodic_vertex_x[v];
      REQUIRE(w >= 0);
      CHECK(mesh->X[w].x == doctest::Approx(1.0));
      CHECK(mesh->X[w].y == doctest::Approx(mesh->X[v].y));
    }
    if (conn.vertex_sides[v] & (1 << kSideBottom)) {
      const int w = conn.periodic_vertex_y[v];
      REQUIRE(w >= 0);
      CHECK(mesh->X[w].y == doctest::Approx(1.0));
      CHECK(mesh->X[w].x == doctest::Approx(mesh->X[v].x));
    }
  }
}

TEST_CASE("deformed copies share connectivity; tangling is detected") {
  auto mesh = build_cross_rectangle(0.0, 1.0, 0.0, 1.0, 3, 3);
  auto moved = std::make_shared<SimplicialMesh>(*mesh);
  // Shift the center vertex of the first cell slightly: still valid.
  const int c = (3 + 1) * (3 + 1);
  moved->X[c] += {0.05, 0.02};
  moved->update_geometry();
  CHECK(moved->conn->uid == mesh->conn->uid);
  // Move it far outside its cell: at least one triangle inverts.
  moved->X[c] = {0.9, 0.9};
  CHECK_THROWS_AS(moved->update_geometry(), TangledMeshError);
}

TEST_CASE("mesh csv snapshot") {
  auto mesh = build_interval_mesh(0.0, 1.0, 2);
  const char* path = "mesh_test_snapshot.csv";
  write_mesh_csv(*mesh, path);
  std::FILE* fp = std::fopen(path, "r");
  REQUIRE(fp != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, fp));
  CHECK(std::string(line).find("# vertices") == 0);
  REQUIRE(std::fgets(line, sizeof line, fp));
  CHECK(std::string(line) == "0,0\n");
  std::fclose(fp);
  std::remove(path);
}

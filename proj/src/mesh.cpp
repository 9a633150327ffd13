// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#include "mmswe/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <utility>

namespace mmswe {

namespace {

std::uint64_t next_uid() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

void append_sorted_unique(std::vector<int>& v, int x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

}  // namespace

std::array<int, 2> MeshConnectivity::face_vertices(int e, int lf) const {
  const auto& ev = elems[e];
  if (dim == 1) return {ev[lf], -1};
  // Edge opposite local vertex lf.
  return {ev[(lf + 1) % 3], ev[(lf + 2) % 3]};
}

void build_connectivity(MeshConnectivity& c) {
  const int nv_per_face = c.dim;  // 1 vertex in 1D, 2 in 2D
  c.faces.clear();
  c.elem_faces.assign(c.elems.size(), {-1, -1, -1});
  std::map<std::array<int, 2>, int> face_of;  // sorted vertex key -> face id
  for (int e = 0; e < c.n_elems(); ++e) {
    for (int lf = 0; lf < c.dim + 1; ++lf) {
      std::array<int, 2> fv = c.face_vertices(e, lf);
      std::array<int, 2> key = fv;
      if (nv_per_face == 2 && key[0] > key[1]) std::swap(key[0], key[1]);
      auto it = face_of.find(key);
      if (it == face_of.end()) {
        Face f;
        f.v = key;
        f.elem[0] = e;
        f.local[0] = lf;
        face_of.emplace(key, static_cast<int>(c.faces.size()));
        c.elem_faces[e][lf] = static_cast<int>(c.faces.size());
        c.faces.push_back(f);
      } else {
        Face& f = c.faces[it->second];
        if (f.elem[1] != -1) throw StructureError("face shared by more than two elements");
        f.elem[1] = e;
        f.local[1] = lf;
        c.elem_faces[e][lf] = it->second;
      }
    }
  }
  c.vertex_elems.assign(c.n_vertices, {});
  c.vertex_nbrs.assign(c.n_vertices, {});
  for (int e = 0; e < c.n_elems(); ++e) {
    for (int lv = 0; lv < c.dim + 1; ++lv) {
      const int v = c.elems[e][lv];
      if (v < 0 || v >= c.n_vertices) throw StructureError("element references unknown vertex");
      append_sorted_unique(c.vertex_elems[v], e);
      for (int lw = 0; lw < c.dim + 1; ++lw) append_sorted_unique(c.vertex_nbrs[v], c.elems[e][lw]);
    }
  }
  if (c.vertex_sides.empty()) c.vertex_sides.assign(c.n_vertices, 0);
  c.uid = next_uid();
}

SimplicialMesh::SimplicialMesh(std::shared_ptr<const MeshConnectivity> c, std::vector<Vec2> pts)
    : conn(std::move(c)), X(std::move(pts)) {
  if (static_cast<int>(X.size()) != conn->n_vertices)
    throw StructureError("vertex position count does not match connectivity");
  update_geometry(true);
}

void SimplicialMesh::update_geometry(bool require_valid) {
  const int d = conn->dim;
  const int ne = conn->n_elems();
  egeo.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const auto& ev = conn->elems[e];
    ElementGeometry g;
    g.v0 = X[ev[0]];
    if (d == 1) {
      const double len = X[ev[1]].x - X[ev[0]].x;
      g.E.m[0][0] = len;
      g.detE = len;
      g.volume = len;
      g.centroid = {0.5 * (X[ev[0]].x + X[ev[1]].x), 0.0};
      g.min_height = len;
      g.diameter = std::abs(len);
    } else {
      const Vec2 e1 = X[ev[1]] - X[ev[0]];
      const Vec2 e2 = X[ev[2]] - X[ev[0]];
      g.E.m[0][0] = e1.x;
      g.E.m[1][0] = e1.y;
      g.E.m[0][1] = e2.x;
      g.E.m[1][1] = e2.y;
      g.detE = g.E.det(2);
      g.volume = 0.5 * g.detE;
      g.centroid = {(X[ev[0]].x + X[ev[1]].x + X[ev[2]].x) / 3.0,
                    (X[ev[0]].y + X[ev[1]].y + X[ev[2]].y) / 3.0};
      const double l01 = (X[ev[1]] - X[ev[0]]).norm();
      const double l12 = (X[ev[2]] - X[ev[1]]).norm();
      const double l20 = (X[ev[0]] - X[ev[2]]).norm();
      g.diameter = std::max({l01, l12, l20});
      g.min_height = g.diameter > 0 ? 2.0 * g.volume / g.diameter : 0.0;
    }
    if (require_valid && !(g.detE > 0))
      throw TangledMeshError("element " + std::to_string(e) + " has nonpositive volume");
    g.invE = g.E.inverse(d);
    egeo[e] = g;
  }
  const int nf = static_cast<int>(conn->faces.size());
  fgeo.resize(nf);
  for (int f = 0; f < nf; ++f) {
    const Face& fc = conn->faces[f];
    FaceGeometry fg;
    if (d == 1) {
      fg.midpoint = X[fc.v[0]];
      fg.measure = 1.0;
      // Outward from elem[0]: +x when the face sits at elem[0]'s right endpoint.
      fg.normal = {fc.local[0] == 1 ? 1.0 : -1.0, 0.0};
    } else {
      const Vec2 a = X[fc.v[0]], b = X[fc.v[1]];
      const Vec2 t = b - a;
      fg.measure = t.norm();
      fg.midpoint = {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
      Vec2 n{t.y, -t.x};
      const double len = n.norm();
      n = n * (1.0 / len);
      const Vec2 out = fg.midpoint - egeo[fc.elem[0]].centroid;
      if (n.dot(out) < 0) n = n * -1.0;
      fg.normal = n;
    }
    fgeo[f] = fg;
  }
}

Vec2 SimplicialMesh::to_ref(int e, const Vec2& p) const {
  return egeo[e].invE.mul(p - egeo[e].v0, dim());
}

Vec2 SimplicialMesh::to_phys(int e, const Vec2& ref) const {
  return egeo[e].v0 + egeo[e].E.mul(ref, dim());
}

MeshPtr build_interval_mesh(double a, double b, int n) {
  if (!(b > a) || n < 1) throw ConfigError("invalid interval mesh request");
  auto conn = std::make_shared<MeshConnectivity>();
  conn->dim = 1;
  conn->n_vertices = n + 1;
  conn->elems.resize(n);
  std::vector<Vec2> X(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    X[i] = {(1.0 - t) * a + t * b, 0.0};
  }
  X[0].x = a;
  X[n].x = b;
  for (int e = 0; e < n; ++e) conn->elems[e] = {e, e + 1, -1};
  conn->vertex_sides.assign(n + 1, 0);
  conn->vertex_sides[0] = (1 << kSideLeft);
  conn->vertex_sides[n] = (1 << kSideRight);
  build_connectivity(*conn);
  for (auto& f : conn->faces) {
    if (f.elem[1] != -1) continue;
    f.side = (f.v[0] == 0) ? kSideLeft : kSideRight;
  }
  return std::make_shared<SimplicialMesh>(conn, std::move(X));
}

MeshPtr build_cross_rectangle(double ax, double bx, double ay, double by, int nx, int ny) {
  if (!(bx > ax) || !(by > ay) || nx < 1 || ny < 1)
    throw ConfigError("invalid rectangle mesh request");
  auto conn = std::make_shared<MeshConnectivity>();
  conn->dim = 2;
  const int ngrid = (nx + 1) * (ny + 1);
  conn->n_vertices = ngrid + nx * ny;
  std::vector<Vec2> X(conn->n_vertices);
  auto gid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double tx = static_cast<double>(i) / nx;
      const double ty = static_cast<double>(j) / ny;
      X[gid(i, j)] = {(1.0 - tx) * ax + tx * bx, (1.0 - ty) * ay + ty * by};
    }
  for (int j = 0; j <= ny; ++j) {
    X[gid(0, j)].x = ax;
    X[gid(nx, j)].x = bx;
  }
  for (int i = 0; i <= nx; ++i) {
    X[gid(i, 0)].y = ay;
    X[gid(i, ny)].y = by;
  }
  auto cid = [&](int i, int j) { return ngrid + j * nx + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      X[cid(i, j)] = {0.5 * (X[gid(i, j)].x + X[gid(i + 1, j)].x),
                      0.5 * (X[gid(i, j)].y + X[gid(i, j + 1)].y)};
  conn->elems.reserve(4 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int c00 = gid(i, j), c10 = gid(i + 1, j), c11 = gid(i + 1, j + 1), c01 = gid(i, j + 1);
      const int m = cid(i, j);
      conn->elems.push_back({c00, c10, m});  // bottom
      conn->elems.push_back({c10, c11, m});  // right
      conn->elems.push_back({c11, c01, m});  // top
      conn->elems.push_back({c01, c00, m});  // left
    }
  conn->vertex_sides.assign(conn->n_vertices, 0);
  for (int j = 0; j <= ny; ++j) {
    conn->vertex_sides[gid(0, j)] |= (1 << kSideLeft);
    conn->vertex_sides[gid(nx, j)] |= (1 << kSideRight);
  }
  for (int i = 0; i <= nx; ++i) {
    conn->vertex_sides[gid(i, 0)] |= (1 << kSideBottom);
    conn->vertex_sides[gid(i, ny)] |= (1 << kSideTop);
  }
  build_connectivity(*conn);
  for (auto& f : conn->faces) {
    if (f.elem[1] != -1) continue;
    const int mask = conn->vertex_sides[f.v[0]] & conn->vertex_sides[f.v[1]];
    if (mask == 0) throw StructureError("boundary face without a side tag");
    for (int s = 0; s < 4; ++s)
      if (mask & (1 << s)) {
        f.side = s;
        break;
      }
  }
  return std::make_shared<SimplicialMesh>(conn, std::move(X));
}

void pair_periodic_faces(MeshConnectivity& c, const std::vector<Vec2>& X) {
  double ax = X[0].x, bx = X[0].x, ay = X[0].y, by = X[0].y;
  for (const auto& p : X) {
    ax = std::min(ax, p.x);
    bx = std::max(bx, p.x);
    ay = std::min(ay, p.y);
    by = std::max(by, p.y);
  }
  const double scale = std::max(bx - ax, by - ay);
  const double tol = 1e-9 * scale;
  auto face_mid = [&](const Face& f) {
    if (c.dim == 1) return X[f.v[0]];
    return Vec2{0.5 * (X[f.v[0]].x + X[f.v[1]].x), 0.5 * (X[f.v[0]].y + X[f.v[1]].y)};
  };
  c.periodic_vertex_x.assign(c.n_vertices, -1);
  c.periodic_vertex_y.assign(c.n_vertices, -1);
  auto pair_sides = [&](int side_a, int side_b, const Vec2& shift, std::vector<int>& partner) {
    std::vector<int> fa, fb;
    for (int f = 0; f < static_cast<int>(c.faces.size()); ++f) {
      if (c.faces[f].side == side_a) fa.push_back(f);
      if (c.faces[f].side == side_b) fb.push_back(f);
    }
    if (fa.size() != fb.size())
      throw ConfigError("periodic sides have different numbers of boundary faces");
    for (int f : fa) {
      const Vec2 target = face_mid(c.faces[f]) + shift;
      int found = -1;
      for (int g : fb)
        if ((face_mid(c.faces[g]) - target).norm() <= tol) {
          found = g;
          break;
        }
      if (found < 0) throw ConfigError("periodic boundary faces do not match up");
      c.faces[f].periodic_partner = found;
      c.faces[found].periodic_partner = f;
    }
    // Vertex pairing for the same sides.
    for (int v = 0; v < c.n_vertices; ++v) {
      if (!(c.vertex_sides[v] & (1 << side_a))) continue;
      const Vec2 target = X[v] + shift;
      for (int w = 0; w < c.n_vertices; ++w) {
        if (!(c.vertex_sides[w] & (1 << side_b))) continue;
        if ((X[w] - target).norm() <= tol) {
          partner[v] = w;
          partner[w] = v;
          break;
        }
      }
      if (partner[v] < 0) throw ConfigError("periodic boundary vertices do not match");
    }
  };
  pair_sides(kSideLeft, kSideRight, {bx - ax, 0.0}, c.periodic_vertex_x);
  if (c.dim == 2) pair_sides(kSideBottom, kSideTop, {0.0, by - ay}, c.periodic_vertex_y);
}

namespace {

// Barycentric coordinates of reference point r (lambda_i = weight of local vertex i).
std::array<double, 3> barycentric(int dim, const Vec2& r) {
  if (dim == 1) return {1.0 - r.x, r.x, 0.0};
  return {1.0 - r.x - r.y, r.x, r.y};
}

bool contains(int dim, const std::array<double, 3>& lam, double tol) {
  for (int i = 0; i < dim + 1; ++i)
    if (lam[i] < -tol) return false;
  return true;
}

}  // namespace

LocatedPoint locate_point(const SimplicialMesh& mesh, const Vec2& p, int seed) {
  const double tol = 1e-10;
  const auto& c = *mesh.conn;
  const int d = c.dim;
  int e = (seed >= 0 && seed < c.n_elems()) ? seed : 0;
  int found = -1;
  Vec2 ref;
  for (int step = 0; step <= c.n_elems() + 4; ++step) {
    ref = mesh.to_ref(e, p);
    const auto lam = barycentric(d, ref);
    if (contains(d, lam, tol)) {
      found = e;
      break;
    }
    int worst = 0;
    for (int i = 1; i < d + 1; ++i)
      if (lam[i] < lam[worst]) worst = i;
    // Cross the face that separates us from the point.
    const int lf = (d == 1) ? (worst == 0 ? 1 : 0) : worst;
    const int fid = c.elem_faces[e][lf];
    const Face& f = c.faces[fid];
    const int nbr = (f.elem[0] == e) ? f.elem[1] : f.elem[0];
    if (nbr < 0) break;  // hit the boundary; fall back to the exhaustive scan
    e = nbr;
  }
  if (found < 0) {
    for (int k = 0; k < c.n_elems(); ++k) {
      const Vec2 r = mesh.to_ref(k, p);
      if (contains(d, barycentric(d, r), tol)) {
        found = k;
        ref = r;
        break;
      }
    }
    if (found < 0) throw PointLocationError("point lies outside the mesh");
    return {found, ref};
  }
  // Deterministic tie-break: if p sits on a face/vertex of `found`, every element sharing
  // that feature is a candidate; return the lowest id that contains p.
  const auto lam = barycentric(d, ref);
  std::vector<int> cands{found};
  for (int i = 0; i < d + 1; ++i) {
    if (lam[i] <= tol) {
      const int lf = (d == 1) ? (i == 0 ? 0 : 1) : i;
      // In 1D lambda_i ~ 0 means p is at the *other* endpoint; pick that face instead.
      const int fid = (d == 1) ? c.elem_faces[found][1 - lf] : c.elem_faces[found][lf];
      const Face& f = c.faces[fid];
      if (f.elem[1] >= 0) cands.push_back(f.elem[0] == found ? f.elem[1] : f.elem[0]);
    }
    if (lam[i] >= 1.0 - tol) {
      for (int k : c.vertex_elems[c.elems[found][i]]) cands.push_back(k);
    }
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  for (int k : cands) {
    const Vec2 r = mesh.to_ref(k, p);
    if (contains(d, barycentric(d, r), tol)) return {k, r};
  }
  return {found, ref};
}

void write_mesh_csv(const SimplicialMesh& mesh, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw Error("cannot open " + path + " for writing");
  const int d = mesh.dim();
  std::fprintf(fp, d == 1 ? "# vertices: id,x\n" : "# vertices: id,x,y\n");
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    if (d == 1)
      std::fprintf(fp, "%d,%.17g\n", v, mesh.X[v].x);
    else
      std::fprintf(fp, "%d,%.17g,%.17g\n", v, mesh.X[v].x, mesh.X[v].y);
  }
  std::fprintf(fp, d == 1 ? "# elements: id,v0,v1\n" : "# elements: id,v0,v1,v2\n");
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const auto& ev = mesh.conn->elems[e];
    if (d == 1)
      std::fprintf(fp, "%d,%d,%d\n", e, ev[0], ev[1]);
    else
      std::fprintf(fp, "%d,%d,%d,%d\n", e, ev[0], ev[1], ev[2]);
  }
  std::fclose(fp);
}

}  // namespace mmswe

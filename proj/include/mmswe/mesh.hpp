// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "mmswe/core.hpp"

namespace mmswe {

// Domain side tags for boundary faces/vertices (bitmask values for vertices).
enum Side : int { kSideLeft = 0, kSideRight = 1, kSideBottom = 2, kSideTop = 3 };

// A codimension-1 face: a point between two intervals (1D) or a triangle edge (2D).
struct Face {
  std::array<int, 2> v{-1, -1};      // vertex ids; v[1] = -1 in 1D
  std::array<int, 2> elem{-1, -1};   // adjacent elements; elem[1] = -1 on the boundary
  std::array<int, 2> local{-1, -1};  // local face index within each adjacent element
  int side = -1;                     // boundary side tag, -1 for interior faces
  int periodic_partner = -1;         // matching boundary face id, -1 if none
};

// Element/vertex topology shared by every deformed copy of a mesh. Positions live in
// SimplicialMesh; two meshes with the same connectivity object are deformation-equivalent.
struct MeshConnectivity {
  int dim = 1;
  int n_vertices = 0;
  std::vector<std::array<int, 3>> elems;       // vertex ids; [2] = -1 in 1D
  std::vector<Face> faces;
  std::vector<std::array<int, 3>> elem_faces;  // element -> face ids by local index
  std::vector<std::vector<int>> vertex_elems;  // elements touching a vertex (sorted)
  std::vector<std::vector<int>> vertex_nbrs;   // neighbor vertices incl. self (sorted)
  std::vector<int> vertex_sides;               // bitmask of Side bits; 0 = interior
  std::vector<int> periodic_vertex_x = {};     // partner across left/right, -1 (set if periodic)
  std::vector<int> periodic_vertex_y = {};     // partner across bottom/top, -1 (set if periodic)
  std::uint64_t uid = 0;                       // unique id for equivalence checks

  int n_elems() const { return static_cast<int>(elems.size()); }
  int verts_per_elem() const { return dim + 1; }
  // Local face f of an element is opposite local vertex f (2D) or endpoint f (1D).
  std::array<int, 2> face_vertices(int e, int lf) const;
};

struct ElementGeometry {
  Vec2 v0;          // map origin (first vertex)
  Mat2 E;           // edge matrix, columns v_i - v_0
  Mat2 invE;
  double detE = 0;  // = dim! * volume (positive for valid orientation)
  double volume = 0;
  Vec2 centroid;
  double min_height = 0;  // minimum altitude (element length in 1D)
  double diameter = 0;    // longest edge (element length in 1D)
};

struct FaceGeometry {
  Vec2 normal;         // unit normal, outward from face.elem[0]
  double measure = 1;  // edge length in 2D, 1 in 1D
  Vec2 midpoint;
};

// Simplicial mesh: shared connectivity + vertex positions + derived geometry.
class SimplicialMesh {
 public:
  std::shared_ptr<const MeshConnectivity> conn;
  std::vector<Vec2> X;
  std::vector<ElementGeometry> egeo;
  std::vector<FaceGeometry> fgeo;

  SimplicialMesh() = default;
  SimplicialMesh(std::shared_ptr<const MeshConnectivity> c, std::vector<Vec2> pts);

  int dim() const { return conn->dim; }
  int n_elems() const { return conn->n_elems(); }
  int n_vertices() const { return conn->n_vertices; }
  // Recompute egeo/fgeo from current X. Throws TangledMeshError if `require_valid`
  // and some element has nonpositive volume.
  void update_geometry(bool require_valid = true);
  // Reference coordinates of physical point p within element e.
  Vec2 to_ref(int e, const Vec2& p) const;
  Vec2 to_phys(int e, const Vec2& ref) const;
};

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

// Uniform partition of [a, b] into n intervals.
MeshPtr build_interval_mesh(double a, double b, int n);

// nx-by-ny rectangle grid on [ax,bx] x [ay,by], each cell split into 4 triangles by its
// centroid. Vertices: grid points row-major, then cell centers row-major. Elements per
// cell: bottom, right, top, left triangle, all counterclockwise.
MeshPtr build_cross_rectangle(double ax, double bx, double ay, double by, int nx, int ny);

// Derive faces/adjacency for an element list (exposed for tests; builders call it).
void build_connectivity(MeshConnectivity& c);

// Pair up boundary faces of periodic sides (left<->right, bottom<->top in 2D; the two
// endpoints in 1D) by translated midpoints, and record matched vertices. Must be called
// before the connectivity is shared. Throws ConfigError if some face has no partner.
void pair_periodic_faces(MeshConnectivity& c, const std::vector<Vec2>& X);

struct LocatedPoint {
  int elem = -1;
  Vec2 ref;  // reference coordinates within elem
};

// Find the element containing p (walk from seed, exhaustive fallback). Containment
// tolerance is 1e-10 in barycentric terms; ties on shared faces/vertices resolve to the
// lowest element id. Throws PointLocationError when p lies outside the mesh.
LocatedPoint locate_point(const SimplicialMesh& mesh, const Vec2& p, int seed = 0);

// Plain-text snapshot: commented header rows, one vertex per line `id,x[,y]`, then one
// element per line `id,v0,v1[,v2]`.
void write_mesh_csv(const SimplicialMesh& mesh, const std::string& path);

}  // namespace mmswe

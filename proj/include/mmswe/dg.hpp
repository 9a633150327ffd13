// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mmswe/core.hpp"
#include "mmswe/mesh.hpp"

namespace mmswe {

// Quadrature on the reference element ([0,1] or the unit triangle). Weights sum to the
// reference measure (1 resp. 1/2) and integrate polynomials up to exact_degree.
struct QuadratureRule {
  std::vector<Vec2> pts;
  std::vector<double> w;
  int exact_degree = 0;
  int size() const { return static_cast<int>(pts.size()); }
};

// Gauss-Legendre nodes/weights on [0,1].
QuadratureRule gauss_legendre01(int n);
// Gauss-Lobatto nodes/weights on [0,1] (n in 2..5).
QuadratureRule gauss_lobatto01(int n);
// Volume rule exact for total degree >= `degree` (tensor/Duffy based, positive weights).
const QuadratureRule& volume_rule(int dim, int degree);
// Rule on [0,1] for face integrals, exact for degree >= `degree`.
const QuadratureRule& face_rule(int degree);

// Orthonormal modal basis on the reference element: the reference mass matrix is the
// identity. Backed by monomial coefficients for robust evaluation everywhere.
class Basis {
 public:
  int dim = 1;
  int degree = 1;
  int nb = 2;

  double value(int j, const Vec2& p) const;
  Vec2 grad(int j, const Vec2& p) const;
  // Value of the constant mode (cell average = coefficient 0 times this).
  double const_mode() const { return coef_[0][0]; }

  // Tabulations: values[q*nb + j], grads[q*nb + j].
  void tabulate(const std::vector<Vec2>& pts, std::vector<double>& values) const;
  void tabulate_grad(const std::vector<Vec2>& pts, std::vector<Vec2>& grads) const;

  static const Basis& get(int dim, int degree);

 private:
  Basis(int dim, int degree);
  std::vector<int> mono_px_, mono_py_;          // monomial exponents
  std::vector<std::vector<double>> coef_;       // coef_[j][m] over monomials
};

// Points at which water depth positivity is enforced: Gauss-Lobatto points in 1D; in 2D
// the union over the three vertices of segments from each face-quadrature point to the
// opposite vertex sampled at Gauss-Lobatto parameters. Contains every face quadrature
// point, and the cell average of any degree<=k polynomial is a positive combination of
// its values on the set.
struct SpecialPointSet {
  std::vector<Vec2> pts;
};
const SpecialPointSet& special_points(int dim, int degree);

// Piecewise polynomial field in the orthonormal modal basis, coefficients per element.
struct DGField {
  MeshPtr mesh;
  int degree = 1;
  int nb = 0;
  std::vector<double> c;

  DGField() = default;
  DGField(MeshPtr m, int deg);
  double& coef(int e, int j) { return c[static_cast<size_t>(e) * nb + j]; }
  double coef(int e, int j) const { return c[static_cast<size_t>(e) * nb + j]; }
  double eval(int e, const Vec2& ref) const;
  double cell_avg(int e) const;
  // Integral over the whole mesh (uses element volumes).
  double integral() const;
};

// L2 projection of a callable onto the broken polynomial space; the quadrature is exact
// for degree >= 3*degree by default (matching the residual rules) unless overridden.
DGField l2_project(const std::function<double(Vec2)>& f, MeshPtr mesh, int degree,
                   int quad_degree = -1);

// --- Limiters ---------------------------------------------------------------------

// Optional characteristic transform: fill row-major nv-by-nv L and R = L^-1 for the
// direction n using element e's cell averages; return false to request componentwise
// limiting (e.g. dry cells).
using CharMatrixFn = std::function<bool(int e, const Vec2& n, double* L, double* R)>;
// Ghost neighbor data for a boundary face: fill ug[nv] from interior averages ui[nv] and
// return the ghost centroid.
using GhostAvgFn = std::function<Vec2(int face, const double* ui, double* ug)>;

struct TvbResult {
  int flagged = 0;              // elements replaced by the limited linear reconstruction
  int char_fallbacks = 0;       // elements limited componentwise because the transform failed
  std::vector<uint8_t> flags;   // per-element: 1 if the element was rebuilt
};

// Minmod-type TVB slope limiter applied to 1..3 fields jointly (characteristic-wise when
// a transform is given). Cell averages are preserved exactly; flagged elements are
// replaced by a limited linear reconstruction. m_tvb scales the deviation threshold
// M*dx^2 (dx: cell width in 1D, element diameter in 2D).
TvbResult tvb_limit(std::vector<DGField*> fields, double m_tvb, const CharMatrixFn& char_fn,
                    const GhostAvgFn& ghost_fn);

struct PpResult {
  int modified = 0;
  double min_theta = 1.0;
  double min_before = 0.0;  // smallest special-point value seen before limiting
};

// Linear scaling limiter: pulls each element's polynomial toward its average so that all
// special-point values are >= floor. Averages are untouched; throws PositivityError if
// an average sits below floor - 1e-13.
PpResult pp_limit(DGField& f, double floor_value, const SpecialPointSet& sp);

}  // namespace mmswe

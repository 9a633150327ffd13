// Copyright (c) 2026 the mmswe authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mmswe {

// Planar point / vector. 1D code uses .x and leaves .y = 0.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_ = 0.0) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Small dense d-by-d matrix, d in {1,2}; stored as 2x2 row-major. For d = 1 only
// a(0,0) is meaningful. All routines take the runtime dimension explicitly.
struct Mat2 {
  double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  static Mat2 identity(int dim) {
    Mat2 r;
    r.m[0][0] = 1.0;
    if (dim == 2) r.m[1][1] = 1.0;
    return r;
  }
  double& operator()(int i, int j) { return m[i][j]; }
  double operator()(int i, int j) const { return m[i][j]; }

  double det(int dim) const {
    return dim == 1 ? m[0][0] : m[0][0] * m[1][1] - m[0][1] * m[1][0];
  }
  double trace(int dim) const { return dim == 1 ? m[0][0] : m[0][0] + m[1][1]; }
  Mat2 transpose(int dim) const {
    Mat2 r = *this;
    if (dim == 2) std::swap(r.m[0][1], r.m[1][0]);
    return r;
  }
  Mat2 inverse(int dim) const {
    Mat2 r;
    if (dim == 1) {
      r.m[0][0] = 1.0 / m[0][0];
      return r;
    }
    const double d = det(2);
    r.m[0][0] = m[1][1] / d;
    r.m[0][1] = -m[0][1] / d;
    r.m[1][0] = -m[1][0] / d;
    r.m[1][1] = m[0][0] / d;
    return r;
  }
  Mat2 mul(const Mat2& o, int dim) const {
    Mat2 r;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += m[i][k] * o.m[k][j];
        r.m[i][j] = s;
      }
    return r;
  }
  Vec2 mul(const Vec2& v, int dim) const {
    if (dim == 1) return {m[0][0] * v.x, 0.0};
    return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
  }
  Mat2 scaled(double s, int dim) const {
    Mat2 r;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) r.m[i][j] = m[i][j] * s;
    return r;
  }
  Mat2 plus(const Mat2& o, int dim) const {
    Mat2 r;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }
};

// Error taxonomy. The CLI maps ConfigError to exit code 2 and the rest to 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
// Inconsistent mesh structure (bad connectivity, nonpositive volume at build time).
struct StructureError : Error {
  using Error::Error;
};
// A mesh update produced inverted/degenerate elements where validity is required.
struct TangledMeshError : Error {
  using Error::Error;
};
// Water depth cell average fell below the representable floor.
struct PositivityError : Error {
  using Error::Error;
};
// Point location failed (point outside the mesh beyond tolerance).
struct PointLocationError : Error {
  using Error::Error;
};
// Iteration/step-count budgets exceeded or non-finite values encountered.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace mmswe

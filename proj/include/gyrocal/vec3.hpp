#pragma once

#include <cmath>

namespace gyrocal {

// Plain 3-component value. Used both for angular velocities (rad/s) and for
// unit axis directions; it carries no frame metadata.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend constexpr Vec3 operator*(double s, const Vec3& v) {
    return {s * v.x, s * v.y, s * v.z};
  }
  friend constexpr Vec3 operator*(const Vec3& v, double s) { return s * v; }

  friend constexpr double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
  }

  double norm() const { return std::sqrt(dot(*this, *this)); }

  Vec3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }

  bool all_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

enum class Axis { X = 0, Y = 1, Z = 2 };

inline Vec3 unit_vector(Axis axis) {
  Vec3 v{};
  v[static_cast<int>(axis)] = 1.0;
  return v;
}

inline const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    default: return "z";
  }
}

}  // namespace gyrocal

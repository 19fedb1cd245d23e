#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace dstomo {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double a) const { return {a * x, a * y, a * z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
};

inline Vec3 operator*(double a, const Vec3& v) { return v * a; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// 2x2 complex matrix, row-major storage.
struct Mat2 {
  std::array<std::complex<double>, 4> m{};

  std::complex<double>& operator()(int i, int j) { return m[static_cast<std::size_t>(2 * i + j)]; }
  const std::complex<double>& operator()(int i, int j) const {
    return m[static_cast<std::size_t>(2 * i + j)];
  }

  static Mat2 identity() { return Mat2{{1.0, 0.0, 0.0, 1.0}}; }

  /// (I + r.sigma)/2 in the convention rho01 = (r_x - i r_y)/2.
  static Mat2 from_bloch(const Vec3& r) {
    Mat2 out;
    out(0, 0) = 0.5 * (1.0 + r.z);
    out(0, 1) = 0.5 * std::complex<double>(r.x, -r.y);
    out(1, 0) = 0.5 * std::complex<double>(r.x, r.y);
    out(1, 1) = 0.5 * (1.0 - r.z);
    return out;
  }

  /// Bloch vector Tr(rho sigma) of a unit-trace Hermitian matrix.
  Vec3 bloch() const {
    return {2.0 * (*this)(1, 0).real(), 2.0 * (*this)(1, 0).imag(),
            ((*this)(0, 0) - (*this)(1, 1)).real()};
  }

  std::complex<double> trace() const { return m[0] + m[3]; }

  Mat2 operator*(const Mat2& o) const {
    Mat2 r;
    r(0, 0) = (*this)(0, 0) * o(0, 0) + (*this)(0, 1) * o(1, 0);
    r(0, 1) = (*this)(0, 0) * o(0, 1) + (*this)(0, 1) * o(1, 1);
    r(1, 0) = (*this)(1, 0) * o(0, 0) + (*this)(1, 1) * o(1, 0);
    r(1, 1) = (*this)(1, 0) * o(0, 1) + (*this)(1, 1) * o(1, 1);
    return r;
  }

  Mat2 operator+(const Mat2& o) const {
    Mat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = m[i] + o.m[i];
    return r;
  }

  Mat2 operator-(const Mat2& o) const {
    Mat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }

  Mat2 operator*(double a) const {
    Mat2 r;
    for (std::size_t i = 0; i < 4; ++i) r.m[i] = a * m[i];
    return r;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : m) s += std::norm(v);
    return std::sqrt(s);
  }
};

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
/// Returns eigenvalues ascending; columns of `vectors` are the eigenvectors.
struct SymEig3 {
  std::array<double, 3> values{};
  std::array<Vec3, 3> vectors{};
};

SymEig3 sym_eig3(const std::array<std::array<double, 3>, 3>& a);

}  // namespace dstomo

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace rotorb {

/// Fixed-size real vector; points are row vectors acted on from the right.
template <int D>
struct Vec {
  static_assert(D == 2 || D == 3, "only the plane and 3-space are supported");
  std::array<double, D> c{};

  constexpr Vec() = default;
  constexpr Vec(std::initializer_list<double> init) {
    if (init.size() != D) throw std::invalid_argument("vector initializer has wrong length");
    std::size_t i = 0;
    for (double v : init) c[i++] = v;
  }

  constexpr double& operator[](std::size_t i) { return c[i]; }
  constexpr double operator[](std::size_t i) const { return c[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] += o.c[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < D; ++i) c[i] -= o.c[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator/(Vec a, double s) { return a *= (1.0 / s); }
  friend Vec operator-(Vec a) { return a *= -1.0; }
  friend bool operator==(const Vec&, const Vec&) = default;
};

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

template <int D>
double dot(const Vec<D>& a, const Vec<D>& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}

template <int D>
double norm(const Vec<D>& a) {
  return std::sqrt(dot(a, a));
}

template <int D>
double distance(const Vec<D>& a, const Vec<D>& b) {
  return norm(a - b);
}

template <int D>
double chebyshev(const Vec<D>& a, const Vec<D>& b) {
  double m = 0.0;
  for (int i = 0; i < D; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Square matrix stored by rows. `p * m` is the row-vector product.
template <int D>
struct Mat {
  std::array<Vec<D>, D> rows{};

  static Mat identity() {
    Mat m;
    for (int i = 0; i < D; ++i) m.rows[i][i] = 1.0;
    return m;
  }

  double operator()(int r, int col) const { return rows[r][col]; }
  double& operator()(int r, int col) { return rows[r][col]; }

  Mat transposed() const {
    Mat t;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) t.rows[j][i] = rows[i][j];
    return t;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat out;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        double s = 0.0;
        for (int k = 0; k < D; ++k) s += a.rows[i][k] * b.rows[k][j];
        out.rows[i][j] = s;
      }
    return out;
  }

  friend Vec<D> operator*(const Vec<D>& p, const Mat& m) {
    Vec<D> out;
    for (int j = 0; j < D; ++j) {
      double s = 0.0;
      for (int k = 0; k < D; ++k) s += p[k] * m.rows[k][j];
      out[j] = s;
    }
    return out;
  }

  friend bool operator==(const Mat&, const Mat&) = default;
};

template <int D>
double determinant(const Mat<D>& m) {
  if constexpr (D == 2) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  } else {
    return dot(m.rows[0], cross(m.rows[1], m.rows[2]));
  }
}

/// Largest entry of |M^T M - I|.
template <int D>
double orthogonality_defect(const Mat<D>& m) {
  const auto g = m.transposed() * m;
  double worst = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return worst;
}

}  // namespace rotorb

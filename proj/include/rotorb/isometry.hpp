#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>

#include "rotorb/tolerances.hpp"
#include "rotorb/vec.hpp"

namespace rotorb {

/// Orientation-preserving rigid motion P -> P*linear + shift.
///
/// Every composition bumps a counter; once it reaches
/// tol::renormalize_every the linear part is re-orthonormalized so that long
/// words do not drift off SO(d).
template <int D>
class Isometry {
 public:
  Isometry() : linear_{Mat<D>::identity()} {}

  static Isometry identity() { return Isometry{}; }

  /// Validates linear^T linear = I and det = +1 within tol::geometric.
  static Isometry from_parts(const Mat<D>& linear, const Vec<D>& shift) {
    if (orthogonality_defect(linear) > tol::geometric) {
      throw std::invalid_argument("linear part is not orthogonal");
    }
    if (std::abs(determinant(linear) - 1.0) > tol::geometric) {
      throw std::invalid_argument("linear part is not a proper rotation (det != +1)");
    }
    Isometry f;
    f.linear_ = linear;
    f.shift_ = shift;
    return f;
  }

  const Mat<D>& linear() const { return linear_; }
  const Vec<D>& shift() const { return shift_; }
  int pending_compositions() const { return pending_; }

  Vec<D> apply(const Vec<D>& p) const { return p * linear_ + shift_; }

  /// The map P -> (P f) g.
  Isometry then(const Isometry& g) const {
    Isometry out;
    out.linear_ = linear_ * g.linear_;
    out.shift_ = shift_ * g.linear_ + g.shift_;
    out.pending_ = pending_ + g.pending_ + 1;
    if (out.pending_ >= tol::renormalize_every) out = out.orthonormalized();
    return out;
  }

  Isometry inverse() const {
    Isometry out;
    out.linear_ = linear_.transposed();
    out.shift_ = -(shift_ * out.linear_);
    out.pending_ = pending_;
    return out;
  }

  /// Gram-Schmidt on the rows; the last row is rebuilt so det stays +1.
  Isometry orthonormalized() const {
    Isometry out = *this;
    auto& r = out.linear_.rows;
    r[0] = r[0] / norm(r[0]);
    if constexpr (D == 2) {
      r[1] = Vec<2>{-r[0][1], r[0][0]};
    } else {
      r[1] = r[1] - dot(r[1], r[0]) * r[0];
      r[1] = r[1] / norm(r[1]);
      r[2] = cross(r[0], r[1]);
    }
    out.pending_ = 0;
    return out;
  }

 private:
  Mat<D> linear_;
  Vec<D> shift_{};
  int pending_ = 0;
};

using Isometry2 = Isometry<2>;
using Isometry3 = Isometry<3>;

template <int D>
Isometry<D> compose(const Isometry<D>& f, const Isometry<D>& g) {
  return f.then(g);
}

template <int D>
Isometry<D> inverse(const Isometry<D>& f) {
  return f.inverse();
}

template <int D>
Vec<D> apply_point(const Isometry<D>& f, const Vec<D>& p) {
  return f.apply(p);
}

/// Origin plus the unit basis vectors; two direct isometries agreeing on
/// these agree everywhere.
template <int D>
std::array<Vec<D>, D + 1> probe_frame() {
  std::array<Vec<D>, D + 1> frame{};
  for (int i = 0; i < D; ++i) frame[i + 1][i] = 1.0;
  return frame;
}

/// Max distance between the images of the probe frame under f and g.
template <int D>
double probe_deviation(const Isometry<D>& f, const Isometry<D>& g) {
  double worst = 0.0;
  for (const auto& p : probe_frame<D>()) worst = std::max(worst, distance(f.apply(p), g.apply(p)));
  return worst;
}

}  // namespace rotorb

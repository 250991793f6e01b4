#include "asep/lattice.hpp"

#include <limits>
#include <stdexcept>

namespace asep {

Lattice::Lattice(int inv_eps, int dim, bool wrap_axis0)
    : dim_(dim), inv_eps_(inv_eps), wrap_axis0_(wrap_axis0) {
  if (inv_eps < 1) throw std::invalid_argument("lattice: inv_eps must be >= 1");
  if (dim < 1 || dim > kMaxDim)
    throw std::invalid_argument("lattice: dim out of range");
  side_ = 2 * inv_eps + 1;

  double approx = 1.0;
  for (int i = 0; i < dim; ++i) approx *= side_;
  if (approx >= double(std::numeric_limits<int32_t>::max()))
    throw std::invalid_argument("lattice: site count exceeds 2^31");

  site_count_ = 1;
  for (int i = dim_ - 1; i >= 0; --i) {
    stride_[i] = site_count_;
    site_count_ *= side_;
  }
  face_count_ = site_count_ / side_;

  neighbors_.resize(size_t(site_count_) * dim_ * 2);
  Coords c{};
  for (int i = 0; i < dim_; ++i) c[i] = -inv_eps_;
  for (int64_t s = 0; s < site_count_; ++s) {
    for (int i = 0; i < dim_; ++i) {
      for (int dir = 0; dir < 2; ++dir) {
        int step = dir == 0 ? -1 : +1;
        int32_t target;
        int v = c[i] + step;
        if (i == 0 && !wrap_axis0_) {
          target = (v < -inv_eps_ || v > inv_eps_)
                       ? -1
                       : int32_t(s + step * stride_[0]);
        } else {
          int64_t t = s + step * stride_[i];
          if (v > inv_eps_) t -= int64_t(side_) * stride_[i];
          if (v < -inv_eps_) t += int64_t(side_) * stride_[i];
          target = int32_t(t);
        }
        neighbors_[(size_t(s) * dim_ + i) * 2 + dir] = target;
      }
    }
    // advance odometer, fastest axis last
    for (int i = dim_ - 1; i >= 0; --i) {
      if (++c[i] <= inv_eps_) break;
      c[i] = -inv_eps_;
    }
  }
}

Lattice Lattice::cylinder(int inv_eps, int dim) {
  return Lattice(inv_eps, dim, false);
}

Lattice Lattice::torus(int inv_eps, int dim) {
  return Lattice(inv_eps, dim, true);
}

int64_t Lattice::encode(const Coords& c) const {
  int64_t s = 0;
  for (int i = 0; i < dim_; ++i) {
    if (c[i] < -inv_eps_ || c[i] > inv_eps_)
      throw std::out_of_range("lattice: coordinate outside lattice");
    s += int64_t(c[i] + inv_eps_) * stride_[i];
  }
  return s;
}

Coords Lattice::decode(int64_t site) const {
  if (site < 0 || site >= site_count_)
    throw std::out_of_range("lattice: site index outside lattice");
  Coords c{};
  for (int i = 0; i < dim_; ++i) {
    c[i] = int32_t(site / stride_[i]) % side_ - inv_eps_;
  }
  return c;
}

std::optional<int64_t> Lattice::neighbor(int64_t site, int axis,
                                         int sign) const {
  if (axis < 1 || axis > dim_)
    throw std::invalid_argument("lattice: axis must be in [1,dim]");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("lattice: sign must be +1 or -1");
  if (site < 0 || site >= site_count_)
    throw std::out_of_range("lattice: site index outside lattice");
  int32_t t = neighbor_raw(site, axis - 1, sign == 1 ? 1 : 0);
  if (t < 0) return std::nullopt;
  return int64_t(t);
}

BoundaryClass Lattice::classify(int64_t site) const {
  if (site < 0 || site >= site_count_)
    throw std::out_of_range("lattice: site index outside lattice");
  if (wrap_axis0_) return BoundaryClass::Interior;
  if (site < face_count_) return BoundaryClass::GammaPlus;
  if (site >= site_count_ - face_count_) return BoundaryClass::GammaMinus;
  return BoundaryClass::Interior;
}

}  // namespace asep

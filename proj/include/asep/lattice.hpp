#ifndef ASEP_LATTICE_HPP
#define ASEP_LATTICE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace asep {

inline constexpr int kMaxDim = 8;

using Coords = std::array<int32_t, kMaxDim>;

enum class BoundaryClass { Interior, GammaPlus, GammaMinus };

// Finite cylinder {-inv_eps,...,inv_eps}^dim with a hard wall on axis 0 and
// periodic identification on every other axis. GammaPlus is the x1 = -inv_eps
// face (particle creation side), GammaMinus the x1 = +inv_eps face.
// The torus variant wraps axis 0 as well; it has no boundary faces and is
// used for bulk-only measurements.
//
// Linear site indices are row-major with axis 0 slowest, so every axis-0
// slice (boundary faces, transverse planes) is one contiguous range.
class Lattice {
 public:
  static Lattice cylinder(int inv_eps, int dim);
  static Lattice torus(int inv_eps, int dim);

  int dim() const { return dim_; }
  int inv_eps() const { return inv_eps_; }
  int side() const { return side_; }
  int64_t site_count() const { return site_count_; }
  bool wraps_axis0() const { return wrap_axis0_; }
  double eps() const { return 1.0 / inv_eps_; }

  // Sites per axis-0 slice, which is also the size of each boundary face.
  int64_t face_site_count() const { return face_count_; }

  int64_t encode(const Coords& c) const;
  Coords decode(int64_t site) const;

  // axis is 1-based, sign is +1 or -1; absent only across the axis-0 wall.
  // Invalid axis/sign arguments throw.
  std::optional<int64_t> neighbor(int64_t site, int axis, int sign) const;

  BoundaryClass classify(int64_t site) const;

  bool on_left_face(int64_t site) const {
    return !wrap_axis0_ && site < face_count_;
  }
  bool on_right_face(int64_t site) const {
    return !wrap_axis0_ && site >= site_count_ - face_count_;
  }
  // Position of a face site within its face, in [0, face_site_count).
  int64_t transverse_index(int64_t site) const { return site % face_count_; }

  // Macroscopic embedding: coordinate c maps to c*eps on axis 0 (so the faces
  // sit exactly at -1 and +1) and to 2c/side on periodic axes (so the wrap is
  // consistent with a torus of length 2).
  double macro_position(int coord, int axis0based) const {
    if (axis0based == 0 && !wrap_axis0_) return double(coord) / inv_eps_;
    return 2.0 * coord / side_;
  }

  // Raw table lookup, -1 across the wall. axis0based in [0,dim), dir in {0,1}
  // for -1/+1. Hot path for the event engine.
  int32_t neighbor_raw(int64_t site, int axis0based, int dir) const {
    return neighbors_[(site * dim_ + axis0based) * 2 + dir];
  }

 private:
  Lattice(int inv_eps, int dim, bool wrap_axis0);

  int dim_ = 0;
  int inv_eps_ = 0;
  int side_ = 0;
  bool wrap_axis0_ = false;
  int64_t site_count_ = 0;
  int64_t face_count_ = 0;
  std::array<int64_t, kMaxDim> stride_{};
  std::vector<int32_t> neighbors_;
};

}  // namespace asep

#endif

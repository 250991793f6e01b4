#ifndef ASEP_SCALAR_FIELD_HPP
#define ASEP_SCALAR_FIELD_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asep/lattice.hpp"

namespace asep {

// Real-valued field on a rectilinear grid over the macroscopic domain
// [-1,1] x torus^(d-1). Axis 0 is the bounded direction; periodic axes have
// n nodes with spacing 2/n placed symmetrically around 0. Values are stored
// row-major with axis 0 slowest, matching the lattice layout.
struct ScalarField {
  struct Axis {
    int n = 0;
    double origin = 0.0;
    double spacing = 0.0;
    bool periodic = false;
  };

  struct Meta {
    std::optional<double> eps;
    std::optional<int> block_radius;
    std::optional<double> time;
    std::optional<uint64_t> seed;
    std::string variant;
  };

  int dim = 0;
  std::vector<Axis> axes;
  std::vector<double> values;
  Meta meta;

  int64_t size() const;
  double node_position(int axis, int index) const {
    return axes[axis].origin + index * axes[axis].spacing;
  }
  // Whether two fields live on the same grid (within 1e-12 on geometry).
  bool same_grid(const ScalarField& other) const;

  double& at(std::span<const int> idx);
  double at(std::span<const int> idx) const;

  // Bounded axis with n nodes spanning [lo, lo + (n-1)h].
  static ScalarField zeros(const std::vector<Axis>& axes);
  // Grid whose nodes coincide with the macroscopic positions of all lattice
  // sites (axis 0 spacing eps, periodic spacing 2/side).
  static ScalarField lattice_grid(const Lattice& lattice);
};

// CSV with one row per node: u1,...,ud,value with 17 significant digits so a
// read-back reproduces every double bit-exactly. The JSON sidecar (same path
// with .json appended) records the grid and the meta block.
void write_field_csv(const std::string& path, const ScalarField& field);
ScalarField read_field_csv(const std::string& path);

}  // namespace asep

#endif

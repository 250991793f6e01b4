#include "asep/observables.hpp"

#include <cmath>
#include <stdexcept>

namespace asep {

namespace {

// One separable pass of the box window along a given axis, via prefix sums
// per line (exact wrap for periodic axes, clipping for the bounded one).
void box_pass(std::vector<double>& data, int side, int64_t inner,
              int64_t outer, int k, bool periodic) {
  const int n = side;
  std::vector<double> prefix(static_cast<size_t>(n) + 1);
  std::vector<double> line(static_cast<size_t>(n));
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t i = 0; i < inner; ++i) {
      const int64_t base = o * int64_t(n) * inner + i;
      for (int t = 0; t < n; ++t) line[size_t(t)] = data[size_t(base + t * inner)];
      prefix[0] = 0.0;
      for (int t = 0; t < n; ++t) prefix[size_t(t) + 1] = prefix[size_t(t)] + line[size_t(t)];
      for (int t = 0; t < n; ++t) {
        double s;
        if (periodic) {
          int lo = t - k, hi = t + k;
          if (lo < 0) {
            s = (prefix[size_t(n)] - prefix[size_t(lo + n)]) + prefix[size_t(hi) + 1];
          } else if (hi >= n) {
            s = (prefix[size_t(n)] - prefix[size_t(lo)]) + prefix[size_t(hi - n) + 1];
          } else {
            s = prefix[size_t(hi) + 1] - prefix[size_t(lo)];
          }
        } else {
          int lo = std::max(t - k, 0), hi = std::min(t + k, n - 1);
          s = prefix[size_t(hi) + 1] - prefix[size_t(lo)];
        }
        data[size_t(base + t * inner)] = s;
      }
    }
  }
}

// Box sums of radius k around every site, in place.
void block_sums(const Lattice& lattice, std::vector<double>& data, int k) {
  const int d = lattice.dim();
  const int side = lattice.side();
  int64_t inner = lattice.site_count();
  int64_t outer = 1;
  for (int a = 0; a < d; ++a) {
    inner /= side;
    const bool periodic = a > 0 || lattice.wraps_axis0();
    box_pass(data, side, inner, outer, k, periodic);
    outer *= side;
  }
}

void check_block(const Lattice& lattice, const BlockSpec& block) {
  if (block.radius < 1)
    throw std::invalid_argument("block: radius must be >= 1");
  if (block.radius >= lattice.inv_eps())
    throw std::invalid_argument("block: radius must satisfy k < inv_eps");
}

std::vector<ScalarField::Axis> block_axes(const Lattice& lattice, int k,
                                          BlockMode mode) {
  ScalarField grid = ScalarField::lattice_grid(lattice);
  std::vector<ScalarField::Axis> axes = grid.axes;
  if (mode == BlockMode::Restricted && !lattice.wraps_axis0()) {
    axes[0].n = lattice.side() - 2 * k;
    axes[0].origin = -1.0 + k * lattice.eps();
  }
  return axes;
}

}  // namespace

ScalarField empirical_field(const Lattice& lattice,
                            std::span<const uint8_t> occupancy,
                            const BlockSpec& block, BlockMode mode) {
  check_block(lattice, block);
  if (int64_t(occupancy.size()) != lattice.site_count())
    throw std::invalid_argument("empirical field: occupancy size mismatch");

  const int k = block.radius;
  std::vector<double> sums(occupancy.begin(), occupancy.end());
  block_sums(lattice, sums, k);

  const int side = lattice.side();
  const int64_t face = lattice.site_count() / side;
  const double inv_eps = double(lattice.inv_eps());
  const bool clipped = !lattice.wraps_axis0();

  // cells per block = (2k+1)^(d-1) times the clipped axis-0 extent
  double cells_transverse = 1.0;
  for (int a = 1; a < lattice.dim(); ++a) cells_transverse *= 2 * k + 1;
  if (!clipped) cells_transverse *= 2 * k + 1;

  ScalarField out = ScalarField::zeros(block_axes(lattice, k, mode));
  out.meta.eps = lattice.eps();
  out.meta.block_radius = k;

  const int t0 = (mode == BlockMode::Restricted && clipped) ? k : 0;
  const int t1 = (mode == BlockMode::Restricted && clipped) ? side - k : side;
  int64_t flat = 0;
  for (int t = t0; t < t1; ++t) {
    double cells = cells_transverse;
    if (clipped)
      cells *= std::min(t + k, side - 1) - std::max(t - k, 0) + 1;
    for (int64_t i = 0; i < face; ++i, ++flat) {
      const double mean = sums[size_t(t) * face + size_t(i)] / cells;
      out.values[size_t(flat)] = inv_eps * (mean - 0.5);
    }
  }
  return out;
}

ScalarField block_smooth(const Lattice& lattice, const ScalarField& field,
                         const BlockSpec& block, BlockMode mode) {
  check_block(lattice, block);
  ScalarField grid = ScalarField::lattice_grid(lattice);
  if (!field.same_grid(grid))
    throw std::invalid_argument(
        "block smooth: field must live on the full lattice grid");

  const int k = block.radius;
  std::vector<double> sums = field.values;
  block_sums(lattice, sums, k);

  const int side = lattice.side();
  const int64_t face = lattice.site_count() / side;
  const bool clipped = !lattice.wraps_axis0();

  double cells_transverse = 1.0;
  for (int a = 1; a < lattice.dim(); ++a) cells_transverse *= 2 * k + 1;
  if (!clipped) cells_transverse *= 2 * k + 1;

  ScalarField out = ScalarField::zeros(block_axes(lattice, k, mode));
  out.meta = field.meta;
  out.meta.block_radius = k;

  const int t0 = (mode == BlockMode::Restricted && clipped) ? k : 0;
  const int t1 = (mode == BlockMode::Restricted && clipped) ? side - k : side;
  int64_t flat = 0;
  for (int t = t0; t < t1; ++t) {
    double cells = cells_transverse;
    if (clipped)
      cells *= std::min(t + k, side - 1) - std::max(t - k, 0) + 1;
    for (int64_t i = 0; i < face; ++i, ++flat)
      out.values[size_t(flat)] = sums[size_t(t) * face + size_t(i)] / cells;
  }
  return out;
}

double current(const Lattice& lattice, std::span<const uint8_t> occupancy,
               int64_t site, int axis, double delta_i) {
  auto nb = lattice.neighbor(site, axis, +1);
  if (!nb) return 0.0;
  const double ex = occupancy[size_t(site)];
  const double ey = occupancy[size_t(*nb)];
  return -(ey - ex) + delta_i * (ey * ex - 0.5 * (ex + ey));
}

double current_gradient_part(const Lattice& lattice,
                             std::span<const uint8_t> occupancy, int64_t site,
                             int axis) {
  auto nb = lattice.neighbor(site, axis, +1);
  if (!nb) return 0.0;
  const double ex = occupancy[size_t(site)];
  const double ey = occupancy[size_t(*nb)];
  return -(ey - ex);
}

double conditional_current_mean(double rho_bar, int64_t cells,
                                double delta_i) {
  if (cells < 2)
    throw std::invalid_argument("conditional current: block needs >= 2 cells");
  return delta_i * (1.0 + 1.0 / double(cells - 1)) * rho_bar * (rho_bar - 1.0);
}

double chemical_potential(double m, double eps) {
  const double x = 2.0 * eps * m;
  if (std::fabs(x) >= 1.0)
    throw std::invalid_argument("chemical potential: need |2 eps m| < 1");
  return std::log((1.0 + x) / (1.0 - x)) / eps;
}

double product_relative_entropy(const ScalarField& rho1,
                                const ScalarField& rho2, double eps) {
  if (!rho1.same_grid(rho2))
    throw std::invalid_argument("relative entropy: fields on different grids");
  double sum = 0.0;
  const int64_t n = rho1.size();
  for (int64_t i = 0; i < n; ++i) {
    const double p = rho1.values[size_t(i)];
    const double q = rho2.values[size_t(i)];
    if (p <= 0.0 || p >= 1.0 || q <= 0.0 || q >= 1.0)
      throw std::invalid_argument(
          "relative entropy: probabilities must lie strictly in (0,1)");
    sum += p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  return std::pow(eps, rho1.dim) * sum;
}

std::vector<double> slice_profile(const Lattice& lattice,
                                  std::span<const uint8_t> occupancy) {
  const int side = lattice.side();
  const int64_t face = lattice.site_count() / side;
  std::vector<double> profile(static_cast<size_t>(side));
  for (int t = 0; t < side; ++t) {
    int64_t count = 0;
    for (int64_t i = 0; i < face; ++i)
      count += occupancy[size_t(t) * size_t(face) + size_t(i)];
    profile[size_t(t)] =
        lattice.inv_eps() * (double(count) / double(face) - 0.5);
  }
  return profile;
}

}  // namespace asep

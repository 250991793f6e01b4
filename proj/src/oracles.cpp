#include "asep/oracles.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace asep {

std::array<std::array<double, 8>, 8> three_site_rate_matrix(
    const ModelParams& params, double b_left, double b_right) {
  if (params.dim != 1)
    throw std::invalid_argument("three-site oracle: dim must be 1");
  params.validate();
  params.validate_boundary();
  const double pp = params.p_plus[0];
  const double pm = params.p_minus[0];
  const double d1 = params.delta(0);
  const double eps = 1.0;  // inv_eps = 1 by construction
  if (std::fabs(eps * b_left) >= 0.5 || std::fabs(eps * b_right) >= 0.5)
    throw std::invalid_argument("three-site oracle: |eps*b| must be < 1/2");

  std::array<std::array<double, 8>, 8> rate{};
  for (int s = 0; s < 8; ++s) {
    const int eta0 = s & 1, eta1 = (s >> 1) & 1, eta2 = (s >> 2) & 1;

    // exchange across bond (0,1): r = p+ eta0(1-eta1) + p- eta1(1-eta0)
    if (eta0 != eta1) {
      const int t = (s & ~3) | (eta1 << 0) | (eta0 << 1);
      rate[s][t] += eta0 ? pp : pm;
    }
    // exchange across bond (1,2)
    if (eta1 != eta2) {
      const int t = (s & ~6) | (eta2 << 1) | (eta1 << 2);
      rate[s][t] += eta1 ? pp : pm;
    }

    if (params.variant == BoundaryVariant::DriftAligned) {
      // creation on the left face when empty, with rate d1(1/2 + eps b)
      if (!eta0) rate[s][s | 1] += d1 * (0.5 + eps * b_left);
      // annihilation on the right face when occupied, rate d1(1/2 - eps b)
      if (eta2) rate[s][s & ~4] += d1 * (0.5 - eps * b_right);
    } else {
      const double mult = 1.0;  // eps = 1 makes any clock speedup the identity
      const double rho_l = 0.5 + eps * b_left;
      const double rho_r = 0.5 + eps * b_right;
      if (!eta0) rate[s][s | 1] += mult * rho_l;
      if (eta0) rate[s][s & ~1] += mult * (1.0 - rho_l);
      if (!eta2) rate[s][s | 4] += mult * rho_r;
      if (eta2) rate[s][s & ~4] += mult * (1.0 - rho_r);
    }
  }
  return rate;
}

double enumerated_block_current_mean(int cells, int particles,
                                     double delta_i) {
  if (cells < 2 || cells > 20)
    throw std::invalid_argument("block oracle: cells must be in [2,20]");
  if (particles < 0 || particles > cells)
    throw std::invalid_argument("block oracle: bad particle number");

  // Any fixed pair of distinct cells works: the canonical measure is
  // exchangeable. Use cells 0 and 1.
  double sum = 0.0;
  uint64_t count = 0;
  const uint32_t limit = uint32_t(1) << cells;
  for (uint32_t mask = 0; mask < limit; ++mask) {
    if (std::popcount(mask) != particles) continue;
    const double ea = mask & 1u ? 1.0 : 0.0;
    const double eb = mask & 2u ? 1.0 : 0.0;
    sum += delta_i * (ea * eb - 0.5 * (ea + eb));
    ++count;
  }
  return sum / double(count);
}

std::vector<double> shooting_steady_profile(double delta1, double d11,
                                            double b_left, double b_right,
                                            int n_nodes) {
  if (n_nodes < 3)
    throw std::invalid_argument("shooting oracle: need at least 3 nodes");
  if (d11 <= 0)
    throw std::invalid_argument("shooting oracle: d11 must be positive");

  const double h = 2.0 / (n_nodes - 1);
  const int substeps = std::max(1, (8192 + n_nodes - 2) / (n_nodes - 1));

  // m'' = -(delta1/d11) * 2 m m'
  auto rhs = [&](double m, double v, double& dm, double& dv) {
    dm = v;
    dv = -(delta1 / d11) * 2.0 * m * v;
  };

  auto integrate = [&](double slope, std::vector<double>* out) -> double {
    double m = b_left, v = slope;
    if (out) (*out)[0] = m;
    for (int node = 0; node < n_nodes - 1; ++node) {
      const double dt = h / substeps;
      for (int s = 0; s < substeps; ++s) {
        double k1m, k1v, k2m, k2v, k3m, k3v, k4m, k4v;
        rhs(m, v, k1m, k1v);
        rhs(m + 0.5 * dt * k1m, v + 0.5 * dt * k1v, k2m, k2v);
        rhs(m + 0.5 * dt * k2m, v + 0.5 * dt * k2v, k3m, k3v);
        rhs(m + dt * k3m, v + dt * k3v, k4m, k4v);
        m += dt / 6.0 * (k1m + 2 * k2m + 2 * k3m + k4m);
        v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        if (std::fabs(m) > 1e3) return m > 0 ? 1e3 : -1e3;
      }
      if (out) (*out)[size_t(node) + 1] = m;
    }
    return m;
  };

  // m(1) is increasing in the initial slope; scan for a bracket, then bisect.
  double lo = -64.0, hi = 64.0;
  double flo = integrate(lo, nullptr) - b_right;
  double fhi = integrate(hi, nullptr) - b_right;
  if (flo > 0 || fhi < 0)
    throw std::runtime_error("shooting oracle: no bracket for the slope");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = integrate(mid, nullptr) - b_right;
    if (f < 0)
      lo = mid;
    else
      hi = mid;
  }

  std::vector<double> profile(size_t(n_nodes));
  integrate(0.5 * (lo + hi), &profile);
  profile[size_t(n_nodes) - 1] = b_right;  // pin the hit endpoint
  return profile;
}

}  // namespace asep

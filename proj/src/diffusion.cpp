#include "asep/diffusion.hpp"

#include <cmath>
#include <stdexcept>

#include "asep/parallel.hpp"
#include "asep/rng.hpp"
#include "asep/simulation.hpp"
#include "asep/small_matrix.hpp"

namespace asep {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNoiseCut = 3.0;  // keep points with amplitude > 3 se
}  // namespace

RateEstimate relax_mode(const Lattice& torus, const ModelParams& params,
                        const ModeProbe& probe, uint64_t master_seed,
                        int workers) {
  if (!torus.wraps_axis0())
    throw std::invalid_argument("relax mode: lattice must be a full torus");
  if (int(probe.wavevector.size()) != torus.dim())
    throw std::invalid_argument("relax mode: wavevector dim mismatch");
  bool nonzero = false;
  for (int q : probe.wavevector) nonzero |= q != 0;
  if (!nonzero)
    throw std::invalid_argument("relax mode: wavevector must be nonzero");
  if (std::fabs(probe.amplitude) >= 0.5)
    throw std::invalid_argument("relax mode: amplitude must satisfy |a| < 1/2");
  if (probe.replicas < 2)
    throw std::invalid_argument("relax mode: need at least 2 replicas");
  if (probe.macro_times.size() < 3)
    throw std::invalid_argument("relax mode: need at least 3 observation times");

  const int64_t sites = torus.site_count();
  const int side = torus.side();
  const double inv_eps = double(torus.inv_eps());

  std::vector<double> cos_table(static_cast<size_t>(sites));
  std::vector<double> m0(static_cast<size_t>(sites));
  for (int64_t s = 0; s < sites; ++s) {
    Coords c = torus.decode(s);
    double theta = 0.0;
    for (int a = 0; a < torus.dim(); ++a)
      theta += 2.0 * kPi * probe.wavevector[size_t(a)] * c[size_t(a)] / side;
    cos_table[size_t(s)] = std::cos(theta);
    m0[size_t(s)] = probe.amplitude * inv_eps * cos_table[size_t(s)];
  }

  const int M = probe.replicas;
  const size_t T = probe.macro_times.size();
  std::vector<std::vector<double>> proj(size_t(M),
                                        std::vector<double>(T, 0.0));

  parallel_for(M, workers, [&](int64_t r) {
    Rng rng = Rng::for_stream(master_seed, uint64_t(r));
    ExclusionProcess process(torus, params, BoundaryProfile{});
    process.sample_initial(m0, rng);
    auto measure = [&](size_t idx, double) {
      double acc = 0.0;
      auto occ = process.occupancy();
      for (int64_t s = 0; s < sites; ++s)
        acc += (double(occ[size_t(s)]) - 0.5) * cos_table[size_t(s)];
      proj[size_t(r)][idx] = 2.0 * acc / double(sites);
    };
    process.run_until_macro(probe.macro_times.back(), probe.macro_times, rng,
                            measure);
  });

  RateEstimate est;
  est.amplitudes.resize(T);
  est.amplitude_se.resize(T);
  for (size_t j = 0; j < T; ++j) {
    double mean = 0.0;
    for (int r = 0; r < M; ++r) mean += proj[size_t(r)][j];
    mean /= M;
    double var = 0.0;
    for (int r = 0; r < M; ++r) {
      const double d = proj[size_t(r)][j] - mean;
      var += d * d;
    }
    var /= double(M - 1);
    est.amplitudes[j] = mean;
    est.amplitude_se[j] = std::sqrt(var / M);
  }

  // Weighted least squares of ln A against macro time over the window where
  // the signal clears the noise floor.
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  int used = 0;
  for (size_t j = 0; j < T; ++j) {
    const double a = est.amplitudes[j];
    const double se = est.amplitude_se[j];
    if (!(a > 0.0) || !(a > kNoiseCut * se)) continue;
    const double y = std::log(a);
    const double w = se > 0 ? (a / se) * (a / se) : 1.0;
    const double x = probe.macro_times[j];
    sw += w;
    swx += w * x;
    swy += w * y;
    swxx += w * x * x;
    swxy += w * x * y;
    ++used;
  }
  est.points_used = used;
  if (used < 3) {
    est.note = "fewer than 3 usable points above the noise floor";
    return est;
  }
  const double det = sw * swxx - swx * swx;
  if (det <= 0) {
    est.note = "degenerate fit window";
    return est;
  }
  const double slope = (sw * swxy - swx * swy) / det;
  est.rate = -slope;
  est.se = std::sqrt(sw / det);

  double ybar = swy / sw;
  double ss_tot = 0, ss_res = 0;
  for (size_t j = 0; j < T; ++j) {
    const double a = est.amplitudes[j];
    const double se = est.amplitude_se[j];
    if (!(a > 0.0) || !(a > kNoiseCut * se)) continue;
    const double w = se > 0 ? (a / se) * (a / se) : 1.0;
    const double y = std::log(a);
    const double intercept = (swy - slope * swx) / sw;
    const double fit = intercept + slope * probe.macro_times[j];
    ss_res += w * (y - fit) * (y - fit);
    ss_tot += w * (y - ybar) * (y - ybar);
  }
  est.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  if (est.rate <= 0) {
    est.note = "non-decaying amplitude";
    return est;
  }
  if (est.r2 < 0.95) {
    est.note = "non-exponential decay (r2 < 0.95)";
    return est;
  }
  est.ok = true;
  return est;
}

std::vector<std::vector<int>> standard_probe_set(int dim) {
  std::vector<std::vector<int>> probes;
  for (int i = 0; i < dim; ++i) {
    std::vector<int> q(dim, 0);
    q[size_t(i)] = 1;
    probes.push_back(q);
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      std::vector<int> q(dim, 0);
      q[size_t(i)] = 1;
      q[size_t(j)] = 1;
      probes.push_back(q);
    }
  return probes;
}

DiffusionEstimate assemble_diffusion(const std::vector<ProbeResult>& probes,
                                     int dim) {
  const int n_diag = dim;
  const int n_off = dim * (dim - 1) / 2;
  const int unknowns = n_diag + n_off;

  int axis_aligned = 0, mixed = 0;
  for (const auto& p : probes) {
    int nz = 0;
    for (double k : p.kappa) nz += k != 0.0;
    if (nz == 1) ++axis_aligned;
    if (nz >= 2) ++mixed;
  }
  if (axis_aligned < dim || mixed < n_off || int(probes.size()) < unknowns)
    throw std::invalid_argument(
        "assemble diffusion: underdetermined probe set (need d axis-aligned "
        "and d(d-1)/2 mixed probes)");
  for (const auto& p : probes)
    if (!p.estimate.ok)
      throw std::runtime_error("assemble diffusion: probe fit failed: " +
                               p.estimate.note);

  auto off_index = [&](int i, int j) {
    // (0,1),(0,2),...,(0,d-1),(1,2),...
    int idx = 0;
    for (int a = 0; a < i; ++a) idx += dim - 1 - a;
    return n_diag + idx + (j - i - 1);
  };

  std::vector<double> ata(size_t(unknowns) * unknowns, 0.0);
  std::vector<double> atb(size_t(unknowns), 0.0);
  for (const auto& p : probes) {
    std::vector<double> row(size_t(unknowns), 0.0);
    for (int i = 0; i < dim; ++i) row[size_t(i)] = p.kappa[size_t(i)] * p.kappa[size_t(i)];
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j)
        row[size_t(off_index(i, j))] = 2.0 * p.kappa[size_t(i)] * p.kappa[size_t(j)];
    const double se = p.estimate.se;
    const double w = se > 0 ? 1.0 / (se * se) : 1.0;
    for (int a = 0; a < unknowns; ++a) {
      atb[size_t(a)] += w * row[size_t(a)] * p.estimate.rate;
      for (int b = 0; b < unknowns; ++b)
        ata[size_t(a) * unknowns + b] += w * row[size_t(a)] * row[size_t(b)];
    }
  }

  std::vector<double> x = solve_dense(ata, atb, unknowns);
  std::vector<double> cov = invert_dense(ata, unknowns);

  DiffusionEstimate out;
  out.dim = dim;
  out.probes = probes;
  out.d_hat.assign(size_t(dim) * dim, 0.0);
  out.d_se.assign(size_t(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    out.d_hat[size_t(i) * dim + i] = x[size_t(i)];
    out.d_se[size_t(i) * dim + i] = std::sqrt(std::max(0.0, cov[size_t(i) * unknowns + i]));
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const int a = off_index(i, j);
      out.d_hat[size_t(i) * dim + j] = out.d_hat[size_t(j) * dim + i] = x[size_t(a)];
      const double se = std::sqrt(std::max(0.0, cov[size_t(a) * unknowns + a]));
      out.d_se[size_t(i) * dim + j] = out.d_se[size_t(j) * dim + i] = se;
    }

  // Paired q = e_i + e_j and q = e_i - e_j probes imply two off-diagonal
  // readings; their spread is the reported asymmetry (the least squares fit
  // already averaged them).
  out.max_asymmetry = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      double plus = 0, minus = 0;
      bool has_plus = false, has_minus = false;
      for (const auto& p : probes) {
        int nz = 0;
        for (double k : p.kappa) nz += k != 0.0;
        if (nz != 2 || p.kappa[size_t(i)] == 0.0 || p.kappa[size_t(j)] == 0.0)
          continue;
        const double ki = p.kappa[size_t(i)], kj = p.kappa[size_t(j)];
        const double dii = out.d_hat[size_t(i) * dim + i];
        const double djj = out.d_hat[size_t(j) * dim + j];
        const double dij =
            (p.estimate.rate - ki * ki * dii - kj * kj * djj) / (2 * ki * kj);
        if (ki * kj > 0) {
          plus = dij;
          has_plus = true;
        } else {
          minus = dij;
          has_minus = true;
        }
      }
      if (has_plus && has_minus)
        out.max_asymmetry = std::max(out.max_asymmetry, std::fabs(plus - minus));
    }

  auto eig = symmetric_eigenvalues(out.d_hat, dim);
  out.min_eigenvalue = eig[0];
  for (double l : eig) out.min_eigenvalue = std::min(out.min_eigenvalue, l);
  out.positive_definite = out.min_eigenvalue > 0;
  return out;
}

}  // namespace asep

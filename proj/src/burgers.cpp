#include "asep/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "asep/small_matrix.hpp"

namespace asep {

namespace {

struct GridView {
  int dim;
  std::vector<int> n;
  std::vector<double> h;
  std::vector<bool> periodic;
  std::vector<int64_t> stride;
  int64_t nodes = 1;
  int64_t face = 1;  // transverse node count of an axis-0 slice

  explicit GridView(const ScalarField& f) : dim(f.dim) {
    n.resize(dim);
    h.resize(dim);
    periodic.resize(dim);
    stride.resize(dim);
    for (int a = 0; a < dim; ++a) {
      n[a] = f.axes[a].n;
      h[a] = f.axes[a].spacing;
      periodic[a] = f.axes[a].periodic;
    }
    for (int a = dim - 1; a >= 0; --a) {
      stride[a] = nodes;
      nodes *= n[a];
    }
    face = nodes / n[0];
  }
};

// delta_a d_a(m^2) discretized as flux differences. Interface states come
// from piecewise-linear reconstruction with central slopes, so the local
// Lax-Friedrichs jump term vanishes at second order on smooth data while
// still damping grid-scale oscillation.
void add_advective_axis(const GridView& g, int axis, double delta_a,
                        const std::vector<double>& m,
                        std::vector<double>& rhs) {
  const int n = g.n[axis];
  const double h = g.h[axis];
  const bool per = g.periodic[axis];
  const int64_t inner = g.stride[axis];
  const int64_t outer = g.nodes / (inner * n);

  std::vector<double> v(static_cast<size_t>(n));
  std::vector<double> slope(static_cast<size_t>(n));
  std::vector<double> flux(static_cast<size_t>(n) + 1);

  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t i = 0; i < inner; ++i) {
      const int64_t base = o * n * inner + i;
      for (int j = 0; j < n; ++j) v[size_t(j)] = m[size_t(base + j * inner)];

      for (int j = 0; j < n; ++j) {
        if (per) {
          const int jm = j == 0 ? n - 1 : j - 1;
          const int jp = j == n - 1 ? 0 : j + 1;
          slope[size_t(j)] = 0.5 * (v[size_t(jp)] - v[size_t(jm)]);
        } else if (j == 0) {
          slope[size_t(j)] = v[1] - v[0];
        } else if (j == n - 1) {
          slope[size_t(j)] = v[size_t(n - 1)] - v[size_t(n - 2)];
        } else {
          slope[size_t(j)] = 0.5 * (v[size_t(j + 1)] - v[size_t(j - 1)]);
        }
      }

      const int jfirst = 0;
      const int jlast = per ? n - 1 : n - 2;  // interface (j, j+1)
      for (int j = jfirst; j <= jlast; ++j) {
        const int jp = j == n - 1 ? 0 : j + 1;
        const double ml = v[size_t(j)] + 0.5 * slope[size_t(j)];
        const double mr = v[size_t(jp)] - 0.5 * slope[size_t(jp)];
        const double alpha =
            2.0 * std::fabs(delta_a) * std::max(std::fabs(ml), std::fabs(mr));
        flux[size_t(j) + 1] =
            0.5 * delta_a * (ml * ml + mr * mr) + 0.5 * alpha * (mr - ml);
      }
      if (per) flux[0] = flux[size_t(n)];

      const int j0 = per ? 0 : 1;
      const int j1 = per ? n - 1 : n - 2;
      for (int j = j0; j <= j1; ++j)
        rhs[size_t(base + j * inner)] +=
            (flux[size_t(j) + 1] - flux[size_t(j)]) / h;
    }
  }
}

void add_diagonal_diffusion_axis(const GridView& g, int axis, double d_aa,
                                 const std::vector<double>& m,
                                 std::vector<double>& rhs) {
  const int n = g.n[axis];
  const double inv_h2 = 1.0 / (g.h[axis] * g.h[axis]);
  const bool per = g.periodic[axis];
  const int64_t inner = g.stride[axis];
  const int64_t outer = g.nodes / (inner * n);

  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t i = 0; i < inner; ++i) {
      const int64_t base = o * n * inner + i;
      const int j0 = per ? 0 : 1;
      const int j1 = per ? n - 1 : n - 2;
      for (int j = j0; j <= j1; ++j) {
        const int jm = j == 0 ? n - 1 : j - 1;
        const int jp = j == n - 1 ? 0 : j + 1;
        rhs[size_t(base + j * inner)] +=
            d_aa * inv_h2 *
            (m[size_t(base + jm * inner)] - 2.0 * m[size_t(base + j * inner)] +
             m[size_t(base + jp * inner)]);
      }
    }
  }
}

// Four-corner stencil for 2 D_ab d2_ab m, a < b. Evaluated on nodes whose
// axis-0 neighbors exist; face nodes are Dirichlet anyway.
void add_cross_diffusion(const GridView& g, int a, int b, double d_ab,
                         const std::vector<double>& m,
                         std::vector<double>& rhs) {
  const double coef = 2.0 * d_ab / (4.0 * g.h[a] * g.h[b]);
  std::vector<int> idx(g.dim, 0);
  for (int64_t flat = 0; flat < g.nodes; ++flat) {
    bool skip = false;
    if (!g.periodic[0] && (idx[0] == 0 || idx[0] == g.n[0] - 1)) skip = true;
    if (!skip) {
      auto shift = [&](int axis, int step) -> int64_t {
        int j = idx[axis] + step;
        if (g.periodic[axis]) {
          if (j < 0) j += g.n[axis];
          if (j >= g.n[axis]) j -= g.n[axis];
        }
        return int64_t(j - idx[axis]) * g.stride[axis];
      };
      const int64_t pa = shift(a, +1), ma = shift(a, -1);
      const int64_t pb = shift(b, +1), mb = shift(b, -1);
      rhs[size_t(flat)] += coef * (m[size_t(flat + pa + pb)] -
                                   m[size_t(flat + pa + mb)] -
                                   m[size_t(flat + ma + pb)] +
                                   m[size_t(flat + ma + mb)]);
    }
    for (int ax = g.dim - 1; ax >= 0; --ax) {
      if (++idx[ax] < g.n[ax]) break;
      idx[ax] = 0;
    }
  }
}

void compute_rhs(const PdeProblem& p, const GridView& g,
                 const std::vector<double>& m, double t,
                 std::vector<double>& rhs) {
  std::fill(rhs.begin(), rhs.end(), 0.0);
  for (int a = 0; a < g.dim; ++a) {
    if (p.delta[a] != 0.0) add_advective_axis(g, a, p.delta[a], m, rhs);
    const double d_aa = p.diffusion[a * g.dim + a];
    if (d_aa != 0.0) add_diagonal_diffusion_axis(g, a, d_aa, m, rhs);
  }
  for (int a = 0; a < g.dim; ++a)
    for (int b = a + 1; b < g.dim; ++b) {
      const double d_ab = p.diffusion[a * g.dim + b];
      if (d_ab != 0.0) add_cross_diffusion(g, a, b, d_ab, m, rhs);
    }
  if (p.source) {
    std::vector<int> idx(g.dim, 0);
    std::vector<double> u(g.dim);
    for (int64_t flat = 0; flat < g.nodes; ++flat) {
      bool face = !g.periodic[0] && (idx[0] == 0 || idx[0] == g.n[0] - 1);
      if (!face) {
        for (int a = 0; a < g.dim; ++a)
          u[a] = p.m0.axes[a].origin + idx[a] * p.m0.axes[a].spacing;
        rhs[size_t(flat)] += p.source(t, u);
      }
      for (int ax = g.dim - 1; ax >= 0; --ax) {
        if (++idx[ax] < g.n[ax]) break;
        idx[ax] = 0;
      }
    }
  }
}

void reimpose_faces(const PdeProblem& p, const GridView& g,
                    std::vector<double>& m) {
  if (p.all_periodic) return;
  for (int64_t i = 0; i < g.face; ++i) {
    m[size_t(i)] = p.b_left[size_t(i)];
    m[size_t(g.nodes - g.face + i)] = p.b_right[size_t(i)];
  }
}

}  // namespace

void PdeProblem::validate() const {
  if (dim < 1) throw std::invalid_argument("pde: dim must be >= 1");
  if (m0.dim != dim) throw std::invalid_argument("pde: m0 dim mismatch");
  if (int(delta.size()) != dim)
    throw std::invalid_argument("pde: delta must have dim entries");
  if (int(diffusion.size()) != dim * dim)
    throw std::invalid_argument("pde: diffusion must be dim x dim");
  for (int a = 0; a < dim; ++a) {
    if (m0.axes[a].n < 3)
      throw std::invalid_argument("pde: each axis needs at least 3 nodes");
    const bool want_periodic = a > 0 || all_periodic;
    if (m0.axes[a].periodic != want_periodic)
      throw std::invalid_argument("pde: axis periodicity mismatch");
  }
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      if (std::fabs(diffusion[a * dim + b] - diffusion[b * dim + a]) > 1e-12)
        throw std::invalid_argument("pde: diffusion matrix must be symmetric");
  auto eig = symmetric_eigenvalues(diffusion, dim);
  for (double lambda : eig)
    if (lambda <= 1e-12)
      throw std::invalid_argument(
          "pde: diffusion matrix must be positive definite");

  if (!all_periodic) {
    GridView g(m0);
    if (int64_t(b_left.size()) != g.face || int64_t(b_right.size()) != g.face)
      throw std::invalid_argument(
          "pde: boundary data must have one value per transverse node");
    for (int64_t i = 0; i < g.face; ++i) {
      if (std::fabs(m0.values[size_t(i)] - b_left[size_t(i)]) > 1e-8 ||
          std::fabs(m0.values[size_t(g.nodes - g.face + i)] -
                    b_right[size_t(i)]) > 1e-8)
        throw std::invalid_argument(
            "pde: initial data must equal b on the boundary faces");
    }
  }
  if (horizon < 0) throw std::invalid_argument("pde: horizon must be >= 0");
}

SolverState make_state(const PdeProblem& problem) {
  problem.validate();
  SolverState state;
  state.m = problem.m0;
  return state;
}

double stable_dt(const PdeProblem& problem, const ScalarField& m) {
  GridView g(m);
  double hmin = g.h[0];
  for (int a = 1; a < g.dim; ++a) hmin = std::min(hmin, g.h[a]);
  double trace = 0.0;
  for (int a = 0; a < g.dim; ++a) trace += problem.diffusion[a * g.dim + a];
  double dnorm = 0.0;
  for (double d : problem.delta) dnorm += d * d;
  dnorm = std::sqrt(dnorm);
  double mmax = 0.0;
  for (double v : m.values) mmax = std::max(mmax, std::fabs(v));

  double dt = hmin * hmin / (2.0 * trace);
  if (dnorm * mmax > 0.0)
    dt = std::min(dt, hmin / (4.0 * dnorm * mmax));
  return 0.8 * dt;
}

void advance(SolverState& state, const PdeProblem& problem, double dt_cap) {
  GridView g(state.m);
  double dt = stable_dt(problem, state.m);
  if (dt_cap > 0.0 && dt_cap < dt) dt = dt_cap;

  std::vector<double> rhs(state.m.values.size());
  compute_rhs(problem, g, state.m.values, state.time, rhs);
  for (size_t i = 0; i < rhs.size(); ++i) state.m.values[i] += dt * rhs[i];
  reimpose_faces(problem, g, state.m.values);

  for (double v : state.m.values) {
    if (!std::isfinite(v)) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "pde: non-finite field after step %lld (t=%.6g, dt=%.6g); "
                    "CFL bound violated or data out of range",
                    (long long)state.step_count, state.time, dt);
      throw std::runtime_error(msg);
    }
  }

  state.time += dt;
  state.dt = dt;
  ++state.step_count;
}

std::vector<ScalarField> solve(const PdeProblem& problem,
                               std::span<const double> snapshot_times) {
  std::vector<double> targets(snapshot_times.begin(), snapshot_times.end());
  if (targets.empty()) targets.push_back(problem.horizon);
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0.0 || targets[i] > problem.horizon + 1e-12)
      throw std::invalid_argument("pde: snapshot time outside [0, horizon]");
    if (i > 0 && targets[i] < targets[i - 1])
      throw std::invalid_argument("pde: snapshot times must be sorted");
  }

  SolverState state = make_state(problem);
  std::vector<ScalarField> out;
  out.reserve(targets.size());
  for (double target : targets) {
    while (state.time < target) {
      const double cap = target - state.time;
      advance(state, problem, cap);
      if (state.dt >= cap) state.time = target;  // exact landing
    }
    ScalarField snap = state.m;
    snap.meta.time = target;
    out.push_back(std::move(snap));
  }
  return out;
}

double residual(const ScalarField& before, const ScalarField& after, double dt,
                const PdeProblem& problem, double t) {
  if (!before.same_grid(after))
    throw std::invalid_argument("pde residual: fields on different grids");
  if (dt <= 0.0) throw std::invalid_argument("pde residual: dt must be > 0");
  GridView g(before);
  std::vector<double> rhs(before.values.size());
  compute_rhs(problem, g, before.values, t, rhs);
  double sup = 0.0;
  std::vector<int> idx(g.dim, 0);
  for (int64_t flat = 0; flat < g.nodes; ++flat) {
    const bool face =
        !g.periodic[0] && (idx[0] == 0 || idx[0] == g.n[0] - 1);
    if (!face) {
      const double r = (after.values[size_t(flat)] -
                        before.values[size_t(flat)]) / dt - rhs[size_t(flat)];
      sup = std::max(sup, std::fabs(r));
    }
    for (int ax = g.dim - 1; ax >= 0; --ax) {
      if (++idx[ax] < g.n[ax]) break;
      idx[ax] = 0;
    }
  }
  return sup;
}

}  // namespace asep

#include "asep/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace asep {

namespace {

inline double bond_rate(uint8_t eta_x, uint8_t eta_y, double p_plus,
                        double p_minus) {
  // r = p_e eta(x)(1-eta(x+e)) + p_-e eta(x+e)(1-eta(x))
  if (eta_x == eta_y) return 0.0;
  return eta_x ? p_plus : p_minus;
}

}  // namespace

ExclusionProcess::ExclusionProcess(const Lattice& lattice,
                                   const ModelParams& params,
                                   const BoundaryProfile& boundary)
    : lattice_(lattice),
      params_(params),
      inv_eps_(lattice.inv_eps()),
      site_count_(lattice.site_count()),
      eps_(lattice.eps()) {
  params_.validate();
  if (params_.dim != lattice.dim())
    throw std::invalid_argument("simulation: params/lattice dim mismatch");

  face_count_ = lattice.wraps_axis0() ? 0 : lattice.face_site_count();
  flip_base_ = int64_t(params_.dim) * site_count_;
  if (face_count_ > 0) params_.validate_boundary();

  if (face_count_ > 0) {
    if (int64_t(boundary.left.size()) != face_count_ ||
        int64_t(boundary.right.size()) != face_count_)
      throw std::invalid_argument(
          "simulation: boundary profile size must match the face");
    create_left_.resize(face_count_);
    annihilate_left_.resize(face_count_);
    create_right_.resize(face_count_);
    annihilate_right_.resize(face_count_);
    // eps^-s speedup of the face clock relative to the bulk jump process;
    // s = 0 leaves the generator unscaled.
    const double mult = std::pow(double(inv_eps_), params_.speedup_exponent);
    for (int64_t t = 0; t < face_count_; ++t) {
      double bl = boundary.left[t], br = boundary.right[t];
      if (std::fabs(eps_ * bl) >= 0.5 || std::fabs(eps_ * br) >= 0.5)
        throw std::invalid_argument(
            "simulation: boundary profile too large, need |eps*b| < 1/2");
      if (params_.variant == BoundaryVariant::DriftAligned) {
        const double d1 = params_.delta(0);
        create_left_[t] = d1 * (0.5 + eps_ * bl);
        annihilate_left_[t] = 0.0;
        create_right_[t] = 0.0;
        annihilate_right_[t] = d1 * (0.5 - eps_ * br);
      } else {
        create_left_[t] = mult * (0.5 + eps_ * bl);
        annihilate_left_[t] = mult * (0.5 - eps_ * bl);
        create_right_[t] = mult * (0.5 + eps_ * br);
        annihilate_right_[t] = mult * (0.5 - eps_ * br);
      }
    }
  }

  occupancy_.assign(size_t(site_count_), 0);
  tree_.reset(flip_base_ + 2 * face_count_);
  rebuild_all_rates();
}

int64_t ExclusionProcess::flip_slot(int64_t site) const {
  if (lattice_.on_left_face(site))
    return flip_base_ + lattice_.transverse_index(site);
  return flip_base_ + face_count_ + lattice_.transverse_index(site);
}

void ExclusionProcess::sample_initial(std::span<const double> m0, Rng& rng) {
  if (int64_t(m0.size()) != site_count_)
    throw std::invalid_argument("simulation: m0 must have one value per site");
  particle_count_ = 0;
  for (int64_t s = 0; s < site_count_; ++s) {
    double p = 0.5 + eps_ * m0[s];
    if (p <= 0.0 || p >= 1.0)
      throw std::invalid_argument(
          "simulation: initial occupation probability outside (0,1)");
    occupancy_[s] = rng.next_bernoulli(p) ? 1 : 0;
    particle_count_ += occupancy_[s];
  }
  micro_time_ = 0.0;
  rebuild_all_rates();
}

void ExclusionProcess::set_occupancy(std::span<const uint8_t> occ,
                                     double micro_time) {
  if (int64_t(occ.size()) != site_count_)
    throw std::invalid_argument("simulation: occupancy size mismatch");
  particle_count_ = 0;
  for (int64_t s = 0; s < site_count_; ++s) {
    occupancy_[s] = occ[s] ? 1 : 0;
    particle_count_ += occupancy_[s];
  }
  micro_time_ = micro_time;
  rebuild_all_rates();
}

double ExclusionProcess::bond_rate_now(int64_t site, int axis) const {
  int32_t y = lattice_.neighbor_raw(site, axis - 1, 1);
  if (y < 0) return 0.0;
  return bond_rate(occupancy_[site], occupancy_[y], params_.p_plus[axis - 1],
                   params_.p_minus[axis - 1]);
}

double ExclusionProcess::creation_rate_at(int64_t site) const {
  if (face_count_ == 0) return 0.0;
  int64_t t = lattice_.transverse_index(site);
  if (lattice_.on_left_face(site)) return create_left_[t];
  if (lattice_.on_right_face(site)) return create_right_[t];
  return 0.0;
}

double ExclusionProcess::annihilation_rate_at(int64_t site) const {
  if (face_count_ == 0) return 0.0;
  int64_t t = lattice_.transverse_index(site);
  if (lattice_.on_left_face(site)) return annihilate_left_[t];
  if (lattice_.on_right_face(site)) return annihilate_right_[t];
  return 0.0;
}

double ExclusionProcess::flip_rate_now(int64_t site) const {
  if (face_count_ == 0) return 0.0;
  if (!lattice_.on_left_face(site) && !lattice_.on_right_face(site)) return 0.0;
  return occupancy_[site] ? annihilation_rate_at(site) : creation_rate_at(site);
}

void ExclusionProcess::rebuild_all_rates() {
  for (int i = 0; i < params_.dim; ++i)
    for (int64_t s = 0; s < site_count_; ++s)
      tree_.set(bond_slot(i, s), bond_rate_now(s, i + 1));
  if (face_count_ > 0) {
    for (int64_t s = 0; s < face_count_; ++s)
      tree_.set(flip_slot(s), flip_rate_now(s));
    for (int64_t s = site_count_ - face_count_; s < site_count_; ++s)
      tree_.set(flip_slot(s), flip_rate_now(s));
  }
}

double ExclusionProcess::rebuild_total() const {
  double sum = 0.0;
  for (int i = 0; i < params_.dim; ++i)
    for (int64_t s = 0; s < site_count_; ++s) sum += bond_rate_now(s, i + 1);
  if (face_count_ > 0) {
    for (int64_t s = 0; s < face_count_; ++s) sum += flip_rate_now(s);
    for (int64_t s = site_count_ - face_count_; s < site_count_; ++s)
      sum += flip_rate_now(s);
  }
  return sum;
}

void ExclusionProcess::refresh_rates_around(int64_t site) {
  for (int i = 0; i < params_.dim; ++i) {
    tree_.set(bond_slot(i, site), bond_rate_now(site, i + 1));
    int32_t w = lattice_.neighbor_raw(site, i, 0);
    if (w >= 0) tree_.set(bond_slot(i, w), bond_rate_now(w, i + 1));
  }
  if (face_count_ > 0 &&
      (lattice_.on_left_face(site) || lattice_.on_right_face(site)))
    tree_.set(flip_slot(site), flip_rate_now(site));
}

EventRecord ExclusionProcess::apply_slot(int64_t slot) {
  EventRecord ev;
  ev.time = micro_time_;
  if (slot < flip_base_) {
    const int axis0 = int(slot / site_count_);
    const int64_t x = slot % site_count_;
    const int64_t y = lattice_.neighbor_raw(x, axis0, 1);
    std::swap(occupancy_[x], occupancy_[y]);
    refresh_rates_around(x);
    refresh_rates_around(y);
    ev.kind = EventKind::Exchange;
    ev.site = x;
    ev.axis = axis0 + 1;
    ev.dparticles = 0;
  } else {
    const int64_t t = slot - flip_base_;
    const int64_t site =
        t < face_count_ ? t : site_count_ - face_count_ + (t - face_count_);
    occupancy_[site] ^= 1;
    const int dp = occupancy_[site] ? +1 : -1;
    particle_count_ += dp;
    refresh_rates_around(site);
    ev.kind = EventKind::Flip;
    ev.site = site;
    ev.axis = 0;
    ev.dparticles = dp;
  }
  return ev;
}

bool ExclusionProcess::step(Rng& rng, EventRecord* record) {
  const double total = tree_.total();
  if (total <= 0.0) return false;
  const double wait = rng.next_exponential(total);
  const int64_t slot = tree_.sample(rng.next_unit());
  if (slot < 0) return false;
  micro_time_ += wait;
  EventRecord ev = apply_slot(slot);
  if (record) *record = ev;
  return true;
}

RunSummary ExclusionProcess::run_until_micro(
    double tau_end, std::span<const double> snapshot_times, Rng& rng,
    const SnapshotFn& on_snapshot, const EventFn& on_event) {
  RunSummary summary;
  size_t snap = 0;
  auto emit_until = [&](double t) {
    while (snap < snapshot_times.size() && snapshot_times[snap] <= t) {
      if (on_snapshot) on_snapshot(snap, snapshot_times[snap]);
      ++snap;
    }
  };

  while (micro_time_ < tau_end) {
    const double total = tree_.total();
    if (total <= 0.0) {
      summary.absorbed = true;
      break;
    }
    const double wait = rng.next_exponential(total);
    const double t_next = micro_time_ + wait;
    if (t_next > tau_end) {
      emit_until(tau_end);
      micro_time_ = tau_end;
      break;
    }
    // snapshots strictly before the event observe the pre-event state
    emit_until(t_next);
    const int64_t slot = tree_.sample(rng.next_unit());
    micro_time_ = t_next;
    EventRecord ev = apply_slot(slot);
    switch (ev.kind) {
      case EventKind::Exchange:
        ++summary.exchange_events;
        break;
      case EventKind::Flip:
        if (ev.dparticles > 0)
          ++summary.birth_events;
        else
          ++summary.death_events;
        break;
    }
    if (on_event) on_event(ev);
  }
  emit_until(micro_time_);
  summary.final_time = micro_time_;
  return summary;
}

RunSummary ExclusionProcess::run_until_macro(
    double t_end, std::span<const double> macro_snapshot_times, Rng& rng,
    const SnapshotFn& on_snapshot, const EventFn& on_event) {
  std::vector<double> micro_times(macro_snapshot_times.size());
  for (size_t i = 0; i < micro_times.size(); ++i)
    micro_times[i] = micro_of_macro(macro_snapshot_times[i]);
  return run_until_micro(micro_of_macro(t_end), micro_times, rng, on_snapshot,
                         on_event);
}

double detailed_balance_ratio(const ModelParams& params, double rho) {
  if (params.variant != BoundaryVariant::ReversibleOneSite)
    throw std::invalid_argument(
        "detailed balance ratio: not applicable to the drift-aligned "
        "boundary generator");
  if (rho <= 0.0 || rho >= 1.0)
    throw std::invalid_argument("detailed balance ratio: rho outside (0,1)");
  return rho / (1.0 - rho);
}

}  // namespace asep

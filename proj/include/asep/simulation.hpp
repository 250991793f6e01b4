#ifndef ASEP_SIMULATION_HPP
#define ASEP_SIMULATION_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "asep/event_tree.hpp"
#include "asep/lattice.hpp"
#include "asep/model.hpp"
#include "asep/rng.hpp"

namespace asep {

enum class EventKind : uint8_t { Exchange, Flip };

struct EventRecord {
  double time = 0.0;  // microscopic clock, after the event
  EventKind kind = EventKind::Exchange;
  int64_t site = -1;  // exchange: lower bond endpoint; flip: the face site
  int axis = 0;       // 1-based, exchanges only
  int dparticles = 0; // 0 for exchanges, +/-1 for flips
};

struct RunSummary {
  uint64_t exchange_events = 0;
  uint64_t birth_events = 0;
  uint64_t death_events = 0;
  bool absorbed = false;
  double final_time = 0.0;

  uint64_t total_events() const {
    return exchange_events + birth_events + death_events;
  }
};

// Continuous-time exclusion process on a Lattice: exchange events across
// every bond plus birth/death events on the boundary faces. Event rates live
// in an EventTree keyed by a static slot layout, so a step is an exponential
// waiting time at the cached total rate followed by an exact inverse-CDF
// selection. Each applied event touches only the rates of bonds incident to
// the changed sites.
//
// The clock is always microscopic. Macroscopic horizons enter only through
// run_until_macro, which multiplies by inv_eps^2 (diffusive scaling). The
// reversible boundary speedup multiplies face rates by eps^-s on this clock.
class ExclusionProcess {
 public:
  ExclusionProcess(const Lattice& lattice, const ModelParams& params,
                   const BoundaryProfile& boundary);

  // Product-Bernoulli initial state: site x occupied with probability
  // 1/2 + eps*m0(x). m0 is indexed by linear site. Throws if any
  // probability leaves (0,1).
  void sample_initial(std::span<const double> m0, Rng& rng);
  void set_occupancy(std::span<const uint8_t> occ, double micro_time = 0.0);

  // One event. Returns false when the total rate is zero (absorbing state);
  // the clock does not advance in that case.
  bool step(Rng& rng, EventRecord* record = nullptr);

  using SnapshotFn = std::function<void(size_t index, double micro_time)>;
  using EventFn = std::function<void(const EventRecord&)>;

  // Advances the microscopic clock to tau_end. snapshot_times must be sorted;
  // on_snapshot fires once per requested time (identified by its index in the
  // list) with the state frozen at that time. on_event, when set, sees every
  // applied event.
  RunSummary run_until_micro(double tau_end,
                             std::span<const double> snapshot_times, Rng& rng,
                             const SnapshotFn& on_snapshot = nullptr,
                             const EventFn& on_event = nullptr);

  // Same with macroscopic times: micro = inv_eps^2 * macro.
  RunSummary run_until_macro(double t_end,
                             std::span<const double> macro_snapshot_times,
                             Rng& rng, const SnapshotFn& on_snapshot = nullptr,
                             const EventFn& on_event = nullptr);

  double micro_of_macro(double t) const {
    return t * inv_eps_ * double(inv_eps_);
  }

  const Lattice& lattice() const { return lattice_; }
  const ModelParams& params() const { return params_; }
  std::span<const uint8_t> occupancy() const { return occupancy_; }
  int64_t particle_count() const { return particle_count_; }
  double micro_time() const { return micro_time_; }
  double total_rate() const { return tree_.total(); }

  // Rates recomputed from first principles, for consistency checks.
  double bond_rate_now(int64_t site, int axis) const;
  double flip_rate_now(int64_t site) const;
  double cached_rate(int64_t slot) const { return tree_.get(slot); }
  int64_t slot_count() const { return tree_.slots(); }
  double rebuild_total() const;

  // Creation/annihilation rate constants at a face site (occupancy factored
  // out). Exposed for the detailed-balance check.
  double creation_rate_at(int64_t site) const;
  double annihilation_rate_at(int64_t site) const;

 private:
  int64_t bond_slot(int axis0, int64_t site) const {
    return int64_t(axis0) * site_count_ + site;
  }
  int64_t flip_slot(int64_t site) const;
  void refresh_rates_around(int64_t site);
  void rebuild_all_rates();
  EventRecord apply_slot(int64_t slot);

  const Lattice& lattice_;
  ModelParams params_;
  int inv_eps_;
  int64_t site_count_;
  double eps_;
  std::vector<uint8_t> occupancy_;
  int64_t particle_count_ = 0;
  double micro_time_ = 0.0;
  EventTree tree_;
  // Face rate constants by transverse index: creation applies to an empty
  // site, annihilation to an occupied one.
  std::vector<double> create_left_, annihilate_left_;
  std::vector<double> create_right_, annihilate_right_;
  int64_t flip_base_ = 0;
  int64_t face_count_ = 0;
};

// Creation/annihilation ratio of the reversible one-site boundary generator
// at density rho: rho/(1-rho). Throws for the drift-aligned variant (no
// reversibility statement applies) and for rho outside (0,1).
double detailed_balance_ratio(const ModelParams& params, double rho);

}  // namespace asep

#endif

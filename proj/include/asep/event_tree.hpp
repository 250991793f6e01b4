#ifndef ASEP_EVENT_TREE_HPP
#define ASEP_EVENT_TREE_HPP

#include <cstdint>
#include <vector>

namespace asep {

// Complete binary tree of partial rate sums over a fixed set of event slots.
// set() is O(log n); sample() inverts the cumulative distribution exactly,
// so selection is rejection free. Internal sums are always the IEEE sum of
// the two children, which makes the root bit-reproducible against a fresh
// rebuild of the same leaves.
class EventTree {
 public:
  void reset(int64_t slots) {
    slots_ = slots;
    cap_ = 1;
    while (cap_ < slots) cap_ <<= 1;
    node_.assign(size_t(cap_) * 2, 0.0);
  }

  int64_t slots() const { return slots_; }

  double total() const { return node_.empty() ? 0.0 : node_[1]; }

  double get(int64_t slot) const { return node_[size_t(cap_ + slot)]; }

  void set(int64_t slot, double rate) {
    size_t i = size_t(cap_ + slot);
    if (node_[i] == rate) return;
    node_[i] = rate;
    for (i >>= 1; i >= 1; i >>= 1) node_[i] = node_[2 * i] + node_[2 * i + 1];
  }

  // u must lie in [0,1); the total must be positive. Returns the slot whose
  // cumulative interval contains u * total. Roundoff can strand the walk on
  // an empty leaf; the scan below moves to the nearest enabled one.
  int64_t sample(double u) const {
    double target = u * node_[1];
    size_t i = 1;
    while (i < size_t(cap_)) {
      double left = node_[2 * i];
      if (target < left) {
        i = 2 * i;
      } else {
        target -= left;
        i = 2 * i + 1;
      }
    }
    int64_t slot = int64_t(i) - cap_;
    if (node_[i] > 0.0 && slot < slots_) return slot;
    for (int64_t k = slot - 1; k >= 0; --k)
      if (node_[size_t(cap_ + k)] > 0.0) return k;
    for (int64_t k = slot + 1; k < slots_; ++k)
      if (node_[size_t(cap_ + k)] > 0.0) return k;
    return -1;
  }

 private:
  int64_t slots_ = 0;
  int64_t cap_ = 1;
  std::vector<double> node_;
};

}  // namespace asep

#endif

#pragma once

#include <vector>

namespace srbeam {

enum class SlotRole { ehs, mti };

/// Slot-role assignment for one frame. Device i modulates and transmits in
/// its MTI slots (the set upsilon_i) and harvests in every other slot.
/// Invariants: MTI sets are pairwise disjoint and each set is a consecutive
/// run of slot indices.
class ScheduleFrame {
 public:
  ScheduleFrame(int slot_count, std::vector<std::vector<int>> mti_slots);

  int slot_count() const { return slot_count_; }
  int device_count() const { return static_cast<int>(mti_slots_.size()); }

  /// Sorted MTI slot indices of one device; may be empty for a silent device.
  const std::vector<int>& mti_slots(int device) const;

  SlotRole role(int device, int slot) const;

  /// Device transmitting in a slot, or -1 for a pure harvesting slot.
  int mti_owner(int slot) const;

 private:
  int slot_count_;
  std::vector<std::vector<int>> mti_slots_;
  std::vector<int> owner_;  // per slot
};

}  // namespace srbeam

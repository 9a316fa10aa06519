#include "srbeam/schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace srbeam {

ScheduleFrame::ScheduleFrame(int slot_count,
                             std::vector<std::vector<int>> mti_slots)
    : slot_count_(slot_count), mti_slots_(std::move(mti_slots)) {
  if (slot_count_ < 1) throw std::invalid_argument("schedule: slot_count < 1");
  owner_.assign(slot_count_, -1);
  for (int i = 0; i < device_count(); ++i) {
    auto& slots = mti_slots_[i];
    std::sort(slots.begin(), slots.end());
    for (std::size_t k = 0; k < slots.size(); ++k) {
      int j = slots[k];
      if (j < 0 || j >= slot_count_)
        throw std::invalid_argument("schedule: slot index out of range");
      if (owner_[j] != -1)
        throw std::invalid_argument("schedule: MTI sets must be disjoint");
      if (k > 0 && slots[k] != slots[k - 1] + 1)
        throw std::invalid_argument("schedule: MTI run must be consecutive");
      owner_[j] = i;
    }
  }
}

const std::vector<int>& ScheduleFrame::mti_slots(int device) const {
  return mti_slots_.at(device);
}

SlotRole ScheduleFrame::role(int device, int slot) const {
  return owner_.at(slot) == device ? SlotRole::mti : SlotRole::ehs;
}

int ScheduleFrame::mti_owner(int slot) const { return owner_.at(slot); }

}  // namespace srbeam

#include "oransim/flow_split.hpp"

#include <stdexcept>

namespace oransim {

FlowSplit uniform_flow_split(int num_rus, int num_users) {
  return FlowSplit(num_rus, num_users, 1.0 / num_rus);
}

RateWindow::RateWindow(int num_rus, int num_users, int window_frames)
    : num_rus_(num_rus), num_users_(num_users), window_(window_frames) {
  slots_.assign(window_,
                std::vector<double>(
                    static_cast<size_t>(num_rus) * num_users, 0.0));
}

void RateWindow::push_observation(const std::vector<double>& rates) {
  if (rates.size() != slots_[0].size()) {
    throw std::invalid_argument("RateWindow: observation shape mismatch");
  }
  slots_[next_slot_] = rates;
  next_slot_ = (next_slot_ + 1) % window_;
  if (frames_seen_ < window_) {
    ++frames_seen_;
  }
}

FlowSplit RateWindow::estimate_flow_split() const {
  if (frames_seen_ == 0) {
    return uniform_flow_split(num_rus_, num_users_);
  }
  FlowSplit phi(num_rus_, num_users_);
  for (int u = 0; u < num_users_; ++u) {
    double total = 0.0;
    for (int m = 0; m < num_rus_; ++m) {
      double acc = 0.0;
      for (int k = 0; k < frames_seen_; ++k) {
        acc += slots_[k][m * num_users_ + u];
      }
      phi.at(m, u) = acc / frames_seen_;
      total += phi.at(m, u);
    }
    if (total > 0.0) {
      for (int m = 0; m < num_rus_; ++m) {
        phi.at(m, u) /= total;
      }
    } else {
      for (int m = 0; m < num_rus_; ++m) {
        phi.at(m, u) = 1.0 / num_rus_;
      }
    }
  }
  return phi;
}

void RateWindow::reset() {
  frames_seen_ = 0;
  next_slot_ = 0;
  for (auto& slot : slots_) {
    std::fill(slot.begin(), slot.end(), 0.0);
  }
}

}  // namespace oransim

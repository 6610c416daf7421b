#pragma once

#include <vector>

#include "oransim/config.hpp"

namespace oransim {

// Traffic split ratios phi[m][u]; each user's column sums to 1.
class FlowSplit {
 public:
  FlowSplit() = default;
  FlowSplit(int num_rus, int num_users, double value = 0.0)
      : num_users_(num_users),
        phi_(static_cast<size_t>(num_rus) * num_users, value) {}

  double at(int m, int u) const { return phi_[m * num_users_ + u]; }
  double& at(int m, int u) { return phi_[m * num_users_ + u]; }
  const std::vector<double>& raw() const { return phi_; }

 private:
  int num_users_ = 0;
  std::vector<double> phi_;
};

FlowSplit uniform_flow_split(int num_rus, int num_users);

// Ring buffer of the last W frames of observed per-(ru, user) rates. The
// split estimate for the next frame is each pair's windowed mean rate over
// the user's total; users with no observed service fall back to uniform.
class RateWindow {
 public:
  RateWindow() = default;
  RateWindow(int num_rus, int num_users, int window_frames);

  void push_observation(const std::vector<double>& rates_by_ru_user);
  FlowSplit estimate_flow_split() const;
  void reset();

  int frames_seen() const { return frames_seen_; }
  int window() const { return window_; }

 private:
  int num_rus_ = 0;
  int num_users_ = 0;
  int window_ = 0;
  int frames_seen_ = 0;
  int next_slot_ = 0;
  std::vector<std::vector<double>> slots_;
};

}  // namespace oransim

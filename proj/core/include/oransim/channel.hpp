#pragma once

#include <array>
#include <vector>

#include "oransim/config.hpp"
#include "oransim/rng.hpp"

namespace oransim {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

// RU ring plus user drop, fixed for the lifetime of a run.
struct Topology {
  std::vector<Point2D> rus;
  std::vector<Point2D> users;                 // eMBB first, then uRLLC
  std::vector<std::vector<double>> distance;  // [ru][user], clamped below

  int num_rus() const { return static_cast<int>(rus.size()); }
  int num_users() const { return static_cast<int>(users.size()); }
};

// 3GPP urban-macro style loss; the distance is clamped below at min_dist_m
// before evaluation so tiny separations stay in the model's validity range.
double path_loss_db(double distance_m, double min_distance_m = 10.0);

// RUs sit evenly on a circle of radius cell_radius/2 (first RU at angle 0);
// users drop uniformly over the disk of radius cell_radius.
Topology sample_topology(const SystemConfig& cfg, Rng& rng);

// Per-frame channel gains g[m][u][slice][f][t]: squared Rayleigh envelope
// (unit-mean exponential) on top of distance path loss, i.i.d. per TTI or
// held per frame depending on cfg.fading_block.
class ChannelGains {
 public:
  ChannelGains() = default;
  ChannelGains(int num_rus, int num_users, const RBGrid& grid);

  double at(int m, int u, int slice, int f, int tti0) const {
    return data_[slice][index(m, u, slice, f, tti0)];
  }
  double& at(int m, int u, int slice, int f, int tti0) {
    return data_[slice][index(m, u, slice, f, tti0)];
  }

  // Mean linear gain across the frame's TTIs, the per-RB summary the agents
  // observe with one frame of delay.
  double tti_mean(int m, int u, int slice, int f) const;

  int num_rus() const { return num_rus_; }
  int num_users() const { return num_users_; }
  const std::array<int, kNumSlices>& rbs() const { return num_rbs_; }
  const std::array<int, kNumSlices>& ttis() const { return num_ttis_; }
  const std::vector<double>& slice_data(int slice) const {
    return data_[slice];
  }
  std::vector<double>& slice_data(int slice) { return data_[slice]; }

 private:
  int index(int m, int u, int slice, int f, int tti0) const {
    return ((m * num_users_ + u) * num_rbs_[slice] + f) * num_ttis_[slice] +
           tti0;
  }

  int num_rus_ = 0;
  int num_users_ = 0;
  std::array<int, kNumSlices> num_rbs_{};
  std::array<int, kNumSlices> num_ttis_{};
  std::array<std::vector<double>, kNumSlices> data_;
};

// Draw order is pinned (slice-major, then m, u, f, t) so traces replay
// bit-exactly.
ChannelGains sample_channel_gains(const SystemConfig& cfg, const RBGrid& grid,
                                  const Topology& topo, Rng& rng);

// Packets arriving per user this frame.
struct TrafficArrivals {
  std::vector<uint64_t> packets;  // [user]

  double bits(const SystemConfig& cfg, int u) const {
    return static_cast<double>(packets[u]) * cfg.packet_bits(u);
  }
};

TrafficArrivals sample_arrivals(const SystemConfig& cfg, Rng& rng);

}  // namespace oransim

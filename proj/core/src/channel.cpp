#include "oransim/channel.hpp"

#include <cmath>

namespace oransim {

double path_loss_db(double distance_m, double min_distance_m) {
  const double d = std::max(distance_m, min_distance_m);
  return 128.1 + 37.6 * std::log10(d / 1000.0);
}

Topology sample_topology(const SystemConfig& cfg, Rng& rng) {
  Topology topo;
  topo.rus.resize(cfg.num_rus);
  const double ru_ring = cfg.cell_radius_m / 2.0;
  for (int m = 0; m < cfg.num_rus; ++m) {
    const double theta = 2.0 * M_PI * m / cfg.num_rus;
    topo.rus[m] = {ru_ring * std::cos(theta), ru_ring * std::sin(theta)};
  }

  topo.users.resize(cfg.total_users());
  for (int u = 0; u < cfg.total_users(); ++u) {
    const double r = cfg.cell_radius_m * std::sqrt(rng.uniform());
    const double theta = 2.0 * M_PI * rng.uniform();
    topo.users[u] = {r * std::cos(theta), r * std::sin(theta)};
  }

  topo.distance.assign(cfg.num_rus, std::vector<double>(cfg.total_users()));
  for (int m = 0; m < cfg.num_rus; ++m) {
    for (int u = 0; u < cfg.total_users(); ++u) {
      const double dx = topo.rus[m].x - topo.users[u].x;
      const double dy = topo.rus[m].y - topo.users[u].y;
      topo.distance[m][u] =
          std::max(std::hypot(dx, dy), cfg.min_distance_m);
    }
  }
  return topo;
}

ChannelGains::ChannelGains(int num_rus, int num_users, const RBGrid& grid)
    : num_rus_(num_rus), num_users_(num_users) {
  for (int s = 0; s < kNumSlices; ++s) {
    num_rbs_[s] = grid.num_rbs[s];
    num_ttis_[s] = grid.num_ttis[s];
    data_[s].assign(static_cast<size_t>(num_rus) * num_users * num_rbs_[s] *
                        num_ttis_[s],
                    0.0);
  }
}

double ChannelGains::tti_mean(int m, int u, int slice, int f) const {
  const int ttis = num_ttis_[slice];
  if (ttis == 0) {
    return 0.0;
  }
  double acc = 0.0;
  for (int t = 0; t < ttis; ++t) {
    acc += at(m, u, slice, f, t);
  }
  return acc / ttis;
}

ChannelGains sample_channel_gains(const SystemConfig& cfg, const RBGrid& grid,
                                  const Topology& topo, Rng& rng) {
  ChannelGains gains(cfg.num_rus, cfg.total_users(), grid);
  const bool per_frame = cfg.fading_block == "per_frame";
  for (int s = 0; s < kNumSlices; ++s) {
    for (int m = 0; m < cfg.num_rus; ++m) {
      for (int u = 0; u < cfg.total_users(); ++u) {
        const double loss_lin = std::pow(
            10.0, -path_loss_db(topo.distance[m][u], cfg.min_distance_m) /
                      10.0);
        for (int f = 0; f < grid.num_rbs[s]; ++f) {
          double held = per_frame ? rng.exponential() * loss_lin : 0.0;
          for (int t = 0; t < grid.num_ttis[s]; ++t) {
            gains.at(m, u, s, f, t) =
                per_frame ? held : rng.exponential() * loss_lin;
          }
        }
      }
    }
  }
  return gains;
}

TrafficArrivals sample_arrivals(const SystemConfig& cfg, Rng& rng) {
  TrafficArrivals arr;
  arr.packets.resize(cfg.total_users());
  for (int u = 0; u < cfg.total_users(); ++u) {
    arr.packets[u] = rng.poisson(cfg.arrival_rate(u));
  }
  return arr;
}

}  // namespace oransim

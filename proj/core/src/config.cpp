#include "oransim/config.hpp"

#include <cmath>

namespace oransim {
namespace {

// floor() with protection against 2.9999999996-style FP noise.
int robust_floor_ratio(double num, double den) {
  return static_cast<int>(std::floor(num / den + 1e-9));
}

int robust_ceil_ratio(double num, double den) {
  return static_cast<int>(std::ceil(num / den - 1e-9));
}

bool is_integer_multiple(double value, double unit) {
  if (unit <= 0.0) {
    return false;
  }
  const double ratio = value / unit;
  return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

void check(std::vector<ConfigError>& errs, bool ok, const char* path,
           const std::string& msg) {
  if (!ok) {
    errs.push_back({path, msg});
  }
}

}  // namespace

std::vector<ConfigError> validate_config(const SystemConfig& cfg) {
  std::vector<ConfigError> errs;

  check(errs, cfg.num_rus >= 1, "network.num_rus", "must be >= 1");
  check(errs, cfg.embb_users >= 0, "network.embb_users", "must be >= 0");
  check(errs, cfg.urllc_users >= 0, "network.urllc_users", "must be >= 0");
  check(errs, cfg.total_users() >= 1, "network.embb_users",
        "at least one user required across classes");
  check(errs, cfg.cell_radius_m > 0.0, "network.cell_radius_m",
        "must be > 0");

  check(errs, cfg.bandwidth_hz > 0.0, "spectrum.bandwidth_hz", "must be > 0");
  check(errs, cfg.alpha > 0.0 && cfg.alpha < 1.0, "spectrum.alpha",
        "must lie in the open interval (0, 1)");
  check(errs, cfg.guard_band_hz >= 0.0, "spectrum.guard_band_hz",
        "must be >= 0");
  if (cfg.alpha > 0.0 && cfg.alpha < 1.0) {
    check(errs, cfg.guard_band_hz < cfg.alpha * cfg.bandwidth_hz,
          "spectrum.guard_band_hz",
          "guard band must leave the uRLLC slice positive bandwidth");
  }
  for (int s = 0; s < kNumSlices; ++s) {
    const char* bw_path = s == kSliceEmbb ? "spectrum.embb.rb_bandwidth_hz"
                                          : "spectrum.urllc.rb_bandwidth_hz";
    const char* tti_path = s == kSliceEmbb ? "spectrum.embb.tti_duration_s"
                                           : "spectrum.urllc.tti_duration_s";
    const NumerologyConfig& n = cfg.numerology(s);
    check(errs, n.rb_bandwidth_hz > 0.0, bw_path, "must be > 0");
    check(errs, n.tti_duration_s > 0.0, tti_path, "must be > 0");
    if (n.tti_duration_s > 0.0 && cfg.frame_duration_s > 0.0) {
      check(errs, is_integer_multiple(cfg.frame_duration_s, n.tti_duration_s),
            tti_path, "frame duration must be an integer multiple of the TTI");
    }
  }
  {
    const double d0 = cfg.embb_numerology.tti_duration_s;
    const double d1 = cfg.urllc_numerology.tti_duration_s;
    if (d0 > 0.0 && d1 > 0.0) {
      check(errs, is_integer_multiple(std::max(d0, d1), std::min(d0, d1)),
            "spectrum.embb.tti_duration_s",
            "the longer TTI must be an integer multiple of the shorter one");
    }
  }
  check(errs, cfg.frame_duration_s > 0.0, "frame.duration_s", "must be > 0");

  check(errs, cfg.embb_packet_bits > 0.0, "traffic.embb_packet_bits",
        "must be > 0");
  check(errs, cfg.urllc_packet_bits > 0.0, "traffic.urllc_packet_bits",
        "must be > 0");
  check(errs, cfg.embb_arrival_rate >= 0.0, "traffic.embb_arrival_rate",
        "must be >= 0");
  check(errs, cfg.urllc_arrival_rate >= 0.0, "traffic.urllc_arrival_rate",
        "must be >= 0");
  check(errs, cfg.crediting == "frame_start" || cfg.crediting == "per_tti",
        "traffic.crediting", "must be \"frame_start\" or \"per_tti\"");
  check(errs, cfg.required_embb_rate_bps > 0.0,
        "traffic.required_embb_rate_bps", "must be > 0");

  check(errs, cfg.noise_power_w > 0.0, "phy.noise_power_w", "must be > 0");
  check(errs, cfg.max_power_w > 0.0, "phy.max_power_w", "must be > 0");
  check(errs, cfg.urllc_snr_floor >= 0.0, "phy.urllc_snr_floor",
        "must be >= 0 (linear)");
  check(errs, cfg.error_prob > 0.0 && cfg.error_prob < 0.5, "phy.error_prob",
        "must lie in (0, 0.5)");
  check(errs, cfg.fading_block == "per_tti" || cfg.fading_block == "per_frame",
        "phy.fading_block", "must be \"per_tti\" or \"per_frame\"");
  check(errs, cfg.min_distance_m > 0.0, "phy.min_distance_m", "must be > 0");

  check(errs, cfg.latency_budget_s > 0.0, "qos.latency_budget_s",
        "must be > 0");
  check(errs, cfg.latency_budget_s <= cfg.frame_duration_s,
        "qos.latency_budget_s", "must not exceed the frame duration");
  check(errs, cfg.queue_cap_bits > 0.0, "qos.queue_cap_bits", "must be > 0");

  if (!cfg.allow_zero_urllc_window &&
      cfg.urllc_numerology.tti_duration_s > 0.0 &&
      cfg.latency_budget_s > 0.0) {
    check(errs,
          robust_floor_ratio(cfg.latency_budget_s,
                             cfg.urllc_numerology.tti_duration_s) >= 1,
          "qos.latency_budget_s",
          "latency budget must cover at least one uRLLC-slice TTI "
          "(set slicing.allow_zero_urllc_window to relax)");
  }

  check(errs, cfg.urllc_overflow_divisor >= 1,
        "slicing.urllc_overflow_divisor", "must be >= 1");
  check(errs, cfg.flow_split_window >= 1, "flow_split.window_frames",
        "must be >= 1");

  check(errs, cfg.omega >= 0.0 && cfg.omega <= 1.0, "reward.omega",
        "must lie in [0, 1]");
  check(errs, cfg.ref_queue_bits >= 0.0, "reward.ref_queue_bits",
        "must be >= 0 (0 selects the default)");
  check(errs, cfg.ref_latency_s >= 0.0, "reward.ref_latency_s",
        "must be >= 0 (0 selects the default)");
  check(errs, cfg.ref_rate_bits >= 0.0, "reward.ref_rate_bits",
        "must be >= 0 (0 selects the default)");
  check(errs, cfg.penalty_value < 0.0, "reward.penalty_value",
        "must be < 0");

  check(errs, cfg.discount >= 0.0 && cfg.discount < 1.0, "learning.discount",
        "must lie in [0, 1)");
  check(errs, cfg.target_update == "soft" || cfg.target_update == "hard",
        "learning.target_update", "must be \"soft\" or \"hard\"");
  check(errs, cfg.target_update_period >= 1, "learning.target_update_period",
        "must be >= 1");
  check(errs,
        cfg.soft_update_coeff > 0.0 && cfg.soft_update_coeff <= 1.0,
        "learning.soft_update_coeff", "must lie in (0, 1]");
  check(errs, cfg.batch_size >= 1, "learning.batch_size", "must be >= 1");
  check(errs, cfg.replay_capacity >= cfg.batch_size,
        "learning.replay_capacity", "must be >= batch_size");
  check(errs, cfg.epsilon.start >= 0.0 && cfg.epsilon.start <= 1.0,
        "learning.epsilon.start", "must lie in [0, 1]");
  check(errs, cfg.epsilon.end >= 0.0 && cfg.epsilon.end <= cfg.epsilon.start,
        "learning.epsilon.end", "must lie in [0, start]");
  check(errs, cfg.epsilon.decay > 0.0 && cfg.epsilon.decay <= 1.0,
        "learning.epsilon.decay", "must lie in (0, 1]");
  check(errs, cfg.hidden_layers >= 1, "learning.hidden_layers",
        "must be >= 1");
  check(errs, cfg.hidden_units >= 1, "learning.hidden_units", "must be >= 1");
  check(errs, cfg.learning_rate > 0.0, "learning.learning_rate",
        "must be > 0");

  check(errs, cfg.epochs >= 1, "training.epochs", "must be >= 1");
  check(errs, cfg.frames_per_episode >= 1, "training.frames_per_episode",
        "must be >= 1");
  check(errs, cfg.eval_frames >= 1, "training.eval_frames", "must be >= 1");

  check(errs, cfg.gain_log10_max > cfg.gain_log10_min,
        "state_norm.gain_log10_max", "must exceed gain_log10_min");

  return errs;
}

RBGrid build_rb_grid(const SystemConfig& cfg) {
  RBGrid grid;
  grid.slice_bandwidth_hz[kSliceEmbb] = (1.0 - cfg.alpha) * cfg.bandwidth_hz;
  grid.slice_bandwidth_hz[kSliceUrllc] =
      cfg.alpha * cfg.bandwidth_hz - cfg.guard_band_hz;

  for (int s = 0; s < kNumSlices; ++s) {
    const NumerologyConfig& n = cfg.numerology(s);
    grid.rb_bandwidth_hz[s] = n.rb_bandwidth_hz;
    grid.tti_duration_s[s] = n.tti_duration_s;
    grid.num_rbs[s] = std::max(
        0, robust_floor_ratio(grid.slice_bandwidth_hz[s], n.rb_bandwidth_hz));
    grid.num_ttis[s] = static_cast<int>(
        std::round(cfg.frame_duration_s / n.tti_duration_s));
  }

  grid.tick_duration_s =
      std::min(grid.tti_duration_s[0], grid.tti_duration_s[1]);
  grid.ticks_per_frame = static_cast<int>(
      std::round(cfg.frame_duration_s / grid.tick_duration_s));
  for (int s = 0; s < kNumSlices; ++s) {
    grid.ticks_per_tti[s] = static_cast<int>(
        std::round(grid.tti_duration_s[s] / grid.tick_duration_s));
  }

  grid.urllc_window_ttis = std::min(
      grid.num_ttis[kSliceUrllc],
      robust_floor_ratio(cfg.latency_budget_s,
                         grid.tti_duration_s[kSliceUrllc]));
  grid.overflow_window_ttis = std::min(
      grid.num_ttis[kSliceEmbb],
      robust_ceil_ratio(cfg.latency_budget_s,
                        grid.tti_duration_s[kSliceEmbb]));
  return grid;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) {
  return 10.0 * std::log10(watts) + 30.0;
}

}  // namespace oransim

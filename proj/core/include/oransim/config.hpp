#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace oransim {

// Slice indices used everywhere: slice 0 carries eMBB numerology, slice 1
// carries uRLLC numerology. Users of either class may still be scheduled on
// either slice (quota overflow and leftover reuse).
inline constexpr int kSliceEmbb = 0;
inline constexpr int kSliceUrllc = 1;
inline constexpr int kNumSlices = 2;

struct NumerologyConfig {
  double rb_bandwidth_hz = 0.0;
  double tti_duration_s = 0.0;
};

// Fixed processing/transport delays added on top of the air-interface TTI
// position when reporting uRLLC latency. All default to zero.
struct LatencyConstants {
  double cu_processing_s = 0.0;
  double du_processing_s = 0.0;
  double ru_processing_s = 0.0;
  double midhaul_s = 0.0;
  double fronthaul_s = 0.0;

  double total() const {
    return cu_processing_s + du_processing_s + ru_processing_s + midhaul_s +
           fronthaul_s;
  }
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  double decay = 0.995;  // multiplicative, applied once per episode
};

struct SystemConfig {
  // network
  int num_rus = 4;
  int embb_users = 9;
  int urllc_users = 3;
  double cell_radius_m = 500.0;

  // spectrum split: eMBB slice gets (1-alpha)*B, uRLLC slice gets
  // alpha*B - guard_band.
  double bandwidth_hz = 10e6;
  double alpha = 0.2;
  double guard_band_hz = 180e3;
  NumerologyConfig embb_numerology{180e3, 1e-3};
  NumerologyConfig urllc_numerology{720e3, 0.25e-3};

  // frame
  double frame_duration_s = 0.01;

  // traffic (arrival rates are mean packets per frame)
  double embb_packet_bits = 400000.0;  // 50 KB
  double urllc_packet_bits = 256.0;    // 32 B
  double embb_arrival_rate = 21.12;
  double urllc_arrival_rate = 1.12;
  std::string crediting = "frame_start";  // or "per_tti"
  double required_embb_rate_bps = 10e6;

  // phy
  double noise_power_w = 1e-14;          // -110 dBm per RB
  double max_power_w = 39.810717055349734;  // 46 dBm per RU
  double urllc_snr_floor = 3.1622776601683795;  // 5 dB, linear
  double error_prob = 1e-3;
  std::string fading_block = "per_tti";  // or "per_frame"
  double min_distance_m = 10.0;

  // qos
  double latency_budget_s = 0.5e-3;
  double queue_cap_bits = 80000.0;  // 10 KB per RU
  LatencyConstants latency_constants;

  // slicing
  int urllc_overflow_divisor = 2;
  bool allow_zero_urllc_window = false;

  // flow split
  int flow_split_window = 5;

  // reward / utility
  double omega = 0.5;
  double ref_queue_bits = 0.0;  // 0 -> defaults to queue_cap_bits
  double ref_latency_s = 0.0;   // 0 -> defaults to latency_budget_s
  double ref_rate_bits = 0.0;   // 0 -> embb_users * required_rate * frame
  double penalty_value = -1.0;

  // learning
  double discount = 0.99;
  std::string target_update = "soft";  // or "hard"
  int target_update_period = 100;      // steps, hard mode only
  double soft_update_coeff = 0.01;
  int replay_capacity = 1000000;
  int batch_size = 100;
  EpsilonSchedule epsilon;
  int hidden_layers = 4;
  int hidden_units = 512;
  double learning_rate = 1e-3;

  // training / evaluation horizons
  int epochs = 300;
  int frames_per_episode = 20;
  int eval_frames = 50;

  // state normalization bounds for log10 channel gains
  double gain_log10_min = -14.0;
  double gain_log10_max = -6.0;

  int total_users() const { return embb_users + urllc_users; }
  // Users are indexed with eMBB first, uRLLC after.
  bool is_urllc_user(int u) const { return u >= embb_users; }
  double packet_bits(int u) const {
    return is_urllc_user(u) ? urllc_packet_bits : embb_packet_bits;
  }
  double arrival_rate(int u) const {
    return is_urllc_user(u) ? urllc_arrival_rate : embb_arrival_rate;
  }
  const NumerologyConfig& numerology(int slice) const {
    return slice == kSliceEmbb ? embb_numerology : urllc_numerology;
  }

  double resolved_ref_queue() const {
    return ref_queue_bits > 0.0 ? ref_queue_bits : queue_cap_bits;
  }
  double resolved_ref_latency() const {
    return ref_latency_s > 0.0 ? ref_latency_s : latency_budget_s;
  }
  double resolved_ref_rate_bits() const {
    return ref_rate_bits > 0.0 ? ref_rate_bits
                               : embb_users * required_embb_rate_bps *
                                     frame_duration_s;
  }
};

struct ConfigError {
  std::string path;  // dotted config path, e.g. "spectrum.alpha"
  std::string message;
};

// Returns the full list of violated rules (empty means the config is usable).
std::vector<ConfigError> validate_config(const SystemConfig& cfg);

// Time/frequency geometry derived from a validated config.
struct RBGrid {
  std::array<double, kNumSlices> slice_bandwidth_hz{};
  std::array<double, kNumSlices> rb_bandwidth_hz{};
  std::array<double, kNumSlices> tti_duration_s{};
  std::array<int, kNumSlices> num_rbs{};   // F_i
  std::array<int, kNumSlices> num_ttis{};  // T_i per frame

  // Fine clock: the frame advances in ticks of the shorter TTI; the slice
  // with the longer TTI updates every ticks_per_tti[] ticks.
  double tick_duration_s = 0.0;
  int ticks_per_frame = 0;
  std::array<int, kNumSlices> ticks_per_tti{};

  // uRLLC scheduling windows: on the uRLLC slice the latency budget covers
  // the first floor(D/delta) TTIs; overflow into the eMBB slice is counted
  // inside the first ceil(D/delta) TTIs there.
  int urllc_window_ttis = 0;    // uRLLC slice, floor rule
  int overflow_window_ttis = 0;  // eMBB slice, ceil rule

  int cells(int slice) const { return num_rbs[slice] * num_ttis[slice]; }
  int total_cells() const { return cells(0) + cells(1); }
  // 1-based TTI index of `slice` active at 0-based fine tick k.
  int tti_at_tick(int slice, int tick) const {
    return tick / ticks_per_tti[slice] + 1;
  }
  bool tti_starts_at_tick(int slice, int tick) const {
    return tick % ticks_per_tti[slice] == 0;
  }
};

// Requires a validated config; grid degenerate cases (zero RBs in a slice)
// are representable and legal.
RBGrid build_rb_grid(const SystemConfig& cfg);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

}  // namespace oransim

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "oransim/config.hpp"

namespace oransim {

// Gaussian tail function Q(x) = 0.5 * erfc(x / sqrt(2)).
double q_function(double x);

// Inverse of Q on p in (0, 0.5]; p = 0.5 maps to exactly 0. Newton iteration
// seeded by a rational approximation; |Q(result) - p| lands near machine
// precision. Throws std::domain_error outside the domain.
double inverse_q(double p);

// Finite-blocklength penalty psi = Q^-1(P_e) / sqrt(tti * bandwidth) with
// channel dispersion approximated by 1.
double fbl_penalty(double error_prob, double tti_s, double rb_bandwidth_hz);

// Shannon rate of one RB in bit/s.
double shannon_rb_rate(double rb_bandwidth_hz, double power_w, double gain,
                       double noise_w);

// Short-packet rate of one assigned RB in bit/s: Shannon minus the
// blocklength penalty, clamped at zero (an RB that cannot overcome the
// penalty carries nothing).
double fbl_rb_rate(double rb_bandwidth_hz, double power_w, double gain,
                   double noise_w, double psi);

// RB assignment for one frame. Each (slice, rb, tti) cell holds at most one
// (ru, user) owner, so intra-cell orthogonality cannot be violated by
// construction; the service class of an entry is the class of its user.
class RbAssignment {
 public:
  static constexpr int32_t kIdle = -1;

  RbAssignment() = default;
  RbAssignment(const RBGrid& grid, int num_rus, int num_users);

  int cell_index(int slice, int f, int tti0) const {
    return f * num_ttis_[slice] + tti0;
  }
  int32_t choice(int slice, int f, int tti0) const {
    return cells_[slice][cell_index(slice, f, tti0)];
  }
  void set_choice(int slice, int f, int tti0, int32_t encoded) {
    cells_[slice][cell_index(slice, f, tti0)] = encoded;
  }
  void assign(int slice, int f, int tti0, int ru, int user) {
    set_choice(slice, f, tti0, encode(ru, user));
  }
  void clear(int slice, int f, int tti0) {
    set_choice(slice, f, tti0, kIdle);
  }

  bool is_idle(int slice, int f, int tti0) const {
    return choice(slice, f, tti0) == kIdle;
  }
  int ru_of(int slice, int f, int tti0) const {
    return choice(slice, f, tti0) / num_users_;
  }
  int user_of(int slice, int f, int tti0) const {
    return choice(slice, f, tti0) % num_users_;
  }

  int32_t encode(int ru, int user) const { return ru * num_users_ + user; }

  int num_rbs(int slice) const { return num_rbs_[slice]; }
  int num_ttis(int slice) const { return num_ttis_[slice]; }
  int num_rus() const { return num_rus_; }
  int num_users() const { return num_users_; }
  const std::vector<int32_t>& slice_cells(int slice) const {
    return cells_[slice];
  }
  std::vector<int32_t>& slice_cells(int slice) { return cells_[slice]; }

  // RBs owned by `user` in `slice` during 1-based TTIs [1, window].
  int count_user_rbs_in_window(int slice, int user, int window_ttis) const;
  // RBs owned by `user` anywhere in `slice` over the whole frame.
  int count_user_rbs(int slice, int user) const;

 private:
  int num_rus_ = 0;
  int num_users_ = 0;
  std::array<int, kNumSlices> num_rbs_{};
  std::array<int, kNumSlices> num_ttis_{};
  std::array<std::vector<int32_t>, kNumSlices> cells_;
};

// Per-(ru, user) queue backlogs in bits.
class QueueState {
 public:
  QueueState() = default;
  QueueState(int num_rus, int num_users)
      : num_users_(num_users),
        q_(static_cast<size_t>(num_rus) * num_users, 0.0) {}

  double at(int m, int u) const { return q_[m * num_users_ + u]; }
  double& at(int m, int u) { return q_[m * num_users_ + u]; }
  const std::vector<double>& raw() const { return q_; }
  std::vector<double>& raw() { return q_; }

  double user_total(int u, int num_rus) const {
    double acc = 0.0;
    for (int m = 0; m < num_rus; ++m) {
      acc += at(m, u);
    }
    return acc;
  }
  double ru_total(int m) const {
    double acc = 0.0;
    for (int u = 0; u < num_users_; ++u) {
      acc += at(m, u);
    }
    return acc;
  }

 private:
  int num_users_ = 0;
  std::vector<double> q_;
};

// One backlog step: q <- max(q + credited - served, 0). The operation order
// is pinned ((q + credited) - served) so trace replays reproduce queues
// bit-exactly.
double update_queue(double q_bits, double credited_bits, double served_bits);

enum class LatencyStatus : uint8_t {
  kNoTraffic,    // no demand and no RBs; excluded from reports
  kUnscheduled,  // demand but no RB anywhere; a latency violation
  kScheduled,
};

struct UserLatency {
  LatencyStatus status = LatencyStatus::kNoTraffic;
  bool had_demand = false;  // arrivals or backlog at frame start
  double latency_s = 0.0;   // meaningful only when scheduled
};

struct LatencyReport {
  std::vector<UserLatency> urllc;  // indexed by uRLLC user (0-based in class)

  // Worst delivery latency: the max over users that were scheduled and had
  // traffic to move. RBs granted to an empty queue deliver nothing, so they
  // do not produce a latency sample. NaN when no user qualifies.
  double worst() const {
    double w = std::numeric_limits<double>::quiet_NaN();
    for (const UserLatency& ul : urllc) {
      if (ul.status != LatencyStatus::kScheduled || !ul.had_demand) {
        continue;
      }
      if (!(w >= ul.latency_s)) {  // also true when w is NaN
        w = ul.latency_s;
      }
    }
    return w;
  }
  bool any_unscheduled() const {
    for (const UserLatency& ul : urllc) {
      if (ul.status == LatencyStatus::kUnscheduled) {
        return true;
      }
    }
    return false;
  }
};

// Air-interface completion time of each uRLLC user: the end of its last
// assigned TTI on either slice (delta_i * 1-based TTI index) plus the fixed
// processing constants. `has_demand` marks users with arrivals or backlog
// this frame; such users without any RB are reported UNSCHEDULED.
LatencyReport worst_urllc_latency(const RbAssignment& pi, const RBGrid& grid,
                                  const SystemConfig& cfg,
                                  const std::vector<uint8_t>& has_demand);

// Two-term objective (minimization form): omega * sum of normalized eMBB
// time-average queues + (1 - omega) * worst normalized uRLLC latency.
double utility(const std::vector<double>& avg_embb_queues,
               const std::vector<double>& urllc_latencies, double omega,
               double q0, double tau0);

}  // namespace oransim

#include "oransim/rate.hpp"

#include <cmath>
#include <stdexcept>

namespace oransim {
namespace {

constexpr double kLog2E = 1.4426950408889634;  // log2(e)

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Acklam's rational approximation of the inverse standard normal CDF,
// accurate to ~1e-9 on its own; used only to seed Newton.
double inverse_normal_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Only the central region is reachable here (p <= 0.5 by the caller).
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double inverse_q(double p) {
  if (!(p > 0.0) || p > 0.5) {
    throw std::domain_error("inverse_q: p must lie in (0, 0.5]");
  }
  if (p == 0.5) {
    return 0.0;
  }
  // Q^-1(p) = -Phi^-1(p) for the standard normal.
  double x = -inverse_normal_cdf(p);
  for (int i = 0; i < 4; ++i) {
    x += (q_function(x) - p) / normal_pdf(x);
  }
  return x;
}

double fbl_penalty(double error_prob, double tti_s, double rb_bandwidth_hz) {
  return inverse_q(error_prob) / std::sqrt(tti_s * rb_bandwidth_hz);
}

double shannon_rb_rate(double rb_bandwidth_hz, double power_w, double gain,
                       double noise_w) {
  return rb_bandwidth_hz * std::log2(1.0 + power_w * gain / noise_w);
}

double fbl_rb_rate(double rb_bandwidth_hz, double power_w, double gain,
                   double noise_w, double psi) {
  const double r = rb_bandwidth_hz *
                   (std::log2(1.0 + power_w * gain / noise_w) - kLog2E * psi);
  return std::max(r, 0.0);
}

RbAssignment::RbAssignment(const RBGrid& grid, int num_rus, int num_users)
    : num_rus_(num_rus), num_users_(num_users) {
  for (int s = 0; s < kNumSlices; ++s) {
    num_rbs_[s] = grid.num_rbs[s];
    num_ttis_[s] = grid.num_ttis[s];
    cells_[s].assign(static_cast<size_t>(num_rbs_[s]) * num_ttis_[s], kIdle);
  }
}

int RbAssignment::count_user_rbs_in_window(int slice, int user,
                                           int window_ttis) const {
  int count = 0;
  const int ttis = std::min(window_ttis, num_ttis_[slice]);
  for (int f = 0; f < num_rbs_[slice]; ++f) {
    for (int t = 0; t < ttis; ++t) {
      if (!is_idle(slice, f, t) && user_of(slice, f, t) == user) {
        ++count;
      }
    }
  }
  return count;
}

int RbAssignment::count_user_rbs(int slice, int user) const {
  return count_user_rbs_in_window(slice, user, num_ttis_[slice]);
}

double update_queue(double q_bits, double credited_bits, double served_bits) {
  const double next = (q_bits + credited_bits) - served_bits;
  return next > 0.0 ? next : 0.0;
}

LatencyReport worst_urllc_latency(const RbAssignment& pi, const RBGrid& grid,
                                  const SystemConfig& cfg,
                                  const std::vector<uint8_t>& has_demand) {
  LatencyReport report;
  report.urllc.resize(cfg.urllc_users);
  const double fixed = cfg.latency_constants.total();

  for (int k = 0; k < cfg.urllc_users; ++k) {
    const int u = cfg.embb_users + k;
    int last_tti[kNumSlices] = {0, 0};  // 1-based, 0 = none
    for (int s = 0; s < kNumSlices; ++s) {
      for (int f = 0; f < grid.num_rbs[s]; ++f) {
        for (int t = 0; t < grid.num_ttis[s]; ++t) {
          if (!pi.is_idle(s, f, t) && pi.user_of(s, f, t) == u) {
            last_tti[s] = std::max(last_tti[s], t + 1);
          }
        }
      }
    }

    UserLatency& ul = report.urllc[k];
    ul.had_demand = has_demand[u] != 0;
    if (last_tti[0] == 0 && last_tti[1] == 0) {
      ul.status = has_demand[u] ? LatencyStatus::kUnscheduled
                                : LatencyStatus::kNoTraffic;
      continue;
    }
    double air = 0.0;
    for (int s = 0; s < kNumSlices; ++s) {
      if (last_tti[s] > 0) {
        air = std::max(air, grid.tti_duration_s[s] * last_tti[s]);
      }
    }
    ul.status = LatencyStatus::kScheduled;
    ul.latency_s = air + fixed;
  }
  return report;
}

double utility(const std::vector<double>& avg_embb_queues,
               const std::vector<double>& urllc_latencies, double omega,
               double q0, double tau0) {
  double queue_term = 0.0;
  for (double q : avg_embb_queues) {
    queue_term += q / q0;
  }
  double worst_latency = 0.0;
  for (double tau : urllc_latencies) {
    worst_latency = std::max(worst_latency, tau);
  }
  return omega * queue_term + (1.0 - omega) * worst_latency / tau0;
}

}  // namespace oransim

#pragma once

#include <cstdint>
#include <vector>

#include "oransim/config.hpp"

namespace oransim {

// Per-frame slicing quotas derived from the uRLLC arrivals.
struct SliceQuotas {
  int capacity = 0;                  // Omega: uRLLC-slice RBs inside the
                                     // latency window
  std::vector<int> per_user;         // Omega_u, one per uRLLC user
  std::vector<int> urllc_overflow;   // e_ur, one per uRLLC user (eMBB slice)
  int embb_leftover = 0;             // e_em, same for every eMBB user
};

// Omega = F_urllc * floor(latency_budget / delta_urllc), taken from the grid.
int urllc_capacity(const RBGrid& grid);

// Splits `capacity` across users proportionally to their arrivals with
// largest-remainder rounding (ties go to the lower user index). All-zero
// arrivals yield all-zero shares.
std::vector<int> per_user_capacity(const std::vector<uint64_t>& urllc_packets,
                                   int capacity);

// Full quota bundle for one frame. e_ur = ceil(max(lambda - Omega_u, 0) /
// overflow_divisor); e_em = floor((F2*T2 - sum min(lambda, Omega_u)) / U_em),
// clamped at zero.
SliceQuotas quotas(const std::vector<uint64_t>& urllc_packets,
                   const RBGrid& grid, const SystemConfig& cfg);

}  // namespace oransim

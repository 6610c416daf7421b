#include "oransim/slicing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oransim {

int urllc_capacity(const RBGrid& grid) {
  return grid.num_rbs[kSliceUrllc] * grid.urllc_window_ttis;
}

std::vector<int> per_user_capacity(const std::vector<uint64_t>& urllc_packets,
                                   int capacity) {
  const size_t n = urllc_packets.size();
  std::vector<int> shares(n, 0);
  const double total = std::accumulate(urllc_packets.begin(),
                                       urllc_packets.end(), 0.0);
  if (total <= 0.0 || capacity <= 0 || n == 0) {
    return shares;
  }

  std::vector<double> remainders(n);
  int assigned = 0;
  for (size_t u = 0; u < n; ++u) {
    const double exact = capacity * (urllc_packets[u] / total);
    shares[u] = static_cast<int>(std::floor(exact + 1e-12));
    remainders[u] = exact - shares[u];
    assigned += shares[u];
  }

  // Hand the leftover units to the largest remainders, lower index first on
  // ties.
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainders[a] > remainders[b];
  });
  for (size_t i = 0; i < n && assigned < capacity; ++i, ++assigned) {
    ++shares[order[i]];
  }
  return shares;
}

SliceQuotas quotas(const std::vector<uint64_t>& urllc_packets,
                   const RBGrid& grid, const SystemConfig& cfg) {
  SliceQuotas q;
  q.capacity = urllc_capacity(grid);
  q.per_user = per_user_capacity(urllc_packets, q.capacity);

  q.urllc_overflow.resize(urllc_packets.size());
  double reserved = 0.0;
  for (size_t u = 0; u < urllc_packets.size(); ++u) {
    const double lambda = static_cast<double>(urllc_packets[u]);
    const double excess = std::max(lambda - q.per_user[u], 0.0);
    q.urllc_overflow[u] = static_cast<int>(
        std::ceil(excess / cfg.urllc_overflow_divisor - 1e-12));
    reserved += std::min(lambda, static_cast<double>(q.per_user[u]));
  }

  if (cfg.embb_users > 0) {
    const double leftover = grid.cells(kSliceUrllc) - reserved;
    q.embb_leftover = std::max(
        0, static_cast<int>(std::floor(leftover / cfg.embb_users + 1e-12)));
  }
  return q;
}

}  // namespace oransim

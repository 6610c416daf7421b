#pragma once

#include <string>
#include <vector>

namespace oransim {

enum class ViolationKind {
  kUrllcQuota,      // slice-1 overflow RBs below e_ur inside the window
  kEmbbLeftover,    // slice-2 RBs below e_em for an eMBB user with demand
  kLatency,         // scheduled completion beyond the latency budget
  kUnscheduled,     // uRLLC demand with no RB at all
  kPowerInfeasible,  // Phase-A minimum powers overran an RU budget
  kDemand,          // frame-end per-(ru,user) served bits below phi*lambda*Z
  kQueueCap,        // frame-end per-RU queue total above the cap
};

struct Violation {
  ViolationKind kind;
  int user = -1;  // -1 when not user-scoped
  int ru = -1;    // -1 when not RU-scoped
  int tti = -1;   // 1-based fine tick for power infeasibility, else -1
  double shortfall = 0.0;
};

const char* violation_kind_name(ViolationKind kind);
std::string describe(const Violation& v);

}  // namespace oransim

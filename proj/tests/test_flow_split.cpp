#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oransim/flow_split.hpp"

#include <cmath>
#include <vector>

using namespace oransim;

namespace {

double column_sum(const FlowSplit& phi, int num_rus, int u) {
  double acc = 0.0;
  for (int m = 0; m < num_rus; ++m) {
    acc += phi.at(m, u);
  }
  return acc;
}

}  // namespace

TEST_CASE("uniform split gives each ru an equal share") {
  const FlowSplit phi = uniform_flow_split(4, 3);
  for (int m = 0; m < 4; ++m) {
    for (int u = 0; u < 3; ++u) {
      CHECK(phi.at(m, u) == doctest::Approx(0.25));
    }
  }
}

TEST_CASE("estimate before any observation falls back to uniform") {
  RateWindow window(3, 2, 5);
  CHECK(window.frames_seen() == 0);
  const FlowSplit phi = window.estimate_flow_split();
  for (int u = 0; u < 2; ++u) {
    CHECK(column_sum(phi, 3, u) == doctest::Approx(1.0));
    CHECK(phi.at(0, u) == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("split follows the windowed mean rates") {
  RateWindow window(2, 1, 5);
  // Two frames: rates 300/100 then 100/100 -> means 200/100 -> 2/3, 1/3.
  window.push_observation({300.0, 100.0});
  window.push_observation({100.0, 100.0});
  const FlowSplit phi = window.estimate_flow_split();
  CHECK(phi.at(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(phi.at(1, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("window evicts the oldest frame once full") {
  RateWindow window(2, 1, 2);
  window.push_observation({1000.0, 0.0});
  window.push_observation({0.0, 100.0});
  window.push_observation({0.0, 100.0});
  // The 1000/0 frame fell out of the window; only 0/100 remains.
  const FlowSplit phi = window.estimate_flow_split();
  CHECK(phi.at(0, 0) == doctest::Approx(0.0));
  CHECK(phi.at(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("user with no observed service falls back to uniform") {
  RateWindow window(2, 2, 5);
  window.push_observation({500.0, 0.0, 0.0, 0.0});  // user 1 never served
  const FlowSplit phi = window.estimate_flow_split();
  CHECK(phi.at(0, 0) == doctest::Approx(1.0));
  CHECK(phi.at(1, 0) == doctest::Approx(0.0));
  CHECK(phi.at(0, 1) == doctest::Approx(0.5));
  CHECK(phi.at(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("columns always sum to one") {
  RateWindow window(3, 4, 3);
  window.push_observation({10, 0, 5, 1, 20, 0, 5, 2, 30, 0, 5, 3});
  window.push_observation({0, 0, 5, 4, 10, 0, 5, 5, 10, 0, 5, 6});
  const FlowSplit phi = window.estimate_flow_split();
  for (int u = 0; u < 4; ++u) {
    CHECK(column_sum(phi, 3, u) == doctest::Approx(1.0));
  }
}

TEST_CASE("reset clears the history") {
  RateWindow window(2, 1, 5);
  window.push_observation({100.0, 0.0});
  window.reset();
  CHECK(window.frames_seen() == 0);
  const FlowSplit phi = window.estimate_flow_split();
  CHECK(phi.at(0, 0) == doctest::Approx(0.5));
  CHECK(phi.at(1, 0) == doctest::Approx(0.5));
}

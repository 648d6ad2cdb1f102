#include <catch2/catch.hpp>

#include "romshm/fem/loads.hpp"

using namespace romshm;
using namespace romshm::fem;

namespace {

std::vector<double> sleepers(int count, double spacing = 0.65, double first = 0.0) {
  std::vector<double> x(count);
  for (int i = 0; i < count; ++i) x[i] = first + spacing * i;
  return x;
}

}  // namespace

TEST_CASE("sleeper hat peaks at 1 when the axle crosses its axis") {
  const double speed = 180.0 / 3.6;  // m/s
  const double x_sleeper = 0.65 * 7;
  const double x0 = -3.1;
  const double t_peak = (x_sleeper + x0) / speed;
  REQUIRE(axle_time_modulation(x_sleeper, 0.65, x0, speed, t_peak) == Approx(1.0));
}

TEST_CASE("sleeper hat vanishes at the adjacent sleeper axes") {
  const double speed = 200.0 / 3.6;
  const double x_sleeper = 0.65 * 3;
  const double x0 = 1.2;
  const double t_prev = (x_sleeper - 0.65 + x0) / speed;
  const double t_next = (x_sleeper + 0.65 + x0) / speed;
  REQUIRE(axle_time_modulation(x_sleeper, 0.65, x0, speed, t_prev) == Approx(0.0).margin(1e-12));
  REQUIRE(axle_time_modulation(x_sleeper, 0.65, x0, speed, t_next) == Approx(0.0).margin(1e-12));
}

TEST_CASE("hat time integral equals spacing over speed") {
  // Quadrature oracle: trapezoid rule on a fine grid over the support.
  const double speed_kmh = 172.0;
  const double speed = speed_kmh / 3.6;
  const double x_sleeper = 0.65 * 5;
  const double x0 = 0.4;
  const double t_lo = (x_sleeper - 0.65 + x0) / speed;
  const double t_hi = (x_sleeper + 0.65 + x0) / speed;
  const int n = 200000;
  const double h = (t_hi - t_lo) / n;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    integral += w * axle_time_modulation(x_sleeper, 0.65, x0, speed, t_lo + i * h);
  }
  integral *= h;
  REQUIRE(integral == Approx(0.65 / speed).margin(1e-6));
}

TEST_CASE("moving load signal is nonnegative with compact support per axle") {
  // Deck starts 5 m down the line; axle offsets grow towards the train rear,
  // so axle alpha crosses abscissa x at t = (x + x0_alpha) / speed.
  const auto x = sleepers(25, 0.65, 5.0);
  const std::vector<double> axles = {0.0, 2.5, 7.0, 9.5, 16.0, 18.5, 23.0, 25.5};
  const double speed_kmh = 160.0;
  const double speed = speed_kmh / 3.6;
  const double f_axle = 185.0e3;

  const double t_end = (x.back() + 0.65 + axles.back()) / speed;
  for (int i = 0; i <= 500; ++i) {
    const Vec p = moving_load_signal(x, axles, speed_kmh, f_axle, t_end * i / 500);
    REQUIRE(p.minCoeff() >= 0.0);
  }

  // Before the lead axle reaches the first sleeper's predecessor axis, and
  // after the last axle leaves the last sleeper's successor axis, the signal
  // vanishes everywhere.
  const double t_before = (x.front() - 0.65 + axles.front()) / speed - 1e-9;
  REQUIRE(t_before > 0.0);
  REQUIRE(moving_load_signal(x, axles, speed_kmh, f_axle, t_before).maxCoeff() == 0.0);
  REQUIRE(moving_load_signal(x, axles, speed_kmh, f_axle, t_end + 1e-9).maxCoeff() == 0.0);

  // Peak pressure equals F / (0.55 * 2.1) when one axle is on a sleeper axis.
  const double t_peak = (x[10] + 2.5) / speed;
  const Vec p = moving_load_signal(x, {2.5}, speed_kmh, f_axle, t_peak);
  REQUIRE(p[10] == Approx(f_axle / kSleeperLoadedArea));
}

TEST_CASE("moving load validates its inputs") {
  const auto x = sleepers(10);
  REQUIRE_THROWS_AS(moving_load_signal(x, {0.0}, 0.0, 1.0e5, 0.1), ConfigError);
  REQUIRE_THROWS_AS(moving_load_signal(x, {0.0}, -10.0, 1.0e5, 0.1), ConfigError);
  REQUIRE_THROWS_AS(moving_load_signal(x, {}, 160.0, 1.0e5, 0.1), ConfigError);
  std::vector<double> uneven = {0.0, 0.65, 1.5};
  REQUIRE_THROWS_AS(moving_load_signal(uneven, {0.0}, 160.0, 1.0e5, 0.1), ConfigError);
}

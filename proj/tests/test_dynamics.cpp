#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "rom_data.hpp"
#include "thermrom/dynamics.hpp"
#include "thermrom/refsim.hpp"

using namespace thermrom;

namespace {

const RomCoefficients kStandard{0.4350, 10.2650, 2.2750, 1.1};

TimeSeries constant_input(std::size_t n, double value) {
  return TimeSeries::uniform(std::vector<double>(n, value), 1.0, 0.0, "u");
}

TimeSeries weather_input(std::size_t days, std::uint64_t seed) {
  return synth_weather(days, seed, WeatherProfile::mild_coastal).outdoor();
}

oracle::M2 to_m2(const Mat2& a) { return {{{a[0][0], a[0][1]}, {a[1][0], a[1][1]}}}; }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST(Simulate, RestStateOfHomogeneousSystem) {
  const auto y = simulate(to_state_space({1, 1, 1, 0}), constant_input(100, 0.0), SimConfig{});
  for (double x : y.v) EXPECT_EQ(x, 0.0);
}

TEST(Simulate, ConvergesToSteadyState) {
  const double xss = steady_state(kStandard, 0.0);
  // Slowest mode decays as exp(-0.2237 t): O(1) offsets need ~120 h to fall
  // below 1e-6, offsets below 0.05 C get there within 50 h.
  for (const auto& [x0, v0] : {std::pair{0.0, 0.0}, {5.0, -1.0}, {-10.0, 3.0}, {20.0, 0.0}}) {
    SimConfig cfg;
    cfg.x0 = x0;
    cfg.v0 = v0;
    const auto y = simulate(to_state_space(kStandard), constant_input(121, 0.0), cfg);
    EXPECT_NEAR(y.v.back(), xss, 1e-6);
    const auto rk = oracle::rk4_scalar_ode(kStandard.c1, kStandard.c2, kStandard.c3, kStandard.c4,
                                           std::vector<double>(121, 0.0), 1.0, 400, x0, v0);
    EXPECT_NEAR(rk.back(), xss, 1e-6);
  }
  SimConfig near;
  near.x0 = xss + 0.05;
  const auto y = simulate(to_state_space(kStandard), constant_input(51, 0.0), near);
  EXPECT_NEAR(y.v[50], xss, 1e-6);
}

TEST(Simulate, ExactZohMatchesScalarRk4Oracle) {
  std::mt19937_64 rng(21);
  const auto u = weather_input(12, 3);
  for (int i = 0; i < 20; ++i) {
    const auto c = fixture::random_stable_model(rng);
    SimConfig cfg;
    cfg.x0 = 12.0;
    cfg.v0 = 0.3;
    const auto y = simulate(to_state_space(c), u, cfg);
    const auto ref = oracle::rk4_scalar_ode(c.c1, c.c2, c.c3, c.c4, u.v, 1.0, 100, cfg.x0, cfg.v0);
    EXPECT_LT(max_abs_diff(y.v, ref), 1e-6) << "c = " << c.c1 << ", " << c.c2 << ", " << c.c3;
  }
}

TEST(Simulate, Rk4PathMatchesExactZoh) {
  std::mt19937_64 rng(22);
  const auto u = weather_input(12, 4);
  for (int i = 0; i < 10; ++i) {
    const auto c = fixture::random_stable_model(rng);
    SimConfig zoh;
    zoh.x0 = 10.0;
    SimConfig rk = zoh;
    rk.method = IntegrationMethod::rk4;
    rk.dt = 0.01;
    const auto a = simulate(to_state_space(c), u, zoh);
    const auto b = simulate(to_state_space(c), u, rk);
    EXPECT_LT(max_abs_diff(a.v, b.v), 1e-6);
  }
}

TEST(Simulate, InputValidation) {
  const auto m = to_state_space(kStandard);
  SimConfig cfg;
  auto u = constant_input(10, 1.0);
  u.t[5] += 0.5;
  EXPECT_THROW(simulate(m, u, cfg), DataError);

  auto nan_u = constant_input(10, 1.0);
  nan_u.v[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(simulate(m, nan_u, cfg), DataError);

  cfg.dt = 0.0;
  EXPECT_THROW(simulate(m, constant_input(10, 1.0), cfg), DomainError);
  cfg.dt = -1.0;
  EXPECT_THROW(simulate(m, constant_input(10, 1.0), cfg), DomainError);

  cfg.dt = 0.5;  // exact_zoh needs dt == spacing
  EXPECT_THROW(simulate(m, constant_input(10, 1.0), cfg), DataError);
  cfg.method = IntegrationMethod::rk4;
  EXPECT_NO_THROW(simulate(m, constant_input(10, 1.0), cfg));
  cfg.dt = 0.3;
  EXPECT_THROW(simulate(m, constant_input(10, 1.0), cfg), DataError);
}

TEST(Simulate, OutputKeepsTimestamps) {
  const auto u = TimeSeries::uniform({1, 2, 3, 4}, 1.0, 100.0, "u");
  SimConfig cfg;
  cfg.x0 = 7.0;
  const auto y = simulate(to_state_space(kStandard), u, cfg);
  EXPECT_EQ(y.t, u.t);
  EXPECT_EQ(y.v.front(), 7.0);
}

TEST(StepMatrix, ZeroStepLimit) {
  for (const RomCoefficients c : {kStandard, RomCoefficients{1, 0, 1, 0}, RomCoefficients{1, 2, 1, 0}}) {
    const auto s = step_matrix(to_state_space(c), 1e-9);
    EXPECT_NEAR(s.ad[0][0], 1.0, 1e-7);
    EXPECT_NEAR(s.ad[0][1], 0.0, 1e-7);
    EXPECT_NEAR(s.ad[1][0], 0.0, 1e-7);
    EXPECT_NEAR(s.ad[1][1], 1.0, 1e-7);
    for (int i = 0; i < 2; ++i) {
      EXPECT_NEAR(s.bd[i], 0.0, 1e-7);
      EXPECT_NEAR(s.dd[i], 0.0, 1e-7);
    }
  }
}

TEST(StepMatrix, Semigroup) {
  for (const RomCoefficients c : {kStandard, RomCoefficients{1, 0, 1, 0}, RomCoefficients{1, 2, 1, 0},
                                  RomCoefficients{1, 0.3, 2, 1}, RomCoefficients{0.06, 6.335, 7.34, 1.1}}) {
    const auto m = to_state_space(c);
    for (double dt : {0.1, 0.5, 1.0}) {
      const auto one = step_matrix(m, dt);
      const auto two = step_matrix(m, 2 * dt);
      const Mat2 sq = mul(one.ad, one.ad);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(two.ad[i][j], sq[i][j], 1e-10);
    }
  }
}

TEST(StepMatrix, CriticallyDampedMatchesTaylorSeries) {
  const auto m = to_state_space({1, 2, 1, 0});
  for (double dt : {0.25, 1.0, 3.0}) {
    const auto s = step_matrix(m, dt);
    const auto ref = oracle::taylor_zoh(to_m2(m.a), dt);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(s.ad[i][j], ref.phi[i][j], 1e-9);
      EXPECT_NEAR(s.bd[i], ref.gamma[i][1] * m.b[1], 1e-9);
    }
  }
}

TEST(StepMatrix, AllBranchesMatchTaylorSeries) {
  // complex pair, near-repeated (series branch), real distinct, integrator (c3 = 0)
  for (const RomCoefficients c : {RomCoefficients{1, 0.5, 4, 2}, RomCoefficients{1, 2 + 1e-9, 1, 1},
                                  RomCoefficients{1, 2 - 1e-9, 1, 1}, RomCoefficients{0.8, 3, 1, -1},
                                  RomCoefficients{1, 1, 0, 1}}) {
    const auto m = to_state_space(c);
    const auto s = step_matrix(m, 1.0);
    const auto ref = oracle::taylor_zoh(to_m2(m.a), 1.0);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) EXPECT_NEAR(s.ad[i][j], ref.phi[i][j], 1e-10);
      EXPECT_NEAR(s.bd[i], ref.gamma[i][1] * m.b[1], 1e-10);
      EXPECT_NEAR(s.dd[i], ref.gamma[i][1] * m.d[1], 1e-10);
    }
  }
}

TEST(StepMatrix, RejectsNonPositiveDt) {
  EXPECT_THROW(step_matrix(to_state_space(kStandard), 0.0), DomainError);
  EXPECT_THROW(step_matrix(to_state_space(kStandard), -1.0), DomainError);
}

TEST(DynamicsProperties, Superposition) {
  std::mt19937_64 rng(23);
  const auto u1 = weather_input(5, 1);
  const auto u2 = weather_input(5, 2);
  for (int i = 0; i < 20; ++i) {
    const auto c = fixture::random_stable_model(rng);
    const auto m = to_state_space(c);
    const double alpha = 0.7, beta = -1.3;
    TimeSeries mix = u1;
    for (std::size_t k = 0; k < mix.size(); ++k) mix.v[k] = alpha * u1.v[k] + beta * u2.v[k];
    const SimConfig zero;
    const auto y1 = simulate(m, u1, zero);
    const auto y2 = simulate(m, u2, zero);
    const auto y0 = simulate(m, constant_input(u1.size(), 0.0), zero);
    const auto ym = simulate(m, mix, zero);
    for (std::size_t k = 0; k < ym.size(); ++k) {
      const double want = alpha * y1.v[k] + beta * y2.v[k] + (1 - alpha - beta) * y0.v[k];
      EXPECT_NEAR(ym.v[k], want, 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(DynamicsProperties, BoundedResponse) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> noise(-30.0, 30.0);
  for (int i = 0; i < 20; ++i) {
    const auto c = fixture::random_stable_model(rng);
    std::vector<double> v(10001);
    double umax = 0.0;
    for (double& x : v) {
      x = noise(rng);
      umax = std::max(umax, std::abs(x + c.c4));
    }
    SimConfig cfg;
    cfg.x0 = 3.0;
    const auto m = to_state_space(c);
    const auto y = simulate(m, TimeSeries::uniform(v), cfg);
    // |x_k| <= sup |free response| + sum_j |impulse response_j| * max |u + c4|
    const auto step = step_matrix(m, 1.0);
    Vec2 free{cfg.x0, cfg.v0};
    Vec2 impulse = step.bd;
    double free_sup = std::abs(free[0]), l1 = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      free = mul(step.ad, free);
      free_sup = std::max(free_sup, std::abs(free[0]));
      l1 += std::abs(impulse[0]);
      impulse = mul(step.ad, impulse);
    }
    const double bound = free_sup + l1 * umax;
    for (double x : y.v) ASSERT_LE(std::abs(x), bound * (1 + 1e-9));
  }
}

TEST(DynamicsProperties, TimeInvariance) {
  std::mt19937_64 rng(25);
  const auto u = weather_input(4, 9);
  for (int i = 0; i < 10; ++i) {
    auto c = fixture::random_stable_model(rng);
    c.c4 = 0.0;
    const std::size_t shift = 7;
    std::vector<double> shifted(u.size(), 0.0);
    for (std::size_t k = shift; k < u.size(); ++k) shifted[k] = u.v[k - shift];
    const auto y = simulate(to_state_space(c), u, SimConfig{});
    const auto ys = simulate(to_state_space(c), TimeSeries::uniform(shifted), SimConfig{});
    for (std::size_t k = 0; k < shift; ++k) EXPECT_EQ(ys.v[k], 0.0);
    for (std::size_t k = shift; k < u.size(); ++k) EXPECT_EQ(ys.v[k], y.v[k - shift]);
  }
}

TEST(DynamicsProperties, ConstantInputEquilibrium) {
  std::mt19937_64 rng(26);
  for (int i = 0; i < 50; ++i) {
    const auto c = fixture::random_stable_model(rng);
    const auto p = oracle::quadratic_roots(c.c1, c.c2, c.c3);
    const double slowest = std::min(std::abs(p[0].real()), std::abs(p[1].real()));
    SimConfig cfg;
    cfg.x0 = -5.0;
    cfg.v0 = 2.0;
    // horizon for exp(-slowest t) * (initial offset) < 1e-8
    const double gap = 10.0 * (std::abs(cfg.x0 - steady_state(c, 8.0)) + std::abs(cfg.v0) / slowest + 1.0);
    const auto hours = static_cast<std::size_t>(std::ceil(std::log(gap / 1e-8) / slowest)) + 1;
    if (hours > 50000) continue;
    const auto y = simulate(to_state_space(c), constant_input(hours + 1, 8.0), cfg);
    EXPECT_NEAR(y.v.back(), steady_state(c, 8.0), 1e-6);
  }
}

TEST(DefaultInitialRate, FiniteDifference) {
  const auto x = TimeSeries::uniform({10.0, 10.5, 11.5}, 2.0);
  EXPECT_DOUBLE_EQ(default_initial_rate(x), 0.25);
  EXPECT_THROW(default_initial_rate(TimeSeries::uniform({1.0})), DataError);
}

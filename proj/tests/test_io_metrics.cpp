#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "thermrom/io_metrics.hpp"

using namespace thermrom;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

TimeSeries series(std::vector<double> v, std::string label = "x") {
  return TimeSeries::uniform(std::move(v), 1.0, 0.0, std::move(label));
}

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST(Csv, ReadsTwoRowFile) {
  const auto ds = parse("hour,t_out,t_in\n0,10,20\n1,11,21");
  ASSERT_EQ(ds.columns.size(), 2u);
  EXPECT_EQ(ds.rows(), 2u);
  EXPECT_EQ(ds.at("t_out").v, (std::vector<double>{10, 11}));
  EXPECT_EQ(ds.at("t_in").v, (std::vector<double>{20, 21}));
  EXPECT_EQ(ds.at("t_in").t, (std::vector<double>{0, 1}));
  EXPECT_TRUE(ds.contains("t_in"));
  EXPECT_FALSE(ds.contains("zone1"));
  EXPECT_THROW(ds.at("zone1"), DataError);
}

TEST(Csv, ToleratesCrlfAndBlankLines) {
  const auto ds = parse("hour,a\r\n0,1.5\r\n\r\n1,2.5\r\n");
  EXPECT_EQ(ds.at("a").v, (std::vector<double>{1.5, 2.5}));
}

TEST(Csv, RoundtripAtFullPrecision) {
  std::mt19937_64 rng(5);
  auto a = random_values(rng, 50, -40.0, 60.0);
  a[0] = 0.1;
  a[1] = -0.0;
  a[2] = 1e-300;
  a[3] = std::numeric_limits<double>::max();
  a[4] = 1.0 / 3.0;
  std::vector<double> t(50);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = 0.25 * static_cast<double>(k) + 1e-7;
  const std::vector<TimeSeries> cols{TimeSeries(t, a, "t_out"), TimeSeries(t, random_values(rng, 50, 0, 1), "t_in")};
  const std::string text = to_csv_string(cols);
  const auto back = parse(text);
  ASSERT_EQ(back.columns.size(), 2u);
  for (std::size_t c = 0; c < 2; ++c) {
    EXPECT_EQ(back.columns[c].label, cols[c].label);
    EXPECT_EQ(back.columns[c].t, cols[c].t);
    for (std::size_t k = 0; k < 50; ++k) EXPECT_EQ(back.columns[c].v[k], cols[c].v[k]);
  }
  EXPECT_TRUE(std::signbit(back.columns[0].v[1]));
  EXPECT_EQ(to_csv_string(back.columns), text);
}

TEST(Csv, WriterFormattingIsStable) {
  const std::vector<TimeSeries> cols{series({10, 11.5}, "t_out"), series({0.1, 20}, "t_in")};
  EXPECT_EQ(to_csv_string(cols), "hour,t_out,t_in\n0,10,0.1\n1,11.5,20\n");
}

TEST(Csv, FileRoundtrip) {
  const auto path = (std::filesystem::temp_directory_path() / "thermrom_io_roundtrip.csv").string();
  const std::vector<TimeSeries> cols{series({1, 2, 3}, "t_out")};
  write_csv(path, cols);
  EXPECT_EQ(read_csv(path).columns, cols);
  std::filesystem::remove(path);
  EXPECT_THROW(read_csv(path), DataError);
}

TEST(Csv, ErrorsNameTheRow) {
  EXPECT_NE(error_of("hour,a\n0,1\n2,2\n1,3\n").find("row 4"), std::string::npos);
  EXPECT_NE(error_of("hour,a\n0,1\n0,2\n").find("row 3"), std::string::npos);
  EXPECT_NE(error_of("hour,a,b\n0,1,2\n1,2\n").find("row 3"), std::string::npos);
  EXPECT_NE(error_of("hour,a\n0,1\n1,abc\n").find("row 3"), std::string::npos);
  EXPECT_NE(error_of("hour,a\n0,1\n1,nan\n").find("row 3"), std::string::npos);
  EXPECT_NE(error_of("hour,a\n0,1x\n").find("row 2"), std::string::npos);
  EXPECT_FALSE(error_of("").empty());
  EXPECT_FALSE(error_of("time,a\n0,1\n").empty());
  EXPECT_FALSE(error_of("hour,a,a\n0,1,2\n").empty());
  EXPECT_FALSE(error_of("hour,,a\n0,1,2\n").empty());
}

TEST(Rmse, Examples) {
  const auto actual = series({10, 10, 10, 10});
  EXPECT_EQ(rmse_percent(actual, actual), 0.0);
  EXPECT_DOUBLE_EQ(rmse_percent(actual, series({11, 9, 11, 9})), 10.0);
  EXPECT_DOUBLE_EQ(rmse(actual, series({11, 9, 11, 9})), 1.0);
}

TEST(Rmse, ZeroMeanIsADomainError) {
  const auto actual = series({-1, 1});
  try {
    rmse_percent(actual, series({0, 0}));
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("rmse_percent_range"), std::string::npos);
  }
  EXPECT_DOUBLE_EQ(rmse_percent_range(actual, series({-1, 1})), 0.0);
}

TEST(Rmse, LengthMismatch) {
  EXPECT_THROW(rmse(series({1, 2}), series({1})), DataError);
  EXPECT_THROW(rmse(series({}), series({})), DataError);
}

TEST(Rmse, RangeVariant) {
  std::vector<double> a(11);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = static_cast<double>(k);  // range 10
  std::vector<double> b = a;
  for (double& x : b) x += 1.0;
  EXPECT_EQ(rmse_percent_range(series(a), series(a)), 0.0);
  EXPECT_DOUBLE_EQ(rmse_percent_range(series(a), series(b)), 10.0);
  EXPECT_THROW(rmse_percent_range(series({3, 3, 3}), series({1, 2, 3})), DomainError);
  EXPECT_DOUBLE_EQ(rmse_percent(series(a), series(b), ErrorNormalization::range), 10.0);
  EXPECT_DOUBLE_EQ(rmse_percent(series(a), series(b), ErrorNormalization::mean), 20.0);
}

TEST(RmseProperties, ScaleInvariance) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    auto a = random_values(rng, 30, 5, 25), b = random_values(rng, 30, 5, 25);
    const double ref = rmse_percent(series(a), series(b));
    const double k = std::exp(std::uniform_real_distribution<double>(-5, 5)(rng));
    for (double& x : a) x *= k;
    for (double& x : b) x *= k;
    EXPECT_NEAR(rmse_percent(series(a), series(b)), ref, 1e-12 * ref);
  }
}

TEST(RmseProperties, RangeShiftInvariance) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    auto a = random_values(rng, 30, 5, 25), b = random_values(rng, 30, 5, 25);
    const double ref = rmse_percent_range(series(a), series(b));
    const double shift = std::uniform_real_distribution<double>(-100, 100)(rng);
    for (double& x : a) x += shift;
    for (double& x : b) x += shift;
    EXPECT_NEAR(rmse_percent_range(series(a), series(b)), ref, 1e-9 * ref);
  }
}

TEST(RmseProperties, DocumentedAsymmetry) {
  const auto a = series({10, 12, 14}), b = series({20, 22, 24});
  EXPECT_NE(rmse_percent(a, b), rmse_percent(b, a));
  const auto c = series({12, 10, 14});  // same mean as a
  EXPECT_EQ(rmse_percent(a, c), rmse_percent(c, a));
}

TEST(RmseProperties, TriangleInequality) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    const auto a = series(random_values(rng, 20, -10, 10));
    const auto b = series(random_values(rng, 20, -10, 10));
    const auto c = series(random_values(rng, 20, -10, 10));
    EXPECT_LE(rmse(a, c), rmse(a, b) + rmse(b, c) + 1e-12);
  }
}

TEST(PeakLag, IdenticalSeries) {
  std::mt19937_64 rng(9);
  const auto a = series(random_values(rng, 100, 0, 1));
  EXPECT_EQ(peak_lag(a, a, 10), 0);
}

TEST(PeakLag, ConstructedShift) {
  auto f = [](double t) {
    return std::sin(2 * std::numbers::pi * t / 24.0) + 0.4 * std::sin(2 * std::numbers::pi * t / 8.0);
  };
  std::vector<double> a(240), b(240);
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = f(static_cast<double>(k));
    b[k] = f(static_cast<double>(k) - 3.0);
  }
  EXPECT_EQ(peak_lag(series(a), series(b), 10), 3);
  EXPECT_EQ(peak_lag(series(b), series(a), 10), -3);
}

TEST(PeakLag, QuarterPeriodPhaseMatchesBruteForce) {
  std::vector<double> s(240), c(240);
  for (std::size_t k = 0; k < s.size(); ++k) {
    s[k] = std::sin(2 * std::numbers::pi * static_cast<double>(k) / 24.0);
    c[k] = std::cos(2 * std::numbers::pi * static_cast<double>(k) / 24.0);
  }
  // cos leads sin by a quarter period: the sine trails the cosine by 6 samples
  EXPECT_EQ(peak_lag(series(c), series(s), 12), 6);
  EXPECT_EQ(peak_lag(series(s), series(c), 12), -6);
  EXPECT_EQ(peak_lag(series(c), series(s), 12), oracle::brute_force_lag(c, s, 12));
  EXPECT_EQ(peak_lag(series(s), series(c), 12), oracle::brute_force_lag(s, c, 12));
}

TEST(PeakLag, MatchesBruteForceOnRandomSignals) {
  std::mt19937_64 rng(10);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_values(rng, 60, -1, 1), b = random_values(rng, 60, -1, 1);
    EXPECT_EQ(peak_lag(series(a), series(b), 8), oracle::brute_force_lag(a, b, 8));
  }
}

TEST(PeakLag, Antisymmetry) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto a = series(random_values(rng, 80, -1, 1)), b = series(random_values(rng, 80, -1, 1));
    EXPECT_EQ(peak_lag(a, b, 10), -peak_lag(b, a, 10));
  }
}

TEST(PeakLag, Errors) {
  EXPECT_THROW(peak_lag(series({1, 1, 1, 1, 1}), series({1, 2, 3, 4, 5}), 1), DomainError);
  EXPECT_THROW(peak_lag(series({1, 2, 3, 4}), series({4, 3, 2, 1}), 2), DataError);
  EXPECT_THROW(peak_lag(series({1, 2, 3}), series({1, 2}), 0), DataError);
}

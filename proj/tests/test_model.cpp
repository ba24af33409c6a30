#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "test_support.hpp"
#include "usnl/errors.hpp"
#include "usnl/model.hpp"

using namespace usnl;

TEST_CASE("relu and abs initialization keeps every unit alive") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (auto kind : {MappingKind::Relu, MappingKind::Absolute}) {
      const auto s = init_factors(50, 20, kind, 0.03, seed);
      for (double y : s.parameters()) {
        CHECK(y > 0.001);
        CHECK(y <= 0.1);
      }
      for (double x : s.factors()) CHECK(x > 0.0);
    }
  }
}

TEST_CASE("sigmoid initialization bounds the initial predictions") {
  // y in [-3, -1] -> x <= 1 / (1 + e), so r_hat < 20 / (1 + e)^2 ~ 1.4466
  const double x_max = 1.0 / (1.0 + std::numbers::e);
  const double bound = 20.0 * x_max * x_max;
  const auto s = init_factors(60, 20, MappingKind::Sigmoid, 0.0, 4);
  for (Index i = 0; i < 60; ++i) {
    for (Index j = i; j < 60; ++j) {
      const double p = s.predict(i, j);
      CHECK(p > 0.0);
      CHECK(p < bound);
    }
  }
  CHECK(bound == doctest::Approx(1.44659).epsilon(1e-5));
}

TEST_CASE("initialization is deterministic per seed") {
  CHECK(init_factors(10, 4, MappingKind::Sigmoid, 0.1, 3) == init_factors(10, 4, MappingKind::Sigmoid, 0.1, 3));
  CHECK_FALSE(init_factors(10, 4, MappingKind::Relu, 0.1, 3) == init_factors(10, 4, MappingKind::Relu, 0.1, 4));
}

TEST_CASE("predict on constant states") {
  const FactorState abs_zero(5, 3, MappingKind::Absolute, 0.0, std::vector<double>(15, 0.0));
  CHECK(abs_zero.predict(1, 2) == 0.0);
  const FactorState sig_zero(5, 4, MappingKind::Sigmoid, 0.0, std::vector<double>(20, 0.0));
  CHECK(sig_zero.predict(0, 4) == 1.0);
  CHECK_THROWS_AS(sig_zero.predict(5, 0), std::out_of_range);
}

TEST_CASE("predict is symmetric and nonnegative for arbitrary parameters") {
  for (auto kind : {MappingKind::Sigmoid, MappingKind::Absolute, MappingKind::Relu}) {
    const auto s = testing::random_state(40, 7, kind, 0.1, 11, -5.0, 5.0);
    for (Index i = 0; i < 40; ++i) {
      for (Index j = 0; j < 40; ++j) {
        CHECK(s.predict(i, j) == s.predict(j, i));
        CHECK(s.predict(i, j) >= 0.0);
      }
    }
    for (double x : s.factors()) CHECK(x >= 0.0);
  }
}

TEST_CASE("instance_loss worked examples") {
  SUBCASE("perfect fit") {
    const FactorState s(2, 1, MappingKind::Absolute, 0.0, {0.5, 0.4});
    CHECK(s.instance_loss({0, 1, 0.2}) == doctest::Approx(0.0));
  }
  SUBCASE("zero prediction, unit target") {
    const FactorState s(2, 1, MappingKind::Relu, 0.0, {-1.0, 0.4});
    CHECK(s.instance_loss({0, 1, 1.0}) == 0.5);
  }
  SUBCASE("hand arithmetic with regularization") {
    // 1/2 [(0.3 - 0.2)^2 + 0.1 (0.25 + 0.16)] = 0.0255
    const FactorState s(2, 1, MappingKind::Absolute, 0.1, {0.5, 0.4});
    CHECK(s.instance_loss({0, 1, 0.3}) == doctest::Approx(0.0255).epsilon(1e-12));
  }
}

TEST_CASE("total_loss sums instance losses") {
  const auto store = testing::random_store(12, 40, 8);
  const auto s = testing::random_state(12, 3, MappingKind::Sigmoid, 0.05, 9);
  CHECK(total_loss(s, store, {}) == 0.0);
  const std::vector<Position> one{3};
  CHECK(total_loss(s, store, one) == s.instance_loss(store.entry(3)));
  const std::vector<Position> two{1, 5};
  // independent accumulation from raw parameters
  double brute = 0.0;
  for (auto p : two) {
    const Entry e = store.entry(p);
    double pred = 0.0, reg = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double xi = 1.0 / (1.0 + std::exp(-s.row(e.i)[k]));
      const double xj = 1.0 / (1.0 + std::exp(-s.row(e.j)[k]));
      pred += xi * xj;
      reg += xi * xi + xj * xj;
    }
    brute += 0.5 * ((e.value - pred) * (e.value - pred) + 0.05 * reg);
  }
  CHECK(total_loss(s, store, two) == doctest::Approx(brute).epsilon(1e-12));
  const auto all = testing::all_positions(store);
  CHECK(total_loss(s, store, all) >= total_loss(s, store, two));
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(21);
  for (auto kind : {MappingKind::Sigmoid, MappingKind::Absolute, MappingKind::Relu}) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t d = 4;
      auto s = testing::random_state(6, d, kind, 0.07, rng(), -1.5, 1.5);
      Entry e{0, 1, std::uniform_real_distribution<double>(0.0, 1.0)(rng)};
      std::vector<double> gi(d), gj(d);
      s.instance_gradient(e, gi, gj);
      std::vector<double> y(s.parameters().begin(), s.parameters().end());
      for (std::size_t k = 0; k < d; ++k) {
        for (Index row : {e.i, e.j}) {
          const std::size_t at = row * d + k;
          if (kind != MappingKind::Sigmoid && std::fabs(y[at]) <= 1e-3) continue;
          const double h = 1e-6;
          auto yp = y, ym = y;
          yp[at] += h;
          ym[at] -= h;
          const double fd = (FactorState(6, d, kind, 0.07, yp).instance_loss(e) -
                             FactorState(6, d, kind, 0.07, ym).instance_loss(e)) / (2 * h);
          const double g = row == e.i ? gi[k] : gj[k];
          const double scale = std::max(std::fabs(g), std::fabs(fd));
          if (scale == 0.0) continue;
          CHECK(std::fabs(g - fd) / scale <= 1e-5);
        }
      }
    }
  }
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  const auto s = testing::random_state(9, 5, MappingKind::Absolute, 0.125, 31, -3.0, 3.0);
  std::stringstream io;
  write_checkpoint(io, s, 999.0);
  std::string header;
  std::getline(io, header);
  CHECK(header == "9 5 abs 0.125 999");
  io.seekg(0);
  const auto back = read_checkpoint(io);
  CHECK(back.state == s);
  CHECK(back.scale == 999.0);

  std::stringstream bad("2 2 relu 0 1\n0.1 0.2\n0.3\n");
  CHECK_THROWS_AS(read_checkpoint(bad), DataError);
  std::stringstream bad_kind("1 1 tanh 0 1\n0.1\n");
  CHECK_THROWS_AS(read_checkpoint(bad_kind), DataError);
}

#include "netmoments/eigenmetrics.hpp"

#include <cmath>

#include <doctest.h>

#include "netmoments/errors.hpp"
#include "test_util.hpp"

using namespace netmoments;

namespace {

// Independent oracle for 3-node networks with edge weights a=w01, b=w02,
// c=w12: the dominant eigenvalue is the largest root of
//   x^3 - (a^2+b^2+c^2) x - 2abc = 0,
// found by bisection. The largest root lies in (0, a+b+c].
double cubic_radius_oracle(double a, double b, double c) {
  const double p = a * a + b * b + c * c;
  const double q = 2.0 * a * b * c;
  auto f = [&](double x) { return x * x * x - p * x - q; };
  double lo = 0.0, hi = a + b + c + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

WeightedNetwork three_node(double a, double b, double c) {
  const double upper[3] = {a, b, c};
  return WeightedNetwork::from_upper_triangle(3, upper, Bounds{0.5, 30.0});
}

}  // namespace

TEST_CASE("uniform networks have closed-form eigenmetrics") {
  // all nodes 16km apart: radius w(n-1) = 80km; 1km apart: 5km
  CHECK(spectral_radius(WeightedNetwork::uniform(6, 16)) ==
        doctest::Approx(80.0).epsilon(1e-12));
  CHECK(spectral_radius(WeightedNetwork::uniform(6, 1)) ==
        doctest::Approx(5.0).epsilon(1e-12));
  CHECK(spectral_radius(WeightedNetwork::uniform(6, 20)) ==
        doctest::Approx(100.0).epsilon(1e-12));

  const auto ec = eigenvector_centrality(WeightedNetwork::uniform(6, 7));
  for (double v : ec) CHECK(v == doctest::Approx(1.0 / std::sqrt(6.0)));

  const auto ec2 = eigenvector_centrality(WeightedNetwork::uniform(2, 13));
  CHECK(ec2[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(ec2[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("3-node radius matches the cubic oracle") {
  // {1,2,3}: largest root of x^3 - 14x - 12
  const double oracle = cubic_radius_oracle(1, 2, 3);
  CHECK(oracle == doctest::Approx(4.1130905843).epsilon(1e-9));
  const auto net = three_node(1, 2, 3);
  CHECK(spectral_radius(net) == doctest::Approx(oracle).epsilon(1e-10));

  const auto ec = eigenvector_centrality(net);
  CHECK(ec.size() == 3);
  double norm2 = 0.0;
  for (double v : ec) {
    CHECK(v > 0.0);
    norm2 += v * v;
  }
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
  // residual check: A v = lambda v
  const double lambda = spectral_radius(net);
  for (std::size_t i = 0; i < 3; ++i) {
    double av = 0.0;
    for (std::size_t j = 0; j < 3; ++j) av += net.weight(i, j) * ec[j];
    CHECK(av == doctest::Approx(lambda * ec[i]).epsilon(1e-10));
  }
}

TEST_CASE("ec moments: uniform vector") {
  const auto ec = eigenvector_centrality(WeightedNetwork::uniform(6, 9));
  const EcMoments m = ec_moments(ec);
  CHECK(m.mean == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(m.var == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK_FALSE(m.skew.has_value());
}

TEST_CASE("ec moments: direct evaluation of a skewed vector") {
  // (1,1,1,1,2,2) normalized to unit Euclidean norm
  std::vector<double> v = {1, 1, 1, 1, 2, 2};
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  const EcMoments m = ec_moments(v);
  CHECK(m.mean == doctest::Approx(0.3849001794597506).epsilon(1e-12));
  CHECK(m.var == doctest::Approx(0.018518518518518517).epsilon(1e-12));
  REQUIRE(m.skew.has_value());
  CHECK(*m.skew == doctest::Approx(0.7071067811865472).epsilon(1e-10));
  CHECK(*m.skew > 0.0);
}

TEST_CASE("mean-variance identity holds for every EC") {
  Rng rng = make_rng(31337);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 3 + uniform_index(rng, 10);
    const auto net = test::random_network(rng, n);
    const EigenSummary s = eigen_summary(net);
    CHECK(std::abs(s.ec_var -
                   (1.0 / static_cast<double>(n) - s.ec_mean * s.ec_mean)) <=
          1e-10);
  }
}

TEST_CASE("frobenius identity cross-checks the solver") {
  const auto uni = WeightedNetwork::uniform(6, 16);
  CHECK(frobenius_radius(uni, eigenvector_centrality(uni)) ==
        doctest::Approx(80.0).epsilon(1e-12));

  const auto net = three_node(1, 2, 3);
  const auto ec = eigenvector_centrality(net);
  CHECK(frobenius_radius(net, ec) ==
        doctest::Approx(spectral_radius(net)).epsilon(1e-10));

  const auto fig = WeightedNetwork::validate(
      {{0, 3, 4, 6}, {3, 0, 8, 9}, {4, 8, 0, 12}, {6, 9, 12, 0}});
  const double lambda = spectral_radius(fig);
  CHECK(std::abs(frobenius_radius(fig, eigenvector_centrality(fig)) -
                 lambda) <= 1e-8 * lambda);

  std::vector<double> bad = {-1.0, -1.0, -1.0};
  CHECK_THROWS_AS(frobenius_radius(three_node(1, 1, 1), bad),
                  ZeroDenominator);
}

TEST_CASE("radius bounds, monotonicity and scale covariance") {
  Rng rng = make_rng(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + uniform_index(rng, 8);
    const Bounds b{1.0, 20.0};
    const auto net = test::random_network(rng, n, b);
    const double lambda = spectral_radius(net);

    // Rayleigh/Perron bounds for the fully connected class
    CHECK(lambda >= static_cast<double>(n - 1) * b.w_min - 1e-9);
    CHECK(lambda <= static_cast<double>(n - 1) * b.w_max + 1e-9);

    // raising one weight strictly raises the radius
    auto upper = net.upper_triangle();
    const std::size_t idx = uniform_index(rng, upper.size());
    if (upper[idx] + 0.5 <= b.w_max) {
      upper[idx] += 0.5;
      const auto bumped = WeightedNetwork::from_upper_triangle(n, upper, b);
      CHECK(spectral_radius(bumped) > lambda);
    }

    // scale covariance: radius scales, EC (and its moments) do not
    auto scaled_upper = net.upper_triangle();
    for (double& w : scaled_upper) w *= 0.5;
    const auto scaled = WeightedNetwork::from_upper_triangle(
        n, scaled_upper, Bounds{0.5 * b.w_min, b.w_max});
    CHECK(spectral_radius(scaled) ==
          doctest::Approx(0.5 * lambda).epsilon(1e-9));
    const EigenSummary s1 = eigen_summary(net);
    const EigenSummary s2 = eigen_summary(scaled);
    CHECK(s2.ec_var == doctest::Approx(s1.ec_var).epsilon(1e-8));
    if (s1.ec_skew && s2.ec_skew)
      CHECK(*s2.ec_skew == doctest::Approx(*s1.ec_skew).epsilon(1e-6));
  }
}

TEST_CASE("uniform equality case of the radius bounds") {
  // lambda = (n-1) w_min exactly iff uniform at w_min
  const auto net = WeightedNetwork::uniform(5, 1.0);
  CHECK(spectral_radius(net) == doctest::Approx(4.0).epsilon(1e-13));
}

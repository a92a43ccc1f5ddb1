#include "netmoments/classic_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <doctest.h>

#include "netmoments/eigenmetrics.hpp"
#include "test_util.hpp"

using namespace netmoments;

namespace {

Bounds wide{0.5, 30.0};

WeightedNetwork three_node(double a, double b, double c) {
  const double upper[3] = {a, b, c};
  return WeightedNetwork::from_upper_triangle(3, upper, wide);
}

// Exhaustive oracle: shortest path over every simple path, by permutation of
// intermediate nodes. Only viable for tiny n, which is exactly its job.
double brute_shortest(const WeightedNetwork& net, std::size_t s,
                      std::size_t t) {
  const std::size_t n = net.size();
  std::vector<std::size_t> mids;
  for (std::size_t i = 0; i < n; ++i)
    if (i != s && i != t) mids.push_back(i);

  double best = net.weight(s, t);
  // every nonempty ordered subset of intermediates
  const std::size_t m = mids.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (1u << i)) subset.push_back(mids[i]);
    std::sort(subset.begin(), subset.end());
    do {
      double len = 0.0;
      std::size_t prev = s;
      for (std::size_t v : subset) {
        len += net.weight(prev, v);
        prev = v;
      }
      len += net.weight(prev, t);
      best = std::min(best, len);
    } while (std::next_permutation(subset.begin(), subset.end()));
  }
  return best;
}

}  // namespace

TEST_CASE("mean strength") {
  CHECK(mean_strength(three_node(1, 2, 3)) == doctest::Approx(4.0));
  CHECK(mean_strength(WeightedNetwork::uniform(6, 16)) ==
        doctest::Approx(80.0));
  const auto fig = WeightedNetwork::validate(
      {{0, 3, 4, 6}, {3, 0, 8, 9}, {4, 8, 0, 12}, {6, 9, 12, 0}});
  CHECK(mean_strength(fig) == doctest::Approx(21.0));
}

TEST_CASE("shortest paths reroute around long edges") {
  const auto net = three_node(1, 10, 1);  // w01=1, w02=10, w12=1
  const auto p = shortest_paths(net);
  CHECK(p.at(0, 2) == doctest::Approx(2.0));  // via node 1
  CHECK(p.at(0, 1) == doctest::Approx(1.0));
  CHECK(p.at(1, 2) == doctest::Approx(1.0));

  const auto uni = WeightedNetwork::uniform(6, 7);
  const auto pu = shortest_paths(uni);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(pu.at(i, j) == doctest::Approx(i == j ? 0.0 : 7.0));

  const auto p123 = shortest_paths(three_node(1, 2, 3));
  CHECK(p123.at(0, 1) == doctest::Approx(1.0));
  CHECK(p123.at(0, 2) == doctest::Approx(2.0));
  CHECK(p123.at(1, 2) == doctest::Approx(3.0));
}

TEST_CASE("shortest paths agree with exhaustive enumeration (n <= 4)") {
  Rng rng = make_rng(555);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + uniform_index(rng, 2);
    const auto net = test::random_network(rng, n);
    const auto p = shortest_paths(net);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j)
          CHECK(p.at(i, j) == 0.0);
        else
          CHECK(p.at(i, j) ==
                doctest::Approx(brute_shortest(net, i, j)).epsilon(1e-12));
      }
  }
}

TEST_CASE("path matrix invariants") {
  Rng rng = make_rng(808);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 3 + uniform_index(rng, 9);
    const auto net = test::random_network(rng, n);
    const auto p = shortest_paths(net);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(p.at(i, i) == 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(p.at(i, j) == p.at(j, i));
        if (i != j) CHECK(p.at(i, j) <= net.weight(i, j) + 1e-12);
        for (std::size_t k = 0; k < n; ++k)
          CHECK(p.at(i, j) <= p.at(i, k) + p.at(k, j) + 1e-12);
      }
    }
  }
}

TEST_CASE("mean shortest path") {
  const auto pu = shortest_paths(WeightedNetwork::uniform(6, 7));
  CHECK(mean_shortest_path(pu) == doctest::Approx(7.0));
  CHECK(mean_shortest_path(shortest_paths(three_node(1, 2, 3))) ==
        doctest::Approx(2.0));
  CHECK(mean_shortest_path(shortest_paths(three_node(1, 10, 1)))
        == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("global efficiency") {
  CHECK(global_efficiency(shortest_paths(WeightedNetwork::uniform(6, 7))) ==
        doctest::Approx(1.0 / 7.0));
  CHECK(global_efficiency(shortest_paths(three_node(1, 2, 3))) ==
        doctest::Approx(11.0 / 18.0));
  CHECK(global_efficiency(shortest_paths(three_node(1, 10, 1))) ==
        doctest::Approx(5.0 / 6.0));
}

TEST_CASE("local efficiency") {
  CHECK(local_efficiency(WeightedNetwork::uniform(6, 7)) ==
        doctest::Approx(1.0 / 7.0));
  // each neighbor subnetwork of a triangle is a single edge
  CHECK(local_efficiency(three_node(1, 2, 3)) ==
        doctest::Approx(11.0 / 18.0));
  CHECK_THROWS_AS(local_efficiency(WeightedNetwork::uniform(2, 5)),
                  ValidationError);
}

TEST_CASE("mean clustering") {
  CHECK(mean_clustering(WeightedNetwork::uniform(6, 7)) ==
        doctest::Approx(1.0));
  CHECK(mean_clustering(three_node(1, 2, 3)) ==
        doctest::Approx(std::cbrt(2.0 / 9.0)));
  CHECK_THROWS_AS(mean_clustering(WeightedNetwork::uniform(2, 5)),
                  ValidationError);
}

TEST_CASE("bound propositions hold on random networks") {
  Rng rng = make_rng(161);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 3 + uniform_index(rng, 10);
    const auto net = test::random_network(rng, n);
    const double nd = static_cast<double>(n);

    const double lambda = spectral_radius(net);
    const EigenSummary es = eigen_summary(net);
    const auto paths = shortest_paths(net);
    const double w_bar = mean_strength(net);
    const double l_g = mean_shortest_path(paths);
    const double e_glob = global_efficiency(paths);
    const double e_loc = local_efficiency(net);
    const double c_bar = mean_clustering(net);

    // clustering is capped by a linear function of mean strength
    CHECK(c_bar <= nd * w_bar /
                       ((nd - 1.0) * (nd - 2.0) * net.max_weight()) +
                   1e-9);
    // path length gives a lower bound for EC variance. In the fully
    // connected class the path between adjacent nodes is their edge, so
    // (n-1) * l(G) is exactly the mean strength; rerouted paths would
    // overstate the bound and make it false.
    const double bound = 1.0 / nd - (w_bar / lambda) * (w_bar / lambda);
    CHECK(es.ec_var >= bound - 1e-9);
    CHECK(l_g <= w_bar / (nd - 1.0) + 1e-12);  // rerouting only shortens
    // local efficiency is capped by global efficiency
    CHECK(e_loc <= nd / (nd - 2.0) * e_glob + 1e-9);
  }
}

TEST_CASE("rank relation between path length and efficiency is negative") {
  Rng rng = make_rng(90210);
  std::vector<double> ls, es;
  for (int rep = 0; rep < 40; ++rep) {
    const auto net = test::random_network(rng, 6);
    const auto p = shortest_paths(net);
    ls.push_back(mean_shortest_path(p));
    es.push_back(global_efficiency(p));
  }
  // no functional form asserted; just the direction
  double cov = 0.0;
  const double ml = std::accumulate(ls.begin(), ls.end(), 0.0) / ls.size();
  const double me = std::accumulate(es.begin(), es.end(), 0.0) / es.size();
  for (std::size_t i = 0; i < ls.size(); ++i)
    cov += (ls[i] - ml) * (es[i] - me);
  CHECK(cov < 0.0);
}

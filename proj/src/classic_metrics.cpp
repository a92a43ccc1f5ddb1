#include "netmoments/classic_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netmoments/errors.hpp"
#include "netmoments/kernels.hpp"

namespace netmoments {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_at_least(const WeightedNetwork& net, std::size_t min_n,
                      const char* what) {
  if (net.size() < min_n) {
    throw ValidationError(ValidationError::Kind::TooSmall,
                          std::string(what) + " needs at least " +
                              std::to_string(min_n) + " nodes, got " +
                              std::to_string(net.size()));
  }
}

// Single-source Dijkstra on a dense matrix; linear-scan extraction is optimal
// for the complete graphs this library handles (n is small).
void dijkstra_dense(const double* w, std::size_t n, std::size_t src,
                    double* dist) {
  std::vector<char> done(n, 0);
  for (std::size_t i = 0; i < n; ++i) dist[i] = kInf;
  dist[src] = 0.0;
  for (std::size_t round = 0; round < n; ++round) {
    std::size_t u = n;
    double best = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && dist[i] < best) {
        best = dist[i];
        u = i;
      }
    }
    if (u == n) break;
    done[u] = 1;
    const double* row = w + u * n;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v] || v == u) continue;
      const double cand = dist[u] + row[v];
      if (cand < dist[v]) dist[v] = cand;
    }
  }
}

}  // namespace

double mean_strength(const WeightedNetwork& net) {
  const auto n = net.size();
  const double total = simd::kernels().sum(net.data(), n * n);
  return total / static_cast<double>(n);
}

PathMatrix shortest_paths(const WeightedNetwork& net) {
  const auto n = net.size();
  PathMatrix p;
  p.n = n;
  p.d.resize(n * n);
  for (std::size_t s = 0; s < n; ++s)
    dijkstra_dense(net.data(), n, s, p.d.data() + s * n);
  // the two directions can differ in the last ulp (different addition
  // order along the path); canonicalize so the matrix is exactly symmetric
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::min(p.d[i * n + j], p.d[j * n + i]);
      p.d[i * n + j] = d;
      p.d[j * n + i] = d;
    }
  return p;
}

double mean_shortest_path(const PathMatrix& paths) {
  const auto n = paths.n;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += paths.at(i, j);
  return s / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double global_efficiency(const PathMatrix& paths) {
  const auto n = paths.n;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += 1.0 / paths.at(i, j);
  return s / (static_cast<double>(n) * static_cast<double>(n - 1));
}

double local_efficiency(const WeightedNetwork& net) {
  require_at_least(net, 3, "local efficiency");
  const auto n = net.size();
  const double* w = net.data();

  std::vector<double> sub((n - 1) * (n - 1));
  std::vector<double> dist(n - 1);
  std::vector<std::size_t> keep(n - 1);

  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != k) keep[m++] = i;
    // paths inside G_k only; node k is not usable as an intermediate
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        sub[a * m + b] = w[keep[a] * n + keep[b]];
    double inv_sum = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      dijkstra_dense(sub.data(), m, a, dist.data());
      for (std::size_t b = 0; b < m; ++b)
        if (b != a) inv_sum += 1.0 / dist[b];
    }
    acc += inv_sum /
           (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  }
  return acc / static_cast<double>(n);
}

double mean_clustering(const WeightedNetwork& net) {
  require_at_least(net, 3, "mean clustering");
  const auto n = net.size();
  const double wmax = net.max_weight();
  const double* w = net.data();

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double ci = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        ci += std::cbrt(w[i * n + j] * w[j * n + k] * w[k * n + i]);
      }
    }
    // triple products normalized by wmax^3 inside the cube root
    acc += ci / (wmax * static_cast<double>(n - 1) *
                 static_cast<double>(n - 2));
  }
  return acc / static_cast<double>(n);
}

ClassicMetrics classic_metrics(const WeightedNetwork& net) {
  ClassicMetrics m;
  m.mean_strength = mean_strength(net);
  m.mean_clustering = mean_clustering(net);
  const PathMatrix p = shortest_paths(net);
  m.mean_shortest_path = mean_shortest_path(p);
  m.global_efficiency = global_efficiency(p);
  m.local_efficiency = local_efficiency(net);
  return m;
}

}  // namespace netmoments

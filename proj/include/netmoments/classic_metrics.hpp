#pragma once

#include <cstddef>
#include <vector>

#include "netmoments/graph.hpp"

namespace netmoments {

/// All-pairs shortest weighted path lengths, in km.
/// Symmetric, zero diagonal, never longer than the direct edge, and obeys
/// the triangle inequality.
struct PathMatrix {
  std::size_t n = 0;
  std::vector<double> d;  // row-major n*n

  double at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

/// Mean node strength: (sum over all ordered pairs of w_ij) / n.
double mean_strength(const WeightedNetwork& net);

/// Dijkstra from every source; weights are positive distances, and the
/// direct edge is always a candidate path.
PathMatrix shortest_paths(const WeightedNetwork& net);

/// Mean of d_ij over ordered pairs i != j.
double mean_shortest_path(const PathMatrix& paths);

/// Mean of 1/d_ij over ordered pairs i != j (units 1/km).
double global_efficiency(const PathMatrix& paths);

/// Mean over nodes k of the efficiency of the neighbor subnetwork G_k
/// (node k and its edges removed; shortest paths recomputed inside G_k,
/// normalized by (n-1)(n-2)). Throws ValidationError(TooSmall) if n < 3.
double local_efficiency(const WeightedNetwork& net);

/// Mean weighted clustering coefficient in the geometric-mean (Onnela) form,
/// with weights rescaled by the largest weight in the whole network.
/// Throws ValidationError(TooSmall) if n < 3.
double mean_clustering(const WeightedNetwork& net);

struct ClassicMetrics {
  double mean_strength = 0.0;
  double mean_clustering = 0.0;
  double mean_shortest_path = 0.0;
  double global_efficiency = 0.0;
  double local_efficiency = 0.0;
};

ClassicMetrics classic_metrics(const WeightedNetwork& net);

}  // namespace netmoments

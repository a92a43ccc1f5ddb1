#include "netmoments/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "netmoments/rng.hpp"

namespace netmoments {

namespace {

constexpr double kUndefinedSkewPenalty = 1e12;

double sq(double x) { return x * x; }

double objective_from(const EigenMetrics& m, const MetricTarget& t) {
  double f = sq((m.lambda - t.lambda_t) / t.tol.lambda_km) +
             sq((m.var - t.var_t) / t.tol.var);
  if (t.skew_t) {
    if (!m.skew)
      f += kUndefinedSkewPenalty;
    else
      f += sq((*m.skew - *t.skew_t) / t.tol.skew);
  }
  return f;
}

bool meets(const EigenMetrics& m, const MetricTarget& t) {
  if (std::abs(m.lambda - t.lambda_t) > t.tol.lambda_km) return false;
  if (std::abs(m.var - t.var_t) > t.tol.var) return false;
  if (t.skew_t) {
    if (!m.skew) return false;
    if (std::abs(*m.skew - *t.skew_t) > t.tol.skew) return false;
  }
  return true;
}

/// Builds the symmetric zero-diagonal matrix from its upper triangle and
/// measures it, reusing scratch buffers across thousands of calls.
struct Evaluator {
  std::size_t n;
  std::vector<double> mat;
  EigenWorkspace ws;

  explicit Evaluator(std::size_t n) : n(n), mat(n * n, 0.0) {}

  EigenMetrics measure(const std::vector<double>& upper) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++k) {
        mat[i * n + j] = upper[k];
        mat[j * n + i] = upper[k];
      }
    return measure_eigen(mat.data(), n, ws);
  }
};

/// Derivative-free descent over the box [w_min,w_max]^m with three move
/// kinds: single-coordinate steps with per-coordinate adaptive sizes,
/// coordinate-pair steps (one up, one down) that follow narrow valleys where
/// single-axis moves stall, and an optional whole-matrix rescale toward a
/// target radius (the radius scales exactly proportionally while the EC
/// moments are scale-invariant).
///
/// `score(metrics, x)` is minimized; `stop(metrics)` is checked after every
/// evaluation and aborts the descent when it returns true (used to exit the
/// moment a candidate meets all tolerances, whatever the score says).
struct Descent {
  Evaluator& ev;
  Bounds bounds;
  std::optional<double> rescale_lambda;

  template <typename Score, typename Stop>
  bool run(std::vector<double>& x, EigenMetrics& cur_m, double& cur_f,
           Score&& score, Stop&& stop, int max_evals) const {
    const double wmin = bounds.w_min, wmax = bounds.w_max;
    const double range = wmax - wmin;
    const std::size_t m = x.size();
    std::vector<double> h(m, range / 8.0);
    const double h_floor = range * 1e-9;
    std::vector<double> scratch(m);

    cur_m = ev.measure(x);
    cur_f = score(cur_m, x);
    int evals = 1;
    if (stop(cur_m)) return true;

    int pass = 0;
    while (evals < max_evals) {
      bool improved = false;

      for (std::size_t i = 0; i < m && evals < max_evals; ++i) {
        bool accepted = false;
        for (double dir : {1.0, -1.0}) {
          const double old = x[i];
          const double cand = std::clamp(old + dir * h[i], wmin, wmax);
          if (cand == old) continue;
          x[i] = cand;
          const EigenMetrics mm = ev.measure(x);
          ++evals;
          if (stop(mm)) {
            cur_m = mm;
            return true;
          }
          const double f = score(mm, x);
          if (f < cur_f) {
            cur_f = f;
            cur_m = mm;
            accepted = true;
            break;
          }
          x[i] = old;
        }
        if (accepted) {
          h[i] = std::min(h[i] * 2.0, range / 4.0);
          improved = true;
        } else {
          h[i] *= 0.5;
        }
      }

      // pair moves: push one coordinate up and another down by the same
      // step; the pairing rotates across passes so every pair is visited
      const std::size_t stride = 1 + (static_cast<std::size_t>(pass) % (m - 1));
      for (std::size_t i = 0; i < m && evals < max_evals; ++i) {
        const std::size_t j = (i + stride) % m;
        const double step = std::max(h[i], h_floor * 16.0);
        for (double dir : {1.0, -1.0}) {
          const double xi = std::clamp(x[i] + dir * step, wmin, wmax);
          const double xj = std::clamp(x[j] - dir * step, wmin, wmax);
          if (xi == x[i] && xj == x[j]) continue;
          const double oi = x[i], oj = x[j];
          x[i] = xi;
          x[j] = xj;
          const EigenMetrics mm = ev.measure(x);
          ++evals;
          if (stop(mm)) {
            cur_m = mm;
            return true;
          }
          const double f = score(mm, x);
          if (f < cur_f) {
            cur_f = f;
            cur_m = mm;
            improved = true;
            break;
          }
          x[i] = oi;
          x[j] = oj;
        }
      }

      if (rescale_lambda && cur_m.lambda > 0.0 && evals < max_evals) {
        const double c = *rescale_lambda / cur_m.lambda;
        if (std::abs(c - 1.0) > 1e-15) {
          for (std::size_t i = 0; i < m; ++i)
            scratch[i] = std::clamp(x[i] * c, wmin, wmax);
          const EigenMetrics mm = ev.measure(scratch);
          ++evals;
          if (stop(mm)) {
            x.swap(scratch);
            cur_m = mm;
            return true;
          }
          const double f = score(mm, scratch);
          if (f < cur_f) {
            x.swap(scratch);
            cur_f = f;
            cur_m = mm;
            improved = true;
          }
        }
      }

      if (!improved && *std::max_element(h.begin(), h.end()) < h_floor)
        break;
      ++pass;
    }
    return false;
  }
};

}  // namespace

void MetricTarget::validate() const {
  if (n < 2)
    throw InvalidLevel("target needs n >= 2, got " + std::to_string(n));
  const double lo = static_cast<double>(n - 1) * bounds.w_min;
  const double hi = static_cast<double>(n - 1) * bounds.w_max;
  if (!(lambda_t >= lo && lambda_t <= hi)) {
    throw InvalidLevel("target spectral radius " + format_double(lambda_t) +
                       " outside feasible range [" + format_double(lo) + ", " +
                       format_double(hi) + "]");
  }
  const double var_cap = 1.0 / static_cast<double>(n);
  if (!(var_t >= 0.0 && var_t < var_cap)) {
    throw InvalidLevel("target EC variance " + format_double(var_t) +
                       " outside [0, 1/n); 1/n = " + format_double(var_cap));
  }
  if (var_t < kZeroVarianceTol && skew_t) {
    throw InvalidLevel(
        "zero EC variance forces undefined skewness; the skew target must be "
        "free");
  }
  if (!(tol.lambda_km > 0.0 && tol.var > 0.0 && tol.skew > 0.0))
    throw InvalidLevel("tolerances must be positive");
}

std::string target_label(const MetricTarget& t) {
  std::string s = "L" + format_double(t.lambda_t) + "_V" + format_double(t.var_t);
  s += "_S";
  s += t.skew_t ? format_double(*t.skew_t) : std::string("free");
  return s;
}

double objective(const WeightedNetwork& candidate, const MetricTarget& t) {
  if (candidate.size() != t.n)
    throw InvalidLevel("candidate has " + std::to_string(candidate.size()) +
                       " nodes but the target expects " + std::to_string(t.n));
  EigenWorkspace ws;
  const EigenMetrics m = measure_eigen(candidate.data(), candidate.size(), ws);
  return objective_from(m, t);
}

WeightedNetwork synthesize(const MetricTarget& t, std::uint64_t seed,
                           const SynthesisOptions& options) {
  t.validate();
  const double wmin = t.bounds.w_min;
  const double wmax = t.bounds.w_max;

  // Zero-variance targets have the exact analytic solution: the uniform
  // matrix at w = lambda_t/(n-1), which target validation keeps in bounds.
  if (t.var_t <= t.tol.var && !t.skew_t) {
    const double w = t.lambda_t / static_cast<double>(t.n - 1);
    return WeightedNetwork::uniform(t.n, w, t.bounds);
  }

  const std::size_t m = WeightedNetwork::upper_size(t.n);
  Rng rng = make_rng(seed);
  Evaluator ev(t.n);

  // Shape score: the EC moments are invariant under rescaling while the
  // radius scales exactly, so the search first matches variance/skewness
  // alone, with a penalty on shapes whose radius-corrected version would
  // leave the box (then the final rescale could not hit the radius).
  auto shape_score = [&](const EigenMetrics& mm, const std::vector<double>& x) {
    double f = sq((mm.var - t.var_t) / t.tol.var);
    if (t.skew_t) {
      if (!mm.skew)
        f += kUndefinedSkewPenalty;
      else
        f += sq((*mm.skew - *t.skew_t) / t.tol.skew);
    }
    if (mm.lambda > 0.0) {
      const double c = t.lambda_t / mm.lambda;
      double viol = 0.0;
      for (double xi : x) {
        const double cx = xi * c;
        if (cx < wmin) viol += wmin - cx;
        if (cx > wmax) viol += cx - wmax;
      }
      f += sq(4.0 * viol / t.tol.lambda_km);
    }
    return f;
  };
  auto full_score = [&](const EigenMetrics& mm, const std::vector<double>&) {
    return objective_from(mm, t);
  };
  auto stop_when_met = [&](const EigenMetrics& mm) { return meets(mm, t); };

  std::vector<double> x(m);
  for (auto& xi : x) xi = uniform_real(rng, wmin, wmax);

  std::vector<double> best_x = x;
  EigenMetrics best_m = ev.measure(x);
  double best_f = objective_from(best_m, t);
  if (meets(best_m, t))
    return WeightedNetwork::from_upper_triangle(t.n, x, t.bounds);

  const int shape_budget = options.inner_evals * 7 / 10;
  const int polish_budget = options.inner_evals - shape_budget;

  Descent shape{ev, t.bounds, std::nullopt};
  Descent polish{ev, t.bounds, t.lambda_t};

  for (int outer = 0; outer < options.max_outer; ++outer) {
    EigenMetrics cur_m;
    double cur_f = 0.0;
    if (shape.run(x, cur_m, cur_f, shape_score, stop_when_met, shape_budget))
      return WeightedNetwork::from_upper_triangle(t.n, x, t.bounds);

    // rescale the matched shape onto the target radius, then polish the
    // full objective from there
    if (cur_m.lambda > 0.0) {
      const double c = t.lambda_t / cur_m.lambda;
      for (auto& xi : x) xi = std::clamp(xi * c, wmin, wmax);
    }
    if (polish.run(x, cur_m, cur_f, full_score, stop_when_met, polish_budget))
      return WeightedNetwork::from_upper_triangle(t.n, x, t.bounds);

    if (cur_f < best_f) {
      best_f = cur_f;
      best_x = x;
      best_m = cur_m;
    }
    // stalled: re-randomize one free entry and descend again
    x[uniform_index(rng, m)] = uniform_real(rng, wmin, wmax);
  }

  const double rl = std::abs(best_m.lambda - t.lambda_t);
  const double rv = std::abs(best_m.var - t.var_t);
  double rs = 0.0;
  if (t.skew_t)
    rs = best_m.skew ? std::abs(*best_m.skew - *t.skew_t)
                     : std::numeric_limits<double>::infinity();
  throw Infeasible(
      "synthesis budget exhausted after " + std::to_string(options.max_outer) +
          " restarts for target " + target_label(t) +
          "; best residuals: lambda " + format_double(rl) + ", var " +
          format_double(rv) + ", skew " + format_double(rs),
      WeightedNetwork::from_upper_triangle(t.n, best_x, t.bounds), rl, rv, rs,
      options.max_outer);
}

std::vector<MetricTarget> grid_targets(const GridSpec& spec) {
  if (spec.var_levels.size() != spec.lambda_levels.size())
    throw InvalidLevel("grid: need one variance-level list per radius level");
  if (!spec.skew_levels.empty() &&
      spec.skew_levels.size() != spec.lambda_levels.size())
    throw InvalidLevel("grid: need one skew-level table per radius level");

  std::vector<MetricTarget> out;
  for (std::size_t li = 0; li < spec.lambda_levels.size(); ++li) {
    const auto& vars = spec.var_levels[li];
    for (std::size_t vi = 0; vi < vars.size(); ++vi) {
      MetricTarget base;
      base.n = spec.n;
      base.bounds = spec.bounds;
      base.tol = spec.tol;
      base.lambda_t = spec.lambda_levels[li];
      base.var_t = vars[vi];

      const std::vector<double>* skews = nullptr;
      if (!spec.skew_levels.empty()) {
        if (spec.skew_levels[li].size() != vars.size())
          throw InvalidLevel(
              "grid: need one skew-level list per variance level");
        skews = &spec.skew_levels[li][vi];
      }
      // a zero-variance level collapses to a single skew-free target
      if (base.var_t < kZeroVarianceTol || skews == nullptr ||
          skews->empty()) {
        base.skew_t.reset();
        base.validate();
        out.push_back(base);
      } else {
        for (double s : *skews) {
          base.skew_t = s;
          base.validate();
          out.push_back(base);
        }
      }
    }
  }
  return out;
}

std::string GridSpec::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["bounds"] = {bounds.w_min, bounds.w_max};
  j["lambda_levels"] = lambda_levels;
  j["var_levels_per_lambda"] = var_levels;
  j["skew_levels"] = skew_levels;
  j["tolerances"] = {{"lambda", tol.lambda_km}, {"var", tol.var},
                     {"skew", tol.skew}};
  return j.dump(2);
}

GridSpec GridSpec::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DecodeError(std::string("grid JSON parse failed: ") + e.what());
  }
  GridSpec g;
  try {
    g.n = j.at("n").get<std::size_t>();
    const auto& b = j.at("bounds");
    if (!b.is_array() || b.size() != 2)
      throw DecodeError("grid JSON: 'bounds' must be [w_min, w_max]");
    g.bounds.w_min = b[0].get<double>();
    g.bounds.w_max = b[1].get<double>();
    g.lambda_levels = j.at("lambda_levels").get<std::vector<double>>();
    g.var_levels =
        j.at("var_levels_per_lambda").get<std::vector<std::vector<double>>>();
    if (j.contains("skew_levels"))
      g.skew_levels =
          j.at("skew_levels")
              .get<std::vector<std::vector<std::vector<double>>>>();
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      g.tol.lambda_km = t.value("lambda", g.tol.lambda_km);
      g.tol.var = t.value("var", g.tol.var);
      g.tol.skew = t.value("skew", g.tol.skew);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("grid JSON missing or mistyped field: ") +
                      e.what());
  }
  return g;
}

namespace {

/// Bounded multi-restart search used by the empirical range finders:
/// the same move set as synthesize(), a custom score, no early stop.
struct RangeSearch {
  std::size_t n;
  Bounds bounds;
  double lambda_t;
  Evaluator ev;

  RangeSearch(std::size_t n, Bounds b, double lambda_t)
      : n(n), bounds(b), lambda_t(lambda_t), ev(n) {}

  template <typename F>
  void run(F&& score, Rng& rng, int restarts, int evals_per_restart,
           EigenMetrics* best_m_out, double* best_score_out) {
    const std::size_t m = WeightedNetwork::upper_size(n);
    double best_score = std::numeric_limits<double>::infinity();
    EigenMetrics best_m;
    std::vector<double> x(m);
    const Descent descent{ev, bounds, lambda_t};
    auto wrapped = [&](const EigenMetrics& mm, const std::vector<double>&) {
      return score(mm);
    };
    auto never = [](const EigenMetrics&) { return false; };

    for (int r = 0; r < restarts; ++r) {
      for (auto& xi : x) xi = uniform_real(rng, bounds.w_min, bounds.w_max);
      EigenMetrics cur_m;
      double cur_f = 0.0;
      descent.run(x, cur_m, cur_f, wrapped, never, evals_per_restart);
      if (cur_f < best_score) {
        best_score = cur_f;
        best_m = cur_m;
      }
    }
    *best_m_out = best_m;
    *best_score_out = best_score;
  }
};

double band_penalty(double value, double center, double tol) {
  const double excess = std::abs(value - center) - tol;
  if (excess <= 0.0) return 0.0;
  return 100.0 * sq(excess / tol);
}

double empirical_var_max(std::size_t n, Bounds b, double lambda_t,
                         const Tolerances& tol, std::uint64_t seed) {
  RangeSearch rs(n, b, lambda_t);
  Rng rng = make_rng(seed);
  auto score = [&](const EigenMetrics& m) {
    return -m.var + band_penalty(m.lambda, lambda_t, tol.lambda_km);
  };
  EigenMetrics best;
  double best_score = 0.0;
  rs.run(score, rng, 4, 2500, &best, &best_score);
  return std::max(0.0, best.var);
}

std::pair<double, double> empirical_skew_range(std::size_t n, Bounds b,
                                               double lambda_t, double var_t,
                                               const Tolerances& tol,
                                               std::uint64_t seed) {
  RangeSearch rs(n, b, lambda_t);
  Rng rng = make_rng(seed);
  std::pair<double, double> range{0.0, 0.0};
  for (double sign : {1.0, -1.0}) {
    auto score = [&](const EigenMetrics& m) {
      double f = band_penalty(m.lambda, lambda_t, tol.lambda_km) +
                 band_penalty(m.var, var_t, tol.var);
      f += m.skew ? sign * (*m.skew) : 1.0;
      return f;
    };
    EigenMetrics best;
    double best_score = 0.0;
    rs.run(score, rng, 4, 2500, &best, &best_score);
    const double s = best.skew.value_or(0.0);
    if (sign > 0)
      range.first = s;  // minimized +skew
    else
      range.second = s;  // minimized -skew => max skew
  }
  if (range.first > range.second) std::swap(range.first, range.second);
  return range;
}

}  // namespace

GridSpec default_grid(std::size_t n, Bounds bounds, std::uint64_t seed,
                      const Tolerances& tol) {
  GridSpec g;
  g.n = n;
  g.bounds = bounds;
  g.tol = tol;

  const double lo = static_cast<double>(n - 1) * bounds.w_min;
  const double hi = static_cast<double>(n - 1) * bounds.w_max;
  for (int k = 1; k <= 5; ++k) {
    double lam = hi * 0.2 * static_cast<double>(k);
    lam = std::max(lam, lo);
    if (g.lambda_levels.empty() || lam > g.lambda_levels.back())
      g.lambda_levels.push_back(lam);
  }

  for (std::size_t li = 0; li < g.lambda_levels.size(); ++li) {
    const double lam = g.lambda_levels[li];
    const double vmax =
        empirical_var_max(n, bounds, lam, tol, derive_seed(seed, {li, 1}));
    std::vector<double> vars;
    std::vector<std::vector<double>> skew_rows;
    for (int k = 0; k <= 4; ++k) {
      const double v = 0.8 * vmax * (static_cast<double>(k) / 4.0);
      vars.push_back(v);
      if (v < kZeroVarianceTol) {
        skew_rows.emplace_back();
        continue;
      }
      auto [smin, smax] = empirical_skew_range(
          n, bounds, lam, v, tol,
          derive_seed(seed, {li, 2, static_cast<std::uint64_t>(k)}));
      // stay 2% inside the observed extremes so every level is reachable
      const double inset = 0.02 * (smax - smin);
      std::vector<double> skews;
      for (int s = 0; s <= 4; ++s)
        skews.push_back(smin + inset +
                        (smax - smin - 2 * inset) * static_cast<double>(s) /
                            4.0);
      skew_rows.push_back(std::move(skews));
    }
    g.var_levels.push_back(std::move(vars));
    g.skew_levels.push_back(std::move(skew_rows));
  }
  return g;
}

}  // namespace netmoments

#include "netmoments/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace netmoments {

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

namespace {

double beta_cont_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_cont_fraction(a, b, x) / a;
  return 1.0 - front * beta_cont_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!std::isfinite(t)) return 0.0;
  const double x = dof / (dof + t * t);
  return incomplete_beta(0.5 * dof, 0.5, x);
}

SpearmanResult spearman(std::span<const double> xs,
                        std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw DegenerateInput("spearman: input lengths differ");
  const std::size_t n = xs.size();
  if (n < 3) throw DegenerateInput("spearman: need at least 3 points");

  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mx, dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0)
    throw DegenerateInput("spearman: constant input series");

  SpearmanResult r;
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(n - 2);
  if (1.0 - r.rho * r.rho < 1e-15) {
    r.p_value = 0.0;
  } else {
    const double t = r.rho * std::sqrt(dof / (1.0 - r.rho * r.rho));
    r.p_value = student_t_two_sided_p(t, dof);
  }
  return r;
}

OlsFit ols_fit(const std::vector<std::vector<double>>& predictors,
               std::span<const double> response) {
  const std::size_t m = response.size();
  const std::size_t k = predictors.size();
  const std::size_t cols = k + 1;
  if (m < k + 2)
    throw DegenerateInput("ols: need at least " + std::to_string(k + 2) +
                          " rows for " + std::to_string(k) +
                          " predictors, got " + std::to_string(m));
  for (const auto& col : predictors)
    if (col.size() != m)
      throw DegenerateInput("ols: predictor column length mismatch");

  // column-major design with intercept column first
  std::vector<double> a(m * cols);
  for (std::size_t i = 0; i < m; ++i) a[i] = 1.0;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < m; ++i) a[(j + 1) * m + i] = predictors[j][i];
  std::vector<double> y(response.begin(), response.end());

  // Householder QR, transforms applied to y as we go
  double max_diag = 0.0;
  std::vector<double> diag(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double norm = 0.0;
    for (std::size_t i = j; i < m; ++i) norm += a[j * m + i] * a[j * m + i];
    norm = std::sqrt(norm);
    if (norm == 0.0) throw RankDeficient("ols: design matrix is singular");
    // reflector sign follows the pivot to avoid cancellation
    if (a[j * m + j] < 0) norm = -norm;
    for (std::size_t i = j; i < m; ++i) a[j * m + i] /= norm;
    a[j * m + j] += 1.0;
    for (std::size_t jj = j + 1; jj < cols; ++jj) {
      double s = 0.0;
      for (std::size_t i = j; i < m; ++i) s += a[j * m + i] * a[jj * m + i];
      s = -s / a[j * m + j];
      for (std::size_t i = j; i < m; ++i) a[jj * m + i] += s * a[j * m + i];
    }
    double s = 0.0;
    for (std::size_t i = j; i < m; ++i) s += a[j * m + i] * y[i];
    s = -s / a[j * m + j];
    for (std::size_t i = j; i < m; ++i) y[i] += s * a[j * m + i];
    diag[j] = -norm;  // R_jj
    max_diag = std::max(max_diag, std::abs(norm));
  }
  for (std::size_t j = 0; j < cols; ++j)
    if (std::abs(diag[j]) < 1e-12 * std::max(1.0, max_diag))
      throw RankDeficient("ols: design matrix is numerically singular");

  OlsFit fit;
  fit.rows = m;
  fit.predictors = k;
  fit.coefficients.assign(cols, 0.0);
  for (std::size_t j = cols; j-- > 0;) {
    double s = y[j];
    for (std::size_t jj = j + 1; jj < cols; ++jj)
      s -= fit.coefficients[jj] * a[jj * m + j];
    fit.coefficients[j] = s / diag[j];
  }
  double rss = 0.0;
  for (std::size_t i = cols; i < m; ++i) rss += y[i] * y[i];
  fit.rss = rss;

  double mean = 0.0;
  for (double v : response) mean += v;
  mean /= static_cast<double>(m);
  double tss = 0.0;
  for (double v : response) tss += (v - mean) * (v - mean);
  fit.r2 = tss > 1e-300 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;

  const double md = static_cast<double>(m);
  fit.aic = md * std::log(std::max(rss, 1e-300) / md) +
            2.0 * (static_cast<double>(k) + 1.0);
  return fit;
}

std::vector<LowessPoint> lowess(std::span<const double> xs,
                                std::span<const double> ys, double frac,
                                int robust_iters) {
  const std::size_t m = xs.size();
  if (m != ys.size()) throw DegenerateInput("lowess: input lengths differ");
  if (m < 3) throw DegenerateInput("lowess: need at least 3 points");
  if (!(frac > 0.0 && frac <= 1.0))
    throw DegenerateInput("lowess: frac must be in (0, 1]");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = xs[order[i]];
    y[i] = ys[order[i]];
  }
  if (x.front() == x.back())
    throw DegenerateInput("lowess: all x values coincide");

  const std::size_t span = std::clamp<std::size_t>(
      static_cast<std::size_t>(
          std::ceil(frac * static_cast<double>(m))),
      2, m);

  std::vector<double> robust_w(m, 1.0);
  std::vector<double> fitted(m, 0.0);
  std::vector<double> dist(m);

  for (int iter = 0; iter <= robust_iters; ++iter) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) dist[j] = std::abs(x[j] - x[i]);
      std::vector<double> sorted_dist = dist;
      std::nth_element(sorted_dist.begin(), sorted_dist.begin() + (span - 1),
                       sorted_dist.end());
      const double h = sorted_dist[span - 1];

      double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double w;
        if (h <= 0.0) {
          w = dist[j] == 0.0 ? 1.0 : 0.0;
        } else {
          const double u = dist[j] / h;
          if (u >= 1.0) continue;
          const double t = 1.0 - u * u * u;
          w = t * t * t;
        }
        w *= robust_w[j];
        if (w <= 0.0) continue;
        sw += w;
        swx += w * x[j];
        swy += w * y[j];
        swxx += w * x[j] * x[j];
        swxy += w * x[j] * y[j];
      }
      const double det = sw * swxx - swx * swx;
      if (sw <= 0.0) {
        fitted[i] = y[i];
      } else if (std::abs(det) < 1e-12 * std::max(1.0, sw * swxx)) {
        fitted[i] = swy / sw;  // weight concentrated at one abscissa
      } else {
        const double slope = (sw * swxy - swx * swy) / det;
        const double intercept = (swy - slope * swx) / sw;
        fitted[i] = intercept + slope * x[i];
      }
    }
    if (iter == robust_iters) break;

    // bisquare reweighting on the residuals
    std::vector<double> abs_resid(m);
    for (std::size_t i = 0; i < m; ++i) abs_resid[i] = std::abs(y[i] - fitted[i]);
    std::vector<double> sorted_resid = abs_resid;
    std::sort(sorted_resid.begin(), sorted_resid.end());
    const double med = m % 2 ? sorted_resid[m / 2]
                             : 0.5 * (sorted_resid[m / 2 - 1] +
                                      sorted_resid[m / 2]);
    const double cutoff = 6.0 * med;
    for (std::size_t i = 0; i < m; ++i) {
      if (cutoff <= 0.0) {
        robust_w[i] = 1.0;
      } else {
        const double u = abs_resid[i] / cutoff;
        robust_w[i] = u >= 1.0 ? 0.0 : (1.0 - u * u) * (1.0 - u * u);
      }
    }
  }

  std::vector<LowessPoint> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = {x[i], fitted[i]};
  return out;
}

double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw DegenerateInput("ks test: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0, fa = 0.0, fb = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double va = a[i], vb = b[j];
    if (va <= vb) fa = static_cast<double>(++i) / na;
    if (vb <= va) fb = static_cast<double>(++j) / nb;
    d = std::max(d, std::abs(fa - fb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda =
      (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    p += sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
    sign = -sign;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace netmoments

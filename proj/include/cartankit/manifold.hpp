#pragma once

#include "cartankit/numerics.hpp"
#include "cartankit/report.hpp"
#include "cartankit/tolerances.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cartankit::manifold {

/// One coordinate chart: a sampling box, a domain predicate (margin in
/// [0,1) shrinks the domain toward its center for interior sampling), and
/// this chart's partition-of-unity weight expressed in its own coordinates.
/// The weight is smooth, vanishes at the domain boundary, and the weights
/// of all charts sum to 1 at every point of the manifold.
struct Chart {
  std::string name;
  Vec box_lo, box_hi;
  std::function<bool(const Vec&, double)> contains;
  std::function<double(const Vec&)> own_weight;
};

struct AtlasSpec {
  std::string name;
  int dim = 0;
  std::vector<Chart> charts;
  std::function<Vec(int, int, const Vec&)> transition;   // (from, to, coords)
  std::function<bool(int, int, const Vec&)> in_overlap;  // coords of `from` lie in `to`
  // optional closed-form derivative of transition; finite differences otherwise
  std::function<Mat(int, int, const Vec&)> jacobian;
};

struct PointRef {
  int chart = 0;
  Vec coords;
};

inline Vec change_chart(const AtlasSpec& atlas, int from, int to, const Vec& u) {
  if (from == to) return u;
  return atlas.transition(from, to, u);
}

/// Partition-of-unity weight of chart i at a point given in chart c.
/// Zero off chart i by construction.
inline double weight(const AtlasSpec& atlas, int i, int c, const Vec& u) {
  if (i == c) return atlas.charts[i].own_weight(u);
  if (!atlas.in_overlap(c, i, u)) return 0.0;
  return atlas.charts[i].own_weight(atlas.transition(c, i, u));
}

inline Mat transition_jacobian(const AtlasSpec& atlas, int from, int to,
                               const Vec& u, double step) {
  if (from == to) return Mat::Identity(atlas.dim, atlas.dim);
  if (atlas.jacobian) return atlas.jacobian(from, to, u);
  return fd::jacobian([&](const Vec& x) { return atlas.transition(from, to, x); },
                      u, step);
}

inline Vec push_tangent(const AtlasSpec& atlas, int from, int to, const Vec& u,
                        const Vec& v, double step) {
  if (from == to) return v;
  return transition_jacobian(atlas, from, to, u, step) * v;
}

/// Interior sample in one chart: uniform over the box, rejected until the
/// margin-shrunk domain accepts.
inline PointRef sample_chart_point(const AtlasSpec& atlas, int chart,
                                   SampleStream& rng, double margin = 0.1) {
  const Chart& ch = atlas.charts[chart];
  Vec u(atlas.dim);
  do {
    for (int d = 0; d < atlas.dim; ++d)
      u[d] = rng.uniform(ch.box_lo[d], ch.box_hi[d]);
  } while (!ch.contains(u, margin));
  return {chart, u};
}

/// Round-robin interior samples across all charts.
inline std::vector<PointRef> sample_points(const AtlasSpec& atlas,
                                           SampleStream& rng, int count,
                                           double margin = 0.1) {
  std::vector<PointRef> out;
  out.reserve(count);
  const int n = static_cast<int>(atlas.charts.size());
  for (int k = 0; k < count; ++k)
    out.push_back(sample_chart_point(atlas, k % n, rng, margin));
  return out;
}

/// Midpoint-rule integral of a top-degree density. `density(c, u)` is the
/// coefficient in chart c coordinates (including any volume factor); the
/// partition of unity splits the integral across charts, so each cell
/// contributes weight * density * cell volume and cells of zero weight are
/// skipped without evaluating the density.
inline double integrate_density(
    const AtlasSpec& atlas, const std::function<double(int, const Vec&)>& density,
    int resolution) {
  double total = 0.0;
  for (int c = 0; c < static_cast<int>(atlas.charts.size()); ++c) {
    const Chart& ch = atlas.charts[c];
    const int d = atlas.dim;
    Vec delta = (ch.box_hi - ch.box_lo) / resolution;
    double cell = delta.prod();
    std::vector<int> idx(d, 0);
    Vec u(d);
    while (true) {
      for (int k = 0; k < d; ++k)
        u[k] = ch.box_lo[k] + (idx[k] + 0.5) * delta[k];
      double w = ch.own_weight(u);
      if (w != 0.0) total += w * density(c, u) * cell;
      int k = 0;
      while (k < d && ++idx[k] == resolution) idx[k++] = 0;
      if (k == d) break;
    }
  }
  return total;
}

/// Riemannian metric given per chart; values are symmetric positive-definite
/// and transform as g_from = J^T g_to J under chart transitions.
struct MetricField {
  std::function<Mat(int, const Vec&)> value;
};

/// Gauss curvature of a surface metric from finite differences of its
/// components (the classical determinant formula in E, F, G).
inline double gauss_curvature(const MetricField& metric, int chart, const Vec& u,
                              double step) {
  auto e = [&](const Vec& x) { return metric.value(chart, x)(0, 0); };
  auto f = [&](const Vec& x) { return metric.value(chart, x)(0, 1); };
  auto g = [&](const Vec& x) { return metric.value(chart, x)(1, 1); };
  const double ev = e(u), fv = f(u), gv = g(u);
  const double eu_ = fd::partial(e, u, 0, step), ev_ = fd::partial(e, u, 1, step);
  const double fu_ = fd::partial(f, u, 0, step), fv_ = fd::partial(f, u, 1, step);
  const double gu_ = fd::partial(g, u, 0, step), gv_ = fd::partial(g, u, 1, step);
  const double evv = fd::second_partial(e, u, 1, 1, step);
  const double guu = fd::second_partial(g, u, 0, 0, step);
  const double fuv = fd::second_partial(f, u, 0, 1, step);
  Mat m1(3, 3), m2(3, 3);
  m1 << -0.5 * evv + fuv - 0.5 * guu, 0.5 * eu_, fu_ - 0.5 * ev_,
      fv_ - 0.5 * gu_, ev, fv,
      0.5 * gv_, fv, gv;
  m2 << 0.0, 0.5 * ev_, 0.5 * gu_,
      0.5 * ev_, ev, fv,
      0.5 * gu_, fv, gv;
  const double det = ev * gv - fv * fv;
  return (m1.determinant() - m2.determinant()) / (det * det);
}

namespace detail {

inline double ramp(double x) { return x <= 0.0 ? 0.0 : std::exp(-1.0 / x); }

/// Smooth step: 0 for x <= 0, 1 for x >= 1, strictly increasing between.
inline double smooth_step(double x) {
  const double a = ramp(x);
  const double b = ramp(1.0 - x);
  return a / (a + b);
}

inline double wrap_angle(double t) {
  return t - 2.0 * M_PI * std::round(t / (2.0 * M_PI));
}

}  // namespace detail

/// Unit sphere from two stereographic charts of radius 4: chart 0 projects
/// from the north pole, chart 1 from the south pole with the second
/// coordinate negated, which makes the transition u -> (u1, -u2)/|u|^2 an
/// orientation-preserving involution on the overlap annulus 1/4 < |u| < 4.
inline Vec sphere_point(int chart, const Vec& u) {
  const double r2 = u.squaredNorm();
  Vec p(3);
  if (chart == 0) {
    p << 2.0 * u[0] / (1.0 + r2), 2.0 * u[1] / (1.0 + r2), (r2 - 1.0) / (1.0 + r2);
  } else {
    p << 2.0 * u[0] / (1.0 + r2), -2.0 * u[1] / (1.0 + r2), (1.0 - r2) / (1.0 + r2);
  }
  return p;
}

inline Vec sphere_chart_coords(int chart, const Vec& p) {
  Vec u(2);
  if (chart == 0) {
    u << p[0] / (1.0 - p[2]), p[1] / (1.0 - p[2]);
  } else {
    u << p[0] / (1.0 + p[2]), -p[1] / (1.0 + p[2]);
  }
  return u;
}

inline AtlasSpec sphere_atlas() {
  AtlasSpec atlas;
  atlas.name = "sphere";
  atlas.dim = 2;
  const double radius = 4.0;
  auto disc_weight = [radius](const Vec& u) {
    const double r = u.norm();
    if (r <= 1.0 / radius) return 1.0;
    if (r >= radius) return 0.0;
    return detail::smooth_step((std::log(radius) - std::log(r)) /
                               (2.0 * std::log(radius)));
  };
  for (int c = 0; c < 2; ++c) {
    Chart ch;
    ch.name = c == 0 ? "from-north" : "from-south";
    ch.box_lo = Vec::Constant(2, -radius);
    ch.box_hi = Vec::Constant(2, radius);
    ch.contains = [radius](const Vec& u, double margin) {
      return u.norm() < radius * (1.0 - margin);
    };
    ch.own_weight = disc_weight;
    atlas.charts.push_back(ch);
  }
  atlas.transition = [](int, int, const Vec& u) {
    const double r2 = u.squaredNorm();
    Vec v(2);
    v << u[0] / r2, -u[1] / r2;
    return v;
  };
  atlas.in_overlap = [radius](int from, int to, const Vec& u) {
    if (from == to) return true;
    const double r = u.norm();
    return r > 1.0 / radius && r < radius;
  };
  atlas.jacobian = [](int, int, const Vec& u) {
    const double u1 = u[0], u2 = u[1];
    const double r2 = u.squaredNorm();
    Mat j(2, 2);
    j << u2 * u2 - u1 * u1, -2.0 * u1 * u2,
        2.0 * u1 * u2, u2 * u2 - u1 * u1;
    return Mat(j / (r2 * r2));
  };
  return atlas;
}

/// Flat torus of side 2pi from four square charts of half-side 0.8pi
/// centered at (0,0), (pi,0), (0,pi), (pi,pi); transitions are constant
/// shifts modulo 2pi. Weights are normalized products of one-dimensional
/// bumps, positive because every point lies well inside some chart.
inline AtlasSpec torus_atlas() {
  AtlasSpec atlas;
  atlas.name = "torus";
  atlas.dim = 2;
  const double half = 0.8 * M_PI;
  std::vector<Vec> centers;
  for (double cy : {0.0, M_PI})
    for (double cx : {0.0, M_PI}) {
      Vec c(2);
      c << cx, cy;
      centers.push_back(c);
    }
  auto bump1d = [half](double t) {
    const double s = t / half;
    const double q = 1.0 - s * s;
    return q <= 0.0 ? 0.0 : std::exp(-1.0 / q);
  };
  auto bump = [bump1d](const Vec& d) { return bump1d(d[0]) * bump1d(d[1]); };
  for (int i = 0; i < 4; ++i) {
    Chart ch;
    ch.name = "square-" + std::to_string(i);
    ch.box_lo = Vec::Constant(2, -half);
    ch.box_hi = Vec::Constant(2, half);
    ch.contains = [half](const Vec& u, double margin) {
      return std::abs(u[0]) < half * (1.0 - margin) &&
             std::abs(u[1]) < half * (1.0 - margin);
    };
    ch.own_weight = [centers, bump, i](const Vec& u) {
      Vec p = centers[i] + u;
      double total = 0.0, mine = 0.0;
      for (int j = 0; j < 4; ++j) {
        Vec d(2);
        d << detail::wrap_angle(p[0] - centers[j][0]),
            detail::wrap_angle(p[1] - centers[j][1]);
        const double b = bump(d);
        total += b;
        if (j == i) mine = b;
      }
      return mine / total;
    };
    atlas.charts.push_back(ch);
  }
  atlas.transition = [centers](int from, int to, const Vec& u) {
    Vec p = centers[from] + u;
    Vec v(2);
    v << detail::wrap_angle(p[0] - centers[to][0]),
        detail::wrap_angle(p[1] - centers[to][1]);
    return v;
  };
  atlas.in_overlap = [centers, half](int from, int to, const Vec& u) {
    if (from == to) return true;
    Vec p = centers[from] + u;
    return std::abs(detail::wrap_angle(p[0] - centers[to][0])) < half &&
           std::abs(detail::wrap_angle(p[1] - centers[to][1])) < half;
  };
  atlas.jacobian = [](int, int, const Vec&) { return Mat(Mat::Identity(2, 2)); };
  return atlas;
}

/// R^n as a single global chart; the box bounds sampling and quadrature.
inline AtlasSpec euclidean_atlas(int n, double box = 3.0) {
  AtlasSpec atlas;
  atlas.name = "euclidean-" + std::to_string(n);
  atlas.dim = n;
  Chart ch;
  ch.name = "global";
  ch.box_lo = Vec::Constant(n, -box);
  ch.box_hi = Vec::Constant(n, box);
  ch.contains = [box](const Vec& u, double margin) {
    return (u.array().abs() < box * (1.0 - margin)).all();
  };
  ch.own_weight = [](const Vec&) { return 1.0; };
  atlas.charts.push_back(ch);
  atlas.transition = [](int, int, const Vec& u) { return u; };
  atlas.in_overlap = [](int, int, const Vec&) { return true; };
  atlas.jacobian = [n](int, int, const Vec&) { return Mat(Mat::Identity(n, n)); };
  return atlas;
}

/// Constant-curvature-1 metric of the unit sphere; the same expression
/// serves both stereographic charts.
inline MetricField round_sphere_metric() {
  MetricField m;
  m.value = [](int, const Vec& u) {
    const double s = 2.0 / (1.0 + u.squaredNorm());
    return Mat(s * s * Mat::Identity(2, 2));
  };
  return m;
}

inline MetricField flat_torus_metric() {
  MetricField m;
  m.value = [](int, const Vec&) { return Mat(Mat::Identity(2, 2)); };
  return m;
}

inline MetricField euclidean_metric(int n) {
  MetricField m;
  m.value = [n](int, const Vec&) { return Mat(Mat::Identity(n, n)); };
  return m;
}

/// Transition coherence: inverse round trips, triangle compatibility,
/// orientation, pushforward round trips, and partition-of-unity behavior,
/// all at seeded sample points.
inline CheckReport check_atlas(const AtlasSpec& atlas, SampleStream& rng,
                               int samples, const Tolerances& tol) {
  CheckReport report;
  auto& roundtrip = report.add("chart-roundtrip", refs::chart_roundtrip,
                               tol.get("chart_roundtrip"));
  auto& triangle = report.add("chart-triangle", refs::cocycle,
                              tol.get("chart_roundtrip"));
  auto& push = report.add("tangent-roundtrip",
                          "pushforwards along inverse transitions invert",
                          tol.get("tangent_roundtrip"));
  auto& pou = report.add("partition-of-unity", refs::pou, tol.get("pou_sum"));
  const double step = tol.get("step_jacobian");
  const int n = static_cast<int>(atlas.charts.size());
  for (const PointRef& p : sample_points(atlas, rng, samples)) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = weight(atlas, i, p.chart, p.coords);
      sum += w;
      if (w < 0.0) pou.absorb(1.0);
      if (!atlas.in_overlap(p.chart, i, p.coords) && w != 0.0) pou.absorb(1.0);
    }
    pou.absorb(std::abs(sum - 1.0));
    for (int j = 0; j < n; ++j) {
      if (j == p.chart || !atlas.in_overlap(p.chart, j, p.coords)) continue;
      Vec v = atlas.transition(p.chart, j, p.coords);
      roundtrip.absorb((atlas.transition(j, p.chart, v) - p.coords).norm());
      Vec w = rng.vector(atlas.dim, 1.0);
      Vec back = push_tangent(atlas, j, p.chart, v,
                              push_tangent(atlas, p.chart, j, p.coords, w, step),
                              step);
      push.absorb((back - w).norm());
      for (int k = 0; k < n; ++k) {
        if (k == j || k == p.chart) continue;
        if (!atlas.in_overlap(p.chart, k, p.coords) ||
            !atlas.in_overlap(j, k, v))
          continue;
        triangle.absorb(
            (atlas.transition(j, k, v) - atlas.transition(p.chart, k, p.coords))
                .norm());
      }
    }
  }
  return report;
}

/// Metric field soundness: symmetry, positive definiteness, and the
/// (0,2)-tensor transformation rule across overlaps.
inline CheckReport check_metric(const AtlasSpec& atlas, const MetricField& metric,
                                SampleStream& rng, int samples,
                                const Tolerances& tol) {
  CheckReport report;
  auto& sym = report.add("metric-symmetry", "metric tensor is symmetric",
                         tol.get("exact"));
  auto& pd = report.add("metric-positive",
                        "metric tensor is positive definite",
                        tol.get("spd_min_eig"));
  auto& compat = report.add("metric-compatibility",
                            "metric components transform as g_i = J^T g_j J",
                            tol.get("tangent_roundtrip"));
  const double step = tol.get("step_jacobian");
  const int n = static_cast<int>(atlas.charts.size());
  for (const PointRef& p : sample_points(atlas, rng, samples)) {
    Mat g = metric.value(p.chart, p.coords);
    sym.absorb((g - g.transpose()).norm());
    Eigen::SelfAdjointEigenSolver<Mat> es(g);
    const double lo = es.eigenvalues().minCoeff();
    // residual exceeds the floor exactly when the spectrum dips below it
    pd.absorb(std::max(0.0, 2.0 * tol.get("spd_min_eig") - lo));
    for (int j = 0; j < n; ++j) {
      if (j == p.chart || !atlas.in_overlap(p.chart, j, p.coords)) continue;
      Vec v = atlas.transition(p.chart, j, p.coords);
      Mat jac = transition_jacobian(atlas, p.chart, j, p.coords, step);
      compat.absorb(
          (g - Mat(jac.transpose() * metric.value(j, v) * jac)).norm());
    }
  }
  return report;
}

}  // namespace cartankit::manifold

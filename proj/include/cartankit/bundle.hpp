#pragma once

#include "cartankit/lie.hpp"
#include "cartankit/manifold.hpp"
#include "cartankit/numerics.hpp"
#include "cartankit/report.hpp"
#include "cartankit/tolerances.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cartankit::bundle {

using manifold::AtlasSpec;
using manifold::MetricField;
using manifold::PointRef;

/// A principal bundle presented by local trivializations: one per chart of
/// the base atlas, glued by group-valued transition functions. Convention:
/// transition(i, j, x_i) = g_ij at the point with chart-i coordinates x_i,
/// and fiber coordinates transform as a_i = g_ij(x) a_j.
struct PrincipalBundleSpec {
  std::string name;
  AtlasSpec base;
  lie::GroupSpec group;
  std::function<Mat(int, int, const Vec&)> transition;
  // For frame-type bundles: the reference frame each chart's trivialization
  // gauges fibers against (columns in chart coordinates). Empty means the
  // coordinate frame itself.
  std::function<Mat(int, const Vec&)> frame_gauge;
};

inline Mat reference_frame(const PrincipalBundleSpec& pb, int chart,
                           const Vec& x) {
  if (pb.frame_gauge) return pb.frame_gauge(chart, x);
  return Mat::Identity(pb.base.dim, pb.base.dim);
}

/// Point of the total space as (chart, base coordinates, fiber coordinates).
struct BundlePoint {
  int chart = 0;
  Vec base;
  Mat fiber;
};

/// Tangent vector at a bundle point: base components in the chart, fiber
/// components left-trivialized, xi = a^-1 a'(0) in algebra coordinates.
struct TangentAtP {
  Vec base_comps;
  Vec fiber_comps;
};

inline Mat transition_matrix(const PrincipalBundleSpec& pb, int i, int j,
                             const Vec& xi) {
  if (i == j) return Mat::Identity(pb.group.matrix_dim, pb.group.matrix_dim);
  return pb.transition(i, j, xi);
}

inline BundlePoint to_chart(const PrincipalBundleSpec& pb, const BundlePoint& p,
                            int j) {
  if (j == p.chart) return p;
  Vec xj = manifold::change_chart(pb.base, p.chart, j, p.base);
  return {j, xj, Mat(pb.transition(j, p.chart, xj) * p.fiber)};
}

inline BundlePoint right_act(const BundlePoint& p, const Mat& h) {
  return {p.chart, p.base, Mat(p.fiber * h)};
}

/// Vertical tangent generated by an algebra element: in left trivialization
/// the fundamental field at any point is exactly (0, X), in every chart.
inline TangentAtP fundamental_field(const PrincipalBundleSpec& pb,
                                    const BundlePoint& p, const Vec& x) {
  return {Vec::Zero(pb.base.dim), x};
}

/// Transport of a tangent vector to another trivialization. The base part
/// is a Jacobian pushforward; the fiber part differentiates the transported
/// curve a_j(t) = g_ji(x(t)) a(t) through the group logarithm.
inline TangentAtP transport_tangent(const PrincipalBundleSpec& pb,
                                    const BundlePoint& p, const TangentAtP& w,
                                    int j, double step) {
  if (j == p.chart) return w;
  const AtlasSpec& atlas = pb.base;
  Vec vj = manifold::push_tangent(atlas, p.chart, j, p.base, w.base_comps, step);
  Mat xi_hat = lie::algebra_matrix(pb.group, w.fiber_comps);
  Vec xj0 = manifold::change_chart(atlas, p.chart, j, p.base);
  Mat aj0_inv = Mat(pb.transition(j, p.chart, xj0) * p.fiber).inverse();
  Vec fiber = fd::derivative(
      [&](double t) {
        Vec xt = p.base + t * w.base_comps;
        Vec xjt = manifold::change_chart(atlas, p.chart, j, xt);
        Mat ajt = pb.transition(j, p.chart, xjt) * p.fiber *
                  lie::exp_matrix(pb.group, Mat(t * xi_hat));
        return lie::log(pb.group, Mat(aj0_inv * ajt));
      },
      step);
  return {vj, fiber};
}

/// Pushforward of a tangent under the right action R_h, computed by
/// differentiating the acted curve rather than by a closed formula; the
/// closed formula Ad(h^-1) xi serves as an independent oracle in tests.
inline TangentAtP push_right_act(const PrincipalBundleSpec& pb,
                                 const BundlePoint& p, const TangentAtP& w,
                                 const Mat& h, double step) {
  Mat xi_hat = lie::algebra_matrix(pb.group, w.fiber_comps);
  Mat ah_inv = Mat(p.fiber * h).inverse();
  Vec fiber = fd::derivative(
      [&](double t) {
        return lie::log(
            pb.group,
            Mat(ah_inv * p.fiber * lie::exp_matrix(pb.group, Mat(t * xi_hat)) * h));
      },
      step);
  return {w.base_comps, fiber};
}

inline BundlePoint sample_point(const PrincipalBundleSpec& pb, SampleStream& rng,
                                double margin = 0.1) {
  const int chart = static_cast<int>(rng.integer(pb.base.charts.size()));
  PointRef base = manifold::sample_chart_point(pb.base, chart, rng, margin);
  return {base.chart, base.coords, lie::sample_group(pb.group, rng)};
}

inline TangentAtP sample_tangent(const PrincipalBundleSpec& pb, SampleStream& rng,
                                 double scale = 1.0) {
  return {rng.vector(pb.base.dim, scale), rng.vector(pb.group.algebra_dim, scale)};
}

/// Frame bundle of the base: fibers are bases of the tangent space written
/// in chart coordinates, the group is GL(dim), and g_ij is the Jacobian of
/// the chart-j-to-chart-i transition (expressing chart j's coordinate frame
/// in chart i's).
inline PrincipalBundleSpec frame_bundle(const AtlasSpec& atlas, double step) {
  PrincipalBundleSpec pb;
  pb.name = "frames(" + atlas.name + ")";
  pb.base = atlas;
  pb.group = lie::gl(atlas.dim);
  pb.transition = [atlas, step](int i, int j, const Vec& xi) {
    Vec xj = manifold::change_chart(atlas, i, j, xi);
    return manifold::transition_jacobian(atlas, j, i, xj, step);
  };
  return pb;
}

/// Orthonormal-frame field of a metric in one chart: columns of W are a
/// g-orthonormal basis, W = g^(-1/2). Symmetric, so it varies smoothly.
inline Mat orthonormal_frame(const MetricField& metric, int chart, const Vec& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(metric.value(chart, x));
  return es.operatorInverseSqrt();
}

/// Bundle of metric-orthonormal frames, with orthogonal transitions
/// h_ij = W_i^-1 g_ij W_j.
inline PrincipalBundleSpec orthonormal_frame_bundle(const AtlasSpec& atlas,
                                                    const MetricField& metric,
                                                    double step) {
  PrincipalBundleSpec frames = frame_bundle(atlas, step);
  PrincipalBundleSpec pb;
  pb.name = "orthonormal-frames(" + atlas.name + ")";
  pb.base = atlas;
  pb.group = lie::orthogonal(atlas.dim);
  pb.transition = [frames, metric](int i, int j, const Vec& xi) {
    Vec xj = manifold::change_chart(frames.base, i, j, xi);
    Mat wi = orthonormal_frame(metric, i, xi);
    Mat wj = orthonormal_frame(metric, j, xj);
    return Mat(wi.inverse() * frames.transition(i, j, xi) * wj);
  };
  pb.frame_gauge = [metric](int chart, const Vec& x) {
    return orthonormal_frame(metric, chart, x);
  };
  return pb;
}

inline PrincipalBundleSpec trivial_bundle(const AtlasSpec& atlas,
                                          const lie::GroupSpec& group) {
  PrincipalBundleSpec pb;
  pb.name = "trivial-" + group.name + "(" + atlas.name + ")";
  pb.base = atlas;
  pb.group = group;
  const int n = group.matrix_dim;
  pb.transition = [n](int, int, const Vec&) { return Mat(Mat::Identity(n, n)); };
  return pb;
}

/// Structural soundness of the glued presentation: transition values lie in
/// the group, the cocycle identities hold, the action is free, and tangent
/// transport is consistent across trivializations.
inline CheckReport check_principal_bundle(const PrincipalBundleSpec& pb,
                                          SampleStream& rng, int samples,
                                          const Tolerances& tol) {
  CheckReport report;
  auto& member = report.add("transition-membership", refs::group_membership,
                            tol.get("membership"));
  auto& cocycle = report.add("transition-cocycle", refs::cocycle,
                             tol.get("cocycle"));
  auto& free = report.add("free-action", refs::free_action, tol.get("exact"));
  auto& fundamental = report.add(
      "fundamental-transport",
      "fundamental fields are chart-independent in left trivialization",
      tol.get("tangent_roundtrip"));
  auto& roundtrip = report.add("tangent-transport-roundtrip",
                               "tangent transport inverts across charts",
                               tol.get("tangent_roundtrip"));
  const double step = tol.get("step_pushforward");
  const int n = static_cast<int>(pb.base.charts.size());
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = sample_point(pb, rng);

    Mat h = lie::sample_group(pb.group, rng);
    if ((h - Mat::Identity(h.rows(), h.cols())).norm() > 0.1)
      free.absorb((right_act(p, h).fiber - p.fiber).norm() < 1e-9 ? 1.0 : 0.0);

    Vec x_alg = lie::sample_algebra(pb.group, rng);
    TangentAtP vert = fundamental_field(pb, p, x_alg);
    TangentAtP w = sample_tangent(pb, rng);
    for (int j = 0; j < n; ++j) {
      if (j == p.chart || !pb.base.in_overlap(p.chart, j, p.base)) continue;
      Mat gij = transition_matrix(pb, p.chart, j, p.base);
      member.absorb(pb.group.membership(gij));
      Vec xj = manifold::change_chart(pb.base, p.chart, j, p.base);
      Mat gji = transition_matrix(pb, j, p.chart, xj);
      cocycle.absorb((gij * gji - Mat::Identity(gij.rows(), gij.cols())).norm());
      for (int k = 0; k < n; ++k) {
        if (k == j || k == p.chart) continue;
        if (!pb.base.in_overlap(p.chart, k, p.base) ||
            !pb.base.in_overlap(j, k, xj))
          continue;
        Mat gjk = transition_matrix(pb, j, k, xj);
        Mat gik = transition_matrix(pb, p.chart, k, p.base);
        cocycle.absorb((gij * gjk - gik).norm());
      }

      TangentAtP vert_j = transport_tangent(pb, p, vert, j, step);
      fundamental.absorb(vert_j.base_comps.norm() +
                         (vert_j.fiber_comps - x_alg).norm());

      TangentAtP w_j = transport_tangent(pb, p, w, j, step);
      TangentAtP w_back = transport_tangent(pb, to_chart(pb, p, j), w_j,
                                            p.chart, step);
      roundtrip.absorb((w_back.base_comps - w.base_comps).norm() +
                       (w_back.fiber_comps - w.fiber_comps).norm());
    }
  }
  return report;
}

/// A fiber model for associated bundles: a left action of the structure
/// group on coordinate vectors. Linear actions come from representations;
/// the canonical-representative action below handles a coset space.
struct HModuleCarrier {
  std::string name;
  int dim = 0;
  std::function<Vec(const Mat&, const Vec&)> act;
};

inline HModuleCarrier linear_carrier(const lie::Representation& rep,
                                     std::string name) {
  HModuleCarrier c;
  c.name = std::move(name);
  c.dim = rep.dim;
  c.act = [rep](const Mat& h, const Vec& f) { return Vec(rep.matrix(h) * f); };
  return c;
}

inline Mat unflatten(const Vec& v, int n) {
  return Eigen::Map<const Mat>(v.data(), n, n);
}

/// Cosets of the orthogonal subgroup inside GL(n), carried by their unique
/// symmetric positive-definite representatives: gO(n) <-> sqrt(g g^T).
/// The left action h.(S) re-polarizes h S.
inline HModuleCarrier spd_coset_carrier(int n) {
  HModuleCarrier c;
  c.name = "spd-cosets-" + std::to_string(n);
  c.dim = n * n;
  c.act = [n](const Mat& h, const Vec& f) {
    return lie::flatten(polar_spd_factor(Mat(h * unflatten(f, n))));
  };
  return c;
}

/// Element of an associated bundle in canonical form: lowest chart whose
/// domain contains the base point, fiber gauged to the identity. Two
/// elements are equal iff their canonical forms agree componentwise.
struct AssociatedElement {
  int chart = 0;
  Vec base;
  Vec value;
};

inline int canonical_chart(const AtlasSpec& atlas, int chart, const Vec& x) {
  for (int i = 0; i < static_cast<int>(atlas.charts.size()); ++i)
    if (atlas.in_overlap(chart, i, x)) return i;
  return chart;
}

inline AssociatedElement associate(const PrincipalBundleSpec& pb,
                                   const HModuleCarrier& carrier,
                                   const BundlePoint& p, const Vec& f) {
  Vec value = carrier.act(p.fiber, f);
  int c0 = canonical_chart(pb.base, p.chart, p.base);
  if (c0 == p.chart) return {c0, p.base, value};
  Vec x0 = manifold::change_chart(pb.base, p.chart, c0, p.base);
  Mat g = transition_matrix(pb, c0, p.chart, x0);
  return {c0, x0, carrier.act(g, value)};
}

inline double associated_distance(const PrincipalBundleSpec& pb,
                                  const HModuleCarrier& carrier,
                                  const AssociatedElement& a,
                                  const AssociatedElement& b) {
  if (a.chart == b.chart)
    return (a.base - b.base).norm() + (a.value - b.value).norm();
  Vec xb = manifold::change_chart(pb.base, b.chart, a.chart, b.base);
  Mat g = transition_matrix(pb, a.chart, b.chart, xb);
  return (a.base - xb).norm() + (a.value - carrier.act(g, b.value)).norm();
}

/// Maps P -> F intertwining the right action with the inverse left action,
/// and sections of the associated bundle. The two classes are in canonical
/// bijection; the conversions below realize it in both directions.
using EquivariantMap = std::function<Vec(const BundlePoint&)>;
using Section = std::function<AssociatedElement(int, const Vec&)>;

inline Section section_from_equivariant(const PrincipalBundleSpec& pb,
                                        const HModuleCarrier& carrier,
                                        const EquivariantMap& f) {
  const int n = pb.group.matrix_dim;
  return [pb, carrier, f, n](int chart, const Vec& x) {
    BundlePoint p{chart, x, Mat::Identity(n, n)};
    return associate(pb, carrier, p, f(p));
  };
}

inline EquivariantMap equivariant_from_section(const PrincipalBundleSpec& pb,
                                               const HModuleCarrier& carrier,
                                               const Section& s) {
  return [pb, carrier, s](const BundlePoint& p) {
    AssociatedElement e = s(p.chart, p.base);
    BundlePoint p0 = to_chart(pb, p, e.chart);
    return carrier.act(p0.fiber.inverse(), e.value);
  };
}

inline CheckReport check_equivariant(const PrincipalBundleSpec& pb,
                                     const HModuleCarrier& carrier,
                                     const EquivariantMap& f, SampleStream& rng,
                                     int samples, const Tolerances& tol) {
  CheckReport report;
  auto& eq = report.add("equivariance", refs::equivariant_map, tol.get("exact"));
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = sample_point(pb, rng);
    Mat h = lie::sample_group(pb.group, rng);
    eq.absorb((Vec(f(right_act(p, h))) - carrier.act(h.inverse(), f(p))).norm());
  }
  return report;
}

/// A reduction of the structure group to a subgroup K, presented by the
/// sub-bundle it carves out: a membership residual (zero exactly on Q) and
/// a local section whose values lie in Q over every chart.
struct ReductionSpec {
  std::string name;
  std::function<double(const BundlePoint&)> membership;
  std::function<Mat(int, const Vec&)> local_section;
};

/// Orthonormal frames of a metric, as a reduction of the frame bundle to
/// the orthogonal subgroup: membership is the Gram residual a^T g a - I.
inline ReductionSpec metric_to_reduction(const PrincipalBundleSpec& frames,
                                         const MetricField& metric) {
  ReductionSpec red;
  red.name = "orthonormal-frames";
  red.membership = [metric](const BundlePoint& p) {
    Mat gram = p.fiber.transpose() * metric.value(p.chart, p.base) * p.fiber;
    return (gram - Mat::Identity(gram.rows(), gram.cols())).norm();
  };
  red.local_section = [metric](int chart, const Vec& x) {
    return orthonormal_frame(metric, chart, x);
  };
  return red;
}

/// The metric a frame reduction induces: declaring the section's frames
/// orthonormal forces g = (q q^T)^-1, independent of the orthogonal gauge.
inline MetricField reduction_to_metric(const ReductionSpec& red) {
  MetricField m;
  m.value = [red](int chart, const Vec& x) {
    Mat q = red.local_section(chart, x);
    return Mat((q * q.transpose()).inverse());
  };
  return m;
}

/// Equivariant coset-valued map whose identity-coset locus is Q: the
/// polar representative of a^-1 q for any Q-frame q over the same point.
inline EquivariantMap reduction_to_symmetry_breaking(
    const PrincipalBundleSpec& pb, const ReductionSpec& red) {
  return [red](const BundlePoint& p) {
    Mat q = red.local_section(p.chart, p.base);
    return lie::flatten(polar_spd_factor(Mat(p.fiber.inverse() * q)));
  };
}

/// Recover the reduction from a coset-valued equivariant map: Q is the
/// identity-coset locus, and the map's value at the identity frame is
/// itself a Q-frame.
inline ReductionSpec symmetry_breaking_to_reduction(
    const PrincipalBundleSpec& pb, const EquivariantMap& f) {
  const int n = pb.group.matrix_dim;
  ReductionSpec red;
  red.name = "identity-coset-locus";
  red.membership = [f, n](const BundlePoint& p) {
    return (unflatten(f(p), n) - Mat::Identity(n, n)).norm();
  };
  red.local_section = [pb, f, n](int chart, const Vec& x) {
    return unflatten(f(BundlePoint{chart, x, Mat::Identity(n, n)}), n);
  };
  return red;
}

inline ReductionSpec section_to_reduction(const PrincipalBundleSpec& pb,
                                          const HModuleCarrier& carrier,
                                          const Section& s) {
  return symmetry_breaking_to_reduction(
      pb, equivariant_from_section(pb, carrier, s));
}

/// Soundness of a reduction against its subgroup: the local section lands
/// in Q, Q is K-invariant, and membership separates frames moved off Q.
inline CheckReport check_reduction(const PrincipalBundleSpec& pb,
                                   const ReductionSpec& red,
                                   const lie::GroupSpec& subgroup,
                                   SampleStream& rng, int samples,
                                   const Tolerances& tol) {
  CheckReport report;
  auto& member = report.add("reduction-membership",
                            "local section lands in the sub-bundle",
                            tol.get("exact"));
  auto& invariant = report.add("reduction-invariance",
                               "sub-bundle is invariant under the subgroup",
                               tol.get("exact"));
  auto& separate = report.add("reduction-separation",
                              "membership rejects frames moved off the sub-bundle",
                              tol.get("exact"));
  const int n = pb.group.matrix_dim;
  for (const PointRef& ref : manifold::sample_points(pb.base, rng, samples)) {
    BundlePoint q{ref.chart, ref.coords, red.local_section(ref.chart, ref.coords)};
    member.absorb(red.membership(q));
    Mat k = lie::sample_group(subgroup, rng);
    invariant.absorb(red.membership(right_act(q, k)));
    // symmetric stretch, guaranteed far from every orthogonal matrix
    Mat sym = Mat::Zero(n, n);
    for (int d = 0; d < n; ++d)
      sym(d, d) = rng.uniform(0.4, 0.8) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    Mat far = lie::exp_matrix(lie::gl(n), sym) * k;
    separate.absorb(std::max(0.0, 0.1 - red.membership(right_act(q, far))));
  }
  return report;
}

}  // namespace cartankit::bundle

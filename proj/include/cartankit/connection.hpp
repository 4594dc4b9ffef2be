#pragma once

#include "cartankit/forms.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cartankit::connection {

using bundle::AssociatedElement;
using bundle::BundlePoint;
using bundle::PrincipalBundleSpec;
using bundle::TangentAtP;
using manifold::AtlasSpec;
using manifold::MetricField;

/// Algebra-valued 1-form on the total space satisfying the two connection
/// axioms: Ad-equivariance under the right action and reproduction of
/// fundamental fields. eval returns algebra coordinates of the group.
struct EhresmannConnection {
  std::string name;
  std::function<Vec(const BundlePoint&, const TangentAtP&)> eval;
};

/// R^n-valued 1-form on the total space; a soldering form when it is
/// tensorial of the model representation and pointwise surjective.
struct SolderingForm {
  std::string name;
  int model_dim = 0;
  std::function<Vec(const BundlePoint&, const TangentAtP&)> eval;
};

/// Per-chart connection data: (chart, base coords, base tangent) -> ambient
/// algebra matrix. Contraction with the tangent argument is built in.
using LocalConnectionData = std::function<Mat(int, const Vec&, const Vec&)>;

inline LocalConnectionData zero_local_data(int n) {
  return [n](int, const Vec&, const Vec&) { return Mat(Mat::Zero(n, n)); };
}

/// Christoffel local forms of a metric in coordinate frames,
/// (A(v))^i_j = Gamma^i_jk v^k, from finite differences of the metric.
inline LocalConnectionData levi_civita_local(const AtlasSpec& atlas,
                                             const MetricField& metric,
                                             double step) {
  const int n = atlas.dim;
  return [metric, step, n](int chart, const Vec& x, const Vec& v) {
    Mat g = metric.value(chart, x);
    Mat ginv = g.inverse();
    // dg[k](i,j) = d g_ij / d x_k
    std::vector<Mat> dg(n);
    for (int k = 0; k < n; ++k)
      dg[k] = fd::derivative(
          [&](double t) {
            Vec xt = x;
            xt[k] += t;
            return metric.value(chart, xt);
          },
          step);
    Mat a = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double gamma = 0.0;
          for (int l = 0; l < n; ++l)
            gamma += 0.5 * ginv(i, l) *
                     (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
          a(i, j) += gamma * v[k];
        }
    return a;
  };
}

/// Rewrite frame-bundle connection data in the orthonormal gauge W (the
/// inverse square root of the metric): A_on = W^-1 (A W + dW). For the
/// metric's own Levi-Civita data the result is skew, i.e. lands in the
/// orthogonal algebra.
inline LocalConnectionData orthonormal_local_from_frame(
    const AtlasSpec& atlas, const MetricField& metric,
    const LocalConnectionData& frame_data, double step) {
  return [metric, frame_data, step](int chart, const Vec& x, const Vec& v) {
    Mat w = bundle::orthonormal_frame(metric, chart, x);
    Mat dw = fd::derivative(
        [&](double t) {
          return bundle::orthonormal_frame(metric, chart, Vec(x + t * v));
        },
        step);
    return Mat(w.inverse() * (frame_data(chart, x, v) * w + dw));
  };
}

/// Values of local data must lie in the structure group's algebra.
inline CheckReport check_local_data(const PrincipalBundleSpec& pb,
                                    const LocalConnectionData& data,
                                    SampleStream& rng, int samples,
                                    const Tolerances& tol) {
  CheckReport report;
  auto& member = report.add("local-data-algebra", refs::algebra_membership,
                            tol.get("reexpansion"));
  for (const auto& p : manifold::sample_points(pb.base, rng, samples)) {
    Vec v = rng.vector(pb.base.dim, 1.0);
    member.absorb(lie::algebra_residual(pb.group, data(p.chart, p.coords, v)));
  }
  return report;
}

/// Curvature of local connection data on a surface, evaluated in one chart
/// on the coordinate pair: F = d_1 A(e2) - d_2 A(e1) + [A(e1), A(e2)].
inline Mat local_curvature_form(const LocalConnectionData& data, int chart,
                                const Vec& x, double step) {
  const int n = static_cast<int>(x.size());
  Vec e1 = Vec::Zero(n), e2 = Vec::Zero(n);
  e1[0] = 1.0;
  e2[1] = 1.0;
  Mat d1 = fd::derivative(
      [&](double t) { return data(chart, Vec(x + t * e1), e2); }, step);
  Mat d2 = fd::derivative(
      [&](double t) { return data(chart, Vec(x + t * e2), e1); }, step);
  Mat a1 = data(chart, x, e1), a2 = data(chart, x, e2);
  return Mat(d1 - d2 + a1 * a2 - a2 * a1);
}

/// Connection from chart-compatible local data (data that glues to one
/// global form, e.g. Christoffel data): gamma = Ad(a^-1) A(x)(v) + xi.
inline EhresmannConnection connection_from_local(const PrincipalBundleSpec& pb,
                                                 const LocalConnectionData& data,
                                                 std::string name) {
  EhresmannConnection conn;
  conn.name = std::move(name);
  conn.eval = [pb, data](const BundlePoint& p, const TangentAtP& w) {
    Mat a = data(p.chart, p.base, w.base_comps);
    Vec horiz = lie::algebra_coords(pb.group, Mat(p.fiber.inverse() * a * p.fiber));
    return Vec(horiz + w.fiber_comps);
  };
  return conn;
}

/// Connection from arbitrary per-chart data, glued by the partition of
/// unity: each chart contributes its own exact connection, and an affine
/// combination of connections is a connection.
inline EhresmannConnection patched_connection(const PrincipalBundleSpec& pb,
                                              const LocalConnectionData& data,
                                              double step, std::string name) {
  EhresmannConnection conn;
  conn.name = std::move(name);
  conn.eval = [pb, data, step](const BundlePoint& p, const TangentAtP& w) {
    Vec total = Vec::Zero(pb.group.algebra_dim);
    for (int i = 0; i < static_cast<int>(pb.base.charts.size()); ++i) {
      if (!pb.base.in_overlap(p.chart, i, p.base)) continue;
      const double lam = manifold::weight(pb.base, i, p.chart, p.base);
      if (lam == 0.0) continue;
      BundlePoint pi = bundle::to_chart(pb, p, i);
      TangentAtP wi = bundle::transport_tangent(pb, p, w, i, step);
      Mat a = data(i, pi.base, wi.base_comps);
      Vec horiz =
          lie::algebra_coords(pb.group, Mat(pi.fiber.inverse() * a * pi.fiber));
      total += lam * (horiz + wi.fiber_comps);
    }
    return total;
  };
  return conn;
}

/// Unique lift with gamma(lift) = 0: cancel the connection value of the
/// horizontal candidate through the fiber slot.
inline TangentAtP horizontal_lift(const PrincipalBundleSpec& pb,
                                  const EhresmannConnection& conn,
                                  const BundlePoint& p, const Vec& v) {
  TangentAtP flat{v, Vec::Zero(pb.group.algebra_dim)};
  return {v, Vec(-conn.eval(p, flat))};
}

/// Both connection axioms plus chart independence of the evaluation.
inline CheckReport check_connection(const PrincipalBundleSpec& pb,
                                    const EhresmannConnection& conn,
                                    SampleStream& rng, int samples,
                                    const Tolerances& tol) {
  CheckReport report;
  auto& vertical = report.add(conn.name + ": vertical", refs::connection_vertical,
                              tol.get("exact"));
  auto& equivariant =
      report.add(conn.name + ": equivariance", refs::connection_equivariant,
                 tol.get("pseudotensorial"));
  auto& consistent = report.add(
      conn.name + ": chart-consistency",
      "connection value is independent of the evaluating trivialization",
      tol.get("tangent_roundtrip"));
  const double step = tol.get("step_pushforward");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    Vec x = lie::sample_algebra(pb.group, rng);
    vertical.absorb(
        (conn.eval(p, bundle::fundamental_field(pb, p, x)) - x).norm());

    TangentAtP w = bundle::sample_tangent(pb, rng);
    Mat h = lie::sample_group(pb.group, rng);
    Vec lhs = conn.eval(bundle::right_act(p, h),
                        bundle::push_right_act(pb, p, w, h, step));
    Vec rhs = lie::Ad(pb.group, Mat(h.inverse()), conn.eval(p, w));
    equivariant.absorb((lhs - rhs).norm());

    for (int j = 0; j < static_cast<int>(pb.base.charts.size()); ++j) {
      if (j == p.chart || !pb.base.in_overlap(p.chart, j, p.base)) continue;
      Vec other = conn.eval(bundle::to_chart(pb, p, j),
                            bundle::transport_tangent(pb, p, w, j, step));
      consistent.absorb((other - conn.eval(p, w)).norm());
    }
  }
  return report;
}

/// Canonical 1-form of a frame-type bundle: the frame the point stands for
/// (the chart's reference frame composed with the fiber coordinate) reads
/// the projected vector.
inline SolderingForm fundamental_form(const PrincipalBundleSpec& pb) {
  SolderingForm theta;
  theta.name = "fundamental-form";
  theta.model_dim = pb.base.dim;
  theta.eval = [pb](const BundlePoint& p, const TangentAtP& w) {
    Mat frame = bundle::reference_frame(pb, p.chart, p.base) * p.fiber;
    return Vec(frame.inverse() * w.base_comps);
  };
  return theta;
}

inline forms::ModuleValuedForm as_form(const SolderingForm& theta) {
  forms::ModuleValuedForm f;
  f.name = theta.name;
  f.degree = 1;
  f.eval = [theta](const BundlePoint& p, const std::vector<TangentAtP>& ws) {
    return theta.eval(p, ws[0]);
  };
  return f;
}

/// Pointwise matrix of a soldering candidate on horizontal basis lifts.
inline Mat soldering_matrix(const PrincipalBundleSpec& pb,
                            const SolderingForm& theta, const BundlePoint& p) {
  Mat m(theta.model_dim, pb.base.dim);
  for (int k = 0; k < pb.base.dim; ++k) {
    Vec ek = Vec::Zero(pb.base.dim);
    ek[k] = 1.0;
    m.col(k) = theta.eval(p, TangentAtP{ek, Vec::Zero(pb.group.algebra_dim)});
  }
  return m;
}

/// Tensoriality of the model type plus pointwise surjectivity.
inline CheckReport check_soldering(const PrincipalBundleSpec& pb,
                                   const forms::ModuleTarget& target,
                                   const SolderingForm& theta, SampleStream& rng,
                                   int samples, const Tolerances& tol) {
  CheckReport report =
      forms::check_tensorial(pb, as_form(theta), target, rng, samples, tol);
  auto& onto = report.add(theta.name + ": surjectivity",
                          refs::soldering_surjective, tol.get("sigma_min"));
  auto& consistent = report.add(
      theta.name + ": chart-consistency",
      "form value is independent of the evaluating trivialization",
      tol.get("tangent_roundtrip"));
  const double step = tol.get("step_pushforward");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    const double sigma = smallest_singular_value(soldering_matrix(pb, theta, p));
    onto.absorb(std::max(0.0, 2.0 * tol.get("sigma_min") - sigma));

    TangentAtP w = bundle::sample_tangent(pb, rng);
    for (int j = 0; j < static_cast<int>(pb.base.charts.size()); ++j) {
      if (j == p.chart || !pb.base.in_overlap(p.chart, j, p.base)) continue;
      Vec other = theta.eval(bundle::to_chart(pb, p, j),
                             bundle::transport_tangent(pb, p, w, j, step));
      consistent.absorb((other - theta.eval(p, w)).norm());
    }
  }
  return report;
}

/// An identification of the associated model-space bundle with the tangent
/// bundle, over the identity of the base: mutually inverse linear bundle
/// maps. iso consumes canonical associated elements and produces tangent
/// components in the element's chart; iso_inverse is its two-sided inverse.
struct GeometrizationWitness {
  std::string name;
  std::function<Vec(const AssociatedElement&)> iso;
  std::function<AssociatedElement(int, const Vec&, const Vec&)> iso_inverse;
};

/// For a frame bundle the associated plane bundle is the tangent bundle on
/// the nose: a canonical element's value already consists of tangent
/// components in its canonical chart.
inline GeometrizationWitness tautological_witness(const PrincipalBundleSpec& pb) {
  GeometrizationWitness w;
  w.name = "tautological";
  const int n = pb.group.matrix_dim;
  auto carrier = bundle::linear_carrier(lie::standard_representation(n), "plane");
  w.iso = [](const AssociatedElement& e) { return e.value; };
  w.iso_inverse = [pb, carrier, n](int chart, const Vec& x, const Vec& v) {
    return bundle::associate(pb, carrier,
                             BundlePoint{chart, x, Mat::Identity(n, n)}, v);
  };
  return w;
}

/// The soldering form a witness induces: read the projected vector through
/// the inverse identification and gauge the value to the given frame.
inline SolderingForm witness_to_soldering(const PrincipalBundleSpec& pb,
                                          const forms::ModuleTarget& target,
                                          const GeometrizationWitness& witness) {
  SolderingForm theta;
  theta.name = witness.name + "-soldering";
  theta.model_dim = target.rep.dim;
  theta.eval = [pb, target, witness](const BundlePoint& p, const TangentAtP& w) {
    AssociatedElement e = witness.iso_inverse(p.chart, p.base, w.base_comps);
    BundlePoint p0 = bundle::to_chart(pb, p, e.chart);
    return Vec(target.rep.matrix(p0.fiber).inverse() * e.value);
  };
  return theta;
}

/// The witness a soldering form induces. Inverting the pointwise matrix is
/// exactly where surjectivity is consumed; a degenerate candidate is
/// rejected here with the offending residual.
inline GeometrizationWitness soldering_to_witness(const PrincipalBundleSpec& pb,
                                                  const forms::ModuleTarget& target,
                                                  const SolderingForm& theta,
                                                  const Tolerances& tol) {
  GeometrizationWitness w;
  w.name = theta.name + "-witness";
  auto carrier = bundle::linear_carrier(target.rep, target.name);
  const int n = pb.group.matrix_dim;
  const double floor = tol.get("det_min");
  w.iso_inverse = [pb, carrier, theta, n](int chart, const Vec& x, const Vec& v) {
    BundlePoint p{chart, x, Mat::Identity(n, n)};
    return bundle::associate(pb, carrier, p,
                             theta.eval(p, TangentAtP{v, Vec::Zero(pb.group.algebra_dim)}));
  };
  w.iso = [pb, theta, floor, n](const AssociatedElement& e) {
    BundlePoint p{e.chart, e.base, Mat::Identity(n, n)};
    Mat m = soldering_matrix(pb, theta, p);
    const double det = std::abs(m.determinant());
    if (det < floor)
      throw VerificationError("soldering-inversion", refs::soldering_surjective,
                              det);
    return Vec(m.inverse() * e.value);
  };
  return w;
}

/// Mutually inverse, linear, and chart-consistent.
inline CheckReport check_witness(const PrincipalBundleSpec& pb,
                                 const bundle::HModuleCarrier& carrier,
                                 const GeometrizationWitness& witness,
                                 SampleStream& rng, int samples,
                                 const Tolerances& tol) {
  CheckReport report;
  auto& roundtrip = report.add(witness.name + ": two-sided inverse",
                               refs::witness_soldering_roundtrip,
                               tol.get("exact"));
  auto& linear = report.add(witness.name + ": linearity",
                            "identification is linear on fibers",
                            tol.get("exact"));
  auto& charts = report.add(witness.name + ": chart-consistency",
                            "identification commutes with chart transitions",
                            tol.get("tangent_roundtrip"));
  const double step = tol.get("step_jacobian");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    Vec v = rng.vector(pb.base.dim, 2.0);
    AssociatedElement e = witness.iso_inverse(p.chart, p.base, v);
    Vec back = witness.iso(e);
    Vec v0 = manifold::push_tangent(pb.base, p.chart, e.chart, p.base, v, step);
    roundtrip.absorb((back - v0).norm());

    Vec v2 = rng.vector(pb.base.dim, 2.0);
    const double a = rng.symmetric(2.0), b = rng.symmetric(2.0);
    AssociatedElement ea = witness.iso_inverse(p.chart, p.base, Vec(a * v + b * v2));
    AssociatedElement eb = witness.iso_inverse(p.chart, p.base, v2);
    linear.absorb(
        (ea.value - a * e.value - b * eb.value).norm());

    for (int j = 0; j < static_cast<int>(pb.base.charts.size()); ++j) {
      if (j == p.chart || !pb.base.in_overlap(p.chart, j, p.base)) continue;
      Vec xj = manifold::change_chart(pb.base, p.chart, j, p.base);
      Vec vj = manifold::push_tangent(pb.base, p.chart, j, p.base, v, step);
      AssociatedElement ej = witness.iso_inverse(j, xj, vj);
      charts.absorb(bundle::associated_distance(pb, carrier, e, ej));
    }
  }
  return report;
}

}  // namespace cartankit::connection

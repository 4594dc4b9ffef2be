#pragma once

#include "cartankit/connection.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cartankit::cartan {

using bundle::BundlePoint;
using bundle::PrincipalBundleSpec;
using bundle::TangentAtP;
using connection::EhresmannConnection;
using connection::SolderingForm;

/// Model data for a Cartan geometry: the structure group H, its action on
/// a complement of its algebra, and the bracket of the enlarged algebra in
/// split coordinates (H-algebra coordinates first, complement second).
struct ModelPair {
  std::string name;
  lie::GroupSpec h;
  lie::Representation rho;  // H acting on the complement
  int complement_dim = 0;
  std::function<Vec(const Vec&, const Vec&)> bracket;  // on split coordinates
};

inline int total_dim(const ModelPair& mp) {
  return mp.h.algebra_dim + mp.complement_dim;
}

inline Vec h_part(const ModelPair& mp, const Vec& w) {
  return w.head(mp.h.algebra_dim);
}

inline Vec complement_part(const ModelPair& mp, const Vec& w) {
  return w.tail(mp.complement_dim);
}

inline Vec embed_h(const ModelPair& mp, const Vec& x) {
  Vec w = Vec::Zero(total_dim(mp));
  w.head(mp.h.algebra_dim) = x;
  return w;
}

inline Vec embed_complement(const ModelPair& mp, const Vec& u) {
  Vec w = Vec::Zero(total_dim(mp));
  w.tail(mp.complement_dim) = u;
  return w;
}

/// Action of H on the enlarged algebra: adjoint on its own algebra, the
/// complement representation on the rest. Block diagonal because the
/// splitting is reductive.
inline Mat h_action(const ModelPair& mp, const Mat& a) {
  Mat m = Mat::Zero(total_dim(mp), total_dim(mp));
  m.topLeftCorner(mp.h.algebra_dim, mp.h.algebra_dim) = lie::Ad_matrix(mp.h, a);
  m.bottomRightCorner(mp.complement_dim, mp.complement_dim) = mp.rho.matrix(a);
  return m;
}

/// Semidirect model: the complement is an abelian ideal, so the bracket is
/// [(X,u),(Y,v)] = ([X,Y], drho(X)v - drho(Y)u).
inline ModelPair semidirect_model(lie::GroupSpec h, lie::Representation rho,
                                  int complement_dim, std::string name) {
  ModelPair mp;
  mp.name = std::move(name);
  mp.h = std::move(h);
  mp.rho = std::move(rho);
  mp.complement_dim = complement_dim;
  mp.bracket = [mp_h = mp.h, mp_rho = mp.rho,
                n = complement_dim](const Vec& w1, const Vec& w2) {
    const int k = mp_h.algebra_dim;
    Vec x = w1.head(k), y = w2.head(k);
    Vec u = w1.tail(n), v = w2.tail(n);
    Vec out(k + n);
    out.head(k) = lie::bracket(mp_h, x, y);
    out.tail(n) = mp_rho.differential(lie::algebra_matrix(mp_h, x)) * v -
                  mp_rho.differential(lie::algebra_matrix(mp_h, y)) * u;
    return out;
  };
  return mp;
}

/// Rigid motions of the plane: orthogonal part plus translations.
inline ModelPair euclidean_model(int n) {
  return semidirect_model(lie::orthogonal(n), lie::standard_representation(n), n,
                          "euclidean");
}

/// Full affine transformations: general linear part plus translations.
inline ModelPair affine_model(int n) {
  return semidirect_model(lie::gl(n), lie::standard_representation(n), n,
                          "affine");
}

/// Split coordinates of the rotation-group algebra in dimension three:
/// (z-rotation coordinate, two complement coordinates).
inline Mat embed_rotation_coords(const Vec& w) {
  Mat m = Mat::Zero(3, 3);
  m(0, 1) = -w[0];
  m(1, 0) = w[0];
  m(0, 2) = w[1];
  m(2, 0) = -w[1];
  m(1, 2) = w[2];
  m(2, 1) = -w[2];
  return m;
}

inline Vec split_rotation_coords(const Mat& m) {
  Vec w(3);
  w << m(1, 0), m(0, 2), m(1, 2);
  return w;
}

/// Curved model with non-abelian complement: the bracket is inherited from
/// the three-dimensional rotation algebra through the splitting above.
inline ModelPair rotation_sphere_model() {
  ModelPair mp;
  mp.name = "rotation-sphere";
  mp.h = lie::so2();
  mp.rho = lie::standard_representation(2);
  mp.complement_dim = 2;
  mp.bracket = [](const Vec& w1, const Vec& w2) {
    Mat a = embed_rotation_coords(w1), b = embed_rotation_coords(w2);
    return split_rotation_coords(Mat(a * b - b * a));
  };
  return mp;
}

/// Enlarged-algebra-valued 1-form on the total space: the assembled object
/// whose axioms (fundamental reproduction, equivariance, pointwise linear
/// isomorphism) are verified by check_cartan.
struct CartanConnection {
  std::string name;
  ModelPair model;
  std::function<Vec(const BundlePoint&, const TangentAtP&)> eval;
};

/// Sum of a principal connection and a soldering form in split coordinates.
inline CartanConnection assemble_cartan(const PrincipalBundleSpec& pb,
                                        const ModelPair& model,
                                        const EhresmannConnection& conn,
                                        const SolderingForm& theta,
                                        std::string name) {
  if (model.h.algebra_dim != pb.group.algebra_dim ||
      model.h.matrix_dim != pb.group.matrix_dim)
    throw ConfigError("model structure group does not match the bundle group");
  if (theta.model_dim != model.complement_dim)
    throw ConfigError("soldering values do not match the model complement");
  if (model.complement_dim != pb.base.dim)
    throw ConfigError("model complement dimension does not match the base");
  CartanConnection cc;
  cc.name = std::move(name);
  cc.model = model;
  cc.eval = [model, conn, theta](const BundlePoint& p, const TangentAtP& w) {
    Vec out(total_dim(model));
    out.head(model.h.algebra_dim) = conn.eval(p, w);
    out.tail(model.complement_dim) = theta.eval(p, w);
    return out;
  };
  return cc;
}

inline EhresmannConnection project_connection(const CartanConnection& cc) {
  EhresmannConnection conn;
  conn.name = cc.name + "-connection";
  conn.eval = [cc](const BundlePoint& p, const TangentAtP& w) {
    return h_part(cc.model, cc.eval(p, w));
  };
  return conn;
}

inline SolderingForm project_soldering(const CartanConnection& cc) {
  SolderingForm theta;
  theta.name = cc.name + "-soldering";
  theta.model_dim = cc.model.complement_dim;
  theta.eval = [cc](const BundlePoint& p, const TangentAtP& w) {
    return complement_part(cc.model, cc.eval(p, w));
  };
  return theta;
}

/// Matrix of the pointwise linear map from the tangent space of the total
/// space (base components plus fiber components) to the enlarged algebra.
inline Mat cartan_matrix(const PrincipalBundleSpec& pb,
                         const CartanConnection& cc, const BundlePoint& p) {
  const int nb = pb.base.dim, na = pb.group.algebra_dim;
  Mat m(total_dim(cc.model), nb + na);
  for (int k = 0; k < nb; ++k) {
    Vec ek = Vec::Zero(nb);
    ek[k] = 1.0;
    m.col(k) = cc.eval(p, TangentAtP{ek, Vec::Zero(na)});
  }
  for (int k = 0; k < na; ++k) {
    Vec ek = Vec::Zero(na);
    ek[k] = 1.0;
    m.col(nb + k) = cc.eval(p, TangentAtP{Vec::Zero(nb), ek});
  }
  return m;
}

/// All defining axioms plus chart independence of the evaluation.
inline CheckReport check_cartan(const PrincipalBundleSpec& pb,
                                const CartanConnection& cc, SampleStream& rng,
                                int samples, const Tolerances& tol) {
  CheckReport report;
  auto& fundamental = report.add(cc.name + ": fundamental",
                                 refs::cartan_fundamental, tol.get("exact"));
  auto& equivariant = report.add(cc.name + ": equivariance",
                                 refs::cartan_equivariant,
                                 tol.get("pseudotensorial"));
  auto& iso = report.add(cc.name + ": isomorphism", refs::cartan_iso,
                         tol.get("sigma_min"));
  auto& consistent = report.add(
      cc.name + ": chart-consistency",
      "form value is independent of the evaluating trivialization",
      tol.get("tangent_roundtrip"));
  const double step = tol.get("step_pushforward");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    Vec x = lie::sample_algebra(pb.group, rng);
    fundamental.absorb((cc.eval(p, bundle::fundamental_field(pb, p, x)) -
                        embed_h(cc.model, x))
                           .norm());

    TangentAtP w = bundle::sample_tangent(pb, rng);
    Mat h = lie::sample_group(pb.group, rng);
    Vec lhs = cc.eval(bundle::right_act(p, h),
                      bundle::push_right_act(pb, p, w, h, step));
    Vec rhs = h_action(cc.model, Mat(h.inverse())) * cc.eval(p, w);
    equivariant.absorb((lhs - rhs).norm());

    const double sigma = smallest_singular_value(cartan_matrix(pb, cc, p));
    iso.absorb(std::max(0.0, 2.0 * tol.get("sigma_min") - sigma));

    for (int j = 0; j < static_cast<int>(pb.base.charts.size()); ++j) {
      if (j == p.chart || !pb.base.in_overlap(p.chart, j, p.base)) continue;
      Vec other = cc.eval(bundle::to_chart(pb, p, j),
                          bundle::transport_tangent(pb, p, w, j, step));
      consistent.absorb((other - cc.eval(p, w)).norm());
    }
  }
  return report;
}

/// Agreement of the split parts with given ingredients.
inline CheckReport check_cartan_projections(const PrincipalBundleSpec& pb,
                                            const CartanConnection& cc,
                                            const EhresmannConnection& conn,
                                            const SolderingForm& theta,
                                            SampleStream& rng, int samples,
                                            const Tolerances& tol) {
  CheckReport report;
  auto& rec = report.add(cc.name + ": split recovery", refs::cartan_projection,
                         tol.get("exact"));
  auto gamma = project_connection(cc);
  auto sold = project_soldering(cc);
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    TangentAtP w = bundle::sample_tangent(pb, rng);
    rec.absorb((gamma.eval(p, w) - conn.eval(p, w)).norm());
    rec.absorb((sold.eval(p, w) - theta.eval(p, w)).norm());
  }
  return report;
}

/// Curvature on a pair of tangents, via extensions with constant base
/// components and left-invariant fiber components: for such extensions the
/// only surviving commutator is the fiber bracket, so
/// curv(V,W) = d_V(omega(W)) - d_W(omega(V)) - omega((0,[xi,eta]))
///             + [omega(V), omega(W)].
inline Vec curvature(const PrincipalBundleSpec& pb, const CartanConnection& cc,
                     const BundlePoint& p, const TangentAtP& V,
                     const TangentAtP& W, double step) {
  auto along = [&](const TangentAtP& dir, const TangentAtP& arg) {
    Mat xi_hat = lie::algebra_matrix(pb.group, dir.fiber_comps);
    return fd::derivative(
        [&](double t) {
          BundlePoint pt{p.chart, Vec(p.base + t * dir.base_comps),
                         Mat(p.fiber * lie::exp_matrix(pb.group, Mat(t * xi_hat)))};
          return cc.eval(pt, arg);
        },
        step);
  };
  Vec mixed = cc.eval(
      p, bundle::fundamental_field(
             pb, p, lie::bracket(pb.group, V.fiber_comps, W.fiber_comps)));
  return Vec(along(V, W) - along(W, V) - mixed +
             cc.model.bracket(cc.eval(p, V), cc.eval(p, W)));
}

/// Vanishing curvature on random tangent pairs.
inline CheckReport check_flat(const PrincipalBundleSpec& pb,
                              const CartanConnection& cc, SampleStream& rng,
                              int samples, const Tolerances& tol) {
  CheckReport report;
  auto& flat = report.add(cc.name + ": flatness", refs::curvature_flat,
                          tol.get("curvature"));
  const double step = tol.get("step_curvature");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    flat.absorb(curvature(pb, cc, p, bundle::sample_tangent(pb, rng),
                          bundle::sample_tangent(pb, rng), step)
                    .norm());
  }
  return report;
}

/// Curvature transforms by the model action and kills vertical arguments.
inline CheckReport check_curvature_tensorial(const PrincipalBundleSpec& pb,
                                             const CartanConnection& cc,
                                             SampleStream& rng, int samples,
                                             const Tolerances& tol) {
  CheckReport report;
  auto& equivariant =
      report.add(cc.name + ": curvature equivariance",
                 refs::curvature_equivariant, tol.get("curvature_coarse"));
  auto& horizontal = report.add(
      cc.name + ": curvature horizontality",
      "curvature vanishes whenever one argument is vertical",
      tol.get("curvature"));
  const double step = tol.get("step_curvature");
  const double push = tol.get("step_pushforward");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    TangentAtP v = bundle::sample_tangent(pb, rng);
    TangentAtP w = bundle::sample_tangent(pb, rng);
    Mat h = lie::sample_group(pb.group, rng);
    Vec lhs = curvature(pb, cc, bundle::right_act(p, h),
                        bundle::push_right_act(pb, p, v, h, push),
                        bundle::push_right_act(pb, p, w, h, push), step);
    Vec rhs = h_action(cc.model, Mat(h.inverse())) * curvature(pb, cc, p, v, w, step);
    equivariant.absorb((lhs - rhs).norm());

    TangentAtP vert =
        bundle::fundamental_field(pb, p, lie::sample_algebra(pb.group, rng));
    horizontal.absorb(curvature(pb, cc, p, vert, w, step).norm());
  }
  return report;
}

/// Rotation taking the unit vector a to the unit vector b; smooth wherever
/// the two are not antipodal.
inline Mat rotation_between(const Vec& a, const Vec& b) {
  Vec w(3);
  w << a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
      a[0] * b[1] - a[1] * b[0];
  Mat wh = lie::hat3(w);
  return Mat(Mat::Identity(3, 3) + wh + wh * wh / (1.0 + a.dot(b)));
}

/// Smooth local sections of the rotation group over the two stereographic
/// charts: sigma(x) maps the third coordinate vector to the embedded point.
/// Chart 0 avoids the north pole, so its section rotates away from the
/// south pole (composed with a half-turn to keep the projection right);
/// chart 1 avoids the south pole and rotates away from the north pole.
inline Mat rotation_section(int chart, const Vec& x) {
  Vec n = manifold::sphere_point(chart, x);
  Vec e3(3);
  e3 << 0.0, 0.0, 1.0;
  if (chart == 0) {
    Mat half_turn = Mat::Zero(3, 3);
    half_turn(0, 0) = 1.0;
    half_turn(1, 1) = -1.0;
    half_turn(2, 2) = -1.0;
    return Mat(rotation_between(Vec(-e3), n) * half_turn);
  }
  return rotation_between(e3, n);
}

/// The rotation group as a circle bundle over the sphere, trivialized by
/// the sections above; the transitions are the stabilizer blocks of
/// sigma_i^T sigma_j.
inline PrincipalBundleSpec homogeneous_rotation_bundle() {
  PrincipalBundleSpec pb;
  pb.name = "rotations-over-sphere";
  pb.base = manifold::sphere_atlas();
  pb.group = lie::so2();
  pb.transition = [atlas = pb.base](int i, int j, const Vec& xi) {
    if (i == j) return Mat(Mat::Identity(2, 2));
    Vec xj = manifold::change_chart(atlas, i, j, xi);
    Mat t = rotation_section(i, xi).transpose() * rotation_section(j, xj);
    return Mat(t.topLeftCorner(2, 2));
  };
  return pb;
}

/// Left-invariant form of the rotation group written in the section-induced
/// trivializations: for u = sigma(x) iota(a) the value on a tangent with
/// components (v, xi) is iota(a)^T (sigma^T d sigma)(v) iota(a) + iota(xi),
/// split into (stabilizer, complement) coordinates.
inline CartanConnection maurer_cartan_connection(const PrincipalBundleSpec& pb,
                                                 double step) {
  CartanConnection cc;
  cc.name = "invariant-form";
  cc.model = rotation_sphere_model();
  cc.eval = [pb, step](const BundlePoint& p, const TangentAtP& w) {
    Mat sigma = rotation_section(p.chart, p.base);
    Mat d = fd::derivative(
        [&](double t) {
          return Mat(sigma.transpose() *
                     rotation_section(p.chart, Vec(p.base + t * w.base_comps)));
        },
        step);
    Mat iota = Mat::Identity(3, 3);
    iota.topLeftCorner(2, 2) = p.fiber;
    Mat xi3 = Mat::Zero(3, 3);
    xi3.topLeftCorner(2, 2) = lie::algebra_matrix(pb.group, w.fiber_comps);
    return split_rotation_coords(Mat(iota.transpose() * d * iota + xi3));
  };
  return cc;
}

}  // namespace cartankit::cartan

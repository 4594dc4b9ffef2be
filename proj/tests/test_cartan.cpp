#include "cartankit/cartan.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace cartankit;
using namespace cartankit::bundle;
using namespace cartankit::cartan;

namespace {

Mat turn_quarter() {
  Mat j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

// Independent hand formula for the plane models: the orthogonal/general
// linear part brackets as matrices, the complement part is X v - Y u.
Vec semidirect_oracle(const lie::GroupSpec& h, const Vec& w1, const Vec& w2) {
  const int k = h.algebra_dim;
  Mat x = lie::algebra_matrix(h, Vec(w1.head(k)));
  Mat y = lie::algebra_matrix(h, Vec(w2.head(k)));
  Vec u = w1.tail(2), v = w2.tail(2);
  Vec out(k + 2);
  out.head(k) = lie::algebra_coords(h, Mat(x * y - y * x));
  out.tail(2) = x * v - y * u;
  return out;
}

// Independent hand formula for the curved model: the complement brackets
// back into the stabilizer with coefficient u1 v2 - u2 v1.
Vec rotation_oracle(const Vec& w1, const Vec& w2) {
  Vec u = w1.tail(2), v = w2.tail(2);
  Vec out(3);
  out[0] = u[0] * v[1] - u[1] * v[0];
  out.tail(2) = w1[0] * turn_quarter() * v - w2[0] * turn_quarter() * u;
  return out;
}

CartanConnection orthonormal_sphere_cartan(const PrincipalBundleSpec& pb,
                                           const Tolerances& tol) {
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();
  const double step = tol.get("step_metric");
  auto conn = connection::connection_from_local(
      pb,
      connection::orthonormal_local_from_frame(
          atlas, metric, connection::levi_civita_local(atlas, metric, step),
          step),
      "orthonormal-metric-connection");
  return assemble_cartan(pb, euclidean_model(2), conn,
                         connection::fundamental_form(pb), "sphere-euclidean");
}

}  // namespace

TEST_CASE("model brackets match hand formulas and satisfy the Jacobi identity") {
  SampleStream rng(201);
  std::vector<ModelPair> models = {euclidean_model(2), affine_model(2),
                                   rotation_sphere_model()};
  for (const auto& mp : models) {
    const int n = total_dim(mp);
    for (int s = 0; s < 50; ++s) {
      Vec a = rng.vector(n, 1.0), b = rng.vector(n, 1.0), c = rng.vector(n, 1.0);
      Vec jacobi = mp.bracket(a, mp.bracket(b, c)) +
                   mp.bracket(b, mp.bracket(c, a)) +
                   mp.bracket(c, mp.bracket(a, b));
      CHECK(jacobi.norm() < 1e-12);
      CHECK((mp.bracket(a, b) + mp.bracket(b, a)).norm() < 1e-12);

      Vec oracle = mp.name == "rotation-sphere"
                       ? rotation_oracle(a, b)
                       : semidirect_oracle(mp.h, a, b);
      CHECK((mp.bracket(a, b) - oracle).norm() < 1e-10);
    }
  }
}

TEST_CASE("the stabilizer action preserves the model bracket") {
  SampleStream rng(202);
  for (const auto& mp :
       {euclidean_model(2), affine_model(2), rotation_sphere_model()}) {
    for (int s = 0; s < 40; ++s) {
      Mat a = lie::sample_group(mp.h, rng);
      Mat m = h_action(mp, a);
      Vec w1 = rng.vector(total_dim(mp), 1.0), w2 = rng.vector(total_dim(mp), 1.0);
      CHECK((m * mp.bracket(w1, w2) - mp.bracket(Vec(m * w1), Vec(m * w2)))
                .norm() < 1e-10);
    }
  }
}

TEST_CASE("the curved model action agrees with conjugation in the embedding") {
  SampleStream rng(203);
  auto mp = rotation_sphere_model();
  for (int s = 0; s < 40; ++s) {
    Mat a2 = lie::sample_group(mp.h, rng);
    Mat a3 = Mat::Identity(3, 3);
    a3.topLeftCorner(2, 2) = a2;
    Vec w = rng.vector(3, 1.0);
    Vec via_embedding = split_rotation_coords(
        Mat(a3 * embed_rotation_coords(w) * a3.transpose()));
    CHECK((h_action(mp, a2) * w - via_embedding).norm() < 1e-12);
  }
}

TEST_CASE("split projections invert the embeddings") {
  auto mp = euclidean_model(2);
  Vec x(1), u(2);
  x << 0.7;
  u << -1.2, 0.4;
  CHECK((h_part(mp, embed_h(mp, x)) - x).norm() == 0.0);
  CHECK((complement_part(mp, embed_complement(mp, u)) - u).norm() == 0.0);
  CHECK(complement_part(mp, embed_h(mp, x)).norm() == 0.0);
  CHECK(h_part(mp, embed_complement(mp, u)).norm() == 0.0);
}

TEST_CASE("assembly guards reject mismatched ingredients") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto pb = frame_bundle(atlas, tol.get("step_jacobian"));
  auto conn = connection::connection_from_local(
      pb,
      connection::levi_civita_local(atlas, manifold::round_sphere_metric(),
                                    tol.get("step_metric")),
      "metric-connection");
  auto theta = connection::fundamental_form(pb);

  CHECK_THROWS_AS(
      assemble_cartan(pb, rotation_sphere_model(), conn, theta, "bad"),
      ConfigError);
  connection::SolderingForm wide = theta;
  wide.model_dim = 3;
  CHECK_THROWS_AS(assemble_cartan(pb, affine_model(2), conn, wide, "bad"),
                  ConfigError);
  CHECK_NOTHROW(assemble_cartan(pb, affine_model(2), conn, theta, "good"));
}

TEST_CASE("assembled metric form is a Cartan connection in both gauges") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();
  const double step = tol.get("step_metric");

  auto frames = frame_bundle(atlas, tol.get("step_jacobian"));
  auto frame_conn = connection::connection_from_local(
      frames, connection::levi_civita_local(atlas, metric, step),
      "metric-connection");
  auto frame_cc = assemble_cartan(frames, affine_model(2), frame_conn,
                                  connection::fundamental_form(frames),
                                  "sphere-affine");
  SampleStream rng(211);
  auto report = check_cartan(frames, frame_cc, rng, 100, tol);
  for (const auto& rec : report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }

  auto on = orthonormal_frame_bundle(atlas, metric, step);
  auto on_cc = orthonormal_sphere_cartan(on, tol);
  SampleStream rng2(212);
  auto report2 = check_cartan(on, on_cc, rng2, 100, tol);
  for (const auto& rec : report2.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }

  SampleStream rng3(213);
  auto frame_theta = connection::fundamental_form(frames);
  CHECK(check_cartan_projections(frames, frame_cc, frame_conn, frame_theta,
                                 rng3, 60, tol)
            .all_pass());
}

TEST_CASE("flat bases have vanishing curvature") {
  Tolerances tol;
  const double step = tol.get("step_metric");

  auto torus = manifold::torus_atlas();
  auto torus_pb = frame_bundle(torus, tol.get("step_jacobian"));
  auto torus_cc = assemble_cartan(
      torus_pb, affine_model(2),
      connection::connection_from_local(
          torus_pb,
          connection::levi_civita_local(torus, manifold::flat_torus_metric(),
                                        step),
          "flat-connection"),
      connection::fundamental_form(torus_pb), "torus-affine");
  SampleStream rng(221);
  auto report = check_flat(torus_pb, torus_cc, rng, 60, tol);
  INFO(report.find("torus-affine: flatness")->max_residual);
  CHECK(report.all_pass());

  auto plane = manifold::euclidean_atlas(2);
  auto plane_pb = frame_bundle(plane, tol.get("step_jacobian"));
  auto plane_cc = assemble_cartan(
      plane_pb, affine_model(2),
      connection::connection_from_local(
          plane_pb,
          connection::levi_civita_local(plane, manifold::euclidean_metric(2),
                                        step),
          "flat-connection"),
      connection::fundamental_form(plane_pb), "plane-affine");
  SampleStream rng2(222);
  CHECK(check_flat(plane_pb, plane_cc, rng2, 60, tol).all_pass());
}

TEST_CASE("round sphere curvature matches the closed form and has no torsion") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();
  auto pb = orthonormal_frame_bundle(atlas, metric, tol.get("step_metric"));
  auto cc = orthonormal_sphere_cartan(pb, tol);
  auto gamma = project_connection(cc);

  SampleStream rng(231);
  const double step = tol.get("step_curvature");
  double worst_gauss = 0.0, worst_torsion = 0.0;
  for (int s = 0; s < 40; ++s) {
    const int chart = static_cast<int>(rng.integer(2));
    Vec x = manifold::sample_chart_point(atlas, chart, rng, 0.3).coords;
    BundlePoint p{chart, x, lie::rotation2(rng.symmetric(3.0))};
    Vec e1(2), e2(2);
    e1 << 1.0, 0.0;
    e2 << 0.0, 1.0;
    TangentAtP l1 = connection::horizontal_lift(pb, gamma, p, e1);
    TangentAtP l2 = connection::horizontal_lift(pb, gamma, p, e2);
    Vec om = curvature(pb, cc, p, l1, l2, step);
    // Unit curvature in the orthonormal gauge: the stabilizer coordinate on
    // coordinate lifts equals minus the conformal factor squared, and the
    // complement part (the torsion) vanishes.
    const double s2 = metric.value(chart, x)(0, 0);
    worst_gauss = std::max(worst_gauss, std::abs(om[0] + s2));
    worst_torsion = std::max(worst_torsion, om.tail(2).norm());
  }
  INFO("gauss residual " << worst_gauss << " torsion " << worst_torsion);
  CHECK(worst_gauss < tol.get("curvature_coarse"));
  CHECK(worst_torsion < tol.get("curvature"));
}

TEST_CASE("curvature is equivariant and kills vertical arguments") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();
  auto pb = orthonormal_frame_bundle(atlas, metric, tol.get("step_metric"));
  auto cc = orthonormal_sphere_cartan(pb, tol);
  SampleStream rng(241);
  auto report = check_curvature_tensorial(pb, cc, rng, 40, tol);
  for (const auto& rec : report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }
}

TEST_CASE("rotation-group sections and transitions are consistent") {
  auto atlas = manifold::sphere_atlas();
  auto pb = homogeneous_rotation_bundle();
  SampleStream rng(251);
  Vec e3(3);
  e3 << 0.0, 0.0, 1.0;
  for (int s = 0; s < 60; ++s) {
    const int chart = static_cast<int>(rng.integer(2));
    Vec x = manifold::sample_chart_point(atlas, chart, rng, 0.3).coords;
    Mat sigma = rotation_section(chart, x);
    CHECK((sigma * sigma.transpose() - Mat::Identity(3, 3)).norm() < 1e-12);
    CHECK(std::abs(sigma.determinant() - 1.0) < 1e-12);
    CHECK((sigma * e3 - manifold::sphere_point(chart, x)).norm() < 1e-12);

    if (atlas.in_overlap(chart, 1 - chart, x)) {
      Vec y = manifold::change_chart(atlas, chart, 1 - chart, x);
      Mat t = rotation_section(chart, x).transpose() *
              rotation_section(1 - chart, y);
      CHECK(std::abs(t(2, 2) - 1.0) < 1e-12);
      CHECK((t.col(2) - e3).norm() < 1e-12);
      CHECK((t.row(2).transpose() - e3).norm() < 1e-12);
    }
  }

  SampleStream rng2(252);
  Tolerances tol;
  auto report = check_principal_bundle(pb, rng2, 120, tol);
  for (const auto& rec : report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }
}

TEST_CASE("the invariant form of the rotation group is a flat Cartan connection") {
  Tolerances tol;
  auto pb = homogeneous_rotation_bundle();
  auto cc = maurer_cartan_connection(pb, tol.get("step_pushforward"));

  SampleStream rng(261);
  auto report = check_cartan(pb, cc, rng, 100, tol);
  for (const auto& rec : report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }

  SampleStream rng2(262);
  auto flat = check_flat(pb, cc, rng2, 60, tol);
  INFO(flat.find("invariant-form: flatness")->max_residual);
  CHECK(flat.all_pass());

  // The split parts are themselves a principal connection and a soldering
  // form for the circle bundle.
  SampleStream rng3(263);
  auto gamma = project_connection(cc);
  CHECK(connection::check_connection(pb, gamma, rng3, 80, tol).all_pass());

  SampleStream rng4(264);
  forms::ModuleTarget target{"model-plane", lie::standard_representation(2)};
  auto theta = project_soldering(cc);
  auto sold = connection::check_soldering(pb, target, theta, rng4, 80, tol);
  for (const auto& rec : sold.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }
}

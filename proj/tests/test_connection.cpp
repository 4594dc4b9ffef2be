#include "cartankit/connection.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace cartankit;
using namespace cartankit::bundle;
using namespace cartankit::connection;

namespace {

forms::ModuleTarget standard_target(int n) {
  return {"model-plane", lie::standard_representation(n)};
}

// Gradient of the log conformal factor of the round metric in stereographic
// coordinates: s = 2 / (1 + |u|^2), d(log s)/du_i = -2 u_i / (1 + |u|^2).
Vec sphere_log_factor_gradient(const Vec& u) {
  return Vec(-2.0 * u / (1.0 + u.squaredNorm()));
}

// Closed-form Christoffel contraction of a conformal metric s^2 I:
// A(v)(i,j) = (sigma . v) delta_ij + sigma_j v_i - sigma_i v_j.
Mat sphere_coordinate_data_oracle(const Vec& u, const Vec& v) {
  Vec sigma = sphere_log_factor_gradient(u);
  return Mat(sigma.dot(v) * Mat::Identity(2, 2) + v * sigma.transpose() -
             sigma * v.transpose());
}

// The same data in the orthonormal gauge W = s^-1 I: the trace part cancels
// against the derivative of the gauge and only the skew part survives.
Mat sphere_orthonormal_data_oracle(const Vec& u, const Vec& v) {
  Vec sigma = sphere_log_factor_gradient(u);
  return Mat(v * sigma.transpose() - sigma * v.transpose());
}

}  // namespace

TEST_CASE("metric-derived local data matches the closed-form contraction") {
  Tolerances tol;
  const double step = tol.get("step_metric");
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();
  auto data = levi_civita_local(atlas, metric, step);
  auto on_data = orthonormal_local_from_frame(atlas, metric, data, step);

  SampleStream rng(31);
  for (int chart = 0; chart < 2; ++chart) {
    for (int s = 0; s < 40; ++s) {
      Vec u = manifold::sample_chart_point(atlas, chart, rng, 0.3).coords;
      Vec v = rng.vector(2, 1.0);
      CHECK((data(chart, u, v) - sphere_coordinate_data_oracle(u, v)).norm() <
            1e-8);
      CHECK((on_data(chart, u, v) - sphere_orthonormal_data_oracle(u, v))
                .norm() < 1e-8);
    }
  }
}

TEST_CASE("flat metrics produce vanishing local data") {
  Tolerances tol;
  const double step = tol.get("step_metric");
  auto torus = manifold::torus_atlas();
  auto data = levi_civita_local(torus, manifold::flat_torus_metric(), step);
  SampleStream rng(32);
  for (int s = 0; s < 30; ++s) {
    auto p = manifold::sample_points(torus, rng, 1)[0];
    CHECK(data(p.chart, p.coords, rng.vector(2, 1.0)).norm() < 1e-10);
  }
}

TEST_CASE("orthonormal-gauge data lands in the orthogonal algebra") {
  Tolerances tol;
  const double step = tol.get("step_metric");
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();
  auto pb = orthonormal_frame_bundle(atlas, metric, step);
  auto data = orthonormal_local_from_frame(
      atlas, metric, levi_civita_local(atlas, metric, step), step);

  SampleStream rng(33);
  auto report = check_local_data(pb, data, rng, 60, tol);
  INFO(report.find("local-data-algebra")->max_residual);
  CHECK(report.all_pass());

  // Negative control: a symmetric-valued datum is not orthogonal-algebra
  // valued and must be rejected.
  auto bad = [](int, const Vec& x, const Vec& v) {
    Mat m(2, 2);
    m << v[0], x[0], x[0], v[1];
    return m;
  };
  SampleStream rng2(34);
  auto report2 = check_local_data(pb, bad, rng2, 60, tol);
  CHECK_FALSE(report2.all_pass());
}

TEST_CASE("metric connection satisfies both axioms on frame bundles") {
  Tolerances tol;
  const double step = tol.get("step_metric");

  auto sphere = manifold::sphere_atlas();
  auto sphere_pb = frame_bundle(sphere, tol.get("step_jacobian"));
  auto sphere_conn = connection_from_local(
      sphere_pb,
      levi_civita_local(sphere, manifold::round_sphere_metric(), step),
      "sphere-metric-connection");
  SampleStream rng(41);
  auto report = check_connection(sphere_pb, sphere_conn, rng, 120, tol);
  for (const auto& rec : report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }

  auto torus = manifold::torus_atlas();
  auto torus_pb = frame_bundle(torus, tol.get("step_jacobian"));
  auto torus_conn = connection_from_local(
      torus_pb, levi_civita_local(torus, manifold::flat_torus_metric(), step),
      "torus-metric-connection");
  SampleStream rng2(42);
  CHECK(check_connection(torus_pb, torus_conn, rng2, 120, tol).all_pass());
}

TEST_CASE("orthonormal-gauge connection satisfies both axioms") {
  Tolerances tol;
  const double step = tol.get("step_metric");
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();
  auto pb = orthonormal_frame_bundle(atlas, metric, step);
  auto conn = connection_from_local(
      pb,
      orthonormal_local_from_frame(atlas, metric,
                                   levi_civita_local(atlas, metric, step), step),
      "orthonormal-metric-connection");
  SampleStream rng(43);
  auto report = check_connection(pb, conn, rng, 120, tol);
  for (const auto& rec : report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }
}

TEST_CASE("partition-of-unity patching reproduces glued data and fixes unglued data") {
  Tolerances tol;
  const double step = tol.get("step_metric");
  auto atlas = manifold::sphere_atlas();
  auto pb = frame_bundle(atlas, tol.get("step_jacobian"));
  auto data = levi_civita_local(atlas, manifold::round_sphere_metric(), step);

  auto direct = connection_from_local(pb, data, "direct");
  auto patched = patched_connection(pb, data, tol.get("step_pushforward"),
                                    "patched");

  SampleStream rng(51);
  for (int s = 0; s < 50; ++s) {
    BundlePoint p = sample_point(pb, rng);
    TangentAtP w = sample_tangent(pb, rng);
    CHECK((direct.eval(p, w) - patched.eval(p, w)).norm() <
          tol.get("tangent_roundtrip"));
  }

  // Chart-local zero data does not glue on the sphere (the transitions are
  // not constant), so reading it naively in whichever chart the point
  // arrives in is not chart independent...
  auto naive = connection_from_local(pb, zero_local_data(2), "naive-zero");
  SampleStream rng2(52);
  auto naive_report = check_connection(pb, naive, rng2, 120, tol);
  CHECK(naive_report.find("naive-zero: vertical")->pass);
  CHECK(naive_report.find("naive-zero: equivariance")->pass);
  CHECK_FALSE(naive_report.find("naive-zero: chart-consistency")->pass);
  CHECK(naive_report.find("naive-zero: chart-consistency")->max_residual > 1e-2);

  // ...while the partition-of-unity combination is a genuine connection.
  auto fixed = patched_connection(pb, zero_local_data(2),
                                  tol.get("step_pushforward"), "patched-zero");
  SampleStream rng3(53);
  auto fixed_report = check_connection(pb, fixed, rng3, 120, tol);
  for (const auto& rec : fixed_report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }
}

TEST_CASE("horizontal lifts project back and are annihilated") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto pb = frame_bundle(atlas, tol.get("step_jacobian"));
  auto conn = connection_from_local(
      pb,
      levi_civita_local(atlas, manifold::round_sphere_metric(),
                        tol.get("step_metric")),
      "sphere-metric-connection");
  SampleStream rng(61);
  for (int s = 0; s < 50; ++s) {
    BundlePoint p = sample_point(pb, rng);
    Vec v = rng.vector(2, 2.0);
    TangentAtP lift = horizontal_lift(pb, conn, p, v);
    CHECK((lift.base_comps - v).norm() == 0.0);
    CHECK(conn.eval(p, lift).norm() < tol.get("exact"));
  }
}

TEST_CASE("canonical frame form is a soldering form") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();

  auto pb = frame_bundle(atlas, tol.get("step_jacobian"));
  SampleStream rng(71);
  auto report = check_soldering(pb, standard_target(2), fundamental_form(pb),
                                rng, 150, tol);
  for (const auto& rec : report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }

  auto metric = manifold::round_sphere_metric();
  auto on_pb = orthonormal_frame_bundle(atlas, metric, tol.get("step_metric"));
  SampleStream rng2(72);
  CHECK(check_soldering(on_pb, standard_target(2), fundamental_form(on_pb),
                        rng2, 150, tol)
            .all_pass());
}

TEST_CASE("pinched candidate fails surjectivity and rejects inversion") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto pb = frame_bundle(atlas, tol.get("step_jacobian"));

  SolderingForm pinched;
  pinched.name = "pinched-form";
  pinched.model_dim = 2;
  pinched.eval = [](const BundlePoint& p, const TangentAtP& w) {
    Mat squash(2, 2);
    squash << 1.0, 0.0, 0.0, 1e-10;
    return Vec(p.fiber.inverse() * squash * w.base_comps);
  };

  SampleStream rng(81);
  auto report =
      check_soldering(pb, standard_target(2), pinched, rng, 80, tol);
  CHECK(report.find("pinched-form: pseudotensorial")->pass);
  CHECK(report.find("pinched-form: horizontality")->pass);
  CHECK_FALSE(report.find("pinched-form: surjectivity")->pass);

  auto witness = soldering_to_witness(pb, standard_target(2), pinched, tol);
  AssociatedElement e{0, Vec::Zero(2), Vec::Ones(2)};
  CHECK_THROWS_AS(witness.iso(e), VerificationError);
  try {
    witness.iso(e);
  } catch (const VerificationError& err) {
    CHECK(err.stage() == "soldering-inversion");
    CHECK(err.residual() < tol.get("det_min"));
  }
}

TEST_CASE("tautological identification round-trips with the frame form") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto pb = frame_bundle(atlas, tol.get("step_jacobian"));
  auto target = standard_target(2);
  auto carrier = linear_carrier(target.rep, target.name);

  auto taut = tautological_witness(pb);
  SampleStream rng(91);
  auto report = check_witness(pb, carrier, taut, rng, 150, tol);
  for (const auto& rec : report.records) {
    INFO(rec.name << " residual " << rec.max_residual);
    CHECK(rec.pass);
  }

  // Witness -> soldering lands on the canonical frame form exactly.
  auto theta = witness_to_soldering(pb, target, taut);
  auto canonical = fundamental_form(pb);
  SampleStream rng2(92);
  for (int s = 0; s < 60; ++s) {
    BundlePoint p = sample_point(pb, rng2);
    TangentAtP w = sample_tangent(pb, rng2);
    CHECK((theta.eval(p, w) - canonical.eval(p, w)).norm() < tol.get("exact"));
  }

  // Soldering -> witness recovers the tautological identification.
  auto back = soldering_to_witness(pb, target, canonical, tol);
  SampleStream rng3(93);
  for (int s = 0; s < 60; ++s) {
    BundlePoint p = sample_point(pb, rng3);
    Vec v = rng3.vector(2, 2.0);
    AssociatedElement ea = taut.iso_inverse(p.chart, p.base, v);
    AssociatedElement eb = back.iso_inverse(p.chart, p.base, v);
    CHECK(associated_distance(pb, carrier, ea, eb) < tol.get("exact"));
    CHECK((back.iso(ea) - taut.iso(ea)).norm() < tol.get("exact"));
  }
}

TEST_CASE("rescaled identification survives the full round trip") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto pb = frame_bundle(atlas, tol.get("step_jacobian"));
  auto target = standard_target(2);
  auto carrier = linear_carrier(target.rep, target.name);

  // A global automorphism of the tangent bundle: scaling by a smooth
  // chart-independent positive function of the embedded point.
  auto scale = [](int chart, const Vec& x) {
    return 2.0 + 0.5 * manifold::sphere_point(chart, x)[2];
  };
  GeometrizationWitness twisted;
  twisted.name = "rescaled";
  twisted.iso = [scale](const AssociatedElement& e) {
    return Vec(scale(e.chart, e.base) * e.value);
  };
  twisted.iso_inverse = [pb, carrier, scale](int chart, const Vec& x,
                                             const Vec& v) {
    return associate(pb, carrier, BundlePoint{chart, x, Mat::Identity(2, 2)},
                     Vec(v / scale(chart, x)));
  };

  SampleStream rng(101);
  CHECK(check_witness(pb, carrier, twisted, rng, 150, tol).all_pass());

  auto theta = witness_to_soldering(pb, target, twisted);
  SampleStream rng2(102);
  CHECK(check_soldering(pb, target, theta, rng2, 120, tol).all_pass());

  auto recovered = soldering_to_witness(pb, target, theta, tol);
  SampleStream rng3(103);
  for (int s = 0; s < 60; ++s) {
    BundlePoint p = sample_point(pb, rng3);
    Vec v = rng3.vector(2, 2.0);
    AssociatedElement ea = twisted.iso_inverse(p.chart, p.base, v);
    AssociatedElement eb = recovered.iso_inverse(p.chart, p.base, v);
    CHECK(associated_distance(pb, carrier, ea, eb) < tol.get("exact"));
    CHECK((recovered.iso(ea) - twisted.iso(ea)).norm() < tol.get("exact"));
  }
}

TEST_CASE("chart-dependent candidate identification is rejected") {
  Tolerances tol;
  auto atlas = manifold::sphere_atlas();
  auto pb = frame_bundle(atlas, tol.get("step_jacobian"));
  auto carrier = linear_carrier(lie::standard_representation(2), "plane");

  GeometrizationWitness broken = tautological_witness(pb);
  broken.name = "chart-dependent";
  broken.iso_inverse = [pb, carrier](int chart, const Vec& x, const Vec& v) {
    Vec scaled = chart == 0 ? Vec(2.0 * v) : v;
    return associate(pb, carrier, BundlePoint{chart, x, Mat::Identity(2, 2)},
                     scaled);
  };
  SampleStream rng(111);
  auto report = check_witness(pb, carrier, broken, rng, 150, tol);
  CHECK_FALSE(report.all_pass());
  CHECK_FALSE(report.find("chart-dependent: chart-consistency")->pass);
}

TEST_CASE("chart curvature form reproduces the Gauss curvature density") {
  Tolerances tol;
  const double mstep = tol.get("step_metric");
  const double cstep = tol.get("step_curvature");
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();

  // closed-form orthonormal data: the so(2) coordinate of its curvature
  // form is the Laplacian of log s, which equals -K s^2 = -s^2 here
  LocalConnectionData oracle_data = [](int, const Vec& u, const Vec& v) {
    return sphere_orthonormal_data_oracle(u, v);
  };
  auto computed_data = orthonormal_local_from_frame(
      atlas, metric, levi_civita_local(atlas, metric, mstep), mstep);

  SampleStream rng(37);
  for (int chart = 0; chart < 2; ++chart) {
    for (int s = 0; s < 25; ++s) {
      Vec u = manifold::sample_chart_point(atlas, chart, rng, 0.3).coords;
      const double s2 = std::pow(2.0 / (1.0 + u.squaredNorm()), 2);
      Mat f = local_curvature_form(oracle_data, chart, u, cstep);
      CHECK((f + f.transpose()).norm() < 1e-9);  // stays in so(2)
      CHECK(std::abs(f(1, 0) + s2) < 1e-6);
      Mat fc = local_curvature_form(computed_data, chart, u, cstep);
      CHECK(std::abs(fc(1, 0) + s2) < tol.get("curvature_coarse"));
    }
  }

  auto flat = levi_civita_local(manifold::torus_atlas(),
                                manifold::flat_torus_metric(), mstep);
  for (int s = 0; s < 20; ++s) {
    auto p = manifold::sample_points(manifold::torus_atlas(), rng, 1)[0];
    CHECK(local_curvature_form(flat, p.chart, p.coords, cstep).norm() < 1e-9);
  }
}

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "cartankit/cartan.hpp"

namespace cartankit::scenario {

using bundle::BundlePoint;
using bundle::PrincipalBundleSpec;
using bundle::TangentAtP;

/// One verification run: which scenario, sampling effort, the RNG seed,
/// the tolerance table, and an optional deliberately broken ingredient
/// used to demonstrate that bad input is rejected at the right stage.
struct ScenarioConfig {
  std::string scenario;
  int samples = 200;
  unsigned long long seed = 7;
  Tolerances tol;
  std::string fault;  // empty = sound ingredients
};

/// Outcome of a run. `report` holds every per-check record accumulated up
/// to the point of rejection; for a rejected run, `stage`, `reference`,
/// and `residual` identify where and why the pipeline refused its input.
struct RunResult {
  std::string command;
  std::string scenario;
  CheckReport report;
  bool rejected = false;
  std::string stage;
  std::string reference;
  double residual = 0.0;
  // obstruction-only payload
  double tangent_euler = 0.0;
  double trivial_euler = 0.0;
  std::string verdict;

  bool overall_pass() const { return !rejected && report.all_pass(); }
};

struct ScenarioInfo {
  std::string id;
  std::string description;
};

inline const std::vector<ScenarioInfo>& scenarios() {
  static const std::vector<ScenarioInfo> list = {
      {"torus-frame",
       "frame bundle of the flat torus: metric connection, canonical form, "
       "complete equivalence chain, vanishing curvature"},
      {"sphere-frame",
       "frame bundle of the round sphere: metric connection, orthonormal "
       "reduction, complete equivalence chain, torsion-free curvature"},
      {"sphere-homogeneous",
       "rotation group over the sphere: the invariant form is a flat model "
       "connection and projects onto a connection and a canonical form"},
      {"trivial-so2-sphere",
       "trivial circle bundle over the sphere: flat product connection; "
       "subject of the obstruction analysis"},
  };
  return list;
}

inline bool known_scenario(const std::string& id) {
  return std::any_of(scenarios().begin(), scenarios().end(),
                     [&](const ScenarioInfo& s) { return s.id == id; });
}

inline const std::vector<std::string>& fault_names() {
  static const std::vector<std::string> list = {
      "non-equivariant-iso", "non-positive-metric", "broken-cocycle"};
  return list;
}

inline void validate(const ScenarioConfig& cfg) {
  if (!known_scenario(cfg.scenario))
    throw ConfigError("unknown scenario: '" + cfg.scenario +
                      "' (see list-scenarios)");
  if (cfg.samples < 1)
    throw ConfigError("sample count must be positive, got " +
                      std::to_string(cfg.samples));
  if (cfg.fault.empty()) return;
  if (std::find(fault_names().begin(), fault_names().end(), cfg.fault) ==
      fault_names().end())
    throw ConfigError("unknown fault: '" + cfg.fault + "'");
  const bool frame =
      cfg.scenario == "torus-frame" || cfg.scenario == "sphere-frame";
  if (!frame && cfg.fault != "broken-cocycle")
    throw ConfigError("fault '" + cfg.fault +
                      "' applies to the frame-bundle scenarios");
}

namespace detail {

/// Merge a sub-report under a stage prefix, then reject the run if any of
/// its records failed. The thrown error carries the stage name and the
/// first failing record's reference and residual.
inline void gate(CheckReport& into, const CheckReport& sub,
                 const std::string& stage) {
  for (CheckRecord rec : sub.records) {
    rec.name = stage + "/" + rec.name;
    into.records.push_back(std::move(rec));
  }
  require_pass(sub, stage);
}

/// Deliberate defect: negate one diagonal metric component. The tensor
/// stays symmetric but acquires a negative direction.
inline manifold::MetricField break_metric(const manifold::MetricField& metric) {
  auto value = metric.value;
  manifold::MetricField bad;
  bad.value = [value](int chart, const Vec& x) {
    Mat g = value(chart, x);
    g(1, 1) = -g(1, 1);
    return g;
  };
  return bad;
}

/// Deliberate defect: multiply one transition by a fixed group element.
/// Every transition value stays inside the group, so membership passes,
/// but the cocycle identity g_ij g_ji = e fails on that overlap.
inline void break_cocycle(PrincipalBundleSpec& pb) {
  auto base = pb.transition;
  Vec coords = Vec::Zero(pb.group.algebra_dim);
  coords[0] = 0.05;
  Mat twist = lie::exp(pb.group, coords);
  pb.transition = [base, twist](int i, int j, const Vec& x) {
    Mat g = base(i, j, x);
    if (i == 0 && j == 1) return Mat(g * twist);
    return g;
  };
}

/// Deliberate defect: turn a tangent-bundle identification into a candidate
/// canonical form while forgetting to gauge the value by the fiber. The
/// result depends only on the base point, so it cannot intertwine the
/// right action and fails the pseudotensoriality check.
inline connection::SolderingForm ungauged_soldering(
    const connection::GeometrizationWitness& witness, int model_dim) {
  connection::SolderingForm theta;
  theta.name = witness.name + "-soldering";
  theta.model_dim = model_dim;
  theta.eval = [witness](const BundlePoint& p, const TangentAtP& w) {
    return witness.iso_inverse(p.chart, p.base, w.base_comps).value;
  };
  return theta;
}

/// Smooth fiber assignment on canonical-chart coordinates, single-valued
/// on the base, used to manufacture exactly equivariant maps.
inline Vec plane_value(int chart, const Vec& x) {
  Vec v(2);
  v << std::sin(x[0]) + 2.0 + chart, std::cos(x[1]) - 0.5;
  return v;
}

/// Sections of an associated vector bundle against equivariant maps on the
/// total space: convert in both directions and demand the round trips
/// return to the start.
inline CheckReport section_correspondence(const PrincipalBundleSpec& pb,
                                          SampleStream& rng, int samples,
                                          const Tolerances& tol) {
  auto carrier = bundle::linear_carrier(
      lie::standard_representation(pb.group.matrix_dim), "plane");
  bundle::Section s0 = [pb](int chart, const Vec& x) {
    int c0 = bundle::canonical_chart(pb.base, chart, x);
    Vec x0 = manifold::change_chart(pb.base, chart, c0, x);
    return bundle::AssociatedElement{c0, x0, plane_value(c0, x0)};
  };
  auto f0 = bundle::equivariant_from_section(pb, carrier, s0);
  CheckReport report =
      bundle::check_equivariant(pb, carrier, f0, rng, samples, tol);
  auto s1 = bundle::section_from_equivariant(pb, carrier, f0);
  auto f1 = bundle::equivariant_from_section(pb, carrier, s1);
  auto& sec = report.add("section-roundtrip",
                         refs::section_equivariant_roundtrip, tol.get("exact"));
  auto& map = report.add("map-roundtrip", refs::section_equivariant_roundtrip,
                         tol.get("exact"));
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    sec.absorb(bundle::associated_distance(pb, carrier, s0(p.chart, p.base),
                                           s1(p.chart, p.base)));
    map.absorb((f0(p) - f1(p)).norm());
  }
  return report;
}

/// Tensorial forms on the total space against bundle-valued forms on the
/// base: the round trip is the identity, and the canonical form descends
/// to the identity endomorphism of the tangent bundle.
inline CheckReport form_correspondence(const PrincipalBundleSpec& pb,
                                       const connection::SolderingForm& theta,
                                       SampleStream& rng, int samples,
                                       const Tolerances& tol) {
  CheckReport report;
  forms::ModuleTarget target{"plane",
                             lie::standard_representation(pb.base.dim)};
  auto mform = connection::as_form(theta);
  auto bform = forms::tensorial_to_bundle(pb, target, mform);
  auto back = forms::bundle_to_tensorial(pb, target, bform);
  auto& rt = report.add("tensorial-bundle-roundtrip",
                        refs::tensorial_bundle_roundtrip, tol.get("exact"));
  auto& ident = report.add(
      "canonical-form-identity",
      "the descended canonical form sends each tangent vector to itself",
      tol.get("exact"));
  const double step = tol.get("step_pushforward");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    TangentAtP w = bundle::sample_tangent(pb, rng);
    rt.absorb((back.eval(p, {w}) - mform.eval(p, {w})).norm());
    bundle::AssociatedElement e = bform.eval(p.chart, p.base, {w.base_comps});
    Vec pushed = manifold::push_tangent(pb.base, p.chart, e.chart, p.base,
                                        w.base_comps, step);
    ident.absorb((e.value - pushed).norm());
  }
  return report;
}

/// Metric, orthonormal-frame reduction, and symmetry-breaking map close a
/// triangle: every leg composed with the next returns to its start.
inline CheckReport reduction_correspondence(const PrincipalBundleSpec& pb,
                                            const manifold::MetricField& metric,
                                            SampleStream& rng, int samples,
                                            const Tolerances& tol) {
  auto o2 = lie::orthogonal(2);
  auto red = bundle::metric_to_reduction(pb, metric);
  CheckReport report = bundle::check_reduction(pb, red, o2, rng, samples, tol);
  auto breaking = bundle::reduction_to_symmetry_breaking(pb, red);
  auto carrier = bundle::spd_coset_carrier(2);
  report.merge(
      bundle::check_equivariant(pb, carrier, breaking, rng, samples, tol));
  auto red2 = bundle::symmetry_breaking_to_reduction(pb, breaking);
  auto recovered = bundle::reduction_to_metric(red2);
  auto& metrec =
      report.add("metric-recovery", refs::reduction_triangle, tol.get("exact"));
  auto& onq = report.add("membership-agreement", refs::reduction_triangle,
                         tol.get("exact"));
  auto& offq = report.add("membership-separation", refs::reduction_triangle,
                          tol.get("exact"));
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    metrec.absorb((recovered.value(p.chart, p.base) -
                   metric.value(p.chart, p.base))
                      .norm());
    BundlePoint q{p.chart, p.base, red.local_section(p.chart, p.base)};
    BundlePoint q2 = bundle::right_act(q, lie::sample_group(o2, rng));
    onq.absorb(red2.membership(q2));
    Mat stretch = Mat::Identity(2, 2);
    stretch(0, 0) = 1.6;
    offq.absorb(std::max(
        0.0, 0.1 - red2.membership(bundle::right_act(q, stretch))));
  }
  return report;
}

/// Structural facts consumed when a model connection is weakened to a
/// connection-plus-canonical-form pair: the algebra splits with a
/// stabilizer-invariant complement, and for the flat models the
/// complement brackets to zero.
inline CheckReport model_weakening(const cartan::ModelPair& model,
                                   SampleStream& rng, int samples,
                                   const Tolerances& tol) {
  CheckReport report;
  auto& dims = report.add(
      "split-dimensions",
      "model algebra splits as stabilizer algebra plus base-dimension complement",
      tol.get("exact"));
  dims.absorb(std::abs(static_cast<double>(
      cartan::total_dim(model) - model.h.algebra_dim - model.complement_dim)));
  auto& invariant =
      report.add("reductive-split",
                 "stabilizer action preserves the splitting of the model algebra",
                 tol.get("exact"));
  auto& abelian = report.add("complement-abelian",
                             "complement of the flat model brackets to zero",
                             tol.get("exact"));
  for (int s = 0; s < samples; ++s) {
    Mat a = lie::sample_group(model.h, rng);
    Vec u = rng.vector(model.complement_dim, 1.0);
    Vec v = rng.vector(model.complement_dim, 1.0);
    Vec xi = rng.vector(model.h.algebra_dim, 1.0);
    Mat act = cartan::h_action(model, a);
    invariant.absorb(
        cartan::h_part(model, Vec(act * cartan::embed_complement(model, u)))
            .norm() +
        cartan::complement_part(model, Vec(act * cartan::embed_h(model, xi)))
            .norm());
    abelian.absorb(model.bracket(cartan::embed_complement(model, u),
                                 cartan::embed_complement(model, v))
                       .norm());
  }
  return report;
}

/// Projecting the assembled model connection recovers the connection and
/// canonical form it was built from, and the induced tangent-bundle
/// identification recovers the original witness.
inline CheckReport chain_recovery(
    const PrincipalBundleSpec& pb, const cartan::CartanConnection& cc,
    const connection::EhresmannConnection& gamma,
    const connection::SolderingForm& theta,
    const connection::GeometrizationWitness& witness, SampleStream& rng,
    int samples, const Tolerances& tol) {
  CheckReport report =
      cartan::check_cartan_projections(pb, cc, gamma, theta, rng, samples, tol);
  forms::ModuleTarget target{"plane",
                             lie::standard_representation(pb.base.dim)};
  auto theta2 = cartan::project_soldering(cc);
  auto witness2 = connection::soldering_to_witness(pb, target, theta2, tol);
  auto carrier = bundle::linear_carrier(target.rep, target.name);
  auto& wrec = report.add("witness-recovery", refs::witness_soldering_roundtrip,
                          tol.get("exact"));
  for (const auto& ref : manifold::sample_points(pb.base, rng, samples)) {
    Vec v = rng.vector(pb.base.dim, 1.0);
    auto e1 = witness.iso_inverse(ref.chart, ref.coords, v);
    auto e2 = witness2.iso_inverse(ref.chart, ref.coords, v);
    wrec.absorb(bundle::associated_distance(pb, carrier, e1, e2));
    wrec.absorb((witness.iso(e1) - witness2.iso(e1)).norm());
  }
  return report;
}

/// Curvature of the assembled model connection: identically zero over a
/// flat base; over the round sphere the complement part (the torsion of
/// the metric connection) vanishes and the curvature is tensorial.
inline CheckReport frame_curvature(const PrincipalBundleSpec& pb,
                                   const cartan::CartanConnection& cc,
                                   const connection::EhresmannConnection& gamma,
                                   bool curved, SampleStream& rng, int samples,
                                   const Tolerances& tol) {
  if (!curved) return cartan::check_flat(pb, cc, rng, samples, tol);
  CheckReport report =
      cartan::check_curvature_tensorial(pb, cc, rng, samples, tol);
  auto& torsion = report.add(
      cc.name + ": torsion-free",
      "complement part of the curvature vanishes for the metric connection",
      tol.get("curvature_coarse"));
  const double step = tol.get("step_curvature");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    TangentAtP V =
        connection::horizontal_lift(pb, gamma, p, rng.vector(pb.base.dim, 1.0));
    TangentAtP W =
        connection::horizontal_lift(pb, gamma, p, rng.vector(pb.base.dim, 1.0));
    Vec omega = cartan::curvature(pb, cc, p, V, W, step);
    torsion.absorb(cartan::complement_part(cc.model, omega).norm());
  }
  return report;
}

inline RunResult run_frame(const ScenarioConfig& cfg, bool sphere) {
  RunResult out;
  out.command = "verify";
  out.scenario = cfg.scenario;
  const Tolerances& tol = cfg.tol;
  SampleStream rng(cfg.seed);
  try {
    auto atlas = sphere ? manifold::sphere_atlas() : manifold::torus_atlas();
    manifold::MetricField metric =
        sphere ? manifold::round_sphere_metric() : manifold::flat_torus_metric();
    if (cfg.fault == "non-positive-metric") metric = break_metric(metric);

    gate(out.report, manifold::check_atlas(atlas, rng, cfg.samples, tol),
         "atlas-verification");
    gate(out.report,
         manifold::check_metric(atlas, metric, rng, cfg.samples, tol),
         "metric-verification");

    auto pb = bundle::frame_bundle(atlas, tol.get("step_jacobian"));
    if (cfg.fault == "broken-cocycle") break_cocycle(pb);
    gate(out.report, bundle::check_principal_bundle(pb, rng, cfg.samples, tol),
         "bundle-verification");

    auto data = connection::levi_civita_local(atlas, metric,
                                              tol.get("step_metric"));
    auto gamma =
        connection::connection_from_local(pb, data, "metric connection");
    {
      CheckReport sub =
          connection::check_local_data(pb, data, rng, cfg.samples, tol);
      sub.merge(connection::check_connection(pb, gamma, rng, cfg.samples, tol));
      gate(out.report, sub, "connection-verification");
    }

    forms::ModuleTarget target{"plane", lie::standard_representation(2)};
    auto theta = connection::fundamental_form(pb);
    gate(out.report,
         connection::check_soldering(pb, target, theta, rng, cfg.samples, tol),
         "soldering-verification");

    gate(out.report, section_correspondence(pb, rng, cfg.samples, tol),
         "section-correspondence");
    gate(out.report, form_correspondence(pb, theta, rng, cfg.samples, tol),
         "form-correspondence");
    if (sphere)
      gate(out.report,
           reduction_correspondence(pb, metric, rng, cfg.samples, tol),
           "reduction-correspondence");

    auto witness = connection::tautological_witness(pb);
    auto carrier = bundle::linear_carrier(target.rep, target.name);
    gate(out.report,
         connection::check_witness(pb, carrier, witness, rng, cfg.samples, tol),
         "witness-verification");

    connection::SolderingForm theta2 =
        cfg.fault == "non-equivariant-iso"
            ? ungauged_soldering(witness, 2)
            : connection::witness_to_soldering(pb, target, witness);
    {
      CheckReport sub =
          connection::check_soldering(pb, target, theta2, rng, cfg.samples, tol);
      auto& agree = sub.add(
          "witness-form-agreement",
          "the form induced by the identification equals the canonical form",
          tol.get("exact"));
      for (int s = 0; s < cfg.samples; ++s) {
        BundlePoint p = bundle::sample_point(pb, rng);
        TangentAtP w = bundle::sample_tangent(pb, rng);
        agree.absorb((theta2.eval(p, w) - theta.eval(p, w)).norm());
      }
      gate(out.report, sub, "witness-to-soldering");
    }

    auto model = cartan::affine_model(2);
    auto cc = cartan::assemble_cartan(pb, model, gamma, theta2, "frame model");
    gate(out.report, cartan::check_cartan(pb, cc, rng, cfg.samples, tol),
         "soldering-to-cartan");
    gate(out.report, model_weakening(model, rng, cfg.samples, tol),
         "cartan-weakening");
    gate(out.report,
         chain_recovery(pb, cc, gamma, theta2, witness, rng, cfg.samples, tol),
         "soldering-recovery");
    gate(out.report,
         frame_curvature(pb, cc, gamma, sphere, rng, cfg.samples, tol),
         "curvature-verification");
  } catch (const VerificationError& e) {
    out.rejected = true;
    out.stage = e.stage();
    out.reference = e.reference();
    out.residual = e.residual();
  }
  return out;
}

inline RunResult run_homogeneous(const ScenarioConfig& cfg) {
  RunResult out;
  out.command = "verify";
  out.scenario = cfg.scenario;
  const Tolerances& tol = cfg.tol;
  SampleStream rng(cfg.seed);
  try {
    auto pb = cartan::homogeneous_rotation_bundle();
    if (cfg.fault == "broken-cocycle") break_cocycle(pb);
    gate(out.report, manifold::check_atlas(pb.base, rng, cfg.samples, tol),
         "atlas-verification");
    gate(out.report, bundle::check_principal_bundle(pb, rng, cfg.samples, tol),
         "bundle-verification");
    auto cc =
        cartan::maurer_cartan_connection(pb, tol.get("step_pushforward"));
    gate(out.report, cartan::check_cartan(pb, cc, rng, cfg.samples, tol),
         "cartan-verification");
    gate(out.report, cartan::check_flat(pb, cc, rng, cfg.samples, tol),
         "curvature-verification");
    auto gamma = cartan::project_connection(cc);
    auto theta = cartan::project_soldering(cc);
    {
      CheckReport sub =
          connection::check_connection(pb, gamma, rng, cfg.samples, tol);
      forms::ModuleTarget target{"model-plane",
                                 lie::standard_representation(2)};
      sub.merge(connection::check_soldering(pb, target, theta, rng,
                                            cfg.samples, tol));
      sub.merge(cartan::check_cartan_projections(pb, cc, gamma, theta, rng,
                                                 cfg.samples, tol));
      gate(out.report, sub, "projection-verification");
    }
  } catch (const VerificationError& e) {
    out.rejected = true;
    out.stage = e.stage();
    out.reference = e.reference();
    out.residual = e.residual();
  }
  return out;
}

inline RunResult run_trivial(const ScenarioConfig& cfg) {
  RunResult out;
  out.command = "verify";
  out.scenario = cfg.scenario;
  const Tolerances& tol = cfg.tol;
  SampleStream rng(cfg.seed);
  try {
    auto atlas = manifold::sphere_atlas();
    gate(out.report, manifold::check_atlas(atlas, rng, cfg.samples, tol),
         "atlas-verification");
    auto pb = bundle::trivial_bundle(atlas, lie::so2());
    if (cfg.fault == "broken-cocycle") break_cocycle(pb);
    gate(out.report, bundle::check_principal_bundle(pb, rng, cfg.samples, tol),
         "bundle-verification");
    auto data = connection::zero_local_data(2);
    auto gamma =
        connection::connection_from_local(pb, data, "product connection");
    {
      CheckReport sub =
          connection::check_local_data(pb, data, rng, cfg.samples, tol);
      sub.merge(connection::check_connection(pb, gamma, rng, cfg.samples, tol));
      gate(out.report, sub, "connection-verification");
    }
    gate(out.report, section_correspondence(pb, rng, cfg.samples, tol),
         "section-correspondence");
    {
      CheckReport sub;
      auto& flat = sub.add(
          "product-connection-flat",
          "curvature of the product connection vanishes identically",
          tol.get("exact"));
      const double step = tol.get("step_curvature");
      for (const auto& ref : manifold::sample_points(pb.base, rng, cfg.samples))
        flat.absorb(connection::local_curvature_form(data, ref.chart,
                                                     ref.coords, step)
                        .norm());
      gate(out.report, sub, "curvature-verification");
    }
  } catch (const VerificationError& e) {
    out.rejected = true;
    out.stage = e.stage();
    out.reference = e.reference();
    out.residual = e.residual();
  }
  return out;
}

}  // namespace detail

inline RunResult run_verify(const ScenarioConfig& cfg) {
  validate(cfg);
  if (cfg.scenario == "torus-frame") return detail::run_frame(cfg, false);
  if (cfg.scenario == "sphere-frame") return detail::run_frame(cfg, true);
  if (cfg.scenario == "sphere-homogeneous") return detail::run_homogeneous(cfg);
  return detail::run_trivial(cfg);
}

/// Why no canonical form can exist on the trivial circle bundle over the
/// sphere: the plane bundle it would identify with the tangent bundle is
/// associated to a bundle carrying a flat connection, so its total
/// curvature integral vanishes, while the tangent bundle's equals 4 pi.
inline RunResult run_obstruction(const ScenarioConfig& cfg) {
  validate(cfg);
  if (cfg.scenario != "trivial-so2-sphere")
    throw ConfigError(
        "obstruction analysis applies to scenario 'trivial-so2-sphere', got '" +
        cfg.scenario + "'");
  if (!cfg.fault.empty())
    throw ConfigError("fault injection applies to the verify command");
  RunResult out;
  out.command = "obstruction";
  out.scenario = cfg.scenario;
  const Tolerances& tol = cfg.tol;
  auto atlas = manifold::sphere_atlas();
  auto metric = manifold::round_sphere_metric();
  const double mstep = tol.get("step_metric");
  const int resolution = 120;  // pinned quadrature grid, part of the contract

  out.tangent_euler = manifold::integrate_density(
      atlas,
      [&](int chart, const Vec& u) {
        Mat g = metric.value(chart, u);
        double k = manifold::gauss_curvature(metric, chart, u, mstep);
        return k * std::sqrt(g.determinant()) / (2.0 * M_PI);
      },
      resolution);

  auto data = connection::zero_local_data(2);
  const double cstep = tol.get("step_curvature");
  out.trivial_euler = manifold::integrate_density(
      atlas,
      [&](int chart, const Vec& u) {
        Mat f = connection::local_curvature_form(data, chart, u, cstep);
        return f(1, 0) / (2.0 * M_PI);
      },
      resolution);

  auto& tangent = out.report.add("tangent-euler-number", refs::gauss_bonnet,
                                 tol.get("quadrature"));
  tangent.absorb(std::abs(out.tangent_euler - 2.0));
  auto& trivial =
      out.report.add("trivial-euler-number",
                     "a flat connection has vanishing total curvature",
                     tol.get("quadrature_flat"));
  trivial.absorb(std::abs(out.trivial_euler));
  auto& differ =
      out.report.add("euler-numbers-differ", refs::obstruction, tol.get("exact"));
  differ.absorb(
      std::max(0.0, 1.0 - std::abs(out.tangent_euler - out.trivial_euler)));
  out.verdict = refs::obstruction;
  return out;
}

}  // namespace cartankit::scenario

#pragma once

#include "cartankit/bundle.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cartankit::forms {

using bundle::AssociatedElement;
using bundle::BundlePoint;
using bundle::PrincipalBundleSpec;
using bundle::TangentAtP;

/// The value module of a form: a vector space carrying a representation of
/// the structure group.
struct ModuleTarget {
  std::string name;
  lie::Representation rep;
};

/// Differential form on the total space with values in a module. Degree
/// 0, 1, or 2; eval receives exactly `degree` tangent arguments.
struct ModuleValuedForm {
  std::string name;
  int degree = 1;
  std::function<Vec(const BundlePoint&, const std::vector<TangentAtP>&)> eval;
};

/// Form on the base with values in the associated bundle of a linear
/// carrier; values are canonical associated elements.
struct BundleValuedForm {
  std::string name;
  int degree = 1;
  bundle::HModuleCarrier carrier;
  std::function<AssociatedElement(int, const Vec&, const std::vector<Vec>&)> eval;
};

inline std::vector<TangentAtP> sample_arguments(const PrincipalBundleSpec& pb,
                                                SampleStream& rng, int degree,
                                                double scale = 1.0) {
  std::vector<TangentAtP> ws;
  for (int i = 0; i < degree; ++i) ws.push_back(bundle::sample_tangent(pb, rng, scale));
  return ws;
}

/// R_h-equivariance of type rho: phi(p.h; (R_h)_* w) = rho(h^-1) phi(p; w),
/// with the pushforwards taken by finite differences.
inline CheckReport check_pseudotensorial(const PrincipalBundleSpec& pb,
                                         const ModuleValuedForm& form,
                                         const ModuleTarget& target,
                                         SampleStream& rng, int samples,
                                         const Tolerances& tol) {
  CheckReport report;
  auto& eq = report.add(form.name + ": pseudotensorial", refs::pseudotensorial,
                        tol.get("pseudotensorial"));
  const double step = tol.get("step_pushforward");
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    Mat h = lie::sample_group(pb.group, rng);
    std::vector<TangentAtP> ws = sample_arguments(pb, rng, form.degree);
    std::vector<TangentAtP> moved;
    for (const TangentAtP& w : ws)
      moved.push_back(bundle::push_right_act(pb, p, w, h, step));
    Vec lhs = form.eval(bundle::right_act(p, h), moved);
    Vec rhs = target.rep.matrix(h.inverse()) * form.eval(p, ws);
    eq.absorb((lhs - rhs).norm());
  }
  return report;
}

/// Tensorial = pseudotensorial + vanishing whenever one argument is
/// vertical (a fundamental field).
inline CheckReport check_tensorial(const PrincipalBundleSpec& pb,
                                   const ModuleValuedForm& form,
                                   const ModuleTarget& target, SampleStream& rng,
                                   int samples, const Tolerances& tol) {
  CheckReport report = check_pseudotensorial(pb, form, target, rng, samples, tol);
  auto& horiz = report.add(form.name + ": horizontality", refs::tensorial,
                           tol.get("tensorial"));
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    std::vector<TangentAtP> ws = sample_arguments(pb, rng, form.degree);
    if (form.degree == 0) break;
    const int slot = static_cast<int>(rng.integer(form.degree));
    ws[slot] = bundle::fundamental_field(pb, p, lie::sample_algebra(pb.group, rng));
    horiz.absorb(form.eval(p, ws).norm());
  }
  return report;
}

/// Multilinearity in the first slot and antisymmetry for degree-2 forms.
inline CheckReport check_alternating(const PrincipalBundleSpec& pb,
                                     const ModuleValuedForm& form,
                                     SampleStream& rng, int samples,
                                     const Tolerances& tol) {
  CheckReport report;
  auto& linear = report.add(form.name + ": multilinearity",
                            "form is linear in each tangent slot",
                            tol.get("exact"));
  auto& alt = report.add(form.name + ": antisymmetry",
                         "degree-2 form changes sign under argument swap",
                         tol.get("exact"));
  for (int s = 0; s < samples; ++s) {
    BundlePoint p = bundle::sample_point(pb, rng);
    std::vector<TangentAtP> ws = sample_arguments(pb, rng, form.degree);
    if (form.degree < 1) break;
    TangentAtP w1 = bundle::sample_tangent(pb, rng);
    const double a = rng.symmetric(2.0), b = rng.symmetric(2.0);
    std::vector<TangentAtP> combo = ws;
    combo[0] = TangentAtP{a * ws[0].base_comps + b * w1.base_comps,
                          a * ws[0].fiber_comps + b * w1.fiber_comps};
    std::vector<TangentAtP> other = ws;
    other[0] = w1;
    linear.absorb(
        (form.eval(p, combo) - a * form.eval(p, ws) - b * form.eval(p, other))
            .norm());
    if (form.degree == 2) {
      std::vector<TangentAtP> swapped = {ws[1], ws[0]};
      alt.absorb((form.eval(p, swapped) + form.eval(p, ws)).norm());
    }
  }
  return report;
}

/// A tensorial form descends to the base: evaluate at the identity-fiber
/// point on arbitrary lifts and package the value as an associated element.
inline BundleValuedForm tensorial_to_bundle(const PrincipalBundleSpec& pb,
                                            const ModuleTarget& target,
                                            const ModuleValuedForm& form) {
  BundleValuedForm out;
  out.name = form.name + " (descended)";
  out.degree = form.degree;
  out.carrier = bundle::linear_carrier(target.rep, target.name);
  const int n = pb.group.matrix_dim;
  out.eval = [pb, form, carrier = out.carrier, n](int chart, const Vec& x,
                                                  const std::vector<Vec>& vs) {
    BundlePoint p{chart, x, Mat::Identity(n, n)};
    std::vector<TangentAtP> ws;
    for (const Vec& v : vs)
      ws.push_back(TangentAtP{v, Vec::Zero(pb.group.algebra_dim)});
    return bundle::associate(pb, carrier, p, form.eval(p, ws));
  };
  return out;
}

/// Inverse direction: evaluate the base form on the projected arguments and
/// gauge the value back to the given point's frame.
inline ModuleValuedForm bundle_to_tensorial(const PrincipalBundleSpec& pb,
                                            const ModuleTarget& target,
                                            const BundleValuedForm& bform) {
  ModuleValuedForm out;
  out.name = bform.name + " (lifted)";
  out.degree = bform.degree;
  out.eval = [pb, target, bform](const BundlePoint& p,
                                 const std::vector<TangentAtP>& ws) {
    std::vector<Vec> vs;
    for (const TangentAtP& w : ws) vs.push_back(w.base_comps);
    AssociatedElement e = bform.eval(p.chart, p.base, vs);
    BundlePoint p0 = bundle::to_chart(pb, p, e.chart);
    return Vec(target.rep.matrix(p0.fiber).inverse() * e.value);
  };
  return out;
}

/// Pullback of a base form along the projection: values do not see the
/// fiber, so the result is tensorial for the trivial representation.
inline ModuleValuedForm pullback_from_base(
    const PrincipalBundleSpec& pb, int degree,
    const std::function<Vec(int, const Vec&, const std::vector<Vec>&)>& base_form,
    std::string name) {
  ModuleValuedForm out;
  out.name = std::move(name);
  out.degree = degree;
  out.eval = [base_form](const BundlePoint& p, const std::vector<TangentAtP>& ws) {
    std::vector<Vec> vs;
    for (const TangentAtP& w : ws) vs.push_back(w.base_comps);
    return base_form(p.chart, p.base, vs);
  };
  return out;
}

}  // namespace cartankit::forms

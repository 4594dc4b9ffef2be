#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace cartankit {

/// Central registry of numerical tolerances and finite-difference steps.
///
/// Every threshold used by a verification routine is looked up here by name,
/// so a scenario runner can override any of them (CLI `--tol name=value`)
/// without touching code. Entries fall into three rough families:
///   *_exact   — identities that hold to rounding error,
///   *_fd      — identities limited by finite-difference truncation,
///   step_*    — finite-difference step sizes.
class Tolerances {
public:
  Tolerances() : values_(defaults()) {}

  double get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end())
      throw std::out_of_range("unknown tolerance name: " + name);
    return it->second;
  }

  void set(const std::string& name, double value) {
    if (values_.find(name) == values_.end())
      throw std::out_of_range("unknown tolerance name: " + name);
    values_[name] = value;
  }

  /// Parse a single "name=value" override.
  void set_from_string(const std::string& spec) {
    auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("tolerance override must be name=value: " + spec);
    set(spec.substr(0, eq), std::stod(spec.substr(eq + 1)));
  }

  const std::map<std::string, double>& entries() const { return values_; }

  static const std::map<std::string, double>& defaults() {
    static const std::map<std::string, double> d = {
        {"membership", 1e-9},          // group membership residual
        {"gl_det_min", 1e-6},          // |det| floor for GL(n) membership
        {"reexpansion", 1e-8},         // basis re-expansion residual
        {"exact", 1e-9},               // identities exact up to rounding
        {"chart_roundtrip", 1e-9},     // transition map round trips
        {"tangent_roundtrip", 1e-6},   // pushforward round trips (FD-limited)
        {"cocycle", 1e-9},             // bundle transition cocycle
        {"pou_sum", 1e-10},            // partition-of-unity sum deviation
        {"pseudotensorial", 1e-6},     // R_h^* phi = rho(h^-1) phi (FD-limited)
        {"tensorial", 1e-8},           // horizontality + equivariance
        {"sigma_min", 1e-6},           // soldering pointwise surjectivity floor
        {"det_min", 1e-8},             // |det| floor for Cartan trivialization
        {"curvature", 1e-5},           // structure-equation residual (FD-limited)
        {"curvature_coarse", 1e-4},    // curvature through built connections
        {"quadrature", 1e-3},          // surface integrals vs analytic values
        {"quadrature_flat", 1e-6},     // integrals of identically-zero densities
        {"spd_min_eig", 1e-10},        // metric positive-definiteness floor
        {"step_jacobian", 1e-5},       // FD step for chart-transition Jacobians
        {"step_pushforward", 1e-5},    // FD step for action pushforwards
        {"step_metric", 1e-3},         // FD step for metric derivatives; larger
                                       // than the others because curvature
                                       // divides by det^2 and amplifies roundoff
        {"step_curvature", 1e-4},      // FD step for exterior derivatives
    };
    return d;
  }

  /// Named profiles selectable via the CARTANKIT_TOL_PROFILE environment
  /// variable. "strict" tightens the rounding-limited entries; "relaxed"
  /// widens everything by 10x.
  static Tolerances profile(const std::string& name) {
    Tolerances t;
    if (name == "default" || name.empty()) return t;
    if (name == "strict") {
      for (const char* k : {"membership", "exact", "chart_roundtrip", "cocycle"})
        t.values_[k] *= 0.1;
      return t;
    }
    if (name == "relaxed") {
      for (auto& [k, v] : t.values_)
        if (k.rfind("step_", 0) != 0) v *= 10.0;
      return t;
    }
    throw std::invalid_argument("unknown tolerance profile: " + name);
  }

private:
  std::map<std::string, double> values_;
};

}  // namespace cartankit

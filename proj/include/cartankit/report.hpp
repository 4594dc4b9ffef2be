#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

namespace cartankit {

/// Result of one verified property: the worst residual seen over all
/// samples, the threshold it was held to, and a self-contained statement
/// of the property so reports are readable without the source.
struct CheckRecord {
  std::string name;
  std::string reference;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = true;
  int samples = 0;

  void absorb(double residual) {
    max_residual = std::max(max_residual, residual);
    ++samples;
    if (max_residual > threshold) pass = false;
  }
};

/// Records live in a deque so references handed out by add() stay valid
/// while later records are appended.
struct CheckReport {
  std::deque<CheckRecord> records;

  CheckRecord& add(const std::string& name, const std::string& reference,
                   double threshold) {
    records.push_back(CheckRecord{name, reference, 0.0, threshold, true, 0});
    return records.back();
  }

  void merge(const CheckReport& other) {
    records.insert(records.end(), other.records.begin(), other.records.end());
  }

  bool all_pass() const {
    return std::all_of(records.begin(), records.end(),
                       [](const CheckRecord& r) { return r.pass; });
  }

  const CheckRecord* find(const std::string& name) const {
    for (const auto& r : records)
      if (r.name == name) return &r;
    return nullptr;
  }
};

/// Thrown when a construction's precondition fails. Carries the stage at
/// which the input was rejected, the property that failed, and the residual,
/// so a caller can tell a bad input from a bug in the pipeline.
class VerificationError : public std::runtime_error {
public:
  VerificationError(std::string stage, std::string reference, double residual)
      : std::runtime_error("verification failed at stage '" + stage +
                           "': " + reference +
                           " (residual " + std::to_string(residual) + ")"),
        stage_(std::move(stage)),
        reference_(std::move(reference)),
        residual_(residual) {}

  const std::string& stage() const { return stage_; }
  const std::string& reference() const { return reference_; }
  double residual() const { return residual_; }

private:
  std::string stage_;
  std::string reference_;
  double residual_;
};

/// Malformed user input (unknown scenario, bad tolerance syntax, ...).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Turn a failed record into a structured rejection at a named stage.
inline void require_pass(const CheckReport& report, const std::string& stage) {
  for (const auto& r : report.records)
    if (!r.pass) throw VerificationError(stage, r.reference, r.max_residual);
}

/// Statements of the verified properties, phrased so each record is
/// self-explanatory. Shared between library checks and serialized reports.
namespace refs {

inline constexpr const char* cocycle =
    "transition cocycle: g_ii = e and g_ij g_jk = g_ik on overlaps";
inline constexpr const char* chart_roundtrip =
    "chart transitions invert each other on overlaps";
inline constexpr const char* pou =
    "partition of unity: weights are nonnegative, sum to 1, and vanish off their charts";
inline constexpr const char* group_membership =
    "group membership: element satisfies the defining matrix constraints";
inline constexpr const char* algebra_membership =
    "algebra membership: element lies in the span of the basis";
inline constexpr const char* free_action =
    "right action is free: p.h = p forces h = e";
inline constexpr const char* equivariant_map =
    "equivariance: f(p.h) = h^-1 . f(p)";
inline constexpr const char* section_equivariant_roundtrip =
    "sections of the associated bundle correspond one-to-one to equivariant maps";
inline constexpr const char* reduction_triangle =
    "metric -> reduction -> symmetry breaking -> reduction closes up";
inline constexpr const char* pseudotensorial =
    "pseudotensorial equivariance: (R_h^* phi) = rho(h^-1) phi";
inline constexpr const char* tensorial =
    "tensorial: pseudotensorial and vanishing on vertical arguments";
inline constexpr const char* tensorial_bundle_roundtrip =
    "tensorial forms correspond one-to-one to associated-bundle-valued forms on the base";
inline constexpr const char* connection_vertical =
    "connection reproduces fundamental fields: gamma(X at p) = X";
inline constexpr const char* connection_equivariant =
    "connection equivariance: gamma((R_h)_* w) = Ad(h^-1) gamma(w)";
inline constexpr const char* soldering_surjective =
    "soldering form is pointwise surjective onto the model space";
inline constexpr const char* soldering_tensorial =
    "soldering form is tensorial of type rho";
inline constexpr const char* fundamental_form =
    "fundamental form theta_u(X) = u^-1(pi_* X) on the frame bundle";
inline constexpr const char* witness_soldering_roundtrip =
    "tangent-bundle identifications correspond one-to-one to soldering forms";
inline constexpr const char* cartan_iso =
    "cartan connection is a pointwise isomorphism T_p P -> g";
inline constexpr const char* cartan_equivariant =
    "cartan connection equivariance: (R_h)^* omega = Ad(h^-1) omega";
inline constexpr const char* cartan_fundamental =
    "cartan connection reproduces fundamental fields: omega(X at p) = X";
inline constexpr const char* cartan_projection =
    "projection of the cartan connection along h recovers the soldering form";
inline constexpr const char* curvature_flat =
    "maurer-cartan structure equation: curvature of the canonical form vanishes";
inline constexpr const char* curvature_equivariant =
    "curvature equivariance: (R_h)^* Omega = Ad(h^-1) Omega";
inline constexpr const char* gauss_bonnet =
    "total curvature integral matches 2 pi times the Euler number";
inline constexpr const char* obstruction =
    "soldering condition unsatisfiable: Euler numbers differ (TM: 2, associated plane bundle: 0)";

}  // namespace refs

}  // namespace cartankit

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <type_traits>

namespace cartankit {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Deterministic sample stream. Wraps the (fully specified) mt19937_64
/// engine but converts to doubles by bit manipulation, so the stream is
/// identical on every platform; std::uniform_real_distribution is not.
class SampleStream {
public:
  explicit SampleStream(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform in [-scale, scale).
  double symmetric(double scale) { return uniform(-scale, scale); }

  /// Vector with entries uniform in [-scale, scale).
  Vec vector(int dim, double scale) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = symmetric(scale);
    return v;
  }

  std::uint64_t integer(std::uint64_t bound) { return eng_() % bound; }

private:
  std::mt19937_64 eng_;
};

namespace fd {

/// Richardson-extrapolated central difference of f : R -> T at t = 0.
/// Combines steps h and h/2 to cancel the leading O(h^2) error term.
/// T may be double or a dense Eigen type.
template <class F>
auto derivative(F&& f, double h) {
  using R = std::decay_t<decltype(f(0.0))>;
  R fp = f(h);
  R fm = f(-h);
  R fp2 = f(h / 2.0);
  R fm2 = f(-h / 2.0);
  R d1 = (fp - fm) / (2.0 * h);
  R d2 = (fp2 - fm2) / h;
  return R((4.0 * d2 - d1) / 3.0);
}

/// Plain central difference (no extrapolation).
template <class F>
auto derivative_plain(F&& f, double h) {
  using R = std::decay_t<decltype(f(0.0))>;
  R fp = f(h);
  R fm = f(-h);
  return R((fp - fm) / (2.0 * h));
}

/// Jacobian of g : R^m -> R^k at x, column by column.
template <class G>
Mat jacobian(G&& g, const Vec& x, double h) {
  Vec fx = g(x);
  Mat J(fx.size(), x.size());
  for (int j = 0; j < x.size(); ++j) {
    J.col(j) = derivative(
        [&](double t) {
          Vec xt = x;
          xt[j] += t;
          return Vec(g(xt));
        },
        h);
  }
  return J;
}

/// First partial of a scalar field.
template <class F>
double partial(F&& f, const Vec& x, int i, double h) {
  return derivative(
      [&](double t) {
        Vec y = x;
        y[i] += t;
        return f(y);
      },
      h);
}

/// Second partial d^2 f / dx_i dx_j of a scalar field, Richardson-extrapolated.
template <class F>
double second_partial(F&& f, const Vec& x, int i, int j, double h) {
  auto shift = [&](double a, double b) {
    Vec y = x;
    y[i] += a;
    y[j] += b;
    return f(y);
  };
  double f0 = f(x);
  auto at = [&](double s) {
    if (i == j) return (shift(s, 0) - 2.0 * f0 + shift(-s, 0)) / (s * s);
    return (shift(s, s) - shift(s, -s) - shift(-s, s) + shift(-s, -s)) / (4.0 * s * s);
  };
  return (4.0 * at(h / 2.0) - at(h)) / 3.0;
}

}  // namespace fd

/// Symmetric positive-definite square root via eigendecomposition.
inline Mat spd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.operatorSqrt();
}

/// SPD polar factor of an invertible matrix: the S in a = S q with
/// q orthogonal. Invariant under right multiplication by orthogonals.
inline Mat polar_spd_factor(const Mat& a) { return spd_sqrt(a * a.transpose()); }

inline double smallest_singular_value(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().minCoeff();
}

}  // namespace cartankit

#pragma once

#include "cartankit/numerics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cartankit::lie {

/// A matrix Lie group, described by exactly the data the library consumes:
/// ambient matrix size, a basis of the Lie algebra inside gl(n), a membership
/// residual vanishing on the group, and one representative per connected
/// component. Optional exp/log hooks supply closed forms where a group has
/// one; otherwise the dense matrix exponential and principal logarithm apply.
struct GroupSpec {
  std::string name;
  int matrix_dim = 0;
  int algebra_dim = 0;
  std::vector<Mat> basis;
  std::function<double(const Mat&)> membership;
  std::vector<Mat> components;
  std::function<Mat(const Mat&)> exp_hook;
  std::function<Mat(const Mat&)> log_hook;
  double sample_scale = 1.0;  // coordinate radius kept inside the injectivity domain
};

inline Vec flatten(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

inline Mat basis_stack(const GroupSpec& g) {
  Mat b(g.matrix_dim * g.matrix_dim, g.algebra_dim);
  for (int j = 0; j < g.algebra_dim; ++j) b.col(j) = flatten(g.basis[j]);
  return b;
}

inline Mat algebra_matrix(const GroupSpec& g, const Vec& coords) {
  Mat x = Mat::Zero(g.matrix_dim, g.matrix_dim);
  for (int j = 0; j < g.algebra_dim; ++j) x += coords[j] * g.basis[j];
  return x;
}

/// Least-squares re-expansion of an ambient matrix in the algebra basis.
/// The residual measures the component outside the span; callers decide
/// whether a nonzero residual is an error.
inline Vec algebra_coords(const GroupSpec& g, const Mat& x,
                          double* residual = nullptr) {
  Mat b = basis_stack(g);
  Vec v = flatten(x);
  Vec c = b.colPivHouseholderQr().solve(v);
  if (residual) *residual = (b * c - v).norm();
  return c;
}

inline double algebra_residual(const GroupSpec& g, const Mat& x) {
  double r = 0.0;
  algebra_coords(g, x, &r);
  return r;
}

inline Mat exp_matrix(const GroupSpec& g, const Mat& x) {
  return g.exp_hook ? g.exp_hook(x) : Mat(x.exp());
}

inline Mat exp(const GroupSpec& g, const Vec& coords) {
  return exp_matrix(g, algebra_matrix(g, coords));
}

/// Principal logarithm as an ambient algebra matrix. Defined on the image
/// of exp restricted to the sampling radius; not on other components.
inline Mat log_matrix(const GroupSpec& g, const Mat& a) {
  return g.log_hook ? g.log_hook(a) : Mat(a.log());
}

inline Vec log(const GroupSpec& g, const Mat& a) {
  return algebra_coords(g, log_matrix(g, a));
}

inline Vec bracket(const GroupSpec& g, const Vec& x, const Vec& y) {
  Mat xm = algebra_matrix(g, x);
  Mat ym = algebra_matrix(g, y);
  return algebra_coords(g, xm * ym - ym * xm);
}

inline Vec Ad(const GroupSpec& g, const Mat& a, const Vec& x) {
  return algebra_coords(g, a * algebra_matrix(g, x) * a.inverse());
}

inline Mat Ad_matrix(const GroupSpec& g, const Mat& a) {
  Mat inv = a.inverse();
  Mat m(g.algebra_dim, g.algebra_dim);
  for (int j = 0; j < g.algebra_dim; ++j)
    m.col(j) = algebra_coords(g, a * g.basis[j] * inv);
  return m;
}

inline Mat ad_matrix(const GroupSpec& g, const Vec& x) {
  Mat m(g.algebra_dim, g.algebra_dim);
  Vec ej = Vec::Zero(g.algebra_dim);
  for (int j = 0; j < g.algebra_dim; ++j) {
    ej.setZero();
    ej[j] = 1.0;
    m.col(j) = bracket(g, x, ej);
  }
  return m;
}

inline Vec sample_algebra(const GroupSpec& g, SampleStream& rng) {
  return rng.vector(g.algebra_dim, g.sample_scale);
}

/// Random group element. Covers every connected component unless the caller
/// restricts to the identity component (needed wherever log is applied).
inline Mat sample_group(const GroupSpec& g, SampleStream& rng,
                        bool all_components = true) {
  Mat a = exp(g, sample_algebra(g, rng));
  if (all_components && g.components.size() > 1)
    a = g.components[rng.integer(g.components.size())] * a;
  return a;
}

/// A linear representation: group elements act on coordinate vectors of a
/// module through matrix(), algebra elements through differential(), which
/// is the derivative of matrix() along one-parameter subgroups.
struct Representation {
  int dim = 0;
  std::function<Mat(const Mat&)> matrix;
  std::function<Mat(const Mat&)> differential;  // argument is an ambient algebra matrix
};

inline Representation standard_representation(int n) {
  Representation r;
  r.dim = n;
  r.matrix = [](const Mat& a) { return a; };
  r.differential = [](const Mat& x) { return x; };
  return r;
}

inline Representation trivial_representation(int d) {
  Representation r;
  r.dim = d;
  r.matrix = [d](const Mat&) { return Mat(Mat::Identity(d, d)); };
  r.differential = [d](const Mat&) { return Mat(Mat::Zero(d, d)); };
  return r;
}

inline Representation adjoint_representation(const GroupSpec& g) {
  Representation r;
  r.dim = g.algebra_dim;
  r.matrix = [g](const Mat& a) { return Ad_matrix(g, a); };
  r.differential = [g](const Mat& x) {
    Mat m(g.algebra_dim, g.algebra_dim);
    for (int j = 0; j < g.algebra_dim; ++j)
      m.col(j) = algebra_coords(g, x * g.basis[j] - g.basis[j] * x);
    return m;
  };
  return r;
}

inline Mat rotation2(double t) {
  Mat r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

inline Mat hat3(const Vec& w) {
  Mat x = Mat::Zero(3, 3);
  x(0, 1) = -w[2];
  x(1, 0) = w[2];
  x(0, 2) = w[1];
  x(2, 0) = -w[1];
  x(1, 2) = -w[0];
  x(2, 1) = w[0];
  return x;
}

inline Vec vee3(const Mat& x) {
  Vec w(3);
  w << x(2, 1), x(0, 2), x(1, 0);
  return w;
}

/// exp of a 3x3 skew matrix, with the sin(phi)/phi coefficients switched to
/// series below phi = 1e-4 to avoid cancellation.
inline Mat rotation3(const Vec& w) {
  double phi = w.norm();
  double p2 = phi * phi;
  double a, b;
  if (phi < 1e-4) {
    a = 1.0 - p2 / 6.0 + p2 * p2 / 120.0;
    b = 0.5 - p2 / 24.0 + p2 * p2 / 720.0;
  } else {
    a = std::sin(phi) / phi;
    b = (1.0 - std::cos(phi)) / p2;
  }
  Mat k = hat3(w);
  return Mat::Identity(3, 3) + a * k + b * (k * k);
}

inline GroupSpec so2() {
  GroupSpec g;
  g.name = "SO(2)";
  g.matrix_dim = 2;
  g.algebra_dim = 1;
  Mat j(2, 2);
  j << 0, -1, 1, 0;
  g.basis = {j};
  g.membership = [](const Mat& a) {
    return (a.transpose() * a - Mat::Identity(2, 2)).norm() +
           std::abs(a.determinant() - 1.0);
  };
  g.components = {Mat::Identity(2, 2)};
  g.exp_hook = [](const Mat& x) { return rotation2(x(1, 0)); };
  g.log_hook = [j](const Mat& a) {
    return Mat(std::atan2(a(1, 0), a(0, 0)) * j);
  };
  g.sample_scale = 1.5;
  return g;
}

inline GroupSpec so3() {
  GroupSpec g;
  g.name = "SO(3)";
  g.matrix_dim = 3;
  g.algebra_dim = 3;
  for (int i = 0; i < 3; ++i) {
    Vec e = Vec::Zero(3);
    e[i] = 1.0;
    g.basis.push_back(hat3(e));
  }
  g.membership = [](const Mat& a) {
    return (a.transpose() * a - Mat::Identity(3, 3)).norm() +
           std::abs(a.determinant() - 1.0);
  };
  g.components = {Mat::Identity(3, 3)};
  g.exp_hook = [](const Mat& x) { return rotation3(vee3(x)); };
  g.log_hook = [](const Mat& a) {
    Eigen::Matrix3d r = a;
    Eigen::AngleAxisd aa(r);
    return hat3(Vec(aa.angle() * aa.axis()));
  };
  g.sample_scale = 1.0;
  return g;
}

inline GroupSpec orthogonal(int n) {
  GroupSpec g;
  g.name = "O(" + std::to_string(n) + ")";
  g.matrix_dim = n;
  g.algebra_dim = n * (n - 1) / 2;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Mat e = Mat::Zero(n, n);
      e(j, i) = 1.0;
      e(i, j) = -1.0;
      g.basis.push_back(e);
    }
  g.membership = [n](const Mat& a) {
    return (a.transpose() * a - Mat::Identity(n, n)).norm();
  };
  Mat refl = Mat::Identity(n, n);
  refl(n - 1, n - 1) = -1.0;
  g.components = {Mat::Identity(n, n), refl};
  g.sample_scale = 1.2;
  return g;
}

/// General linear group. Membership is an invertibility margin, scaled so a
/// singular matrix scores 1: max(0, (floor - |det|) / floor).
inline GroupSpec gl(int n, double det_floor = 1e-6) {
  GroupSpec g;
  g.name = "GL(" + std::to_string(n) + ")";
  g.matrix_dim = n;
  g.algebra_dim = n * n;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      g.basis.push_back(e);
    }
  g.membership = [det_floor](const Mat& a) {
    return std::max(0.0, (det_floor - std::abs(a.determinant())) / det_floor);
  };
  Mat flip = Mat::Identity(n, n);
  flip(0, 0) = -1.0;
  g.components = {Mat::Identity(n, n), flip};
  g.sample_scale = 0.7;
  return g;
}

/// Additive group R^n, embedded as affine (n+1)x(n+1) matrices
/// [[I, v], [0, 1]] so it composes with the other groups uniformly.
inline GroupSpec translations(int n) {
  GroupSpec g;
  g.name = "T(" + std::to_string(n) + ")";
  g.matrix_dim = n + 1;
  g.algebra_dim = n;
  for (int i = 0; i < n; ++i) {
    Mat e = Mat::Zero(n + 1, n + 1);
    e(i, n) = 1.0;
    g.basis.push_back(e);
  }
  g.membership = [n](const Mat& a) {
    Vec last = Vec::Zero(n + 1);
    last[n] = 1.0;
    return (a.topLeftCorner(n, n) - Mat::Identity(n, n)).norm() +
           (a.row(n).transpose() - last).norm();
  };
  g.components = {Mat::Identity(n + 1, n + 1)};
  g.exp_hook = [n](const Mat& x) { return Mat(Mat::Identity(n + 1, n + 1) + x); };
  g.log_hook = [n](const Mat& a) { return Mat(a - Mat::Identity(n + 1, n + 1)); };
  g.sample_scale = 2.0;
  return g;
}

/// Direct product, embedded block-diagonally. Algebra coordinates
/// concatenate, so brackets of elements from different factors vanish.
inline GroupSpec product(const GroupSpec& a, const GroupSpec& b) {
  GroupSpec g;
  g.name = a.name + " x " + b.name;
  const int na = a.matrix_dim;
  const int nb = b.matrix_dim;
  g.matrix_dim = na + nb;
  g.algebra_dim = a.algebra_dim + b.algebra_dim;
  auto embed = [na, nb](const Mat& xa, const Mat& xb) {
    Mat m = Mat::Zero(na + nb, na + nb);
    m.topLeftCorner(na, na) = xa;
    m.bottomRightCorner(nb, nb) = xb;
    return m;
  };
  for (const Mat& e : a.basis) g.basis.push_back(embed(e, Mat::Zero(nb, nb)));
  for (const Mat& e : b.basis) g.basis.push_back(embed(Mat::Zero(na, na), e));
  g.membership = [a = a.membership, b = b.membership, na, nb](const Mat& m) {
    return a(m.topLeftCorner(na, na)) + b(m.bottomRightCorner(nb, nb)) +
           m.topRightCorner(na, nb).norm() + m.bottomLeftCorner(nb, na).norm();
  };
  for (const Mat& ca : a.components)
    for (const Mat& cb : b.components) g.components.push_back(embed(ca, cb));
  g.exp_hook = [a, b, na, nb, embed](const Mat& x) {
    return embed(exp_matrix(a, x.topLeftCorner(na, na)),
                 exp_matrix(b, x.bottomRightCorner(nb, nb)));
  };
  g.log_hook = [a, b, na, nb, embed](const Mat& m) {
    return embed(log_matrix(a, m.topLeftCorner(na, na)),
                 log_matrix(b, m.bottomRightCorner(nb, nb)));
  };
  g.sample_scale = std::min(a.sample_scale, b.sample_scale);
  return g;
}

}  // namespace cartankit::lie

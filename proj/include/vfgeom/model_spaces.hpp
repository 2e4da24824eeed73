#pragma once

// Ambient model spaces as subsets of flat (pseudo-)Euclidean coordinate spaces.
//
// Coordinate conventions:
//   flat            R^N (optionally Lorentzian)
//   sphere          S^n in R^{n+1}
//   hyperbolic      H^n in R^{n+1}_1, last axis timelike, x_{n+1} > 0
//   product         Q_eps^n x R, the line coordinate t is the last axis
//   warped          I x_rho Q_eps^n, coordinates (t, x), t is the first axis,
//                   metric dt^2 + rho(t)^2 <dx, dx>_Q

#include <string>
#include <utility>
#include <vector>

#include "vfgeom/tensor_kernel.hpp"

namespace vfgeom {

inline constexpr double kSingularMargin = 1e-3;

enum class SpaceKind { flat, sphere, hyperbolic, product_with_line, warped_interval };

enum class WarpingKind { sin, sinh, cosh, exp_over_sqrt2, identity, sqrt2_exp };

/// A positive warping function rho on an open interval.
struct Warping {
  WarpingKind kind = WarpingKind::identity;
  Interval interval;  // already inset by kSingularMargin at singular endpoints

  static Warping make(WarpingKind kind);
  /// Accepts sin, sinh, cosh, exp (e^t/sqrt2), id, sqrt2_exp.
  static Warping parse(const std::string& name);
  std::string name() const;

  template <class T>
  T eval(const T& t) const {
    switch (kind) {
      case WarpingKind::sin: return sin(t);
      case WarpingKind::sinh: return sinh(t);
      case WarpingKind::cosh: return cosh(t);
      case WarpingKind::exp_over_sqrt2: return exp(t) / std::sqrt(2.0);
      case WarpingKind::identity: return t;
      case WarpingKind::sqrt2_exp: return std::sqrt(2.0) * exp(t);
    }
    return t;
  }
  double derivative(double t) const;
};

template <class T>
std::pair<T, T> epsilon_scalars(int eps, const T& s) {
  switch (eps) {
    case 1: return {cos(s), sin(s)};
    case 0: return {T(1.0), s};
    case -1: return {cosh(s), sinh(s)};
    default: throw PreconditionError("epsilon must be -1, 0 or 1");
  }
}

class AmbientSpace {
 public:
  static AmbientSpace flat(int dim);
  static AmbientSpace flat(const Signature& signature);
  static AmbientSpace sphere(int n);
  static AmbientSpace hyperbolic(int n);
  static AmbientSpace product(int eps, int n);
  static AmbientSpace warped(const Warping& rho, int eps, int n);
  /// Space form Q_eps^n in its standard embedding (R^n, S^n or H^n).
  static AmbientSpace space_form(int eps, int n);

  /// Inverse of describe(): flat:N, lorentz:N, sphere:n, hyperbolic:n,
  /// product:eps:n, warped:rho:eps:n.
  static AmbientSpace parse(const std::string& text);
  std::string describe() const;

  SpaceKind kind() const { return kind_; }
  int embed_dim() const { return signature_.dim; }
  /// Intrinsic dimension.
  int dim() const;
  int model_dim() const { return n_; }
  int epsilon() const { return eps_; }
  /// Signature of the flat coordinate space (for warped spaces, of dt^2 + <,>_Q).
  const Signature& signature() const { return signature_; }
  const Warping& warping() const;
  bool is_warped() const { return kind_ == SpaceKind::warped_interval; }
  /// Index of the distinguished line coordinate for products and warped spaces.
  int line_axis() const;
  /// Coordinate range of the model factor Q inside the embedding.
  std::pair<int, int> model_range() const;

  /// Distance of p from the defining constraint; 0 for flat spaces.
  double membership_residual(const VectorXd& p) const;
  /// Metric at p as an embed_dim x embed_dim matrix.
  MatrixXd metric(const VectorXd& p) const;
  double inner(const VectorXd& p, const VectorXd& u, const VectorXd& v) const;
  /// Vectors spanning the metric-orthogonal complement of T_pN in the coordinate space.
  std::vector<VectorXd> constraint_normals(const VectorXd& p) const;
  /// Largest constraint violation of v as a tangent vector at p.
  double tangency_residual(const VectorXd& p, const VectorXd& v) const;
  VectorXd project_tangent(const VectorXd& p, const VectorXd& v) const;
  /// Christoffel term Gamma(v, w) of the coordinate connection; zero unless warped.
  VectorXd christoffel(const VectorXd& p, const VectorXd& v, const VectorXd& w) const;

  bool operator==(const AmbientSpace& other) const;

 private:
  SpaceKind kind_ = SpaceKind::flat;
  Signature signature_;
  int n_ = 0;
  int eps_ = 0;
  Warping warping_;
};

/// Convenience: the warping value rho(t) of a warped space; throws outside I.
double warping_eval(const AmbientSpace& space, double t);

}  // namespace vfgeom

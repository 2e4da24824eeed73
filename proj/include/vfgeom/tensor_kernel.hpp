#pragma once

// Signature-aware linear algebra and second-order jets of parametric maps.

#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "vfgeom/errors.hpp"
#include "vfgeom/hyperdual.hpp"

namespace vfgeom {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline constexpr double kDefaultFdStep = 1e-5;
inline constexpr double kDefaultHessianStep = 1e-4;
inline constexpr double kNullThreshold = 1e-8;
inline constexpr double kFdTolerance = 1e-5;
inline constexpr double kAnalyticTolerance = 1e-9;

/// Diagonal metric of index <= 1 on R^dim. Axes are 0-based.
struct Signature {
  int dim = 0;
  std::vector<int> negative_axes;

  static Signature euclidean(int dim);
  /// R^dim_1 with the last axis timelike.
  static Signature lorentzian(int dim);
  static Signature lorentzian(int dim, int negative_axis);

  double sign(int axis) const;
  bool is_euclidean() const { return negative_axes.empty(); }
  MatrixXd matrix() const;

  template <class T>
  T inner(const VecX<T>& u, const VecX<T>& v) const {
    check(static_cast<int>(u.size()), static_cast<int>(v.size()));
    T acc = T(0.0);
    for (int i = 0; i < dim; ++i) {
      acc += sign(i) * (u(i) * v(i));
    }
    return acc;
  }

  void check(int u_size, int v_size) const;
  bool operator==(const Signature& other) const = default;
};

double signature_inner(const Signature& form, const VectorXd& u, const VectorXd& v);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const { return x > lo && x < hi; }
  double width() const { return hi - lo; }
};

/// Axis-aligned parameter box; open intervals, possibly unbounded.
struct ParamBox {
  std::vector<Interval> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  bool contains(const VectorXd& u) const;
  /// True if u +- margin_i e_i stays strictly inside for every axis.
  bool contains_with_margin(const VectorXd& u, const VectorXd& margin) const;
  ParamBox inset(double delta) const;
};

/// Uniform grid over a bounded box, endpoints included, first axis slowest. An
/// axis with one point uses its midpoint.
std::vector<VectorXd> box_grid(const ParamBox& box, const std::vector<int>& shape);
std::vector<VectorXd> box_grid(const ParamBox& box, int per_axis);

/// A map R^in -> R^out that may also be evaluated on hyper-dual inputs, which
/// gives exact first and second derivatives.
class SmoothMap {
 public:
  using DoubleFn = std::function<VectorXd(const VectorXd&)>;
  using DualFn = std::function<VecX<HyperDual>(const VecX<HyperDual>&)>;

  SmoothMap() = default;
  SmoothMap(int in_dim, int out_dim, DoubleFn f, DualFn f_dual = {});

  /// Wraps a generic callable usable with both VecX<double> and VecX<HyperDual>.
  template <class F>
  static SmoothMap generic(int in_dim, int out_dim, F f) {
    return SmoothMap(
        in_dim, out_dim, [f](const VectorXd& u) -> VectorXd { return f(u); },
        [f](const VecX<HyperDual>& u) -> VecX<HyperDual> { return f(u); });
  }

  template <class T>
  VecX<T> eval(const VecX<T>& u) const {
    check_input(static_cast<int>(u.size()));
    if constexpr (std::is_same_v<T, double>) {
      return value_(u);
    } else {
      if (!dual_) {
        throw PreconditionError("map has no exact derivative path");
      }
      return dual_(u);
    }
  }

  VectorXd operator()(const VectorXd& u) const { return eval<double>(u); }

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  bool exact() const { return static_cast<bool>(dual_); }
  bool valid() const { return static_cast<bool>(value_); }

 private:
  void check_input(int size) const;

  int in_dim_ = 0;
  int out_dim_ = 0;
  DoubleFn value_;
  DualFn dual_;
};

/// outer o inner; exact if both are.
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

struct Jet2 {
  VectorXd value;
  MatrixXd jacobian;             // N x m
  std::vector<MatrixXd> hessian; // N entries, each m x m

  int ambient_dim() const { return static_cast<int>(value.size()); }
  int param_dim() const { return static_cast<int>(jacobian.cols()); }
  /// d2f/du_i du_j as an ambient vector.
  VectorXd second(int i, int j) const;
};

struct Analytic {};
struct CentralDifference {
  double h = kDefaultFdStep;
  double hessian_h = kDefaultHessianStep;
};
using Scheme = std::variant<Analytic, CentralDifference>;

/// Value, Jacobian and Hessian of `map` at `u`. With a domain, u must lie
/// strictly inside it (by 2h per axis for finite differences).
Jet2 jet2(const SmoothMap& map, const VectorXd& u, const Scheme& scheme = Analytic{},
          const ParamBox* domain = nullptr);

/// Jacobian only; cheaper than jet2.
MatrixXd jacobian(const SmoothMap& map, const VectorXd& u, const Scheme& scheme = Analytic{});

/// Orthonormal (Gram diagonal +-1) frame with respect to a symmetric form.
struct Frame {
  std::vector<VectorXd> vectors;
  MatrixXd form;

  MatrixXd gram() const;
  int size() const { return static_cast<int>(vectors.size()); }
};

/// Gram-Schmidt in the given form. Throws NullVectorError on a near-null
/// vector and DegenerateError on a linearly dependent seed.
Frame frame_orthonormalize(const MatrixXd& form, const std::vector<VectorXd>& seed,
                           double null_eps = kNullThreshold);
Frame frame_orthonormalize(const Signature& form, const std::vector<VectorXd>& seed,
                           double null_eps = kNullThreshold);

struct Split {
  VectorXd coeffs;
  VectorXd normal;
};

/// w = sum coeffs_i basis_i + normal, normal orthogonal to every basis vector.
Split tangent_normal_split(const MatrixXd& form, const std::vector<VectorXd>& basis,
                           const VectorXd& w);
Split tangent_normal_split(const Signature& form, const std::vector<VectorXd>& basis,
                           const VectorXd& w);
Split tangent_normal_split(const MatrixXd& form, const MatrixXd& basis_columns,
                           const VectorXd& w);

// Pseudo-orthonormal basis of R^{n+1}_1 (last axis timelike):
//   e_0 = (0,...,0, 1/2, 1/2), e_n = (0,...,0, -1/2, 1/2), e_i standard for 1 <= i <= n-1,
// so <e_0,e_0> = <e_n,e_n> = 0 and <e_0,e_n> = -1/2.
std::vector<VectorXd> pseudo_orthonormal_basis(int n);

/// Coordinates x_0..x_n of p in the pseudo-orthonormal basis.
template <class T>
VecX<T> pseudo_orthonormal_coords(const VecX<T>& p) {
  const int n = static_cast<int>(p.size()) - 1;
  VecX<T> x(n + 1);
  const T& spacelike = p(n - 1);
  const T& timelike = p(n);
  // <p,e_n> = -(1/2) p_{n-1} - (1/2) p_n, <p,e_0> = (1/2) p_{n-1} - (1/2) p_n
  x(0) = spacelike + timelike;
  x(n) = timelike - spacelike;
  for (int i = 1; i < n; ++i) {
    x(i) = p(i - 1);
  }
  return x;
}

template <class T>
VecX<T> from_pseudo_orthonormal_coords(const VecX<T>& x) {
  const int n = static_cast<int>(x.size()) - 1;
  VecX<T> p(n + 1);
  for (int i = 1; i < n; ++i) {
    p(i - 1) = x(i);
  }
  p(n - 1) = 0.5 * (x(0) - x(n));
  p(n) = 0.5 * (x(0) + x(n));
  return p;
}

}  // namespace vfgeom

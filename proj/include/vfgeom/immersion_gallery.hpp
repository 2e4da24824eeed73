#pragma once

// Explicit immersion families with the properties they are known to satisfy.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfgeom/conformal_atlas.hpp"
#include "vfgeom/model_spaces.hpp"
#include "vfgeom/tensor_kernel.hpp"

namespace vfgeom {

/// Smallest Jacobian singular value accepted on a declared domain.
inline constexpr double kRegularityFloor = 1e-6;

enum class Property {
  constant_ratio,
  principal_direction,
  t_constant,
  n_constant,
  normal_parallel,
  polar,
  gauss_constant,
};

std::string property_name(Property p);

/// A property an immersion should have with respect to an ambient field. `expected`
/// holds the constant value when one is known (ratio, length, or polar constant).
struct Claim {
  Property property;
  std::string field;
  std::optional<double> expected;
};

struct ImmersionSpec {
  std::string name;
  std::vector<std::string> param_names;
  /// Finite parameter box, already inset from singular points.
  ParamBox domain;
  SmoothMap map;
  AmbientSpace ambient;
  std::vector<Claim> claims;

  int param_dim() const { return map.in_dim(); }
  bool is_hypersurface() const { return param_dim() == ambient.dim() - 1; }
  VectorXd operator()(const VectorXd& u) const { return map(u); }
  const Claim* find_claim(Property p) const;
};

/// phi_s = C_eps(s) phi_0 + S_eps(s) N, the parallel family of a hypersurface
/// phi_0 of Q_eps^n with unit normal N.
class HypersurfaceFamily {
 public:
  HypersurfaceFamily(SmoothMap base, SmoothMap normal, int eps, ParamBox x_box);

  int eps() const { return eps_; }
  int model_dim() const;
  int base_dim() const { return base_.in_dim(); }
  const ParamBox& x_box() const { return x_box_; }
  AmbientSpace space() const { return AmbientSpace::space_form(eps_, model_dim()); }
  const SmoothMap& base() const { return base_; }
  const SmoothMap& normal() const { return normal_; }

  /// x -> phi_s(x).
  SmoothMap member(double s) const;
  /// (s, x) -> phi_s(x).
  SmoothMap as_map() const;

  /// Circle of latitude a on S^2; N points toward the north pole.
  static HypersurfaceFamily latitude(double a);
  /// Unit circle in R^2 with outward normal.
  static HypersurfaceFamily unit_circle();
  /// The geodesic (sinh x, 0, cosh x) of H^2 with N = e_2.
  static HypersurfaceFamily hyperbolic_geodesic();
  /// Clifford torus in S^3.
  static HypersurfaceFamily clifford_torus();
  /// A point of Q_eps^1, so that members are unit-speed curves.
  static HypersurfaceFamily point(int eps);
  /// Unit-speed curve gamma of H^2 with derivative dgamma; N = gamma x gamma' with the
  /// Lorentzian cross product.
  static HypersurfaceFamily from_h2_curve(const SmoothMap& gamma, const SmoothMap& dgamma,
                                          Interval t_range);

 private:
  SmoothMap base_;
  SmoothMap normal_;
  int eps_;
  ParamBox x_box_;
};

HypersurfaceFamily parallel_hypersurface_family(const SmoothMap& base, const SmoothMap& normal,
                                                int eps, const ParamBox& x_box);

/// Scalar profile a(s) used as the last curve component or as a radial exponent.
struct Profile {
  enum class Kind { linear, log_sec, sqrt_G, constant, cubic, custom };
  Kind kind = Kind::linear;
  double A = 1.0;  // slope (linear, cubic) or value (constant)
  double C = 0.0;  // shift (log_sec, sqrt_G) or cubic coefficient
  SmoothMap custom_fn;
  std::string label;

  static Profile linear(double A);
  /// log sec(s + C).
  static Profile log_sec(double C);
  /// log sqrt(1 + G(s + C)^2) with G the inverse of x - atan x.
  static Profile sqrt_G(double C);
  static Profile constant(double value);
  /// A s + b s^3.
  static Profile cubic(double A, double b);
  static Profile custom(const SmoothMap& a, const std::string& label);

  /// Open set of s where the profile is smooth, inset by kSingularMargin.
  Interval domain() const;
  std::string name() const;

  template <class T>
  T eval(const T& s) const;
};

/// G = F^{-1} for F(x) = x - atan x on y >= 0.
double inverse_x_minus_atan(double y);
HyperDual inverse_x_minus_atan(const HyperDual& y);

template <class T>
T Profile::eval(const T& s) const {
  switch (kind) {
    case Kind::linear: return A * s;
    case Kind::log_sec: return -log(cos(s + C));
    case Kind::sqrt_G: {
      const T g = inverse_x_minus_atan(s + C);
      return 0.5 * log(1.0 + g * g);
    }
    case Kind::constant: return T(A);
    case Kind::cubic: return A * s + C * (s * s * s);
    case Kind::custom: {
      VecX<T> u(1);
      u(0) = s;
      return custom_fn.eval<T>(u)(0);
    }
  }
  return s;
}

/// gamma(s) = (S_eps(u), C_eps(u), a(s)) in Q_eps^1 x R with u = omega s + bend s^2.
/// For eps = 0 the model curve is (u, 1).
struct CurveSpec {
  SmoothMap gamma;  // s -> R^{k+2}
  int k = 1;
  int eps = 1;
  double omega = 1.0;
  bool unit_speed_projection = false;
  bool geodesic_projection = false;
  Profile last;
};

CurveSpec class_a_curve(int eps, double omega, double bend, const Profile& last);

ImmersionSpec make_cr_product(const HypersurfaceFamily& family, double A,
                              Interval s_range = {-1.0, 1.0});

/// compose(mercator, make_cr_product): (F(A s), phi_s(x)) in I x_rho Q_eps^n.
/// An empty s_range picks the largest subinterval of (-1, 1) inside F's domain.
ImmersionSpec make_cr_warped(const Warping& rho, double A, const HypersurfaceFamily& family,
                             std::optional<Interval> s_range = std::nullopt, double c = 0.0);

/// Class-A construction with k = 1:
///   f(x, s) = gamma_1(s) xi(x) + gamma_2(s) phi(x) + gamma_3(s) e_t.
/// `xi` must be a unit normal of phi in Q_eps^n, parallel in its normal bundle.
ImmersionSpec make_class_a(const SmoothMap& phi, const SmoothMap& xi, int eps,
                           const ParamBox& x_box, const CurveSpec& gamma,
                           Interval s_range = {-1.0, 1.0});

/// f(s, x) = e^{a(s)} phi_s(x) in R^n \ {0} for a family in S^{n-1}.
ImmersionSpec make_radial_graph(const HypersurfaceFamily& family, const Profile& profile,
                                std::optional<Interval> s_range = std::nullopt);

/// f(x, s) = e^{gamma_3(s)} (gamma_1(s) xi(x) + gamma_2(s) phi(x)) for phi into S^{n-1}.
ImmersionSpec make_pd_radial(const SmoothMap& phi, const SmoothMap& xi, const ParamBox& x_box,
                             const CurveSpec& gamma, std::optional<Interval> s_range = std::nullopt);

struct KillingSurfaceParams {
  enum class Kind { from_curve, dini, log_spiral_cylinder, horocycle_base };
  Kind kind = Kind::dini;
  double A = 1.0;
  double sigma = 0.2;
  SmoothMap curve;             // from_curve: unit-speed curve in H^2 (standard coordinates)
  SmoothMap curve_derivative;  // from_curve: its derivative
  /// Defaults: t in (0.3, 2) for dini (away from the cuspidal edge), (-1, 1) otherwise.
  std::optional<Interval> t_range;
  Interval s_range{-1.0, 1.0};
};

/// Surfaces of R^3 \ R with the constant ratio property for a rotation field.
ImmersionSpec make_killing_surface(const KillingSurfaceParams& params);

/// Psi o f with claims carried along the map's related fields.
ImmersionSpec compose(const ConformalMapSpec& map, const ImmersionSpec& f);

/// Spherical loxodromic immersion in S^{n+1}: warp_sphere o make_cr_warped(sin, sin theta).
/// For a point family (m = 1) the curve in S^1 x R is reparametrized to unit speed.
ImmersionSpec make_spherical_loxodrome(double theta, const HypersurfaceFamily& family);

/// Parabolic loxodromic immersion in H^{n+1}: warp_hyp_parabolic o make_cr_warped(exp, 2 sin theta, c).
ImmersionSpec make_parabolic_loxodrome(double theta, const HypersurfaceFamily& family, double c);

// Reference surfaces.
ImmersionSpec make_unit_sphere();
/// Round cylinder of radius 1 with axis through (offset, 0).
ImmersionSpec make_round_cylinder(double offset = 0.0);
ImmersionSpec make_plane();
/// f(s, x) = s (cos x, sin x, 1).
ImmersionSpec make_cone();
/// e^{a t} (cos t, sin t).
ImmersionSpec make_log_spiral(double a);

/// Named registry for the command line. Numeric parameters by name; missing ones
/// take defaults. `rho` selects the warping for cr_warped.
struct GalleryParams {
  std::map<std::string, double> values;
  std::string rho = "sin";

  double get(const std::string& key, double fallback) const;
};

std::vector<std::string> gallery_names();
/// Numeric parameters accepted by an entry; throws ConfigError for an unknown name.
std::vector<std::string> gallery_param_keys(const std::string& name);
ImmersionSpec gallery_entry(const std::string& name, const GalleryParams& params = {});

}  // namespace vfgeom

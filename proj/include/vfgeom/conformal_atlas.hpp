#pragma once

// Catalog of conformal diffeomorphisms between model spaces, plus the
// Mercator-type reparametrization F' = rho(F).

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "vfgeom/model_spaces.hpp"
#include "vfgeom/tensor_kernel.hpp"

namespace vfgeom {

inline constexpr double kRk4Step = 1e-3;
inline constexpr double kMembershipTolerance = 1e-8;

/// Solution of F'(t) = rho(F(t)), F(t0) = F0 on an interval J.
/// Uses a closed form for sin, sqrt2_exp, exp and id unless RK4 is forced; sinh
/// and cosh always go through fixed-step RK4.
class Mercator {
 public:
  Mercator(const Warping& rho, double t0, double F0, Interval range, bool force_rk4 = false);
  /// Closed-form family parametrized by its integration constant c:
  ///   sin: 2 atan(e^{t-c}); sqrt2_exp: log(1/(c - sqrt2 t)); exp: log(1/(c - t/sqrt2));
  ///   id: e^{t+c}.
  static Mercator from_constant(const Warping& rho, double c, Interval range,
                                bool force_rk4 = false);

  double value(double t) const;
  HyperDual value(const HyperDual& t) const;
  template <class T>
  T operator()(const T& t) const {
    return value(t);
  }
  /// Solves F(t) = s by Newton's method.
  double inverse(double s) const;

  const Warping& rho() const { return rho_; }
  const Interval& range() const { return range_; }
  bool closed_form() const { return closed_; }
  double constant() const { return c_; }

 private:
  void build_table();
  double closed_value(double t) const;
  double rk4_from_node(double t) const;

  Warping rho_;
  double t0_;
  double F0_;
  Interval range_;
  bool closed_ = false;
  double c_ = 0.0;
  // RK4 nodes t0 + k h for k in [k_lo, k_hi].
  long k_lo_ = 0;
  std::vector<double> table_;
};

/// F on the grid points; throws ConvergenceError if the solution blows up or
/// leaves the warping interval before the end of the grid.
std::vector<double> mercator_solve(const Warping& rho, double t0, double F0,
                                   const std::vector<double>& grid, bool force_rk4 = false);

/// max over the grid of |F'(t) - rho(F(t))| with F' from five-point central
/// differences (grid points need 2h clearance from the interval ends).
double mercator_ode_residual(const Mercator& F, const std::vector<double>& grid,
                             double h = 1e-4);

/// A field pair (name on the source, name on the target) that the map relates.
struct RelatedPair {
  std::string source_field;
  std::string target_field;
};

struct ConformalMapSpec {
  std::string name;
  AmbientSpace source;
  AmbientSpace target;
  SmoothMap forward;
  std::function<VectorXd(const VectorXd&)> inverse;  // empty if not invertible
  std::function<double(const VectorXd&)> factor;      // on source points
  bool is_isometry = false;
  std::function<bool(const VectorXd&)> in_domain;          // source points
  std::function<bool(const VectorXd&)> in_inverse_domain;  // target points
  std::function<VectorXd(std::mt19937&)> sample;           // random domain point
  std::vector<RelatedPair> related;
  std::shared_ptr<const Mercator> mercator;  // set for the mercator entry
};

struct AtlasParams {
  int n = 2;
  std::string rho = "sin";  // mercator only
  double c = 0.0;           // mercator closed-form constant
  bool force_rk4 = false;   // mercator only
};

/// Solution of F' = rho(F) used by the mercator entry: closed forms with constant
/// c (c <= 0 means 1 for the exponential warpings), RK4 from F(0) = 1 for sinh and
/// F(0) = 0 for cosh, each on an interval inside its maximal domain.
Mercator default_mercator(const Warping& rho, double c = 0.0, bool force_rk4 = false);
/// Model curvature the mercator entry pairs with rho.
int default_epsilon(const Warping& rho);

std::vector<std::string> atlas_names();
ConformalMapSpec atlas_entry(const std::string& name, const AtlasParams& params = {});

ConformalMapSpec radial_exp(int n);
ConformalMapSpec mercator_map(const Mercator& F, int eps, int n);
ConformalMapSpec warp_euclid(int n);
ConformalMapSpec warp_sphere(int n);
ConformalMapSpec warp_hyp_elliptic(int n);
ConformalMapSpec warp_hyp_hyperbolic(int n);
ConformalMapSpec warp_hyp_parabolic(int n);
ConformalMapSpec killing_cover(int n);
ConformalMapSpec sphere_inversion(int n);

enum class Direction { forward, inverse };

VectorXd apply_map(const ConformalMapSpec& map, const VectorXd& p,
                   Direction direction = Direction::forward);
VectorXd pushforward(const ConformalMapSpec& map, const VectorXd& p, const VectorXd& v,
                     const Scheme& scheme = Analytic{});

/// Max over random tangent pairs (X, Y) at p, the first with Y = X, of
/// |<Psi_* X, Psi_* Y> - phi^2 <X, Y>| / (|Psi_* X| |Psi_* Y|).
double conformality_residual(const ConformalMapSpec& map, const VectorXd& p, int trials,
                             std::mt19937& rng, const Scheme& scheme = Analytic{});

/// Random point of Q_eps^n in its standard embedding.
VectorXd sample_model_point(int eps, int n, std::mt19937& rng);
/// Random tangent vector of the space at p.
VectorXd sample_tangent(const AmbientSpace& space, const VectorXd& p, std::mt19937& rng);

}  // namespace vfgeom

#include "vfgeom/immersion_gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

namespace vfgeom {

namespace {

constexpr double kCheckTolerance = 1e-9;
constexpr double kPolarTolerance = 1e-8;
constexpr double kParallelTolerance = 1e-8;
constexpr double kPi = std::numbers::pi;

std::vector<VectorXd> sample_points(const ParamBox& box, int per_axis) {
  if (box.dim() == 0) return {VectorXd(0)};
  return box_grid(box, per_axis);
}

std::string point_text(const VectorXd& u) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
  os << ')';
  return os.str();
}

ParamBox prepend(Interval s, const ParamBox& x) {
  ParamBox out;
  out.axes.push_back(s);
  out.axes.insert(out.axes.end(), x.axes.begin(), x.axes.end());
  return out;
}

ParamBox append(const ParamBox& x, Interval s) {
  ParamBox out = x;
  out.axes.push_back(s);
  return out;
}

std::vector<std::string> x_names(int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

Interval intersect(Interval a, Interval b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

void check_regular(const ImmersionSpec& f) {
  for (const auto& u : sample_points(f.domain, 9)) {
    const MatrixXd J = jacobian(f.map, u);
    const Eigen::JacobiSVD<MatrixXd> svd(J);
    if (!J.allFinite() || svd.singularValues().minCoeff() < kRegularityFloor) {
      throw DegenerateError(f.name + " is not regular at u = " + point_text(u));
    }
  }
}

// Induced metric of a family map (s, x) -> phi_s(x) must be ds^2 + g_s.
void check_polar(const SmoothMap& phi, const Signature& sig, const ParamBox& box) {
  const MatrixXd g = sig.matrix();
  for (const auto& u : sample_points(box, 5)) {
    const MatrixXd J = jacobian(phi, u);
    const MatrixXd G = J.transpose() * g * J;
    double worst = std::abs(G(0, 0) - 1.0);
    for (Eigen::Index i = 1; i < G.rows(); ++i) worst = std::max(worst, std::abs(G(0, i)));
    if (worst > kPolarTolerance) {
      throw PreconditionError("polar metric check fails at u = " + point_text(u));
    }
  }
}

template <class T>
VecX<T> combine(const T& a, const VecX<T>& x, const T& b, const VecX<T>& y) {
  VecX<T> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = a * x(i) + b * y(i);
  return out;
}

std::string transported_field(const ConformalMapSpec& map, const std::string& field) {
  for (const auto& pair : map.related) {
    if (pair.source_field == field) {
      // rho d/dt is a positive multiple of d/dt: ratios and eigenvectors agree.
      return pair.target_field == "rho_ddt" ? "ddt" : pair.target_field;
    }
  }
  return "push:" + map.name + ":" + field;
}

double F_x_minus_atan(double x) {
  if (std::abs(x) < 0.1) {
    // x^3/3 - x^5/5 + ... avoids cancellation near 0.
    const double x2 = x * x;
    double term = x * x2;
    double sum = 0.0;
    for (int k = 3; k <= 25; k += 2) {
      sum += ((k / 2) % 2 == 1 ? 1.0 : -1.0) * term / k;
      term *= x2;
    }
    return sum;
  }
  return x - std::atan(x);
}

}  // namespace

std::string property_name(Property p) {
  switch (p) {
    case Property::constant_ratio: return "constant_ratio";
    case Property::principal_direction: return "principal_direction";
    case Property::t_constant: return "t_constant";
    case Property::n_constant: return "n_constant";
    case Property::normal_parallel: return "normal_parallel";
    case Property::polar: return "polar";
    case Property::gauss_constant: return "gauss_constant";
  }
  return "unknown";
}

const Claim* ImmersionSpec::find_claim(Property p) const {
  for (const auto& c : claims) {
    if (c.property == p) return &c;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parallel hypersurface families

HypersurfaceFamily::HypersurfaceFamily(SmoothMap base, SmoothMap normal, int eps, ParamBox x_box)
    : base_(std::move(base)), normal_(std::move(normal)), eps_(eps), x_box_(std::move(x_box)) {
  if (eps < -1 || eps > 1) throw PreconditionError("epsilon must be -1, 0 or 1");
  if (base_.in_dim() != normal_.in_dim() || base_.out_dim() != normal_.out_dim()) {
    throw DimensionError("base and normal of a family have different shapes");
  }
  if (x_box_.dim() != base_.in_dim()) throw DimensionError("x box does not match the base");
  if (model_dim() < 1) throw DimensionError("family needs a model space of dimension >= 1");
  const Signature sig = space().signature();
  for (const auto& x : sample_points(x_box_, 5)) {
    const VectorXd p = base_(x);
    const VectorXd N = normal_(x);
    double worst = std::abs(sig.inner<double>(N, N) - 1.0);
    if (eps_ != 0) {
      worst = std::max(worst, std::abs(sig.inner<double>(p, p) - eps_));
      worst = std::max(worst, std::abs(sig.inner<double>(N, p)));
    }
    if (base_dim() > 0) {
      const MatrixXd J = jacobian(base_, x);
      for (Eigen::Index i = 0; i < J.cols(); ++i) {
        const VectorXd col = J.col(i);
        worst = std::max(worst, std::abs(sig.inner<double>(N, col)) / std::max(1.0, col.norm()));
      }
    }
    if (!(worst <= kCheckTolerance)) {
      throw PreconditionError("normal field fails normality checks at x = " + point_text(x));
    }
  }
}

int HypersurfaceFamily::model_dim() const {
  return eps_ == 0 ? base_.out_dim() : base_.out_dim() - 1;
}

SmoothMap HypersurfaceFamily::member(double s) const {
  const auto [c, sn] = epsilon_scalars(eps_, s);
  const SmoothMap b = base_, nn = normal_;
  return SmoothMap::generic(base_dim(), b.out_dim(), [b, nn, c = c, sn = sn](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    return combine<T>(T(c), b.eval<T>(x), T(sn), nn.eval<T>(x));
  });
}

SmoothMap HypersurfaceFamily::as_map() const {
  const SmoothMap b = base_, nn = normal_;
  const int eps = eps_, d = base_dim();
  return SmoothMap::generic(d + 1, b.out_dim(), [b, nn, eps, d](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    const VecX<T> x = u.tail(d);
    const auto [c, s] = epsilon_scalars(eps, u(0));
    return combine<T>(c, b.eval<T>(x), s, nn.eval<T>(x));
  });
}

HypersurfaceFamily HypersurfaceFamily::latitude(double a) {
  const double ca = std::cos(a), sa = std::sin(a);
  auto base = SmoothMap::generic(1, 3, [ca, sa](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    VecX<T> p(3);
    p(0) = ca * cos(x(0));
    p(1) = ca * sin(x(0));
    p(2) = T(sa);
    return p;
  });
  auto normal = SmoothMap::generic(1, 3, [ca, sa](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    VecX<T> p(3);
    p(0) = -sa * cos(x(0));
    p(1) = -sa * sin(x(0));
    p(2) = T(ca);
    return p;
  });
  return HypersurfaceFamily(base, normal, 1, ParamBox{{{-3.0, 3.0}}});
}

HypersurfaceFamily HypersurfaceFamily::unit_circle() {
  auto circle = SmoothMap::generic(1, 2, [](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    VecX<T> p(2);
    p(0) = cos(x(0));
    p(1) = sin(x(0));
    return p;
  });
  return HypersurfaceFamily(circle, circle, 0, ParamBox{{{-3.0, 3.0}}});
}

HypersurfaceFamily HypersurfaceFamily::hyperbolic_geodesic() {
  auto base = SmoothMap::generic(1, 3, [](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    VecX<T> p(3);
    p(0) = sinh(x(0));
    p(1) = T(0.0);
    p(2) = cosh(x(0));
    return p;
  });
  auto normal = SmoothMap::generic(1, 3, [](const auto& x) {
    using T = typename std::decay_t<decltype(x)>::Scalar;
    VecX<T> p(3);
    p(0) = T(0.0);
    p(1) = T(1.0);
    p(2) = T(0.0);
    return p;
  });
  return HypersurfaceFamily(base, normal, -1, ParamBox{{{-1.0, 1.0}}});
}

HypersurfaceFamily HypersurfaceFamily::clifford_torus() {
  const double r = 1.0 / std::sqrt(2.0);
  auto make = [r](double sign) {
    return SmoothMap::generic(2, 4, [r, sign](const auto& x) {
      using T = typename std::decay_t<decltype(x)>::Scalar;
      VecX<T> p(4);
      p(0) = r * cos(x(0));
      p(1) = r * sin(x(0));
      p(2) = sign * r * cos(x(1));
      p(3) = sign * r * sin(x(1));
      return p;
    });
  };
  return HypersurfaceFamily(make(1.0), make(-1.0), 1, ParamBox{{{-3.0, 3.0}, {-3.0, 3.0}}});
}

HypersurfaceFamily HypersurfaceFamily::point(int eps) {
  const auto constant = [](VectorXd v) {
    return SmoothMap::generic(0, static_cast<int>(v.size()), [v](const auto& x) {
      using T = typename std::decay_t<decltype(x)>::Scalar;
      VecX<T> p(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) p(i) = T(v(i));
      return p;
    });
  };
  switch (eps) {
    case 1: return HypersurfaceFamily(constant(VectorXd::Unit(2, 0)), constant(VectorXd::Unit(2, 1)),
                                      1, ParamBox{});
    case 0: return HypersurfaceFamily(constant(VectorXd::Zero(1)), constant(VectorXd::Ones(1)), 0,
                                      ParamBox{});
    case -1: return HypersurfaceFamily(constant(VectorXd::Unit(2, 1)),
                                       constant(VectorXd::Unit(2, 0)), -1, ParamBox{});
    default: throw PreconditionError("epsilon must be -1, 0 or 1");
  }
}

HypersurfaceFamily HypersurfaceFamily::from_h2_curve(const SmoothMap& gamma, const SmoothMap& dgamma,
                                                     Interval t_range) {
  if (gamma.in_dim() != 1 || gamma.out_dim() != 3 || dgamma.in_dim() != 1 ||
      dgamma.out_dim() != 3) {
    throw DimensionError("H^2 curve must map R -> R^3_1");
  }
  const Signature sig = Signature::lorentzian(3);
  for (const auto& t : sample_points(ParamBox{{t_range}}, 9)) {
    const VectorXd p = gamma(t);
    if (std::abs(sig.inner<double>(p, p) + 1.0) > kCheckTolerance || p(2) <= 0.0) {
      throw DomainError("curve leaves H^2 at t = " + point_text(t));
    }
  }
  auto normal = SmoothMap::generic(1, 3, [gamma, dgamma](const auto& t) {
    using T = typename std::decay_t<decltype(t)>::Scalar;
    const VecX<T> a = gamma.eval<T>(t);
    const VecX<T> b = dgamma.eval<T>(t);
    // J (a x b) with J = diag(1, 1, -1).
    VecX<T> n(3);
    n(0) = a(1) * b(2) - a(2) * b(1);
    n(1) = a(2) * b(0) - a(0) * b(2);
    n(2) = -(a(0) * b(1) - a(1) * b(0));
    return n;
  });
  return HypersurfaceFamily(gamma, normal, -1, ParamBox{{t_range}});
}

HypersurfaceFamily parallel_hypersurface_family(const SmoothMap& base, const SmoothMap& normal,
                                                int eps, const ParamBox& x_box) {
  return HypersurfaceFamily(base, normal, eps, x_box);
}

// ---------------------------------------------------------------------------
// Profiles

Profile Profile::linear(double A) {
  Profile p;
  p.kind = Kind::linear;
  p.A = A;
  return p;
}

Profile Profile::log_sec(double C) {
  Profile p;
  p.kind = Kind::log_sec;
  p.C = C;
  return p;
}

Profile Profile::sqrt_G(double C) {
  Profile p;
  p.kind = Kind::sqrt_G;
  p.C = C;
  return p;
}

Profile Profile::constant(double value) {
  Profile p;
  p.kind = Kind::constant;
  p.A = value;
  return p;
}

Profile Profile::cubic(double A, double b) {
  Profile p;
  p.kind = Kind::cubic;
  p.A = A;
  p.C = b;
  return p;
}

Profile Profile::custom(const SmoothMap& a, const std::string& label) {
  if (a.in_dim() != 1 || a.out_dim() != 1) throw DimensionError("profile must map R -> R");
  Profile p;
  p.kind = Kind::custom;
  p.custom_fn = a;
  p.label = label;
  return p;
}

Interval Profile::domain() const {
  switch (kind) {
    case Kind::log_sec: return {-kPi / 2 - C + kSingularMargin, kPi / 2 - C - kSingularMargin};
    case Kind::sqrt_G: return {-C + kSingularMargin, std::numeric_limits<double>::infinity()};
    default: return {};
  }
}

std::string Profile::name() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::linear: os << "linear(A=" << A << ')'; break;
    case Kind::log_sec: os << "log_sec(C=" << C << ')'; break;
    case Kind::sqrt_G: os << "sqrt_G(C=" << C << ')'; break;
    case Kind::constant: os << "constant(" << A << ')'; break;
    case Kind::cubic: os << "cubic(A=" << A << ", b=" << C << ')'; break;
    case Kind::custom: os << "custom(" << label << ')'; break;
  }
  return os.str();
}

double inverse_x_minus_atan(double y) {
  if (!(y >= 0.0)) throw DomainError("x - atan x is inverted only for y >= 0");
  if (y == 0.0) return 0.0;
  double lo = 0.0, hi = std::max(10.0, 2.0 * y + 5.0);
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (F_x_minus_atan(mid) < y ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double d = x * x / (1.0 + x * x);
    if (d < 1e-6) break;
    const double next = x - (F_x_minus_atan(x) - y) / d;
    if (!(next >= lo && next <= hi)) break;
    x = next;
  }
  if (!(std::abs(F_x_minus_atan(x) - y) <= 1e-12 * std::max(1.0, y))) {
    throw ConvergenceError("root finding for G did not converge");
  }
  return x;
}

HyperDual inverse_x_minus_atan(const HyperDual& y) {
  const double g = inverse_x_minus_atan(y.a);
  if (g <= 0.0) throw DomainError("G is not differentiable at 0");
  const double g1 = (1.0 + g * g) / (g * g);
  const double g2 = -2.0 / (g * g * g) * g1;
  return lift(y, g, g1, g2);
}

CurveSpec class_a_curve(int eps, double omega, double bend, const Profile& last) {
  if (eps < -1 || eps > 1) throw PreconditionError("epsilon must be -1, 0 or 1");
  CurveSpec c;
  c.k = 1;
  c.eps = eps;
  c.omega = omega;
  c.last = last;
  c.geodesic_projection = bend == 0.0 && omega != 0.0;
  c.unit_speed_projection = bend == 0.0 && std::abs(omega) == 1.0;
  c.gamma = SmoothMap::generic(1, 3, [eps, omega, bend, last](const auto& s) {
    using T = typename std::decay_t<decltype(s)>::Scalar;
    const T u = omega * s(0) + bend * (s(0) * s(0));
    const auto [C, S] = epsilon_scalars(eps, u);
    VecX<T> g(3);
    g(0) = S;
    g(1) = C;
    g(2) = last.eval<T>(s(0));
    return g;
  });
  return c;
}

// ---------------------------------------------------------------------------
// Constructions

ImmersionSpec make_cr_product(const HypersurfaceFamily& family, double A, Interval s_range) {
  if (A == 0.0) throw PreconditionError("A must be nonzero");
  const SmoothMap phi = family.as_map();
  const int d = family.base_dim(), q = phi.out_dim();
  ImmersionSpec f;
  f.name = "cr_product";
  f.param_names = {"s"};
  for (const auto& x : x_names(d)) f.param_names.push_back(x);
  f.domain = prepend(s_range, family.x_box());
  f.ambient = AmbientSpace::product(family.eps(), family.model_dim());
  f.map = SmoothMap::generic(d + 1, q + 1, [phi, A, q](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    VecX<T> y(q + 1);
    y.head(q) = phi.eval<T>(u);
    y(q) = A * u(0);
    return y;
  });
  check_polar(phi, family.space().signature(), f.domain);
  const double a = std::abs(A);
  f.claims.push_back({Property::constant_ratio, "ddt", 1.0 / a});
  f.claims.push_back({Property::t_constant, "ddt", a / std::sqrt(1.0 + A * A)});
  f.claims.push_back({Property::n_constant, "ddt", 1.0 / std::sqrt(1.0 + A * A)});
  f.claims.push_back({Property::polar, "", 1.0 + A * A});
  if (f.is_hypersurface()) f.claims.push_back({Property::principal_direction, "ddt", {}});
  check_regular(f);
  return f;
}

ImmersionSpec compose(const ConformalMapSpec& map, const ImmersionSpec& f) {
  if (!(f.ambient == map.source)) {
    throw PreconditionError(f.name + " does not live on the source of " + map.name);
  }
  for (const auto& u : sample_points(f.domain, 5)) {
    const VectorXd p = f(u);
    if (!p.allFinite() ||
        map.source.membership_residual(p) > kMembershipTolerance * std::max(1.0, p.squaredNorm()) ||
        !map.in_domain(p)) {
      throw DomainError("image of " + f.name + " escapes the domain of " + map.name +
                        " at u = " + point_text(u));
    }
  }
  ImmersionSpec g;
  g.name = map.name + "." + f.name;
  g.param_names = f.param_names;
  g.domain = f.domain;
  g.ambient = map.target;
  g.map = compose(map.forward, f.map);
  for (const auto& c : f.claims) {
    switch (c.property) {
      case Property::constant_ratio:
      case Property::principal_direction:
        g.claims.push_back({c.property, transported_field(map, c.field), c.expected});
        break;
      case Property::polar:
        if (map.is_isometry) g.claims.push_back(c);
        break;
      case Property::t_constant:
      case Property::n_constant:
      case Property::normal_parallel:
        if (map.is_isometry) {
          g.claims.push_back({c.property, transported_field(map, c.field), c.expected});
        }
        break;
      case Property::gauss_constant:
        break;
    }
  }
  check_regular(g);
  return g;
}

ImmersionSpec make_cr_warped(const Warping& rho, double A, const HypersurfaceFamily& family,
                             std::optional<Interval> s_range, double c) {
  if (A == 0.0) throw PreconditionError("A must be nonzero");
  const Mercator F = default_mercator(rho, c);
  const Interval& J = F.range();
  Interval s;
  if (s_range) {
    s = *s_range;
  } else {
    double lo = J.lo / A, hi = J.hi / A;
    if (lo > hi) std::swap(lo, hi);
    lo = std::max(lo, -1.0);
    hi = std::min(hi, 1.0);
    const double pad = 0.02 * (hi - lo);
    s = {lo + pad, hi - pad};
  }
  if (!(J.contains(A * s.lo) && J.contains(A * s.hi))) {
    throw DomainError("s range escapes the maximal interval of F");
  }
  ImmersionSpec g =
      compose(mercator_map(F, family.eps(), family.model_dim()), make_cr_product(family, A, s));
  g.name = "cr_warped";
  return g;
}

ImmersionSpec make_spherical_loxodrome(double theta, const HypersurfaceFamily& family) {
  if (family.eps() != 1) throw PreconditionError("spherical loxodromes need a family in S^n");
  if (!(theta > 0.0 && theta < kPi / 2)) throw PreconditionError("theta must lie in (0, pi/2)");
  const ConformalMapSpec warp = warp_sphere(family.model_dim());
  const Warping sine = Warping::make(WarpingKind::sin);
  if (family.base_dim() > 0) {
    ImmersionSpec g = compose(warp, make_cr_warped(sine, std::sin(theta), family));
    g.name = "spherical_loxodrome";
    return g;
  }
  // The product curve (cos(theta) s, sin(theta) s) has unit speed; it is the A = tan theta
  // member evaluated at cos(theta) s.
  const double k = std::cos(theta);
  const ImmersionSpec base = compose(warp, make_cr_warped(sine, std::tan(theta), family));
  ImmersionSpec g = base;
  g.name = "loxodrome";
  const SmoothMap inner = base.map;
  g.map = SmoothMap::generic(1, inner.out_dim(), [inner, k](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    VecX<T> v(1);
    v(0) = k * u(0);
    return inner.eval<T>(v);
  });
  g.domain.axes[0] = {base.domain.axes[0].lo / k, base.domain.axes[0].hi / k};
  return g;
}

ImmersionSpec make_parabolic_loxodrome(double theta, const HypersurfaceFamily& family, double c) {
  if (family.eps() != 0) throw PreconditionError("parabolic loxodromes need a family in R^n");
  if (!(theta > 0.0 && theta < kPi / 2)) throw PreconditionError("theta must lie in (0, pi/2)");
  ImmersionSpec g =
      compose(warp_hyp_parabolic(family.model_dim()),
              make_cr_warped(Warping::make(WarpingKind::exp_over_sqrt2), 2.0 * std::sin(theta),
                             family, std::nullopt, c));
  g.name = "parabolic_loxodrome";
  return g;
}

ImmersionSpec make_class_a(const SmoothMap& phi, const SmoothMap& xi, int eps,
                           const ParamBox& x_box, const CurveSpec& gamma, Interval s_range) {
  if (gamma.k != 1) throw PreconditionError("only k = 1 normal frames are supported");
  if (gamma.eps != eps) throw PreconditionError("curve and base use different epsilon");
  if (phi.in_dim() != xi.in_dim() || phi.out_dim() != xi.out_dim() || x_box.dim() != phi.in_dim()) {
    throw DimensionError("base, frame and x box have inconsistent shapes");
  }
  const int d = phi.in_dim(), q = phi.out_dim();
  const int n = eps == 0 ? q : q - 1;
  const Signature sig = AmbientSpace::space_form(eps, n).signature();
  for (const auto& x : sample_points(x_box, 5)) {
    const VectorXd p = phi(x);
    const VectorXd X = xi(x);
    double worst = std::abs(sig.inner<double>(X, X) - 1.0);
    if (eps != 0) {
      worst = std::max(worst, std::abs(sig.inner<double>(p, p) - eps));
      worst = std::max(worst, std::abs(sig.inner<double>(X, p)));
    }
    if (d > 0) {
      const MatrixXd Jp = jacobian(phi, x);
      const MatrixXd Jx = jacobian(xi, x);
      for (Eigen::Index i = 0; i < d; ++i) {
        worst = std::max(worst, std::abs(sig.inner<double>(X, VectorXd(Jp.col(i)))));
      }
      // Parallel in the normal bundle: d xi has only a tangential part.
      for (Eigen::Index i = 0; i < d; ++i) {
        const VectorXd dxi = Jx.col(i);
        const Split sp = tangent_normal_split(sig.matrix(), Jp, dxi);
        if (sp.normal.norm() > kParallelTolerance * std::max(1.0, dxi.norm())) {
          throw PreconditionError("frame is not parallel in the normal bundle at x = " +
                                  point_text(x));
        }
      }
    }
    if (!(worst <= kCheckTolerance)) {
      throw PreconditionError("frame fails orthonormality at x = " + point_text(x));
    }
  }
  for (const auto& s : sample_points(ParamBox{{s_range}}, 21)) {
    const VectorXd g = gamma.gamma(s);
    const double constraint =
        eps == 0 ? g(1) - 1.0 : g(0) * g(0) + eps * g(1) * g(1) - eps;
    if (std::abs(constraint) > kCheckTolerance) {
      throw PreconditionError("curve violates the Q_eps^k constraint at s = " + point_text(s));
    }
    if (std::abs(jacobian(gamma.gamma, s)(2, 0)) <= kCheckTolerance) {
      throw PreconditionError("last curve component has vanishing derivative at s = " +
                              point_text(s));
    }
  }
  ImmersionSpec f;
  f.name = "class_a";
  f.param_names = x_names(d);
  f.param_names.push_back("s");
  f.domain = append(x_box, s_range);
  f.ambient = AmbientSpace::product(eps, n);
  const SmoothMap curve = gamma.gamma;
  f.map = SmoothMap::generic(d + 1, q + 1, [phi, xi, curve, d, q](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    const VecX<T> x = u.head(d);
    VecX<T> s(1);
    s(0) = u(d);
    const VecX<T> g = curve.eval<T>(s);
    VecX<T> y(q + 1);
    y.head(q) = combine<T>(g(0), xi.eval<T>(x), g(1), phi.eval<T>(x));
    y(q) = g(2);
    return y;
  });
  f.claims.push_back({Property::principal_direction, "ddt", {}});
  if (gamma.geodesic_projection && gamma.last.kind == Profile::Kind::linear) {
    const double w = std::abs(gamma.omega), a = std::abs(gamma.last.A);
    f.claims.push_back({Property::constant_ratio, "ddt", w / a});
    f.claims.push_back({Property::t_constant, "ddt", a / std::sqrt(w * w + a * a)});
    f.claims.push_back({Property::normal_parallel, "ddt", {}});
  }
  check_regular(f);
  return f;
}

ImmersionSpec make_radial_graph(const HypersurfaceFamily& family, const Profile& profile,
                                std::optional<Interval> s_range) {
  if (family.eps() != 1) throw PreconditionError("radial graphs need a family in S^{n-1}");
  const Interval dom = profile.domain();
  Interval s = s_range ? *s_range : intersect(dom, {-1.0, 1.0});
  if (!(dom.contains(s.lo) && dom.contains(s.hi)) || !(s.lo < s.hi)) {
    throw DomainError("s range violates the domain of profile " + profile.name());
  }
  const SmoothMap phi = family.as_map();
  const int d = family.base_dim(), q = phi.out_dim();
  ImmersionSpec f;
  f.param_names = {"s"};
  for (const auto& x : x_names(d)) f.param_names.push_back(x);
  f.domain = prepend(s, family.x_box());
  f.ambient = AmbientSpace::flat(q);
  f.map = SmoothMap::generic(d + 1, q, [phi, profile, q](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    const T scale = exp(profile.eval<T>(u(0)));
    const VecX<T> p = phi.eval<T>(u);
    VecX<T> y(q);
    for (int i = 0; i < q; ++i) y(i) = scale * p(i);
    return y;
  });
  switch (profile.kind) {
    case Profile::Kind::linear:
      f.name = "radial_linear";
      f.claims.push_back({Property::constant_ratio, "radial", 1.0 / std::abs(profile.A)});
      break;
    case Profile::Kind::log_sec:
      f.name = "radial_log_sec";
      f.claims.push_back({Property::n_constant, "radial", 1.0});
      break;
    case Profile::Kind::sqrt_G:
      f.name = "radial_sqrt_G";
      f.claims.push_back({Property::t_constant, "radial", 1.0});
      break;
    default:
      f.name = "radial_graph";
      break;
  }
  if (f.is_hypersurface()) f.claims.push_back({Property::principal_direction, "radial", {}});
  check_regular(f);
  return f;
}

ImmersionSpec make_pd_radial(const SmoothMap& phi, const SmoothMap& xi, const ParamBox& x_box,
                             const CurveSpec& gamma, std::optional<Interval> s_range) {
  if (gamma.eps != 1) throw PreconditionError("radial PD construction needs eps = 1");
  const Interval s = s_range ? *s_range : intersect(gamma.last.domain(), {-1.0, 1.0});
  const ImmersionSpec base = make_class_a(phi, xi, 1, x_box, gamma, s);
  ImmersionSpec f = compose(radial_exp(phi.out_dim()), base);
  f.name = "pd_radial";
  if (gamma.unit_speed_projection && gamma.last.kind == Profile::Kind::log_sec) {
    f.claims.push_back({Property::normal_parallel, "radial", {}});
    f.claims.push_back({Property::n_constant, "radial", 1.0});
  }
  return f;
}

ImmersionSpec make_killing_surface(const KillingSurfaceParams& params) {
  using Kind = KillingSurfaceParams::Kind;
  const double A = params.A;
  if (params.kind != Kind::dini && A == 0.0) throw PreconditionError("A must be nonzero");
  const Interval t_range =
      params.t_range ? *params.t_range
                     : (params.kind == Kind::dini ? Interval{0.3, 2.0} : Interval{-1.0, 1.0});
  switch (params.kind) {
    case Kind::from_curve:
    case Kind::horocycle_base: {
      SmoothMap curve = params.curve, dcurve = params.curve_derivative;
      if (params.kind == Kind::horocycle_base) {
        // e_0 + t e_1 + (t^2 + 1) e_2 in standard coordinates.
        curve = SmoothMap::generic(1, 3, [](const auto& t) {
          using T = typename std::decay_t<decltype(t)>::Scalar;
          VecX<T> p(3);
          p(0) = t(0);
          p(1) = -0.5 * (t(0) * t(0));
          p(2) = 1.0 + 0.5 * (t(0) * t(0));
          return p;
        });
        dcurve = SmoothMap::generic(1, 3, [](const auto& t) {
          using T = typename std::decay_t<decltype(t)>::Scalar;
          VecX<T> p(3);
          p(0) = T(1.0);
          p(1) = -t(0);
          p(2) = t(0);
          return p;
        });
      }
      if (!curve.valid() || !dcurve.valid()) {
        throw PreconditionError("from_curve needs a curve and its derivative");
      }
      const HypersurfaceFamily family = HypersurfaceFamily::from_h2_curve(curve, dcurve, t_range);
      ImmersionSpec f = compose(killing_cover(2), make_cr_product(family, A, params.s_range));
      f.name = params.kind == Kind::horocycle_base ? "horocycle_base" : "killing_from_curve";
      return f;
    }
    case Kind::log_spiral_cylinder: {
      const ConformalMapSpec cover = killing_cover(2);
      const SmoothMap fwd = cover.forward;
      ImmersionSpec f;
      f.name = "log_spiral_cylinder";
      f.param_names = {"t", "s"};
      f.domain = ParamBox{{t_range, params.s_range}};
      f.ambient = AmbientSpace::flat(3);
      // gamma(t, s) = e^s e_0 + t e^s e_1 + (t^2 e^s + e^{-s}) e_2, then the covering map.
      f.map = SmoothMap::generic(2, 3, [fwd, A](const auto& u) {
        using T = typename std::decay_t<decltype(u)>::Scalar;
        const T es = exp(u(1));
        VecX<T> x(3);
        x(0) = es;
        x(1) = u(0) * es;
        x(2) = u(0) * u(0) * es + 1.0 / es;
        VecX<T> p(4);
        p.head(3) = from_pseudo_orthonormal_coords<T>(x);
        p(3) = A * u(1);
        return fwd.eval<T>(p);
      });
      f.claims.push_back({Property::constant_ratio, "killing", 1.0 / std::abs(A)});
      f.claims.push_back({Property::principal_direction, "killing", {}});
      check_regular(f);
      return f;
    }
    case Kind::dini: {
      const double sg = params.sigma;
      if (!(std::abs(sg) < kPi / 2)) throw PreconditionError("sigma must lie in (-pi/2, pi/2)");
      const double cs = std::cos(sg), sn = std::sin(sg);
      ImmersionSpec f;
      f.name = "dini";
      f.param_names = {"t", "s"};
      f.domain = ParamBox{{t_range, params.s_range}};
      f.ambient = AmbientSpace::flat(3);
      f.map = SmoothMap::generic(2, 3, [cs, sn](const auto& u) {
        using T = typename std::decay_t<decltype(u)>::Scalar;
        const T r = (u(0) - sn * u(1)) / cs;
        const T ch = cosh(r);
        VecX<T> y(3);
        y(0) = cs * cos(u(1)) / ch;
        y(1) = cs * sin(u(1)) / ch;
        y(2) = u(0) - cs * tanh(r);
        return y;
      });
      f.claims.push_back({Property::constant_ratio, "killing:1,2", std::abs(std::tan(sg))});
      f.claims.push_back({Property::principal_direction, "killing:1,2", {}});
      f.claims.push_back({Property::gauss_constant, "", -1.0});
      check_regular(f);
      return f;
    }
  }
  throw PreconditionError("unknown Killing surface kind");
}

// ---------------------------------------------------------------------------
// Reference surfaces

ImmersionSpec make_unit_sphere() {
  ImmersionSpec f;
  f.name = "sphere";
  f.param_names = {"theta", "phi"};
  f.domain = ParamBox{{{0.3, kPi - 0.3}, {-3.0, 3.0}}};
  f.ambient = AmbientSpace::flat(3);
  f.map = SmoothMap::generic(2, 3, [](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    VecX<T> y(3);
    y(0) = sin(u(0)) * cos(u(1));
    y(1) = sin(u(0)) * sin(u(1));
    y(2) = cos(u(0));
    return y;
  });
  f.claims.push_back({Property::constant_ratio, "radial", {}});
  f.claims.push_back({Property::n_constant, "radial", 1.0});
  return f;
}

ImmersionSpec make_round_cylinder(double offset) {
  ImmersionSpec f;
  f.name = "cylinder_round";
  f.param_names = {"theta", "z"};
  f.domain = ParamBox{{{-3.0, 3.0}, {0.5, 2.0}}};
  f.ambient = AmbientSpace::flat(3);
  f.map = SmoothMap::generic(2, 3, [offset](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    VecX<T> y(3);
    y(0) = offset + cos(u(0));
    y(1) = sin(u(0));
    y(2) = u(1);
    return y;
  });
  return f;
}

ImmersionSpec make_plane() {
  ImmersionSpec f;
  f.name = "plane";
  f.param_names = {"u", "v"};
  f.domain = ParamBox{{{-1.0, 1.0}, {-1.0, 1.0}}};
  f.ambient = AmbientSpace::flat(3);
  f.map = SmoothMap::generic(2, 3, [](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    VecX<T> y(3);
    y(0) = u(0);
    y(1) = u(1);
    y(2) = T(0.0);
    return y;
  });
  return f;
}

ImmersionSpec make_cone() {
  ImmersionSpec f;
  f.name = "cone";
  f.param_names = {"s", "x"};
  f.domain = ParamBox{{{0.5, 2.0}, {-3.0, 3.0}}};
  f.ambient = AmbientSpace::flat(3);
  f.map = SmoothMap::generic(2, 3, [](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    VecX<T> y(3);
    y(0) = u(0) * cos(u(1));
    y(1) = u(0) * sin(u(1));
    y(2) = u(0);
    return y;
  });
  f.claims.push_back({Property::constant_ratio, "radial", {}});
  return f;
}

ImmersionSpec make_log_spiral(double a) {
  if (a == 0.0) throw PreconditionError("spiral rate must be nonzero");
  ImmersionSpec f;
  f.name = "log_spiral";
  f.param_names = {"t"};
  f.domain = ParamBox{{{-1.0, 1.0}}};
  f.ambient = AmbientSpace::flat(2);
  f.map = SmoothMap::generic(1, 2, [a](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    const T r = exp(a * u(0));
    VecX<T> y(2);
    y(0) = r * cos(u(0));
    y(1) = r * sin(u(0));
    return y;
  });
  f.claims.push_back({Property::constant_ratio, "radial", 1.0 / std::abs(a)});
  return f;
}

// ---------------------------------------------------------------------------
// Registry

double GalleryParams::get(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::vector<std::string> gallery_names() {
  return {"sphere",          "cylinder_round",      "plane",
          "cone",            "log_spiral",          "helix",
          "cr_product",      "cr_warped",           "loxodrome",
          "spherical_loxodrome", "parabolic_loxodrome", "class_a",
          "radial_linear",   "radial_log_sec",      "radial_sqrt_G",
          "pd_radial",       "pd_radial_log_sec",   "dini",
          "log_spiral_cylinder", "horocycle_base"};
}

std::vector<std::string> gallery_param_keys(const std::string& name) {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"sphere", {}},
      {"cylinder_round", {"offset"}},
      {"plane", {}},
      {"cone", {}},
      {"log_spiral", {"A"}},
      {"helix", {"A"}},
      {"cr_product", {"a", "A"}},
      {"cr_warped", {"a", "A", "c"}},
      {"loxodrome", {"theta"}},
      {"spherical_loxodrome", {"theta", "a"}},
      {"parabolic_loxodrome", {"theta", "c"}},
      {"class_a", {"a", "A", "b", "omega", "bend"}},
      {"radial_linear", {"a", "A"}},
      {"radial_log_sec", {"a", "C"}},
      {"radial_sqrt_G", {"a", "C"}},
      {"pd_radial", {"a", "A", "omega", "bend"}},
      {"pd_radial_log_sec", {"a", "C", "omega", "bend", "s_lo", "s_hi"}},
      {"dini", {"sigma"}},
      {"log_spiral_cylinder", {"A"}},
      {"horocycle_base", {"A"}},
  };
  const auto it = keys.find(name);
  if (it == keys.end()) throw ConfigError("unknown gallery entry: " + name);
  return it->second;
}

ImmersionSpec gallery_entry(const std::string& name, const GalleryParams& params) {
  const std::vector<std::string> accepted = gallery_param_keys(name);
  for (const auto& [key, value] : params.values) {
    if (std::find(accepted.begin(), accepted.end(), key) == accepted.end()) {
      throw ConfigError("gallery entry " + name + " has no parameter '" + key + "'");
    }
  }
  const auto P = [&params](const char* key, double fallback) { return params.get(key, fallback); };
  const auto latitude_frame = [](double a) {
    const HypersurfaceFamily fam = HypersurfaceFamily::latitude(a);
    return std::pair{fam.base(), fam.normal()};
  };
  try {
    if (name == "sphere") return make_unit_sphere();
    if (name == "cylinder_round") return make_round_cylinder(P("offset", 0.5));
    if (name == "plane") return make_plane();
    if (name == "cone") return make_cone();
    if (name == "log_spiral") return make_log_spiral(P("A", 1.0));
    if (name == "helix") {
      ImmersionSpec f = make_cr_product(HypersurfaceFamily::point(1), P("A", 1.0));
      f.name = "helix";
      return f;
    }
    if (name == "cr_product") {
      return make_cr_product(HypersurfaceFamily::latitude(P("a", 0.0)), P("A", 1.0));
    }
    if (name == "cr_warped") {
      const Warping rho = Warping::parse(params.rho);
      const double A = P("A", std::sqrt(0.5));
      const double c = P("c", 0.0);
      switch (rho.kind) {
        case WarpingKind::sin:
          return compose(warp_sphere(2),
                         make_cr_warped(rho, A, HypersurfaceFamily::latitude(P("a", 0.0)),
                                        std::nullopt, c));
        case WarpingKind::identity:
          return compose(warp_euclid(2),
                         make_cr_warped(rho, A, HypersurfaceFamily::latitude(P("a", 0.0)),
                                        std::nullopt, c));
        case WarpingKind::sinh:
          return compose(warp_hyp_elliptic(2),
                         make_cr_warped(rho, A, HypersurfaceFamily::latitude(P("a", 0.0))));
        case WarpingKind::cosh:
          return compose(warp_hyp_hyperbolic(2),
                         make_cr_warped(rho, A, HypersurfaceFamily::hyperbolic_geodesic()));
        case WarpingKind::exp_over_sqrt2:
          return compose(warp_hyp_parabolic(2),
                         make_cr_warped(rho, A, HypersurfaceFamily::unit_circle(), std::nullopt, c));
        case WarpingKind::sqrt2_exp:
          return make_cr_warped(rho, A, HypersurfaceFamily::unit_circle(), std::nullopt, c);
      }
    }
    if (name == "loxodrome") {
      return make_spherical_loxodrome(P("theta", kPi / 4), HypersurfaceFamily::point(1));
    }
    if (name == "spherical_loxodrome") {
      return make_spherical_loxodrome(P("theta", kPi / 4),
                                      HypersurfaceFamily::latitude(P("a", 0.0)));
    }
    if (name == "parabolic_loxodrome") {
      return make_parabolic_loxodrome(P("theta", kPi / 4), HypersurfaceFamily::unit_circle(),
                                      P("c", 1.0));
    }
    if (name == "class_a") {
      const auto [phi, xi] = latitude_frame(P("a", 0.3));
      const Profile last = P("b", 0.0) == 0.0 ? Profile::linear(P("A", 1.0))
                                              : Profile::cubic(P("A", 1.0), P("b", 0.0));
      return make_class_a(phi, xi, 1, ParamBox{{{-3.0, 3.0}}},
                          class_a_curve(1, P("omega", 1.0), P("bend", 0.0), last));
    }
    if (name == "radial_linear") {
      return make_radial_graph(HypersurfaceFamily::latitude(P("a", 0.0)),
                               Profile::linear(P("A", 1.0)));
    }
    if (name == "radial_log_sec") {
      return make_radial_graph(HypersurfaceFamily::latitude(P("a", 0.0)),
                               Profile::log_sec(P("C", 0.0)));
    }
    if (name == "radial_sqrt_G") {
      return make_radial_graph(HypersurfaceFamily::latitude(P("a", 0.0)),
                               Profile::sqrt_G(P("C", 1.2)));
    }
    if (name == "pd_radial" || name == "pd_radial_log_sec") {
      const auto [phi, xi] = latitude_frame(P("a", 0.3));
      const Profile last = name == "pd_radial" ? Profile::linear(P("A", 1.0))
                                               : Profile::log_sec(P("C", 0.0));
      std::optional<Interval> s_range;
      if (name == "pd_radial_log_sec") s_range = Interval{P("s_lo", 0.1), P("s_hi", 1.2)};
      return make_pd_radial(phi, xi, ParamBox{{{-3.0, 3.0}}},
                            class_a_curve(1, P("omega", 1.0), P("bend", 0.0), last), s_range);
    }
    if (name == "dini") {
      KillingSurfaceParams k;
      k.kind = KillingSurfaceParams::Kind::dini;
      k.sigma = P("sigma", 0.2);
      return make_killing_surface(k);
    }
    if (name == "log_spiral_cylinder" || name == "horocycle_base") {
      KillingSurfaceParams k;
      k.kind = name == "horocycle_base" ? KillingSurfaceParams::Kind::horocycle_base
                                        : KillingSurfaceParams::Kind::log_spiral_cylinder;
      k.A = P("A", 1.0);
      return make_killing_surface(k);
    }
  } catch (const PreconditionError& e) {
    throw ConfigError("gallery entry " + name + ": " + e.what());
  }
  throw ConfigError("unknown gallery entry: " + name);
}

}  // namespace vfgeom

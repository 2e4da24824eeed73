#include "vfgeom/conformal_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace vfgeom {

namespace {

const double kSqrt2 = std::sqrt(2.0);
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool has_closed_form(WarpingKind k) {
  return k == WarpingKind::sin || k == WarpingKind::sqrt2_exp ||
         k == WarpingKind::exp_over_sqrt2 || k == WarpingKind::identity;
}

double rho_prime(const Warping& rho, double s) { return rho.derivative(s); }

double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

Mercator::Mercator(const Warping& rho, double t0, double F0, Interval range, bool force_rk4)
    : rho_(rho), t0_(t0), F0_(F0), range_(range) {
  if (!rho_.interval.contains(F0)) {
    throw PreconditionError("initial value F0 outside the warping interval");
  }
  if (!(range.lo < range.hi)) throw PreconditionError("empty Mercator interval");
  closed_ = !force_rk4 && has_closed_form(rho.kind);
  if (!closed_) {
    build_table();
    return;
  }
  switch (rho.kind) {
    case WarpingKind::sin: c_ = t0 - std::log(std::tan(0.5 * F0)); break;
    case WarpingKind::sqrt2_exp: c_ = std::exp(-F0) + kSqrt2 * t0; break;
    case WarpingKind::exp_over_sqrt2: c_ = std::exp(-F0) + t0 / kSqrt2; break;
    case WarpingKind::identity: c_ = std::log(F0) - t0; break;
    default: break;
  }
  double blow_up = std::numeric_limits<double>::infinity();
  if (rho.kind == WarpingKind::sqrt2_exp) blow_up = c_ / kSqrt2;
  if (rho.kind == WarpingKind::exp_over_sqrt2) blow_up = kSqrt2 * c_;
  if (range.hi > blow_up) {
    std::ostringstream os;
    os << "Mercator solution blows up at t = " << blow_up << " before the end of the interval";
    throw ConvergenceError(os.str());
  }
  for (double t : {range.lo, range.hi}) {
    if (std::isfinite(t) && !rho_.interval.contains(closed_value(t))) {
      throw ConvergenceError("Mercator solution leaves the warping interval inside the range");
    }
  }
}

double Mercator::closed_value(double t) const {
  switch (rho_.kind) {
    case WarpingKind::sin: return 2.0 * std::atan(std::exp(t - c_));
    case WarpingKind::sqrt2_exp: return -std::log(c_ - kSqrt2 * t);
    case WarpingKind::exp_over_sqrt2: return -std::log(c_ - t / kSqrt2);
    case WarpingKind::identity: return std::exp(t + c_);
    default: return rk4_from_node(t);
  }
}

Mercator Mercator::from_constant(const Warping& rho, double c, Interval range, bool force_rk4) {
  double F0 = 0.0;
  switch (rho.kind) {
    case WarpingKind::sin: F0 = 2.0 * std::atan(std::exp(-c)); break;
    case WarpingKind::sqrt2_exp:
    case WarpingKind::exp_over_sqrt2:
      if (c <= 0.0) throw PreconditionError("integration constant must be positive");
      F0 = -std::log(c);
      break;
    case WarpingKind::identity: F0 = std::exp(c); break;
    default: throw PreconditionError("no closed-form family for warping " + rho.name());
  }
  return Mercator(rho, 0.0, F0, range, force_rk4);
}

void Mercator::build_table() {
  if (!std::isfinite(range_.lo) || !std::isfinite(range_.hi)) {
    throw PreconditionError("RK4 Mercator solution needs a bounded interval");
  }
  const double h = kRk4Step;
  k_lo_ = static_cast<long>(std::floor((range_.lo - t0_) / h)) - 1;
  k_lo_ = std::min(k_lo_, 0L);
  const long k_hi = std::max(static_cast<long>(std::ceil((range_.hi - t0_) / h)) + 1, 0L);
  table_.assign(static_cast<std::size_t>(k_hi - k_lo_ + 1), 0.0);
  const auto rk4 = [this](double F, double step) {
    const double k1 = rho_.eval(F);
    const double k2 = rho_.eval(F + 0.5 * step * k1);
    const double k3 = rho_.eval(F + 0.5 * step * k2);
    const double k4 = rho_.eval(F + step * k3);
    return F + step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
  };
  const auto check = [this](double F, long k) {
    if (!std::isfinite(F) || !rho_.interval.contains(F)) {
      std::ostringstream os;
      os << "Mercator RK4 solution blows up or leaves the warping interval near t = "
         << t0_ + static_cast<double>(k) * kRk4Step;
      throw ConvergenceError(os.str());
    }
  };
  const auto at = [this](long k) -> double& { return table_[static_cast<std::size_t>(k - k_lo_)]; };
  at(0) = F0_;
  for (long k = 1; k <= k_hi; ++k) {
    at(k) = rk4(at(k - 1), h);
    check(at(k), k);
  }
  for (long k = -1; k >= k_lo_; --k) {
    at(k) = rk4(at(k + 1), -h);
    check(at(k), k);
  }
}

double Mercator::rk4_from_node(double t) const {
  const long k_hi = k_lo_ + static_cast<long>(table_.size()) - 1;
  long k = static_cast<long>(std::floor((t - t0_) / kRk4Step));
  k = std::clamp(k, k_lo_, k_hi - 1);
  const double tk = t0_ + static_cast<double>(k) * kRk4Step;
  const double F = table_[static_cast<std::size_t>(k - k_lo_)];
  const double step = t - tk;
  const double k1 = rho_.eval(F);
  const double k2 = rho_.eval(F + 0.5 * step * k1);
  const double k3 = rho_.eval(F + 0.5 * step * k2);
  const double k4 = rho_.eval(F + step * k3);
  return F + step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

double Mercator::value(double t) const {
  if (!range_.contains(t)) {
    std::ostringstream os;
    os << "t = " << t << " outside the Mercator interval";
    throw DomainError(os.str());
  }
  return closed_ ? closed_value(t) : rk4_from_node(t);
}

HyperDual Mercator::value(const HyperDual& t) const {
  const double F = value(t.a);
  const double r = rho_.eval(F);
  return lift(t, F, r, rho_prime(rho_, F) * r);
}

double Mercator::inverse(double s) const {
  if (!rho_.interval.contains(s)) throw DomainError("value outside the warping interval");
  if (closed_) {
    switch (rho_.kind) {
      case WarpingKind::sin: return c_ + std::log(std::tan(0.5 * s));
      case WarpingKind::sqrt2_exp: return (c_ - std::exp(-s)) / kSqrt2;
      case WarpingKind::exp_over_sqrt2: return (c_ - std::exp(-s)) * kSqrt2;
      case WarpingKind::identity: return std::log(s) - c_;
      default: break;
    }
  }
  double t = t0_;
  const double lo = std::nextafter(range_.lo, range_.hi);
  const double hi = std::nextafter(range_.hi, range_.lo);
  for (int it = 0; it < 200; ++it) {
    const double F = value(t);
    const double dt = (F - s) / rho_.eval(F);
    t = std::clamp(t - dt, lo, hi);
    if (std::abs(dt) < 1e-15 * std::max(1.0, std::abs(t))) return t;
  }
  throw ConvergenceError("Mercator inverse did not converge");
}

std::vector<double> mercator_solve(const Warping& rho, double t0, double F0,
                                   const std::vector<double>& grid, bool force_rk4) {
  if (grid.empty()) return {};
  const auto [mn, mx] = std::minmax_element(grid.begin(), grid.end());
  const double lo = std::min(*mn, t0), hi = std::max(*mx, t0);
  const double pad = 1e-9 * std::max(1.0, hi - lo);
  const Mercator F(rho, t0, F0, Interval{lo - pad, hi + pad}, force_rk4);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) out.push_back(F.value(t));
  return out;
}

double mercator_ode_residual(const Mercator& F, const std::vector<double>& grid, double h) {
  double worst = 0.0;
  for (double t : grid) {
    const double d = (-F.value(t + 2.0 * h) + 8.0 * F.value(t + h) - 8.0 * F.value(t - h) +
                      F.value(t - 2.0 * h)) /
                     (12.0 * h);
    worst = std::max(worst, std::abs(d - F.rho().eval(F.value(t))));
  }
  return worst;
}

VectorXd sample_model_point(int eps, int n, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  if (eps == 1) {
    VectorXd x(n + 1);
    do {
      for (int i = 0; i <= n; ++i) x(i) = nd(rng);
    } while (x.norm() < 1e-3);
    return x / x.norm();
  }
  if (eps == 0) {
    VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = nd(rng);
    return x;
  }
  VectorXd x(n + 1);
  for (int i = 0; i < n; ++i) x(i) = 0.7 * nd(rng);
  x(n) = std::sqrt(1.0 + x.head(n).squaredNorm());
  return x;
}

VectorXd sample_tangent(const AmbientSpace& space, const VectorXd& p, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    VectorXd v(space.embed_dim());
    for (int i = 0; i < v.size(); ++i) v(i) = nd(rng);
    v = space.project_tangent(p, v);
    if (v.norm() > 1e-3) return v;
  }
  throw DegenerateError("could not sample a tangent vector");
}

namespace {

/// Random point of a warped space with t uniform in [lo, hi].
VectorXd sample_warped(int eps, int n, double lo, double hi, std::mt19937& rng) {
  const VectorXd x = sample_model_point(eps, n, rng);
  VectorXd p(x.size() + 1);
  p(0) = uniform(rng, lo, hi);
  p.tail(x.size()) = x;
  return p;
}

bool warped_t_ok(const AmbientSpace& s, const VectorXd& p) {
  return s.warping().interval.contains(p(0));
}

}  // namespace

ConformalMapSpec radial_exp(int n) {
  if (n < 2) throw PreconditionError("radial_exp needs n >= 2");
  ConformalMapSpec m;
  m.name = "radial_exp";
  m.source = AmbientSpace::product(1, n - 1);
  m.target = AmbientSpace::flat(n);
  m.forward = SmoothMap::generic(n + 1, n, [n](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    const T e = exp(p(n));
    VecX<T> y(n);
    for (int i = 0; i < n; ++i) y(i) = e * p(i);
    return y;
  });
  m.inverse = [n](const VectorXd& y) {
    VectorXd p(n + 1);
    const double r = y.norm();
    p.head(n) = y / r;
    p(n) = std::log(r);
    return p;
  };
  m.factor = [n](const VectorXd& p) { return std::exp(p(n)); };
  m.in_domain = [](const VectorXd&) { return true; };
  m.in_inverse_domain = [](const VectorXd& y) { return y.norm() > 0.0; };
  m.sample = [n](std::mt19937& rng) {
    VectorXd p(n + 1);
    p.head(n) = sample_model_point(1, n - 1, rng);
    p(n) = uniform(rng, -1.5, 1.5);
    return p;
  };
  m.related = {{"ddt", "radial"}};
  return m;
}

ConformalMapSpec mercator_map(const Mercator& F, int eps, int n) {
  ConformalMapSpec m;
  m.name = "mercator";
  m.source = AmbientSpace::product(eps, n);
  m.target = AmbientSpace::warped(F.rho(), eps, n);
  const int q = m.source.embed_dim() - 1;
  auto Fp = std::make_shared<const Mercator>(F);
  m.mercator = Fp;
  m.forward = SmoothMap::generic(q + 1, q + 1, [Fp, q](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    VecX<T> y(q + 1);
    y(0) = (*Fp)(p(q));
    y.tail(q) = p.head(q);
    return y;
  });
  m.inverse = [Fp, q](const VectorXd& y) {
    VectorXd p(q + 1);
    p.head(q) = y.tail(q);
    p(q) = Fp->inverse(y(0));
    return p;
  };
  m.factor = [Fp, q](const VectorXd& p) { return Fp->rho().eval(Fp->value(p(q))); };
  m.in_domain = [Fp, q](const VectorXd& p) { return Fp->range().contains(p(q)); };
  m.in_inverse_domain = [Fp](const VectorXd& y) {
    const Interval& r = Fp->range();
    const double lo = std::isfinite(r.lo) ? Fp->value(std::nextafter(r.lo, r.hi))
                                          : Fp->rho().interval.lo;
    const double hi = std::isfinite(r.hi) ? Fp->value(std::nextafter(r.hi, r.lo))
                                          : Fp->rho().interval.hi;
    return y(0) > lo && y(0) < hi;
  };
  m.sample = [Fp, eps, n, q](std::mt19937& rng) {
    const Interval& r = Fp->range();
    const double lo = std::max(r.lo, -3.0), hi = std::min(r.hi, 3.0);
    const double pad = 0.01 * (hi - lo);
    VectorXd p(q + 1);
    p.head(q) = sample_model_point(eps, n, rng);
    p(q) = uniform(rng, lo + pad, hi - pad);
    return p;
  };
  m.related = {{"ddt", "rho_ddt"}};
  return m;
}

ConformalMapSpec warp_euclid(int n) {
  ConformalMapSpec m;
  m.name = "warp_euclid";
  m.source = AmbientSpace::warped(Warping::make(WarpingKind::identity), 1, n);
  m.target = AmbientSpace::flat(n + 1);
  m.is_isometry = true;
  m.forward = SmoothMap::generic(n + 2, n + 1, [n](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    VecX<T> y(n + 1);
    for (int i = 0; i <= n; ++i) y(i) = p(0) * p(i + 1);
    return y;
  });
  m.inverse = [n](const VectorXd& y) {
    VectorXd p(n + 2);
    p(0) = y.norm();
    p.tail(n + 1) = y / p(0);
    return p;
  };
  m.factor = [](const VectorXd&) { return 1.0; };
  const AmbientSpace src = m.source;
  m.in_domain = [src](const VectorXd& p) { return warped_t_ok(src, p); };
  m.in_inverse_domain = [](const VectorXd& y) { return y.norm() > kSingularMargin; };
  m.sample = [n](std::mt19937& rng) { return sample_warped(1, n, 0.2, 3.0, rng); };
  return m;
}

ConformalMapSpec warp_sphere(int n) {
  ConformalMapSpec m;
  m.name = "warp_sphere";
  m.source = AmbientSpace::warped(Warping::make(WarpingKind::sin), 1, n);
  m.target = AmbientSpace::sphere(n + 1);
  m.is_isometry = true;
  m.forward = SmoothMap::generic(n + 2, n + 2, [n](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    VecX<T> y(n + 2);
    const T s = sin(p(0));
    for (int i = 0; i <= n; ++i) y(i) = s * p(i + 1);
    y(n + 1) = cos(p(0));
    return y;
  });
  m.inverse = [n](const VectorXd& y) {
    VectorXd p(n + 2);
    p(0) = std::acos(std::clamp(y(n + 1), -1.0, 1.0));
    p.tail(n + 1) = y.head(n + 1) / std::sin(p(0));
    return p;
  };
  m.factor = [](const VectorXd&) { return 1.0; };
  const AmbientSpace src = m.source;
  m.in_domain = [src](const VectorXd& p) { return warped_t_ok(src, p); };
  m.in_inverse_domain = [n](const VectorXd& y) {
    return std::abs(y(n + 1)) < std::cos(kSingularMargin);
  };
  m.sample = [n](std::mt19937& rng) {
    return sample_warped(1, n, 0.2, std::numbers::pi - 0.2, rng);
  };
  m.related = {{"ddt", "radial"}};
  return m;
}

ConformalMapSpec warp_hyp_elliptic(int n) {
  ConformalMapSpec m;
  m.name = "warp_hyp_elliptic";
  m.source = AmbientSpace::warped(Warping::make(WarpingKind::sinh), 1, n);
  m.target = AmbientSpace::hyperbolic(n + 1);
  m.is_isometry = true;
  m.forward = SmoothMap::generic(n + 2, n + 2, [n](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    VecX<T> y(n + 2);
    const T s = sinh(p(0));
    for (int i = 0; i <= n; ++i) y(i) = s * p(i + 1);
    y(n + 1) = cosh(p(0));
    return y;
  });
  m.inverse = [n](const VectorXd& y) {
    VectorXd p(n + 2);
    p(0) = std::acosh(y(n + 1));
    p.tail(n + 1) = y.head(n + 1) / std::sinh(p(0));
    return p;
  };
  m.factor = [](const VectorXd&) { return 1.0; };
  const AmbientSpace src = m.source;
  m.in_domain = [src](const VectorXd& p) { return warped_t_ok(src, p); };
  m.in_inverse_domain = [n](const VectorXd& y) {
    return y(n + 1) > std::cosh(kSingularMargin);
  };
  m.sample = [n](std::mt19937& rng) { return sample_warped(1, n, 0.2, 2.0, rng); };
  m.related = {{"ddt", "radial"}};
  return m;
}

ConformalMapSpec warp_hyp_hyperbolic(int n) {
  ConformalMapSpec m;
  m.name = "warp_hyp_hyperbolic";
  m.source = AmbientSpace::warped(Warping::make(WarpingKind::cosh), -1, n);
  m.target = AmbientSpace::hyperbolic(n + 1);
  m.is_isometry = true;
  m.forward = SmoothMap::generic(n + 2, n + 2, [n](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    VecX<T> y(n + 2);
    const T c = cosh(p(0));
    y(0) = sinh(p(0));
    for (int i = 1; i <= n + 1; ++i) y(i) = c * p(i);
    return y;
  });
  m.inverse = [n](const VectorXd& y) {
    VectorXd p(n + 2);
    p(0) = std::asinh(y(0));
    p.tail(n + 1) = y.tail(n + 1) / std::cosh(p(0));
    return p;
  };
  m.factor = [](const VectorXd&) { return 1.0; };
  m.in_domain = [](const VectorXd&) { return true; };
  m.in_inverse_domain = [](const VectorXd&) { return true; };
  m.sample = [n](std::mt19937& rng) { return sample_warped(-1, n, -1.5, 1.5, rng); };
  return m;
}

ConformalMapSpec warp_hyp_parabolic(int n) {
  ConformalMapSpec m;
  m.name = "warp_hyp_parabolic";
  m.source = AmbientSpace::warped(Warping::make(WarpingKind::exp_over_sqrt2), 0, n);
  m.target = AmbientSpace::hyperbolic(n + 1);
  m.is_isometry = true;
  // v = (0,...,0, 1/sqrt2, 1/sqrt2), w = (0,...,0, 1/sqrt2, -1/sqrt2): null, <v,w> = 1.
  m.forward = SmoothMap::generic(n + 1, n + 2, [n](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    const double r = 1.0 / kSqrt2;
    const T a = exp(p(0)) * r;
    const T b = exp(-p(0)) * r;
    T x2 = T(0.0);
    for (int i = 1; i <= n; ++i) x2 += p(i) * p(i);
    VecX<T> y(n + 2);
    for (int i = 0; i < n; ++i) y(i) = a * p(i + 1);
    const T half = 0.5 * x2;
    y(n) = a * (r - half * r) - b * r;
    y(n + 1) = a * (r + half * r) + b * r;
    return y;
  });
  m.inverse = [n](const VectorXd& y) {
    const double a = (y(n) + y(n + 1)) / kSqrt2;
    VectorXd p(n + 1);
    p(0) = std::log(kSqrt2 * a);
    p.tail(n) = y.head(n) / a;
    return p;
  };
  m.factor = [](const VectorXd&) { return 1.0; };
  m.in_domain = [](const VectorXd&) { return true; };
  m.in_inverse_domain = [n](const VectorXd& y) { return y(n) + y(n + 1) > 0.0; };
  m.sample = [n](std::mt19937& rng) { return sample_warped(0, n, -1.5, 1.5, rng); };
  return m;
}

ConformalMapSpec killing_cover(int n) {
  ConformalMapSpec m;
  m.name = "killing_cover";
  m.source = AmbientSpace::product(-1, n);
  m.target = AmbientSpace::flat(n + 1);
  m.forward = SmoothMap::generic(n + 2, n + 1, [n](const auto& p) {
    using T = typename std::decay_t<decltype(p)>::Scalar;
    const VecX<T> x = pseudo_orthonormal_coords<T>(VecX<T>(p.head(n + 1)));
    const T inv = 1.0 / x(0);
    VecX<T> y(n + 1);
    for (int i = 1; i < n; ++i) y(i - 1) = inv * x(i);
    y(n - 1) = inv * cos(p(n + 1));
    y(n) = inv * sin(p(n + 1));
    return y;
  });
  m.inverse = [n](const VectorXd& y) {
    const double r = std::hypot(y(n - 1), y(n));
    VectorXd x(n + 1);
    x(0) = 1.0 / r;
    for (int i = 1; i < n; ++i) x(i) = y(i - 1) / r;
    x(n) = y.squaredNorm() / r;
    VectorXd p(n + 2);
    p.head(n + 1) = from_pseudo_orthonormal_coords<double>(x);
    double t = std::atan2(y(n), y(n - 1));
    if (t < 0.0) t += kTwoPi;
    p(n + 1) = t;
    return p;
  };
  m.factor = [n](const VectorXd& p) {
    return 1.0 / pseudo_orthonormal_coords<double>(VectorXd(p.head(n + 1)))(0);
  };
  m.in_domain = [](const VectorXd&) { return true; };
  m.in_inverse_domain = [n](const VectorXd& y) { return std::hypot(y(n - 1), y(n)) > 0.0; };
  m.sample = [n](std::mt19937& rng) {
    VectorXd p(n + 2);
    p.head(n + 1) = sample_model_point(-1, n, rng);
    p(n + 1) = uniform(rng, 0.0, kTwoPi);
    return p;
  };
  m.related = {{"ddt", "killing"}};
  return m;
}

ConformalMapSpec sphere_inversion(int n) {
  ConformalMapSpec m;
  m.name = "sphere_inversion";
  m.source = AmbientSpace::flat(n);
  m.target = AmbientSpace::flat(n);
  const auto inv = [](const auto& y) {
    using T = typename std::decay_t<decltype(y)>::Scalar;
    T r2 = T(0.0);
    for (int i = 0; i < y.size(); ++i) r2 += y(i) * y(i);
    VecX<T> out(y.size());
    for (int i = 0; i < y.size(); ++i) out(i) = y(i) / r2;
    return out;
  };
  m.forward = SmoothMap::generic(n, n, inv);
  m.inverse = [inv](const VectorXd& y) -> VectorXd { return inv(y); };
  m.factor = [](const VectorXd& y) { return 1.0 / y.squaredNorm(); };
  m.in_domain = [](const VectorXd& y) { return y.norm() > 0.0; };
  m.in_inverse_domain = m.in_domain;
  m.sample = [n](std::mt19937& rng) {
    VectorXd y = sample_model_point(1, n - 1, rng);
    return VectorXd(y * uniform(rng, 0.3, 3.0));
  };
  for (int i = 1; i <= n; ++i) {
    m.related.push_back({"coord:" + std::to_string(i), "-2*ckilling:" + std::to_string(i)});
  }
  return m;
}

std::vector<std::string> atlas_names() {
  return {"radial_exp",          "mercator",           "warp_euclid",
          "warp_sphere",         "warp_hyp_elliptic",  "warp_hyp_hyperbolic",
          "warp_hyp_parabolic",  "killing_cover",      "sphere_inversion"};
}

Mercator default_mercator(const Warping& rho, double c, bool force_rk4) {
  // Default intervals stay inside the maximal interval of each solution.
  switch (rho.kind) {
    case WarpingKind::sin:
      return Mercator::from_constant(rho, c, {-3.0, 3.0}, force_rk4);
    case WarpingKind::sqrt2_exp:
    case WarpingKind::exp_over_sqrt2: {
      const double cc = c > 0.0 ? c : 1.0;
      const double blow = rho.kind == WarpingKind::sqrt2_exp ? cc / kSqrt2 : kSqrt2 * cc;
      return Mercator::from_constant(rho, cc, {-3.0, blow - 0.05}, force_rk4);
    }
    case WarpingKind::identity:
      return Mercator::from_constant(rho, c, {-3.0, 1.0}, force_rk4);
    case WarpingKind::sinh:
      return Mercator(rho, 0.0, 1.0, {-2.0, 0.6});
    case WarpingKind::cosh:
      return Mercator(rho, 0.0, 0.0, {-1.4, 1.4});
  }
  throw PreconditionError("unknown warping");
}

int default_epsilon(const Warping& rho) {
  switch (rho.kind) {
    case WarpingKind::cosh: return -1;
    case WarpingKind::sqrt2_exp:
    case WarpingKind::exp_over_sqrt2: return 0;
    default: return 1;
  }
}

ConformalMapSpec atlas_entry(const std::string& name, const AtlasParams& params) {
  const int n = params.n;
  if (n < 1) throw ConfigError("atlas dimension must be positive");
  if (name == "radial_exp") return radial_exp(std::max(n, 2));
  if (name == "warp_euclid") return warp_euclid(n);
  if (name == "warp_sphere") return warp_sphere(n);
  if (name == "warp_hyp_elliptic") return warp_hyp_elliptic(n);
  if (name == "warp_hyp_hyperbolic") return warp_hyp_hyperbolic(n);
  if (name == "warp_hyp_parabolic") return warp_hyp_parabolic(n);
  if (name == "killing_cover") return killing_cover(n);
  if (name == "sphere_inversion") return sphere_inversion(std::max(n, 2));
  if (name == "mercator") {
    const Warping rho = Warping::parse(params.rho);
    return mercator_map(default_mercator(rho, params.c, params.force_rk4), default_epsilon(rho), n);
  }
  throw ConfigError("unknown atlas map: " + name);
}

namespace {

void check_source_point(const ConformalMapSpec& map, const VectorXd& p) {
  if (p.size() != map.source.embed_dim()) {
    throw DimensionError("point dimension does not match the source of " + map.name);
  }
  if (map.source.membership_residual(p) > kMembershipTolerance * std::max(1.0, p.squaredNorm()) ||
      !map.in_domain(p)) {
    throw DomainError("point outside the domain of " + map.name);
  }
}

}  // namespace

VectorXd apply_map(const ConformalMapSpec& map, const VectorXd& p, Direction direction) {
  if (direction == Direction::forward) {
    check_source_point(map, p);
    return map.forward(p);
  }
  if (!map.inverse) throw PreconditionError(map.name + " has no inverse");
  if (p.size() != map.target.embed_dim()) {
    throw DimensionError("point dimension does not match the target of " + map.name);
  }
  if (map.target.membership_residual(p) > kMembershipTolerance * std::max(1.0, p.squaredNorm()) ||
      !map.in_inverse_domain(p)) {
    throw DomainError("point outside the image of " + map.name);
  }
  return map.inverse(p);
}

VectorXd pushforward(const ConformalMapSpec& map, const VectorXd& p, const VectorXd& v,
                     const Scheme& scheme) {
  check_source_point(map, p);
  if (v.size() != p.size()) throw DimensionError("tangent vector dimension mismatch");
  if (map.source.tangency_residual(p, v) > 1e-8 * std::max(1.0, v.norm() * p.norm())) {
    throw PreconditionError("vector is not tangent to the source space");
  }
  return jacobian(map.forward, p, scheme) * v;
}

double conformality_residual(const ConformalMapSpec& map, const VectorXd& p, int trials,
                             std::mt19937& rng, const Scheme& scheme) {
  check_source_point(map, p);
  const VectorXd q = map.forward(p);
  const MatrixXd J = jacobian(map.forward, p, scheme);
  const double phi = map.factor(p);
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const VectorXd X = sample_tangent(map.source, p, rng);
    const VectorXd Y = k == 0 ? X : sample_tangent(map.source, p, rng);
    const VectorXd PX = J * X, PY = J * Y;
    const double lhs = map.target.inner(q, PX, PY);
    const double rhs = phi * phi * map.source.inner(p, X, Y);
    const double scale = std::sqrt(std::abs(map.target.inner(q, PX, PX)) *
                                   std::abs(map.target.inner(q, PY, PY)));
    if (scale == 0.0) throw DegenerateError("pushforward annihilates a tangent vector");
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace vfgeom

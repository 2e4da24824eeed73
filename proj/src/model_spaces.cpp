#include "vfgeom/model_spaces.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace vfgeom {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int model_embed_dim(int eps, int n) { return eps == 0 ? n : n + 1; }

void check_eps(int eps) {
  if (eps < -1 || eps > 1) throw PreconditionError("epsilon must be -1, 0 or 1");
}

void check_n(int n) {
  if (n < 1) throw PreconditionError("model dimension must be positive");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

int parse_int(const std::string& s) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw ConfigError("not an integer: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("not an integer: " + s);
  }
}

}  // namespace

Warping Warping::make(WarpingKind kind) {
  Warping w;
  w.kind = kind;
  switch (kind) {
    case WarpingKind::sin:
      w.interval = {kSingularMargin, std::numbers::pi - kSingularMargin};
      break;
    case WarpingKind::sinh:
    case WarpingKind::identity:
      w.interval = {kSingularMargin, kInf};
      break;
    case WarpingKind::cosh:
    case WarpingKind::exp_over_sqrt2:
    case WarpingKind::sqrt2_exp:
      w.interval = {-kInf, kInf};
      break;
  }
  return w;
}

Warping Warping::parse(const std::string& name) {
  if (name == "sin") return make(WarpingKind::sin);
  if (name == "sinh") return make(WarpingKind::sinh);
  if (name == "cosh") return make(WarpingKind::cosh);
  if (name == "exp") return make(WarpingKind::exp_over_sqrt2);
  if (name == "id") return make(WarpingKind::identity);
  if (name == "sqrt2_exp") return make(WarpingKind::sqrt2_exp);
  throw ConfigError("unknown warping function: " + name);
}

std::string Warping::name() const {
  switch (kind) {
    case WarpingKind::sin: return "sin";
    case WarpingKind::sinh: return "sinh";
    case WarpingKind::cosh: return "cosh";
    case WarpingKind::exp_over_sqrt2: return "exp";
    case WarpingKind::identity: return "id";
    case WarpingKind::sqrt2_exp: return "sqrt2_exp";
  }
  return "?";
}

double Warping::derivative(double t) const {
  switch (kind) {
    case WarpingKind::sin: return std::cos(t);
    case WarpingKind::sinh: return std::cosh(t);
    case WarpingKind::cosh: return std::sinh(t);
    case WarpingKind::exp_over_sqrt2: return std::exp(t) / std::sqrt(2.0);
    case WarpingKind::identity: return 1.0;
    case WarpingKind::sqrt2_exp: return std::sqrt(2.0) * std::exp(t);
  }
  return 0.0;
}

AmbientSpace AmbientSpace::flat(int dim) { return flat(Signature::euclidean(dim)); }

AmbientSpace AmbientSpace::flat(const Signature& signature) {
  if (signature.dim < 1) throw PreconditionError("flat space needs positive dimension");
  AmbientSpace s;
  s.kind_ = SpaceKind::flat;
  s.signature_ = signature;
  s.n_ = signature.dim;
  return s;
}

AmbientSpace AmbientSpace::sphere(int n) {
  check_n(n);
  AmbientSpace s;
  s.kind_ = SpaceKind::sphere;
  s.signature_ = Signature::euclidean(n + 1);
  s.n_ = n;
  s.eps_ = 1;
  return s;
}

AmbientSpace AmbientSpace::hyperbolic(int n) {
  check_n(n);
  AmbientSpace s;
  s.kind_ = SpaceKind::hyperbolic;
  s.signature_ = Signature::lorentzian(n + 1);
  s.n_ = n;
  s.eps_ = -1;
  return s;
}

AmbientSpace AmbientSpace::product(int eps, int n) {
  check_eps(eps);
  check_n(n);
  const int q = model_embed_dim(eps, n);
  AmbientSpace s;
  s.kind_ = SpaceKind::product_with_line;
  s.signature_ = eps == -1 ? Signature::lorentzian(q + 1, q - 1) : Signature::euclidean(q + 1);
  s.n_ = n;
  s.eps_ = eps;
  return s;
}

AmbientSpace AmbientSpace::warped(const Warping& rho, int eps, int n) {
  check_eps(eps);
  check_n(n);
  const int q = model_embed_dim(eps, n);
  AmbientSpace s;
  s.kind_ = SpaceKind::warped_interval;
  s.signature_ = eps == -1 ? Signature::lorentzian(q + 1, q) : Signature::euclidean(q + 1);
  s.n_ = n;
  s.eps_ = eps;
  s.warping_ = rho;
  return s;
}

AmbientSpace AmbientSpace::space_form(int eps, int n) {
  check_eps(eps);
  if (eps == 1) return sphere(n);
  if (eps == -1) return hyperbolic(n);
  return flat(n);
}

AmbientSpace AmbientSpace::parse(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty()) throw ConfigError("empty space description");
  const std::string& k = parts[0];
  try {
    if (k == "flat" && parts.size() == 2) return flat(parse_int(parts[1]));
    if (k == "lorentz" && parts.size() == 2) return flat(Signature::lorentzian(parse_int(parts[1])));
    if (k == "sphere" && parts.size() == 2) return sphere(parse_int(parts[1]));
    if (k == "hyperbolic" && parts.size() == 2) return hyperbolic(parse_int(parts[1]));
    if (k == "product" && parts.size() == 3) {
      return product(parse_int(parts[1]), parse_int(parts[2]));
    }
    if (k == "warped" && parts.size() == 4) {
      return warped(Warping::parse(parts[1]), parse_int(parts[2]), parse_int(parts[3]));
    }
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("malformed space description: " + text);
}

std::string AmbientSpace::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SpaceKind::flat:
      os << (signature_.is_euclidean() ? "flat:" : "lorentz:") << signature_.dim;
      break;
    case SpaceKind::sphere: os << "sphere:" << n_; break;
    case SpaceKind::hyperbolic: os << "hyperbolic:" << n_; break;
    case SpaceKind::product_with_line: os << "product:" << eps_ << ':' << n_; break;
    case SpaceKind::warped_interval:
      os << "warped:" << warping_.name() << ':' << eps_ << ':' << n_;
      break;
  }
  return os.str();
}

int AmbientSpace::dim() const {
  switch (kind_) {
    case SpaceKind::flat: return signature_.dim;
    case SpaceKind::sphere:
    case SpaceKind::hyperbolic: return n_;
    case SpaceKind::product_with_line:
    case SpaceKind::warped_interval: return n_ + 1;
  }
  return 0;
}

const Warping& AmbientSpace::warping() const {
  if (!is_warped()) throw PreconditionError("space has no warping function");
  return warping_;
}

int AmbientSpace::line_axis() const {
  if (kind_ == SpaceKind::product_with_line) return embed_dim() - 1;
  if (kind_ == SpaceKind::warped_interval) return 0;
  throw PreconditionError("space has no line factor");
}

std::pair<int, int> AmbientSpace::model_range() const {
  switch (kind_) {
    case SpaceKind::product_with_line: return {0, embed_dim() - 1};
    case SpaceKind::warped_interval: return {1, embed_dim()};
    default: return {0, embed_dim()};
  }
}

double AmbientSpace::membership_residual(const VectorXd& p) const {
  if (p.size() != embed_dim()) {
    throw DimensionError("point dimension does not match the ambient space");
  }
  if (kind_ == SpaceKind::flat) return 0.0;
  if (kind_ == SpaceKind::warped_interval && !warping_.interval.contains(p(0))) return kInf;
  if (eps_ == 0) return 0.0;
  const auto [lo, hi] = model_range();
  const VectorXd x = p.segment(lo, hi - lo);
  if (eps_ == 1) return std::abs(x.squaredNorm() - 1.0);
  const double last = x(x.size() - 1);
  if (last <= 0.0) return kInf;
  return std::abs(x.head(x.size() - 1).squaredNorm() - last * last + 1.0);
}

MatrixXd AmbientSpace::metric(const VectorXd& p) const {
  if (p.size() != embed_dim()) {
    throw DimensionError("point dimension does not match the ambient space");
  }
  MatrixXd g = signature_.matrix();
  if (kind_ == SpaceKind::warped_interval) {
    const double r = warping_eval(*this, p(0));
    g.bottomRightCorner(embed_dim() - 1, embed_dim() - 1) *= r * r;
  }
  return g;
}

double AmbientSpace::inner(const VectorXd& p, const VectorXd& u, const VectorXd& v) const {
  if (u.size() != embed_dim() || v.size() != embed_dim()) {
    throw DimensionError("vector dimension does not match the ambient space");
  }
  return u.dot(metric(p) * v);
}

std::vector<VectorXd> AmbientSpace::constraint_normals(const VectorXd& p) const {
  if (p.size() != embed_dim()) {
    throw DimensionError("point dimension does not match the ambient space");
  }
  if (kind_ == SpaceKind::flat || eps_ == 0) return {};
  VectorXd nrm = VectorXd::Zero(embed_dim());
  const auto [lo, hi] = model_range();
  nrm.segment(lo, hi - lo) = p.segment(lo, hi - lo);
  return {nrm};
}

double AmbientSpace::tangency_residual(const VectorXd& p, const VectorXd& v) const {
  if (v.size() != embed_dim()) {
    throw DimensionError("vector dimension does not match the ambient space");
  }
  if (kind_ == SpaceKind::flat || eps_ == 0) return 0.0;
  const auto [lo, hi] = model_range();
  const VectorXd x = p.segment(lo, hi - lo);
  const VectorXd w = v.segment(lo, hi - lo);
  double acc = x.dot(w);
  if (eps_ == -1) acc -= 2.0 * x(x.size() - 1) * w(w.size() - 1);
  return std::abs(acc);
}

VectorXd AmbientSpace::project_tangent(const VectorXd& p, const VectorXd& v) const {
  const auto normals = constraint_normals(p);
  if (normals.empty()) return v;
  return tangent_normal_split(metric(p), normals, v).normal;
}

VectorXd AmbientSpace::christoffel(const VectorXd& p, const VectorXd& v,
                                   const VectorXd& w) const {
  VectorXd out = VectorXd::Zero(embed_dim());
  if (kind_ != SpaceKind::warped_interval) return out;
  const int q = embed_dim() - 1;
  const double r = warping_eval(*this, p(0));
  const double dr = warping_.derivative(p(0));
  const VectorXd vx = v.tail(q), wx = w.tail(q);
  double eta = vx.dot(wx);
  if (eps_ == -1) eta -= 2.0 * vx(q - 1) * wx(q - 1);
  out(0) = -r * dr * eta;
  out.tail(q) = (dr / r) * (v(0) * wx + w(0) * vx);
  return out;
}

bool AmbientSpace::operator==(const AmbientSpace& other) const {
  return describe() == other.describe();
}

double warping_eval(const AmbientSpace& space, double t) {
  const Warping& w = space.warping();
  if (!w.interval.contains(t)) {
    std::ostringstream os;
    os << "t = " << t << " outside the warping interval of " << w.name();
    throw DomainError(os.str());
  }
  return w.eval(t);
}

}  // namespace vfgeom

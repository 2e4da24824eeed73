#include "vfgeom/property_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace vfgeom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Residual Euclidean norm below which a normal-frame candidate counts as dependent.
constexpr double kFrameCandidateFloor = 1e-6;

Scheme scheme_for(const ImmersionSpec& f) {
  if (f.map.exact()) return Analytic{};
  return CentralDifference{};
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

double g_norm(const MatrixXd& G, const VectorXd& c) {
  return std::sqrt(std::max(0.0, c.dot(G * c)));
}

// Projection residual of v off the span of the columns of K in the form g.
VectorXd project_off(const MatrixXd& g, const MatrixXd& K, const VectorXd& v) {
  if (K.cols() == 0) return v;
  const MatrixXd gram = K.transpose() * g * K;
  const VectorXd coeffs = gram.fullPivLu().solve(K.transpose() * (g * v));
  return v - K * coeffs;
}

// Orthonormal basis (in G) of span(e_1..e_m), optionally of the complement of c.
std::vector<VectorXd> chart_directions(const MatrixXd& G, const VectorXd* exclude) {
  const int m = static_cast<int>(G.rows());
  std::vector<VectorXd> out;
  MatrixXd K(m, 0);
  if (exclude != nullptr) {
    K.resize(m, 1);
    K.col(0) = *exclude;
  }
  for (int i = 0; i < m; ++i) {
    VectorXd e = VectorXd::Unit(m, i);
    VectorXd w = project_off(G, K, e);
    const double n = g_norm(G, w);
    if (n < kFrameCandidateFloor) continue;
    w /= n;
    out.push_back(w);
    K.conservativeResize(m, K.cols() + 1);
    K.col(K.cols() - 1) = w;
    if (static_cast<int>(out.size()) == (exclude ? m - 1 : m)) break;
  }
  return out;
}

std::string join_shape(const std::vector<int>& shape) {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  return os.str();
}

DiagnosticsReport start_report(const std::string& property, const ImmersionSpec& f,
                               const std::string& field, const Grid& grid, double tolerance) {
  DiagnosticsReport r;
  r.property = property;
  r.immersion = f.name;
  r.field = field;
  r.grid_shape = grid.shape;
  r.points = grid.points;
  r.residuals.assign(grid.points.size(), 0.0);
  r.masked.assign(grid.points.size(), false);
  r.values.assign(grid.points.size(), kNaN);
  r.tolerance = tolerance;
  return r;
}

void finalize_with(DiagnosticsReport& r, bool degenerate, const std::string& detail) {
  finalize(r);
  if (degenerate) {
    r.verdict = Verdict::degenerate;
    r.detail = detail;
  }
}

bool all_masked(const DiagnosticsReport& r) {
  return !r.masked.empty() && r.masked_count() == static_cast<int>(r.masked.size());
}

const char* kTangentVanishes = "Z^T vanishes identically";
const char* kNormalVanishes = "Z^perp vanishes identically";

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::degenerate: return "degenerate";
  }
  return "fail";
}

std::string along_name(Along a) {
  return a == Along::all_directions ? "all_directions" : "perp_to_ZT";
}

Grid Grid::uniform(const ParamBox& box, int per_axis) {
  return uniform(box, std::vector<int>(static_cast<std::size_t>(box.dim()), per_axis));
}

Grid Grid::uniform(const ParamBox& box, const std::vector<int>& shape) {
  Grid g;
  g.points = box_grid(box, shape);
  g.shape = shape;
  return g;
}

Grid Grid::over(const ImmersionSpec& f, int per_axis) { return uniform(f.domain, per_axis); }

int DiagnosticsReport::masked_count() const {
  return static_cast<int>(std::count(masked.begin(), masked.end(), true));
}

void finalize(DiagnosticsReport& r) {
  Summary s;
  double total = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < r.residuals.size(); ++i) {
    if (r.masked[i]) continue;
    const double v = r.residuals[i];
    // NaN residuals win so that a broken point cannot pass.
    if (s.argmax < 0 || !(v <= s.max)) {
      s.max = v;
      s.argmax = static_cast<int>(i);
    }
    total += v;
    ++count;
  }
  s.mean = count > 0 ? total / count : 0.0;
  r.summary = s;
  r.verdict = s.max <= r.tolerance ? Verdict::pass : Verdict::fail;
  std::ostringstream os;
  os << "max residual " << s.max << " vs tolerance " << r.tolerance << " on grid "
     << join_shape(r.grid_shape);
  if (r.masked_count() > 0) os << ", " << r.masked_count() << " points with vanishing Z^T";
  r.detail = os.str();
}

MatrixXd LocalGeometry::second_form(const VectorXd& normal) const {
  const int m = param_dim();
  MatrixXd B(m, m);
  const VectorXd gn = metric * normal;
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      B(i, j) = B(j, i) = covariant_second[i * m + j].dot(gn);
    }
  }
  return B;
}

MatrixXd LocalGeometry::shape_operator(int a) const {
  return first_form.ldlt().solve(second_forms.at(static_cast<std::size_t>(a)));
}

MatrixXd LocalGeometry::shape_operator(const VectorXd& normal) const {
  return first_form.ldlt().solve(second_form(normal));
}

LocalGeometry local_geometry(const ImmersionSpec& f, const VectorXd& u) {
  LocalGeometry geo;
  geo.jet = jet2(f.map, u, scheme_for(f));
  const MatrixXd& J = geo.jet.jacobian;
  const int m = geo.param_dim();
  const VectorXd& p = geo.jet.value;
  const Eigen::JacobiSVD<MatrixXd> svd(J);
  if (svd.singularValues().size() < m || svd.singularValues()(m - 1) < kRegularityFloor) {
    std::ostringstream os;
    os << "Jacobian is rank deficient at u = (" << u.transpose() << ")";
    throw DegenerateError(os.str());
  }
  geo.metric = f.ambient.metric(p);
  geo.first_form = J.transpose() * geo.metric * J;
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(geo.first_form);
  if (eig.eigenvalues().minCoeff() <= kRegularityFloor * kRegularityFloor) {
    throw DegenerateError("induced metric is not positive definite");
  }

  geo.covariant_second.resize(static_cast<std::size_t>(m * m));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      geo.covariant_second[i * m + j] =
          geo.jet.second(i, j) + f.ambient.christoffel(p, J.col(i), J.col(j));
    }
  }

  // Normal frame: complement of the tangent space and the constraint normals.
  const auto constraint = f.ambient.constraint_normals(p);
  const int N = f.ambient.embed_dim();
  const int want = f.ambient.dim() - m;
  MatrixXd K(N, m + static_cast<int>(constraint.size()));
  K.leftCols(m) = J;
  for (std::size_t c = 0; c < constraint.size(); ++c) K.col(m + static_cast<int>(c)) = constraint[c];
  std::vector<bool> used(static_cast<std::size_t>(N), false);
  while (static_cast<int>(geo.normals.size()) < want) {
    int best = -1;
    VectorXd best_w;
    double best_norm = 0.0;
    for (int i = 0; i < N; ++i) {
      if (used[i]) continue;
      const VectorXd w = project_off(geo.metric, K, VectorXd::Unit(N, i));
      if (w.norm() > best_norm) {
        best_norm = w.norm();
        best_w = w;
        best = i;
      }
    }
    if (best < 0 || best_norm < kFrameCandidateFloor) {
      throw DegenerateError("could not complete the normal frame");
    }
    used[best] = true;
    const double q = best_w.dot(geo.metric * best_w);
    if (std::abs(q) < kNullThreshold) throw NullVectorError("null normal candidate");
    const VectorXd xi = best_w / std::sqrt(std::abs(q));
    geo.normals.push_back(xi);
    geo.normal_signs.push_back(q > 0 ? 1.0 : -1.0);
    K.conservativeResize(N, K.cols() + 1);
    K.col(K.cols() - 1) = xi;
  }
  for (const auto& xi : geo.normals) geo.second_forms.push_back(geo.second_form(xi));
  return geo;
}

Decomposition decompose(const LocalGeometry& geo, const AmbientSpace& ambient,
                        const AmbientField& Z) {
  (void)ambient;
  Decomposition d;
  const MatrixXd& J = geo.jet.jacobian;
  d.point = geo.jet.value;
  d.field = eval_field(Z, d.point);
  d.tangent_coeffs = geo.first_form.ldlt().solve(J.transpose() * (geo.metric * d.field));
  d.tangent_ambient = J * d.tangent_coeffs;
  d.normal_ambient = d.field - d.tangent_ambient;
  d.tangent_norm = g_norm(geo.first_form, d.tangent_coeffs);
  d.normal_norm = std::sqrt(std::abs(d.normal_ambient.dot(geo.metric * d.normal_ambient)));
  return d;
}

Decomposition decompose(const ImmersionSpec& f, const AmbientField& Z, const VectorXd& u) {
  return decompose(local_geometry(f, u), f.ambient, Z);
}

std::vector<ShapeOperator> shape_operators(const ImmersionSpec& f, const VectorXd& u) {
  const LocalGeometry geo = local_geometry(f, u);
  std::vector<ShapeOperator> out;
  for (std::size_t a = 0; a < geo.normals.size(); ++a) {
    out.push_back({geo.normals[a], geo.normal_signs[a], geo.shape_operator(static_cast<int>(a))});
  }
  return out;
}

DiagnosticsReport ratio_report(const ImmersionSpec& f, const AmbientField& Z, const Grid& grid,
                               double tolerance) {
  DiagnosticsReport r = start_report("constant_ratio", f, Z.name, grid, tolerance);
  std::vector<double> ratios;
  bool normal_vanishes = true;
  for (int k = 0; k < grid.size(); ++k) {
    const Decomposition d = decompose(f, Z, grid.points[k]);
    if (d.normal_norm >= kTauZero) normal_vanishes = false;
    if (d.tangent_norm < kTauZero) {
      r.masked[k] = true;
      continue;
    }
    r.values[k] = d.normal_norm / d.tangent_norm;
    ratios.push_back(r.values[k]);
  }
  if (all_masked(r)) {
    finalize_with(r, true, kTangentVanishes);
    return r;
  }
  const double med = median(ratios);
  for (int k = 0; k < grid.size(); ++k) {
    if (!r.masked[k]) r.residuals[k] = std::abs(r.values[k] - med) / std::max(1.0, med);
  }
  r.constant = med;
  finalize_with(r, normal_vanishes, kNormalVanishes);
  return r;
}

DiagnosticsReport pd_residual(const ImmersionSpec& f, const AmbientField& Z, const Grid& grid,
                              double tolerance) {
  DiagnosticsReport r = start_report("principal_direction", f, Z.name, grid, tolerance);
  for (int k = 0; k < grid.size(); ++k) {
    const LocalGeometry geo = local_geometry(f, grid.points[k]);
    const Decomposition d = decompose(geo, f.ambient, Z);
    if (d.tangent_norm < kTauZero) {
      r.masked[k] = true;
      continue;
    }
    const MatrixXd& G = geo.first_form;
    const VectorXd c = d.tangent_coeffs / d.tangent_norm;
    double worst = 0.0;
    for (std::size_t a = 0; a < geo.second_forms.size(); ++a) {
      const MatrixXd& B = geo.second_forms[a];
      const MatrixXd A = geo.shape_operator(static_cast<int>(a));
      const double lambda = c.dot(B * c);
      const Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(B, G);
      const double a_norm = ges.eigenvalues().cwiseAbs().maxCoeff();
      worst = std::max(worst, g_norm(G, A * c - lambda * c) / (a_norm + kTauZero));
    }
    r.residuals[k] = worst;
    r.values[k] = worst;
  }
  finalize_with(r, all_masked(r), std::string("vacuous: ") + kTangentVanishes);
  return r;
}

namespace {

// Normal-frame components of the normal connection derivative nabla^perp_X W at u.
VectorXd perp_derivative(const ImmersionSpec& f, const AmbientField& Z, const LocalGeometry& geo,
                         const Decomposition& d, const VectorXd& u, const VectorXd& X,
                         const NormalConnectionOptions& opt) {
  const int q = static_cast<int>(geo.normals.size());
  const VectorXd JX = geo.jet.jacobian * X;
  const VectorXd& p = d.point;
  VectorXd comps(q);
  const VectorXd up = u + opt.h * X, um = u - opt.h * X;
  if (opt.via_second_form) {
    const VectorXd dZ = (eval_field(Z, f(up)) - eval_field(Z, f(um))) / (2.0 * opt.h) +
                        f.ambient.christoffel(p, JX, d.field);
    for (int a = 0; a < q; ++a) {
      comps(a) = dZ.dot(geo.metric * geo.normals[a]) - X.dot(geo.second_forms[a] * d.tangent_coeffs);
    }
    if (opt.normalized) {
      VectorXd nhat(q);
      for (int a = 0; a < q; ++a) {
        nhat(a) = d.normal_ambient.dot(geo.metric * geo.normals[a]) / d.normal_norm;
      }
      comps = (comps - comps.dot(nhat) * nhat) / d.normal_norm;
    }
    return comps;
  }
  const auto W = [&](const VectorXd& v) {
    const Decomposition dv = decompose(f, Z, v);
    return opt.normalized ? VectorXd(dv.normal_ambient / dv.normal_norm) : dv.normal_ambient;
  };
  const VectorXd W0 = opt.normalized ? VectorXd(d.normal_ambient / d.normal_norm) : d.normal_ambient;
  const VectorXd dW = (W(up) - W(um)) / (2.0 * opt.h) + f.ambient.christoffel(p, JX, W0);
  for (int a = 0; a < q; ++a) comps(a) = dW.dot(geo.metric * geo.normals[a]);
  return comps;
}

}  // namespace

DiagnosticsReport normal_connection_residual(const ImmersionSpec& f, const AmbientField& Z,
                                             const Grid& grid,
                                             const NormalConnectionOptions& options,
                                             double tolerance) {
  DiagnosticsReport r = start_report("normal_parallel", f, Z.name, grid, tolerance);
  r.fd_step = options.h;
  for (int k = 0; k < grid.size(); ++k) {
    const VectorXd& u = grid.points[k];
    const LocalGeometry geo = local_geometry(f, u);
    const Decomposition d = decompose(geo, f.ambient, Z);
    if (options.normalized && d.normal_norm < kTauZero) {
      r.masked[k] = true;
      continue;
    }
    const bool perp = options.along == Along::perp_to_ZT && d.tangent_norm >= kTauZero;
    const auto dirs = chart_directions(geo.first_form, perp ? &d.tangent_coeffs : nullptr);
    double worst = 0.0;
    for (const auto& X : dirs) {
      worst = std::max(worst, perp_derivative(f, Z, geo, d, u, X, options).norm());
    }
    r.residuals[k] = worst;
    r.values[k] = worst;
  }
  finalize_with(r, all_masked(r), kNormalVanishes);
  return r;
}

namespace {

// Tangent coefficients of Z^T at v, divided by |Z^T|_G for unit speed.
VectorXd speed_tangent(const ImmersionSpec& f, const AmbientField& Z, const VectorXd& v,
                       GeodesicSpeed speed) {
  const Decomposition d = decompose(f, Z, v);
  return speed == GeodesicSpeed::unit ? VectorXd(d.tangent_coeffs / d.tangent_norm)
                                      : d.tangent_coeffs;
}

MatrixXd first_form_at(const ImmersionSpec& f, const VectorXd& v) {
  const MatrixXd J = jacobian(f.map, v, scheme_for(f));
  return J.transpose() * f.ambient.metric(f(v)) * J;
}

}  // namespace

DiagnosticsReport geodesic_residual(const ImmersionSpec& f, const AmbientField& Z,
                                    const Grid& grid, GeodesicPath path, double h,
                                    double tolerance, GeodesicSpeed speed) {
  DiagnosticsReport r = start_report("geodesic", f, Z.name, grid, tolerance);
  r.fd_step = h;
  for (int k = 0; k < grid.size(); ++k) {
    const VectorXd& u = grid.points[k];
    const LocalGeometry geo = local_geometry(f, u);
    const Decomposition d = decompose(geo, f.ambient, Z);
    if (d.tangent_norm < kTauZero) {
      r.masked[k] = true;
      continue;
    }
    const int m = geo.param_dim();
    const MatrixXd& G = geo.first_form;
    const VectorXd t = speed == GeodesicSpeed::unit ? VectorXd(d.tangent_coeffs / d.tangent_norm)
                                                    : d.tangent_coeffs;
    const VectorXd Dt =
        (speed_tangent(f, Z, u + h * t, speed) - speed_tangent(f, Z, u - h * t, speed)) /
        (2.0 * h);
    VectorXd acc;
    if (path == GeodesicPath::extrinsic) {
      VectorXd a = geo.jet.jacobian * Dt;
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) a += t(i) * t(j) * geo.covariant_second[i * m + j];
      }
      acc = G.ldlt().solve(geo.jet.jacobian.transpose() * (geo.metric * a));
    } else {
      std::vector<MatrixXd> dG(static_cast<std::size_t>(m));
      for (int l = 0; l < m; ++l) {
        const VectorXd e = VectorXd::Unit(m, l);
        dG[l] = (first_form_at(f, u + h * e) - first_form_at(f, u - h * e)) / (2.0 * h);
      }
      // Gamma_kij t^i t^j with lowered index, then raised by G^{-1}.
      VectorXd lowered = VectorXd::Zero(m);
      for (int l = 0; l < m; ++l) {
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < m; ++j) {
            lowered(l) += 0.5 * t(i) * t(j) * (dG[i](j, l) + dG[j](i, l) - dG[l](i, j));
          }
        }
      }
      acc = Dt + G.ldlt().solve(lowered);
    }
    r.residuals[k] = g_norm(G, acc);
    r.values[k] = r.residuals[k];
  }
  finalize_with(r, all_masked(r), kTangentVanishes);
  return r;
}

DiagnosticsReport shape_annihilation(const ImmersionSpec& f, const AmbientField& Z,
                                     const Grid& grid, double tolerance) {
  DiagnosticsReport r = start_report("shape_annihilation", f, Z.name, grid, tolerance);
  for (int k = 0; k < grid.size(); ++k) {
    const LocalGeometry geo = local_geometry(f, grid.points[k]);
    const Decomposition d = decompose(geo, f.ambient, Z);
    const MatrixXd A = geo.shape_operator(d.normal_ambient);
    r.residuals[k] = g_norm(geo.first_form, A * d.tangent_coeffs);
    r.values[k] = r.residuals[k];
  }
  finalize(r);
  return r;
}

DiagnosticsReport polar_residual(const MetricFn& metric, const Grid& grid,
                                 std::optional<double> constant, double tolerance) {
  DiagnosticsReport r;
  r.property = "polar";
  r.grid_shape = grid.shape;
  r.points = grid.points;
  r.residuals.assign(grid.points.size(), 0.0);
  r.masked.assign(grid.points.size(), false);
  r.values.assign(grid.points.size(), kNaN);
  r.tolerance = tolerance;
  std::vector<MatrixXd> forms;
  for (const auto& u : grid.points) {
    forms.push_back(metric(u));
    if (forms.back().rows() < 1) throw DimensionError("polar check needs at least one axis");
  }
  for (std::size_t k = 0; k < forms.size(); ++k) r.values[k] = forms[k](0, 0);
  const double c = constant ? *constant : median(r.values);
  for (std::size_t k = 0; k < forms.size(); ++k) {
    const MatrixXd& G = forms[k];
    double worst = std::abs(G(0, 0) - c);
    for (Eigen::Index i = 1; i < G.cols(); ++i) worst = std::max(worst, std::abs(G(0, i)));
    r.residuals[k] = worst;
  }
  r.constant = c;
  finalize(r);
  return r;
}

DiagnosticsReport polar_residual(const ImmersionSpec& f, const Grid& grid,
                                 std::optional<double> constant, double tolerance) {
  DiagnosticsReport r = polar_residual(
      [&f](const VectorXd& u) { return first_form_at(f, u); }, grid, constant, tolerance);
  r.immersion = f.name;
  return r;
}

DiagnosticsReport length_report(const ImmersionSpec& f, const AmbientField& Z, Component which,
                                const Grid& grid, std::optional<double> expected,
                                double tolerance) {
  DiagnosticsReport r = start_report(
      which == Component::tangent ? "t_constant" : "n_constant", f, Z.name, grid, tolerance);
  for (int k = 0; k < grid.size(); ++k) {
    const Decomposition d = decompose(f, Z, grid.points[k]);
    r.values[k] = which == Component::tangent ? d.tangent_norm : d.normal_norm;
  }
  const double target = expected ? *expected : median(r.values);
  for (int k = 0; k < grid.size(); ++k) r.residuals[k] = std::abs(r.values[k] - target);
  r.constant = target;
  finalize(r);
  return r;
}

DiagnosticsReport perp_length_variation(const ImmersionSpec& f, const AmbientField& Z,
                                        const Grid& grid, double h, double tolerance) {
  DiagnosticsReport r = start_report("perp_length_variation", f, Z.name, grid, tolerance);
  r.fd_step = h;
  for (int k = 0; k < grid.size(); ++k) {
    const VectorXd& u = grid.points[k];
    const LocalGeometry geo = local_geometry(f, u);
    const Decomposition d = decompose(geo, f.ambient, Z);
    if (d.tangent_norm < kTauZero) {
      r.masked[k] = true;
      continue;
    }
    double worst = 0.0;
    for (const auto& X : chart_directions(geo.first_form, &d.tangent_coeffs)) {
      const double dp = decompose(f, Z, u + h * X).normal_norm;
      const double dm = decompose(f, Z, u - h * X).normal_norm;
      worst = std::max(worst, std::abs(dp - dm) / (2.0 * h));
    }
    r.residuals[k] = worst;
    r.values[k] = worst;
  }
  finalize_with(r, all_masked(r), kTangentVanishes);
  return r;
}

double gauss_curvature(const ImmersionSpec& f, const VectorXd& u) {
  if (f.param_dim() != 2 || f.ambient.kind() != SpaceKind::flat || f.ambient.embed_dim() != 3 ||
      !f.ambient.signature().is_euclidean()) {
    throw PreconditionError("Gauss curvature needs a surface in Euclidean 3-space");
  }
  const LocalGeometry geo = local_geometry(f, u);
  return geo.second_forms.front().determinant() / geo.first_form.determinant();
}

AmbientField claim_field(const ImmersionSpec& f, const Claim& claim) {
  return make_field(claim.field, f.ambient);
}

}  // namespace vfgeom

#include "vfgeom/tensor_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

namespace vfgeom {

Signature Signature::euclidean(int dim) { return Signature{dim, {}}; }

Signature Signature::lorentzian(int dim) { return lorentzian(dim, dim - 1); }

Signature Signature::lorentzian(int dim, int negative_axis) {
  if (negative_axis < 0 || negative_axis >= dim) {
    throw DimensionError("negative axis outside signature dimension");
  }
  return Signature{dim, {negative_axis}};
}

double Signature::sign(int axis) const {
  return std::find(negative_axes.begin(), negative_axes.end(), axis) != negative_axes.end() ? -1.0
                                                                                            : 1.0;
}

MatrixXd Signature::matrix() const {
  MatrixXd m = MatrixXd::Identity(dim, dim);
  for (int a : negative_axes) {
    m(a, a) = -1.0;
  }
  return m;
}

void Signature::check(int u_size, int v_size) const {
  if (u_size != dim || v_size != dim) {
    std::ostringstream os;
    os << "inner product dimension mismatch: form " << dim << ", vectors " << u_size << " and "
       << v_size;
    throw DimensionError(os.str());
  }
}

double signature_inner(const Signature& form, const VectorXd& u, const VectorXd& v) {
  return form.inner<double>(u, v);
}

bool ParamBox::contains(const VectorXd& u) const {
  if (u.size() != dim()) {
    return false;
  }
  for (int i = 0; i < dim(); ++i) {
    if (!axes[i].contains(u(i))) {
      return false;
    }
  }
  return true;
}

bool ParamBox::contains_with_margin(const VectorXd& u, const VectorXd& margin) const {
  if (u.size() != dim()) {
    return false;
  }
  for (int i = 0; i < dim(); ++i) {
    if (!(u(i) - margin(i) > axes[i].lo && u(i) + margin(i) < axes[i].hi)) {
      return false;
    }
  }
  return true;
}

ParamBox ParamBox::inset(double delta) const {
  ParamBox out = *this;
  for (auto& a : out.axes) {
    if (std::isfinite(a.lo)) a.lo += delta;
    if (std::isfinite(a.hi)) a.hi -= delta;
  }
  return out;
}

std::vector<VectorXd> box_grid(const ParamBox& box, const std::vector<int>& shape) {
  if (static_cast<int>(shape.size()) != box.dim()) {
    throw DimensionError("grid shape does not match the box dimension");
  }
  std::size_t total = 1;
  for (int i = 0; i < box.dim(); ++i) {
    const Interval& a = box.axes[static_cast<std::size_t>(i)];
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      throw PreconditionError("grid needs a bounded box");
    }
    if (shape[static_cast<std::size_t>(i)] < 1) throw PreconditionError("empty grid axis");
    total *= static_cast<std::size_t>(shape[static_cast<std::size_t>(i)]);
  }
  std::vector<VectorXd> out;
  out.reserve(total);
  std::vector<int> idx(shape.size(), 0);
  for (std::size_t k = 0; k < total; ++k) {
    VectorXd u(box.dim());
    for (int i = 0; i < box.dim(); ++i) {
      const Interval& a = box.axes[static_cast<std::size_t>(i)];
      const int n = shape[static_cast<std::size_t>(i)];
      const int j = idx[static_cast<std::size_t>(i)];
      u(i) = n == 1 ? 0.5 * (a.lo + a.hi) : a.lo + (a.hi - a.lo) * j / (n - 1);
    }
    out.push_back(u);
    for (int i = box.dim() - 1; i >= 0; --i) {
      if (++idx[static_cast<std::size_t>(i)] < shape[static_cast<std::size_t>(i)]) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
  }
  return out;
}

std::vector<VectorXd> box_grid(const ParamBox& box, int per_axis) {
  return box_grid(box, std::vector<int>(static_cast<std::size_t>(box.dim()), per_axis));
}

SmoothMap::SmoothMap(int in_dim, int out_dim, DoubleFn f, DualFn f_dual)
    : in_dim_(in_dim), out_dim_(out_dim), value_(std::move(f)), dual_(std::move(f_dual)) {}

void SmoothMap::check_input(int size) const {
  if (!value_) {
    throw PreconditionError("evaluating an empty map");
  }
  if (size != in_dim_) {
    std::ostringstream os;
    os << "map expects " << in_dim_ << " inputs, got " << size;
    throw DimensionError(os.str());
  }
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
  if (outer.in_dim() != inner.out_dim()) {
    throw DimensionError("composition dimension mismatch");
  }
  SmoothMap::DoubleFn value = [outer, inner](const VectorXd& u) {
    return outer.eval<double>(inner.eval<double>(u));
  };
  SmoothMap::DualFn dual;
  if (outer.exact() && inner.exact()) {
    dual = [outer, inner](const VecX<HyperDual>& u) {
      return outer.eval<HyperDual>(inner.eval<HyperDual>(u));
    };
  }
  return SmoothMap(inner.in_dim(), outer.out_dim(), std::move(value), std::move(dual));
}

VectorXd Jet2::second(int i, int j) const {
  VectorXd out(ambient_dim());
  for (int k = 0; k < ambient_dim(); ++k) {
    out(k) = hessian[k](i, j);
  }
  return out;
}

namespace {

void require_finite(const VectorXd& v) {
  if (!v.allFinite()) {
    throw DomainError("map evaluation produced a non-finite value");
  }
}

VectorXd fd_steps(const VectorXd& u, double h) {
  VectorXd steps(u.size());
  for (int i = 0; i < u.size(); ++i) {
    steps(i) = h * std::max(1.0, std::abs(u(i)));
  }
  return steps;
}

Jet2 jet_exact(const SmoothMap& map, const VectorXd& u) {
  const int m = static_cast<int>(u.size());
  const int n = map.out_dim();
  Jet2 jet;
  jet.value = map(u);
  require_finite(jet.value);
  jet.jacobian.resize(n, m);
  jet.hessian.assign(n, MatrixXd::Zero(m, m));
  VecX<HyperDual> x(m);
  for (int i = 0; i < m; ++i) {
    for (int j = i; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        x(k) = HyperDual(u(k), k == i ? 1.0 : 0.0, k == j ? 1.0 : 0.0, 0.0);
      }
      const VecX<HyperDual> y = map.eval<HyperDual>(x);
      for (int r = 0; r < n; ++r) {
        if (i == j) {
          jet.jacobian(r, i) = y(r).b;
        }
        jet.hessian[r](i, j) = y(r).d;
        jet.hessian[r](j, i) = y(r).d;
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    if (!jet.hessian[r].allFinite() || !jet.jacobian.row(r).allFinite()) {
      throw DomainError("non-finite derivative");
    }
  }
  return jet;
}

Jet2 jet_fd(const SmoothMap& map, const VectorXd& u, const CentralDifference& cd) {
  const int m = static_cast<int>(u.size());
  const int n = map.out_dim();
  Jet2 jet;
  jet.value = map(u);
  require_finite(jet.value);
  const VectorXd h = fd_steps(u, cd.h);
  const VectorXd hh = fd_steps(u, cd.hessian_h);
  jet.jacobian.resize(n, m);
  for (int i = 0; i < m; ++i) {
    VectorXd up = u, um = u;
    up(i) += h(i);
    um(i) -= h(i);
    const VectorXd fp = map(up), fm = map(um);
    require_finite(fp);
    require_finite(fm);
    jet.jacobian.col(i) = (fp - fm) / (2.0 * h(i));
  }
  jet.hessian.assign(n, MatrixXd::Zero(m, m));
  for (int i = 0; i < m; ++i) {
    VectorXd up = u, um = u;
    up(i) += hh(i);
    um(i) -= hh(i);
    const VectorXd d2 = (map(up) - 2.0 * jet.value + map(um)) / (hh(i) * hh(i));
    for (int r = 0; r < n; ++r) jet.hessian[r](i, i) = d2(r);
    for (int j = i + 1; j < m; ++j) {
      VectorXd pp = u, pm = u, mp = u, mm = u;
      pp(i) += hh(i); pp(j) += hh(j);
      pm(i) += hh(i); pm(j) -= hh(j);
      mp(i) -= hh(i); mp(j) += hh(j);
      mm(i) -= hh(i); mm(j) -= hh(j);
      const VectorXd dij = (map(pp) - map(pm) - map(mp) + map(mm)) / (4.0 * hh(i) * hh(j));
      for (int r = 0; r < n; ++r) {
        jet.hessian[r](i, j) = dij(r);
        jet.hessian[r](j, i) = dij(r);
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    if (!jet.hessian[r].allFinite()) {
      throw DomainError("non-finite finite-difference Hessian");
    }
  }
  return jet;
}

}  // namespace

Jet2 jet2(const SmoothMap& map, const VectorXd& u, const Scheme& scheme, const ParamBox* domain) {
  if (u.size() != map.in_dim()) {
    throw DimensionError("jet2: parameter dimension mismatch");
  }
  if (const auto* cd = std::get_if<CentralDifference>(&scheme)) {
    if (domain) {
      const double reach = std::max(cd->h, cd->hessian_h);
      if (!domain->contains_with_margin(u, 2.0 * fd_steps(u, reach))) {
        throw DomainError("jet2: point not inside the domain by two finite-difference steps");
      }
    }
    return jet_fd(map, u, *cd);
  }
  if (domain && !domain->contains(u)) {
    throw DomainError("jet2: point outside the domain");
  }
  if (!map.exact()) {
    return jet_fd(map, u, CentralDifference{});
  }
  return jet_exact(map, u);
}

MatrixXd jacobian(const SmoothMap& map, const VectorXd& u, const Scheme& scheme) {
  const int m = static_cast<int>(u.size());
  const int n = map.out_dim();
  MatrixXd jac(n, m);
  if (std::holds_alternative<Analytic>(scheme) && map.exact()) {
    VecX<HyperDual> x(m);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < m; ++k) {
        x(k) = HyperDual(u(k), k == i ? 1.0 : 0.0, 0.0, 0.0);
      }
      const VecX<HyperDual> y = map.eval<HyperDual>(x);
      for (int r = 0; r < n; ++r) jac(r, i) = y(r).b;
    }
  } else {
    const double h0 = std::holds_alternative<CentralDifference>(scheme)
                          ? std::get<CentralDifference>(scheme).h
                          : kDefaultFdStep;
    const VectorXd h = fd_steps(u, h0);
    for (int i = 0; i < m; ++i) {
      VectorXd up = u, um = u;
      up(i) += h(i);
      um(i) -= h(i);
      jac.col(i) = (map(up) - map(um)) / (2.0 * h(i));
    }
  }
  if (!jac.allFinite()) {
    throw DomainError("non-finite Jacobian");
  }
  return jac;
}

MatrixXd Frame::gram() const {
  const int k = size();
  MatrixXd g(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      g(i, j) = vectors[i].dot(form * vectors[j]);
    }
  }
  return g;
}

Frame frame_orthonormalize(const MatrixXd& form, const std::vector<VectorXd>& seed,
                           double null_eps) {
  Frame frame;
  frame.form = form;
  for (const VectorXd& s : seed) {
    if (s.size() != form.rows()) {
      throw DimensionError("frame seed vector has wrong dimension");
    }
    VectorXd v = s;
    for (const VectorXd& e : frame.vectors) {
      const double ee = e.dot(form * e);  // +-1
      v -= (v.dot(form * e) / ee) * e;
    }
    const double scale = std::max(1.0, s.norm());
    if (v.norm() <= 1e-12 * scale) {
      throw DegenerateError("frame seed vectors are linearly dependent");
    }
    const double q = v.dot(form * v);
    if (std::abs(q) < null_eps * v.squaredNorm()) {
      throw NullVectorError("near-null vector encountered during orthonormalization");
    }
    frame.vectors.push_back(v / std::sqrt(std::abs(q)));
  }
  return frame;
}

Frame frame_orthonormalize(const Signature& form, const std::vector<VectorXd>& seed,
                           double null_eps) {
  return frame_orthonormalize(form.matrix(), seed, null_eps);
}

Split tangent_normal_split(const MatrixXd& form, const MatrixXd& basis, const VectorXd& w) {
  if (basis.rows() != form.rows() || w.size() != form.rows()) {
    throw DimensionError("tangent_normal_split: dimension mismatch");
  }
  const MatrixXd gram = basis.transpose() * form * basis;
  const VectorXd rhs = basis.transpose() * (form * w);
  Split out;
  if (basis.cols() == 0) {
    out.coeffs = VectorXd(0);
    out.normal = w;
    return out;
  }
  Eigen::JacobiSVD<MatrixXd> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-13 * std::max(1.0, sv(0))) {
    throw DegenerateError("singular Gram matrix in tangent/normal split");
  }
  out.coeffs = svd.solve(rhs);
  out.normal = w - basis * out.coeffs;
  return out;
}

Split tangent_normal_split(const MatrixXd& form, const std::vector<VectorXd>& basis,
                           const VectorXd& w) {
  MatrixXd cols(form.rows(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i].size() != form.rows()) {
      throw DimensionError("tangent_normal_split: basis vector dimension mismatch");
    }
    cols.col(static_cast<Eigen::Index>(i)) = basis[i];
  }
  return tangent_normal_split(form, cols, w);
}

Split tangent_normal_split(const Signature& form, const std::vector<VectorXd>& basis,
                           const VectorXd& w) {
  return tangent_normal_split(form.matrix(), basis, w);
}

std::vector<VectorXd> pseudo_orthonormal_basis(int n) {
  std::vector<VectorXd> e(n + 1, VectorXd::Zero(n + 1));
  e[0](n - 1) = 0.5;
  e[0](n) = 0.5;
  e[n](n - 1) = -0.5;
  e[n](n) = 0.5;
  for (int i = 1; i < n; ++i) {
    e[i](i - 1) = 1.0;
  }
  return e;
}

}  // namespace vfgeom

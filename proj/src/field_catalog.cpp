#include "vfgeom/field_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vfgeom {

namespace {

void require_flat(const AmbientSpace& space, const std::string& what) {
  if (space.kind() != SpaceKind::flat) {
    throw PreconditionError(what + " is only defined on flat space");
  }
}

void require_axis(const AmbientSpace& space, int i) {
  if (i < 1 || i > space.embed_dim()) {
    std::ostringstream os;
    os << "axis " << i << " outside 1.." << space.embed_dim();
    throw PreconditionError(os.str());
  }
}

int parse_index(const std::string& s) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("bad field index: " + s);
}

}  // namespace

AmbientField ddt_field(const AmbientSpace& space) {
  const int axis = space.line_axis();
  const int dim = space.embed_dim();
  AmbientField f;
  f.name = "ddt";
  f.space = space;
  f.parallel = space.kind() == SpaceKind::product_with_line;
  f.fn = [axis, dim](const VectorXd&) {
    VectorXd v = VectorXd::Zero(dim);
    v(axis) = 1.0;
    return v;
  };
  return f;
}

AmbientField rho_ddt_field(const AmbientSpace& space) {
  if (!space.is_warped()) throw PreconditionError("rho_ddt needs a warped space");
  AmbientField f;
  f.name = "rho_ddt";
  f.space = space;
  const Warping rho = space.warping();
  const int dim = space.embed_dim();
  f.fn = [rho, dim](const VectorXd& p) {
    VectorXd v = VectorXd::Zero(dim);
    v(0) = rho.eval(p(0));
    return v;
  };
  return f;
}

AmbientField radial_field(const AmbientSpace& space) {
  if (space.kind() == SpaceKind::sphere) {
    AmbientField f = pushforward_field(warp_sphere(space.model_dim() - 1),
                                       ddt_field(warp_sphere(space.model_dim() - 1).source));
    f.name = "radial";
    return f;
  }
  if (space.kind() == SpaceKind::hyperbolic) {
    const ConformalMapSpec m = warp_hyp_elliptic(space.model_dim() - 1);
    AmbientField f = pushforward_field(m, ddt_field(m.source));
    f.name = "radial";
    return f;
  }
  require_flat(space, "radial field");
  AmbientField f;
  f.name = "radial";
  f.space = space;
  f.fn = [](const VectorXd& p) { return p; };
  return f;
}

AmbientField killing_field(const AmbientSpace& space, int i, int j) {
  require_flat(space, "Killing field");
  require_axis(space, i);
  require_axis(space, j);
  if (i == j) throw PreconditionError("Killing field needs two distinct axes");
  AmbientField f;
  f.name = "killing:" + std::to_string(i) + "," + std::to_string(j);
  f.space = space;
  const int a = i - 1, b = j - 1;
  f.fn = [a, b](const VectorXd& p) {
    VectorXd v = VectorXd::Zero(p.size());
    v(b) += p(a);
    v(a) -= p(b);
    return v;
  };
  return f;
}

AmbientField ckilling_field(const AmbientSpace& space, int i) {
  require_flat(space, "conformal Killing field");
  require_axis(space, i);
  AmbientField f;
  f.name = "ckilling:" + std::to_string(i);
  f.space = space;
  const int a = i - 1;
  f.fn = [a](const VectorXd& z) {
    VectorXd v = z(a) * z;
    v(a) -= 0.5 * z.squaredNorm();
    return v;
  };
  return f;
}

AmbientField coord_field(const AmbientSpace& space, int i) {
  require_flat(space, "coordinate field");
  require_axis(space, i);
  AmbientField f;
  f.name = "coord:" + std::to_string(i);
  f.space = space;
  f.parallel = true;
  const int a = i - 1, dim = space.embed_dim();
  f.fn = [a, dim](const VectorXd&) {
    VectorXd v = VectorXd::Zero(dim);
    v(a) = 1.0;
    return v;
  };
  return f;
}

AmbientField scaled_field(const AmbientField& field, double lambda) {
  if (lambda == 0.0) throw PreconditionError("scale factor must be nonzero");
  AmbientField f = field;
  std::ostringstream os;
  os << lambda << '*' << field.name;
  f.name = os.str();
  const auto inner = field.fn;
  f.fn = [inner, lambda](const VectorXd& p) { return VectorXd(lambda * inner(p)); };
  return f;
}

AmbientField pushforward_field(const ConformalMapSpec& map, const AmbientField& base) {
  if (!map.inverse) throw PreconditionError(map.name + " has no inverse");
  if (!(base.space == map.source)) {
    throw PreconditionError("field " + base.name + " does not live on the source of " + map.name);
  }
  AmbientField f;
  f.name = "push:" + map.name + ":" + base.name;
  f.space = map.target;
  f.provenance = "pushforward(" + map.name + ", " + base.name + ")";
  const auto m = std::make_shared<const ConformalMapSpec>(map);
  const auto b = base.fn;
  f.fn = [m, b](const VectorXd& q) {
    const VectorXd p = apply_map(*m, q, Direction::inverse);
    return VectorXd(jacobian(m->forward, p) * b(p));
  };
  return f;
}

AmbientField make_field(const std::string& name, const AmbientSpace& space,
                        const AtlasParams& atlas_params) {
  try {
    const auto star = name.find('*');
    if (star != std::string::npos) {
      double lambda = 0.0;
      try {
        std::size_t pos = 0;
        lambda = std::stod(name.substr(0, star), &pos);
        if (pos != star) throw ConfigError("");
      } catch (const std::exception&) {
        throw ConfigError("bad scale factor in field name: " + name);
      }
      return scaled_field(make_field(name.substr(star + 1), space, atlas_params), lambda);
    }
    if (name.rfind("push:", 0) == 0) {
      const auto colon = name.find(':', 5);
      if (colon == std::string::npos) throw ConfigError("push field needs push:MAP:FIELD");
      const std::string map_name = name.substr(5, colon - 5);
      const std::string base = name.substr(colon + 1);
      for (int n = 1; n <= space.embed_dim(); ++n) {
        AtlasParams p = atlas_params;
        p.n = n;
        const ConformalMapSpec m = atlas_entry(map_name, p);
        if (m.target == space) return pushforward_field(m, make_field(base, m.source, p));
      }
      throw ConfigError("map " + map_name + " does not reach space " + space.describe());
    }
    const auto colon = name.find(':');
    const std::string head = name.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : name.substr(colon + 1);
    if (head == "ddt" && args.empty()) return ddt_field(space);
    if (head == "rho_ddt" && args.empty()) return rho_ddt_field(space);
    if (head == "radial" && args.empty()) return radial_field(space);
    if (head == "killing") {
      if (args.empty()) return killing_field(space, space.embed_dim() - 1, space.embed_dim());
      const auto comma = args.find(',');
      if (comma == std::string::npos) throw ConfigError("killing field needs killing:i,j");
      return killing_field(space, parse_index(args.substr(0, comma)),
                           parse_index(args.substr(comma + 1)));
    }
    if (head == "ckilling" && !args.empty()) return ckilling_field(space, parse_index(args));
    if (head == "coord" && !args.empty()) return coord_field(space, parse_index(args));
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("field ") + name + ": " + e.what());
  }
  throw ConfigError("unknown field: " + name);
}

VectorXd eval_field(const AmbientField& field, const VectorXd& p) {
  if (p.size() != field.space.embed_dim()) {
    throw DimensionError("point dimension does not match the field's space");
  }
  if (field.space.membership_residual(p) > kMembershipTolerance * std::max(1.0, p.squaredNorm())) {
    throw DomainError("point is not in the space of field " + field.name);
  }
  return field(p);
}

double related_residual(const ConformalMapSpec& map, const AmbientField& source_field,
                        const AmbientField& target_field, const VectorXd& p,
                        const Scheme& scheme) {
  const VectorXd pushed = pushforward(map, p, eval_field(source_field, p), scheme);
  const VectorXd expected = eval_field(target_field, map.forward(p));
  return (pushed - expected).norm() / std::max(1.0, expected.norm());
}

AtlasCheck atlas_check(const ConformalMapSpec& map, int points, unsigned seed,
                       const Scheme& scheme, const AtlasParams& params) {
  AtlasCheck out;
  out.map = map.name;
  std::mt19937 rng(seed);
  for (int k = 0; k < points; ++k) out.points.push_back(map.sample(rng));
  for (const auto& p : out.points) {
    const double r = conformality_residual(map, p, 4, rng, scheme);
    out.conformality.push_back(r);
    out.conformality_max = std::max(out.conformality_max, r);
    if (map.is_isometry) {
      out.factor_deviation = std::max(out.factor_deviation, std::abs(map.factor(p) - 1.0));
    }
  }
  for (const auto& pair : map.related) {
    PairCheck pc;
    pc.source_field = pair.source_field;
    pc.target_field = pair.target_field;
    const AmbientField src = make_field(pair.source_field, map.source, params);
    const AmbientField tgt = make_field(pair.target_field, map.target, params);
    for (const auto& p : out.points) {
      const double r = related_residual(map, src, tgt, p, scheme);
      pc.residuals.push_back(r);
      pc.max = std::max(pc.max, r);
    }
    out.pairs.push_back(std::move(pc));
  }
  if (map.mercator) {
    const Interval& r = map.mercator->range();
    const double lo = std::max(r.lo, -3.0), hi = std::min(r.hi, 3.0);
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(lo + (hi - lo) * (0.005 + 0.99 * k / 200.0));
    out.ode_residual = mercator_ode_residual(*map.mercator, grid);
  }
  return out;
}

}  // namespace vfgeom

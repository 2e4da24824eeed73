#pragma once

// Ambient vector fields addressable by name:
//   ddt            unit field along the line factor of a product or warped space
//   rho_ddt        rho(t) d/dt on a warped space
//   radial         R(y) = y on flat space; on S^n and H^n the pushforward of d/dt
//                  through warp_sphere / warp_hyp_elliptic
//   killing[:i,j]  x_i d_j - x_j d_i (1-based, default the last two axes)
//   ckilling:i     C_i(z) = z_i z - |z|^2 e_i / 2
//   coord:i        d/dx_i
//   push:MAP:F     pushforward of field F through atlas map MAP
//   L*F            constant multiple of F

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "vfgeom/conformal_atlas.hpp"
#include "vfgeom/model_spaces.hpp"

namespace vfgeom {

struct AmbientField {
  std::string name;
  AmbientSpace space;
  std::function<VectorXd(const VectorXd&)> fn;
  std::string provenance = "intrinsic";
  /// True if the field is parallel for the ambient connection (d/dt on products,
  /// coordinate fields on flat space).
  bool parallel = false;

  VectorXd operator()(const VectorXd& p) const { return fn(p); }
};

AmbientField ddt_field(const AmbientSpace& space);
AmbientField rho_ddt_field(const AmbientSpace& space);
AmbientField radial_field(const AmbientSpace& space);
AmbientField killing_field(const AmbientSpace& space, int i, int j);
AmbientField ckilling_field(const AmbientSpace& space, int i);
AmbientField coord_field(const AmbientSpace& space, int i);
AmbientField scaled_field(const AmbientField& field, double lambda);
AmbientField pushforward_field(const ConformalMapSpec& map, const AmbientField& base);

/// Builds a field from its name (see the header comment) on the given space.
AmbientField make_field(const std::string& name, const AmbientSpace& space,
                        const AtlasParams& atlas_params = {});

/// Field value at p; throws DomainError if p is not in the field's space.
VectorXd eval_field(const AmbientField& field, const VectorXd& p);

/// |Psi_* X(p) - Y(Psi(p))| / max(1, |Y(Psi(p))|), Euclidean coordinate norms.
double related_residual(const ConformalMapSpec& map, const AmbientField& source_field,
                        const AmbientField& target_field, const VectorXd& p,
                        const Scheme& scheme = Analytic{});

struct PairCheck {
  std::string source_field;
  std::string target_field;
  std::vector<double> residuals;
  double max = 0.0;
};

struct AtlasCheck {
  std::string map;
  std::vector<VectorXd> points;
  std::vector<double> conformality;
  double conformality_max = 0.0;
  double factor_deviation = 0.0;  // max |phi - 1| for isometries
  std::vector<PairCheck> pairs;
  double ode_residual = 0.0;      // mercator only
};

/// Conformality and field-relatedness residuals at `points` random domain points.
AtlasCheck atlas_check(const ConformalMapSpec& map, int points, unsigned seed,
                       const Scheme& scheme = Analytic{}, const AtlasParams& params = {});

}  // namespace vfgeom

#pragma once

// Pointwise and grid diagnostics for the constant ratio, principal direction and
// related properties of an immersion with respect to an ambient field.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vfgeom/field_catalog.hpp"
#include "vfgeom/immersion_gallery.hpp"

namespace vfgeom {

/// Below this norm the tangent (or normal) part counts as vanishing.
inline constexpr double kTauZero = 1e-7;
inline constexpr int kDefaultGridPerAxis = 21;

inline constexpr double kRatioTolerance = 1e-6;
inline constexpr double kPdTolerance = 1e-6;
inline constexpr double kLengthTolerance = 1e-6;
inline constexpr double kNormalConnectionTolerance = 1e-6;
inline constexpr double kGeodesicTolerance = 1e-5;
inline constexpr double kPolarTolerance = 1e-8;
inline constexpr double kShapeAnnihilationTolerance = 1e-5;

enum class Verdict { pass, fail, degenerate };
std::string verdict_name(Verdict v);

struct Grid {
  std::vector<VectorXd> points;
  std::vector<int> shape;

  int size() const { return static_cast<int>(points.size()); }
  static Grid uniform(const ParamBox& box, int per_axis = kDefaultGridPerAxis);
  static Grid uniform(const ParamBox& box, const std::vector<int>& shape);
  /// Default grid over the immersion's domain.
  static Grid over(const ImmersionSpec& f, int per_axis = kDefaultGridPerAxis);
};

struct Decomposition {
  VectorXd point;            // f(u)
  VectorXd field;            // Z(f(u))
  VectorXd tangent_coeffs;   // Z^T in the chart basis
  VectorXd tangent_ambient;  // J * tangent_coeffs
  VectorXd normal_ambient;   // Z - tangent_ambient
  double tangent_norm = 0.0;
  double normal_norm = 0.0;
};

/// First- and second-order data of an immersion at one parameter point.
struct LocalGeometry {
  Jet2 jet;
  MatrixXd metric;                     // ambient metric at f(u)
  MatrixXd first_form;                 // G = J^T g J
  /// nabla_{f_i} f_j = d2f/du_i du_j + Gamma(f_i, f_j), stored at index i * m + j.
  std::vector<VectorXd> covariant_second;
  std::vector<VectorXd> normals;       // orthonormal normal frame tangent to the ambient
  std::vector<double> normal_signs;    // <xi_a, xi_a> = +-1
  std::vector<MatrixXd> second_forms;  // B_a(i, j) = <nabla_{f_i} f_j, xi_a>

  int param_dim() const { return jet.param_dim(); }
  /// Second fundamental form paired with an arbitrary ambient normal vector.
  MatrixXd second_form(const VectorXd& normal) const;
  /// Shape operator G^{-1} B.
  MatrixXd shape_operator(int a) const;
  MatrixXd shape_operator(const VectorXd& normal) const;
};

LocalGeometry local_geometry(const ImmersionSpec& f, const VectorXd& u);

Decomposition decompose(const ImmersionSpec& f, const AmbientField& Z, const VectorXd& u);
Decomposition decompose(const LocalGeometry& geo, const AmbientSpace& ambient,
                        const AmbientField& Z);

struct ShapeOperator {
  VectorXd normal;
  double sign = 1.0;
  MatrixXd matrix;
};
std::vector<ShapeOperator> shape_operators(const ImmersionSpec& f, const VectorXd& u);

struct Summary {
  double max = 0.0;
  double mean = 0.0;
  int argmax = -1;
};

struct DiagnosticsReport {
  std::string property;
  std::string immersion;
  std::string field;
  std::vector<int> grid_shape;
  std::vector<VectorXd> points;
  std::vector<double> residuals;  // 0 at masked points
  std::vector<bool> masked;       // pointwise degenerate (vanishing Z^T)
  /// Per-point measured quantity: ratio, length, curvature, ...
  std::vector<double> values;
  Summary summary;
  double tolerance = 0.0;
  double fd_step = 0.0;
  Verdict verdict = Verdict::fail;
  std::string detail;
  std::optional<double> constant;

  bool passed() const { return verdict == Verdict::pass; }
  int masked_count() const;
};

/// Fills summary and verdict from residuals and masks.
void finalize(DiagnosticsReport& report);

DiagnosticsReport ratio_report(const ImmersionSpec& f, const AmbientField& Z, const Grid& grid,
                               double tolerance = kRatioTolerance);

DiagnosticsReport pd_residual(const ImmersionSpec& f, const AmbientField& Z, const Grid& grid,
                              double tolerance = kPdTolerance);

enum class Along { all_directions, perp_to_ZT };
std::string along_name(Along a);

struct NormalConnectionOptions {
  Along along = Along::all_directions;
  double h = kDefaultFdStep;
  /// Replace Z^perp by Z^perp / |Z^perp|.
  bool normalized = false;
  /// Use alpha(X, Z^T) = -nabla^perp_X Z^perp instead of differencing Z^perp.
  bool via_second_form = false;
};

DiagnosticsReport normal_connection_residual(const ImmersionSpec& f, const AmbientField& Z,
                                             const Grid& grid,
                                             const NormalConnectionOptions& options = {},
                                             double tolerance = kNormalConnectionTolerance);

enum class GeodesicPath { extrinsic, intrinsic };
/// unit: curves of Z^T / |Z^T| (geodesic up to reparametrization).
/// field: integral curves of Z^T itself, residual |nabla_{Z^T} Z^T|_G.
enum class GeodesicSpeed { unit, field };

DiagnosticsReport geodesic_residual(const ImmersionSpec& f, const AmbientField& Z,
                                    const Grid& grid,
                                    GeodesicPath path = GeodesicPath::extrinsic,
                                    double h = kDefaultFdStep,
                                    double tolerance = kGeodesicTolerance,
                                    GeodesicSpeed speed = GeodesicSpeed::unit);

/// |A_{Z^perp} Z^T|_G per point.
DiagnosticsReport shape_annihilation(const ImmersionSpec& f, const AmbientField& Z,
                                     const Grid& grid,
                                     double tolerance = kShapeAnnihilationTolerance);

/// Polar metric check on a chart whose first coordinate is s. Without `constant`
/// the median of g(d_s, d_s) is used.
DiagnosticsReport polar_residual(const ImmersionSpec& f, const Grid& grid,
                                 std::optional<double> constant = std::nullopt,
                                 double tolerance = kPolarTolerance);
using MetricFn = std::function<MatrixXd(const VectorXd&)>;
DiagnosticsReport polar_residual(const MetricFn& metric, const Grid& grid,
                                 std::optional<double> constant = std::nullopt,
                                 double tolerance = kPolarTolerance);

enum class Component { tangent, normal };

/// Constancy of |Z^T| or |Z^perp|; residual against `expected` when given.
DiagnosticsReport length_report(const ImmersionSpec& f, const AmbientField& Z, Component which,
                                const Grid& grid, std::optional<double> expected = std::nullopt,
                                double tolerance = kLengthTolerance);

/// Largest derivative of |Z^perp| along a G-orthonormal basis of {Z^T}^perp.
DiagnosticsReport perp_length_variation(const ImmersionSpec& f, const AmbientField& Z,
                                        const Grid& grid, double h = kDefaultFdStep,
                                        double tolerance = kFdTolerance);

/// det(II) / det(I) for a surface in Euclidean 3-space.
double gauss_curvature(const ImmersionSpec& f, const VectorXd& u);

/// Field named by a claim, built on the immersion's ambient.
AmbientField claim_field(const ImmersionSpec& f, const Claim& claim);

}  // namespace vfgeom

#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "equivalence_suites.hpp"
#include "vfgeom/property_verifier.hpp"

namespace vfgeom {
namespace {

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

bool holds(const DiagnosticsReport& r) { return r.verdict != Verdict::fail; }

// x -> (phi(x), t) for a curve phi in S^2: a vertical cylinder in S^2 x R.
ImmersionSpec vertical_cylinder() {
  const auto lat = HypersurfaceFamily::latitude(0.4);
  const SmoothMap phi = lat.base();
  ImmersionSpec f;
  f.name = "vertical_cylinder";
  f.param_names = {"x", "t"};
  f.domain = ParamBox{{{-3.0, 3.0}, {-1.0, 1.0}}};
  f.ambient = AmbientSpace::product(1, 2);
  f.map = SmoothMap::generic(2, 4, [phi](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    VecX<T> x(1);
    x(0) = u(0);
    VecX<T> p(4);
    p.head(3) = phi.eval<T>(x);
    p(3) = u(1);
    return p;
  });
  return f;
}

// s * (cos x, sin x, 1) / sqrt 2, a cone over a unit-speed circle in S^2.
ImmersionSpec unit_cone() {
  ImmersionSpec f;
  f.name = "unit_cone";
  f.param_names = {"s", "x"};
  f.domain = ParamBox{{{0.5, 2.0}, {-3.0, 3.0}}};
  f.ambient = AmbientSpace::flat(3);
  f.map = SmoothMap::generic(2, 3, [](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    const double r = 1.0 / std::sqrt(2.0);
    VecX<T> y(3);
    y(0) = r * u(0) * cos(u(1));
    y(1) = r * u(0) * sin(u(1));
    y(2) = r * u(0);
    return y;
  });
  return f;
}

ImmersionSpec straight_line() {
  ImmersionSpec f;
  f.name = "line";
  f.param_names = {"t"};
  f.domain = ParamBox{{{-1.0, 1.0}}};
  f.ambient = AmbientSpace::flat(3);
  f.map = SmoothMap::generic(1, 3, [](const auto& u) {
    using T = typename std::decay_t<decltype(u)>::Scalar;
    VecX<T> y(3);
    y(0) = 1.0 + u(0);
    y(1) = 2.0 * u(0);
    y(2) = T(-0.5);
    return y;
  });
  return f;
}

ImmersionSpec family_polar_chart(const HypersurfaceFamily& fam) {
  ImmersionSpec f;
  f.name = "family";
  f.param_names = {"s", "x"};
  ParamBox box = fam.x_box();
  box.axes.insert(box.axes.begin(), Interval{-1.0, 1.0});
  f.domain = box;
  f.ambient = fam.space();
  f.map = fam.as_map();
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// decompose

TEST(Decompose, SphereRadialIsPurelyNormal) {
  const auto f = make_unit_sphere();
  const auto R = make_field("radial", f.ambient);
  for (const auto& u : Grid::over(f, 5).points) {
    const Decomposition d = decompose(f, R, u);
    EXPECT_LT(d.tangent_norm, 1e-14);
    EXPECT_LT((d.normal_ambient - f(u)).norm(), 1e-14);
    EXPECT_NEAR(d.normal_norm, 1.0, 1e-14);
  }
}

TEST(Decompose, ConeRadialIsPurelyTangent) {
  const auto f = unit_cone();
  const auto R = make_field("radial", f.ambient);
  for (const auto& u : Grid::over(f, 5).points) {
    const Decomposition d = decompose(f, R, u);
    EXPECT_LT(d.normal_norm, 1e-14);
    EXPECT_NEAR(d.tangent_norm, u(0), 1e-14);
  }
}

TEST(Decompose, LogSpiralSplitsEvenlyAtZero) {
  // f = e^t (cos t, sin t): f'(0) = (1, 1), R(f(0)) = (1, 0), so Z^T = (1/2, 1/2).
  const auto f = make_log_spiral(1.0);
  const Decomposition d = decompose(f, make_field("radial", f.ambient), vec({0.0}));
  EXPECT_NEAR(d.tangent_norm, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(d.normal_norm, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_LT((d.tangent_ambient - vec({0.5, 0.5})).norm(), 1e-15);
}

TEST(Decompose, SplitIsOrthogonalAndComplete) {
  const std::vector<std::string> names = {"cr_warped", "parabolic_loxodrome", "class_a", "dini",
                                          "pd_radial", "cylinder_round"};
  for (const auto& name : names) {
    const auto f = gallery_entry(name);
    const auto Z = claim_field(f, f.claims.empty() ? Claim{Property::constant_ratio, "radial", {}}
                                                   : f.claims.front());
    for (const auto& u : Grid::over(f, 4).points) {
      const LocalGeometry geo = local_geometry(f, u);
      const Decomposition d = decompose(geo, f.ambient, Z);
      EXPECT_LT((d.tangent_ambient + d.normal_ambient - d.field).norm(), 1e-10) << name;
      for (Eigen::Index i = 0; i < geo.jet.jacobian.cols(); ++i) {
        const VectorXd col = geo.jet.jacobian.col(i);
        EXPECT_LT(std::abs(col.dot(geo.metric * d.normal_ambient)), 1e-10) << name;
      }
    }
  }
}

TEST(Decompose, RankDeficiencyThrows) {
  ImmersionSpec f = make_cone();
  f.domain = ParamBox{{{-1.0, 1.0}, {-3.0, 3.0}}};
  EXPECT_THROW(decompose(f, make_field("radial", f.ambient), vec({0.0, 1.0})), DegenerateError);
}

// ---------------------------------------------------------------------------
// shape operators

TEST(ShapeOperators, UnitSphereInwardNormalIsIdentity) {
  const auto f = make_unit_sphere();
  for (const auto& u : Grid::over(f, 4).points) {
    const LocalGeometry geo = local_geometry(f, u);
    ASSERT_EQ(geo.normals.size(), 1u);
    EXPECT_LT((geo.shape_operator(VectorXd(-f(u))) - MatrixXd::Identity(2, 2)).norm(), 1e-12);
  }
}

TEST(ShapeOperators, CylinderEigenvaluesZeroAndOne) {
  const auto f = make_round_cylinder();
  for (const auto& u : Grid::over(f, 4).points) {
    const auto ops = shape_operators(f, u);
    ASSERT_EQ(ops.size(), 1u);
    Eigen::EigenSolver<MatrixXd> es(ops[0].matrix);
    std::vector<double> ev = {std::abs(es.eigenvalues()(0).real()),
                              std::abs(es.eigenvalues()(1).real())};
    std::sort(ev.begin(), ev.end());
    EXPECT_NEAR(ev[0], 0.0, 1e-12);
    EXPECT_NEAR(ev[1], 1.0, 1e-12);
  }
}

TEST(ShapeOperators, ClassAFormulaAlongTheCurve) {
  // gamma(s) = (sin u, cos u, A s + b s^3), u = omega s + beta s^2, differentiated by hand.
  const double omega = 1.3, beta = 0.2, A = 0.8, b = 0.5;
  const auto lat = HypersurfaceFamily::latitude(0.3);
  const auto f = make_class_a(lat.base(), lat.normal(), 1, lat.x_box(),
                              class_a_curve(1, omega, beta, Profile::cubic(A, b)));
  for (const auto& u : Grid::over(f, 7).points) {
    const double x = u(0), s = u(1);
    const double uu = omega * s + beta * s * s, du = omega + 2.0 * beta * s, ddu = 2.0 * beta;
    const Eigen::Vector3d g(std::sin(uu), std::cos(uu), A * s + b * s * s * s);
    const Eigen::Vector3d dg(std::cos(uu) * du, -std::sin(uu) * du, A + 3.0 * b * s * s);
    const Eigen::Vector3d ddg(-std::sin(uu) * du * du + std::cos(uu) * ddu,
                              -std::cos(uu) * du * du - std::sin(uu) * ddu, 6.0 * b * s);
    const Eigen::Vector3d zeta = Eigen::Vector3d(g(0), g(1), 0.0).cross(dg).normalized();
    const double expected = ddg.dot(zeta) / dg.dot(dg);

    const VectorXd X = vec({x});
    VectorXd Xi = VectorXd::Zero(4);
    Xi.head(3) = zeta(0) * lat.normal()(X) + zeta(1) * lat.base()(X);
    Xi(3) = zeta(2);
    const LocalGeometry geo = local_geometry(f, u);
    for (Eigen::Index i = 0; i < 2; ++i) {
      EXPECT_LT(std::abs(geo.jet.jacobian.col(i).dot(Xi)), 1e-12);
    }
    const MatrixXd Bxi = geo.second_form(Xi);
    EXPECT_NEAR(Bxi(1, 1) / geo.first_form(1, 1), expected, 1e-6);
  }
}

TEST(ShapeOperators, SelfAdjointOnEveryGalleryMember) {
  for (const auto& name : gallery_names()) {
    const auto f = gallery_entry(name);
    for (const auto& u : Grid::over(f, 5).points) {
      const LocalGeometry geo = local_geometry(f, u);
      for (std::size_t a = 0; a < geo.normals.size(); ++a) {
        const MatrixXd GA = geo.first_form * geo.shape_operator(static_cast<int>(a));
        EXPECT_LT((GA - GA.transpose()).norm(), 1e-6) << name;
      }
    }
  }
}

TEST(ShapeOperators, NormalFrameIsOrthonormalAndTangentToAmbient) {
  for (const auto& name : gallery_names()) {
    const auto f = gallery_entry(name);
    const VectorXd u = Grid::over(f, 3).points[Grid::over(f, 3).size() / 2];
    const LocalGeometry geo = local_geometry(f, u);
    ASSERT_EQ(static_cast<int>(geo.normals.size()), f.ambient.dim() - f.param_dim()) << name;
    for (std::size_t a = 0; a < geo.normals.size(); ++a) {
      EXPECT_LT(f.ambient.tangency_residual(geo.jet.value, geo.normals[a]), 1e-10) << name;
      for (std::size_t b = 0; b < geo.normals.size(); ++b) {
        const double expected = a == b ? geo.normal_signs[a] : 0.0;
        EXPECT_NEAR(geo.normals[a].dot(geo.metric * geo.normals[b]), expected, 1e-10) << name;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// ratio_report

TEST(RatioReport, CrProductMatchesTheoremValues) {
  for (double A : {0.5, 1.0, 2.0}) {
    const auto f = make_cr_product(HypersurfaceFamily::latitude(0.3), A);
    const auto Z = make_field("ddt", f.ambient);
    const Grid grid = Grid::over(f);
    const DiagnosticsReport r = ratio_report(f, Z, grid);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_LE(r.summary.max, 1e-6);
    for (int k = 0; k < grid.size(); ++k) EXPECT_NEAR(r.values[k], 1.0 / A, 1e-6);
    const DiagnosticsReport t =
        length_report(f, Z, Component::tangent, grid, A / std::sqrt(1.0 + A * A));
    EXPECT_EQ(t.verdict, Verdict::pass) << t.detail;
  }
}

TEST(RatioReport, SphereIsTangentDegenerate) {
  const auto f = make_unit_sphere();
  const DiagnosticsReport r = ratio_report(f, make_field("radial", f.ambient), Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::degenerate);
  EXPECT_EQ(r.masked_count(), static_cast<int>(r.points.size()));
  EXPECT_NE(r.detail.find("Z^T vanishes"), std::string::npos);
}

TEST(RatioReport, ConeIsNormalDegenerate) {
  const auto f = make_cone();
  const DiagnosticsReport r = ratio_report(f, make_field("radial", f.ambient), Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::degenerate);
  EXPECT_NE(r.detail.find("Z^perp vanishes"), std::string::npos);
}

TEST(RatioReport, RoundCylinderRatioVariesWithHeight) {
  // At theta = 0 with axis offset 1/2: |R^perp| = 3/2 and |R^T| = z, so the ratio is 3/(2z).
  const auto f = make_round_cylinder(0.5);
  const auto R = make_field("radial", f.ambient);
  for (double z : {0.6, 1.0, 1.8}) {
    const Decomposition d = decompose(f, R, vec({0.0, z}));
    EXPECT_NEAR(d.normal_norm / d.tangent_norm, 1.5 / z, 1e-14);
  }
  const DiagnosticsReport r = ratio_report(f, R, Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_GT(r.summary.max, 0.1);
}

TEST(RatioReport, MedianIgnoresMaskedPoints) {
  // radial_log_sec has R^T = 0 on the s = 0 slice only.
  const auto f = gallery_entry("radial_log_sec");
  const DiagnosticsReport r = ratio_report(f, make_field("radial", f.ambient), Grid::over(f));
  EXPECT_EQ(r.masked_count(), kDefaultGridPerAxis);
  EXPECT_NE(r.verdict, Verdict::degenerate);
}

TEST(RatioReport, InvariantUnderNonvanishingRescaling) {
  const auto f = gallery_entry("dini");
  const Grid grid = Grid::over(f, 9);
  const AmbientField K = make_field("killing:1,2", f.ambient);
  const DiagnosticsReport a = ratio_report(f, K, grid);
  const DiagnosticsReport b = ratio_report(f, scaled_field(K, -3.5), grid);
  EXPECT_EQ(a.verdict, b.verdict);
  for (int k = 0; k < grid.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-12);
}

// ---------------------------------------------------------------------------
// pd_residual

TEST(PdResidual, VerticalCylinderRulingsAreFlat) {
  const auto f = vertical_cylinder();
  const auto Z = make_field("ddt", f.ambient);
  const DiagnosticsReport r = pd_residual(f, Z, Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_LT(r.summary.max, 1e-12);
  EXPECT_EQ(ratio_report(f, Z, Grid::over(f)).verdict, Verdict::degenerate);
}

TEST(PdResidual, ClassAWithAndWithoutConstantRatio) {
  for (double bend : {0.0, 0.3}) {
    GalleryParams p;
    p.values["bend"] = bend;
    p.values["b"] = bend == 0.0 ? 0.0 : 0.7;
    const auto f = gallery_entry("class_a", p);
    const auto Z = make_field("ddt", f.ambient);
    const DiagnosticsReport r = pd_residual(f, Z, Grid::over(f));
    EXPECT_EQ(r.verdict, Verdict::pass) << r.detail;
    EXPECT_LE(r.summary.max, 1e-6);
    EXPECT_EQ(ratio_report(f, Z, Grid::over(f)).passed(), bend == 0.0);
  }
}

TEST(PdResidual, DiniAgainstRotationField) {
  const auto f = gallery_entry("dini");
  const DiagnosticsReport r = pd_residual(f, make_field("killing:1,2", f.ambient), Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_LE(r.summary.max, 1e-6);
}

TEST(PdResidual, RoundCylinderFails) {
  const auto f = make_round_cylinder(0.5);
  const DiagnosticsReport r = pd_residual(f, make_field("radial", f.ambient), Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::fail);
}

TEST(PdResidual, VacuousWhenTangentPartVanishes) {
  const auto f = make_unit_sphere();
  const DiagnosticsReport r = pd_residual(f, make_field("radial", f.ambient), Grid::over(f, 5));
  EXPECT_EQ(r.verdict, Verdict::degenerate);
}

// ---------------------------------------------------------------------------
// normal_connection_residual

TEST(NormalConnection, ConeHasZeroNormalPart) {
  const auto f = make_cone();
  const DiagnosticsReport r =
      normal_connection_residual(f, make_field("radial", f.ambient), Grid::over(f, 7));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_LT(r.summary.max, 1e-9);
}

TEST(NormalConnection, LogSecRadialIsParallelInAllDirections) {
  const auto f = gallery_entry("pd_radial_log_sec");
  const auto R = make_field("radial", f.ambient);
  const DiagnosticsReport r = normal_connection_residual(f, R, Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_LE(r.summary.max, 1e-6);
}

TEST(NormalConnection, GenericCurveIsParallelOnlyPerpToTangentPart) {
  for (double bend : {0.0, 0.3}) {
    GalleryParams p;
    p.values["bend"] = bend;
    const auto f = gallery_entry("pd_radial", p);
    const auto R = make_field("radial", f.ambient);
    const Grid grid = Grid::over(f);
    const DiagnosticsReport all = normal_connection_residual(f, R, grid);
    EXPECT_EQ(all.verdict, Verdict::fail);
    EXPECT_GT(all.summary.max, 1e-3);
    const DiagnosticsReport perp = normal_connection_residual(f, R, grid, {Along::perp_to_ZT});
    EXPECT_EQ(perp.verdict, Verdict::pass);
    EXPECT_LE(perp.summary.max, 1e-6);
  }
}

TEST(NormalConnection, BothPathsAgree) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"pd_radial", "radial"},   {"pd_radial_log_sec", "radial"}, {"class_a", "ddt"},
      {"cr_warped", "radial"},   {"dini", "killing:1,2"},         {"cylinder_round", "radial"},
      {"parabolic_loxodrome", "push:warp_hyp_parabolic:ddt"}};
  for (const auto& [name, field] : cases) {
    const auto f = gallery_entry(name);
    const auto Z = make_field(field, f.ambient);
    const Grid grid = Grid::over(f, 9);
    for (Along along : {Along::all_directions, Along::perp_to_ZT}) {
      for (bool normalized : {false, true}) {
        NormalConnectionOptions a{along, kDefaultFdStep, normalized, false};
        NormalConnectionOptions b{along, kDefaultFdStep, normalized, true};
        const DiagnosticsReport ra = normal_connection_residual(f, Z, grid, a);
        const DiagnosticsReport rb = normal_connection_residual(f, Z, grid, b);
        for (int k = 0; k < grid.size(); ++k) {
          EXPECT_NEAR(ra.residuals[k], rb.residuals[k], 1e-6) << name << " " << along_name(along);
        }
      }
    }
  }
}

TEST(NormalConnection, UnitNormalFieldOfConstantRatioSurfaceIsParallel) {
  const auto f = gallery_entry("cr_product");
  NormalConnectionOptions opt;
  opt.normalized = true;
  const DiagnosticsReport r =
      normal_connection_residual(f, make_field("ddt", f.ambient), Grid::over(f), opt);
  EXPECT_EQ(r.verdict, Verdict::pass);
}

// ---------------------------------------------------------------------------
// geodesic_residual

TEST(GeodesicResidual, CrProductTangentLinesAreGeodesics) {
  const auto f = make_cr_product(HypersurfaceFamily::latitude(0.3), 1.0);
  const auto Z = make_field("ddt", f.ambient);
  for (GeodesicPath path : {GeodesicPath::extrinsic, GeodesicPath::intrinsic}) {
    const DiagnosticsReport r = geodesic_residual(f, Z, Grid::over(f), path);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_LE(r.summary.max, 1e-5);
  }
}

TEST(GeodesicResidual, StraightLineWithConstantField) {
  const auto f = straight_line();
  const DiagnosticsReport r = geodesic_residual(f, make_field("coord:1", f.ambient), Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_LT(r.summary.max, 1e-9);
}

TEST(GeodesicResidual, RoundCylinderFailsLikeItsRatio) {
  const auto f = make_round_cylinder(0.5);
  const auto R = make_field("radial", f.ambient);
  const DiagnosticsReport r = geodesic_residual(f, R, Grid::over(f));
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_GT(r.summary.max, 1e-3);
}

TEST(GeodesicResidual, SurfaceOfRevolutionMeridiansAreOnlyPregeodesics) {
  // Z^T runs along the meridians, which are geodesics only at unit speed when |Z^T| varies.
  GalleryParams p;
  p.values["bend"] = 0.3;
  const auto f = gallery_entry("class_a", p);
  const auto Z = make_field("ddt", f.ambient);
  const Grid grid = Grid::over(f, 9);
  EXPECT_EQ(geodesic_residual(f, Z, grid).verdict, Verdict::pass);
  const DiagnosticsReport field = geodesic_residual(f, Z, grid, GeodesicPath::extrinsic,
                                                    kDefaultFdStep, kGeodesicTolerance,
                                                    GeodesicSpeed::field);
  EXPECT_EQ(field.verdict, Verdict::fail);
  EXPECT_GT(field.summary.max, 1e-3);
}

TEST(GeodesicResidual, PathsAgree) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"cr_product", "ddt"}, {"class_a", "ddt"},         {"cylinder_round", "radial"},
      {"dini", "killing:1,2"}, {"cr_warped", "radial"}, {"radial_sqrt_G", "radial"}};
  for (const auto& [name, field] : cases) {
    GalleryParams p;
    if (name == "class_a") p.values["bend"] = 0.3;
    const auto f = gallery_entry(name, p);
    const auto Z = make_field(field, f.ambient);
    const Grid grid = Grid::over(f, 9);
    for (GeodesicSpeed speed : {GeodesicSpeed::unit, GeodesicSpeed::field}) {
      const DiagnosticsReport a = geodesic_residual(f, Z, grid, GeodesicPath::extrinsic,
                                                    kDefaultFdStep, kGeodesicTolerance, speed);
      const DiagnosticsReport b = geodesic_residual(f, Z, grid, GeodesicPath::intrinsic,
                                                    kDefaultFdStep, kGeodesicTolerance, speed);
      for (int k = 0; k < grid.size(); ++k) {
        EXPECT_NEAR(a.residuals[k], b.residuals[k], 1e-6) << name;
      }
    }
  }
}

// ---------------------------------------------------------------------------
// polar_residual and length_report

TEST(PolarResidual, ParallelFamilyInSphereIsPolar) {
  const auto f = family_polar_chart(HypersurfaceFamily::latitude(0.2));
  const DiagnosticsReport r = polar_residual(f, Grid::over(f), 1.0);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_LE(r.summary.max, 1e-8);
}

TEST(PolarResidual, CrProductConstantIsOnePlusASquared) {
  for (double A : {0.5, 2.0}) {
    const auto f = make_cr_product(HypersurfaceFamily::clifford_torus(), A);
    const DiagnosticsReport r = polar_residual(f, Grid::over(f, 7));
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_NEAR(*r.constant, 1.0 + A * A, 1e-12);
  }
}

TEST(PolarResidual, ShearedChartFails) {
  // (s, x) -> (s, x + s) has g = [[2, 1], [1, 1]].
  const MetricFn sheared = [](const VectorXd&) {
    MatrixXd J(2, 2);
    J << 1.0, 0.0, 1.0, 1.0;
    return MatrixXd(J.transpose() * J);
  };
  const DiagnosticsReport r =
      polar_residual(sheared, Grid::uniform(ParamBox{{{-1.0, 1.0}, {-1.0, 1.0}}}, 5), 1.0);
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_GT(r.summary.max, 0.5);
}

TEST(LengthReport, TheoremProfilesGiveUnitLengths) {
  const auto ls = gallery_entry("radial_log_sec");
  const DiagnosticsReport n =
      length_report(ls, make_field("radial", ls.ambient), Component::normal, Grid::over(ls), 1.0);
  EXPECT_EQ(n.verdict, Verdict::pass);
  EXPECT_LE(n.summary.max, 1e-6);
  const auto sg = gallery_entry("radial_sqrt_G");
  const DiagnosticsReport t =
      length_report(sg, make_field("radial", sg.ambient), Component::tangent, Grid::over(sg), 1.0);
  EXPECT_EQ(t.verdict, Verdict::pass);
  EXPECT_LE(t.summary.max, 1e-6);
  // The other component is not constant.
  EXPECT_EQ(length_report(ls, make_field("radial", ls.ambient), Component::tangent, Grid::over(ls))
                .verdict,
            Verdict::fail);
}

TEST(LengthReport, SphereLengths) {
  const auto f = make_unit_sphere();
  const auto R = make_field("radial", f.ambient);
  EXPECT_EQ(length_report(f, R, Component::tangent, Grid::over(f), 0.0).verdict, Verdict::pass);
  EXPECT_EQ(length_report(f, R, Component::normal, Grid::over(f), 1.0).verdict, Verdict::pass);
}

// ---------------------------------------------------------------------------
// gauss_curvature

TEST(GaussCurvature, ReferenceSurfaces) {
  const auto sphere = make_unit_sphere();
  const auto plane = make_plane();
  for (const auto& u : Grid::over(sphere, 5).points) {
    EXPECT_NEAR(gauss_curvature(sphere, u), 1.0, 1e-12);
  }
  for (const auto& u : Grid::over(plane, 5).points) EXPECT_NEAR(gauss_curvature(plane, u), 0.0, 1e-15);
  EXPECT_THROW(gauss_curvature(gallery_entry("cr_product"), vec({0.0, 0.0})), PreconditionError);
}

TEST(GaussCurvature, DiniIsConstantMinusOne) {
  const auto f = gallery_entry("dini");
  const Grid grid = Grid::over(f, 20);
  double sum = 0.0, sq = 0.0;
  for (const auto& u : grid.points) {
    const double K = gauss_curvature(f, u);
    EXPECT_NEAR(K, -1.0, 1e-9);
    sum += K;
    sq += K * K;
  }
  const double mean = sum / grid.size();
  EXPECT_LE(std::sqrt(std::max(0.0, sq / grid.size() - mean * mean)), 1e-4);
}

// ---------------------------------------------------------------------------
// Report semantics

TEST(Report, VerdictIsMaxWithinTolerance) {
  DiagnosticsReport r;
  r.residuals = {1e-7, 5e-7, 2e-7};
  r.masked = {false, false, false};
  r.tolerance = 5e-7;
  finalize(r);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.summary.argmax, 1);
  r.tolerance = 4.9e-7;
  finalize(r);
  EXPECT_EQ(r.verdict, Verdict::fail);
}

TEST(Report, NanResidualFailsAndMaskedPointsAreIgnored) {
  DiagnosticsReport r;
  r.residuals = {0.0, std::numeric_limits<double>::quiet_NaN(), 10.0};
  r.masked = {false, false, true};
  r.tolerance = 1.0;
  finalize(r);
  EXPECT_EQ(r.verdict, Verdict::fail);
  EXPECT_EQ(r.summary.argmax, 1);
}

TEST(Report, GridShapeAndOrder) {
  const Grid g = Grid::uniform(ParamBox{{{0.0, 1.0}, {0.0, 2.0}}}, std::vector<int>{3, 2});
  ASSERT_EQ(g.size(), 6);
  EXPECT_LT((g.points[1] - vec({0.0, 2.0})).norm(), 1e-15);
  EXPECT_LT((g.points[2] - vec({0.5, 0.0})).norm(), 1e-15);
}

// ---------------------------------------------------------------------------
// Equivalence suites

TEST(EquivalenceSuite, ParallelFieldConditionsAgreeOnRandomClassA) {
  const auto cases = suites::parallel_field_suite(20240611, 20);
  int constant = 0;
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const auto& c = cases[k];
    EXPECT_TRUE(c.agree()) << k << ": ratio " << c.ratio << " length " << c.length
                           << " annihilates " << c.annihilates << " geodesic " << c.geodesic;
    // Every class-A surface is principal direction for d/dt.
    EXPECT_TRUE(c.principal_direction) << k;
    constant += c.length ? 1 : 0;
  }
  EXPECT_EQ(constant, 10);
}

TEST(EquivalenceSuite, UnitSpeedGeodesicsFollowPrincipalDirection) {
  std::mt19937 rng(7);
  for (int k = 0; k < 4; ++k) {
    const auto ex = suites::random_flat_class_a(rng, k % 2 == 0);
    const auto Z = make_field("ddt", ex.f.ambient);
    EXPECT_TRUE(geodesic_residual(ex.f, Z, Grid::over(ex.f, 9)).passed()) << k;
  }
}

TEST(EquivalenceSuite, RatiosAndVerdictsSurviveConformalMaps) {
  const auto res = suites::conformal_invariance_suite();
  for (const auto& m : res.mismatches) ADD_FAILURE() << m;
  EXPECT_GE(res.compositions, 10);
  EXPECT_GE(res.field_pairs, 20);
  EXPECT_LE(res.max_ratio_difference, 1e-6);
  EXPECT_LE(res.max_coefficient_difference, 1e-6);
  EXPECT_LE(res.max_direction_difference, 1e-6);
}

TEST(EquivalenceSuite, ConstantRatioHypersurfacesArePrincipalDirection) {
  const auto res = suites::cr_implies_pd_suite();
  for (const auto& v : res.violations) ADD_FAILURE() << v;
  EXPECT_GE(res.checked, 10);
}

TEST(EquivalenceSuite, PerpLengthConstantAlongTangentComplementForPdRadial) {
  for (const char* name : {"pd_radial", "pd_radial_log_sec"}) {
    for (double bend : {0.0, 0.3}) {
      GalleryParams p;
      p.values["bend"] = bend;
      const auto f = gallery_entry(name, p);
      ASSERT_TRUE(f.is_hypersurface());
      const DiagnosticsReport r =
          perp_length_variation(f, make_field("radial", f.ambient), Grid::over(f));
      EXPECT_EQ(r.verdict, Verdict::pass) << name << " " << r.detail;
      EXPECT_LE(r.summary.max, 1e-5);
    }
  }
}

}  // namespace vfgeom

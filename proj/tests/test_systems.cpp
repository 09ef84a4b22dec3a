#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "biot/systems.hpp"

using namespace biot;

namespace {

ConditionOptions options_for(const BlockSystem& sys) {
  ConditionOptions o;
  o.drop_null = sys.drop_null;
  o.excluded = sys.constrained();
  o.stagnation_tol = 1e-8;
  if (sys.null_mode) o.deflate.push_back(*sys.null_mode);
  return o;
}

double cond(const BlockSystem& sys) {
  return estimate_condition(sys.op(), sys.preconditioner(), options_for(sys)).cond;
}

double dense_cond(const BlockSystem& sys) {
  const auto eig = dense_eig_oracle(DenseMat(sys.matrix()), sys.dense_preconditioner_inverse(), sys.constrained());
  return spectrum_condition(eig, sys.drop_null);
}

BiotParams params(double lambda, double alpha, double kappa) {
  BiotParams p;
  p.lambda = CoefficientField::constant(lambda);
  p.alpha = alpha;
  p.kappa = CoefficientField::constant(kappa);
  return p;
}

int iterations(const BlockSystem& sys, const Vec& rhs) {
  return minres(sys.op(), sys.preconditioner(), rhs).report.iterations;
}

Vec smooth_rhs(const BlockSystem& sys) {
  Vec rhs = Vec::Zero(sys.size());
  for (const auto& f : sys.fields) {
    for (Eigen::Index i = 0; i < f.size; ++i) {
      const Point p = f.space->dof_coord(static_cast<int>(i));
      rhs[f.offset + i] = std::sin(3.0 * p.x + 1.0) * (1.0 + p.y);
    }
  }
  for (int d : sys.constrained()) rhs[d] = 0.0;
  if (sys.null_mode) rhs -= sys.null_mode->dot(rhs) * *sys.null_mode;
  return rhs;
}

}  // namespace

TEST(Rescale, UnitShearModulus) {
  PhysicalParams p;
  p.mu_bar = 0.5;
  p.mu = 0.5;
  p.lambda_phys = 2.0;
  p.alpha_phys = 1.0;
  p.kappa_phys = 1e-4;
  p.dt = 1.0;
  const auto r = rescale_parameters(p);
  EXPECT_DOUBLE_EQ(r.params.lambda.constant_value(), 2.0);
  EXPECT_DOUBLE_EQ(r.params.alpha, 1.0);
  EXPECT_DOUBLE_EQ(r.params.kappa.constant_value(), 1e-4);
  EXPECT_DOUBLE_EQ(r.rhs_scale, 1.0);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Rescale, TimeStepScalesKappaOnly) {
  PhysicalParams p;
  p.mu_bar = p.mu = 2.0;
  p.lambda_phys = 40.0;
  p.alpha_phys = 1.0;
  p.kappa_phys = 3.0;
  p.dt = 1e-2;
  const auto r = rescale_parameters(p);
  EXPECT_DOUBLE_EQ(r.params.kappa.constant_value(), 1e-2 * 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(r.params.lambda.constant_value(), 10.0);
  EXPECT_DOUBLE_EQ(r.params.alpha, 0.25);
  EXPECT_DOUBLE_EQ(r.rhs_scale, 0.25);
}

TEST(Rescale, GeoscienceRegime) {
  PhysicalParams p;
  p.mu_bar = p.mu = 1e10;
  p.lambda_phys = 3e10;
  p.alpha_phys = 1.0;
  p.kappa_phys = 1e-12;
  const auto r = rescale_parameters(p);
  EXPECT_NEAR(r.params.alpha, 5e-11, 1e-25);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Rescale, WarningsAndErrors) {
  PhysicalParams p;
  p.mu = 20.0;
  p.lambda_phys = 0.5;
  const auto r = rescale_parameters(p);
  EXPECT_EQ(r.warnings.size(), 2u);
  p.dt = 0.0;
  EXPECT_THROW((void)rescale_parameters(p), std::invalid_argument);
}

TEST(Params, RangeViolations) {
  EXPECT_TRUE(params(1.0, 1.0, 1.0).range_violations().empty());
  EXPECT_EQ(params(0.5, 1.0, 1.0).range_violations().size(), 1u);
  EXPECT_EQ(params(2.0, 1.5, 0.0).range_violations().size(), 2u);
}

TEST(TotalPressure, SymmetricAtExtremeParameters) {
  for (Family v : {Family::P2, Family::Mini}) {
    auto sys = build_biot_total_pressure(build_unit_square(8, BcPreset::AllDirichlet), v, params(1e8, 1e-4, 1e-12));
    EXPECT_LE(max_asymmetry(sys.matrix()), 1e-13 * max_abs_entry(sys.matrix()));
  }
}

TEST(TotalPressure, FieldLayout) {
  auto sys = build_biot_total_pressure(build_unit_square(32, BcPreset::AllDirichlet), Family::P2, params(1, 1, 1));
  ASSERT_EQ(sys.fields.size(), 3u);
  EXPECT_EQ(sys.size(), 10628);
  EXPECT_EQ(sys.field(FieldRole::TotalPressure).offset, sys.fields[0].size);
  EXPECT_TRUE(sys.field(FieldRole::TotalPressure).constrained.empty());
  EXPECT_EQ(sys.field(FieldRole::FluidPressure).constrained.size(), 128u);
  EXPECT_THROW((void)sys.field(FieldRole::SolidPressure), std::out_of_range);
}

TEST(TotalPressure, CouplingScalesWithAlpha) {
  auto mesh = build_unit_square(4, BcPreset::AllDirichlet);
  auto one = build_biot_total_pressure(mesh, Family::P2, params(10.0, 1.0, 1.0));
  auto part = build_biot_total_pressure(mesh, Family::P2, params(10.0, 0.3, 1.0));
  const SparseMat& a1 = *one.blocks[1][2];
  const SparseMat& a3 = *part.blocks[1][2];
  EXPECT_LE(max_abs_entry(SparseMat(a3 - 0.3 * a1)), 1e-16 * max_abs_entry(a1));
  // alpha/lambda times the pressure mass matrix, with the fluid-pressure Dirichlet columns cleared
  const auto& pf = one.field(FieldRole::FluidPressure);
  const SparseMat mass = assemble_mass(*pf.space);
  const SparseMat expected = clear_rows_cols(SparseMat(0.1 * mass), {}, pf.constrained);
  EXPECT_LE(max_abs_entry(SparseMat(a1 - expected)), 1e-16);
}

TEST(TotalPressure, BlockEntries) {
  auto sys = build_biot_total_pressure(build_unit_square(4, BcPreset::AllDirichlet), Family::P2, params(5.0, 0.5, 0.2));
  const auto& pt = sys.field(FieldRole::TotalPressure);
  const auto& pf = sys.field(FieldRole::FluidPressure);
  const SparseMat mass = assemble_mass(*pt.space);
  EXPECT_LE(max_abs_entry(SparseMat(*sys.blocks[1][1] + 0.2 * mass)), 1e-16);
  const SparseMat a33 = apply_dirichlet(
      SparseMat(-2.0 * 0.25 / 5.0 * mass - assemble_grad_grad(*pf.space, CoefficientField::constant(0.2))), pf.constrained);
  EXPECT_LE(max_abs_entry(SparseMat(*sys.blocks[2][2] - a33)), 1e-15);
  EXPECT_FALSE(sys.blocks[0][2].has_value());
  EXPECT_EQ(sys.precond_blocks.size(), 3u);
}

TEST(TotalPressure, Case2DenseConditionBounded) {
  auto sys = build_case({CaseId::Case2, 8, 1.0, 1.0, {1.0, false}});
  const double c = dense_cond(sys);
  EXPECT_TRUE(std::isfinite(c));
  EXPECT_LT(c, 30.0);
}

TEST(TotalPressure, RejectsInvalidRequests) {
  auto mesh = build_unit_square(4, BcPreset::AllDirichlet);
  EXPECT_THROW((void)build_biot_total_pressure(mesh, Family::P1, params(1, 1, 1)), std::invalid_argument);
  BiotParams varying = params(1, 1, 1);
  varying.lambda = CoefficientField::band(*mesh, locate_region(*mesh, kBandRegion), 10.0, 1.0);
  EXPECT_THROW((void)build_biot_total_pressure(mesh, Family::P2, varying, {BiotPrecond::DirichletBC}),
               std::invalid_argument);
  EXPECT_NO_THROW((void)build_biot_total_pressure(mesh, Family::P2, varying));
  EXPECT_THROW((void)build_biot_total_pressure(build_unit_square(4, BcPreset::LeftOpen), Family::P2, params(1, 1, 1),
                                               {BiotPrecond::DirichletBC}),
               std::invalid_argument);
}

TEST(TotalPressure, ExactMassInnerMatchesTheory) {
  auto mesh = build_unit_square(8, BcPreset::LeftOpen);
  auto jac = build_biot_total_pressure(mesh, Family::P2, params(1e4, 0.1, 1e-4));
  auto exact = build_biot_total_pressure(mesh, Family::P2, params(1e4, 0.1, 1e-4), {BiotPrecond::GeneralBC, MassInner::ExactMass});
  const double cj = dense_cond(jac), ce = dense_cond(exact);
  EXPECT_LT(ce, cj);
  EXPECT_LT(cj, 30.0);
}

TEST(TotalPressure, BandKappaBounded) {
  for (double k : {1e-2, 1e-6, 1e-10}) {
    auto sys = build_case({CaseId::Case1, 8, 1e4, 1.0, {k, true}});
    EXPECT_LT(cond(sys), 30.0) << k;
  }
}

TEST(SolidPressure, SymmetricAndSmallParametersEasy) {
  auto sys = build_biot_solid_pressure(build_unit_square(16, BcPreset::LeftOpen), 1e6, 1e-5);
  EXPECT_LE(max_asymmetry(sys.matrix()), 1e-13 * max_abs_entry(sys.matrix()));
  auto easy = build_biot_solid_pressure(build_unit_square(16, BcPreset::LeftOpen), 1.0, 1.0);
  EXPECT_LE(iterations(easy, smooth_rhs(easy)), 60);
  EXPECT_THROW((void)build_biot_solid_pressure(build_unit_square(4, BcPreset::AllDirichlet), 1.0, 1.0),
               std::invalid_argument);
}

TEST(SolidPressure, DegradesWithLambda) {
  auto mesh = build_unit_square(16, BcPreset::LeftOpen);
  auto low = build_biot_solid_pressure(mesh, 1.0, 1e-5);
  auto high = build_biot_solid_pressure(mesh, 1e6, 1e-5);
  EXPECT_GT(cond(high), 10.0 * cond(low));
}

TEST(Ex1, StokesLimit) {
  auto mesh = build_unit_square(4, BcPreset::AllDirichlet);
  auto sys = build_ex1(mesh, 0.0);
  EXPECT_FALSE(sys.blocks[1][1].has_value());
  const auto& u = sys.field(FieldRole::Displacement);
  const SparseMat lap = apply_dirichlet(assemble_grad_grad(*u.space), u.constrained);
  const SparseMat b = clear_rows_cols(assemble_div(*u.space, *sys.field(FieldRole::Pressure).space), {}, u.constrained);
  std::vector<std::vector<std::optional<SparseMat>>> stokes(2, std::vector<std::optional<SparseMat>>(2));
  stokes[0][0] = lap;
  stokes[1][0] = SparseMat(-b);
  stokes[0][1] = SparseMat(-SparseMat(b.transpose()));
  const SparseMat ref = assemble_blocks(stokes, {u.size, b.rows()}, {u.size, b.rows()});
  EXPECT_EQ(max_abs_entry(SparseMat(sys.matrix() - ref)), 0.0);
  ASSERT_TRUE(sys.null_mode.has_value());
  EXPECT_LT((sys.matrix() * *sys.null_mode).norm(), 1e-13);
}

TEST(Ex1, ConditionNumbers) {
  auto mesh = build_unit_square(16, BcPreset::AllDirichlet);
  EXPECT_LE(cond(build_ex1(mesh, 0.0)), 15.0);
  EXPECT_LE(cond(build_ex1(mesh, 1.0)), 2.0);
  EXPECT_THROW((void)build_ex1(mesh, -1.0), std::invalid_argument);
}

TEST(Ex2, B2RobustAtLargeLambda) {
  auto sys = build_ex2(build_unit_square(64, BcPreset::AllDirichlet), 1e6, Ex2Precond::B2);
  EXPECT_LE(cond(sys), 25.0);
}

TEST(Ex2, B1DegradesLinearly) {
  auto mesh = build_unit_square(16, BcPreset::AllDirichlet);
  const double ratio = cond(build_ex2(mesh, 1e4, Ex2Precond::B1)) / cond(build_ex2(mesh, 1e2, Ex2Precond::B1));
  EXPECT_GE(ratio, 50.0);
  EXPECT_LE(ratio, 200.0);
}

TEST(Ex2, IdenticalAtLambdaOne) {
  auto mesh = build_unit_square(8, BcPreset::AllDirichlet);
  const double b1 = dense_cond(build_ex2(mesh, 1.0, Ex2Precond::B1));
  const double b2 = dense_cond(build_ex2(mesh, 1.0, Ex2Precond::B2));
  EXPECT_NEAR(b1, b2, 1e-10 * b1);
}

TEST(InfSup, TaylorHoodUniform) {
  std::vector<double> beta;
  for (int n : {4, 8, 16}) {
    auto mesh = build_unit_square(n, BcPreset::AllDirichlet);
    beta.push_back(discrete_inf_sup(*make_space(mesh, Family::P2, 2), *make_space(mesh, Family::P1, 1), true));
  }
  const auto [lo, hi] = std::minmax_element(beta.begin(), beta.end());
  EXPECT_GT(*lo, 0.2);
  EXPECT_LT((*hi - *lo) / *hi, 0.1);
}

TEST(InfSup, MiniPositive) {
  for (int n : {4, 8, 16}) {
    auto mesh = build_unit_square(n, BcPreset::AllDirichlet);
    EXPECT_GT(discrete_inf_sup(*make_space(mesh, Family::Mini, 2), *make_space(mesh, Family::P1, 1), true), 0.25);
  }
}

TEST(InfSup, ConstantsInKernelWithoutMeanFilter) {
  auto mesh = build_unit_square(4, BcPreset::AllDirichlet);
  auto v = make_space(mesh, Family::P2, 2);
  auto q = make_space(mesh, Family::P1, 1);
  EXPECT_EQ(discrete_inf_sup(*v, *q, false), 0.0);
  EXPECT_GT(discrete_inf_sup(*v, *q, true), 0.0);
}

TEST(Cases, NamesRoundTrip) {
  for (CaseId id : {CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4, CaseId::Ex1, CaseId::Ex2a,
                    CaseId::Ex2b, CaseId::Ex3}) {
    EXPECT_EQ(parse_case(case_name(id)), id);
  }
  EXPECT_THROW((void)parse_case("case9"), std::invalid_argument);
}

TEST(Cases, SizesAndSymmetry) {
  for (CaseId id : {CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4, CaseId::Ex1, CaseId::Ex2a,
                    CaseId::Ex2b, CaseId::Ex3}) {
    auto sys = build_case({id, 4, 1e2, 1.0, {1e-3, false}});
    EXPECT_LE(max_asymmetry(sys.matrix()), 1e-13 * max_abs_entry(sys.matrix())) << case_name(id);
    EXPECT_EQ(sys.matrix().rows(), sys.size());
    EXPECT_EQ(sys.preconditioner().rows(), sys.size());
  }
  EXPECT_EQ(build_case({CaseId::Case4, 32}).size(), 8452);
}

TEST(Cases, BandOnlyForBiot) {
  EXPECT_NO_THROW((void)build_case({CaseId::Case3, 4, 1.0, 1.0, {1e-4, true}}));
  EXPECT_THROW((void)build_case({CaseId::Ex1, 4, 1.0, 1.0, {1e-4, true}}), std::invalid_argument);
}

TEST(Preconditioner, ConstrainedDofsDecouple) {
  auto sys = build_case({CaseId::Case1, 4, 1.0, 1.0, {1.0, false}});
  const DenseMat a(sys.matrix());
  const DenseMat b = materialize(sys.preconditioner());
  for (int d : sys.constrained()) {
    EXPECT_EQ(a(d, d), 1.0);
    EXPECT_EQ(a.row(d).cwiseAbs().sum(), 1.0);
    EXPECT_NEAR(b(d, d), 1.0, 1e-12);
    EXPECT_NEAR(b.row(d).cwiseAbs().sum(), 1.0, 1e-12);
  }
}

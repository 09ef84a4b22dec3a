#include "biot/systems.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/Householder>

namespace biot {

std::vector<std::string> BiotParams::range_violations() const {
  std::vector<std::string> out;
  auto fmt = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  if (!(lambda.min_value() >= 1.0)) out.push_back("lambda = " + fmt(lambda.min_value()) + " < 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) out.push_back("alpha = " + fmt(alpha) + " outside (0, 1]");
  if (!(kappa.min_value() > 0.0)) out.push_back("kappa = " + fmt(kappa.min_value()) + " <= 0");
  if (!(kappa.max_value() <= 1.0)) out.push_back("kappa = " + fmt(kappa.max_value()) + " > 1");
  return out;
}

RescaledParams rescale_parameters(const PhysicalParams& p) {
  for (double v : {p.mu_bar, p.mu, p.lambda_phys, p.alpha_phys, p.s0, p.kappa_phys, p.dt}) {
    if (!(v > 0.0)) throw std::invalid_argument("rescale_parameters: all physical parameters must be positive");
  }
  const double two_mu = 2.0 * p.mu_bar;
  RescaledParams r;
  r.params.lambda = CoefficientField::constant(p.lambda_phys / two_mu);
  r.params.alpha = p.alpha_phys / two_mu;
  r.params.kappa = CoefficientField::constant(p.dt * p.kappa_phys / two_mu);
  r.params.mu = 1.0;
  r.rhs_scale = 1.0 / two_mu;
  r.warnings = r.params.range_violations();
  const double ratio = p.mu / p.mu_bar;
  if (ratio < 0.1 || ratio > 10.0) {
    std::ostringstream s;
    s << "mu/mu_bar = " << ratio << " is not of unit scale";
    r.warnings.push_back(s.str());
  }
  return r;
}

Eigen::Index BlockSystem::size() const {
  Eigen::Index n = 0;
  for (const auto& f : fields) n += f.size;
  return n;
}

std::vector<int> BlockSystem::constrained() const {
  std::vector<int> out;
  for (const auto& f : fields) {
    for (int d : f.constrained) out.push_back(static_cast<int>(f.offset) + d);
  }
  return out;
}

const SparseMat& BlockSystem::matrix() const {
  if (!matrix_) throw std::logic_error("BlockSystem: finalize() was not called");
  return *matrix_;
}

LinearOp BlockSystem::op() const {
  if (!matrix_) throw std::logic_error("BlockSystem: finalize() was not called");
  return as_operator(matrix_, true);
}

LinearOp BlockSystem::preconditioner() const {
  std::vector<LinearOp> ops;
  for (const auto& b : precond_blocks) ops.push_back(b.op);
  return block_diagonal(std::move(ops));
}

DenseMat BlockSystem::dense_preconditioner_inverse() const {
  const Eigen::Index n = size();
  DenseMat out = DenseMat::Zero(n, n);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const auto& pb = precond_blocks[i];
    DenseMat blk;
    if (pb.inverse_of) {
      blk = DenseMat(*pb.inverse_of);
    } else {
      const DenseMat b = materialize(pb.op);
      blk = b.ldlt().solve(DenseMat::Identity(b.rows(), b.cols()));
      blk = 0.5 * (blk + blk.transpose()).eval();
    }
    out.block(fields[i].offset, fields[i].offset, fields[i].size, fields[i].size) = blk;
  }
  return out;
}

const Field& BlockSystem::field(FieldRole role) const {
  for (const auto& f : fields) {
    if (f.role == role) return f;
  }
  throw std::out_of_range("BlockSystem: no field with the requested role in " + case_id);
}

void BlockSystem::finalize() {
  std::vector<Eigen::Index> sizes;
  Eigen::Index off = 0;
  for (auto& f : fields) {
    f.offset = off;
    off += f.size;
    sizes.push_back(f.size);
  }
  if (precond_blocks.size() != fields.size()) throw std::logic_error("BlockSystem: one preconditioner block per field");
  matrix_ = std::make_shared<const SparseMat>(assemble_blocks(blocks, sizes, sizes));
  if (rhs.size() != off) rhs = Vec::Zero(off);
}

namespace {

using Blocks = std::vector<std::vector<std::optional<SparseMat>>>;

Blocks empty_blocks(std::size_t n) { return Blocks(n, std::vector<std::optional<SparseMat>>(n)); }

PrecondBlock exact_block(SparseMat m, const std::string& name) {
  PrecondBlock pb;
  pb.op = factorize(m, Definiteness::Spd, name);
  pb.inverse_of = std::move(m);
  pb.description = "exact " + name;
  return pb;
}

Field make_field(std::string name, FieldRole role, std::shared_ptr<const FeSpace> space, std::vector<int> bc) {
  Field f;
  f.name = std::move(name);
  f.role = role;
  f.size = space->n_dofs();
  f.space = std::move(space);
  f.constrained = std::move(bc);
  return f;
}

PrecondBlock mass_block(const SparseMat& mass, MassInner inner, const std::string& name) {
  if (inner == MassInner::ExactMass) return exact_block(mass, name);
  PrecondBlock pb;
  pb.op = diagonal_operator(mass.diagonal().cwiseInverse());
  SparseMat d(mass.rows(), mass.cols());
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < mass.rows(); ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(i), mass.coeff(i, i));
  d.setFromTriplets(t.begin(), t.end());
  pb.inverse_of = std::move(d);
  pb.description = "Jacobi " + name;
  return pb;
}

SparseMat transpose(const SparseMat& m) { return SparseMat(m.transpose()); }

void check_velocity(Family velocity) {
  if (velocity != Family::P2 && velocity != Family::Mini) {
    throw std::invalid_argument(std::string("velocity family ") + family_name(velocity) +
                                " with P1 pressure is not a stable Stokes pair");
  }
}

}  // namespace

BlockSystem build_biot_total_pressure(std::shared_ptr<const TriMesh> mesh, Family velocity, const BiotParams& params,
                                      const BiotOptions& opts) {
  check_velocity(velocity);
  if (!(params.lambda.min_value() > 0.0) || !(params.kappa.min_value() > 0.0) || !(params.alpha > 0.0)) {
    throw std::invalid_argument("build_biot_total_pressure: lambda, alpha and kappa must be positive");
  }
  if (opts.precond == BiotPrecond::DirichletBC) {
    if (mesh->preset != BcPreset::AllDirichlet) {
      throw std::invalid_argument("build_biot_total_pressure: the Dirichlet preconditioner needs Gamma_d = boundary");
    }
    if (!params.lambda.is_constant()) {
      throw std::invalid_argument("build_biot_total_pressure: the rank-one preconditioner needs a constant lambda");
    }
  }

  auto vsp = make_space(mesh, velocity, 2);
  auto qt = make_space(mesh, Family::P1, 1);
  auto qf = make_space(mesh, Family::P1, 1);
  const auto u_bc = dirichlet_dofs(*vsp, BcRole::Displacement);
  const auto pf_bc = dirichlet_dofs(*qf, BcRole::Pressure);

  const SparseMat eps = assemble_eps_eps(*vsp);
  const SparseMat div = assemble_div(*vsp, *qt);
  const SparseMat mass = assemble_mass(*qt);
  const SparseMat mass_linv = assemble_mass(*qt, params.lambda.reciprocal());
  const SparseMat stiff = assemble_grad_grad(*qf, params.kappa);
  const double alpha = params.alpha;

  BlockSystem sys;
  sys.case_id = "biot-total-pressure";
  sys.fields.push_back(make_field("u", FieldRole::Displacement, vsp, u_bc));
  sys.fields.push_back(make_field("p_T", FieldRole::TotalPressure, qt, {}));
  sys.fields.push_back(make_field("p_F", FieldRole::FluidPressure, qf, pf_bc));

  sys.blocks = empty_blocks(3);
  const SparseMat a21 = clear_rows_cols(-div, {}, u_bc);
  const SparseMat a23 = clear_rows_cols(alpha * mass_linv, {}, pf_bc);
  sys.blocks[0][0] = apply_dirichlet(eps, u_bc);
  sys.blocks[1][0] = a21;
  sys.blocks[0][1] = transpose(a21);
  sys.blocks[1][1] = SparseMat(-mass_linv);
  sys.blocks[1][2] = a23;
  sys.blocks[2][1] = transpose(a23);
  sys.blocks[2][2] = apply_dirichlet(SparseMat(-(2.0 * alpha * alpha) * mass_linv - stiff), pf_bc);

  sys.precond_blocks.push_back(exact_block(*sys.blocks[0][0], "eps-eps"));
  if (opts.precond == BiotPrecond::GeneralBC) {
    sys.precond_blocks.push_back(mass_block(mass, opts.qt_inner, "Q_T mass"));
  } else {
    auto rank_one = std::make_shared<const RankOneMass>(std::make_shared<const SparseMat>(mass),
                                                        build_mean_vector(*qt), params.lambda.constant_value());
    PrecondBlock pb;
    pb.op = build_QT_preconditioner(rank_one, opts.qt_inner, Family::P1);
    pb.description = opts.qt_inner == MassInner::Jacobi ? "rank-one corrected Jacobi" : "rank-one corrected mass";
    sys.precond_blocks.push_back(std::move(pb));
  }
  sys.precond_blocks.push_back(
      exact_block(apply_dirichlet(SparseMat((alpha * alpha) * mass_linv + stiff), pf_bc), "Q_F weighted"));
  sys.finalize();
  return sys;
}

BlockSystem build_biot_solid_pressure(std::shared_ptr<const TriMesh> mesh, double lambda, double kappa) {
  if (mesh->preset != BcPreset::LeftOpen) {
    throw std::invalid_argument("build_biot_solid_pressure: LeftOpen boundary preset required");
  }
  if (!(lambda > 0.0) || !(kappa > 0.0)) throw std::invalid_argument("build_biot_solid_pressure: positive parameters");
  auto vsp = make_space(mesh, Family::P2, 2);
  auto qs = make_space(mesh, Family::P1, 1);
  auto qf = make_space(mesh, Family::P1, 1);
  const auto u_bc = dirichlet_dofs(*vsp, BcRole::Displacement);
  const auto pf_bc = dirichlet_dofs(*qf, BcRole::Pressure);

  const SparseMat div = assemble_div(*vsp, *qs);
  const SparseMat mass = assemble_mass(*qs);
  const SparseMat mass_linv = assemble_mass(*qs, CoefficientField::constant(1.0 / lambda));
  const SparseMat stiff = assemble_grad_grad(*qf, CoefficientField::constant(kappa));

  BlockSystem sys;
  sys.case_id = "biot-solid-pressure";
  sys.fields.push_back(make_field("u", FieldRole::Displacement, vsp, u_bc));
  sys.fields.push_back(make_field("p_S", FieldRole::SolidPressure, qs, {}));
  sys.fields.push_back(make_field("p_F", FieldRole::FluidPressure, qf, pf_bc));

  sys.blocks = empty_blocks(3);
  const SparseMat a21 = clear_rows_cols(-div, {}, u_bc);
  const SparseMat a31 = clear_rows_cols(-div, pf_bc, u_bc);
  sys.blocks[0][0] = apply_dirichlet(assemble_eps_eps(*vsp), u_bc);
  sys.blocks[1][0] = a21;
  sys.blocks[0][1] = transpose(a21);
  sys.blocks[2][0] = a31;
  sys.blocks[0][2] = transpose(a31);
  sys.blocks[1][1] = SparseMat(-mass_linv);
  sys.blocks[2][2] = apply_dirichlet(SparseMat(-mass_linv - stiff), pf_bc);

  sys.precond_blocks.push_back(exact_block(apply_dirichlet(assemble_grad_grad(*vsp), u_bc), "vector Laplacian"));
  sys.precond_blocks.push_back(exact_block(mass, "Q_S mass"));
  sys.precond_blocks.push_back(exact_block(apply_dirichlet(SparseMat(mass + stiff), pf_bc), "mass + kappa stiffness"));
  sys.finalize();
  return sys;
}

BlockSystem build_ex1(std::shared_ptr<const TriMesh> mesh, double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("build_ex1: kappa must be >= 0");
  auto vsp = make_space(mesh, Family::P2, 2);
  auto q = make_space(mesh, Family::P1, 1);
  const auto u_bc = dirichlet_dofs(*vsp, BcRole::Displacement);

  const SparseMat div = assemble_div(*vsp, *q);
  const SparseMat mass = assemble_mass(*q);

  BlockSystem sys;
  sys.case_id = "ex1";
  sys.fields.push_back(make_field("u", FieldRole::Displacement, vsp, u_bc));
  sys.fields.push_back(make_field("p", FieldRole::Pressure, q, {}));
  sys.blocks = empty_blocks(2);
  const SparseMat a21 = clear_rows_cols(-div, {}, u_bc);
  sys.blocks[0][0] = apply_dirichlet(assemble_grad_grad(*vsp), u_bc);
  sys.blocks[1][0] = a21;
  sys.blocks[0][1] = transpose(a21);
  SparseMat pre_p = mass;
  if (kappa > 0.0) {
    const SparseMat stiff = assemble_grad_grad(*q, CoefficientField::constant(kappa));
    sys.blocks[1][1] = SparseMat(-stiff);
    pre_p = SparseMat(mass + stiff);
  }
  sys.precond_blocks.push_back(exact_block(*sys.blocks[0][0], "vector Laplacian"));
  sys.precond_blocks.push_back(exact_block(pre_p, "mass + kappa stiffness"));
  sys.drop_null = 1;
  sys.finalize();
  Vec nm = Vec::Zero(sys.size());
  nm.segment(sys.fields[1].offset, sys.fields[1].size).setOnes();
  sys.null_mode = nm / nm.norm();
  return sys;
}

BlockSystem build_ex2(std::shared_ptr<const TriMesh> mesh, double lambda, Ex2Precond precond, MassInner inner) {
  if (!(lambda >= 1.0)) throw std::invalid_argument("build_ex2: lambda must be >= 1");
  auto vsp = make_space(mesh, Family::P2, 2);
  auto q = make_space(mesh, Family::P1, 1);
  const auto u_bc = dirichlet_dofs(*vsp, BcRole::Displacement);
  const SparseMat div = assemble_div(*vsp, *q);
  const SparseMat mass = assemble_mass(*q);

  BlockSystem sys;
  sys.case_id = precond == Ex2Precond::B1 ? "ex2-B1" : "ex2-B2";
  sys.fields.push_back(make_field("u", FieldRole::Displacement, vsp, u_bc));
  sys.fields.push_back(make_field("p", FieldRole::Pressure, q, {}));
  sys.blocks = empty_blocks(2);
  const SparseMat a21 = clear_rows_cols(div, {}, u_bc);
  sys.blocks[0][0] = apply_dirichlet(assemble_eps_eps(*vsp), u_bc);
  sys.blocks[1][0] = a21;
  sys.blocks[0][1] = transpose(a21);
  sys.blocks[1][1] = SparseMat(-assemble_mass(*q, CoefficientField::constant(1.0 / lambda)));

  sys.precond_blocks.push_back(exact_block(*sys.blocks[0][0], "eps-eps"));
  if (precond == Ex2Precond::B1) {
    sys.precond_blocks.push_back(mass_block(mass, inner, "mass"));
  } else {
    auto rank_one = std::make_shared<const RankOneMass>(std::make_shared<const SparseMat>(mass),
                                                        build_mean_vector(*q), lambda);
    PrecondBlock pb;
    pb.op = build_QT_preconditioner(rank_one, inner, Family::P1);
    pb.description = inner == MassInner::Jacobi ? "rank-one corrected Jacobi" : "rank-one corrected mass";
    sys.precond_blocks.push_back(std::move(pb));
  }
  sys.finalize();
  return sys;
}

double discrete_inf_sup(const FeSpace& v, const FeSpace& q, bool zero_mean) {
  if (v.value_dim() != 2 || q.value_dim() != 1) throw std::invalid_argument("discrete_inf_sup: (vector, scalar) pair");
  if (q.n_dofs() > kDenseOracleCap) {
    throw SolverError(SolverError::Kind::DimensionCap, "discrete_inf_sup: pressure dimension exceeds dense cap");
  }
  const auto u_bc = dirichlet_dofs(v, BcRole::Displacement);
  const LinearOp lap = factorize(apply_dirichlet(assemble_grad_grad(v), u_bc), Definiteness::Spd, "vector Laplacian");
  const SparseMat b = clear_rows_cols(assemble_div(v, q), {}, u_bc);
  const DenseMat bt = DenseMat(SparseMat(b.transpose()));
  DenseMat x(bt.rows(), bt.cols());
  for (Eigen::Index j = 0; j < bt.cols(); ++j) x.col(j) = lap(bt.col(j));
  DenseMat schur = b * x;
  schur = 0.5 * (schur + schur.transpose()).eval();
  DenseMat mass = DenseMat(assemble_mass(q));

  if (zero_mean) {
    // Orthonormal basis of {p : p^T M 1 = 0}, the L2-orthogonal complement of the constants.
    Vec c = mass * Vec::Ones(mass.rows());
    Eigen::HouseholderQR<DenseMat> qr(c);
    const DenseMat qfull = qr.householderQ() * DenseMat::Identity(c.size(), c.size());
    const DenseMat z = qfull.rightCols(c.size() - 1);
    schur = (z.transpose() * schur * z).eval();
    mass = (z.transpose() * mass * z).eval();
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMat> es(schur, mass, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  const Vec& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  const double low = ev.minCoeff();
  return low <= 1e-10 * top ? 0.0 : std::sqrt(low);
}

std::string case_name(CaseId id) {
  switch (id) {
    case CaseId::Case1: return "1";
    case CaseId::Case2: return "2";
    case CaseId::Case3: return "3";
    case CaseId::Case4: return "4";
    case CaseId::Ex1: return "ex1";
    case CaseId::Ex2a: return "ex2a";
    case CaseId::Ex2b: return "ex2b";
    case CaseId::Ex3: return "ex3";
  }
  return "?";
}

CaseId parse_case(const std::string& s) {
  for (CaseId id : {CaseId::Case1, CaseId::Case2, CaseId::Case3, CaseId::Case4, CaseId::Ex1, CaseId::Ex2a,
                    CaseId::Ex2b, CaseId::Ex3}) {
    if (case_name(id) == s) return id;
  }
  throw std::invalid_argument("unknown case '" + s + "' (expected 1|2|3|4|ex1|ex2a|ex2b|ex3)");
}

BlockSystem build_case(const CaseSpec& spec) {
  const bool left_open = spec.id == CaseId::Case1 || spec.id == CaseId::Case4 || spec.id == CaseId::Ex3;
  auto mesh = build_unit_square(spec.n, left_open ? BcPreset::LeftOpen : BcPreset::AllDirichlet);
  const bool biot = spec.id == CaseId::Case1 || spec.id == CaseId::Case2 || spec.id == CaseId::Case3 ||
                    spec.id == CaseId::Case4;
  if (spec.kappa.band && !biot) throw std::invalid_argument("build_case: a kappa band needs a total-pressure case");

  BlockSystem sys;
  if (biot) {
    BiotParams params;
    params.lambda = CoefficientField::constant(spec.lambda);
    params.alpha = spec.alpha;
    params.kappa = spec.kappa.band
                       ? CoefficientField::band(*mesh, locate_region(*mesh, kBandRegion), spec.kappa.value, 1.0)
                       : CoefficientField::constant(spec.kappa.value);
    BiotOptions opts;
    opts.precond = spec.id == CaseId::Case2 ? BiotPrecond::DirichletBC : BiotPrecond::GeneralBC;
    opts.qt_inner = spec.qt_inner;
    sys = build_biot_total_pressure(mesh, spec.id == CaseId::Case4 ? Family::Mini : Family::P2, params, opts);
  } else if (spec.id == CaseId::Ex1) {
    sys = build_ex1(mesh, spec.kappa.value);
  } else if (spec.id == CaseId::Ex3) {
    sys = build_biot_solid_pressure(mesh, spec.lambda, spec.kappa.value);
  } else {
    sys = build_ex2(mesh, spec.lambda, spec.id == CaseId::Ex2a ? Ex2Precond::B1 : Ex2Precond::B2, spec.qt_inner);
  }
  sys.case_id = case_name(spec.id);
  return sys;
}

}  // namespace biot

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "biot/elements.hpp"
#include "biot/forms.hpp"
#include "biot/krylov.hpp"
#include "biot/pressure_precond.hpp"
#include "biot/sparse.hpp"

namespace biot {

/// Reduced (dimensionless) Biot parameters with mu = 1.
struct BiotParams {
  CoefficientField lambda = CoefficientField::constant(1.0);
  double alpha = 1.0;
  CoefficientField kappa = CoefficientField::constant(1.0);
  double mu = 1.0;

  /// Human-readable violations of 1 <= lambda, 0 < alpha <= 1, 0 < kappa <= 1.
  [[nodiscard]] std::vector<std::string> range_violations() const;
};

/// Physical inputs of one backward-Euler step. `dt` holds the time step
/// delta^2 itself.
struct PhysicalParams {
  double mu_bar = 0.5;
  double mu = 0.5;
  double lambda_phys = 1.0;
  double alpha_phys = 1.0;
  double s0 = 1.0;
  double kappa_phys = 1.0;
  double dt = 1.0;
};

struct RescaledParams {
  BiotParams params;
  double rhs_scale = 1.0;  // multiply f and g by this, i.e. 1/(2 mu_bar)
  std::vector<std::string> warnings;
};

/// lambda' = lambda/(2 mu_bar), alpha' = alpha/(2 mu_bar), kappa' = dt*kappa/(2 mu_bar).
/// Range violations and a mu/mu_bar ratio outside [0.1, 10] become warnings;
/// non-positive inputs throw std::invalid_argument.
[[nodiscard]] RescaledParams rescale_parameters(const PhysicalParams& phys);

enum class FieldRole { Displacement, TotalPressure, SolidPressure, FluidPressure, Pressure };

struct Field {
  std::string name;
  FieldRole role = FieldRole::Displacement;
  Eigen::Index offset = 0;
  Eigen::Index size = 0;
  std::shared_ptr<const FeSpace> space;
  std::vector<int> constrained;  // local dof indices
};

struct PrecondBlock {
  LinearOp op;
  /// The SPD matrix this block inverts exactly, when there is one.
  std::optional<SparseMat> inverse_of;
  std::string description;
};

/// Block system A x = rhs together with a block-diagonal preconditioner.
/// Constrained dofs carry unit rows/columns in A and in every preconditioner
/// block, so they decouple with eigenvalue 1.
struct BlockSystem {
  std::string case_id;
  std::vector<Field> fields;
  std::vector<std::vector<std::optional<SparseMat>>> blocks;
  Vec rhs;
  std::vector<PrecondBlock> precond_blocks;
  int drop_null = 0;
  /// Kernel vector of A (Neumann pressure), if any.
  std::optional<Vec> null_mode;

  [[nodiscard]] Eigen::Index size() const;
  [[nodiscard]] std::vector<int> constrained() const;  // monolithic indices
  [[nodiscard]] const SparseMat& matrix() const;
  [[nodiscard]] LinearOp op() const;
  [[nodiscard]] LinearOp preconditioner() const;
  /// Dense block-diagonal B^{-1}, for the dense spectral oracle.
  [[nodiscard]] DenseMat dense_preconditioner_inverse() const;
  [[nodiscard]] const Field& field(FieldRole role) const;

  /// Builds the monolithic matrix; called by every builder.
  void finalize();

 private:
  std::shared_ptr<const SparseMat> matrix_;
};

enum class BiotPrecond {
  GeneralBC,    // blocks: eps-eps, mass (or its diagonal), alpha^2/lambda mass + kappa stiffness
  DirichletBC,  // second block replaced by the rank-one corrected (1/lambda I + I_0)^{-1}
};

struct BiotOptions {
  BiotPrecond precond = BiotPrecond::GeneralBC;
  MassInner qt_inner = MassInner::Jacobi;  // inner solve of the second block
};

/// Total-pressure three-field system (u, p_T, p_F). `velocity` selects
/// Taylor-Hood (P2) or MINI (Mini); P1 velocity is not a stable pair and is rejected.
[[nodiscard]] BlockSystem build_biot_total_pressure(std::shared_ptr<const TriMesh> mesh, Family velocity,
                                                    const BiotParams& params, const BiotOptions& opts = {});

/// Solid-pressure three-field system (u, p_S, p_F), alpha = 1, on a LeftOpen mesh.
[[nodiscard]] BlockSystem build_biot_solid_pressure(std::shared_ptr<const TriMesh> mesh, double lambda, double kappa);

/// Stokes-Darcy type system (u, p) with Neumann pressure; kappa = 0 gives Stokes.
[[nodiscard]] BlockSystem build_ex1(std::shared_ptr<const TriMesh> mesh, double kappa);

enum class Ex2Precond { B1, B2 };

/// Mixed linear elasticity (u, p) with p the solid pressure.
[[nodiscard]] BlockSystem build_ex2(std::shared_ptr<const TriMesh> mesh, double lambda, Ex2Precond precond,
                                    MassInner inner = MassInner::Jacobi);

/// Discrete inf-sup constant of (V, Q): sqrt of the smallest eigenvalue of
/// B A^{-1} B^T against the pressure mass matrix, A the vector Laplacian with
/// V's Dirichlet conditions. With zero_mean the constants are factored out.
/// Eigenvalues below 1e-10 of the largest count as zero.
[[nodiscard]] double discrete_inf_sup(const FeSpace& v, const FeSpace& q, bool zero_mean);

enum class CaseId { Case1, Case2, Case3, Case4, Ex1, Ex2a, Ex2b, Ex3 };

[[nodiscard]] std::string case_name(CaseId id);
[[nodiscard]] CaseId parse_case(const std::string& s);

/// kappa value; with `band` set the value applies on [0,1]x[1/4,3/4] and kappa = 1 elsewhere.
struct KappaSpec {
  double value = 1.0;
  bool band = false;

  bool operator==(const KappaSpec&) const = default;
};

struct CaseSpec {
  CaseId id = CaseId::Case1;
  int n = 8;
  double lambda = 1.0;
  double alpha = 1.0;
  KappaSpec kappa;
  MassInner qt_inner = MassInner::Jacobi;
};

/// Builds one benchmark configuration (rhs left at zero).
[[nodiscard]] BlockSystem build_case(const CaseSpec& spec);

/// The horizontal band [0,1] x [1/4, 3/4].
inline constexpr Rect kBandRegion{0.0, 1.0, 0.25, 0.75};

}  // namespace biot

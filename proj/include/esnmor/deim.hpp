#pragma once

#include <Eigen/LU>
#include <optional>
#include <vector>

#include "esnmor/pod.hpp"

namespace esnmor {

// Greedy pivot loop: pivot 1 is the largest entry of the first column; each
// later pivot is the largest residual of the next column against the
// interpolation built so far. Ties break to the lowest index.
std::vector<Index> deim_select(const Matrix& u);

// Interpolation operators for a DEIM basis U with pivot rows P.
struct DeimOperators {
  Matrix u;                    // n x m_d
  std::vector<Index> pivots;   // m_d distinct row indices, selection order
  Matrix pt_u;                 // m_d x m_d, P^T U
  Matrix t2;                   // n x m_d, U (P^T U)^{-1}
  Eigen::PartialPivLU<Matrix> interp;  // factorization of P^T U

  Index points() const { return static_cast<Index>(pivots.size()); }
  // Operator 2-norms of P^T U and its inverse; the inverse norm is the
  // amplification factor in the error bound.
  double norm_pt_u() const;
  double norm_pt_u_inv() const;
  // A-priori growth cap (1 + sqrt(2n))^(m_d - 1) / ||u_1||_inf.
  double apriori_cap() const;
};

DeimOperators deim_operators(const Matrix& u);
// Rebuilds operators for already-selected pivots (model file loading).
DeimOperators deim_operators_from(const Matrix& u, std::vector<Index> pivots);

// ||(P^T U)^{-1}||_2 * ||(I - U U^T) f||_2. Upper-bounds the interpolation
// error of f at any point.
double deim_error_bound(const DeimOperators& ops, const Vector& fvec);

// POD-DEIM network: tanh evaluations per step drop from n to m_d.
struct DeimEsn {
  PodEsn base;
  DeimOperators ops;
  RowMatrix lift;         // m x m_d, T^T T2
  RowMatrix w_rr_t_piv;   // m_d x m, pivot rows of W_rr T
  RowMatrix w_ir_piv;     // m_d x n_inputs
  Vector w_br_piv;        // m_d
  double deim_cutoff = 0.0;

  Index size() const { return base.size(); }
  Index points() const { return ops.points(); }
};

// U comes from the same PodBasis as the POD reduction, truncated at
// deim_cutoff (which may keep more or fewer columns than the POD basis).
DeimEsn deim_build(const EchoStateNetwork& esn, const PodEsn& pe,
                   const PodBasis& basis, double deim_cutoff);

// Assembles the reduced model from ready-made operators; the pivot-row
// matrices are gathered from the full-size fields carried by `pe`.
DeimEsn deim_assemble(const PodEsn& pe, DeimOperators ops, double deim_cutoff);

Vector deim_step(const DeimEsn& de, const Vector& z, const Vector& u);
ReducedTrajectory deim_run(const DeimEsn& de, const Matrix& inputs,
                           const Vector& z0);

// Jacobian spectral radii of the full, POD, and DEIM models at one
// (state, input) point; reduced models are evaluated at z = T^T x.
struct StabilityReport {
  Vector x_point;
  Vector u_point;
  double rho_full = 0.0;
  std::optional<double> rho_pod;
  std::optional<double> rho_deim;

  bool full_stable() const { return rho_full < 1.0; }
  bool pod_stable() const { return rho_pod && *rho_pod < 1.0; }
  bool deim_stable() const { return rho_deim && *rho_deim < 1.0; }
};

Matrix full_jacobian(const EchoStateNetwork& esn, const Vector& x,
                     const Vector& u);
Matrix pod_jacobian(const PodEsn& pe, const Vector& z, const Vector& u);
Matrix deim_jacobian(const DeimEsn& de, const Vector& z, const Vector& u);

StabilityReport stability_spectrum(const EchoStateNetwork& esn,
                                   const PodEsn* pe, const DeimEsn* de,
                                   const Vector& x_point,
                                   const Vector& u_point);

}  // namespace esnmor

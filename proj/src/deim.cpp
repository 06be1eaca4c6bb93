#include "esnmor/deim.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "esnmor/kernels.hpp"

namespace esnmor {

namespace {

Index argmax_abs(const Vector& v) {
  Index at = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > best) {  // strict: ties go to the lowest index
      best = mag;
      at = i;
    }
  }
  return at;
}

Matrix gather_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
}

}  // namespace

std::vector<Index> deim_select(const Matrix& u) {
  const Index m_d = u.cols();
  if (m_d < 1) throw std::invalid_argument("deim_select: empty basis");

  std::vector<Index> pivots;
  pivots.push_back(argmax_abs(u.col(0)));

  for (Index l = 1; l < m_d; ++l) {
    const Matrix sub = gather_rows(u.leftCols(l), pivots);  // P^T U~_l
    Eigen::PartialPivLU<Matrix> lu(sub);
    Vector rhs(l);
    for (Index i = 0; i < l; ++i) rhs[i] = u(pivots[i], l);
    const Vector coef = lu.solve(rhs);
    if (!coef.allFinite() || (sub * coef - rhs).norm() > 1e-8 * std::max(rhs.norm(), 1.0))
      throw std::runtime_error("deim_select: singular interpolation system at column " +
                               std::to_string(l));
    const Vector residual = u.col(l) - u.leftCols(l) * coef;
    pivots.push_back(argmax_abs(residual));
  }
  return pivots;
}

DeimOperators deim_operators(const Matrix& u) {
  return deim_operators_from(u, deim_select(u));
}

DeimOperators deim_operators_from(const Matrix& u, std::vector<Index> pivots) {
  if (static_cast<Index>(pivots.size()) != u.cols())
    throw std::invalid_argument("deim_operators: pivot count != basis columns");
  DeimOperators ops;
  ops.u = u;
  ops.pivots = std::move(pivots);
  ops.pt_u = gather_rows(u, ops.pivots);
  ops.interp = Eigen::PartialPivLU<Matrix>(ops.pt_u);
  // T2 = U (P^T U)^{-1}: solve against the transposed system, then flip back.
  ops.t2 = Eigen::PartialPivLU<Matrix>(ops.pt_u.transpose())
               .solve(u.transpose())
               .transpose();
  return ops;
}

double DeimOperators::norm_pt_u() const { return spectral_norm(pt_u); }

double DeimOperators::norm_pt_u_inv() const {
  const Vector sv = Eigen::JacobiSVD<Matrix>(pt_u).singularValues();
  return 1.0 / sv[sv.size() - 1];
}

double DeimOperators::apriori_cap() const {
  const double n = static_cast<double>(u.rows());
  const double u1_inf = u.col(0).cwiseAbs().maxCoeff();
  return std::pow(1.0 + std::sqrt(2.0 * n), static_cast<double>(points() - 1)) /
         u1_inf;
}

double deim_error_bound(const DeimOperators& ops, const Vector& fvec) {
  if (fvec.size() != ops.u.rows())
    throw std::invalid_argument("deim_error_bound: dimension mismatch");
  const Vector orthogonal_part = fvec - ops.u * (ops.u.transpose() * fvec);
  return ops.norm_pt_u_inv() * orthogonal_part.norm();
}

DeimEsn deim_build(const EchoStateNetwork& esn, const PodEsn& pe,
                   const PodBasis& basis, double deim_cutoff) {
  if (pe.full_size() != esn.size())
    throw std::invalid_argument("deim_build: model size mismatch");
  const Index m_d = energy_truncate_count(basis, deim_cutoff);
  return deim_assemble(pe, deim_operators(basis.u_svd.leftCols(m_d)),
                       deim_cutoff);
}

DeimEsn deim_assemble(const PodEsn& pe, DeimOperators ops, double deim_cutoff) {
  const Index m_d = ops.points();
  DeimEsn de;
  de.base = pe;
  de.lift = pe.t.transpose() * ops.t2;
  de.deim_cutoff = deim_cutoff;

  // Pivot-row gathers are bit-exact copies of rows of the unpivoted
  // precomposed matrices.
  de.w_rr_t_piv.resize(m_d, pe.size());
  de.w_ir_piv.resize(m_d, pe.n_inputs());
  de.w_br_piv.resize(m_d);
  for (Index i = 0; i < m_d; ++i) {
    de.w_rr_t_piv.row(i) = pe.w_rr_t.row(ops.pivots[i]);
    de.w_ir_piv.row(i) = pe.w_ir.row(ops.pivots[i]);
    de.w_br_piv[i] = pe.w_br[ops.pivots[i]];
  }
  de.ops = std::move(ops);
  return de;
}

Vector deim_step(const DeimEsn& de, const Vector& z, const Vector& u) {
  if (z.size() != de.size() || u.size() != de.base.n_inputs())
    throw std::invalid_argument("deim_step: dimension mismatch");
  Vector scratch(de.points());
  Vector out(de.size());
  kernels::step_deim(de.w_rr_t_piv, de.w_ir_piv, de.w_br_piv, de.lift,
                     de.base.gamma, z, u, scratch, out, /*parallel=*/true);
  return out;
}

ReducedTrajectory deim_run(const DeimEsn& de, const Matrix& inputs,
                           const Vector& z0) {
  if (inputs.rows() != de.base.n_inputs())
    throw std::invalid_argument("deim_run: input row count mismatch");
  if (z0.size() != de.size() || !z0.allFinite())
    throw std::invalid_argument("deim_run: bad initial state");
  const Index k_steps = inputs.cols();
  if (k_steps < 1) throw std::invalid_argument("deim_run: need at least 1 step");

  ReducedTrajectory traj;
  traj.states.resize(de.size(), k_steps);
  traj.outputs.resize(de.base.n_outputs(), k_steps);

  Vector z = z0;
  Vector next(de.size());
  Vector scratch(de.points());
  for (Index k = 0; k < k_steps; ++k) {
    kernels::step_deim(de.w_rr_t_piv, de.w_ir_piv, de.w_br_piv, de.lift,
                       de.base.gamma, z, inputs.col(k), scratch, next,
                       /*parallel=*/true);
    // DEIM can lose stability; divergence is an observable outcome here,
    // reported with the step index.
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceLimit)
      throw DivergenceError(k, "deim_run: state diverged at step " +
                                   std::to_string(k));
    z = next;
    traj.states.col(k) = z;
    traj.outputs.col(k).noalias() = de.base.w_ro_t * z;
  }
  return traj;
}

namespace {

// d tanh = 1 - tanh^2, evaluated at the preactivation.
Vector tanh_prime(const Vector& pre) {
  return (1.0 - pre.array().tanh().square()).matrix();
}

}  // namespace

Matrix full_jacobian(const EchoStateNetwork& esn, const Vector& x,
                     const Vector& u) {
  if (x.size() != esn.size() || u.size() != esn.hyper.n_inputs)
    throw std::invalid_argument("full_jacobian: dimension mismatch");
  const double gamma = esn.hyper.leak_rate;
  const Vector pre = esn.w_rr * x + esn.w_ir * u + esn.w_br;
  Matrix jac = gamma * tanh_prime(pre).asDiagonal() * Matrix(esn.w_rr);
  jac.diagonal().array() += 1.0 - gamma;
  return jac;
}

Matrix pod_jacobian(const PodEsn& pe, const Vector& z, const Vector& u) {
  if (z.size() != pe.size() || u.size() != pe.n_inputs())
    throw std::invalid_argument("pod_jacobian: dimension mismatch");
  const Vector pre = pe.w_rr_t * z + pe.w_ir * u + pe.w_br;
  Matrix jac = pe.gamma * Matrix(pe.tt) * (tanh_prime(pre).asDiagonal() * Matrix(pe.w_rr_t));
  jac.diagonal().array() += 1.0 - pe.gamma;
  return jac;
}

Matrix deim_jacobian(const DeimEsn& de, const Vector& z, const Vector& u) {
  if (z.size() != de.size() || u.size() != de.base.n_inputs())
    throw std::invalid_argument("deim_jacobian: dimension mismatch");
  const Vector pre = de.w_rr_t_piv * z + de.w_ir_piv * u + de.w_br_piv;
  Matrix jac = de.base.gamma * Matrix(de.lift) *
               (tanh_prime(pre).asDiagonal() * Matrix(de.w_rr_t_piv));
  jac.diagonal().array() += 1.0 - de.base.gamma;
  return jac;
}

StabilityReport stability_spectrum(const EchoStateNetwork& esn,
                                   const PodEsn* pe, const DeimEsn* de,
                                   const Vector& x_point,
                                   const Vector& u_point) {
  StabilityReport report;
  report.x_point = x_point;
  report.u_point = u_point;
  report.rho_full = spectral_radius(full_jacobian(esn, x_point, u_point));
  if (pe) {
    const Vector z = pe->tt * x_point;
    report.rho_pod = spectral_radius(pod_jacobian(*pe, z, u_point));
  }
  if (de) {
    const Vector z = de->base.tt * x_point;
    report.rho_deim = spectral_radius(deim_jacobian(*de, z, u_point));
  }
  return report;
}

}  // namespace esnmor

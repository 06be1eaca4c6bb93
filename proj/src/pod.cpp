#include "esnmor/pod.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "esnmor/kernels.hpp"

namespace esnmor {

PodBasis svd_snapshots(const Matrix& snapshots) {
  if (snapshots.cols() < 1)
    throw std::invalid_argument("svd_snapshots: need at least one snapshot");
  if (!snapshots.allFinite())
    throw std::invalid_argument("svd_snapshots: non-finite entries");

  Eigen::BDCSVD<Matrix> svd(snapshots, Eigen::ComputeThinU);
  PodBasis basis;
  basis.u_svd = svd.matrixU();
  basis.sigma = svd.singularValues();

  // Deterministic sign convention: the largest-magnitude component of every
  // column is made positive, so equal singular values order reproducibly
  // across SVD backends.
  for (Index j = 0; j < basis.u_svd.cols(); ++j) {
    Index at = 0;
    basis.u_svd.col(j).cwiseAbs().maxCoeff(&at);
    if (basis.u_svd(at, j) < 0.0) basis.u_svd.col(j) = -basis.u_svd.col(j);
  }

  const double total = basis.sigma.sum();
  basis.energy = total > 0.0 ? Vector(basis.sigma / total)
                             : Vector(Vector::Zero(basis.sigma.size()));
  return basis;
}

Index energy_truncate_count(const PodBasis& basis, double cutoff) {
  if (!(cutoff >= 0.0 && cutoff < 1.0))
    throw std::invalid_argument("energy_truncate: cutoff must be in [0, 1)");
  const double target = 1.0 - cutoff;
  double kept = 0.0;
  for (Index m = 1; m <= basis.rank(); ++m) {
    kept += basis.energy[m - 1];
    if (kept >= target) return m;
  }
  return basis.rank();
}

Matrix energy_truncate(const PodBasis& basis, double cutoff) {
  return basis.u_svd.leftCols(energy_truncate_count(basis, cutoff));
}

PodEsn pod_reduce(const EchoStateNetwork& esn, const Matrix& t) {
  if (t.rows() != esn.size())
    throw std::invalid_argument("pod_reduce: basis row count != reservoir size");
  const Index m = t.cols();
  const double ortho_dev =
      (t.transpose() * t - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  if (ortho_dev > 1e-8)
    throw std::invalid_argument("pod_reduce: basis columns not orthonormal");

  PodEsn pe;
  pe.t = t;
  pe.tt = t.transpose();
  pe.w_rr_t = esn.w_rr * t;
  pe.w_ir = esn.w_ir;
  pe.w_br = esn.w_br;
  pe.w_ro_t = esn.w_ro * t;
  pe.gamma = esn.hyper.leak_rate;
  return pe;
}

PodEsn pod_reduce(const EchoStateNetwork& esn, const PodBasis& basis,
                  double cutoff) {
  const Index m = energy_truncate_count(basis, cutoff);
  PodEsn pe = pod_reduce(esn, Matrix(basis.u_svd.leftCols(m)));
  pe.sigma = basis.sigma;
  pe.energy_kept = basis.energy.head(m).sum();
  return pe;
}

Vector pod_step(const PodEsn& pe, const Vector& z, const Vector& u) {
  if (z.size() != pe.size() || u.size() != pe.n_inputs())
    throw std::invalid_argument("pod_step: dimension mismatch");
  Vector scratch(pe.full_size());
  Vector out(pe.size());
  kernels::step_pod(pe.w_rr_t, pe.w_ir, pe.w_br, pe.tt, pe.gamma, z, u,
                    scratch, out, /*parallel=*/true);
  return out;
}

ReducedTrajectory pod_run(const PodEsn& pe, const Matrix& inputs,
                          const Vector& z0) {
  if (inputs.rows() != pe.n_inputs())
    throw std::invalid_argument("pod_run: input row count mismatch");
  if (z0.size() != pe.size() || !z0.allFinite())
    throw std::invalid_argument("pod_run: bad initial state");
  const Index k_steps = inputs.cols();
  if (k_steps < 1) throw std::invalid_argument("pod_run: need at least 1 step");

  ReducedTrajectory traj;
  traj.states.resize(pe.size(), k_steps);
  traj.outputs.resize(pe.n_outputs(), k_steps);

  Vector z = z0;
  Vector next(pe.size());
  Vector scratch(pe.full_size());
  for (Index k = 0; k < k_steps; ++k) {
    kernels::step_pod(pe.w_rr_t, pe.w_ir, pe.w_br, pe.tt, pe.gamma, z,
                      inputs.col(k), scratch, next, /*parallel=*/true);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceLimit)
      throw DivergenceError(k, "pod_run: state diverged at step " +
                                   std::to_string(k));
    z = next;
    traj.states.col(k) = z;
    traj.outputs.col(k).noalias() = pe.w_ro_t * z;
  }
  return traj;
}

}  // namespace esnmor

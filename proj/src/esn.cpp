#include "esnmor/esn.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "esnmor/kernels.hpp"
#include "esnmor/rng.hpp"

namespace esnmor {

void HyperParams::validate() const {
  if (reservoir_size < 1)
    throw std::invalid_argument("reservoir_size must be >= 1");
  if (!(leak_rate > 0.0 && leak_rate <= 1.0))
    throw std::invalid_argument("leak_rate must be in (0, 1]");
  if (!(spectral_radius > 0.0))
    throw std::invalid_argument("spectral_radius must be > 0");
  if (n_inputs < 1) throw std::invalid_argument("n_inputs must be >= 1");
  if (n_outputs < 1) throw std::invalid_argument("n_outputs must be >= 1");
  if (!std::isfinite(input_scaling) || !std::isfinite(bias_scaling))
    throw std::invalid_argument("scaling factors must be finite");
}

namespace {

void require_square_finite(const Matrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("spectral_radius: matrix must be square");
  if (!m.allFinite())
    throw std::invalid_argument("spectral_radius: matrix must be finite");
}

double spectral_radius_dense(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

// Estimates |lambda_max| from three consecutive power iterates by fitting the
// two-term recurrence x[k+1] = alpha x[k] + beta x[k-1] in least squares and
// taking the larger root modulus of t^2 = alpha t + beta. A real dominant
// eigenvalue is the degenerate case beta ~ 0.
double two_step_estimate(const Vector& xm1, const Vector& x0,
                         const Vector& x1) {
  Matrix basis(x0.size(), 2);
  basis.col(0) = x0;
  basis.col(1) = xm1;
  Eigen::Vector2d coef =
      basis.colPivHouseholderQr().solve(x1);
  const std::complex<double> disc =
      std::sqrt(std::complex<double>(coef[0] * coef[0] + 4.0 * coef[1], 0.0));
  const std::complex<double> r1 = (coef[0] + disc) / 2.0;
  const std::complex<double> r2 = (coef[0] - disc) / 2.0;
  return std::max(std::abs(r1), std::abs(r2));
}

double power_radius_once(const Matrix& m, double tol, int max_iters) {
  const Index n = m.rows();
  Rng rng(0x9e3779b97f4a7c15ull);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x[i] = rng.normal();
  x.normalize();

  Vector prev = x;
  Vector cur = m * x;
  double estimate = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector next = m * cur;
    const double norm = cur.norm();
    if (norm == 0.0) return 0.0;
    const double candidate =
        two_step_estimate(prev / norm, cur / norm, next / norm);
    if (std::abs(candidate - estimate) <= tol * std::max(1.0, candidate)) {
      return candidate;
    }
    estimate = candidate;
    prev = cur / norm;
    cur = next / norm;
  }
  return estimate;
}

}  // namespace

double spectral_radius_power(const Matrix& m, double tol, int max_iters) {
  require_square_finite(m);
  // A shifted copy breaks ties between eigenvalues of equal modulus and
  // opposite sign; map the shifted estimate back and keep the larger.
  const double direct = power_radius_once(m, tol, max_iters);
  const double shift = 0.5 * std::max(direct, 1e-3);
  Matrix shifted = m;
  shifted.diagonal().array() += shift;
  const double shifted_back = power_radius_once(shifted, tol, max_iters) - shift;
  return std::max(direct, shifted_back);
}

double spectral_radius(const Matrix& m) {
  require_square_finite(m);
  if (m.rows() <= kDenseSpectralRadiusLimit) return spectral_radius_dense(m);
  return spectral_radius_power(m);
}

EchoStateNetwork generate_esn(const HyperParams& hp) {
  hp.validate();
  const Index n = hp.reservoir_size;
  Rng rng(hp.seed);

  EchoStateNetwork esn;
  esn.hyper = hp;
  esn.w_rr.resize(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) esn.w_rr(i, j) = rng.normal();
  esn.w_ir.resize(n, hp.n_inputs);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < hp.n_inputs; ++j) esn.w_ir(i, j) = rng.normal();
  esn.w_br.resize(n);
  for (Index i = 0; i < n; ++i) esn.w_br[i] = rng.normal();

  const double raw_radius = spectral_radius(esn.w_rr);
  if (raw_radius <= 0.0)
    throw std::runtime_error("generate_esn: raw reservoir has zero spectral radius");
  esn.w_rr *= hp.spectral_radius / raw_radius;
  esn.w_ir *= hp.input_scaling;
  esn.w_br *= hp.bias_scaling;
  esn.w_ro = RowMatrix::Zero(hp.n_outputs, n);
  return esn;
}

Vector esn_step(const EchoStateNetwork& esn, const Vector& x, const Vector& u) {
  if (x.size() != esn.size() || u.size() != esn.hyper.n_inputs)
    throw std::invalid_argument("esn_step: dimension mismatch");
  Vector out(esn.size());
  kernels::step_full(esn.w_rr, esn.w_ir, esn.w_br, esn.hyper.leak_rate, x, u,
                     out, /*parallel=*/true);
  return out;
}

Vector readout(const EchoStateNetwork& esn, const Vector& x) {
  if (x.size() != esn.size())
    throw std::invalid_argument("readout: dimension mismatch");
  return esn.w_ro * x;
}

StateTrajectory esn_run(const EchoStateNetwork& esn, const Matrix& inputs,
                        const Vector& x0) {
  if (inputs.rows() != esn.hyper.n_inputs)
    throw std::invalid_argument("esn_run: input row count mismatch");
  if (x0.size() != esn.size() || !x0.allFinite())
    throw std::invalid_argument("esn_run: bad initial state");
  const Index k_steps = inputs.cols();
  if (k_steps < 1) throw std::invalid_argument("esn_run: need at least 1 step");

  StateTrajectory traj;
  traj.inputs = inputs;
  traj.states.resize(esn.size(), k_steps);
  traj.outputs.resize(esn.hyper.n_outputs, k_steps);

  Vector x = x0;
  Vector next(esn.size());
  for (Index k = 0; k < k_steps; ++k) {
    kernels::step_full(esn.w_rr, esn.w_ir, esn.w_br, esn.hyper.leak_rate, x,
                       inputs.col(k), next, /*parallel=*/true);
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kDivergenceLimit)
      throw DivergenceError(k, "esn_run: state diverged at step " +
                                   std::to_string(k));
    x = next;
    traj.states.col(k) = x;
    traj.outputs.col(k).noalias() = esn.w_ro * x;
  }
  return traj;
}

}  // namespace esnmor

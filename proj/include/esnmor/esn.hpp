#pragma once

#include <cstdint>

#include "esnmor/types.hpp"

namespace esnmor {

struct HyperParams {
  Index reservoir_size = 0;
  double leak_rate = 1.0;        // gamma in (0, 1]
  double spectral_radius = 0.0;  // rho > 0
  double input_scaling = 0.0;
  double bias_scaling = 0.0;
  Index n_inputs = 1;
  Index n_outputs = 1;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on any violated bound.
  void validate() const;
};

// Full-order network. Immutable in practice: training replaces w_ro on a
// copy, simulation never writes. There is no output-feedback term.
struct EchoStateNetwork {
  RowMatrix w_rr;  // N x N
  RowMatrix w_ir;  // N x n_inputs
  Vector w_br;     // N
  RowMatrix w_ro;  // n_outputs x N, zero until trained
  HyperParams hyper;

  Index size() const { return w_rr.rows(); }
};

struct StateTrajectory {
  Matrix states;   // N x K, column k = x[k]
  Matrix inputs;   // n_inputs x K
  Matrix outputs;  // n_outputs x K

  Index steps() const { return states.cols(); }
};

// Largest eigenvalue modulus. Dense eigendecomposition up to
// kDenseSpectralRadiusLimit rows, power iteration beyond.
inline constexpr Index kDenseSpectralRadiusLimit = 2000;
double spectral_radius(const Matrix& m);
// Power-iteration path, exposed for testing. Handles a complex dominant pair
// through a two-step Rayleigh estimate and cross-checks on a shifted copy.
double spectral_radius_power(const Matrix& m, double tol = 1e-10,
                             int max_iters = 10000);

// Three-step random initialization: every weight i.i.d. standard normal
// (draw order: w_rr row-major, then w_ir, then w_br), w_rr rescaled to the
// requested spectral radius, w_ir and w_br multiplied by their scalings.
EchoStateNetwork generate_esn(const HyperParams& hp);

// One application of the leaky-tanh update.
Vector esn_step(const EchoStateNetwork& esn, const Vector& x, const Vector& u);

// Readout y = w_ro * x.
Vector readout(const EchoStateNetwork& esn, const Vector& x);

// Iterates esn_step over the columns of `inputs`, recording states and
// readouts. Throws DivergenceError when a state goes non-finite or beyond
// kDivergenceLimit.
StateTrajectory esn_run(const EchoStateNetwork& esn, const Matrix& inputs,
                        const Vector& x0);

}  // namespace esnmor

#pragma once

#include "esnmor/esn.hpp"
#include "esnmor/types.hpp"

namespace esnmor {

// Thin SVD of a snapshot matrix; right singular vectors are discarded.
struct PodBasis {
  Matrix u_svd;   // n x r, left singular vectors
  Vector sigma;   // r, descending
  Vector energy;  // r, sigma_j / sum(sigma)

  Index rank() const { return sigma.size(); }
};

// POD-reduced network. Keeps the lift-then-reduce structure: the tanh is
// evaluated in the full n-dimensional space every step.
struct PodEsn {
  RowMatrix t;        // n x m truncated basis
  RowMatrix tt;       // m x n (t transposed, stepping layout)
  RowMatrix w_rr_t;   // n x m, precomposed W_rr * T
  RowMatrix w_ir;     // n x n_inputs
  Vector w_br;        // n
  RowMatrix w_ro_t;   // n_outputs x m, precomposed W_ro * T
  Vector sigma;       // singular values of the source basis (diagnostics)
  double gamma = 1.0;
  double energy_kept = 1.0;

  Index full_size() const { return t.rows(); }
  Index size() const { return t.cols(); }
  Index n_inputs() const { return w_ir.cols(); }
  Index n_outputs() const { return w_ro_t.rows(); }
};

struct ReducedTrajectory {
  Matrix states;   // m x K
  Matrix outputs;  // n_outputs x K
};

PodBasis svd_snapshots(const Matrix& snapshots);

// Smallest m whose cumulative energy reaches 1 - cutoff; cutoff 0 keeps all
// r columns. Returns the first m columns of the basis.
Index energy_truncate_count(const PodBasis& basis, double cutoff);
Matrix energy_truncate(const PodBasis& basis, double cutoff);

// Builds the reduced model from an orthonormal basis T (deviation from
// orthonormality beyond 1e-8 is rejected).
PodEsn pod_reduce(const EchoStateNetwork& esn, const Matrix& t);

// Truncates `basis` at `cutoff` and reduces, recording sigma and the kept
// energy on the result.
PodEsn pod_reduce(const EchoStateNetwork& esn, const PodBasis& basis,
                  double cutoff);

Vector pod_step(const PodEsn& pe, const Vector& z, const Vector& u);
ReducedTrajectory pod_run(const PodEsn& pe, const Matrix& inputs,
                          const Vector& z0);

}  // namespace esnmor

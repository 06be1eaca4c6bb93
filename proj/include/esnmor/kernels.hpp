#pragma once

#include "esnmor/types.hpp"

// Hot per-step kernels. Each has an OpenMP-parallel version (over output rows,
// serial accumulation within a row, so results are identical for any thread
// count) and a plain serial reference used by the tests and the benchmark.
//
// All matrices are row-major so a row dot product is a contiguous scan.

namespace esnmor::kernels {

// out = A * x
void matvec(const RowMatrix& a, const Vector& x, Vector& out, bool parallel);
void matvec_ref(const RowMatrix& a, const Vector& x, Vector& out);

// Full ESN update: out = (1-gamma)*x + gamma*tanh(W*x + Wi*u + b).
void step_full(const RowMatrix& w, const RowMatrix& wi, const Vector& b,
               double gamma, const Vector& x, const Vector& u, Vector& out,
               bool parallel);
void step_full_ref(const RowMatrix& w, const RowMatrix& wi, const Vector& b,
                   double gamma, const Vector& x, const Vector& u, Vector& out);

// POD-reduced update: out = (1-gamma)*z + gamma * Tt * tanh(WrrT*z + Wi*u + b).
// scratch must have WrrT.rows() entries.
void step_pod(const RowMatrix& wrr_t, const RowMatrix& wi, const Vector& b,
              const RowMatrix& tt, double gamma, const Vector& z,
              const Vector& u, Vector& scratch, Vector& out, bool parallel);
void step_pod_ref(const RowMatrix& wrr_t, const RowMatrix& wi, const Vector& b,
                  const RowMatrix& tt, double gamma, const Vector& z,
                  const Vector& u, Vector& scratch, Vector& out);

// DEIM update: out = (1-gamma)*z + gamma * lift * tanh(Wp*z + Wip*u + bp).
// Wp, Wip, bp are the pivot-row gathers; scratch holds m_d entries.
void step_deim(const RowMatrix& wp, const RowMatrix& wip, const Vector& bp,
               const RowMatrix& lift, double gamma, const Vector& z,
               const Vector& u, Vector& scratch, Vector& out, bool parallel);
void step_deim_ref(const RowMatrix& wp, const RowMatrix& wip, const Vector& bp,
                   const RowMatrix& lift, double gamma, const Vector& z,
                   const Vector& u, Vector& scratch, Vector& out);

}  // namespace esnmor::kernels

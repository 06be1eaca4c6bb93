#include "esnmor/kernels.hpp"

#include <cmath>

namespace esnmor::kernels {

namespace {

// Row dot product as an explicit left-to-right scalar loop. Both the parallel
// and the reference kernels funnel through this, so they agree bitwise.
inline double row_dot(const RowMatrix& a, Index row, const Vector& x) {
  const double* p = a.data() + row * a.cols();
  double acc = 0.0;
  for (Index j = 0; j < a.cols(); ++j) acc += p[j] * x[j];
  return acc;
}

inline double preactivation(const RowMatrix& w, const RowMatrix& wi,
                            const Vector& b, Index row, const Vector& x,
                            const Vector& u) {
  return row_dot(w, row, x) + row_dot(wi, row, u) + b[row];
}

}  // namespace

void matvec(const RowMatrix& a, const Vector& x, Vector& out, bool parallel) {
  const Index n = a.rows();
#pragma omp parallel for if (parallel) schedule(static)
  for (Index i = 0; i < n; ++i) out[i] = row_dot(a, i, x);
}

void matvec_ref(const RowMatrix& a, const Vector& x, Vector& out) {
  for (Index i = 0; i < a.rows(); ++i) out[i] = row_dot(a, i, x);
}

void step_full(const RowMatrix& w, const RowMatrix& wi, const Vector& b,
               double gamma, const Vector& x, const Vector& u, Vector& out,
               bool parallel) {
  const Index n = w.rows();
#pragma omp parallel for if (parallel) schedule(static)
  for (Index i = 0; i < n; ++i) {
    out[i] = (1.0 - gamma) * x[i] +
             gamma * std::tanh(preactivation(w, wi, b, i, x, u));
  }
}

void step_full_ref(const RowMatrix& w, const RowMatrix& wi, const Vector& b,
                   double gamma, const Vector& x, const Vector& u,
                   Vector& out) {
  for (Index i = 0; i < w.rows(); ++i) {
    out[i] = (1.0 - gamma) * x[i] +
             gamma * std::tanh(preactivation(w, wi, b, i, x, u));
  }
}

void step_pod(const RowMatrix& wrr_t, const RowMatrix& wi, const Vector& b,
              const RowMatrix& tt, double gamma, const Vector& z,
              const Vector& u, Vector& scratch, Vector& out, bool parallel) {
  const Index n = wrr_t.rows();
  const Index m = tt.rows();
#pragma omp parallel for if (parallel) schedule(static)
  for (Index i = 0; i < n; ++i)
    scratch[i] = std::tanh(preactivation(wrr_t, wi, b, i, z, u));
#pragma omp parallel for if (parallel) schedule(static)
  for (Index i = 0; i < m; ++i)
    out[i] = (1.0 - gamma) * z[i] + gamma * row_dot(tt, i, scratch);
}

void step_pod_ref(const RowMatrix& wrr_t, const RowMatrix& wi, const Vector& b,
                  const RowMatrix& tt, double gamma, const Vector& z,
                  const Vector& u, Vector& scratch, Vector& out) {
  for (Index i = 0; i < wrr_t.rows(); ++i)
    scratch[i] = std::tanh(preactivation(wrr_t, wi, b, i, z, u));
  for (Index i = 0; i < tt.rows(); ++i)
    out[i] = (1.0 - gamma) * z[i] + gamma * row_dot(tt, i, scratch);
}

void step_deim(const RowMatrix& wp, const RowMatrix& wip, const Vector& bp,
               const RowMatrix& lift, double gamma, const Vector& z,
               const Vector& u, Vector& scratch, Vector& out, bool parallel) {
  const Index md = wp.rows();
  const Index m = lift.rows();
#pragma omp parallel for if (parallel) schedule(static)
  for (Index i = 0; i < md; ++i)
    scratch[i] = std::tanh(preactivation(wp, wip, bp, i, z, u));
#pragma omp parallel for if (parallel) schedule(static)
  for (Index i = 0; i < m; ++i)
    out[i] = (1.0 - gamma) * z[i] + gamma * row_dot(lift, i, scratch);
}

void step_deim_ref(const RowMatrix& wp, const RowMatrix& wip, const Vector& bp,
                   const RowMatrix& lift, double gamma, const Vector& z,
                   const Vector& u, Vector& scratch, Vector& out) {
  for (Index i = 0; i < wp.rows(); ++i)
    scratch[i] = std::tanh(preactivation(wp, wip, bp, i, z, u));
  for (Index i = 0; i < lift.rows(); ++i)
    out[i] = (1.0 - gamma) * z[i] + gamma * row_dot(lift, i, scratch);
}

}  // namespace esnmor::kernels

// Benchmarks the OpenMP-parallel step kernels against their serial reference
// implementations and checks that the outputs stay bitwise identical. Usage:
//   bench-kernels [N] [m] [m_d] [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <omp.h>

#include <esnmor/kernels.hpp>
#include <esnmor/rng.hpp>

using namespace esnmor;

namespace {

RowMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  RowMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal() / std::sqrt(cols);
  return m;
}

Vector random_vector(Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

template <typename Fn>
double time_ms(Index reps, Fn&& fn) {
  fn();  // warm caches
  const auto t0 = std::chrono::steady_clock::now();
  for (Index r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
             .count() /
         double(reps);
}

void row(const char* name, double ref_ms, double par_ms, bool identical) {
  std::printf("%-10s %12.4f %12.4f %8.2fx   %s\n", name, ref_ms, par_ms,
              ref_ms / par_ms, identical ? "bitwise-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const Index n = argc > 1 ? std::atol(argv[1]) : 1400;
  const Index m = argc > 2 ? std::atol(argv[2]) : 66;
  const Index m_d = argc > 3 ? std::atol(argv[3]) : 32;
  const Index reps = argc > 4 ? std::atol(argv[4]) : 200;

  Rng rng(12345);
  const RowMatrix w = random_matrix(rng, n, n);
  const RowMatrix wi = random_matrix(rng, n, 1);
  const Vector b = random_vector(rng, n);
  const RowMatrix wrr_t = random_matrix(rng, n, m);
  const RowMatrix tt = random_matrix(rng, m, n);
  const RowMatrix wp = random_matrix(rng, m_d, m);
  const RowMatrix wip = random_matrix(rng, m_d, 1);
  const Vector bp = random_vector(rng, m_d);
  const RowMatrix lift = random_matrix(rng, m, m_d);
  const Vector x = random_vector(rng, n);
  const Vector z = random_vector(rng, m);
  const Vector u = random_vector(rng, 1);
  const double gamma = 0.7;

  std::printf("kernel benchmark: N=%ld m=%ld m_d=%ld reps=%ld threads=%d\n",
              (long)n, (long)m, (long)m_d, (long)reps, omp_get_max_threads());
  std::printf("%-10s %12s %12s %9s\n", "kernel", "serial ms", "openmp ms",
              "speedup");

  Vector out_ref(n), out_par(n);
  double ref = time_ms(reps, [&] { kernels::matvec_ref(w, x, out_ref); });
  double par =
      time_ms(reps, [&] { kernels::matvec(w, x, out_par, true); });
  row("matvec", ref, par, out_ref == out_par);

  ref = time_ms(reps,
                [&] { kernels::step_full_ref(w, wi, b, gamma, x, u, out_ref); });
  par = time_ms(
      reps, [&] { kernels::step_full(w, wi, b, gamma, x, u, out_par, true); });
  row("step_full", ref, par, out_ref == out_par);

  Vector scratch(n), zr(m), zp(m);
  ref = time_ms(reps, [&] {
    kernels::step_pod_ref(wrr_t, wi, b, tt, gamma, z, u, scratch, zr);
  });
  par = time_ms(reps, [&] {
    kernels::step_pod(wrr_t, wi, b, tt, gamma, z, u, scratch, zp, true);
  });
  row("step_pod", ref, par, zr == zp);

  Vector scratch_d(m_d);
  ref = time_ms(reps, [&] {
    kernels::step_deim_ref(wp, wip, bp, lift, gamma, z, u, scratch_d, zr);
  });
  par = time_ms(reps, [&] {
    kernels::step_deim(wp, wip, bp, lift, gamma, z, u, scratch_d, zp, true);
  });
  row("step_deim", ref, par, zr == zp);

  return 0;
}

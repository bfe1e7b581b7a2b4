// OpenMP kernels and the serial/parallel dispatch. Reductions accumulate into
// per-thread slots and are combined in thread order, so a run with a fixed
// thread count is bit-reproducible.
#include "sing/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sing::kernels {

namespace {
Exec g_default = Exec::parallel;

inline bool go_parallel(Exec how, std::ptrdiff_t n) {
#ifdef _OPENMP
  return how == Exec::parallel && n >= kParallelGrainSize;
#else
  (void)how;
  (void)n;
  return false;
#endif
}
}  // namespace

Exec default_exec() { return g_default; }
void set_default_exec(Exec e) { g_default = e; }

bool openmp_compiled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

void edge_fluxes(const Geometry& g, const double* u, double m, double sigma,
                 double* out, Exec how) {
  const int ne = g.n_edges();
  if (!go_parallel(how, ne)) return edge_fluxes_serial(g, u, m, sigma, out);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    const double du = (u[e + 1] - u[e]) / g.edge_len[e];
    out[e] = g.edge_weight[e] * flux(du, m, sigma);
  }
#endif
}

void minus_div(const Geometry& g, const double* fluxes, double* out, Exec how) {
  const int n = g.n_interior();
  if (!go_parallel(how, n)) return minus_div_serial(g, fluxes, out);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    const double f_hi = fluxes[i];
    const double f_lo = (i == 0) ? -fluxes[0] : fluxes[i - 1];
    out[i] = (f_lo - f_hi) / g.dual_measure[i];
  }
#endif
}

void minus_mlap(const Geometry& g, const double* u, double m, double sigma,
                double* out, std::vector<double>& edge_scratch, Exec how) {
  edge_scratch.resize(g.n_edges());
  edge_fluxes(g, u, m, sigma, edge_scratch.data(), how);
  minus_div(g, edge_scratch.data(), out, how);
}

void newton_rows(const Geometry& g, const double* u, double m, double sigma,
                 const double* weight, double p,
                 double* resid, double* lower, double* diag, double* upper,
                 std::vector<double>& edge_scratch, Exec how) {
  const int ne = g.n_edges();
  if (!go_parallel(how, ne))
    return newton_rows_serial(g, u, m, sigma, weight, p, resid, lower, diag, upper,
                              edge_scratch);
#ifdef _OPENMP
  edge_scratch.resize(2 * ne);
  double* f = edge_scratch.data();
  double* fp = f + ne;
#pragma omp parallel for schedule(static)
  for (int e = 0; e < ne; ++e) {
    const double du = (u[e + 1] - u[e]) / g.edge_len[e];
    f[e] = g.edge_weight[e] * flux(du, m, sigma);
    fp[e] = g.edge_weight[e] * flux_deriv(du, m, sigma) / g.edge_len[e];
  }
#pragma omp parallel for schedule(static)
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    const double W = g.dual_measure[i];
    const bool mirror = (i == 0);
    const double f_hi = f[i];
    const double f_lo = mirror ? -f[0] : f[i - 1];
    const double fp_hi = fp[i];
    const double fp_lo = mirror ? fp[0] : fp[i - 1];
    double rhs, drhs;
    if (p == 0.0) {
      rhs = weight[i];
      drhs = 0.0;
    } else {
      const double up = std::pow(u[i], -p);
      rhs = weight[i] * up;
      drhs = -p * weight[i] * up / u[i];
    }
    resid[i] = (f_lo - f_hi) / W - rhs;
    lower[i] = mirror ? 0.0 : -fp_lo / W;
    upper[i] = (mirror ? -2.0 * fp_hi : -fp_hi) / W;
    diag[i] = (mirror ? 2.0 * fp_hi : fp_lo + fp_hi) / W - drhs;
  }
#endif
}

double sup_abs(const double* x, int begin, int end, Exec how) {
  if (!go_parallel(how, end - begin)) return sup_abs_serial(x, begin, end);
  double s = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : s)
  for (int i = begin; i < end; ++i) s = std::max(s, std::fabs(x[i]));
#endif
  return s;
}

double sup_diff(const double* a, const double* b, int begin, int end, Exec how) {
  if (!go_parallel(how, end - begin)) return sup_diff_serial(a, b, begin, end);
  double s = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : s)
  for (int i = begin; i < end; ++i) s = std::max(s, std::fabs(a[i] - b[i]));
#endif
  return s;
}

double sup_ratio(const double* a, const double* b, int begin, int end, Exec how) {
  if (!go_parallel(how, end - begin)) return sup_ratio_serial(a, b, begin, end);
  double s = -HUGE_VAL;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) reduction(max : s)
  for (int i = begin; i < end; ++i) s = std::max(s, a[i] / b[i]);
#endif
  return s;
}

#ifdef _OPENMP
namespace {
// Deterministic chunked sum: per-thread partials combined in thread order.
template <typename Body>
double ordered_sum(int begin, int end, Body body) {
  const int nt = omp_get_max_threads();
  std::vector<double> partial(static_cast<size_t>(nt), 0.0);
#pragma omp parallel
  {
    const int t = omp_get_thread_num();
    double local = 0.0;
#pragma omp for schedule(static) nowait
    for (int i = begin; i < end; ++i) local += body(i);
    partial[static_cast<size_t>(t)] = local;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}
}  // namespace
#endif

double edge_pow_sum(const Geometry& g, const double* u, double tau, Exec how) {
  const int ne = g.n_edges();
  if (!go_parallel(how, ne)) return edge_pow_sum_serial(g, u, tau);
#ifdef _OPENMP
  return ordered_sum(0, ne, [&](int e) {
    const double du = std::fabs(u[e + 1] - u[e]) / g.edge_len[e];
    return std::pow(du, tau) * g.edge_weight[e] * g.edge_len[e];
  });
#else
  return 0.0;
#endif
}

double delta_pow_sum(const Geometry& g, const double* delta, double a, Exec how) {
  if (!go_parallel(how, g.n_interior())) return delta_pow_sum_serial(g, delta, a);
#ifdef _OPENMP
  return ordered_sum(g.first_interior, g.last_interior + 1, [&](int i) {
    return std::pow(delta[i], -a) * g.dual_measure[i];
  });
#else
  return 0.0;
#endif
}

}  // namespace sing::kernels

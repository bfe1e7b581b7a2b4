// Serial reference kernels. These are the ground truth the OpenMP variants
// are tested against.
#include "sing/kernels.hpp"

#include <cassert>

namespace sing::kernels {

void edge_fluxes_serial(const Geometry& g, const double* u, double m, double sigma,
                        double* out) {
  const int ne = g.n_edges();
  for (int e = 0; e < ne; ++e) {
    const double du = (u[e + 1] - u[e]) / g.edge_len[e];
    out[e] = g.edge_weight[e] * flux(du, m, sigma);
  }
}

void minus_div_serial(const Geometry& g, const double* fluxes, double* out) {
  for (int i = g.first_interior; i <= g.last_interior; ++i) {
    const double f_hi = fluxes[i];
    const double f_lo = (i == 0) ? -fluxes[0] : fluxes[i - 1];  // mirror at rho=0
    out[i] = (f_lo - f_hi) / g.dual_measure[i];
  }
}

void newton_rows_serial(const Geometry& g, const double* u, double m, double sigma,
                        const double* weight, double p,
                        double* resid, double* lower, double* diag, double* upper,
                        std::vector<double>& edge_scratch) {
  const int ne = g.n_edges();
  edge_scratch.resize(2 * ne);
  double* f = edge_scratch.data();
  double* fp = f + ne;  // d(flux)/d(du) * w / h, ready for the chain rule
  for (int e = 0; e < ne; ++e) {
    const double du = (u[e + 1] - u[e]) / g.edge_len[e];
    f[e] = g.edge_weight[e] * flux(du, m, sigma);
    fp[e] = g.edge_weight[e] * flux_deriv(du, m, sigma) / g.edge_len[e];
  }
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
    // mirror node: resid = -2 f_hi / W - rhs, both stencil legs hit edge 0
    lower[i] = mirror ? 0.0 : -fp_lo / W;
    upper[i] = (mirror ? -2.0 * fp_hi : -fp_hi) / W;
    diag[i] = (mirror ? 2.0 * fp_hi : fp_lo + fp_hi) / W - drhs;
  }
}

double sup_abs_serial(const double* x, int begin, int end) {
  double s = 0.0;
  for (int i = begin; i < end; ++i) s = std::max(s, std::fabs(x[i]));
  return s;
}

double sup_diff_serial(const double* a, const double* b, int begin, int end) {
  double s = 0.0;
  for (int i = begin; i < end; ++i) s = std::max(s, std::fabs(a[i] - b[i]));
  return s;
}

double sup_ratio_serial(const double* a, const double* b, int begin, int end) {
  double s = -HUGE_VAL;
  for (int i = begin; i < end; ++i) s = std::max(s, a[i] / b[i]);
  return s;
}

double edge_pow_sum_serial(const Geometry& g, const double* u, double tau) {
  double s = 0.0;
  const int ne = g.n_edges();
  for (int e = 0; e < ne; ++e) {
    const double du = std::fabs(u[e + 1] - u[e]) / g.edge_len[e];
    s += std::pow(du, tau) * g.edge_weight[e] * g.edge_len[e];
  }
  return s;
}

double delta_pow_sum_serial(const Geometry& g, const double* delta, double a) {
  double s = 0.0;
  for (int i = g.first_interior; i <= g.last_interior; ++i)
    s += std::pow(delta[i], -a) * g.dual_measure[i];
  return s;
}

void thomas_solve(const Geometry& g, const double* lower, const double* diag,
                  const double* upper, const double* rhs, double* x) {
  const int lo = g.first_interior, hi = g.last_interior;
  const int n = hi - lo + 1;
  assert(n >= 1);
  static thread_local std::vector<double> cp, dp;
  cp.resize(n);
  dp.resize(n);
  cp[0] = upper[lo] / diag[lo];
  dp[0] = rhs[lo] / diag[lo];
  for (int k = 1; k < n; ++k) {
    const int i = lo + k;
    const double den = diag[i] - lower[i] * cp[k - 1];
    cp[k] = upper[i] / den;
    dp[k] = (rhs[i] - lower[i] * dp[k - 1]) / den;
  }
  x[hi] = dp[n - 1];
  for (int k = n - 2; k >= 0; --k) x[lo + k] = dp[k] - cp[k] * x[lo + k + 1];
}

}  // namespace sing::kernels

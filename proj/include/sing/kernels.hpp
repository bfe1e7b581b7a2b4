// Low-level nodewise kernels for the 1-D / radial finite-volume m-Laplacian.
//
// Every kernel exists in two variants: a plain serial reference (suffix
// _serial) and an OpenMP-parallel one. The dispatching entry points pick the
// parallel path when OpenMP is compiled in, the execution mode is `parallel`
// and the loop is long enough to amortize the fork. Sum reductions are chunked
// per thread and combined in thread order, so results are reproducible for a
// fixed thread count.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace sing::kernels {

enum class Exec { serial, parallel };

Exec default_exec();
void set_default_exec(Exec e);
bool openmp_compiled();

// Loops shorter than this always run serially.
inline constexpr std::ptrdiff_t kParallelGrainSize = 4096;

// Mesh geometry seen by the operator. Edge e joins nodes e and e+1.
// Interior (unknown) nodes are [first_interior, last_interior]. For the
// radial ball the center node 0 is an unknown with a mirror flux below it
// and dual_measure[0] spans the mirrored half cell.
struct Geometry {
  std::vector<double> edge_len;      // h_{e+1/2}
  std::vector<double> edge_weight;   // rho_mid^{N-1}; all 1 on the interval
  std::vector<double> dual_measure;  // integral of the radial weight over the dual cell
  int first_interior = 1;
  int last_interior = 0;
  bool mirrored_origin = false;

  int n_nodes() const { return static_cast<int>(edge_len.size()) + 1; }
  int n_edges() const { return static_cast<int>(edge_len.size()); }
  int n_interior() const { return last_interior - first_interior + 1; }
};

// Regularized flux F(g) = (g^2 + sigma^2)^{(m-2)/2} g and its derivative.
// sigma = 0 gives the exact degenerate/singular flux |g|^{m-2} g.
inline double flux(double g, double m, double sigma) {
  if (m == 2.0) return g;
  if (sigma == 0.0) {
    if (g == 0.0) return 0.0;
    return std::pow(std::fabs(g), m - 2.0) * g;
  }
  return std::pow(g * g + sigma * sigma, 0.5 * (m - 2.0)) * g;
}

inline double flux_deriv(double g, double m, double sigma) {
  if (m == 2.0) return 1.0;
  if (sigma == 0.0) {
    // floor |g| so the singular branch (m<2) stays finite at g = 0
    const double a = std::max(std::fabs(g), 1e-100);
    return (m - 1.0) * std::pow(a, m - 2.0);
  }
  const double s2 = g * g + sigma * sigma;
  return std::pow(s2, 0.5 * (m - 4.0)) * ((m - 1.0) * g * g + sigma * sigma);
}

// Edge fluxes w_e * F((u[e+1]-u[e])/h_e); `out` has n_edges entries.
void edge_fluxes(const Geometry& g, const double* u, double m, double sigma,
                 double* out, Exec how);
void edge_fluxes_serial(const Geometry& g, const double* u, double m, double sigma,
                        double* out);

// out[i] = -Delta_m u at interior node i, reading precomputed edge fluxes.
// Boundary entries of `out` are left untouched.
void minus_div(const Geometry& g, const double* fluxes, double* out, Exec how);
void minus_div_serial(const Geometry& g, const double* fluxes, double* out);

// Convenience wrapper: edge_fluxes + minus_div using caller scratch.
void minus_mlap(const Geometry& g, const double* u, double m, double sigma,
                double* out, std::vector<double>& edge_scratch, Exec how);

// Residual and tridiagonal Jacobian rows of
//   R_i(u) = (-Delta_m^sigma u)_i - rhs_i(u_i),
// where rhs_i(t) = weight_i * t^{-p} (weight_i = K_i, possibly of any sign
// when p = 0). Arrays are indexed by node; only interior entries are written.
void newton_rows(const Geometry& g, const double* u, double m, double sigma,
                 const double* weight, double p,
                 double* resid, double* lower, double* diag, double* upper,
                 std::vector<double>& edge_scratch, Exec how);
void newton_rows_serial(const Geometry& g, const double* u, double m, double sigma,
                        const double* weight, double p,
                        double* resid, double* lower, double* diag, double* upper,
                        std::vector<double>& edge_scratch);

// max_i |x_i| over [begin, end)
double sup_abs(const double* x, int begin, int end, Exec how);
double sup_abs_serial(const double* x, int begin, int end);

// max_i |a_i - b_i|
double sup_diff(const double* a, const double* b, int begin, int end, Exec how);
double sup_diff_serial(const double* a, const double* b, int begin, int end);

// max_i a_i / b_i  (caller guarantees b > 0 on the range)
double sup_ratio(const double* a, const double* b, int begin, int end, Exec how);
double sup_ratio_serial(const double* a, const double* b, int begin, int end);

// sum over edges of |Du_e|^tau * w_e * h_e  (the discrete grad-energy integral)
double edge_pow_sum(const Geometry& g, const double* u, double tau, Exec how);
double edge_pow_sum_serial(const Geometry& g, const double* u, double tau);

// sum over interior nodes of f(delta_i) * W_i with f = delta^{-a}
double delta_pow_sum(const Geometry& g, const double* delta, double a, Exec how);
double delta_pow_sum_serial(const Geometry& g, const double* delta, double a);

// In-place Thomas solve of the tridiagonal system over interior nodes.
// lower/diag/upper/rhs are node-indexed; entries outside the interior range
// are ignored. Always serial.
void thomas_solve(const Geometry& g, const double* lower, const double* diag,
                  const double* upper, const double* rhs, double* x);

}  // namespace sing::kernels

#pragma once

// The oscillatory-integral side: the function Phi(q, lambda) as a residue
// series and as a Mellin-Barnes integral G on a vertical line, its local
// behaviour at lambda = u(q), the Mellin pair J <-> Gamma^(n-1), and the
// Laplace transform identity.

#include "gm/numerics.hpp"

namespace gm {

// u(q) = (n-1) q^(1/(n-1)), q > 0
double critical_value(int n, double q);

// (dx/x) q^-x Gamma(x)^(n-1) lambda^(a(x)) / Gamma(a(x)+1) with
// a(x) = -n/2 + (n-1)x + m - 1/2
Cx mb_integrand(int n, double q, int m, double log_lambda, Cx x);

// (2pi)^((1-n)/2) 2 pi i sum_{d=0}^{D} Res_{x=-d}
Cx phi_residue_series(int n, double q, int m, const BranchState& lambda, int D);
// keeps adding residues until three in a row are below 1e-16 of the sum
Cx phi_residue_series(int n, double q, int m, const BranchState& lambda);

struct MBConfig {
  double epsilon = 0.5;
  double T = 0;               // 0: grow until the tail bound is below tol/10
  double quadrature_step = 0.5;
  int nodes_per_panel = 16;
  double tol = 1e-9;
  double max_T = 2e5;
};

struct MBResult {
  Cx value;
  double T = 0;
  double tail_bound = 0;
  long evaluations = 0;
};

// Requires real lambda > 0; the vertical line integral diverges otherwise.
MBResult phi_mellin_barnes(int n, double q, int m, double lambda, const MBConfig& cfg = {});

struct ExponentFit {
  double exponent = 0;
  double r_squared = 0;
  double limit_ratio = 0;   // G / s^(m-1/2) at the smallest s
  double ratio_spread = 0;  // relative drift of that ratio over the lower half of the grid
};

// slope of log|G(u + s)| against log s, s geometric in [1e-3, 1e-1] u
ExponentFit local_exponent_fit(int n, double q, int m, int samples, const MBConfig& cfg = {});

// (1/2 pi i) int q^-x Gamma(x)^(n-1) dx on Re x = epsilon
double mellin_inversion_J(int n, double q, const MBConfig& cfg = {});
// int over R_{>0}^(n-2) of exp(-(x_1+...+x_{n-2} + q/(x_1...x_{n-2}))) dx/x,
// trapezoid rule in t = log x with step halving; n in {2,3,4}
double oscillatory_J(int n, double q, double tol);

// int q^-x Gamma(x)^(n-1) dx/x on Re x = epsilon, and the same number as
// 2 pi i int_1^inf J(qu) du/u with J from oscillatory_J
struct OscillatoryCheck {
  Cx contour;
  Cx oscillatory;
  double discrepancy;
};
OscillatoryCheck oscillatory_vs_contour(int n, double q, double tol);

struct LaplaceCheck {
  std::vector<double> s;
  std::vector<Cx> lhs, rhs;
  double max_relative = 0;
};
// int_u^Lmax e^(-lambda s) G dlambda against
// (2pi)^((1-n)/2) int q^-x Gamma(x)^(n-1) s^(n/2-(n-1)x-m-1/2) dx/x
LaplaceCheck laplace_spot_check(int n, double q, int m, const std::vector<double>& s_grid,
                                double tol);

}  // namespace gm

#pragma once

// Loops around the punctures u_k = (n-1) eta^(-2k) q^(1/(n-1)), transport of
// the fundamental solution around them, and the reflection vectors read off
// from the resulting monodromy matrices.

#include "gm/periods.hpp"

#include <optional>

namespace gm {

// Base point lambda0 q^(1/(n-1)); lambda0 = 0 selects the default 2(n-1).
// The loop rotates clockwise by 2 pi k/(n-1), runs in towards u_k, goes once
// counterclockwise around it on a circle of radius radius_fraction times the
// minimal distance between punctures, and retraces its way back.
PathSpec gamma_loop(int n, Cx log_q, int k, double lambda0 = 0, double radius_fraction = 0.4);
// counterclockwise circle |lambda| = |base point| starting at the base point
PathSpec big_circle(int n, Cx log_q, double lambda0 = 0);
// monodromy of the big circle read off from the exponents at infinity:
// (-1)^(dim-1) e^{2 pi i rho}
CMatrix big_circle_monodromy(const Space& s);

struct MonodromyResult {
  PathSpec loop;
  CMatrix matrix;  // I_continued = I_base * matrix
  CMatrix base_value;
  std::optional<GradedVector> reflection;
  double ode_residual = 0;      // ‖I_base C - I_continued‖ / ‖I_continued‖
  double eigen_residual = 0;    // ‖C a + a‖ once a reflection is extracted
  double pairing_residual = 0;  // |(a|a) - 2|
  double condition = 0;         // of I_base
  long steps = 0;
};

MonodromyResult monodromy_matrix(const QuantumProduct& qp, const SSeries& S, int level,
                                 const PathSpec& loop, double tol);

// The -1 eigenvector of the monodromy, scaled so (a|a) = 2 in the pairing of
// pairing_space.  With a candidate the sign maximizing Re<candidate, a> is
// chosen; otherwise the first nonzero coefficient is made to have positive
// real part.  sign_out receives the sign that was applied to the raw
// eigenvector scaling.
GradedVector reflection_vector(MonodromyResult& r, const Space& pairing_space,
                               const std::optional<GradedVector>& candidate = std::nullopt,
                               int* sign_out = nullptr);

// w_a(x) = x - (a|x) a
GradedVector reflection_action(const GradedVector& a, const GradedVector& x);
CMatrix reflection_matrix(const GradedVector& a);

// best c with v ~ c w in the least-squares sense, and the relative residual
struct ProportionalFit {
  Cx constant;
  double residual;
};
ProportionalFit proportional_fit(const CVector& v, const CVector& w);

struct TwistedReflectionReport {
  int n = 0, k = 0, level = 0;
  double Q = 1;
  GradedVector beta_direct, beta_via_proj, psi;
  ProportionalFit direct, via_proj;
  // beta before normalization divided by psi, both routes share it
  Cx raw_ratio;
  double psi_self_pairing = 0;  // <Psi(O_E), Psi(O_E)> on the blowup, should be 1
  double det_residual = 0;      // |det C + 1| of the twisted monodromy
};

// Loop gamma_k at q = -Q^-(n-1) with log q = -(n-1) log Q + pi i, transported
// both in the twisted model and through P^(n-2), compared with Psi(O_E(-k+1)).
TwistedReflectionReport twisted_reflection_check(int n, double Q, int k, int m, double tol);

}  // namespace gm

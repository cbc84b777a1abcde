#pragma once

// Periods of the second structure connection.  Levels are signed: level l
// means the operator I^(l) with d/dlambda I^(l) = I^(l+1); the "m = n"
// convention of the twisted theory is level -n.

#include "gm/quantum.hpp"

namespace gm {

struct MatrixSolution {
  Space space;
  int level = 0;
  CMatrix value;  // column j is I^(level) applied to basis vector j
  BranchState branch;
  double truncation_error = 0;
  int terms = 0;
};

// The calibrated period: Ĩ_ij = sum_k [w^k](lambda^(th_i-l-1/2+w)/Gamma(th_i-l+1/2+w)) (rho^k)_ij
CMatrix master_period(const Space& s, int level, const BranchState& lambda);

// S(z) (not its inverse) with K+1 coefficients, for Proj and TwistedE products
SSeries calibration(const QuantumProduct& qp, int K = 160);

// eigenvalues of E*, i.e. the punctures of the connection
std::vector<Cx> singularities(const QuantumProduct& qp);

// I^(l) = sum_k (-1)^k S_k Ĩ^(l+k), summed until three consecutive terms are
// below tol relative to the partial sum.
MatrixSolution fundamental_solution(const QuantumProduct& qp, const SSeries& S, int level,
                                    const BranchState& lambda, double tol);

// dY/dlambda = (lambda - E*)^{-1} (theta - l - 1/2) Y
Rhs ssc_rhs(const QuantumProduct& qp, int level);

// Frobenius norm of I^(l+1) - rhs(I^(l)), absolute
double connection_residual(const QuantumProduct& qp, const MatrixSolution& lower,
                           const MatrixSolution& upper);

// Twisted period for the class beta, at level -m.
GradedVector twisted_period(int n, Cx Q, int m, const GradedVector& beta,
                            const BranchState& lambda, double tol);

// componentwise e^{pi i (dim/2 - d_i)} on Proj
GradedVector sigma_transform(const GradedVector& beta);

// The P^(n-2) period matrix pulled back to the twisted basis:
// e^{-pi i theta} I^(-m)(q, lambda) e^{pi i theta}, with q = -Q^-(n-1).
CMatrix twisted_via_proj(int n, Cx Q, int m, const BranchState& lambda, double tol);

}  // namespace gm

#pragma once

// Small quantum products at t = 0 and the closed-form calibrations
// S(z)^{-1} of P^m, of the twisted exceptional theory and of the blowup
// unit column.  Everything is expanded in w = 1/z with matrix coefficients.

#include "gm/cohomology.hpp"

namespace gm {

struct QuantumProduct {
  Space space;
  Cx param;                   // q for Proj, Q for TwistedE
  std::vector<CMatrix> mult;  // mult[i] = quantum product by basis element i
  CMatrix euler;              // E* = c1 * (quantum), the operator in lambda - E*
};

// p* is the companion matrix: p p^m = q
QuantumProduct quantum_mult_proj(int m, Cx q);
// e* e^(n-1) = (-1)^n Q^(-(n-1)) e; E* = -(n-1) e*
QuantumProduct quantum_mult_twisted(int n, Cx Q);

// Laurent polynomial in w with matrix coefficients: sum_j c[j] w^(lo + j),
// truncated above w^top.
struct OpSeries {
  int lo = 0;
  int top = 0;
  std::vector<CMatrix> c;

  static OpSeries constant(const CMatrix& A, int top);
  int hi() const { return lo + int(c.size()) - 1; }
  CMatrix at(int power) const;
};

OpSeries operator*(const OpSeries& a, const OpSeries& b);
OpSeries operator*(Cx s, OpSeries a);
// (A + c z)^r for nilpotent A, exact as a finite sum, r any integer
OpSeries linear_power(const CMatrix& A, Cx c, int r, int top);

// S = sum_k coeffs[k] z^(-k), k = 0..K
struct SSeries {
  Space space;
  Cx param;
  int K = 0;
  std::vector<CMatrix> coeffs;
};

// Coefficients of z^0 .. z^(-K) of S^{-1} applied to a basis class.
std::vector<GradedVector> s_inverse_proj(int m, Cx q, int i, int K);
std::vector<GradedVector> s_inverse_twisted(int n, Cx Q, int i, int K);
// q1 = Q^(-(n-1)); lives on BlProj(n)
std::vector<GradedVector> s_inverse_blowup_unit(int n, Cx q1, int K);

// q1^d1 q2^d2 term of the two-parameter blowup series S^{-1} 1, as the
// coefficients of z^0 .. z^(-K).  With d2 = 0 these are exactly the terms of
// s_inverse_blowup_unit.
std::vector<CVector> blowup_unit_term(int n, int d1, int d2, int K);

// Full matrices assembled from the columns above.
SSeries s_inverse_series_proj(int m, Cx q, int K);
SSeries s_inverse_series_twisted(int n, Cx Q, int K);

// S_k = (-1)^k adj(Sinv_k) with adj A = G^{-1} A^T G
SSeries s_from_inverse(const SSeries& sinv);
// max over orders <= K of the entries of S(z) Sinv(z) - Id
double symplectic_defect(const SSeries& s, const SSeries& sinv);

// The cyclic matrix with (-1)^n in the corner: e^i -> e^(i+1), e^(n-1) -> (-1)^n e
CMatrix cyclic_sign_matrix(int n);
// Q^Delta A Q^-Delta on the twisted basis
CMatrix delta_conjugate(int n, Cx Q, const CMatrix& A);

}  // namespace gm

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gm/quantum.hpp"

using namespace gm;

TEST_CASE("quantum product of P^m: p^(m+1) = q") {
  for (int m = 1; m <= 5; ++m) {
    Cx q(0.7, -0.2);
    QuantumProduct qp = quantum_mult_proj(m, q);
    CMatrix p = qp.mult[1], acc = CMatrix::Identity(m + 1, m + 1);
    for (int i = 0; i <= m; ++i) acc = acc * p;
    CHECK((acc - q * CMatrix::Identity(m + 1, m + 1)).norm() < 1e-14);
    CHECK((qp.euler - double(m + 1) * p).norm() == 0.0);
  }
}

TEST_CASE("twisted quantum product: e^(n-1) acts by (-1)^n Q^-(n-1)") {
  for (int n = 3; n <= 6; ++n) {
    Cx Q(1.3, 0.4);
    QuantumProduct qt = quantum_mult_twisted(n, Q);
    CMatrix e = -qt.euler / double(n - 1), acc = CMatrix::Identity(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i) acc = acc * e;
    Cx c = (n % 2 ? -1.0 : 1.0) * std::pow(Q, -(n - 1));
    CHECK((acc - c * CMatrix::Identity(n - 1, n - 1)).norm() < 1e-13);
  }
}

TEST_CASE("linear_power inverts") {
  CMatrix A = CMatrix::Zero(4, 4);
  A(1, 0) = 1;
  A(2, 1) = 2;
  A(3, 2) = -1;
  OpSeries a = linear_power(A, 1.5, 3, 12), b = linear_power(A, 1.5, -3, 12);
  OpSeries c = a * b;
  for (int p = c.lo; p <= std::min(c.hi(), 8); ++p) {
    CMatrix expect = CMatrix::Identity(4, 4) * (p == 0 ? 1.0 : 0.0);
    CHECK((c.at(p) - expect).norm() < 1e-12);
  }
}

TEST_CASE("unit column of P^m starts with q z^-(m+1)") {
  // the degree one term of the J-function is q / (p + z)^(m+1) up to z -> -z
  for (int m = 1; m <= 4; ++m) {
    Cx q(0.6, 0.3);
    auto col = s_inverse_proj(m, q, 0, m + 3);
    for (int k = 1; k <= m; ++k) CHECK(col[k].coeffs.norm() < 1e-15);
    CHECK(std::abs(std::abs(col[m + 1].coeffs(0)) - std::abs(q)) < 1e-14);
    CHECK(std::abs(std::abs(col[m + 2].coeffs(1) / col[m + 1].coeffs(0)) - double(m + 1)) < 1e-12);
  }
}

TEST_CASE("symplectic condition for every closed-form calibration") {
  for (int m = 1; m <= 5; ++m) {
    SSeries inv = s_inverse_series_proj(m, Cx(0.9, 0.1), 24);
    CHECK(symplectic_defect(s_from_inverse(inv), inv) < 1e-12);
  }
  for (int n = 3; n <= 7; ++n) {
    SSeries inv = s_inverse_series_twisted(n, Cx(1.1, -0.3), 24);
    CHECK(symplectic_defect(s_from_inverse(inv), inv) < 1e-12);
  }
}

TEST_CASE("twisted calibration is the P^(n-2) one at q = (-1)^n Q^-(n-1)") {
  for (int n = 3; n <= 6; ++n) {
    Cx Q(1.3, 0.4);
    int K = 12;
    SSeries tw = s_inverse_series_twisted(n, Q, K);
    Cx q = (n % 2 ? -1.0 : 1.0) * std::pow(Q, -(n - 1));
    SSeries pr = s_inverse_series_proj(n - 2, q, K);
    for (int k = 0; k <= K; ++k)
      CHECK(((k % 2 ? -1.0 : 1.0) * tw.coeffs[k] - pr.coeffs[k]).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("two-parameter blowup terms at q2 = 0 sum to the unit column") {
  for (int n = 3; n <= 5; ++n) {
    int K = 10;
    Cx q1(0.4, 0.2);
    auto unit = s_inverse_blowup_unit(n, q1, K);
    std::vector<CVector> sum(K + 1, CVector::Zero(2 * n));
    for (int d = 0; d * (n - 1) <= K + n; ++d) {
      auto t = blowup_unit_term(n, d, 0, K);
      for (int k = 0; k <= K; ++k) sum[k] += std::pow(q1, d) * t[k];
    }
    for (int k = 0; k <= K; ++k) CHECK((sum[k] - unit[k].coeffs).norm() < 1e-14);
  }
}

TEST_CASE("exceptional block: Q^Delta e* Q^-Delta = Q^-1 epsilon") {
  for (int n = 3; n <= 6; ++n) {
    Cx Q = 2.0;
    CMatrix e = -quantum_mult_twisted(n, Q).euler / double(n - 1);
    CHECK((delta_conjugate(n, Q, e) - cyclic_sign_matrix(n) / Q).norm() < 1e-15);
  }
}

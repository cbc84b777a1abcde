#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gm/monodromy.hpp"

using namespace gm;

namespace {

// winding number of a path around c, from the accumulated argument
double winding(const PathSpec& p, Cx c) {
  double total = 0;
  for (const Piece& piece : p.pieces) {
    double L = piece_length(piece);
    int steps = 2000;
    Cx prev = piece_point(piece, 0) - c;
    for (int i = 1; i <= steps; ++i) {
      Cx z = piece_point(piece, L * i / steps) - c;
      total += std::arg(z / prev);
      prev = z;
    }
  }
  return total / (2 * pi);
}

}  // namespace

TEST_CASE("gamma_k winds once around u_k and around nothing else") {
  for (int n = 3; n <= 5; ++n) {
    QuantumProduct qp = quantum_mult_proj(n - 2, 1.0);
    auto us = singularities(qp);
    for (int k = 0; k <= n - 2; ++k) {
      PathSpec loop = gamma_loop(n, 0.0, k);
      CHECK(is_closed(loop, 1e-10));
      CHECK(is_connected(loop, 1e-10));
      Cx uk = double(n - 1) * std::polar(1.0, -2 * pi * k / (n - 1));
      int around = 0;
      for (Cx u : us) {
        double w = winding(loop, u);
        CHECK(std::abs(w - std::round(w)) < 1e-9);
        if (std::abs(u - uk) < 1e-9) CHECK(std::round(w) == 1);
        else CHECK(std::round(w) == 0);
        around += int(std::round(w));
      }
      CHECK(around == 1);
      CHECK(std::abs(winding(loop, 0.0)) < 1e-9);
    }
  }
  CHECK_THROWS_AS(gamma_loop(3, 0.0, 2), usage_error);
  CHECK_THROWS_AS(gamma_loop(3, 0.0, 0, 0, 0.7), usage_error);
}

TEST_CASE("P^1: monodromies are reflections in Psi(O(k))") {
  int n = 3;
  QuantumProduct qp = quantum_mult_proj(1, 1.0);
  SSeries S = calibration(qp);
  for (int k = 0; k <= 1; ++k) {
    MonodromyResult r = monodromy_matrix(qp, S, -n, gamma_loop(n, 0.0, k), 1e-13);
    CHECK(std::abs(r.matrix.determinant() + 1.0) < 1e-10);
    CHECK((r.matrix * r.matrix - CMatrix::Identity(2, 2)).norm() < 1e-10);
    GradedVector psi = psi_map(KClass::line(k), qp.space, {0.0});
    GradedVector a = reflection_vector(r, qp.space, psi);
    CHECK((a.coeffs - psi.coeffs).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.pairing_residual < 1e-12);
    // Picard-Lefschetz: the monodromy is the reflection x -> x - (a|x) a
    CHECK((reflection_matrix(a) - r.matrix).norm() < 1e-9);
    GradedVector back = reflection_action(a, a);
    CHECK((back.coeffs + a.coeffs).norm() < 1e-12);
  }
}

TEST_CASE("big circle: numerical transport matches (-1)^(dim-1) e^(2 pi i rho)") {
  for (int n = 3; n <= 4; ++n) {
    QuantumProduct qp = quantum_mult_proj(n - 2, 1.0);
    SSeries S = calibration(qp);
    MonodromyResult r = monodromy_matrix(qp, S, -n, big_circle(n, 0.0), 1e-13);
    CHECK((r.matrix - big_circle_monodromy(qp.space)).norm() < 1e-8);
  }
}

TEST_CASE("loops compose to the big circle, gamma_0 first") {
  int n = 4;
  QuantumProduct qp = quantum_mult_proj(2, 1.0);
  SSeries S = calibration(qp);
  CMatrix P = CMatrix::Identity(3, 3);
  for (int k = 0; k <= 2; ++k) P = monodromy_matrix(qp, S, -n, gamma_loop(n, 0.0, k), 1e-13).matrix * P;
  CHECK((P - big_circle_monodromy(qp.space)).norm() < 1e-7);
}

TEST_CASE("reflections at complex q follow Psi_q") {
  int n = 3;
  Cx log_q(std::log(2.0), 0.3 * pi);
  QuantumProduct qp = quantum_mult_proj(1, std::exp(log_q));
  SSeries S = calibration(qp);
  for (int k = 0; k <= 1; ++k) {
    MonodromyResult r = monodromy_matrix(qp, S, -n, gamma_loop(n, log_q, k), 1e-13);
    GradedVector psi = psi_map(KClass::line(k), qp.space, {log_q});
    GradedVector a = reflection_vector(r, qp.space, psi);
    CHECK((a.coeffs - psi.coeffs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("proportional_fit") {
  CVector w(3);
  w << Cx(1, 1), Cx(0, 2), Cx(-1, 0);
  ProportionalFit f = proportional_fit(Cx(0.5, -2.0) * w, w);
  CHECK(std::abs(f.constant - Cx(0.5, -2.0)) < 1e-15);
  CHECK(f.residual < 1e-15);
}

TEST_CASE("twisted reflection vectors are +-Psi(O_E(-k+1))") {
  for (int n = 3; n <= 4; ++n)
    for (int k = 0; k <= n - 2; ++k) {
      TwistedReflectionReport t = twisted_reflection_check(n, 1.0, k, n, 1e-13);
      CHECK(std::min(std::abs(t.direct.constant - 1.0), std::abs(t.direct.constant + 1.0)) < 1e-8);
      CHECK(std::min(std::abs(t.via_proj.constant - 1.0), std::abs(t.via_proj.constant + 1.0)) < 1e-8);
      CHECK(t.direct.residual < 1e-8);
      CHECK(std::abs(t.psi_self_pairing - 1.0) < 1e-12);
      CHECK(t.det_residual < 1e-9);
      // the unnormalized ratio through P^(n-2) is i^(1-n)
      Cx expect = std::pow(iu, 1 - n);
      CHECK(std::min(std::abs(t.raw_ratio - expect), std::abs(t.raw_ratio + expect)) < 1e-8);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gm/periods.hpp"

using namespace gm;

TEST_CASE("master period: diagonal is lambda^(a) / Gamma(a + 1)") {
  for (Space s : {proj(3), twisted(4)}) {
    for (int l : {-4, -1, 0, 2}) {
      Cx lam(3.0, 1.5);
      CMatrix I = master_period(s, l, BranchState::principal(lam));
      for (int i = 0; i < s->size(); ++i) {
        double a = s->theta(i, i).real() - l - 0.5;
        bool pole = a + 1 <= 0 && a + 1 == std::round(a + 1);
        Cx expect = pole ? Cx(0) : std::pow(lam, a) / std::tgamma(a + 1);
        CHECK(std::abs(I(i, i) - expect) < 1e-13 * std::max(1.0, std::abs(expect)));
      }
    }
  }
}

TEST_CASE("master period ladder: d/dlambda of level l is level l+1") {
  Space s = proj(2);
  Cx lam(2.0, -0.7);
  double h = 1e-5;
  for (int l : {-3, 0}) {
    CMatrix d = (master_period(s, l, BranchState::principal(lam + h)) -
                 master_period(s, l, BranchState::principal(lam - h))) / (2 * h);
    CMatrix up = master_period(s, l + 1, BranchState::principal(lam));
    CHECK((d - up).norm() / up.norm() < 1e-8);
  }
}

TEST_CASE("fundamental solution solves the second structure connection") {
  for (QuantumProduct qp : {quantum_mult_proj(2, 1.0), quantum_mult_twisted(4, 1.0)}) {
    SSeries S = calibration(qp);
    BranchState b = BranchState::principal(Cx(9.0, 2.0));
    MatrixSolution lo = fundamental_solution(qp, S, -3, b, 1e-15);
    MatrixSolution up = fundamental_solution(qp, S, -2, b, 1e-15);
    CHECK(lo.terms > 0);
    CHECK(connection_residual(qp, lo, up) < 10 * (lo.truncation_error + up.truncation_error));
    CHECK(connection_residual(qp, lo, up) / up.value.norm() < 1e-13);
  }
}

TEST_CASE("level-0 periods pair to the intersection form") {
  QuantumProduct qp = quantum_mult_proj(3, 1.0);
  SSeries S = calibration(qp);
  int N = 4;
  for (Cx lam : {Cx(12.0, 0.0), Cx(-3.0, 11.0)}) {
    CMatrix I = fundamental_solution(qp, S, 0, BranchState::principal(lam), 1e-15).value;
    CMatrix P = I.transpose() * qp.space->pairing * (lam * CMatrix::Identity(N, N) - qp.euler) * I;
    CHECK((P - intersection_form(qp.space)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("near the punctures the series is refused") {
  QuantumProduct qp = quantum_mult_proj(2, 1.0);
  SSeries S = calibration(qp);
  CHECK_THROWS_AS(fundamental_solution(qp, S, 0, BranchState::principal(3.5), 1e-15), usage_error);
  auto u = singularities(qp);
  CHECK(u.size() == 3);
  for (Cx v : u) CHECK(std::abs(std::abs(v) - 3.0) < 1e-12);
}

TEST_CASE("twisted periods equal the transformed P^(n-2) periods") {
  for (int n = 3; n <= 5; ++n) {
    QuantumProduct qt = quantum_mult_twisted(n, 1.0);
    BranchState b = BranchState::principal(std::polar(3.0 * (n - 1), 0.4));
    CMatrix direct = fundamental_solution(qt, calibration(qt), -n, b, 1e-15).value;
    CMatrix via = twisted_via_proj(n, 1.0, n, b, 1e-15);
    CHECK((direct - via).norm() / direct.norm() < 1e-10);
    GradedVector beta = basis_vector(twisted(n), 0);
    GradedVector col = twisted_period(n, 1.0, n, beta, b, 1e-15);
    CHECK((col.coeffs - direct.col(0)).norm() < 1e-12 * direct.norm());
  }
}

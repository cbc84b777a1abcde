#include "gm/periods.hpp"

#include <Eigen/Eigenvalues>

namespace gm {

CMatrix master_period(const Space& s, int level, const BranchState& lambda) {
  int N = s->size();
  // rho^k vanishes for k > dim
  int order = std::min(s->dim, max_jet_order);
  std::vector<CMatrix> rho_pow{CMatrix::Identity(N, N)};
  for (int k = 1; k <= order; ++k) rho_pow.push_back(rho_pow.back() * s->rho);
  CMatrix out = CMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    double th = s->theta(i, i).real();
    CJet f = branch_power_jet(lambda, th - level - 0.5, order) *
             recip_gamma_jet(th - level + 0.5, order);
    for (int k = 0; k <= order; ++k) out.row(i) += f[k] * rho_pow[k].row(i);
  }
  return out;
}

SSeries calibration(const QuantumProduct& qp, int K) {
  switch (qp.space->kind) {
    case SpaceKind::Proj:
      return s_from_inverse(s_inverse_series_proj(qp.space->param, qp.param, K));
    case SpaceKind::TwistedE:
      return s_from_inverse(s_inverse_series_twisted(qp.space->param, qp.param, K));
    default:
      throw usage_error("calibration is available for Proj and TwistedE");
  }
}

std::vector<Cx> singularities(const QuantumProduct& qp) {
  Eigen::ComplexEigenSolver<CMatrix> es(qp.euler, false);
  std::vector<Cx> u(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return u;
}

MatrixSolution fundamental_solution(const QuantumProduct& qp, const SSeries& S, int level,
                                    const BranchState& lambda, double tol) {
  double umax = 0;
  for (Cx u : singularities(qp)) umax = std::max(umax, std::abs(u));
  if (std::abs(lambda.base) < 1.5 * umax)
    throw usage_error("fundamental_solution: |lambda| must exceed 1.5 max|u|");

  const Space& s = qp.space;
  CMatrix sum = CMatrix::Zero(s->size(), s->size());
  double abs_sum = 0;
  int small_run = 0;
  std::vector<double> norms;
  for (int k = 0; k <= S.K; ++k) {
    double sg = (k % 2 == 0) ? 1.0 : -1.0;
    CMatrix term = sg * (S.coeffs[k] * master_period(s, level + k, lambda));
    double tn = term.norm();
    sum += term;
    abs_sum += tn;
    norms.push_back(tn);
    small_run = (tn < tol * sum.norm()) ? small_run + 1 : 0;
    if (small_run >= 3 && k >= s->dim) {
      double tail = 0;
      for (int j = 0; j < 3; ++j) tail += norms[norms.size() - 1 - j];
      double err = tail + 4 * std::numeric_limits<double>::epsilon() * abs_sum;
      return {s, level, sum, lambda, err, k + 1};
    }
  }
  throw numeric_error("fundamental_solution: series did not converge within the calibration order");
}

Rhs ssc_rhs(const QuantumProduct& qp, int level) {
  int N = qp.space->size();
  CMatrix shift = qp.space->theta - (level + 0.5) * CMatrix::Identity(N, N);
  CMatrix E = qp.euler;
  return [E, shift, N](Cx lambda, const CMatrix& Y) -> CMatrix {
    CMatrix A = lambda * CMatrix::Identity(N, N) - E;
    Eigen::PartialPivLU<CMatrix> lu(A);
    if (std::abs(lu.determinant()) < 1e-300) throw numeric_error("ssc_rhs: lambda on the discriminant");
    return lu.solve(shift * Y);
  };
}

double connection_residual(const QuantumProduct& qp, const MatrixSolution& lower,
                           const MatrixSolution& upper) {
  CMatrix r = upper.value - ssc_rhs(qp, lower.level)(lower.branch.base, lower.value);
  return r.norm();
}

GradedVector twisted_period(int n, Cx Q, int m, const GradedVector& beta,
                            const BranchState& lambda, double tol) {
  if (beta.space->kind != SpaceKind::TwistedE || beta.space->param != n)
    throw usage_error("twisted_period: beta must live on the twisted space");
  QuantumProduct qp = quantum_mult_twisted(n, Q);
  MatrixSolution I = fundamental_solution(qp, calibration(qp), -m, lambda, tol);
  return {beta.space, I.value * beta.coeffs};
}

GradedVector sigma_transform(const GradedVector& beta) {
  const Space& s = beta.space;
  if (s->kind != SpaceKind::Proj) throw usage_error("sigma_transform acts on Proj classes");
  CVector v = beta.coeffs;
  for (int i = 0; i < s->size(); ++i) v(i) *= std::exp(pi * iu * s->theta(i, i));
  return {s, v};
}

CMatrix twisted_via_proj(int n, Cx Q, int m, const BranchState& lambda, double tol) {
  Cx q = -std::pow(Q, -(n - 1));
  QuantumProduct qp = quantum_mult_proj(n - 2, q);
  MatrixSolution I = fundamental_solution(qp, calibration(qp), -m, lambda, tol);
  CMatrix sig = CMatrix::Zero(n - 1, n - 1);
  for (int i = 0; i < n - 1; ++i) sig(i, i) = std::exp(pi * iu * qp.space->theta(i, i));
  return sig.inverse() * I.value * sig;
}

}  // namespace gm

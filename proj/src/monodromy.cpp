#include "gm/monodromy.hpp"

#include <Eigen/SVD>

namespace gm {

namespace {

double default_lambda0(int n, double lambda0) { return lambda0 > 0 ? lambda0 : 2.0 * (n - 1); }

Cx root_of_q(int n, Cx log_q) { return std::exp(log_q / double(n - 1)); }

}  // namespace

PathSpec gamma_loop(int n, Cx log_q, int k, double lambda0, double radius_fraction) {
  if (n < 3) throw usage_error("gamma_loop needs n >= 3");
  if (k < 0 || k > n - 2) throw usage_error("gamma_loop: k out of range");
  if (!(radius_fraction > 0 && radius_fraction < 0.5))
    throw usage_error("gamma_loop: radius fraction must lie in (0, 0.5)");
  lambda0 = default_lambda0(n, lambda0);
  if (lambda0 <= n - 1) throw usage_error("gamma_loop: base radius must exceed n-1");

  Cx log_base = std::log(lambda0) + log_q / double(n - 1);
  Cx base = std::exp(log_base);
  double R = std::abs(base);
  double a0 = log_base.imag();
  double a1 = a0 - 2 * pi * k / (n - 1);
  Cx turn = std::polar(R, a1);

  Cx root = root_of_q(n, log_q);
  Cx u = double(n - 1) * std::polar(1.0, -2 * pi * k / (n - 1)) * root;
  double spacing = 2 * std::sin(pi / (n - 1)) * (n - 1) * std::abs(root);
  double r = radius_fraction * spacing;
  Cx dir = (turn - u) / std::abs(turn - u);
  Cx near = u + r * dir;
  double phi = std::arg(dir);

  PathSpec p;
  p.start = BranchState{base, log_base};
  p.pieces.push_back(Arc{0.0, R, a0, a1});
  p.pieces.push_back(Segment{turn, near});
  p.pieces.push_back(Arc{u, r, phi, phi + 2 * pi});
  p.pieces.push_back(Segment{near, turn});
  p.pieces.push_back(Arc{0.0, R, a1, a0});
  return p;
}

PathSpec big_circle(int n, Cx log_q, double lambda0) {
  lambda0 = default_lambda0(n, lambda0);
  Cx log_base = std::log(lambda0) + log_q / double(n - 1);
  Cx base = std::exp(log_base);
  PathSpec p;
  p.start = BranchState{base, log_base};
  double a0 = log_base.imag();
  p.pieces.push_back(Arc{0.0, std::abs(base), a0, a0 + 2 * pi});
  return p;
}

CMatrix big_circle_monodromy(const Space& s) {
  double sg = (s->dim % 2 == 1) ? 1.0 : -1.0;  // (-1)^(dim-1)
  return sg * nilpotent_exp(2.0 * pi * iu * s->rho);
}

MonodromyResult monodromy_matrix(const QuantumProduct& qp, const SSeries& S, int level,
                                 const PathSpec& loop, double tol) {
  if (!is_connected(loop) || !is_closed(loop, 1e-10))
    throw usage_error("monodromy_matrix: loop must be connected and closed");
  BranchState start = loop.start ? *loop.start : BranchState::principal(path_start(loop));
  MatrixSolution base = fundamental_solution(qp, S, level, start, 1e-15);

  Eigen::JacobiSVD<CMatrix> svd(base.value);
  double cond = svd.singularValues()(0) / svd.singularValues().tail(1)(0);
  if (!(cond < 1e8)) throw numeric_error("monodromy_matrix: base solution is ill-conditioned");

  OdeOptions opt;
  opt.singularities = singularities(qp);
  OdeResult run = ode_continue(ssc_rhs(qp, level), loop, base.value, tol, opt);

  MonodromyResult r;
  r.loop = loop;
  r.base_value = base.value;
  r.matrix = base.value.partialPivLu().solve(run.Y);
  r.ode_residual = (base.value * r.matrix - run.Y).norm() / run.Y.norm();
  r.condition = cond;
  r.steps = run.steps;
  return r;
}

GradedVector reflection_vector(MonodromyResult& r, const Space& pairing_space,
                               const std::optional<GradedVector>& candidate, int* sign_out) {
  CVector v = eig_unit_minus(r.matrix);
  GradedVector a{pairing_space, v};
  Cx self = intersection_pairing(a, a);
  if (std::abs(self) < 1e-12) throw numeric_error("reflection_vector: isotropic eigenvector");
  a.coeffs *= std::sqrt(2.0 / self);
  int sign = 1;
  if (candidate) {
    if (candidate->coeffs.dot(a.coeffs).real() < 0) sign = -1;
  } else {
    for (int i = 0; i < a.coeffs.size(); ++i) {
      if (std::abs(a.coeffs(i)) > 1e-12) {
        if (a.coeffs(i).real() < 0) sign = -1;
        break;
      }
    }
  }
  a.coeffs *= double(sign);
  r.eigen_residual = (r.matrix * a.coeffs + a.coeffs).norm();
  r.pairing_residual = std::abs(intersection_pairing(a, a) - 2.0);
  r.reflection = a;
  if (sign_out) *sign_out = sign;
  return a;
}

GradedVector reflection_action(const GradedVector& a, const GradedVector& x) {
  Cx c = intersection_pairing(a, x);
  return {x.space, x.coeffs - c * a.coeffs};
}

CMatrix reflection_matrix(const GradedVector& a) {
  int N = a.space->size();
  CMatrix X = intersection_form(a.space);
  return CMatrix::Identity(N, N) - a.coeffs * (a.coeffs.transpose() * X);
}

ProportionalFit proportional_fit(const CVector& v, const CVector& w) {
  Cx c = w.dot(v) / w.squaredNorm();
  return {c, (v - c * w).norm() / w.norm()};
}

TwistedReflectionReport twisted_reflection_check(int n, double Q, int k, int m, double tol) {
  if (!(Q > 0)) throw usage_error("twisted_reflection_check: Q must be real positive");
  if (n < 3) throw usage_error("twisted_reflection_check: n >= 3");
  TwistedReflectionReport rep;
  rep.n = n;
  rep.k = k;
  rep.Q = Q;
  rep.level = -m;
  Space tw = twisted(n);
  Cx logQ = std::log(Q);
  Cx log_q = -double(n - 1) * logQ + pi * iu;

  rep.psi = psi_exceptional(n, KClass::exceptional(-k + 1), logQ);
  {
    // O_E = O - O(-E)
    GradedVector p = psi_map(KClass::exceptional(0), blproj(n), {0.0, double(n - 1) * logQ});
    rep.psi_self_pairing = euler_pairing(p, p).real();
  }

  PathSpec loop = gamma_loop(n, log_q, k);

  // direct transport in the twisted model
  QuantumProduct qt = quantum_mult_twisted(n, Q);
  SSeries St = calibration(qt);
  MonodromyResult rt = monodromy_matrix(qt, St, -m, loop, tol);
  rep.det_residual = std::abs(rt.matrix.determinant() + 1.0);
  rep.beta_direct = reflection_vector(rt, tw, rep.psi);
  rep.direct = proportional_fit(rep.beta_direct.coeffs, rep.psi.coeffs);

  // through P^(n-2) at q = -Q^-(n-1)
  QuantumProduct qp = quantum_mult_proj(n - 2, std::exp(log_q));
  SSeries Sp = calibration(qp);
  MonodromyResult rp = monodromy_matrix(qp, Sp, -m, loop, tol);
  GradedVector alpha = reflection_vector(rp, qp.space);
  CVector b = alpha.coeffs;
  for (int i = 0; i < n - 1; ++i) b(i) *= std::exp(-pi * iu * qp.space->theta(i, i));
  rep.raw_ratio = proportional_fit(b, rep.psi.coeffs).constant;
  GradedVector beta{tw, b};
  beta.coeffs *= std::sqrt(2.0 / intersection_pairing(beta, beta));
  if (rep.psi.coeffs.dot(beta.coeffs).real() < 0) beta.coeffs *= -1.0;
  rep.beta_via_proj = beta;
  rep.via_proj = proportional_fit(beta.coeffs, rep.psi.coeffs);
  return rep;
}

}  // namespace gm

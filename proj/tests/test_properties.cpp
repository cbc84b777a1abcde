// Invariants that must hold for every input in a family, checked on grids
// or seeded random samples.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gm/gathmann.hpp"
#include "gm/mirror.hpp"
#include "gm/monodromy.hpp"

#include <algorithm>
#include <random>

using namespace gm;

namespace {

double chi_line(int m, int d) {
  double v = 1;
  for (int j = 1; j <= m; ++j) v *= double(d + j) / j;
  return v;
}

}  // namespace

// ------------------------------------------------------------------ numerics

TEST_CASE("1/Gamma jet times Gamma is one") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> re(-6, 6), im(-6, 6);
  for (int i = 0; i < 100; ++i) {
    Cx z(re(rng), im(rng));
    if (std::abs(z.imag()) < 0.1 && std::abs(z.real() - std::round(z.real())) < 0.1) continue;
    CHECK(std::abs(recip_gamma_jet(z, 0)[0] * std::exp(log_gamma(z)) - 1.0) < 1e-10);
  }
}

TEST_CASE("digamma recurrence") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Cx z = std::polar(20.0 * r(rng), pi * (r(rng) - 0.5));
    if (z.real() <= 1e-3) continue;
    CHECK(std::abs(polygamma(0, z + 1.0) - polygamma(0, z) - 1.0 / z) < 1e-11);
  }
}

TEST_CASE("ODE continuation composes and reverses") {
  QuantumProduct qp = quantum_mult_proj(2, 1.0);
  Rhs f = ssc_rhs(qp, -2);
  OdeOptions opt;
  opt.singularities = singularities(qp);
  PathSpec a, b;
  a.pieces.push_back(Segment{Cx(6, 0), Cx(5, 4)});
  b.pieces.push_back(Arc{0.0, std::abs(Cx(5, 4)), std::arg(Cx(5, 4)), 2.5});
  b.pieces.push_back(Segment{std::polar(std::abs(Cx(5, 4)), 2.5), Cx(-7, -1)});
  double tol = 1e-11;
  CMatrix Y0 = master_period(qp.space, -2, BranchState::principal(6.0));
  OdeResult ra = ode_continue(f, a, Y0, tol, opt);
  PathSpec b2 = b;
  b2.start = ra.branch;
  OdeResult rab = ode_continue(f, b2, ra.Y, tol, opt);
  OdeResult whole = ode_continue(f, concatenated(a, b), Y0, tol, opt);
  double scale = whole.Y.norm();
  CHECK((rab.Y - whole.Y).norm() / scale < 3 * tol * path_length(concatenated(a, b)));
  PathSpec back = reversed(concatenated(a, b));
  back.start = whole.branch;
  OdeResult there_and_back = ode_continue(f, back, whole.Y, tol, opt);
  CHECK((there_and_back.Y - Y0).norm() / Y0.norm() < 3 * tol * 2 * path_length(back));
  CHECK(std::abs(there_and_back.branch.log_value - std::log(6.0)) < 1e-12);
}

// ------------------------------------------------------------------ cohomology

TEST_CASE("HRR on sums of line bundles") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> deg(-3, 3), mult(-2, 2);
  for (int m = 1; m <= 6; ++m) {
    Space s = proj(m);
    for (int trial = 0; trial < 20; ++trial) {
      KClass E{{{mult(rng), deg(rng), 0}, {1, deg(rng), 0}}};
      KClass F{{{1, deg(rng), 0}, {mult(rng), deg(rng), 0}}};
      double chi = 0;
      for (auto& a : E.terms)
        for (auto& b : F.terms) chi += a.mult * b.mult * chi_line(m, b.a - a.a);
      Cx lq(0.1 * trial, -0.05 * trial);
      Cx v = euler_pairing(psi_map(E, s, {lq}), psi_map(F, s, {lq}));
      CHECK(std::abs(v - chi) < 1e-9 * std::max(1.0, std::abs(chi)));
      CHECK(std::abs(euler_char(E, F, s) - chi) < 1e-9 * std::max(1.0, std::abs(chi)));
    }
  }
}

TEST_CASE("grading operators: theta skew, [theta, rho] = -rho, symmetric (|)") {
  for (Space s : {proj(1), proj(4), twisted(3), twisted(6), blproj(2), blproj(5)}) {
    CMatrix G = s->pairing;
    CHECK((s->theta.transpose() * G + G * s->theta).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s->theta * s->rho - s->rho * s->theta + s->rho).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < s->size(); ++i)
      for (int j = 0; j < s->size(); ++j)
        CHECK(intersection_pairing(basis_vector(s, i), basis_vector(s, j)) ==
              intersection_pairing(basis_vector(s, j), basis_vector(s, i)));
  }
}

TEST_CASE("Gamma(1-e) Gamma(1+e) = pi e / sin(pi e), and the blowup Gamma class") {
  const int order = 8;
  auto g = gamma_one_plus_series(order);
  // pi x / sin(pi x) from exponential jets
  CJet x = CJet::variable(order + 1, 0.0);
  CJet s = (exp(x * (pi * iu)) - exp(x * (-pi * iu))) * (1.0 / (2.0 * iu));
  CJet s_over_x(order);
  for (int k = 0; k <= order; ++k) s_over_x[k] = s[k + 1];
  CJet rhs = reciprocal(s_over_x) * Cx(pi);
  for (int k = 0; k <= order; ++k) {
    Cx lhs = 0;
    for (int j = 0; j <= k; ++j) lhs += ((j % 2) ? -1.0 : 1.0) * g[j] * g[k - j];
    CHECK(std::abs(lhs - rhs[k]) < 1e-10 * std::max(1.0, std::abs(rhs[k])));
  }
  for (int n = 2; n <= 6; ++n) {
    Space b = blproj(n);
    auto power = [&](int sign, int p) {  // coefficients of Gamma(1 + sign x)^p
      std::vector<Cx> c(g.size());
      for (size_t k = 0; k < g.size(); ++k) c[k] = (sign < 0 && k % 2) ? -g[k] : g[k];
      std::vector<Cx> r(g.size(), 0.0);
      r[0] = 1;
      for (int t = 0; t < p; ++t) {
        std::vector<Cx> nr(g.size(), 0.0);
        for (size_t i = 0; i < g.size(); ++i)
          for (size_t j = 0; i + j < g.size(); ++j) nr[i + j] += r[i] * c[j];
        r = nr;
      }
      return r;
    };
    std::vector<Cx> esec = power(-1, n - 1);
    std::vector<Cx> ratio(g.size(), 0.0);  // times pi e / sin(pi e)
    for (size_t i = 0; i < g.size(); ++i)
      for (size_t j = 0; i + j < g.size(); ++j) ratio[i + j] += esec[i] * rhs[int(j)];
    CVector one = CVector::Unit(b->size(), 0);
    CVector oracle = nilpotent_series(power(1, n + 1), b->divisors[0]) * one +
                     nilpotent_series(ratio, b->divisors[1]) * one - one;
    CHECK((gamma_class(b).coeffs - oracle).cwiseAbs().maxCoeff() < 1e-10);
  }
}

// ------------------------------------------------------------------ quantum

TEST_CASE("twisted calibration: homogeneity and divisor relation") {
  const int L = 10;
  for (int n = 3; n <= 6; ++n) {
    Space s = twisted(n);
    int N = s->size();
    SSeries a = s_from_inverse(s_inverse_series_twisted(n, 1.0, L));
    SSeries b = s_from_inverse(s_inverse_series_twisted(n, 2.0, L));
    CMatrix e = -quantum_mult_twisted(n, 1.0).euler / double(n - 1);
    for (int l = 0; l <= L; ++l) {
      CMatrix QdQ = CMatrix::Zero(N, N);
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          // the entry must be c Q^p with p = -l - theta_i + theta_j
          double p = -l - (s->theta(i, i) - s->theta(j, j)).real();
          CHECK(std::abs(b.coeffs[l](i, j) - a.coeffs[l](i, j) * std::pow(2.0, p)) <=
                1e-14 * std::abs(b.coeffs[l](i, j)));
          QdQ(i, j) = p * a.coeffs[l](i, j);
        }
      if (l == 0) continue;
      CMatrix rhs = double(n - 1) * e * a.coeffs[l - 1] + a.coeffs[l - 1] * s->rho;
      CHECK((QdQ - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("S against its inverse") {
  for (int m = 1; m <= 5; ++m) {
    SSeries inv = s_inverse_series_proj(m, std::polar(1.7, 0.9), 30);
    CHECK(symplectic_defect(s_from_inverse(inv), inv) < 1e-10);
  }
  for (int n = 3; n <= 6; ++n) {
    SSeries inv = s_inverse_series_twisted(n, std::polar(0.8, -0.4), 30);
    CHECK(symplectic_defect(s_from_inverse(inv), inv) < 1e-10);
  }
}

TEST_CASE("exceptional block is exactly Q^-1 epsilon") {
  for (int n = 3; n <= 8; ++n) {
    Cx Q = 2.0;
    CMatrix e = -quantum_mult_twisted(n, Q).euler / double(n - 1);
    CHECK((delta_conjugate(n, Q, e) - cyclic_sign_matrix(n) / Q).cwiseAbs().maxCoeff() == 0.0);
  }
}

// ------------------------------------------------------------------ periods

TEST_CASE("twisted periods column by column") {
  for (int n = 3; n <= 5; ++n) {
    Space tw = twisted(n);
    for (int j = 0; j < 10; ++j) {
      BranchState b = BranchState::principal(std::polar(2.2 * (n - 1) + 0.5 * j, -1.3 + 0.29 * j));
      CMatrix via = twisted_via_proj(n, 1.0, n, b, 1e-15);
      for (int i = 0; i < n - 1; ++i) {
        CVector col = twisted_period(n, 1.0, n, basis_vector(tw, i), b, 1e-15).coeffs;
        CHECK((col - via.col(i)).norm() < 1e-8 * col.norm());
      }
    }
  }
}

TEST_CASE("translation invariance, connection residual, pairing constancy") {
  for (QuantumProduct qp : {quantum_mult_proj(1, 1.0), quantum_mult_proj(3, Cx(0.5, 0.5)),
                            quantum_mult_twisted(3, 1.0), quantum_mult_twisted(5, 1.3)}) {
    SSeries S = calibration(qp);
    int N = qp.space->size();
    double R = 0;
    for (Cx u : singularities(qp)) R = std::max(R, std::abs(u));
    CMatrix X = intersection_form(qp.space);
    for (int j = 0; j < 4; ++j) {
      Cx lam = std::polar(2.5 * R + j, 0.7 * j - 1.0);
      MatrixSolution lo = fundamental_solution(qp, S, -1, BranchState::principal(lam), 1e-15);
      MatrixSolution up = fundamental_solution(qp, S, 0, BranchState::principal(lam), 1e-15);
      CHECK(connection_residual(qp, lo, up) <= 10 * (lo.truncation_error + up.truncation_error));
      double h = 1e-4 * std::abs(lam);
      CMatrix d = (fundamental_solution(qp, S, -1, BranchState::principal(lam + h), 1e-15).value -
                   fundamental_solution(qp, S, -1, BranchState::principal(lam - h), 1e-15).value) /
                  (2 * h);
      CHECK((d - up.value).norm() / up.value.norm() < 1e-6);
      CMatrix P = up.value.transpose() * qp.space->pairing * (lam * CMatrix::Identity(N, N) - qp.euler) * up.value;
      CHECK((P - X).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

// ------------------------------------------------------------------ monodromy

TEST_CASE("Gram matrix of reflection vectors is chi symmetrized") {
  for (int n = 3; n <= 5; ++n) {
    QuantumProduct qp = quantum_mult_proj(n - 2, 1.0);
    SSeries S = calibration(qp);
    std::vector<GradedVector> alpha;
    for (int k = 0; k <= n - 2; ++k) {
      MonodromyResult r = monodromy_matrix(qp, S, -n, gamma_loop(n, 0.0, k), 1e-13);
      alpha.push_back(reflection_vector(r, qp.space, psi_map(KClass::line(k), qp.space, {0.0})));
    }
    for (int i = 0; i <= n - 2; ++i)
      for (int j = 0; j <= n - 2; ++j) {
        double expect = chi_line(n - 2, j - i) + chi_line(n - 2, i - j);
        CHECK(std::abs(intersection_pairing(alpha[i], alpha[j]) - expect) < 1e-6);
      }
  }
}

TEST_CASE("reflection vectors scale as q^-p") {
  int n = 4;
  std::vector<Cx> logs{0.0, Cx(std::log(2.0), 0.3 * pi)};
  for (int k = 0; k <= n - 2; ++k) {
    std::vector<CVector> beta;
    for (Cx lq : logs) {
      QuantumProduct qp = quantum_mult_proj(n - 2, std::exp(lq));
      MonodromyResult r = monodromy_matrix(qp, calibration(qp), -n, gamma_loop(n, lq, k), 1e-13);
      GradedVector a = reflection_vector(r, qp.space, psi_map(KClass::line(k), qp.space, {lq}));
      beta.push_back(nilpotent_exp(lq * qp.space->divisors[0]) * a.coeffs);
    }
    CHECK((beta[0] - beta[1]).norm() < 1e-6);
  }
}

// ------------------------------------------------------------------ mirror

TEST_CASE("contour integral vanishes on (0, u]") {
  for (int n = 3; n <= 4; ++n)
    for (double q : {0.5, 1.0, 2.0}) {
      double u = critical_value(n, q);
      for (int i = 1; i <= 20; ++i) {
        MBConfig cfg;
        cfg.tol = 1e-8;
        CHECK(std::abs(phi_mellin_barnes(n, q, n, u * i / 20.0, cfg).value) < 1e-6);
      }
    }
}

TEST_CASE("series and contour agree on [1.5, 4] u; longer contours stay inside the tail bound") {
  for (int n = 3; n <= 4; ++n) {
    double u = critical_value(n, 1.0);
    for (int i = 0; i < 10; ++i) {
      double lam = u * (1.5 + 2.5 * i / 9.0);
      MBResult g = phi_mellin_barnes(n, 1.0, n, lam);
      CHECK(std::abs(phi_residue_series(n, 1.0, n, BranchState::principal(lam)) - g.value) < 1e-6);
      if (i % 3 == 0) {
        MBConfig longer;
        longer.T = 1.5 * g.T;
        CHECK(std::abs(phi_mellin_barnes(n, 1.0, n, lam, longer).value - g.value) <= g.tail_bound);
      }
    }
  }
}

// ------------------------------------------------------------------ gathmann

TEST_CASE("vanishing predicate is monotone in k") {
  for (int n = 2; n <= 6; ++n)
    for (int wt = 0; wt <= n - 2; ++wt)
      for (int d = -4; d <= 4; ++d)
        for (bool beta : {false, true})
          for (int k = 1; k <= 10; ++k) {
            CorrelatorDescriptor c{n, wt, k, {}, d, beta};
            if (n >= 3) c.exceptional_powers = {2};
            if (!must_vanish(c)) continue;
            for (int kk = 0; kk < k; ++kk) {
              CorrelatorDescriptor c2 = c;
              c2.k = kk;
              CHECK(must_vanish(c2));
            }
          }
}

TEST_CASE("vanishing predicate ignores the order of exceptional powers") {
  std::mt19937 rng(5);
  for (int n = 4; n <= 6; ++n) {
    std::uniform_int_distribution<int> l(2, n - 1);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<int> ls{l(rng), l(rng), l(rng)};
      CorrelatorDescriptor c{n, trial % (n - 1), trial % 7, ls, trial % 5 - 2, true};
      bool base = must_vanish(c);
      std::sort(c.exceptional_powers.begin(), c.exceptional_powers.end());
      do {
        CHECK(must_vanish(c) == base);
      } while (std::next_permutation(c.exceptional_powers.begin(), c.exceptional_powers.end()));
    }
  }
}

#include "gm/cohomology.hpp"

namespace gm {

namespace {

CMatrix zeros(int n) { return CMatrix::Zero(n, n); }

void require_same(const GradedVector& a, const GradedVector& b) {
  if (!a.space || !b.space) throw usage_error("graded vector without a space");
  if (a.space != b.space &&
      (a.space->kind != b.space->kind || a.space->param != b.space->param))
    throw usage_error("space mismatch: " + a.space->name() + " vs " + b.space->name());
}

// product over Chern roots of f(root), as an operator on H
struct Root {
  int mult;
  CMatrix op;
};

std::vector<Root> tangent_roots(const Space& s) {
  switch (s->kind) {
    case SpaceKind::Proj:
      return {{s->param + 1, s->divisors[0]}};
    case SpaceKind::BlProj: {
      // T Bl = T P^n - (n+1) + n O(-E) + O(E)
      int n = s->param;
      return {{n + 1, s->divisors[0]}, {n, -s->divisors[1]}, {1, s->divisors[1]}};
    }
    default:
      throw usage_error("tangent roots are modelled for Proj and BlProj only");
  }
}

CMatrix root_product(const Space& s, const std::vector<Cx>& series) {
  CMatrix acc = CMatrix::Identity(s->size(), s->size());
  for (const Root& r : tangent_roots(s)) {
    CMatrix f = nilpotent_series(series, r.op);
    for (int i = 0; i < r.mult; ++i) acc = acc * f;
  }
  return acc;
}

CMatrix line_operator(const Space& s, const LineBundle& L, Cx scale) {
  CMatrix D = double(L.a) * s->divisors[0];
  if (L.b != 0) {
    if (s->kind != SpaceKind::BlProj) throw usage_error("O(E) twists need the blowup model");
    D += double(L.b) * s->divisors[1];
  }
  return nilpotent_exp(scale * D);
}

GradedVector chern_impl(const KClass& k, const Space& s, Cx scale) {
  if (s->unit < 0) throw usage_error("Chern characters need a space with a unit");
  CVector v = CVector::Zero(s->size());
  CVector one = CVector::Unit(s->size(), s->unit);
  for (const LineBundle& L : k.terms) v += double(L.mult) * (line_operator(s, L, scale) * one);
  return {s, v};
}

}  // namespace

std::string SpaceModel::name() const {
  switch (kind) {
    case SpaceKind::Proj: return "proj:" + std::to_string(param);
    case SpaceKind::TwistedE: return "twisted:" + std::to_string(param);
    case SpaceKind::BlProj: return "blproj:" + std::to_string(param);
  }
  return "?";
}

Space make_space(SpaceKind kind, int param) {
  auto s = std::make_shared<SpaceModel>();
  s->kind = kind;
  s->param = param;
  if (kind == SpaceKind::Proj) {
    if (param < 1 || param > 8) throw usage_error("Proj(m) needs 1 <= m <= 8");
    int m = param, N = m + 1;
    s->dim = m;
    s->unit = 0;
    CMatrix P = zeros(N);
    for (int i = 0; i < m; ++i) P(i + 1, i) = 1;
    for (int i = 0; i < N; ++i) {
      s->basis.push_back(i == 0 ? "1" : i == 1 ? "p" : "p^" + std::to_string(i));
      s->degrees.push_back(i);
    }
    CMatrix Pk = CMatrix::Identity(N, N);
    for (int i = 0; i < N; ++i) {
      s->cup.push_back(Pk);
      Pk = Pk * P;
    }
    s->pairing = zeros(N);
    for (int i = 0; i < N; ++i) s->pairing(i, m - i) = 1;
    s->theta = zeros(N);
    for (int i = 0; i < N; ++i) s->theta(i, i) = 0.5 * m - i;
    s->rho = double(m + 1) * P;
    s->delta = zeros(N);
    s->divisors = {P};
  } else if (kind == SpaceKind::TwistedE) {
    if (param < 2 || param > 8) throw usage_error("TwistedE(n) needs 2 <= n <= 8");
    int n = param, N = n - 1;
    s->dim = n;
    CMatrix E = zeros(N);  // truncated: e * e^(n-1) = 0
    for (int i = 0; i + 1 < N; ++i) E(i + 1, i) = 1;
    CMatrix Ek = E;
    for (int i = 0; i < N; ++i) {
      s->basis.push_back(i == 0 ? "e" : "e^" + std::to_string(i + 1));
      s->degrees.push_back(i + 1);
      s->cup.push_back(Ek);
      Ek = Ek * E;
    }
    double sg = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^(n-1)
    s->pairing = zeros(N);
    for (int i = 0; i < N; ++i) s->pairing(i, N - 1 - i) = sg;
    s->theta = zeros(N);
    s->delta = zeros(N);
    for (int i = 0; i < N; ++i) {
      s->theta(i, i) = 0.5 * n - (i + 1);
      s->delta(i, i) = -(i + 1);
    }
    s->rho = -double(n - 1) * E;
    s->divisors = {E};
  } else {
    if (param < 2 || param > 8) throw usage_error("BlProj(n) needs 2 <= n <= 8");
    int n = param, N = 2 * n;
    s->dim = n;
    s->unit = 0;
    // indices 0..n: h^i, indices n+1..2n-1: e^k
    auto eidx = [n](int k) { return n + k; };
    CMatrix H = zeros(N), E = zeros(N);
    for (int i = 0; i < n; ++i) H(i + 1, i) = 1;
    E(eidx(1), 0) = 1;
    for (int k = 1; k < n - 1; ++k) E(eidx(k + 1), eidx(k)) = 1;
    double sg = (n % 2 == 1) ? 1.0 : -1.0;  // e^n = (-1)^(n-1) h^n
    E(n, eidx(n - 1)) = sg;
    for (int i = 0; i <= n; ++i) {
      s->basis.push_back(i == 0 ? "1" : i == 1 ? "h" : "h^" + std::to_string(i));
      s->degrees.push_back(i);
    }
    for (int k = 1; k < n; ++k) {
      s->basis.push_back(k == 1 ? "e" : "e^" + std::to_string(k));
      s->degrees.push_back(k);
    }
    CMatrix Hk = CMatrix::Identity(N, N);
    for (int i = 0; i <= n; ++i) {
      s->cup.push_back(Hk);
      Hk = Hk * H;
    }
    CMatrix Ek = E;
    for (int k = 1; k < n; ++k) {
      s->cup.push_back(Ek);
      Ek = Ek * E;
    }
    s->pairing = zeros(N);
    for (int i = 0; i <= n; ++i) s->pairing(i, n - i) = 1;
    for (int k = 1; k < n; ++k) s->pairing(eidx(k), eidx(n - k)) = sg;
    s->theta = zeros(N);
    s->delta = zeros(N);
    for (int i = 0; i < N; ++i) s->theta(i, i) = 0.5 * n - s->degrees[i];
    for (int k = 1; k < n; ++k) s->delta(eidx(k), eidx(k)) = -k;
    s->rho = double(n + 1) * H - double(n - 1) * E;
    s->divisors = {H, E};
  }
  return s;
}

GradedVector basis_vector(const Space& s, int i) {
  if (i < 0 || i >= s->size()) throw usage_error("basis index out of range");
  return {s, CVector::Unit(s->size(), i)};
}

GradedVector unit_class(const Space& s) {
  if (s->unit < 0) throw usage_error(s->name() + " has no unit class");
  return basis_vector(s, s->unit);
}

CMatrix cup_operator(const GradedVector& a) {
  const Space& s = a.space;
  CMatrix M = CMatrix::Zero(s->size(), s->size());
  for (int i = 0; i < s->size(); ++i)
    if (a.coeffs(i) != Cx(0)) M += a.coeffs(i) * s->cup[i];
  return M;
}

GradedVector cup(const GradedVector& a, const GradedVector& b) {
  require_same(a, b);
  return {a.space, cup_operator(a) * b.coeffs};
}

Cx poincare(const GradedVector& a, const GradedVector& b) {
  require_same(a, b);
  return (a.coeffs.transpose() * a.space->pairing * b.coeffs)(0, 0);
}

Cx integrate(const GradedVector& a) { return poincare(unit_class(a.space), a); }

KClass KClass::dual() const {
  KClass r = *this;
  for (auto& t : r.terms) {
    t.a = -t.a;
    t.b = -t.b;
  }
  return r;
}

KClass KClass::operator+(const KClass& o) const {
  KClass r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return r;
}

KClass KClass::operator-(const KClass& o) const {
  KClass r = *this;
  for (auto t : o.terms) {
    t.mult = -t.mult;
    r.terms.push_back(t);
  }
  return r;
}

std::vector<Cx> gamma_one_plus_series(int order) {
  // log Gamma(1+x) = -gamma x + sum_{k>=2} (-1)^k zeta(k)/k x^k
  CJet lg(order, 0.0);
  if (order >= 1) lg[1] = -euler_gamma;
  for (int k = 2; k <= order; ++k) lg[k] = ((k % 2 == 0) ? 1.0 : -1.0) * zeta_value(k) / k;
  CJet g = exp(lg);
  std::vector<Cx> c(order + 1);
  for (int k = 0; k <= order; ++k) c[k] = g[k];
  return c;
}

std::vector<Cx> todd_series(int order) {
  // x / (1 - e^{-x}) = 1 / sum_j (-1)^j x^j / (j+1)!
  CJet d(order, 1.0);
  double f = 1;
  for (int j = 1; j <= order; ++j) {
    f *= (j + 1);
    d[j] = ((j % 2 == 0) ? 1.0 : -1.0) / f;
  }
  CJet t = reciprocal(d);
  std::vector<Cx> c(order + 1);
  for (int k = 0; k <= order; ++k) c[k] = t[k];
  return c;
}

GradedVector gamma_class(const Space& s) {
  CMatrix G = root_product(s, gamma_one_plus_series(s->dim));
  return {s, G * unit_class(s).coeffs};
}

GradedVector todd_class(const Space& s) {
  CMatrix T = root_product(s, todd_series(s->dim));
  return {s, T * unit_class(s).coeffs};
}

GradedVector chern_character(const KClass& k, const Space& s) { return chern_impl(k, s, 1.0); }

GradedVector twisted_chern_character(const KClass& k, const Space& s) {
  return chern_impl(k, s, 2.0 * pi * iu);
}

Cx euler_char(const KClass& E, const KClass& F, const Space& s) {
  GradedVector v = cup(cup(chern_character(E.dual(), s), chern_character(F, s)), todd_class(s));
  return integrate(v);
}

GradedVector psi_map(const KClass& k, const Space& s, const std::vector<Cx>& log_q) {
  if (s->kind == SpaceKind::TwistedE) throw usage_error("psi_map needs Proj or BlProj");
  if (log_q.size() != s->divisors.size())
    throw usage_error("psi_map: need one log q per divisor generator");
  CMatrix D = CMatrix::Zero(s->size(), s->size());
  for (size_t i = 0; i < log_q.size(); ++i) D -= log_q[i] * s->divisors[i];
  CMatrix G = root_product(s, gamma_one_plus_series(s->dim));
  CVector v = G * (nilpotent_exp(D) * twisted_chern_character(k, s).coeffs);
  return {s, std::pow(2.0 * pi, 0.5 * (1 - s->dim)) * v};
}

GradedVector psi_exceptional(int n, const KClass& k, Cx log_Q) {
  Space bl = blproj(n);
  GradedVector full = psi_map(k, bl, {0.0, double(n - 1) * log_Q});
  Space tw = twisted(n);
  CVector v(n - 1);
  for (int i = 0; i < n - 1; ++i) v(i) = full.coeffs(n + 1 + i);
  return {tw, v};
}

CMatrix euler_form(const Space& s) {
  int N = s->size();
  CMatrix ph = CMatrix::Zero(N, N);
  for (int i = 0; i < N; ++i) ph(i, i) = std::exp(pi * iu * s->theta(i, i));
  return (s->pairing * ph * nilpotent_exp(pi * iu * s->rho)) / (2.0 * pi);
}

CMatrix intersection_form(const Space& s) {
  CMatrix X = euler_form(s);
  return X + X.transpose();
}

Cx euler_pairing(const GradedVector& a, const GradedVector& b) {
  require_same(a, b);
  return (a.coeffs.transpose() * euler_form(a.space) * b.coeffs)(0, 0);
}

Cx intersection_pairing(const GradedVector& a, const GradedVector& b) {
  Cx ab = euler_pairing(a, b);
  Cx ba = euler_pairing(b, a);
  return ab + ba;
}

}  // namespace gm

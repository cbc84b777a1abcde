#include "gm/quantum.hpp"

namespace gm {

namespace {

// generalized binomial coefficient, r any integer
double binom(int r, int j) {
  double b = 1;
  for (int i = 0; i < j; ++i) b = b * double(r - i) / double(i + 1);
  return b;
}

Cx ipow(Cx x, int e) {
  Cx r = 1;
  Cx b = e >= 0 ? x : 1.0 / x;
  for (int i = 0; i < std::abs(e); ++i) r *= b;
  return r;
}

std::vector<GradedVector> apply_columns(const Space& s, const OpSeries& op, const CVector& v,
                                        int K) {
  std::vector<GradedVector> out;
  for (int j = 0; j <= K; ++j) out.push_back({s, op.at(j) * v});
  return out;
}

// degrees d with d(n-1) <= K + n
int max_degree(int n, int K) { return (K + n) / (n - 1); }

SSeries assemble(const Space& s, Cx param, int K,
                 const std::function<std::vector<GradedVector>(int)>& column) {
  SSeries out{s, param, K, {}};
  int N = s->size();
  out.coeffs.assign(K + 1, CMatrix::Zero(N, N));
  for (int i = 0; i < N; ++i) {
    auto col = column(i);
    for (int k = 0; k <= K; ++k) out.coeffs[k].col(i) = col[k].coeffs;
  }
  return out;
}

}  // namespace

QuantumProduct quantum_mult_proj(int m, Cx q) {
  Space s = proj(m);
  int N = m + 1;
  CMatrix P = s->divisors[0];
  P(0, m) = q;
  QuantumProduct qp{s, q, {}, double(m + 1) * P};
  CMatrix Pk = CMatrix::Identity(N, N);
  for (int i = 0; i < N; ++i) {
    qp.mult.push_back(Pk);
    Pk = Pk * P;
  }
  return qp;
}

QuantumProduct quantum_mult_twisted(int n, Cx Q) {
  if (Q == Cx(0)) throw usage_error("twisted quantum product needs Q != 0");
  Space s = twisted(n);
  CMatrix E = s->divisors[0];
  E(0, n - 2) = ((n % 2 == 0) ? 1.0 : -1.0) * ipow(Q, -(n - 1));
  QuantumProduct qp{s, Q, {}, -double(n - 1) * E};
  CMatrix Ek = E;
  for (int i = 0; i < n - 1; ++i) {
    qp.mult.push_back(Ek);
    Ek = Ek * E;
  }
  return qp;
}

OpSeries OpSeries::constant(const CMatrix& A, int top) { return {0, top, {A}}; }

CMatrix OpSeries::at(int power) const {
  if (power < lo || power > hi() || power > top) return CMatrix::Zero(c[0].rows(), c[0].cols());
  return c[power - lo];
}

OpSeries operator*(const OpSeries& a, const OpSeries& b) {
  OpSeries r;
  r.top = std::min(a.top, b.top);
  r.lo = a.lo + b.lo;
  int hi = std::min(a.hi() + b.hi(), r.top);
  int N = int(a.c[0].rows());
  if (hi < r.lo) {
    r.c.assign(1, CMatrix::Zero(N, N));
    return r;
  }
  r.c.assign(hi - r.lo + 1, CMatrix::Zero(N, N));
  for (int i = 0; i < int(a.c.size()); ++i)
    for (int j = 0; j < int(b.c.size()); ++j) {
      int p = a.lo + i + b.lo + j;
      if (p > hi) break;
      r.c[p - r.lo] += a.c[i] * b.c[j];
    }
  return r;
}

OpSeries operator*(Cx s, OpSeries a) {
  for (auto& m : a.c) m *= s;
  return a;
}

OpSeries linear_power(const CMatrix& A, Cx c, int r, int top) {
  // (A + c z)^r = c^r w^-r sum_j binom(r, j) (A/c)^j w^j
  int N = int(A.rows());
  if (c == Cx(0)) {
    if (r < 0) throw pole_error("linear_power: negative power of a nilpotent operator");
    CMatrix Ar = CMatrix::Identity(N, N);
    for (int j = 0; j < r; ++j) Ar = Ar * A;
    return OpSeries::constant(Ar, top);
  }
  OpSeries s;
  s.lo = -r;
  s.top = top;
  CMatrix Aj = CMatrix::Identity(N, N);
  Cx scale = ipow(c, r);
  for (int j = 0; j <= N && s.lo + j <= top; ++j) {
    if (Aj.isZero(0)) break;
    double b = binom(r, j);
    s.c.push_back((b * scale) * Aj);
    Aj = (Aj * A) / c;
  }
  if (s.c.empty()) s.c.push_back(CMatrix::Zero(N, N));
  return s;
}

namespace {

// adds the w >= 0 part of t into acc (acc.lo = 0)
void accumulate(OpSeries& acc, const OpSeries& t, int K) {
  int N = int(acc.c[0].rows());
  for (int p = std::max(0, t.lo); p <= std::min(t.hi(), K); ++p) {
    while (acc.hi() < p) acc.c.push_back(CMatrix::Zero(N, N));
    acc.c[p] += t.at(p);
  }
}

}  // namespace

std::vector<GradedVector> s_inverse_proj(int m, Cx q, int i, int K) {
  if (i < 0 || i > m) throw usage_error("s_inverse_proj: class index out of range");
  Space s = proj(m);
  int n = m + 2, N = m + 1;
  const CMatrix& P = s->divisors[0];
  CVector one = CVector::Unit(N, 0);
  OpSeries acc = OpSeries::constant(s->cup[i], K);
  for (int d = 1; d <= max_degree(n, K); ++d) {
    OpSeries t = linear_power(P, -double(d), i, K);
    for (int j = 1; j <= d; ++j) t = t * linear_power(P, -double(j), -(n - 1), K);
    accumulate(acc, ipow(q, d) * t, K);
  }
  return apply_columns(s, acc, one, K);
}

std::vector<GradedVector> s_inverse_twisted(int n, Cx Q, int i, int K) {
  if (i < 1 || i > n - 1) throw usage_error("s_inverse_twisted: class index out of range");
  if (Q == Cx(0)) throw usage_error("s_inverse_twisted: Q = 0");
  Space s = twisted(n);
  int N = n - 1;
  const CMatrix& E = s->divisors[0];
  CVector e1 = CVector::Unit(N, 0);
  OpSeries acc = OpSeries::constant(CMatrix::Zero(N, N), K);
  CVector head = CVector::Unit(N, i - 1);
  for (int d = 1; d <= max_degree(n, K); ++d) {
    OpSeries t = linear_power(E, double(d), -(n - i), K);
    for (int j = 1; j < d; ++j) t = t * linear_power(E, double(j), -(n - 1), K);
    Cx sign = ((d * n) % 2 == 0) ? 1.0 : -1.0;
    accumulate(acc, (sign * ipow(Q, -d * (n - 1))) * t, K);
  }
  auto out = apply_columns(s, acc, e1, K);
  out[0].coeffs += head;
  return out;
}

std::vector<GradedVector> s_inverse_blowup_unit(int n, Cx q1, int K) {
  Space s = blproj(n);
  int N = s->size();
  const CMatrix& E = s->divisors[1];
  CVector one = CVector::Unit(N, 0);
  CVector e = CVector::Unit(N, n + 1);
  OpSeries acc = OpSeries::constant(CMatrix::Zero(N, N), K);
  for (int d = 1; d <= max_degree(n, K); ++d) {
    OpSeries t = linear_power(E, double(d), -n, K);
    for (int j = 1; j < d; ++j) t = t * linear_power(E, double(j), -(n - 1), K);
    Cx sign = ((d * n) % 2 == 0) ? 1.0 : -1.0;
    accumulate(acc, (sign * ipow(q1, d)) * t, K);
  }
  auto out = apply_columns(s, acc, e, K);
  out[0].coeffs += one;
  return out;
}

std::vector<CVector> blowup_unit_term(int n, int d1, int d2, int K) {
  if (d1 < 0 || d2 < 0) throw usage_error("blowup_unit_term: negative degree");
  Space s = blproj(n);
  int N = s->size();
  const CMatrix& H = s->divisors[0];
  const CMatrix& E = s->divisors[1];
  CMatrix P1 = H - E;
  OpSeries t = OpSeries::constant(CMatrix::Identity(N, N), K);
  int shift = d2 - d1;
  if (shift > 0) {
    for (int j = 1; j <= shift; ++j) t = t * linear_power(E, -double(j), -1, K);
  } else {
    for (int j = shift + 1; j <= 0; ++j) t = t * linear_power(E, -double(j), 1, K);
  }
  for (int j = 1; j <= d1; ++j) t = t * linear_power(P1, -double(j), -n, K);
  for (int j = 1; j <= d2; ++j) t = t * linear_power(H, -double(j), -1, K);
  CVector one = CVector::Unit(N, 0);
  std::vector<CVector> out;
  for (int p = 0; p <= K; ++p) out.push_back(t.at(p) * one);
  // terms with w^(<0) would be a bug in the closed form
  for (int p = t.lo; p < 0; ++p)
    if (!(t.at(p) * one).isZero(1e-14)) throw numeric_error("blowup term has positive z-powers");
  return out;
}

SSeries s_inverse_series_proj(int m, Cx q, int K) {
  return assemble(proj(m), q, K, [&](int i) { return s_inverse_proj(m, q, i, K); });
}

SSeries s_inverse_series_twisted(int n, Cx Q, int K) {
  return assemble(twisted(n), Q, K, [&](int i) { return s_inverse_twisted(n, Q, i + 1, K); });
}

SSeries s_from_inverse(const SSeries& sinv) {
  SSeries s = sinv;
  CMatrix G = sinv.space->pairing;
  CMatrix Gi = G.inverse();
  for (int k = 0; k <= sinv.K; ++k) {
    double sg = (k % 2 == 0) ? 1.0 : -1.0;
    s.coeffs[k] = sg * (Gi * sinv.coeffs[k].transpose() * G);
  }
  return s;
}

double symplectic_defect(const SSeries& s, const SSeries& sinv) {
  int K = std::min(s.K, sinv.K);
  int N = s.space->size();
  double worst = 0;
  for (int k = 0; k <= K; ++k) {
    CMatrix acc = CMatrix::Zero(N, N);
    for (int j = 0; j <= k; ++j) acc += s.coeffs[j] * sinv.coeffs[k - j];
    if (k == 0) acc -= CMatrix::Identity(N, N);
    worst = std::max(worst, acc.cwiseAbs().maxCoeff());
  }
  return worst;
}

CMatrix cyclic_sign_matrix(int n) {
  int N = n - 1;
  CMatrix eps = CMatrix::Zero(N, N);
  for (int i = 0; i + 1 < N; ++i) eps(i + 1, i) = 1;
  eps(0, N - 1) += (n % 2 == 0) ? 1.0 : -1.0;
  return eps;
}

CMatrix delta_conjugate(int n, Cx Q, const CMatrix& A) {
  int N = n - 1;
  CMatrix r = A;
  // Delta = diag(-k) on e^k
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) r(a, b) *= ipow(Q, -(a + 1) + (b + 1));
  return r;
}

}  // namespace gm

#pragma once

// Finite models of three cohomology theories: projective space, the
// reduced cohomology of the exceptional divisor (twisted theory) and the
// one-point blowup of P^n.  Everything is a small dense matrix over the
// graded basis; classes are built by evaluating power series on nilpotent
// cup-product operators and applying them to the unit.

#include "gm/numerics.hpp"

#include <memory>
#include <string>
#include <vector>

namespace gm {

enum class SpaceKind { Proj, TwistedE, BlProj };

struct SpaceModel {
  SpaceKind kind;
  int param = 0;  // m for Proj(m), n for TwistedE(n) / BlProj(n)
  int dim = 0;    // complex dimension entering theta and the Psi normalization
  std::vector<std::string> basis;
  std::vector<double> degrees;
  std::vector<CMatrix> cup;        // cup[i] = cup product by basis element i
  CMatrix pairing, theta, rho, delta;
  std::vector<CMatrix> divisors;   // Proj: {p}; BlProj: {h, e}; TwistedE: {e}
  int unit = -1;                   // index of 1, absent in the twisted model

  int size() const { return int(basis.size()); }
  std::string name() const;
};

using Space = std::shared_ptr<const SpaceModel>;

Space make_space(SpaceKind kind, int param);
inline Space proj(int m) { return make_space(SpaceKind::Proj, m); }
inline Space twisted(int n) { return make_space(SpaceKind::TwistedE, n); }
inline Space blproj(int n) { return make_space(SpaceKind::BlProj, n); }

struct GradedVector {
  Space space;
  CVector coeffs;
};

GradedVector basis_vector(const Space& s, int i);
GradedVector unit_class(const Space& s);
GradedVector cup(const GradedVector& a, const GradedVector& b);
// the matrix of cup product by a
CMatrix cup_operator(const GradedVector& a);
Cx integrate(const GradedVector& a);  // (1, a)
Cx poincare(const GradedVector& a, const GradedVector& b);

// K-classes: integer combinations of line bundles O(a H + b E).  On Proj(m)
// only a is used (H = hyperplane); on BlProj(n) H is the pullback of the
// hyperplane class and E the exceptional divisor.
struct LineBundle {
  int mult = 1;
  int a = 0;
  int b = 0;
};

struct KClass {
  std::vector<LineBundle> terms;

  static KClass line(int a, int b = 0) { return KClass{{{1, a, b}}}; }
  // O((j)E) - O((j-1)E), the sheaf labelled O_E(j) in the blowup literature
  static KClass exceptional(int j) { return KClass{{{1, 0, j}, {-1, 0, j - 1}}}; }
  KClass dual() const;
  KClass operator+(const KClass& o) const;
  KClass operator-(const KClass& o) const;
};

GradedVector gamma_class(const Space& s);
GradedVector todd_class(const Space& s);
GradedVector chern_character(const KClass& k, const Space& s);
// (2 pi i)^deg ch
GradedVector twisted_chern_character(const KClass& k, const Space& s);
Cx euler_char(const KClass& E, const KClass& F, const Space& s);

// Psi_q(E) = (2pi)^((1-dim)/2) Gamma-hat * exp(-sum_i D_i log q_i) * (2pi i)^deg ch(E).
// log_q holds one branch value per divisor generator of the space.
GradedVector psi_map(const KClass& k, const Space& s, const std::vector<Cx>& log_q);
// Psi of a blowup class projected on the span of e, ..., e^(n-1), read in
// the twisted basis.  log_Q is log of the exceptional Novikov root Q.
GradedVector psi_exceptional(int n, const KClass& k, Cx log_Q);

// <a,b> = (1/2pi)(a, e^{pi i theta} e^{pi i rho} b)
Cx euler_pairing(const GradedVector& a, const GradedVector& b);
// (a|b) = <a,b> + <b,a>, symmetric bit for bit
Cx intersection_pairing(const GradedVector& a, const GradedVector& b);
CMatrix euler_form(const Space& s);
CMatrix intersection_form(const Space& s);

// Coefficients of Gamma(1+x), and the generating series used by todd_class.
std::vector<Cx> gamma_one_plus_series(int order);
std::vector<Cx> todd_series(int order);

}  // namespace gm

#pragma once

// Scalar kernels shared by every other module: complex gamma family,
// truncated Taylor jets, branch-tracked powers, and an adaptive
// Dormand-Prince integrator that walks matrix ODEs along paths in C.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gm {

using Cx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double euler_gamma = 0.577215664901532860606512090082402431;
inline constexpr Cx iu{0.0, 1.0};

// Bad input the caller could have avoided (exit code 64 territory).
struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
// Numerical breakdown: poles, ambiguous spectra, step underflow, ...
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct pole_error : numeric_error {
  using numeric_error::numeric_error;
};

// ---------------------------------------------------------------- gamma

Cx log_gamma(Cx z);
Cx polygamma(int k, Cx z);
// zeta(k) for 2 <= k <= 13, tabulated once from polygamma at 1.
double zeta_value(int k);

// ---------------------------------------------------------------- jets

inline constexpr int max_jet_order = 12;

// Truncated Taylor array in one formal variable w.  Products sum in a
// fixed order so results are reproducible bit for bit.
template <class T>
class Jet {
 public:
  Jet() = default;
  explicit Jet(int order, T c0 = T(0)) : order_(order) {
    if (order < 0 || order > max_jet_order)
      throw usage_error("jet order out of range");
    c_.fill(T(0));
    c_[0] = c0;
  }
  // the jet of w -> at + w
  static Jet variable(int order, T at) {
    Jet j(order, at);
    if (order >= 1) j.c_[1] = T(1);
    return j;
  }

  int order() const { return order_; }
  T& operator[](int k) { return c_[k]; }
  const T& operator[](int k) const { return c_[k]; }
  T value() const { return c_[0]; }

  Jet& operator+=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(T s) {
    for (int k = 0; k <= order_; ++k) c_[k] *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= T(-1); }
  friend Jet operator*(Jet a, T s) { return a *= s; }
  friend Jet operator*(T s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) {
      T acc(0);
      for (int j = 0; j <= k; ++j) acc += a.c_[j] * b.c_[k - j];
      r.c_[k] = acc;
    }
    return r;
  }

 private:
  std::array<T, max_jet_order + 1> c_{};
  int order_ = 0;
};

template <class T>
Jet<T> exp(const Jet<T>& a) {
  Jet<T> r(a.order(), std::exp(a[0]));
  for (int k = 1; k <= a.order(); ++k) {
    T acc(0);
    for (int j = 1; j <= k; ++j) acc += T(double(j)) * a[j] * r[k - j];
    r[k] = acc / T(double(k));
  }
  return r;
}

template <class T>
Jet<T> reciprocal(const Jet<T>& a) {
  if (a[0] == T(0)) throw pole_error("reciprocal of a jet with zero constant term");
  Jet<T> r(a.order(), T(1) / a[0]);
  for (int k = 1; k <= a.order(); ++k) {
    T acc(0);
    for (int j = 1; j <= k; ++j) acc += a[j] * r[k - j];
    r[k] = -acc * r[0];
  }
  return r;
}

// w -> f(s*w): coefficient k picks up s^k
template <class T>
Jet<T> rescaled(Jet<T> a, T s) {
  T p(1);
  for (int k = 0; k <= a.order(); ++k) {
    a[k] *= p;
    p *= s;
  }
  return a;
}

template <class T>
Jet<T> pow(const Jet<T>& a, int e) {
  Jet<T> r(a.order(), T(1));
  for (int i = 0; i < e; ++i) r = r * a;
  return r;
}

using CJet = Jet<Cx>;

CJet log_gamma_jet(Cx z, int order);
// Taylor coefficients of w -> 1/Gamma(z + w); fine at the poles of Gamma.
CJet recip_gamma_jet(Cx z, int order);

// ---------------------------------------------------------------- branches

struct BranchState {
  Cx base;
  Cx log_value;
  static BranchState principal(Cx z) { return {z, std::log(z)}; }
};

Cx branch_power(const BranchState& b, Cx s);
// jet of w -> lambda^(a + w) on the tracked branch
CJet branch_power_jet(const BranchState& b, Cx a, int order);

// ---------------------------------------------------------------- paths

struct Segment {
  Cx z0, z1;
};
// Counterclockwise when angle1 > angle0.
struct Arc {
  Cx center;
  double radius = 0, angle0 = 0, angle1 = 0;
  int orientation() const { return angle1 >= angle0 ? 1 : -1; }
};
using Piece = std::variant<Segment, Arc>;

struct PathSpec {
  std::vector<Piece> pieces;
  std::optional<BranchState> start;  // principal branch at the start if empty
};

Cx piece_point(const Piece& p, double s);    // s = arclength from the piece start
Cx piece_tangent(const Piece& p, double s);  // unit dlambda/ds
double piece_length(const Piece& p);
Cx path_start(const PathSpec& path);
Cx path_end(const PathSpec& path);
double path_length(const PathSpec& path);
bool is_closed(const PathSpec& path, double tol = 1e-12);
// pieces that share endpoints within tol
bool is_connected(const PathSpec& path, double tol = 1e-12);
PathSpec reversed(const PathSpec& path);
PathSpec concatenated(const PathSpec& a, const PathSpec& b);

// ---------------------------------------------------------------- ODE

using Rhs = std::function<CMatrix(Cx, const CMatrix&)>;

struct OdeSample {
  Cx lambda;
  Cx log_lambda;
  double arclength;
  double step;
};

struct OdeOptions {
  std::vector<Cx> singularities;  // used only to bound the step size
  double min_step = 1e-13;
  long max_steps = 4'000'000;
  std::function<void(const OdeSample&)> observer;
};

struct OdeResult {
  CMatrix Y;
  BranchState branch;
  long steps = 0;
  long rejected = 0;
};

// Dormand-Prince 5(4) along the path.  The local error per step is kept
// below tol times the step length (relative to the solution size), and
// log(lambda) rides along as an extra unknown.
OdeResult ode_continue(const Rhs& rhs, const PathSpec& path, const CMatrix& Y0, double tol,
                       const OdeOptions& opt = {});

// ---------------------------------------------------------------- linear algebra

// Eigenvector for the unique eigenvalue within tol of -1, refined by a few
// rounds of inverse iteration.  Unit 2-norm; the largest entry is made real
// positive.
CVector eig_unit_minus(const CMatrix& M, double tol = 1e-4);

// sum_k c[k] N^k for a nilpotent N (stops early once N^k vanishes)
CMatrix nilpotent_series(const std::vector<Cx>& c, const CMatrix& N);
CMatrix nilpotent_exp(const CMatrix& N);

// nodes and weights on [-1, 1]
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int npts);

// ---------------------------------------------------------------- threads

// GM_THREADS caps the worker count; default is the hardware concurrency
int thread_budget();
// f(i) for i in [0, count), spread over up to thread_budget() workers.
// Callers write into per-index slots and reduce in index order.
void parallel_for(int count, const std::function<void(int)>& f);

}  // namespace gm

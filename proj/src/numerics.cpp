#include "gm/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>
#include <thread>

namespace gm {

namespace {

bool is_nonpositive_integer(Cx z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

// Lanczos sum with g = 671/128 and 14 terms; good to ~1e-15 on Re z >= 1/2.
Cx lanczos_log_gamma(Cx z) {
  static constexpr double cof[14] = {
      57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
      -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
      -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
      .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
      -.261908384015814087e-4, .368991826595316234e-5};
  Cx t = z + 5.24218750000000000;
  Cx head = (z + 0.5) * std::log(t) - t;
  Cx ser = 0.999999999999997092;
  Cx y = z;
  for (double c : cof) {
    y += 1.0;
    ser += c / y;
  }
  return head + std::log(2.5066282746310005 * ser / z);
}

// log sin(pi z), arranged so large |Im z| does not overflow
Cx log_sin_pi(Cx z) {
  if (std::abs(z.imag()) < 5.0) return std::log(std::sin(pi * z));
  if (z.imag() > 0) {
    Cx e2 = std::exp(2.0 * pi * iu * z);
    return -iu * pi * z + std::log((e2 - 1.0) / (2.0 * iu));
  }
  Cx e2 = std::exp(-2.0 * pi * iu * z);
  return iu * pi * z + std::log((1.0 - e2) / (2.0 * iu));
}

constexpr double bernoulli_even[] = {1.0 / 6,          -1.0 / 30,     1.0 / 42,
                                     -1.0 / 30,        5.0 / 66,      -691.0 / 2730,
                                     7.0 / 6,          -3617.0 / 510, 43867.0 / 798,
                                     -174611.0 / 330};

double factorial(int k) {
  double f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Cx polygamma_asymptotic(int k, Cx w) {
  if (k == 0) {
    Cx s = std::log(w) - 0.5 / w;
    Cx w2 = w * w, p = w2;
    for (int j = 1; j <= 10; ++j) {
      s -= bernoulli_even[j - 1] / (2.0 * j * p);
      p *= w2;
    }
    return s;
  }
  Cx wk = std::pow(w, k);
  Cx s = factorial(k - 1) / wk + factorial(k) / (2.0 * wk * w);
  Cx w2 = w * w, p = wk * w2;
  for (int j = 1; j <= 10; ++j) {
    s += bernoulli_even[j - 1] * factorial(2 * j + k - 1) / (factorial(2 * j) * p);
    p *= w2;
  }
  return (k % 2 == 1) ? s : -s;
}

}  // namespace

Cx log_gamma(Cx z) {
  if (is_nonpositive_integer(z)) throw pole_error("log_gamma: pole at a nonpositive integer");
  if (z.real() >= 0.5) return lanczos_log_gamma(z);
  return std::log(pi) - log_sin_pi(z) - lanczos_log_gamma(1.0 - z);
}

Cx polygamma(int k, Cx z) {
  if (k < 0 || k > max_jet_order) throw usage_error("polygamma: order out of range");
  if (is_nonpositive_integer(z)) throw pole_error("polygamma: pole at a nonpositive integer");
  // psi^(k)(z) = psi^(k)(z+N) - (-1)^k k! sum_{j<N} (z+j)^(-k-1)
  int N = 0;
  if (z.real() < 20.0) N = int(std::ceil(20.0 - z.real()));
  Cx shift = 0;
  for (int j = N - 1; j >= 0; --j) shift += std::pow(z + double(j), -(k + 1));
  double sgn = (k % 2 == 0) ? 1.0 : -1.0;
  return polygamma_asymptotic(k, z + double(N)) - sgn * factorial(k) * shift;
}

double zeta_value(int k) {
  static const std::array<double, 14> table = [] {
    std::array<double, 14> t{};
    for (int j = 2; j <= 13; ++j) {
      double sgn = (j % 2 == 0) ? 1.0 : -1.0;
      t[j] = sgn * polygamma(j - 1, 1.0).real() / factorial(j - 1);
    }
    return t;
  }();
  if (k < 2 || k > 13) throw usage_error("zeta_value: index out of range");
  return table[k];
}

CJet log_gamma_jet(Cx z, int order) {
  CJet j(order, log_gamma(z));
  for (int k = 1; k <= order; ++k) j[k] = polygamma(k - 1, z) / factorial(k);
  return j;
}

CJet recip_gamma_jet(Cx z, int order) {
  if (z.real() >= 1.0) return exp(-log_gamma_jet(z, order));
  // 1/Gamma(z+w) = (z+w)(z+1+w)...(z+N-1+w) / Gamma(z+N+w)
  int N = int(std::ceil(1.0 - z.real()));
  CJet prod(order, 1.0);
  for (int j = 0; j < N; ++j) prod = prod * CJet::variable(order, z + double(j));
  return prod * exp(-log_gamma_jet(z + double(N), order));
}

Cx branch_power(const BranchState& b, Cx s) { return std::exp(s * b.log_value); }

CJet branch_power_jet(const BranchState& b, Cx a, int order) {
  CJet j(order, branch_power(b, a));
  for (int k = 1; k <= order; ++k) j[k] = j[k - 1] * b.log_value / double(k);
  return j;
}

// ---------------------------------------------------------------- paths

Cx piece_point(const Piece& p, double s) {
  if (auto seg = std::get_if<Segment>(&p)) {
    double L = std::abs(seg->z1 - seg->z0);
    return L == 0 ? seg->z0 : seg->z0 + (seg->z1 - seg->z0) * (s / L);
  }
  const Arc& a = std::get<Arc>(p);
  double th = a.angle0 + a.orientation() * s / a.radius;
  return a.center + a.radius * std::exp(iu * th);
}

Cx piece_tangent(const Piece& p, double s) {
  if (auto seg = std::get_if<Segment>(&p)) {
    Cx d = seg->z1 - seg->z0;
    return d / std::abs(d);
  }
  const Arc& a = std::get<Arc>(p);
  double th = a.angle0 + a.orientation() * s / a.radius;
  return double(a.orientation()) * iu * std::exp(iu * th);
}

double piece_length(const Piece& p) {
  if (auto seg = std::get_if<Segment>(&p)) return std::abs(seg->z1 - seg->z0);
  const Arc& a = std::get<Arc>(p);
  return a.radius * std::abs(a.angle1 - a.angle0);
}

Cx path_start(const PathSpec& path) {
  if (path.pieces.empty()) throw usage_error("empty path");
  return piece_point(path.pieces.front(), 0.0);
}

Cx path_end(const PathSpec& path) {
  if (path.pieces.empty()) throw usage_error("empty path");
  const Piece& p = path.pieces.back();
  return piece_point(p, piece_length(p));
}

double path_length(const PathSpec& path) {
  double L = 0;
  for (const auto& p : path.pieces) L += piece_length(p);
  return L;
}

bool is_closed(const PathSpec& path, double tol) {
  return std::abs(path_end(path) - path_start(path)) <= tol * std::max(1.0, std::abs(path_start(path)));
}

bool is_connected(const PathSpec& path, double tol) {
  for (size_t i = 1; i < path.pieces.size(); ++i) {
    const Piece& a = path.pieces[i - 1];
    Cx e = piece_point(a, piece_length(a));
    Cx s = piece_point(path.pieces[i], 0.0);
    if (std::abs(e - s) > tol * std::max(1.0, std::abs(s))) return false;
  }
  return true;
}

PathSpec reversed(const PathSpec& path) {
  PathSpec r;
  for (auto it = path.pieces.rbegin(); it != path.pieces.rend(); ++it) {
    if (auto seg = std::get_if<Segment>(&*it))
      r.pieces.push_back(Segment{seg->z1, seg->z0});
    else {
      const Arc& a = std::get<Arc>(*it);
      r.pieces.push_back(Arc{a.center, a.radius, a.angle1, a.angle0});
    }
  }
  return r;
}

PathSpec concatenated(const PathSpec& a, const PathSpec& b) {
  PathSpec r = a;
  r.pieces.insert(r.pieces.end(), b.pieces.begin(), b.pieces.end());
  return r;
}

// ---------------------------------------------------------------- ODE

namespace {

struct State {
  CMatrix Y;
  Cx L;
};

// column-relative size of a matrix error
double column_relative(const CMatrix& err, const CMatrix& Y) {
  double worst = 0;
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    double sc = Y.col(j).cwiseAbs().maxCoeff();
    double e = err.col(j).cwiseAbs().maxCoeff();
    if (sc > 0) worst = std::max(worst, e / sc);
    else worst = std::max(worst, e);
  }
  return worst;
}

}  // namespace

OdeResult ode_continue(const Rhs& rhs, const PathSpec& path, const CMatrix& Y0, double tol,
                       const OdeOptions& opt) {
  if (path.pieces.empty()) throw usage_error("ode_continue: empty path");
  if (!(tol > 0)) throw usage_error("ode_continue: tolerance must be positive");

  // Dormand-Prince 5(4)
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Cx z0 = path_start(path);
  BranchState br = path.start ? *path.start : BranchState::principal(z0);
  if (std::abs(br.base - z0) > 1e-12 * std::max(1.0, std::abs(z0)))
    throw usage_error("ode_continue: branch base does not match the path start");

  State st{Y0, br.log_value};
  OdeResult out;
  double travelled = 0;

  auto dist_to_sing = [&](Cx z) {
    double d = std::numeric_limits<double>::infinity();
    for (Cx u : opt.singularities) d = std::min(d, std::abs(z - u));
    return d;
  };

  for (const Piece& piece : path.pieces) {
    const double L = piece_length(piece);
    if (L == 0) continue;
    auto f = [&](double s, const State& x) {
      Cx z = piece_point(piece, s);
      Cx t = piece_tangent(piece, s);
      if (z == Cx(0)) throw numeric_error("ode_continue: path passes through 0");
      return State{rhs(z, x.Y) * t, t / z};
    };
    double s = 0;
    double h = 0.2 * L;
    State k1 = f(s, st);
    while (s < L) {
      Cx z = piece_point(piece, s);
      double hmax = std::min(0.1 * dist_to_sing(z), 0.2 * L);
      h = std::min({h, hmax, L - s});
      bool last = (L - s) <= h * (1 + 1e-12);
      if (h < opt.min_step && !last) throw numeric_error("ode_continue: step underflow near a singularity");
      if (out.steps + out.rejected > opt.max_steps) throw numeric_error("ode_continue: step budget exhausted");

      auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
        State r{st.Y, st.L};
        for (auto [w, k] : terms) {
          r.Y += (h * w) * k->Y;
          r.L += (h * w) * k->L;
        }
        return r;
      };
      State k2 = f(s + c2 * h, comb({{a21, &k1}}));
      State k3 = f(s + c3 * h, comb({{a31, &k1}, {a32, &k2}}));
      State k4 = f(s + c4 * h, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      State k5 = f(s + c5 * h, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      State k6 = f(s + h, comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      State y5 = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      State k7 = f(s + h, y5);

      CMatrix eY = h * (e1 * k1.Y + e3 * k3.Y + e4 * k4.Y + e5 * k5.Y + e6 * k6.Y + e7 * k7.Y);
      Cx eL = h * (e1 * k1.L + e3 * k3.L + e4 * k4.L + e5 * k5.L + e6 * k6.L + e7 * k7.L);
      double err = std::max(column_relative(eY, y5.Y), std::abs(eL) / std::max(1.0, std::abs(y5.L)));
      if (!y5.Y.allFinite()) err = std::numeric_limits<double>::infinity();

      if (err <= tol * h) {
        s = last ? L : s + h;
        st = y5;
        // keep exp(L) glued to lambda without ever re-reading the principal branch
        Cx znew = piece_point(piece, s);
        st.L += std::log(znew / std::exp(st.L));
        k1 = k7;
        ++out.steps;
        travelled += h;
        if (opt.observer) opt.observer(OdeSample{znew, st.L, travelled, h});
        double fac = err == 0 ? 5.0 : 0.9 * std::pow(tol * h / err, 0.25);
        h *= std::clamp(fac, 0.2, 5.0);
      } else {
        ++out.rejected;
        double fac = std::isfinite(err) ? 0.9 * std::pow(tol * h / err, 0.25) : 0.1;
        h *= std::clamp(fac, 0.1, 0.9);
      }
    }
  }
  out.Y = st.Y;
  out.branch = BranchState{path_end(path), st.L};
  return out;
}

// ---------------------------------------------------------------- linear algebra

CVector eig_unit_minus(const CMatrix& M, double tol) {
  if (M.rows() != M.cols()) throw usage_error("eig_unit_minus: matrix must be square");
  Eigen::ComplexEigenSolver<CMatrix> es(M);
  if (es.info() != Eigen::Success) throw numeric_error("eig_unit_minus: eigensolver failed");
  int hit = -1, count = 0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if (std::abs(es.eigenvalues()(i) + 1.0) < tol) {
      hit = int(i);
      ++count;
    }
  }
  if (count != 1)
    throw numeric_error("eig_unit_minus: expected exactly one eigenvalue near -1, found " +
                        std::to_string(count));
  CVector v = es.eigenvectors().col(hit).normalized();
  Cx mu = es.eigenvalues()(hit);
  CMatrix shifted = M - (mu + Cx(1e-10, 1e-10)) * CMatrix::Identity(M.rows(), M.cols());
  Eigen::PartialPivLU<CMatrix> lu(shifted);
  for (int it = 0; it < 3; ++it) {
    CVector w = lu.solve(v);
    if (!w.allFinite() || w.norm() == 0) break;
    v = w.normalized();
  }
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  v *= std::abs(v(imax)) / v(imax);
  return v;
}

CMatrix nilpotent_series(const std::vector<Cx>& c, const CMatrix& N) {
  CMatrix acc = CMatrix::Zero(N.rows(), N.cols());
  if (c.empty()) return acc;
  CMatrix P = CMatrix::Identity(N.rows(), N.cols());
  acc += c[0] * P;
  for (size_t k = 1; k < c.size(); ++k) {
    P = P * N;
    if (P.cwiseAbs().maxCoeff() == 0) break;
    acc += c[k] * P;
  }
  return acc;
}

CMatrix nilpotent_exp(const CMatrix& N) {
  std::vector<Cx> c(size_t(N.rows()) + 1);
  double f = 1;
  for (size_t k = 0; k < c.size(); ++k) {
    if (k > 0) f *= double(k);
    c[k] = 1.0 / f;
  }
  return nilpotent_series(c, N);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int npts) {
  if (npts < 1) throw usage_error("gauss_legendre: need at least one node");
  // Golub-Welsch on the Legendre Jacobi matrix
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(npts, npts);
  for (int k = 1; k < npts; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(npts), w(npts);
  for (int i = 0; i < npts; ++i) {
    x[i] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    w[i] = 2.0 * v0 * v0;
  }
  // symmetrize away the last-digit noise
  for (int i = 0; i < npts / 2; ++i) {
    double xs = 0.5 * (x[npts - 1 - i] - x[i]);
    double ws = 0.5 * (w[i] + w[npts - 1 - i]);
    x[i] = -xs;
    x[npts - 1 - i] = xs;
    w[i] = w[npts - 1 - i] = ws;
  }
  if (npts % 2 == 1) x[npts / 2] = 0.0;
  return {x, w};
}

// ---------------------------------------------------------------- threads

int thread_budget() {
  int hw = int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("GM_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) return std::min(cap, hw);
  }
  return hw;
}

void parallel_for(int count, const std::function<void(int)>& f) {
  int workers = std::min(thread_budget(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (int i = next++; i < count && !failed; i = next++) {
      try {
        f(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace gm

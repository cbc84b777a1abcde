#include "gm/mirror.hpp"

#include <algorithm>
#include <limits>

namespace gm {

namespace {

double prefactor(int n) { return std::pow(2 * pi, 0.5 * (1 - n)); }

double a_of(int n, int m, double x) { return -0.5 * n + (n - 1) * x + m - 0.5; }

// int_{t0}^{t1} f(t) dt with Gauss-Legendre panels of width about h; the
// panels are spread over threads and summed in panel order
Cx panel_sum(const std::function<Cx(double)>& f, double t0, double t1, double h, int nodes,
             long* evals = nullptr) {
  if (t1 <= t0) return 0.0;
  static thread_local std::pair<int, std::pair<std::vector<double>, std::vector<double>>> cache{
      0, {}};
  if (cache.first != nodes) cache = {nodes, gauss_legendre(nodes)};
  const auto& [x, w] = cache.second;
  int panels = std::max(1, int(std::ceil((t1 - t0) / h)));
  double width = (t1 - t0) / panels;
  constexpr int block = 64;
  int blocks = (panels + block - 1) / block;
  std::vector<Cx> partial(blocks, 0.0);
  parallel_for(blocks, [&](int b) {
    Cx acc = 0;
    for (int p = b * block; p < std::min(panels, (b + 1) * block); ++p) {
      double a = t0 + p * width, mid = a + 0.5 * width;
      Cx s = 0;
      for (int i = 0; i < nodes; ++i) s += w[i] * f(mid + 0.5 * width * x[i]);
      acc += 0.5 * width * s;
    }
    partial[b] = acc;
  });
  if (evals) *evals += long(panels) * nodes;
  Cx total = 0;
  for (Cx v : partial) total += v;
  return total;
}

}  // namespace

double critical_value(int n, double q) {
  if (!(q > 0)) throw usage_error("q must be real positive");
  return (n - 1) * std::pow(q, 1.0 / (n - 1));
}

Cx mb_integrand(int n, double q, int m, double log_lambda, Cx x) {
  Cx a = -0.5 * n + double(n - 1) * x + double(m) - 0.5;
  Cx b = a + 1.0;
  if (b.imag() == 0 && b.real() <= 0 && b.real() == std::round(b.real())) return 0.0;
  // one exponential: the gamma factors are individually far out of range
  return std::exp(-x * std::log(q) + double(n - 1) * log_gamma(x) + a * log_lambda -
                  std::log(x) - log_gamma(b));
}

namespace {

Cx residue_at(int n, double q, int m, const BranchState& lambda, int d) {
  int pole = d == 0 ? n : n - 1;
  int ord = pole - 1;
  if (ord > max_jet_order) throw usage_error("phi_residue_series: n too large for the jet order");
  // q^(d - w)
  CJet qj(ord, std::pow(q, d));
  for (int k = 1; k <= ord; ++k) qj[k] = qj[k - 1] * (-std::log(q)) / double(k);
  // [Gamma(1+w) / prod_{j<=d}(w-j)]^(n-1), the w^-(n-1) is in the pole order
  CJet g = exp(double(n - 1) * log_gamma_jet(1.0, ord));
  CJet den(ord, 1.0);
  for (int j = 1; j <= d; ++j) den = den * CJet::variable(ord, -double(j));
  CJet gam = g * pow(reciprocal(den), n - 1);
  // 1/x, the w^-1 of d = 0 is in the pole order as well
  CJet inv_x = d == 0 ? CJet(ord, 1.0) : reciprocal(CJet::variable(ord, -double(d)));
  double a0 = a_of(n, m, -d);
  CJet lam = rescaled(branch_power_jet(lambda, a0, ord), Cx(n - 1));
  CJet rg = rescaled(recip_gamma_jet(a0 + 1.0, ord), Cx(n - 1));
  CJet all = qj * gam * inv_x * lam * rg;
  return all[ord];
}

}  // namespace

Cx phi_residue_series(int n, double q, int m, const BranchState& lambda, int D) {
  if (n < 2) throw usage_error("phi_residue_series: n >= 2");
  Cx sum = 0;
  for (int d = 0; d <= D; ++d) sum += residue_at(n, q, m, lambda, d);
  return prefactor(n) * 2.0 * pi * iu * sum;
}

Cx phi_residue_series(int n, double q, int m, const BranchState& lambda) {
  if (n < 2) throw usage_error("phi_residue_series: n >= 2");
  Cx sum = 0;
  int quiet = 0;
  for (int d = 0; (n - 1) * d <= 160; ++d) {
    Cx r = residue_at(n, q, m, lambda, d);
    sum += r;
    quiet = std::abs(r) < 1e-16 * std::abs(sum) ? quiet + 1 : 0;
    if (quiet >= 3) return prefactor(n) * 2.0 * pi * iu * sum;
  }
  throw numeric_error("phi_residue_series: residues did not settle; lambda too close to u(q)");
}

MBResult phi_mellin_barnes(int n, double q, int m, double lambda, const MBConfig& cfg) {
  if (!(lambda > 0)) throw usage_error("phi_mellin_barnes: the line integral needs real lambda > 0");
  if (m < 1) throw usage_error("phi_mellin_barnes: m >= 1");
  if (!(cfg.epsilon > 0)) throw usage_error("phi_mellin_barnes: epsilon > 0");
  double L = std::log(lambda);
  double eps = cfg.epsilon;
  auto f = [&](double t) { return mb_integrand(n, q, m, L, Cx(eps, t)); };
  // Stirling: |F| ~ t^(-m-1/2) once the gamma exponentials cancel, and the
  // phase turns at the constant rate (n-1) log(lambda/u).  The tail is below
  // |F(T)| T/(m-1/2) and, integrating by parts, below 2|F(T)|/rate.  Factor 2
  // for the folded half line, 2 more for safety.
  double rate = (n - 1) * std::abs(std::log(lambda / critical_value(n, q)));
  auto bound = [&](double T) {
    double reach = T / (m - 0.5);
    if (rate > 0) reach = std::min(reach, 2.0 / rate);
    return prefactor(n) * 4.0 * std::abs(f(T)) * reach;
  };

  MBResult r;
  double T = cfg.T > 0 ? cfg.T : 64.0;
  Cx acc = panel_sum(f, 0.0, T, cfg.quadrature_step, cfg.nodes_per_panel, &r.evaluations);
  if (cfg.T <= 0) {
    while (bound(T) > cfg.tol / 10 && 2 * T <= cfg.max_T) {
      acc += panel_sum(f, T, 2 * T, cfg.quadrature_step, cfg.nodes_per_panel, &r.evaluations);
      T *= 2;
    }
  }
  // conjugate symmetry folds the lower half of the line onto the upper
  r.value = prefactor(n) * iu * 2.0 * acc.real();
  r.T = T;
  r.tail_bound = bound(T);
  return r;
}

ExponentFit local_exponent_fit(int n, double q, int m, int samples, const MBConfig& cfg) {
  if (m < 1) throw usage_error("local_exponent_fit: m >= 1");
  if (samples < 3) throw usage_error("local_exponent_fit: at least 3 samples");
  double u = critical_value(n, q);
  std::vector<double> xs(samples), ys(samples), gs(samples);
  double expected = m - 0.5;
  double guess = -1;
  for (int j = samples - 1; j >= 0; --j) {
    double s = u * std::pow(10.0, -3.0 + 2.0 * j / (samples - 1));
    MBConfig c = cfg;
    // the power law tells how small the next value will be
    if (guess > 0) c.tol = std::min(cfg.tol, 1e-5 * guess);
    MBResult g = phi_mellin_barnes(n, q, m, u + s, c);
    double mag = std::abs(g.value);
    if (j > 0) guess = mag * std::pow(10.0, -2.0 * expected / (samples - 1));
    xs[j] = std::log(s);
    ys[j] = std::log(mag);
    gs[j] = mag / std::pow(s, expected);
  }
  double mx = 0, my = 0;
  for (int j = 0; j < samples; ++j) {
    mx += xs[j];
    my += ys[j];
  }
  mx /= samples;
  my /= samples;
  double sxx = 0, sxy = 0, syy = 0;
  for (int j = 0; j < samples; ++j) {
    sxx += (xs[j] - mx) * (xs[j] - mx);
    sxy += (xs[j] - mx) * (ys[j] - my);
    syy += (ys[j] - my) * (ys[j] - my);
  }
  ExponentFit fit;
  fit.exponent = sxy / sxx;
  fit.r_squared = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  fit.limit_ratio = gs[0];
  double lo = gs[0], hi = gs[0];
  for (int j = 0; j <= samples / 2; ++j) {
    lo = std::min(lo, gs[j]);
    hi = std::max(hi, gs[j]);
  }
  fit.ratio_spread = (hi - lo) / std::abs(gs[0]);
  if (fit.r_squared < 0.999) throw numeric_error("local_exponent_fit: poor fit quality");
  return fit;
}

double mellin_inversion_J(int n, double q, const MBConfig& cfg) {
  if (!(q > 0)) throw usage_error("mellin_inversion_J: q > 0");
  double eps = cfg.epsilon;
  auto f = [&](double t) {
    Cx x(eps, t);
    return std::exp(-x * std::log(q) + double(n - 1) * log_gamma(x));
  };
  // |Gamma(eps+it)|^(n-1) ~ e^(-(n-1) pi t/2)
  double T = 2.0 * 45.0 / ((n - 1) * pi) + 10.0;
  Cx acc = panel_sum(f, 0.0, T, cfg.quadrature_step, cfg.nodes_per_panel);
  return acc.real() / pi;
}

double oscillatory_J(int n, double q, double tol) {
  if (!(q > 0)) throw usage_error("oscillatory_J: q > 0");
  if (n == 2) return std::exp(-q);
  if (n != 3 && n != 4) throw usage_error("oscillatory_J: direct quadrature only for n in {2,3,4}");
  const double cut = std::log(60.0);
  if (n == 3) {
    double a = std::log(q) - cut, b = cut;
    auto sweep = [&](double h) {
      int N = int(std::ceil((b - a) / h));
      double s = 0;
      for (int i = 0; i <= N; ++i) {
        double t = a + i * h;
        s += std::exp(-(std::exp(t) + q * std::exp(-t)));
      }
      return s * h;
    };
    double h = 0.5, prev = sweep(h);
    for (int it = 0; it < 12; ++it) {
      h /= 2;
      double cur = sweep(h);
      if (std::abs(cur - prev) < tol * std::abs(cur)) return cur;
      prev = cur;
    }
    throw numeric_error("oscillatory_J: quadrature budget exceeded");
  }
  // n = 4: square box in (t1, t2); outside it the integrand is below e^-60
  double a = std::log(q) - 2 * cut, b = cut;
  auto sweep = [&](double h) {
    int N = int(std::ceil((b - a) / h));
    std::vector<double> rows(N + 1, 0.0);
    parallel_for(N + 1, [&](int i) {
      double t1 = a + i * h, e1 = std::exp(t1), s = 0;
      for (int j = 0; j <= N; ++j) {
        double t2 = a + j * h;
        s += std::exp(-(e1 + std::exp(t2) + q * std::exp(-t1 - t2)));
      }
      rows[i] = s;
    });
    double s = 0;
    for (double v : rows) s += v;
    return s * h * h;
  };
  double h = 0.5, prev = sweep(h);
  for (int it = 0; it < 7; ++it) {
    h /= 2;
    double cur = sweep(h);
    if (std::abs(cur - prev) < tol * std::abs(cur)) return cur;
    prev = cur;
  }
  throw numeric_error("oscillatory_J: quadrature budget exceeded");
}

OscillatoryCheck oscillatory_vs_contour(int n, double q, double tol) {
  if (n != 3 && n != 4) throw usage_error("oscillatory_vs_contour: n in {3,4}");
  const double eps = 0.5;
  auto f = [&](double t) {
    Cx x(eps, t);
    return std::exp(-x * std::log(q) + double(n - 1) * log_gamma(x)) / x;
  };
  double T = 2.0 * 45.0 / ((n - 1) * pi) + 10.0;
  OscillatoryCheck c;
  c.contour = iu * 2.0 * panel_sum(f, 0.0, T, 0.5, 16).real();

  // J(q e^v) ~ exp(-(n-1)(q e^v)^(1/(n-1)))
  double V = std::max(1.0, (n - 1) * std::log(45.0 / (n - 1)) - std::log(q));
  auto [x, w] = gauss_legendre(16);
  int panels = int(std::ceil(V / 0.5));
  double width = V / panels;
  std::vector<double> vals(size_t(panels) * 16);
  parallel_for(int(vals.size()), [&](int idx) {
    int p = idx / 16, i = idx % 16;
    double v = p * width + 0.5 * width * (1 + x[i]);
    vals[idx] = 0.5 * width * w[i] * oscillatory_J(n, q * std::exp(v), tol * 1e-2);
  });
  double s = 0;
  for (double v : vals) s += v;
  c.oscillatory = 2.0 * pi * iu * s;
  c.discrepancy = std::abs(c.oscillatory - c.contour) / std::abs(c.contour);
  return c;
}

LaplaceCheck laplace_spot_check(int n, double q, int m, const std::vector<double>& s_grid,
                                double tol) {
  if (s_grid.empty()) throw usage_error("laplace_spot_check: empty s grid");
  double smin = *std::min_element(s_grid.begin(), s_grid.end());
  if (!(smin > 0)) throw usage_error("laplace_spot_check: s must be positive");
  double u = critical_value(n, q);

  // lambda = u + tau^2 smooths the (lambda-u)^(m-1/2) endpoint
  double tau_max = std::sqrt(45.0 / smin + 10.0);
  auto [x, w] = gauss_legendre(16);
  int panels = int(std::ceil(tau_max / 1.0));
  double width = tau_max / panels;
  int count = panels * 16;
  std::vector<double> lam(count), weight(count);
  for (int p = 0; p < panels; ++p)
    for (int i = 0; i < 16; ++i) {
      double tau = p * width + 0.5 * width * (1 + x[i]);
      lam[p * 16 + i] = u + tau * tau;
      weight[p * 16 + i] = 0.5 * width * w[i] * 2 * tau;
    }
  auto g_rhs = [&](double s, double t) {
    Cx xx(0.5, t);
    Cx e = 0.5 * n - double(n - 1) * xx - double(m) - 0.5;
    return std::exp(-xx * std::log(q) + double(n - 1) * log_gamma(xx) + e * std::log(s)) / xx;
  };
  auto rhs_at = [&](double s) {
    double T = 2.0 * 45.0 / ((n - 1) * pi) + 10.0 + 2.0 * std::abs(std::log(s));
    auto g = [&](double t) { return g_rhs(s, t); };
    return Cx(prefactor(n) * iu * 2.0 * panel_sum(g, 0.0, T, 0.5, 16).real());
  };
  std::vector<Cx> R;
  double rmin = std::numeric_limits<double>::infinity();
  for (double s : s_grid) {
    R.push_back(rhs_at(s));
    rmin = std::min(rmin, std::abs(R.back()));
  }

  // each node only needs the accuracy its weight can amplify
  std::vector<Cx> G(count);
  for (int j = 0; j < count; ++j) {
    MBConfig cfg;
    double amp = count * weight[j] * std::exp(-lam[j] * smin);
    cfg.tol = std::min(1e-6, 0.1 * tol * rmin / std::max(amp, 1e-300));
    G[j] = phi_mellin_barnes(n, q, m, lam[j], cfg).value;
  }

  LaplaceCheck out;
  out.s = s_grid;
  for (size_t i = 0; i < s_grid.size(); ++i) {
    double s = s_grid[i];
    Cx l = 0;
    for (int j = 0; j < count; ++j) l += weight[j] * std::exp(-lam[j] * s) * G[j];
    out.lhs.push_back(l);
    out.rhs.push_back(R[i]);
    out.max_relative = std::max(out.max_relative, std::abs(l - R[i]) / std::abs(R[i]));
  }
  return out;
}

}  // namespace gm

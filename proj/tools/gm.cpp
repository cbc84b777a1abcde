// gm: command-line front end for the verification lab.
//
//   gm reflections --space proj:2 --q 1 --m 4 --tol 1e-5
//   gm reflections --space twisted:3 --Q 1 --k 1
//   gm phi --space twisted:3 --q 1 --format csv
//   gm suite --only gathmann
//
// exit codes: 0 pass, 1 tolerance breach, 2 numeric failure, 64 usage

#include "gm/gathmann.hpp"
#include "gm/mirror.hpp"
#include "gm/monodromy.hpp"
#include "gm/suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using json = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0, kBreach = 1, kNumeric = 2, kUsage = 64;
constexpr double kLoopTol = 1e-13;

struct RunConfig {
  std::string space = "proj:1";
  double q = 1, q_arg = 0, Q = 1;
  int k = -1;  // -1: every loop
  int m = 0;   // 0: the default level for the space
  double tol = 0;  // 0: 1e-5 for reflections, 1e-6 for phi
  std::string out;
  std::string format;
  std::vector<std::string> only;
};

struct SpaceSpec {
  gm::SpaceKind kind;
  int param;
};

SpaceSpec parse_space(const std::string& s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw gm::usage_error("space must look like proj:m, twisted:n or blproj:n");
  std::string head = s.substr(0, colon), tail = s.substr(colon + 1);
  int p = 0;
  try {
    size_t used = 0;
    p = std::stoi(tail, &used);
    if (used != tail.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw gm::usage_error("bad space parameter in '" + s + "'");
  }
  if (head == "proj" && p >= 1) return {gm::SpaceKind::Proj, p};
  if (head == "twisted" && p >= 3) return {gm::SpaceKind::TwistedE, p};
  if (head == "blproj" && p >= 2) return {gm::SpaceKind::BlProj, p};
  throw gm::usage_error("unknown or out-of-range space '" + s + "'");
}

json cx(gm::Cx z) { return json::array({z.real(), z.imag()}); }

json vec(const gm::CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cx(v(i)));
  return a;
}

json header(const std::string& command, const RunConfig& c) {
  json j;
  j["schema"] = "gamma-monodromy/1";
  j["command"] = command;
  j["config"] = {{"space", c.space}, {"q", {{"modulus", c.q}, {"arg_over_pi", c.q_arg}}},
                 {"Q", c.Q},         {"k", c.k},
                 {"m", c.m},         {"tol", c.tol}};
  return j;
}

void emit(const std::string& text, const RunConfig& c) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw gm::usage_error("cannot open " + c.out);
  f << text;
}

// ------------------------------------------------------------ reflections

int cmd_reflections(const RunConfig& c) {
  SpaceSpec sp = parse_space(c.space);
  if (sp.kind == gm::SpaceKind::BlProj) throw gm::usage_error("reflections: use proj:m or twisted:n");
  int n = sp.kind == gm::SpaceKind::Proj ? sp.param + 2 : sp.param;
  int level = c.m > 0 ? c.m : n;
  if (c.k >= n - 1) throw gm::usage_error("reflections: k must be at most n-2");
  std::vector<int> ks;
  for (int k = 0; k <= n - 2; ++k)
    if (c.k < 0 || c.k == k) ks.push_back(k);

  json j = header("reflections", c);
  j["n"] = n;
  j["level"] = -level;
  json items = json::array();
  bool ok = true;

  if (sp.kind == gm::SpaceKind::Proj) {
    if (!(c.q > 0)) throw gm::usage_error("reflections: --q is a modulus and must be positive");
    gm::Cx log_q(std::log(c.q), gm::pi * c.q_arg);
    auto qp = gm::quantum_mult_proj(sp.param, std::exp(log_q));
    auto S = gm::calibration(qp);
    for (int k : ks) {
      auto r = gm::monodromy_matrix(qp, S, -level, gm::gamma_loop(n, log_q, k), kLoopTol);
      auto psi = gm::psi_map(gm::KClass::line(k), qp.space, {log_q});
      int sign = 1;
      auto a = gm::reflection_vector(r, qp.space, psi, &sign);
      double res = (a.coeffs - psi.coeffs).cwiseAbs().maxCoeff();
      bool pass = res < c.tol;
      ok = ok && pass;
      items.push_back({{"k", k},
                       {"alpha", vec(a.coeffs)},
                       {"candidate", "Psi_q(O(" + std::to_string(k) + "))"},
                       {"psi", vec(psi.coeffs)},
                       {"sign", sign},
                       {"residual", res},
                       {"tol", c.tol},
                       {"self_pairing_residual", r.pairing_residual},
                       {"det_residual", std::abs(r.matrix.determinant() + 1.0)},
                       {"ode_tol", kLoopTol},
                       {"pass", pass}});
    }
  } else {
    if (c.q_arg != 0) throw gm::usage_error("reflections: twisted runs take a real positive --Q");
    for (int k : ks) {
      auto t = gm::twisted_reflection_check(n, c.Q, k, level, kLoopTol);
      auto dist = [](gm::Cx z) { return std::min(std::abs(z - 1.0), std::abs(z + 1.0)); };
      double res = std::max({dist(t.direct.constant), dist(t.via_proj.constant),
                             t.direct.residual, t.via_proj.residual});
      bool pass = res < c.tol;
      ok = ok && pass;
      items.push_back({{"k", k},
                       {"candidate", "Psi(O_E(" + std::to_string(1 - k) + "))"},
                       {"psi", vec(t.psi.coeffs)},
                       {"beta_direct", vec(t.beta_direct.coeffs)},
                       {"beta_via_proj", vec(t.beta_via_proj.coeffs)},
                       {"constant_direct", cx(t.direct.constant)},
                       {"constant_via_proj", cx(t.via_proj.constant)},
                       {"raw_ratio", cx(t.raw_ratio)},
                       {"residual", res},
                       {"tol", c.tol},
                       {"exceptional_self_pairing", t.psi_self_pairing},
                       {"det_residual", t.det_residual},
                       {"ode_tol", kLoopTol},
                       {"pass", pass}});
    }
  }
  j["loops"] = items;
  j["pass"] = ok;
  emit(j.dump(2) + "\n", c);
  return ok ? kPass : kBreach;
}

// ------------------------------------------------------------ phi

int cmd_phi(const RunConfig& c) {
  SpaceSpec sp = parse_space(c.space);
  if (sp.kind != gm::SpaceKind::TwistedE) throw gm::usage_error("phi: use twisted:n");
  int n = sp.param;
  if (n > 4) throw gm::usage_error("phi: n must be 3 or 4");
  if (c.q_arg != 0 || !(c.q > 0)) throw gm::usage_error("phi: q must be real positive");
  int m = c.m > 0 ? c.m : n;
  double u = gm::critical_value(n, c.q);
  gm::MBConfig cfg;
  cfg.tol = std::min(1e-9, 0.01 * c.tol);

  struct Row {
    std::string section;
    double lambda;
    gm::Cx series, mb;
    double diff, tol;
    bool has_series;
  };
  std::vector<Row> rows;
  bool ok = true;
  for (int i = 0; i < 12; ++i) {
    double lam = u * (1.25 + 0.25 * i);
    gm::Cx s = gm::phi_residue_series(n, c.q, m, gm::BranchState::principal(lam));
    gm::Cx g = gm::phi_mellin_barnes(n, c.q, m, lam, cfg).value;
    double d = std::abs(s - g);
    ok = ok && d < c.tol;
    rows.push_back({"agreement", lam, s, g, d, c.tol, true});
  }
  for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    gm::Cx g = gm::phi_mellin_barnes(n, c.q, m, f * u, cfg).value;
    ok = ok && std::abs(g) < c.tol;
    rows.push_back({"zero_region", f * u, 0.0, g, std::abs(g), c.tol, false});
  }
  gm::ExponentFit fit = gm::local_exponent_fit(n, c.q, m, 12);
  double off = std::abs(fit.exponent - (m - 0.5));
  ok = ok && off < 0.02;

  if (c.format == "json") {
    json j = header("phi", c);
    j["n"] = n;
    j["u"] = u;
    json a = json::array();
    for (const Row& r : rows) {
      json e = {{"section", r.section}, {"lambda", r.lambda}, {"mellin_barnes", cx(r.mb)}};
      if (r.has_series) e["series"] = cx(r.series);
      e["residual"] = r.diff;
      e["tol"] = r.tol;
      a.push_back(e);
    }
    j["rows"] = a;
    j["exponent"] = {{"value", fit.exponent},
                     {"expected", m - 0.5},
                     {"residual", off},
                     {"tol", 0.02},
                     {"r_squared", fit.r_squared}};
    j["pass"] = ok;
    emit(j.dump(2) + "\n", c);
  } else {
    std::ostringstream o;
    o.precision(15);
    o << "section,lambda,re_series,im_series,re_mb,im_mb,abs_diff,tol\n";
    for (const Row& r : rows) {
      o << r.section << ',' << r.lambda << ',';
      if (r.has_series) o << r.series.real() << ',' << r.series.imag() << ',';
      else o << ",,";
      o << r.mb.real() << ',' << r.mb.imag() << ',' << r.diff << ',' << r.tol << '\n';
    }
    o << "exponent,," << ",," << fit.exponent << ",," << off << ',' << 0.02 << '\n';
    emit(o.str(), c);
  }
  return ok ? kPass : kBreach;
}

// ------------------------------------------------------------ suite

int cmd_suite(const RunConfig& c) {
  std::vector<int> ids;
  if (c.only.empty()) {
    for (int i = 1; i <= 10; ++i) ids.push_back(i);
  } else {
    for (const std::string& key : c.only) ids.push_back(gm::criterion_id(key));
  }
  std::vector<gm::CriterionReport> reports(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) reports[i] = gm::run_criterion(ids[i]);

  json j = header("suite", c);
  json a = json::array();
  bool ok = true;
  for (const auto& r : reports) {
    json checks = json::array();
    for (const auto& ch : r.checks) {
      const char* b = ch.bound == gm::Bound::Below ? "below" : ch.bound == gm::Bound::AtLeast ? "at_least" : "equal";
      checks.push_back({{"name", ch.name}, {"residual", ch.value}, {"tol", ch.limit}, {"bound", b}, {"pass", ch.pass}});
    }
    a.push_back({{"id", r.id}, {"key", r.key}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks}});
    ok = ok && r.pass();
  }
  j["criteria"] = a;
  j["pass"] = ok;
  emit(j.dump(2) + "\n", c);
  return ok ? kPass : kBreach;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical checks of reflection vectors and periods"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* s) {
    s->add_option("--space", cfg.space, "proj:m | twisted:n | blproj:n");
    s->add_option("--q", cfg.q, "modulus of q");
    s->add_option("--q-arg", cfg.q_arg, "argument of q in units of pi");
    s->add_option("--Q", cfg.Q, "Novikov variable of the exceptional class (real positive)");
    s->add_option("--k", cfg.k, "loop index, default all");
    s->add_option("--m", cfg.m, "level m (periods I^(-m)), default n");
    s->add_option("--tol", cfg.tol, "acceptance tolerance")->check(CLI::Range(1e-12, 1e-3));
    s->add_option("--out", cfg.out, "output path, default stdout");
    s->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto* refl = app.add_subcommand("reflections", "extract reflection vectors from loop monodromies");
  auto* phi = app.add_subcommand("phi", "compare the residue series and the Mellin-Barnes integral");
  auto* suite = app.add_subcommand("suite", "run the acceptance checks");
  common(refl);
  common(phi);
  common(suite);
  suite->add_option("--only", cfg.only, "restrict to these items (comma separated)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }
  if (cfg.format.empty()) cfg.format = phi->parsed() ? "csv" : "json";
  if (cfg.tol == 0) cfg.tol = phi->parsed() ? 1e-6 : 1e-5;

  try {
    if (refl->parsed()) {
      if (cfg.format != "json") throw gm::usage_error("reflections writes json only");
      return cmd_reflections(cfg);
    }
    if (phi->parsed()) return cmd_phi(cfg);
    if (cfg.format != "json") throw gm::usage_error("suite writes json only");
    return cmd_suite(cfg);
  } catch (const gm::usage_error& e) {
    std::fprintf(stderr, "usage: %s\n", e.what());
    return kUsage;
  } catch (const gm::numeric_error& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  }
}

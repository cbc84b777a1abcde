#include "gm/gathmann.hpp"

namespace gm {

int weight(const Space& bl, int basis_index) {
  if (bl->kind != SpaceKind::BlProj) throw usage_error("weight is defined on the blowup basis");
  if (basis_index < 0 || basis_index >= bl->size()) throw usage_error("weight: index out of range");
  int n = bl->param;
  return basis_index <= n ? 0 : basis_index - n - 1;
}

bool must_vanish(const CorrelatorDescriptor& c) {
  if (c.n < 2) throw usage_error("must_vanish: n >= 2");
  if (c.k < 0) throw usage_error("must_vanish: negative descendant power");
  if (c.wt_a < 0 || c.wt_a > c.n - 2) throw usage_error("must_vanish: weight out of range");
  int extra = 0;
  for (int l : c.exceptional_powers) {
    if (l < 2 || l > c.n - 1) throw usage_error("must_vanish: exceptional power out of range");
    extra += l - 1;
  }
  int w = c.wt_a + extra;
  if (!c.beta_nonzero) return false;
  if (!(w > 0 || c.d > 0)) return false;
  return w < (c.d + 1) * (c.n - 1) - c.k;
}

GathmannReport crosscheck_against_blS(int n, int K, int Dmax) {
  // n = 2 has c1.l = 1, where the closed form is an I-function with a
  // nontrivial mirror map and its coefficients are not invariants
  if (n < 3 || n > 5) throw usage_error("crosscheck_against_blS: 3 <= n <= 5");
  if (K < 0 || K > 8) throw usage_error("crosscheck_against_blS: K <= 8");
  if (Dmax < 0 || Dmax > 4) throw usage_error("crosscheck_against_blS: Dmax <= 4");
  Space bl = blproj(n);
  const CMatrix& G = bl->pairing;
  GathmannReport rep;
  rep.n = n;
  rep.K = K;
  rep.Dmax = Dmax;

  // d2 = 0 slice against the one-parameter closed form, at a generic q1
  {
    const Cx q1 = 0.37;
    auto unit = s_inverse_blowup_unit(n, q1, K);
    std::vector<CVector> sum(K + 1, CVector::Zero(bl->size()));
    for (int d1 = 0; d1 * (n - 1) <= K + n; ++d1) {
      auto t = blowup_unit_term(n, d1, 0, K);
      for (int j = 0; j <= K; ++j) sum[j] += std::pow(q1, double(d1)) * t[j];
    }
    for (int j = 0; j <= K; ++j) {
      if (!sum[j].allFinite() || !unit[j].coeffs.allFinite())
        throw numeric_error("crosscheck_against_blS: non-finite coefficient");
      rep.unit_column_defect =
          std::max(rep.unit_column_defect, (sum[j] - unit[j].coeffs).cwiseAbs().maxCoeff());
    }
  }

  for (int d1 = 0; d1 <= Dmax; ++d1)
    for (int d2 = 0; d2 <= Dmax; ++d2) {
      if (d1 == 0 && d2 == 0) continue;
      auto coeffs = blowup_unit_term(n, d1, d2, K);
      int d = d1 - d2;
      for (int j = 0; j <= K; ++j) {
        if (!coeffs[j].allFinite()) throw numeric_error("crosscheck_against_blS: non-finite coefficient");
        CVector paired = G * coeffs[j];
        for (int b = 0; b < bl->size(); ++b) {
          double v = std::abs(paired(b));
          int k = n - 2 + (n + 1) * d2 + (n - 1) * d - int(bl->degrees[b]);
          if (j - 2 != k) {
            if (v > 1e-12) ++rep.forbidden_nonzero;
            continue;
          }
          CorrelatorDescriptor c{n, weight(bl, b), k, {}, d, d2 >= 1};
          bool pred = must_vanish(c);
          if (pred) {
            ++rep.checked_true;
            if (v > 1e-12) {
              ++rep.violations;
              rep.worst_violation = std::max(rep.worst_violation, v);
              rep.offending.push_back({d1, d2, j, b, v, pred});
            }
          } else {
            ++rep.checked_false;
            if (v > 1e-12) ++rep.nonzero_false;
          }
        }
      }
    }
  return rep;
}

}  // namespace gm

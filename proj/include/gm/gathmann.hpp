#pragma once

// Vanishing of blowup GW invariants in the style of Gathmann, and a scan of
// the one-point descendants that can be read off from the closed form of
// the blowup S-matrix.

#include "gm/quantum.hpp"

namespace gm {

struct CorrelatorDescriptor {
  int n = 0;
  int wt_a = 0;  // weight of the descendant insertion
  int k = 0;     // descendant power
  std::vector<int> exceptional_powers;  // l_i with 2 <= l_i <= n-1
  int d = 0;     // exceptional degree
  bool beta_nonzero = false;
};

// 0 on the pullback sector, k-1 on e^k
int weight(const Space& bl, int basis_index);
// throws usage_error on out-of-range fields
bool must_vanish(const CorrelatorDescriptor& c);

struct GathmannEntry {
  int d1 = 0, d2 = 0;  // degrees against the two pulled-back hyperplane bundles
  int order = 0;       // power of 1/z
  int basis = 0;       // insertion class
  double value = 0;
  bool predicate = false;
};

struct GathmannReport {
  int n = 0, K = 0, Dmax = 0;
  int checked_true = 0;    // admissible entries where the predicate says zero
  int violations = 0;
  double worst_violation = 0;
  int checked_false = 0;
  int nonzero_false = 0;
  int forbidden_nonzero = 0;     // entries off the dimension constraint that are not zero
  double unit_column_defect = 0; // d2 = 0 slice vs the one-parameter formula
  std::vector<GathmannEntry> offending;
};

GathmannReport crosscheck_against_blS(int n, int K, int Dmax);

}  // namespace gm

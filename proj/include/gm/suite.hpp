#pragma once

// The acceptance checks, one runner per criterion.  Each check records the
// achieved value next to the bound it is held to.

#include <string>
#include <vector>

namespace gm {

enum class Bound { Below, AtLeast, Equal };

struct Check {
  std::string name;
  double value = 0;
  double limit = 0;
  Bound bound = Bound::Below;
  bool pass = false;
};

struct CriterionReport {
  int id = 0;
  std::string key;    // short name used by --only
  std::string title;
  std::vector<Check> checks;
  double seconds = 0;
  bool pass() const;
  // first failing check, or empty
  std::string first_failure() const;
};

// ids 1..10; keys reflections, twisted, transfer, hrr, ladder, pairing, mellin,
// gathmann, recursions, composition
int criterion_id(const std::string& key);
const std::vector<std::string>& criterion_keys();
CriterionReport run_criterion(int id);

}  // namespace gm

#pragma once

#include <string>
#include <vector>

namespace rdg {

struct SelftestCheck {
  std::string name;
  double value = 0.0;  // measured quantity (usually an error)
  double tol = 0.0;
  bool pass = false;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  int failures = 0;
  std::string to_json() const;
};

// Runs the module invariants at reduced resolution. quick halves the sizes
// again. inject_synthesis_bug flips the a^{-n} synthesis measure (test fixture
// proving the inversion check catches a wrong measure).
SelftestReport run_selftest(bool quick, bool inject_synthesis_bug = false);

}  // namespace rdg

#pragma once

#include <string>
#include <vector>

#include "cuspidal/matrix.hpp"

namespace cuspidal {

/// One failed exact identity: which pair of operators, at which lattice
/// point (or window index), and the two sides that were supposed to agree.
struct Violation {
  std::string label_u;
  std::string label_v;
  std::vector<int> b;
  Matrix lhs;
  Matrix rhs;
  std::string detail;
};

struct VerificationReport {
  std::size_t checks = 0;
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }

  void merge(VerificationReport other) {
    checks += other.checks;
    for (auto& v : other.violations) violations.push_back(std::move(v));
  }
};

}  // namespace cuspidal

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace vireg {

struct PropertyResult {
  std::string name;
  bool passed;
  /// Smallest observed slack (negative when violated).
  double worst_margin;
  int samples;
};

struct CheckReport {
  std::string suite;
  std::uint64_t seed;
  std::vector<PropertyResult> properties;

  bool passed() const;
};

/// core-geometry, gap-oracle, bounds-soundness, exactness.
std::vector<std::string> check_suites();

/// Throws DomainError listing the available suites for an unknown name.
CheckReport run_check(const std::string& suite, std::uint64_t seed = 0);

void print_report(std::ostream& os, const CheckReport& report);

}  // namespace vireg

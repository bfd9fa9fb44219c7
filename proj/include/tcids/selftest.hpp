#pragma once

// Embedded property suites for the `selftest` subcommand. Deterministic:
// repeated runs produce the identical pass/fail vector.

#include <string>
#include <vector>

namespace tcids::cli {

struct SelfTestResult {
    std::string name;
    bool passed = false;
    std::string detail;  // counts / first failure
};

std::vector<SelfTestResult> run_selftests();

}  // namespace tcids::cli

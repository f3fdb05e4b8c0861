#pragma once

#include <ostream>

namespace qcm::cli {

/// Entry point shared by the `qcm` binary and the tests.
/// Returns 0 on success, 2 on usage or validation errors, 1 on other failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcm::cli

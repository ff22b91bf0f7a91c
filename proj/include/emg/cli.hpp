#pragma once

#include <ostream>

namespace emg {

/// Entry point behind the emg_sim executable. Returns 0 on success, 2 on a
/// usage or configuration error, 1 on a runtime failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace emg

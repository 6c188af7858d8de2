#pragma once

#include <memory>
#include <string>

#include "vrsmd/mirror.hpp"

namespace vrsmd::cli {

// Exit codes: 0 success, 1 solver/oracle non-convergence, 2 usage/file error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNonConvergence = 1;
inline constexpr int kExitUsage = 2;

// Parses "l2", "power:<delta>", "quad:<H-csv-file>", "entropy".
std::unique_ptr<mirror::MirrorMap> make_mirror(const std::string& spec);

int vrsmd_main(int argc, const char* const* argv);

}  // namespace vrsmd::cli

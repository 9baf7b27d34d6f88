#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mzf::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDomain = 2,
  kParse = 3,
  kBudget = 4,
  kNonAdmissible = 5,
};

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view data);

}  // namespace mzf::cli

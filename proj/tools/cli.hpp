#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "persuasion/response.hpp"

namespace persuasion::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kNumericError = 3 };

/// Expands a level spec: comma-separated tokens, each "inf", a number, or a range
/// "a:b:N" (linear) or "a:b:Nlog" (log-spaced).
std::vector<RationalityLevel> parse_level_spec(const std::string& spec);

/// Inclusive state-count range "A..B" or a single "A".
std::pair<std::size_t, std::size_t> parse_m_range(const std::string& spec);

/// Runs one command line (without the program name). Errors are written to err as JSON.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace persuasion::cli

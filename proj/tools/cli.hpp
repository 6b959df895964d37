#pragma once

#include <iosfwd>

namespace frostdecay {

/// Exit codes: 0 every certificate passed, 1 a certificate failed,
/// 2 usage, parse or parameter error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace frostdecay

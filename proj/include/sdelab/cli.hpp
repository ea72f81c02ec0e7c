#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdelab {

// Command-line front end (subcommands: simulate, certify, analyze, report).
// Exit codes: 0 success, 2 configuration error, 3 simulation failure,
// 4 certificate verification failure, 5 analysis failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdelab

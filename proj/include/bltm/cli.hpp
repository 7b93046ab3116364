#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bltm {

/// Process exit codes, one per outcome class.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;           ///< invalid flags or malformed input
inline constexpr int no_convergence = 2;  ///< iteration/agreement failure, bad start
inline constexpr int double_blowup = 3;   ///< two successive failed iterates
inline constexpr int partial = 4;         ///< sweep finished with unconverged points
}  // namespace exit_code

/// 15-significant-digit CSV number; NaN prints as "nan".
std::string format_csv(double value);

/// Aligned-table cell: 6 decimals, or 1-decimal D-notation (9.5D-04) for
/// magnitudes below 1e-3.
std::string format_cell(double value);

/// Run one subcommand. `args` excludes the program name. All reports go to
/// `out` (or the --output path), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bltm

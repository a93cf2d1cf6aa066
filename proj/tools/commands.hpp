#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "holediff/diffusion.hpp"
#include "holediff/escape.hpp"
#include "holediff/periodic_orbits.hpp"
#include "holediff/records.hpp"
#include "holediff/simulator.hpp"

namespace holediff::cli {

enum class ExitCode : int { Ok = 0, Failure = 1, InvalidConfig = 2, NoConvergence = 3 };

/// Endpoint flags as given on the command line.
struct EndpointArgs {
  std::optional<std::string> a1, a2, a3, a4, h;
};

/// Completes a configuration from partial endpoints: symmetric holes need
/// a1 and a2 (or a1 and h); pinned holes need a3 and h (or a2 and a3);
/// general placement needs all four.
ModelConfig build_config(MapKind kind, Placement placement, const EndpointArgs& args);

/// Hole sizes from a comma list of rationals, "2^-k" items allowed.
std::vector<Rational> parse_h_list(const std::string& text);
/// 2^-k for k = kmin..kmax from "kmin:kmax".
std::vector<Rational> dyadic_h_range(const std::string& text);
/// 1/n for n = nmin..nmax from "nmin:nmax".
std::vector<Rational> reciprocal_h_range(const std::string& text);

ScanTable positions_table(MapKind kind, Placement placement, unsigned s);
ScanTable size_table(ModelFamily family, const Rational& point, LimitMode mode,
                     const std::vector<Rational>& h_values);
ScanTable phi_table(unsigned s, MapKind kind, Placement placement);
ScanTable escape_table(MapKind kind, Placement placement, unsigned s, double tol);
ScanTable simulation_table(const MsdSeries& series);
ScanTable po_table(const ExpansionResult& result);
ScanTable diffusion_table(const ModelConfig& config);

/// "min" / "max" where D is a strict local extremum among its neighbours in
/// the given order, "" elsewhere (including the first and last entries).
std::vector<std::string> local_extrema(const std::vector<Rational>& values);

/// Runs the command line (args exclude the program name) and returns the
/// process exit code: 0 success, 2 invalid configuration or arguments,
/// 3 numerical non-convergence, 1 anything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holediff::cli

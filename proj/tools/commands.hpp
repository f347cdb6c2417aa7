#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsc/json_io.hpp"

namespace qsc::cli {

struct Options {
  std::optional<double> tol;  // overrides every check tolerance
  std::optional<double> t;    // overrides the cut time of the spec
  std::uint64_t seed = 0;
};

const std::vector<std::string>& command_names();

// Runs one command on a parsed spec. Schema problems surface as SchemaError
// or InvalidArgument; failing checks are recorded in the report.
Report run_command(const std::string& command, const json& spec, const Options& opts);

}  // namespace qsc::cli

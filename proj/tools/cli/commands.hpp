#pragma once

#include <iosfwd>

#include "run_config.hpp"

namespace graphforge::cli {

/// Each command writes its declared outputs, prints a short summary to `log`
/// and returns the process exit status. Errors propagate as exceptions.
int cmd_train(const RunConfig& config, std::ostream& log);
int cmd_build(const RunConfig& config, std::ostream& log);
int cmd_classify(const RunConfig& config, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& log);
int cmd_lsh_audit(const RunConfig& config, std::ostream& log);

int run(const RunConfig& config, std::ostream& log);

}  // namespace graphforge::cli

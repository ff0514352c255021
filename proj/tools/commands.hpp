#pragma once

#include <iosfwd>
#include <string>

#include "quermass/run_config.hpp"

namespace quermass::cli {

struct CommandContext {
  RunConfig cfg;
  std::string snapshots_override;  // contours: --snapshots
  std::ostream* log = nullptr;     // short human-readable summary
};

// Each command validates its own extra requirements, then writes under cfg.out.
void cmd_sample(const CommandContext& ctx);
void cmd_scan(const CommandContext& ctx);
void cmd_contours(const CommandContext& ctx);
void cmd_expand(const CommandContext& ctx);
void cmd_check_constants(const CommandContext& ctx);

}  // namespace quermass::cli

#pragma once

#include <string>

namespace tnvote::cli {

// Exit codes are a stable contract: 0 success, 1 input or verification
// failure, 2 protocol abort.

/// Execute the scenario config and write the transcript.
int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::string& seed_override_hex = {});

/// Replay the transcript-level invariants; prints one line per check.
int cmd_verify(const std::string& transcript_path);

/// Summary table: n, m, t, accepted transactions, outcome, balance deltas.
int cmd_census(const std::string& transcript_path);

/// Argument parsing entry point used by the tnvote binary.
int main_entry(int argc, char** argv);

} // namespace tnvote::cli

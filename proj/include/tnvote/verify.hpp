#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace tnvote::audit {

struct CheckResult {
    std::string name;
    bool ok = false;
    std::string detail;
};

/// Replay every transcript-level invariant against a transcript alone,
/// with no protocol re-execution: conservation (global and per
/// transaction), double-spend freedom, the transaction census, abort
/// safety, reveal binding and the outcome against a brute-force tally
/// of the configured votes.
std::vector<CheckResult> verify_transcript(const nlohmann::json& transcript);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace tnvote::audit

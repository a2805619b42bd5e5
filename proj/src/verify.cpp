#include "tnvote/verify.hpp"

#include "tnvote/hash.hpp"

#include <map>
#include <optional>
#include <set>

namespace tnvote::audit {

namespace {

using nlohmann::json;

std::vector<json> accepted_txs(const json& transcript, const std::string& kind = {})
{
    std::vector<json> out;
    for (const json& event : transcript.at("events")) {
        if (event.value("event", "") != "tx-accepted")
            continue;
        if (!kind.empty() && event.value("kind", "") != kind)
            continue;
        out.push_back(event);
    }
    return out;
}

std::uint64_t sum_balances(const json& balances)
{
    std::uint64_t total = 0;
    for (const auto& [name, value] : balances.items())
        total += value.get<std::uint64_t>();
    return total;
}

CheckResult check_structure(const json& t)
{
    for (const char* field : {"format", "config", "board", "initial_balances", "events",
                              "accepted_count", "final_balances", "outcome"})
        if (!t.contains(field))
            return {"structure", false, std::string("missing field: ") + field};
    if (t.at("format") != "tnvote-transcript/1")
        return {"structure", false, "unknown transcript format"};
    return {"structure", true, {}};
}

CheckResult check_global_conservation(const json& t)
{
    std::uint64_t initial = sum_balances(t.at("initial_balances"));
    std::uint64_t final_total = sum_balances(t.at("final_balances"));
    if (initial != final_total)
        return {"global-conservation", false,
                std::to_string(initial) + " initial vs " + std::to_string(final_total)
                    + " final"};
    return {"global-conservation", true, {}};
}

CheckResult check_tx_conservation(const json& t)
{
    for (const json& event : accepted_txs(t)) {
        const json& tx = event.at("tx");
        std::uint64_t in = 0, out = 0;
        for (const json& input : tx.at("inputs"))
            in += input.at("value").get<std::uint64_t>();
        for (const json& output : tx.at("outputs"))
            out += output.at("value").get<std::uint64_t>();
        if (in != out)
            return {"tx-conservation", false,
                    "tx " + tx.at("txid").get<std::string>() + ": "
                        + std::to_string(in) + " in vs " + std::to_string(out) + " out"};
    }
    return {"tx-conservation", true, {}};
}

CheckResult check_no_double_spend(const json& t)
{
    std::set<std::pair<std::string, std::uint32_t>> spent;
    for (const json& event : accepted_txs(t)) {
        for (const json& input : event.at("tx").at("inputs")) {
            auto key = std::make_pair(input.at("txid").get<std::string>(),
                                      input.at("index").get<std::uint32_t>());
            if (!spent.insert(key).second)
                return {"no-double-spend", false,
                        "outpoint " + key.first + ":" + std::to_string(key.second)
                            + " spent twice"};
        }
    }
    return {"no-double-spend", true, {}};
}

CheckResult check_census(const json& t)
{
    std::size_t accepted = accepted_txs(t).size();
    if (t.at("accepted_count").get<std::size_t>() != accepted)
        return {"census", false, "accepted_count does not match the event log"};

    std::string outcome = t.at("outcome").at("type");
    if (outcome == "aborted") {
        if (accepted != 0)
            return {"census", false, "aborted run recorded transactions"};
        return {"census", true, {}};
    }

    std::size_t commitments = accepted_txs(t, "commitment").size();
    std::size_t claims = accepted_txs(t, "claim").size();
    std::size_t wins = accepted_txs(t, "win").size();
    std::size_t refunds = accepted_txs(t, "refund").size();
    std::size_t seizures = accepted_txs(t, "seizure").size();

    if (commitments != 1)
        return {"census", false, "expected exactly one commitment transaction"};
    if (wins + refunds != 1)
        return {"census", false, "expected exactly one terminal win or refund"};
    if ((outcome == "winner") != (wins == 1))
        return {"census", false, "outcome does not match the terminal transaction"};
    if (accepted != 2 + claims + seizures)
        return {"census", false,
                "accepted count " + std::to_string(accepted)
                    + " != 2 + claims + seizures"};

    // every deposit must be resolved by a claim or a seizure unless the
    // run recorded that seizing was impossible
    std::size_t n_eff = accepted_txs(t, "commitment").front().at("tx").at("inputs").size();
    std::size_t seized = 0;
    for (const json& event : accepted_txs(t, "seizure"))
        seized += event.at("tx").at("inputs").size();
    bool skip_noted = false;
    for (const json& event : t.at("events"))
        if (event.value("event", "") == "seizure-skipped")
            skip_noted = true;
    if (claims + seized != n_eff && !skip_noted)
        return {"census", false,
                "deposits unaccounted for: " + std::to_string(claims) + " claims + "
                    + std::to_string(seized) + " seized != "
                    + std::to_string(n_eff)};

    // the paper's transaction count: one commitment, one claim per
    // funded voter (or its single-slot seizure), one terminal
    if (claims + seizures == n_eff && accepted != n_eff + 2)
        return {"census", false,
                "expected n+2 = " + std::to_string(n_eff + 2) + " transactions, saw "
                    + std::to_string(accepted)};
    return {"census", true, {}};
}

CheckResult check_abort_safety(const json& t)
{
    if (t.at("outcome").at("type") == "aborted" && !accepted_txs(t).empty())
        return {"abort-safety", false, "aborted run moved money"};
    return {"abort-safety", true, {}};
}

CheckResult check_reveal_binding(const json& t)
{
    auto commitments = accepted_txs(t, "commitment");
    if (commitments.empty())
        return {"reveal-binding", true, "no commitment, nothing to bind"};
    const json& ctx = commitments.front().at("tx");
    std::string ctxid = ctx.at("txid");

    for (const json& event : accepted_txs(t, "claim")) {
        const json& tx = event.at("tx");
        const json& input = tx.at("inputs").at(0);
        if (input.at("txid") != ctxid)
            return {"reveal-binding", false, "claim spends a non-commitment outpoint"};
        std::uint32_t slot = input.at("index").get<std::uint32_t>();
        const json& deposit = ctx.at("outputs").at(slot).at("predicate");
        if (deposit.value("type", "") != "or"
            || deposit.at("left").value("type", "") != "hashlock")
            return {"reveal-binding", false,
                    "deposit predicate has unexpected shape at slot "
                        + std::to_string(slot)};
        std::string digest_hex = deposit.at("left").at("digest");

        const json& witness = input.at("witness");
        if (witness.value("type", "") != "branch" || witness.value("right", true)
            || witness.at("inner").value("type", "") != "preimage")
            return {"reveal-binding", false, "claim witness has unexpected shape"};
        Bytes preimage = from_hex(witness.at("inner").at("bytes").get<std::string>());
        if (to_hex(digest_view(hash160(preimage))) != digest_hex)
            return {"reveal-binding", false,
                    "claim preimage does not hash to the deposit digest at slot "
                        + std::to_string(slot)};
    }
    return {"reveal-binding", true, {}};
}

CheckResult check_outcome_tally(const json& t)
{
    const json& config = t.at("config");
    std::string outcome = t.at("outcome").at("type");
    if (outcome == "aborted")
        return {"outcome-tally", true, "aborted before tallying"};

    // map claim payout keys back to voter ids through the board echo
    std::map<std::string, std::uint32_t> address_to_voter;
    for (const json& v : t.at("board").at("voters"))
        address_to_voter[v.at("address_pk")] = v.at("id").get<std::uint32_t>();

    std::set<std::uint32_t> revealed_voters;
    for (const json& event : accepted_txs(t, "claim")) {
        const json& out = event.at("tx").at("outputs").at(0).at("predicate");
        if (out.value("type", "") != "keylock")
            return {"outcome-tally", false, "claim pays to a non-key output"};
        auto it = address_to_voter.find(out.at("pk").get<std::string>());
        if (it == address_to_voter.end())
            return {"outcome-tally", false, "claim pays an unknown address"};
        revealed_voters.insert(it->second);
    }

    // a garbage vote reveals fine but carries no usable share
    const json& adv = config.at("adversary");
    if (adv.value("kind", "") == "garbage-vote")
        revealed_voters.erase(adv.at("voter").get<std::uint32_t>());

    std::map<std::uint32_t, std::size_t> tally;
    for (const auto& [voter_str, candidate] : config.at("votes").items()) {
        std::uint32_t voter = static_cast<std::uint32_t>(std::stoul(voter_str));
        if (revealed_voters.contains(voter))
            tally[candidate.get<std::uint32_t>()]++;
    }

    std::uint32_t threshold = config.at("t").get<std::uint32_t>();
    std::optional<std::uint32_t> expected;
    for (std::uint32_t c = 1; c <= config.at("m").get<std::uint32_t>(); ++c) {
        if (tally[c] >= threshold) {
            expected = c;
            break; // ledger order: the lowest id submits first and wins
        }
    }

    if (expected) {
        if (outcome != "winner")
            return {"outcome-tally", false,
                    "tally oracle expected winner candidate "
                        + std::to_string(*expected)};
        std::uint32_t won = t.at("outcome").at("candidate").get<std::uint32_t>();
        if (won != *expected)
            return {"outcome-tally", false,
                    "tally oracle expected candidate " + std::to_string(*expected)
                        + ", transcript says " + std::to_string(won)};
    } else if (outcome != "refunded") {
        return {"outcome-tally", false, "tally oracle expected a refund"};
    }
    return {"outcome-tally", true, {}};
}

} // namespace

std::vector<CheckResult> verify_transcript(const nlohmann::json& transcript)
{
    std::vector<CheckResult> results;
    results.push_back(check_structure(transcript));
    if (!results.back().ok)
        return results;
    try {
        results.push_back(check_global_conservation(transcript));
        results.push_back(check_tx_conservation(transcript));
        results.push_back(check_no_double_spend(transcript));
        results.push_back(check_census(transcript));
        results.push_back(check_abort_safety(transcript));
        results.push_back(check_reveal_binding(transcript));
        results.push_back(check_outcome_tally(transcript));
    } catch (const std::exception& e) {
        results.push_back({"structure", false, std::string("malformed field: ") + e.what()});
    }
    return results;
}

bool all_passed(const std::vector<CheckResult>& results)
{
    for (const CheckResult& r : results)
        if (!r.ok)
            return false;
    return true;
}

} // namespace tnvote::audit

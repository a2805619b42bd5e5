#pragma once

#include "tnvote/protocol.hpp"

#include <json.hpp>

#include <map>
#include <optional>

namespace tnvote::sim {

enum class AdversaryKind {
    none,
    dropout,
    tamper_last_shuffler,
    double_claim,
    garbage_vote,
    withhold_reveal,
};

enum class DropPhase { dkg, shuffle, reveal };

struct Adversary {
    AdversaryKind kind = AdversaryKind::none;
    std::uint32_t voter = 0;       // dropout / double_claim / garbage_vote / withhold
    DropPhase phase = DropPhase::reveal; // dropout only
};

std::string_view adversary_kind_name(AdversaryKind kind);
std::string_view drop_phase_name(DropPhase phase);

/// Config rejection that names the offending field.
struct ConfigError : std::runtime_error {
    std::string field;
    ConfigError(std::string field_, const std::string& what)
        : std::runtime_error(what), field(std::move(field_))
    {
    }
};

struct ScenarioConfig {
    std::string group_id = "crypto";
    std::uint32_t n = 0, m = 0, t = 0;
    std::uint64_t x = 1, z = 1, t1 = 100, t2 = 200;
    std::map<std::uint32_t, std::uint32_t> votes; // voter id -> candidate id
    Bytes master_seed;
    Adversary adversary;

    void validate() const; // throws ConfigError
    static ScenarioConfig from_json(const nlohmann::json& doc); // throws ConfigError
    nlohmann::ordered_json to_json() const;
};

// Reliable ordered transport with a fixed global delivery order:
// (phase, sender, per-sender sequence). Delivery is therefore
// independent of push interleaving across senders.
struct Message {
    std::uint32_t phase = 0;
    std::uint32_t sender = 0;    // 0 = system
    std::uint64_t seq = 0;       // assigned per (phase, sender) at push
    std::uint32_t recipient = 0; // 0 = broadcast
    std::string kind;
    Bytes payload;
    std::optional<Signature> auth; // sender's shuffle-key signature
};

class Scheduler {
public:
    std::uint64_t push(Message msg); // returns the assigned sequence number
    std::optional<Message> deliver();
    bool empty() const { return queue_.empty(); }
    std::size_t pending() const { return queue_.size(); }

private:
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint64_t>, Message> queue_;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> next_seq_;
};

struct Transcript {
    nlohmann::ordered_json doc;

    std::string dump() const { return doc.dump(2) + "\n"; }
    std::string outcome_type() const { return doc.at("outcome").at("type"); }
    std::uint64_t accepted_count() const { return doc.at("accepted_count"); }
};

/// Execute a full voting run: registration, DKG, mixnet shuffle,
/// commitment/claim/win/seizure/refund, all driven by the master seed.
/// Identical configs produce byte-identical transcripts.
Transcript run_scenario(const ScenarioConfig& config);

} // namespace tnvote::sim

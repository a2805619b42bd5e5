#pragma once

#include "tnvote/crypto.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <variant>

namespace tnvote {

// Spending conditions as a typed tree instead of a stack language:
// hash-lock, key-lock, time-gated inner condition, disjunction and
// conjunction. Depth is capped at 8.
struct ScriptPredicate;
using PredicatePtr = std::shared_ptr<const ScriptPredicate>;

struct HashLock {
    Digest20 digest;
};
struct KeyLock {
    GroupElement pk;
};
struct AfterGuard { // inner is unspendable until `time`
    std::uint64_t time;
    PredicatePtr inner;
};
struct OrBranch {
    PredicatePtr left, right;
};
struct AndBoth {
    PredicatePtr left, right;
};

struct ScriptPredicate {
    std::variant<HashLock, KeyLock, AfterGuard, OrBranch, AndBoth> node;
};

constexpr int kMaxPredicateDepth = 8;

PredicatePtr p_hashlock(const Digest20& digest);
PredicatePtr p_keylock(GroupElement pk);
PredicatePtr p_after(std::uint64_t time, PredicatePtr inner);
PredicatePtr p_or(PredicatePtr left, PredicatePtr right);
PredicatePtr p_and(PredicatePtr left, PredicatePtr right);

int predicate_depth(const ScriptPredicate& pred);
std::string render_predicate(const ScriptPredicate& pred); // human-readable

// Witness shapes mirror the predicate tree; AfterGuard is transparent
// (its inner witness stands in directly, the clock does the rest).
struct Witness;
using WitnessPtr = std::shared_ptr<const Witness>;

struct WPreimage {
    Bytes bytes;
};
struct WSig {
    Signature sig;
};
struct WBranch {
    bool right; // which disjunct is being satisfied
    WitnessPtr inner;
};
struct WPair {
    WitnessPtr left, right;
};

struct Witness {
    std::variant<WPreimage, WSig, WBranch, WPair> node;
};

WitnessPtr w_preimage(Bytes bytes);
WitnessPtr w_sig(Signature sig);
WitnessPtr w_branch(bool right, WitnessPtr inner);
WitnessPtr w_pair(WitnessPtr left, WitnessPtr right);

/// Shape mismatches evaluate to false, they are not errors.
bool eval_predicate(const Group& group, const ScriptPredicate& pred,
                    const Witness& witness, ByteView message, std::uint64_t now);

struct OutPoint {
    Digest32 txid{};
    std::uint32_t index = 0;

    auto operator<=>(const OutPoint&) const = default;
};

struct TxOutput {
    std::uint64_t value = 0; // integer units, no fees anywhere
    PredicatePtr predicate;
};

struct TxInput {
    OutPoint outpoint;
    WitnessPtr witness; // null until signed
};

struct Transaction {
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
    std::uint64_t locktime = 0; // 0 = none

    /// Canonical serialization with witnesses excluded, so the id (and
    /// the signing digest derived from it) survive witness attachment —
    /// a pre-signed refund stays valid.
    Bytes serialize_unsigned(const Group& group) const;
    Digest32 txid(const Group& group) const;
    /// Message all key-lock signatures commit to: the txid bytes.
    Bytes signing_digest(const Group& group) const;
};

enum class RejectReason {
    missing_utxo,
    double_spend_within_tx,
    locktime_not_reached,
    script_failure,
    value_mismatch,
};

std::string_view reject_reason_name(RejectReason reason);

struct Validation {
    bool ok = false;
    RejectReason reason{};
    std::uint32_t input_index = 0; // for script_failure
    std::string detail;

    static Validation accept() { return Validation{true, {}, 0, {}}; }
    static Validation reject(RejectReason r, std::string detail = {},
                             std::uint32_t input = 0)
    {
        return Validation{false, r, input, std::move(detail)};
    }
};

// Flat UTXO ledger with a tick clock; immutable value, apply_tx and
// advance_clock return new states.
class LedgerState {
public:
    LedgerState() = default;

    /// Initial state: outputs installed under synthetic outpoints derived
    /// from the label; not counted as an accepted transaction.
    static LedgerState genesis(std::string_view label, std::vector<TxOutput> outputs);

    Validation validate_tx(const Group& group, const Transaction& tx) const;
    /// Pre: validate_tx accepted; throws std::logic_error otherwise.
    LedgerState apply_tx(const Group& group, const Transaction& tx) const;
    LedgerState advance_clock(std::uint64_t ticks) const;

    std::uint64_t clock() const { return clock_; }
    const std::map<OutPoint, TxOutput>& utxos() const { return utxos_; }
    const std::vector<Digest32>& history() const { return history_; }

    bool is_unspent(const OutPoint& op) const { return utxos_.contains(op); }
    std::uint64_t total_value() const;
    /// Sum of unspent outputs locked directly to this key.
    std::uint64_t balance_of(const Group& group, const GroupElement& pk) const;

private:
    std::map<OutPoint, TxOutput> utxos_;
    std::uint64_t clock_ = 0;
    std::vector<Digest32> history_;
};

// Structured transcript export: machine-readable trees plus the
// human-readable predicate rendering.
nlohmann::ordered_json predicate_to_json(const Group& group, const ScriptPredicate& pred);
nlohmann::ordered_json witness_to_json(const Group& group, const Witness& witness);
nlohmann::ordered_json tx_to_json(const Group& group, const Transaction& tx,
                                  std::uint64_t clock);

} // namespace tnvote

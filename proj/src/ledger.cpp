#include "tnvote/ledger.hpp"

#include <stdexcept>

namespace tnvote {

namespace {

PredicatePtr make_pred(ScriptPredicate pred)
{
    auto ptr = std::make_shared<const ScriptPredicate>(std::move(pred));
    if (predicate_depth(*ptr) > kMaxPredicateDepth)
        throw std::invalid_argument("predicate tree too deep");
    return ptr;
}

void serialize_predicate(const Group& group, const ScriptPredicate& pred, ByteWriter& w)
{
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, HashLock>) {
                w.u8(0);
                w.raw(digest_view(node.digest));
            } else if constexpr (std::is_same_v<T, KeyLock>) {
                w.u8(1);
                w.prefixed(group.encode_element(node.pk));
            } else if constexpr (std::is_same_v<T, AfterGuard>) {
                w.u8(2);
                w.u64(node.time);
                serialize_predicate(group, *node.inner, w);
            } else if constexpr (std::is_same_v<T, OrBranch>) {
                w.u8(3);
                serialize_predicate(group, *node.left, w);
                serialize_predicate(group, *node.right, w);
            } else {
                w.u8(4);
                serialize_predicate(group, *node.left, w);
                serialize_predicate(group, *node.right, w);
            }
        },
        pred.node);
}

} // namespace

PredicatePtr p_hashlock(const Digest20& digest)
{
    return make_pred(ScriptPredicate{HashLock{digest}});
}

PredicatePtr p_keylock(GroupElement pk)
{
    return make_pred(ScriptPredicate{KeyLock{std::move(pk)}});
}

PredicatePtr p_after(std::uint64_t time, PredicatePtr inner)
{
    return make_pred(ScriptPredicate{AfterGuard{time, std::move(inner)}});
}

PredicatePtr p_or(PredicatePtr left, PredicatePtr right)
{
    return make_pred(ScriptPredicate{OrBranch{std::move(left), std::move(right)}});
}

PredicatePtr p_and(PredicatePtr left, PredicatePtr right)
{
    return make_pred(ScriptPredicate{AndBoth{std::move(left), std::move(right)}});
}

int predicate_depth(const ScriptPredicate& pred)
{
    return std::visit(
        [](const auto& node) -> int {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, HashLock> || std::is_same_v<T, KeyLock>)
                return 1;
            else if constexpr (std::is_same_v<T, AfterGuard>)
                return 1 + predicate_depth(*node.inner);
            else
                return 1 + std::max(predicate_depth(*node.left),
                                    predicate_depth(*node.right));
        },
        pred.node);
}

std::string render_predicate(const ScriptPredicate& pred)
{
    return std::visit(
        [](const auto& node) -> std::string {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, HashLock>)
                return "hash160(" + to_hex(digest_view(node.digest)) + ")";
            else if constexpr (std::is_same_v<T, KeyLock>)
                return "key(" + node.pk.value.get_str(16) + ")";
            else if constexpr (std::is_same_v<T, AfterGuard>)
                return "(" + render_predicate(*node.inner) + " after "
                       + std::to_string(node.time) + ")";
            else if constexpr (std::is_same_v<T, OrBranch>)
                return "(" + render_predicate(*node.left) + " or "
                       + render_predicate(*node.right) + ")";
            else
                return "(" + render_predicate(*node.left) + " and "
                       + render_predicate(*node.right) + ")";
        },
        pred.node);
}

WitnessPtr w_preimage(Bytes bytes)
{
    return std::make_shared<const Witness>(Witness{WPreimage{std::move(bytes)}});
}

WitnessPtr w_sig(Signature sig)
{
    return std::make_shared<const Witness>(Witness{WSig{std::move(sig)}});
}

WitnessPtr w_branch(bool right, WitnessPtr inner)
{
    return std::make_shared<const Witness>(Witness{WBranch{right, std::move(inner)}});
}

WitnessPtr w_pair(WitnessPtr left, WitnessPtr right)
{
    return std::make_shared<const Witness>(Witness{WPair{std::move(left), std::move(right)}});
}

bool eval_predicate(const Group& group, const ScriptPredicate& pred,
                    const Witness& witness, ByteView message, std::uint64_t now)
{
    return std::visit(
        [&](const auto& node) -> bool {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, HashLock>) {
                const auto* w = std::get_if<WPreimage>(&witness.node);
                return w && hash160(w->bytes) == node.digest;
            } else if constexpr (std::is_same_v<T, KeyLock>) {
                const auto* w = std::get_if<WSig>(&witness.node);
                return w && verify(group, node.pk, message, w->sig);
            } else if constexpr (std::is_same_v<T, AfterGuard>) {
                return now >= node.time
                       && eval_predicate(group, *node.inner, witness, message, now);
            } else if constexpr (std::is_same_v<T, OrBranch>) {
                const auto* w = std::get_if<WBranch>(&witness.node);
                if (!w || !w->inner)
                    return false;
                const ScriptPredicate& chosen = w->right ? *node.right : *node.left;
                return eval_predicate(group, chosen, *w->inner, message, now);
            } else {
                const auto* w = std::get_if<WPair>(&witness.node);
                return w && w->left && w->right
                       && eval_predicate(group, *node.left, *w->left, message, now)
                       && eval_predicate(group, *node.right, *w->right, message, now);
            }
        },
        pred.node);
}

Bytes Transaction::serialize_unsigned(const Group& group) const
{
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(inputs.size()));
    for (const TxInput& in : inputs) {
        w.raw(digest_view(in.outpoint.txid));
        w.u32(in.outpoint.index);
    }
    w.u32(static_cast<std::uint32_t>(outputs.size()));
    for (const TxOutput& out : outputs) {
        w.u64(out.value);
        serialize_predicate(group, *out.predicate, w);
    }
    w.u64(locktime);
    return w.take();
}

Digest32 Transaction::txid(const Group& group) const
{
    return sha256(serialize_unsigned(group));
}

Bytes Transaction::signing_digest(const Group& group) const
{
    Digest32 id = txid(group);
    return Bytes(id.begin(), id.end());
}

std::string_view reject_reason_name(RejectReason reason)
{
    switch (reason) {
    case RejectReason::missing_utxo: return "missing-utxo";
    case RejectReason::double_spend_within_tx: return "double-spend-within-tx";
    case RejectReason::locktime_not_reached: return "locktime-not-reached";
    case RejectReason::script_failure: return "script-failure";
    case RejectReason::value_mismatch: return "value-mismatch";
    }
    return "unknown";
}

LedgerState LedgerState::genesis(std::string_view label, std::vector<TxOutput> outputs)
{
    LedgerState state;
    ByteWriter w;
    w.prefixed(to_bytes("tnvote/genesis"));
    w.prefixed(to_bytes(label));
    Digest32 fake_txid = sha256(w.bytes());
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i].value == 0)
            throw std::invalid_argument("genesis output with zero value");
        state.utxos_.emplace(OutPoint{fake_txid, static_cast<std::uint32_t>(i)},
                             std::move(outputs[i]));
    }
    return state;
}

Validation LedgerState::validate_tx(const Group& group, const Transaction& tx) const
{
    if (tx.inputs.empty())
        return Validation::reject(RejectReason::missing_utxo, "transaction has no inputs");

    std::map<OutPoint, bool> seen;
    for (const TxInput& in : tx.inputs) {
        if (seen.contains(in.outpoint))
            return Validation::reject(RejectReason::double_spend_within_tx);
        seen[in.outpoint] = true;
        if (!utxos_.contains(in.outpoint))
            return Validation::reject(RejectReason::missing_utxo,
                                      to_hex(digest_view(in.outpoint.txid)) + ":"
                                          + std::to_string(in.outpoint.index));
    }

    if (tx.locktime > clock_)
        return Validation::reject(RejectReason::locktime_not_reached,
                                  "locktime " + std::to_string(tx.locktime) + " at clock "
                                      + std::to_string(clock_));

    Bytes digest = tx.signing_digest(group);
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        const TxInput& in = tx.inputs[i];
        const TxOutput& spent = utxos_.at(in.outpoint);
        if (!in.witness
            || !eval_predicate(group, *spent.predicate, *in.witness, digest, clock_))
            return Validation::reject(RejectReason::script_failure,
                                      "input " + std::to_string(i),
                                      static_cast<std::uint32_t>(i));
    }

    std::uint64_t in_total = 0;
    for (const TxInput& in : tx.inputs)
        in_total += utxos_.at(in.outpoint).value;
    std::uint64_t out_total = 0;
    for (const TxOutput& out : tx.outputs) {
        if (out.value == 0)
            return Validation::reject(RejectReason::value_mismatch, "zero-value output");
        out_total += out.value;
    }
    if (in_total != out_total)
        return Validation::reject(RejectReason::value_mismatch,
                                  std::to_string(in_total) + " in vs "
                                      + std::to_string(out_total) + " out");

    return Validation::accept();
}

LedgerState LedgerState::apply_tx(const Group& group, const Transaction& tx) const
{
    Validation v = validate_tx(group, tx);
    if (!v.ok)
        throw std::logic_error("apply_tx without prior acceptance: "
                               + std::string(reject_reason_name(v.reason)));
    LedgerState next = *this;
    for (const TxInput& in : tx.inputs)
        next.utxos_.erase(in.outpoint);
    Digest32 id = tx.txid(group);
    for (std::size_t i = 0; i < tx.outputs.size(); ++i)
        next.utxos_.emplace(OutPoint{id, static_cast<std::uint32_t>(i)}, tx.outputs[i]);
    next.history_.push_back(id);
    return next;
}

LedgerState LedgerState::advance_clock(std::uint64_t ticks) const
{
    LedgerState next = *this;
    next.clock_ += ticks;
    return next;
}

std::uint64_t LedgerState::total_value() const
{
    std::uint64_t total = 0;
    for (const auto& [op, out] : utxos_)
        total += out.value;
    return total;
}

std::uint64_t LedgerState::balance_of(const Group& group, const GroupElement& pk) const
{
    (void)group;
    std::uint64_t total = 0;
    for (const auto& [op, out] : utxos_)
        if (const auto* kl = std::get_if<KeyLock>(&out.predicate->node);
            kl && kl->pk == pk)
            total += out.value;
    return total;
}

nlohmann::ordered_json predicate_to_json(const Group& group, const ScriptPredicate& pred)
{
    using nlohmann::ordered_json;
    return std::visit(
        [&](const auto& node) -> ordered_json {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, HashLock>)
                return {{"type", "hashlock"}, {"digest", to_hex(digest_view(node.digest))}};
            else if constexpr (std::is_same_v<T, KeyLock>)
                return {{"type", "keylock"}, {"pk", to_hex(group.encode_element(node.pk))}};
            else if constexpr (std::is_same_v<T, AfterGuard>)
                return {{"type", "after"},
                        {"time", node.time},
                        {"inner", predicate_to_json(group, *node.inner)}};
            else if constexpr (std::is_same_v<T, OrBranch>)
                return {{"type", "or"},
                        {"left", predicate_to_json(group, *node.left)},
                        {"right", predicate_to_json(group, *node.right)}};
            else
                return {{"type", "and"},
                        {"left", predicate_to_json(group, *node.left)},
                        {"right", predicate_to_json(group, *node.right)}};
        },
        pred.node);
}

nlohmann::ordered_json witness_to_json(const Group& group, const Witness& witness)
{
    using nlohmann::ordered_json;
    return std::visit(
        [&](const auto& node) -> ordered_json {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, WPreimage>)
                return {{"type", "preimage"}, {"bytes", to_hex(node.bytes)}};
            else if constexpr (std::is_same_v<T, WSig>)
                return {{"type", "sig"},
                        {"r", to_hex(group.encode_element(node.sig.commitment))},
                        {"s", to_hex(group.encode_scalar(node.sig.response))}};
            else if constexpr (std::is_same_v<T, WBranch>)
                return {{"type", "branch"},
                        {"right", node.right},
                        {"inner", witness_to_json(group, *node.inner)}};
            else
                return {{"type", "pair"},
                        {"left", witness_to_json(group, *node.left)},
                        {"right", witness_to_json(group, *node.right)}};
        },
        witness.node);
}

nlohmann::ordered_json tx_to_json(const Group& group, const Transaction& tx,
                                  std::uint64_t clock)
{
    nlohmann::ordered_json doc;
    doc["txid"] = to_hex(digest_view(tx.txid(group)));
    doc["clock"] = clock;
    doc["locktime"] = tx.locktime;
    auto inputs = nlohmann::ordered_json::array();
    for (const TxInput& in : tx.inputs) {
        nlohmann::ordered_json entry;
        entry["txid"] = to_hex(digest_view(in.outpoint.txid));
        entry["index"] = in.outpoint.index;
        entry["witness"] = in.witness ? witness_to_json(group, *in.witness)
                                      : nlohmann::ordered_json(nullptr);
        inputs.push_back(std::move(entry));
    }
    doc["inputs"] = std::move(inputs);
    auto outputs = nlohmann::ordered_json::array();
    for (const TxOutput& out : tx.outputs) {
        nlohmann::ordered_json entry;
        entry["value"] = out.value;
        entry["predicate"] = predicate_to_json(group, *out.predicate);
        entry["predicate_text"] = render_predicate(*out.predicate);
        outputs.push_back(std::move(entry));
    }
    doc["outputs"] = std::move(outputs);
    return doc;
}

} // namespace tnvote

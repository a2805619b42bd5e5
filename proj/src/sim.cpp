#include "tnvote/sim.hpp"

#include <algorithm>
#include <set>

namespace tnvote::sim {

using nlohmann::ordered_json;

std::string_view adversary_kind_name(AdversaryKind kind)
{
    switch (kind) {
    case AdversaryKind::none: return "none";
    case AdversaryKind::dropout: return "dropout";
    case AdversaryKind::tamper_last_shuffler: return "tamper-last-shuffler";
    case AdversaryKind::double_claim: return "double-claim";
    case AdversaryKind::garbage_vote: return "garbage-vote";
    case AdversaryKind::withhold_reveal: return "withhold-reveal";
    }
    return "unknown";
}

std::string_view drop_phase_name(DropPhase phase)
{
    switch (phase) {
    case DropPhase::dkg: return "dkg";
    case DropPhase::shuffle: return "shuffle";
    case DropPhase::reveal: return "reveal";
    }
    return "unknown";
}

void ScenarioConfig::validate() const
{
    if (group_id != "test" && group_id != "crypto")
        throw ConfigError("group", "unknown group id: " + group_id);
    if (n < 2)
        throw ConfigError("n", "need at least 2 voters");
    if (m < 1)
        throw ConfigError("m", "need at least 1 candidate");
    if (t < 1 || t > n)
        throw ConfigError("t", "threshold must satisfy 1 <= t <= n");
    if (x < 1)
        throw ConfigError("x", "vote stake must be positive");
    if (z < 1)
        throw ConfigError("z", "deposit must be positive");
    if (t1 < 1 || t1 >= t2)
        throw ConfigError("t2", "deadlines must satisfy 0 < t1 < t2");
    if (votes.size() != n)
        throw ConfigError("votes", "expected exactly one vote per voter");
    for (const auto& [voter, candidate] : votes) {
        if (voter < 1 || voter > n)
            throw ConfigError("votes",
                              "vote from unknown voter " + std::to_string(voter));
        if (candidate < 1 || candidate > m)
            throw ConfigError("votes",
                              "vote for unknown candidate " + std::to_string(candidate));
    }
    if (master_seed.empty())
        throw ConfigError("seed", "master seed must not be empty");
    switch (adversary.kind) {
    case AdversaryKind::none:
    case AdversaryKind::tamper_last_shuffler:
        break;
    default:
        if (adversary.voter < 1 || adversary.voter > n)
            throw ConfigError("adversary", "adversary voter out of range");
    }
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& doc)
{
    ScenarioConfig cfg;
    auto require = [&](const char* field) -> const nlohmann::json& {
        if (!doc.contains(field))
            throw ConfigError(field, std::string("missing field: ") + field);
        return doc.at(field);
    };
    try {
        cfg.group_id = doc.value("group", std::string("crypto"));
        cfg.n = require("n").get<std::uint32_t>();
        cfg.m = require("m").get<std::uint32_t>();
        cfg.t = require("t").get<std::uint32_t>();
        cfg.x = require("x").get<std::uint64_t>();
        cfg.z = doc.value("z", cfg.x); // deposit defaults to the stake
        cfg.t1 = require("t1").get<std::uint64_t>();
        cfg.t2 = require("t2").get<std::uint64_t>();
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("numeric", e.what());
    }

    try {
        cfg.master_seed = from_hex(require("seed").get<std::string>());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError("seed", e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("seed", e.what());
    }

    const auto& votes = require("votes");
    if (!votes.is_object())
        throw ConfigError("votes", "votes must map voter id to candidate id");
    for (const auto& [key, value] : votes.items()) {
        std::uint32_t voter = 0;
        try {
            voter = static_cast<std::uint32_t>(std::stoul(key));
        } catch (const std::exception&) {
            throw ConfigError("votes", "non-numeric voter id: " + key);
        }
        if (!value.is_number_integer() || value.get<std::int64_t>() < 0)
            throw ConfigError("votes", "candidate id must be a non-negative number");
        cfg.votes[voter] = value.get<std::uint32_t>();
    }

    if (doc.contains("adversary") && !doc.at("adversary").is_null()) {
        const auto& adv = doc.at("adversary");
        std::string kind = adv.value("kind", std::string("none"));
        if (kind == "none")
            cfg.adversary.kind = AdversaryKind::none;
        else if (kind == "dropout")
            cfg.adversary.kind = AdversaryKind::dropout;
        else if (kind == "tamper-last-shuffler")
            cfg.adversary.kind = AdversaryKind::tamper_last_shuffler;
        else if (kind == "double-claim")
            cfg.adversary.kind = AdversaryKind::double_claim;
        else if (kind == "garbage-vote")
            cfg.adversary.kind = AdversaryKind::garbage_vote;
        else if (kind == "withhold-reveal")
            cfg.adversary.kind = AdversaryKind::withhold_reveal;
        else
            throw ConfigError("adversary", "unknown adversary kind: " + kind);
        cfg.adversary.voter = adv.value("voter", 0u);
        if (adv.contains("phase")) {
            std::string phase = adv.at("phase").get<std::string>();
            if (phase == "dkg")
                cfg.adversary.phase = DropPhase::dkg;
            else if (phase == "shuffle")
                cfg.adversary.phase = DropPhase::shuffle;
            else if (phase == "reveal")
                cfg.adversary.phase = DropPhase::reveal;
            else
                throw ConfigError("adversary", "unknown dropout phase: " + phase);
        }
    }

    cfg.validate();
    return cfg;
}

ordered_json ScenarioConfig::to_json() const
{
    ordered_json doc;
    doc["group"] = group_id;
    doc["n"] = n;
    doc["m"] = m;
    doc["t"] = t;
    doc["x"] = x;
    doc["z"] = z;
    doc["t1"] = t1;
    doc["t2"] = t2;
    doc["seed"] = to_hex(master_seed);
    ordered_json votes_doc = ordered_json::object();
    for (const auto& [voter, candidate] : votes)
        votes_doc[std::to_string(voter)] = candidate;
    doc["votes"] = std::move(votes_doc);
    ordered_json adv;
    adv["kind"] = std::string(adversary_kind_name(adversary.kind));
    if (adversary.kind != AdversaryKind::none
        && adversary.kind != AdversaryKind::tamper_last_shuffler)
        adv["voter"] = adversary.voter;
    if (adversary.kind == AdversaryKind::dropout)
        adv["phase"] = std::string(drop_phase_name(adversary.phase));
    doc["adversary"] = std::move(adv);
    return doc;
}

std::uint64_t Scheduler::push(Message msg)
{
    std::uint64_t seq = next_seq_[{msg.phase, msg.sender}]++;
    msg.seq = seq;
    queue_.emplace(std::tuple{msg.phase, msg.sender, seq}, std::move(msg));
    return seq;
}

std::optional<Message> Scheduler::deliver()
{
    if (queue_.empty())
        return std::nullopt;
    auto it = queue_.begin();
    Message msg = std::move(it->second);
    queue_.erase(it);
    return msg;
}

namespace {

// scheduler phase numbers; names appear in the transcript
enum Phase : std::uint32_t {
    kPhaseDkgCommit = 1,
    kPhaseDkgShare = 2,
    kPhaseShuffle = 3,
    kPhaseConsistency = 4,
    kPhaseRefundNonce = 5,
    kPhaseRefundPartial = 6,
    kPhaseCosign = 7,
};

std::string_view phase_name(std::uint32_t phase)
{
    switch (phase) {
    case kPhaseDkgCommit: return "dkg-commitments";
    case kPhaseDkgShare: return "dkg-shares";
    case kPhaseShuffle: return "shuffle";
    case kPhaseConsistency: return "consistency";
    case kPhaseRefundNonce: return "refund-nonce";
    case kPhaseRefundPartial: return "refund-partial";
    case kPhaseCosign: return "cosign";
    }
    return "system";
}

struct ProtocolAbort : std::runtime_error {
    std::string reason;
    ProtocolAbort(std::string reason_, const std::string& detail)
        : std::runtime_error(detail), reason(std::move(reason_))
    {
    }
};

struct VoterCtx {
    std::uint32_t id = 0;
    KeyPair address_key;
    KeyPair shuffle_key;
    SecretShare share;
    VoteCiphertext vote;
    Bytes vote_bytes;
    bool active = true;
    bool revealed = false;
};

struct CandidateCtx {
    std::uint32_t id = 0;
    KeyPair payout_key;
    KeyPair enc_key;
    std::vector<SecretShare> collected;
};

class Runner {
public:
    explicit Runner(const ScenarioConfig& cfg)
        : cfg_(cfg), group_(Group::by_id(cfg.group_id)), master_(cfg.master_seed)
    {
    }

    Transcript run();

private:
    const ScenarioConfig& cfg_;
    const Group& group_;
    SeededRng master_;
    Scheduler sched_;
    ordered_json events_ = ordered_json::array();
    LedgerState ledger_;
    Digest32 genesis_txid_{};

    std::vector<VoterCtx> voters_;
    std::vector<CandidateCtx> candidates_;
    std::optional<BulletinBoard> board_;
    DkgResult dkg_;
    std::vector<VoteCiphertext> canonical_;
    Digest32 commitment_txid_{};
    Transaction pending_refund_;
    std::vector<VoteRecord> records_; // one per canonical slot
    std::vector<Bytes> revealed_preimages_;
    std::optional<std::uint32_t> winner_;

    SeededRng rng(const std::string& label) const { return master_.derive(label); }

    bool is_adversary(AdversaryKind kind, std::uint32_t voter) const
    {
        return cfg_.adversary.kind == kind && cfg_.adversary.voter == voter;
    }

    std::vector<std::uint32_t> active_ids() const
    {
        std::vector<std::uint32_t> ids;
        for (const VoterCtx& v : voters_)
            if (v.active)
                ids.push_back(v.id);
        return ids;
    }

    VoterCtx& voter(std::uint32_t id) { return voters_.at(id - 1); }

    std::vector<VoterEntry> active_entries() const
    {
        std::vector<VoterEntry> entries;
        for (const VoterCtx& v : voters_)
            if (v.active)
                entries.push_back(VoterEntry{v.id, v.address_key.pk, v.shuffle_key.pk});
        return entries;
    }

    void log(ordered_json event) { events_.push_back(std::move(event)); }

    // --- channel plumbing ---------------------------------------------

    Bytes auth_bytes(const Message& msg) const
    {
        ByteWriter w;
        w.u32(msg.phase);
        w.u32(msg.sender);
        w.u32(msg.recipient);
        w.prefixed(to_bytes(msg.kind));
        w.prefixed(msg.payload);
        return w.take();
    }

    void send(std::uint32_t phase, std::uint32_t sender, std::uint32_t recipient,
              std::string kind, Bytes payload)
    {
        Message msg;
        msg.phase = phase;
        msg.sender = sender;
        msg.recipient = recipient;
        msg.kind = std::move(kind);
        msg.payload = std::move(payload);
        if (sender != 0) {
            SeededRng nonce = rng("msg-auth/" + std::to_string(phase) + "/"
                                  + std::to_string(sender) + "/" + msg.kind + "/"
                                  + std::to_string(recipient));
            msg.auth =
                sign(group_, voters_.at(sender - 1).shuffle_key.sk, auth_bytes(msg), nonce);
        }
        sched_.push(std::move(msg));
    }

    /// Deliver every queued message of one phase in the fixed total
    /// order, verifying sender authentication on the way.
    std::vector<Message> drain(std::uint32_t phase)
    {
        std::vector<Message> out;
        while (!sched_.empty()) {
            std::optional<Message> msg = sched_.deliver();
            if (!msg)
                break;
            if (msg->phase != phase)
                throw ProtocolAbort("internal", "unexpected phase in scheduler");
            if (msg->sender != 0) {
                if (!msg->auth
                    || !verify(group_, voters_.at(msg->sender - 1).shuffle_key.pk,
                               auth_bytes(*msg), *msg->auth))
                    throw ProtocolAbort("bad-message-signature",
                                        "message authentication failed");
            }
            log({{"event", "message"},
                 {"phase", std::string(phase_name(phase))},
                 {"from", msg->sender},
                 {"to", msg->recipient},
                 {"seq", msg->seq},
                 {"kind", msg->kind},
                 {"bytes", msg->payload.size()},
                 {"payload", to_hex(msg->payload)}});
            out.push_back(std::move(*msg));
        }
        return out;
    }

    /// Deadlock guard: a phase that waits on every listed sender records
    /// a stall naming the blocked role before giving up.
    void expect_senders(const std::vector<Message>& msgs,
                        const std::vector<std::uint32_t>& ids,
                        std::string_view phase_label)
    {
        for (std::uint32_t id : ids) {
            bool found = false;
            for (const Message& m : msgs)
                if (m.sender == id) {
                    found = true;
                    break;
                }
            if (!found) {
                log({{"event", "stall"},
                     {"blocked", "voter-" + std::to_string(id)},
                     {"phase", std::string(phase_label)}});
                throw ProtocolAbort("stall", "no pending events; waiting on voter "
                                                 + std::to_string(id));
            }
        }
    }

    // --- ledger plumbing ----------------------------------------------

    bool submit(const Transaction& tx, const std::string& kind)
    {
        Validation v = ledger_.validate_tx(group_, tx);
        if (v.ok) {
            ordered_json record = tx_to_json(group_, tx, ledger_.clock());
            // resolve the spent values while they are still in the utxo set
            for (std::size_t i = 0; i < tx.inputs.size(); ++i)
                record["inputs"][i]["value"] =
                    ledger_.utxos().at(tx.inputs[i].outpoint).value;
            ledger_ = ledger_.apply_tx(group_, tx);
            log({{"event", "tx-accepted"}, {"kind", kind}, {"tx", std::move(record)}});
            return true;
        }
        log({{"event", "tx-rejected"},
             {"kind", kind},
             {"txid", to_hex(digest_view(tx.txid(group_)))},
             {"reason", std::string(reject_reason_name(v.reason))},
             {"detail", v.detail}});
        return false;
    }

    void advance_clock_to(std::uint64_t target)
    {
        if (target > ledger_.clock()) {
            ledger_ = ledger_.advance_clock(target - ledger_.clock());
            log({{"event", "clock"}, {"to", ledger_.clock()}});
        }
    }

    // --- protocol phases ------------------------------------------------

    void setup_and_register();
    void run_dkg();
    bool run_shuffle(); // false when a dropout forced a restart
    void dkg_and_shuffle();
    void build_and_cosign_commitment();
    void reveal_phase();
    void collect_phase();
    void win_and_seizure_phase();
    void refund_phase();

    ordered_json balances() const;
    Transcript finish(ordered_json outcome);
};

void Runner::setup_and_register()
{
    std::vector<TxOutput> genesis;
    for (std::uint32_t i = 1; i <= cfg_.n; ++i) {
        VoterCtx v;
        v.id = i;
        SeededRng addr_rng = rng("voter-" + std::to_string(i) + "/address-key");
        SeededRng shuf_rng = rng("voter-" + std::to_string(i) + "/shuffle-key");
        v.address_key = keygen(group_, addr_rng);
        v.shuffle_key = keygen(group_, shuf_rng);
        genesis.push_back(TxOutput{cfg_.x + cfg_.z, p_keylock(v.address_key.pk)});
        voters_.push_back(std::move(v));
    }
    for (std::uint32_t c = 1; c <= cfg_.m; ++c) {
        CandidateCtx cand;
        cand.id = c;
        SeededRng pay_rng = rng("candidate-" + std::to_string(c) + "/payout-key");
        SeededRng enc_rng = rng("candidate-" + std::to_string(c) + "/enc-key");
        cand.payout_key = keygen(group_, pay_rng);
        cand.enc_key = keygen(group_, enc_rng);
        candidates_.push_back(std::move(cand));
    }
    ledger_ = LedgerState::genesis("scenario:" + to_hex(cfg_.master_seed), genesis);
    genesis_txid_ = ledger_.utxos().begin()->first.txid;

    board_.emplace(cfg_.x, cfg_.z, cfg_.t1, cfg_.t2, cfg_.t);
    for (const VoterCtx& v : voters_) {
        RegistrationError err = board_->register_voter(
            VoterEntry{v.id, v.address_key.pk, v.shuffle_key.pk}, group_, ledger_);
        if (err != RegistrationError::none)
            throw ProtocolAbort("registration-failed", "voter " + std::to_string(v.id));
        log({{"event", "register"}, {"role", "voter"}, {"id", v.id}});
    }
    for (const CandidateCtx& c : candidates_) {
        RegistrationError err = board_->register_candidate(
            CandidateEntry{c.id, c.payout_key.pk, c.enc_key.pk});
        if (err != RegistrationError::none)
            throw ProtocolAbort("registration-failed",
                                "candidate " + std::to_string(c.id));
        log({{"event", "register"}, {"role", "candidate"}, {"id", c.id}});
    }
    board_->close();
}

void Runner::run_dkg()
{
    for (int attempt = 1;; ++attempt) {
        std::vector<std::uint32_t> ids = active_ids();
        if (ids.size() < 2 || ids.size() < cfg_.t)
            throw ProtocolAbort("too-few-participants",
                                "only " + std::to_string(ids.size())
                                    + " active voters remain");

        std::string tag = "/attempt-" + std::to_string(attempt);

        // round 1: everyone deals and broadcasts coefficient commitments
        std::map<std::uint32_t, DkgDealer> dealers;
        for (std::uint32_t id : ids) {
            if (is_adversary(AdversaryKind::dropout, id)
                && cfg_.adversary.phase == DropPhase::dkg)
                continue; // stays silent, never broadcasts
            SeededRng deal_rng = rng("voter-" + std::to_string(id) + "/dkg" + tag);
            DkgDealer dealer = dkg_deal(group_, cfg_.t, deal_rng);
            ByteWriter w;
            for (const GroupElement& c : dealer.commitments)
                w.raw(group_.encode_element(c));
            send(kPhaseDkgCommit, id, 0, "dkg-commitments", w.take());
            dealers.emplace(id, std::move(dealer));
        }
        drain(kPhaseDkgCommit);

        if (dealers.size() != ids.size()) {
            for (std::uint32_t id : ids)
                if (!dealers.contains(id)) {
                    voter(id).active = false;
                    log({{"event", "dkg-restart"}, {"dropped", id}});
                }
            continue;
        }

        // round 2: private share delivery over the channels
        for (std::uint32_t i : ids)
            for (std::uint32_t j : ids)
                send(kPhaseDkgShare, i, j, "dkg-share",
                     group_.encode_scalar(dkg_share_for(group_, dealers.at(i), j)));
        std::vector<Message> shares = drain(kPhaseDkgShare);

        // round 3: verify against the dealer commitments and aggregate
        dkg_ = DkgResult{};
        for (std::uint32_t i : ids)
            dkg_.commitments.per_participant.push_back(dealers.at(i).commitments);

        std::map<std::uint32_t, Scalar> sums;
        for (std::uint32_t id : ids)
            sums.emplace(id, group_.scalar_zero());
        for (const Message& msg : shares) {
            Scalar piece = group_.decode_scalar(msg.payload);
            std::size_t dealer_pos = std::distance(
                ids.begin(), std::find(ids.begin(), ids.end(), msg.sender));
            if (!dkg_verify_dealer_share(group_, msg.recipient, piece,
                                         dkg_.commitments.per_participant[dealer_pos]))
                throw DkgAbort(msg.sender);
            sums.at(msg.recipient) = group_.scalar_add(sums.at(msg.recipient), piece);
        }

        GroupElement joint = group_.identity();
        for (std::uint32_t id : ids)
            joint = group_.mul(joint, dealers.at(id).commitments.front());
        dkg_.address =
            ThresholdAddress{joint, cfg_.t, static_cast<std::uint32_t>(ids.size())};
        for (std::uint32_t id : ids) {
            voter(id).share = SecretShare{id, sums.at(id)};
            dkg_.shares.push_back(voter(id).share);
            if (!verify_share(group_, voter(id).share, dkg_.commitments))
                throw ProtocolAbort("dkg-abort", "aggregated share invalid");
        }
        return;
    }
}

bool Runner::run_shuffle()
{
    std::vector<std::uint32_t> ids = active_ids();
    std::vector<VoteCiphertext> current;

    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
        std::uint32_t id = ids[pos];
        VoterCtx& v = voter(id);

        if (is_adversary(AdversaryKind::dropout, id)
            && cfg_.adversary.phase == DropPhase::shuffle) {
            // goes silent at their turn; the rest restart without them
            v.active = false;
            log({{"event", "shuffle-restart"}, {"dropped", id}});
            return false;
        }

        SeededRng vote_rng = rng("voter-" + std::to_string(id) + "/vote");
        if (is_adversary(AdversaryKind::garbage_vote, id)) {
            // syntactically fine ciphertext addressed to nobody: the
            // share inside is lost, the deposit stays claimable
            KeyPair throwaway = keygen(group_, vote_rng);
            Bytes junk = vote_rng.bytes(8 + group_.scalar_size());
            v.vote = pke_encrypt(group_, throwaway.pk, junk, vote_rng);
        } else {
            v.vote = build_vote(group_, *board_, v.share, cfg_.votes.at(id), vote_rng);
        }
        v.vote_bytes = serialize_ciphertext(group_, v.vote);

        std::vector<GroupElement> later;
        for (std::size_t j = pos + 1; j < ids.size(); ++j)
            later.push_back(voter(ids[j]).shuffle_key.pk);

        SeededRng step_rng = rng("voter-" + std::to_string(id) + "/shuffle-step");
        current = shuffle_step(group_, static_cast<std::uint32_t>(pos + 1), current,
                               v.shuffle_key.sk, v.vote, later, step_rng);

        if (pos + 1 < ids.size()) {
            ByteWriter w;
            w.u32(static_cast<std::uint32_t>(current.size()));
            for (const VoteCiphertext& ct : current)
                w.prefixed(serialize_ciphertext(group_, ct));
            send(kPhaseShuffle, id, ids[pos + 1], "shuffle-handoff", w.take());
            drain(kPhaseShuffle);
        }
    }

    // the last mixer broadcasts the fully peeled set, already in
    // lexicographic order, to everyone
    std::sort(current.begin(), current.end(),
              [&](const VoteCiphertext& a, const VoteCiphertext& b) {
                  return serialize_ciphertext(group_, a)
                         < serialize_ciphertext(group_, b);
              });
    std::uint32_t last = ids.back();
    for (std::uint32_t id : ids) {
        std::vector<VoteCiphertext> copy = current;
        if (cfg_.adversary.kind == AdversaryKind::tamper_last_shuffler
            && id == ids.front() && id != last) {
            // equivocation: the first voter receives a doctored set
            copy[0].body[0] ^= 0x01;
        }
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(copy.size()));
        for (const VoteCiphertext& ct : copy)
            w.prefixed(serialize_ciphertext(group_, ct));
        send(kPhaseShuffle, last, id, "shuffle-final", w.take());
    }
    std::vector<Message> finals = drain(kPhaseShuffle);

    // every voter hashes the copy they received and broadcasts H(i)
    std::map<std::uint32_t, std::vector<VoteCiphertext>> received;
    for (const Message& msg : finals) {
        std::vector<VoteCiphertext> set;
        ByteReader r(msg.payload);
        std::uint32_t count = r.u32();
        for (std::uint32_t k = 0; k < count; ++k) {
            auto ct = parse_ciphertext(group_, r.prefixed(1 << 20));
            if (!ct)
                throw ProtocolAbort("malformed-broadcast", "unparseable final set");
            set.push_back(std::move(*ct));
        }
        received.emplace(msg.recipient, std::move(set));
    }
    for (std::uint32_t id : ids) {
        Digest32 h = shuffle_consistency_hash(group_, received.at(id));
        send(kPhaseConsistency, id, 0, "consistency-hash", Bytes(h.begin(), h.end()));
    }
    std::vector<Message> hash_msgs = drain(kPhaseConsistency);
    expect_senders(hash_msgs, ids, "consistency");

    std::vector<Digest32> hashes;
    for (const Message& msg : hash_msgs) {
        Digest32 h{};
        std::copy(msg.payload.begin(), msg.payload.end(), h.begin());
        hashes.push_back(h);
    }
    canonical_ = finalize_shuffle(group_, current, hashes); // may throw
    return true;
}

void Runner::dkg_and_shuffle()
{
    for (;;) {
        run_dkg();
        if (run_shuffle())
            return;
        // a shuffle dropout invalidates the onions built for the old
        // voter set; rerun the DKG so T matches the remaining voters
    }
}

void Runner::build_and_cosign_commitment()
{
    std::vector<VoterEntry> entries = active_entries();
    std::vector<std::uint32_t> ids = active_ids();
    std::vector<OutPoint> funding;
    for (std::uint32_t id : ids)
        funding.push_back(OutPoint{genesis_txid_, id - 1});

    Transaction commitment = build_commitment_tx(
        group_, entries, cfg_.x, cfg_.z, cfg_.t1, dkg_.address, canonical_, funding);
    commitment_txid_ = commitment.txid(group_);

    // the refund escape hatch is threshold-signed before anyone
    // co-signs the commitment: two signing rounds over the channels
    Transaction refund =
        build_refund_tx(group_, entries, cfg_.x, cfg_.t2, commitment_txid_);
    Bytes refund_digest = refund.signing_digest(group_);

    std::map<std::uint32_t, Scalar> nonces;
    for (std::uint32_t id : ids) {
        SeededRng nonce_rng = rng("voter-" + std::to_string(id) + "/refund-nonce");
        Scalar k = random_scalar(group_, nonce_rng);
        send(kPhaseRefundNonce, id, 0, "refund-nonce",
             group_.encode_element(group_.base_exp(k)));
        nonces.emplace(id, std::move(k));
    }
    std::vector<Message> nonce_msgs = drain(kPhaseRefundNonce);
    GroupElement aggregate_r = group_.identity();
    for (const Message& msg : nonce_msgs)
        aggregate_r = group_.mul(aggregate_r, group_.decode_element(msg.payload));

    Scalar challenge =
        schnorr_challenge(group_, dkg_.address.public_key, aggregate_r, refund_digest);
    for (std::uint32_t id : ids) {
        Scalar lambda = lagrange_at_zero(group_, ids, id);
        Scalar partial = group_.scalar_add(
            nonces.at(id),
            group_.scalar_mul(challenge,
                              group_.scalar_mul(lambda, voter(id).share.value)));
        send(kPhaseRefundPartial, id, 0, "refund-partial", group_.encode_scalar(partial));
    }
    std::vector<Message> partial_msgs = drain(kPhaseRefundPartial);
    Scalar aggregate_s = group_.scalar_zero();
    for (const Message& msg : partial_msgs)
        aggregate_s = group_.scalar_add(aggregate_s, group_.decode_scalar(msg.payload));

    Signature refund_sig{aggregate_r, aggregate_s};
    bool refund_signed =
        verify(group_, dkg_.address.public_key, refund_digest, refund_sig);
    refund.inputs[0].witness = w_sig(refund_sig);

    // every voter audits the commitment before contributing a signature
    for (std::uint32_t id : ids) {
        CosignRefusal refusal =
            check_commitment(group_, entries, cfg_.x, cfg_.z, cfg_.t1, dkg_.address,
                             commitment, voter(id).vote_bytes, refund_signed);
        if (refusal != CosignRefusal::accepted)
            throw ProtocolAbort(std::string(cosign_refusal_name(refusal)),
                                "voter " + std::to_string(id) + " refused to co-sign");
    }

    Bytes commitment_digest = commitment.signing_digest(group_);
    for (std::uint32_t id : ids) {
        SeededRng sig_rng = rng("voter-" + std::to_string(id) + "/cosign");
        Signature sig = sign(group_, voter(id).address_key.sk, commitment_digest, sig_rng);
        ByteWriter w;
        w.raw(group_.encode_element(sig.commitment));
        w.raw(group_.encode_scalar(sig.response));
        send(kPhaseCosign, id, 0, "cosign-sig", w.take());
    }
    std::vector<Message> sig_msgs = drain(kPhaseCosign);
    expect_senders(sig_msgs, ids, "cosign");
    for (const Message& msg : sig_msgs) {
        ByteReader r(msg.payload);
        Signature sig{group_.decode_element(r.raw(group_.element_size())),
                      group_.decode_scalar(r.raw(group_.scalar_size()))};
        std::size_t input_pos = std::distance(
            ids.begin(), std::find(ids.begin(), ids.end(), msg.sender));
        commitment.inputs[input_pos].witness = w_sig(std::move(sig));
    }

    if (!submit(commitment, "commitment"))
        throw ProtocolAbort("commitment-rejected", "ledger refused the commitment");

    records_.clear();
    for (std::uint32_t slot = 0; slot < canonical_.size(); ++slot) {
        VoteRecord record;
        record.canonical_index = slot;
        record.vote = canonical_[slot];
        record.deposit = OutPoint{commitment_txid_, slot};
        records_.push_back(std::move(record));
    }

    pending_refund_ = std::move(refund);
}

void Runner::reveal_phase()
{
    for (std::uint32_t id : active_ids()) {
        VoterCtx& v = voter(id);
        if (is_adversary(AdversaryKind::withhold_reveal, id))
            continue;
        if (is_adversary(AdversaryKind::dropout, id)
            && cfg_.adversary.phase == DropPhase::reveal)
            continue;

        std::size_t slot = records_.size();
        for (std::size_t k = 0; k < records_.size(); ++k)
            if (serialize_ciphertext(group_, records_[k].vote) == v.vote_bytes) {
                slot = k;
                break;
            }
        if (slot == records_.size())
            throw ProtocolAbort("internal", "voter's vote missing from canonical set");

        Transaction claim = build_claim_tx(group_, records_[slot].deposit, v.vote_bytes,
                                           cfg_.z, v.address_key.pk);
        if (submit(claim, "claim")) {
            v.revealed = true;
            records_[slot].revealed = true;
            records_[slot].claim_txid = claim.txid(group_);
            revealed_preimages_.push_back(v.vote_bytes);
        }
        if (is_adversary(AdversaryKind::double_claim, id))
            submit(claim, "claim"); // bounces off the spent outpoint
    }
}

void Runner::collect_phase()
{
    for (CandidateCtx& cand : candidates_) {
        cand.collected = collect_votes(group_, cand.id, cand.enc_key.sk,
                                       revealed_preimages_, dkg_.commitments);
        log({{"event", "collect"},
             {"candidate", cand.id},
             {"shares", cand.collected.size()}});
    }
}

void Runner::win_and_seizure_phase()
{
    std::vector<std::uint32_t> ids = active_ids();
    OutPoint pool{commitment_txid_, static_cast<std::uint32_t>(ids.size())};
    std::uint64_t pool_value = cfg_.x * ids.size();

    for (const CandidateCtx& cand : candidates_) {
        if (cand.collected.size() < cfg_.t)
            continue;
        std::vector<SecretShare> quorum(cand.collected.begin(),
                                        cand.collected.begin() + cfg_.t);
        SeededRng win_rng = rng("candidate-" + std::to_string(cand.id) + "/win");
        Transaction win = build_win_tx(group_, quorum, dkg_.address, pool, pool_value,
                                       cand.payout_key.pk, win_rng);
        if (submit(win, "win") && !winner_)
            winner_ = cand.id;
    }

    // unclaimed deposits get seized through the T-after-t1 branch
    std::vector<OutPoint> unclaimed;
    for (const VoteRecord& record : records_)
        if (!record.revealed && ledger_.is_unspent(record.deposit))
            unclaimed.push_back(record.deposit);
    if (unclaimed.empty())
        return;
    std::uint64_t seized_total = cfg_.z * unclaimed.size();

    if (winner_) {
        // the winner holds t shares, hence the key of T
        const CandidateCtx& cand = candidates_.at(*winner_ - 1);
        std::vector<SecretShare> quorum(cand.collected.begin(),
                                        cand.collected.begin() + cfg_.t);
        Scalar joint_secret = reconstruct_secret(group_, quorum, cfg_.t);
        Transaction seizure = build_seizure_tx(
            group_, unclaimed, {TxOutput{seized_total, p_keylock(cand.payout_key.pk)}});
        SeededRng seize_rng = rng("candidate-" + std::to_string(cand.id) + "/seize");
        WitnessPtr w = w_branch(
            true,
            w_sig(sign(group_, joint_secret, seizure.signing_digest(group_), seize_rng)));
        for (TxInput& in : seizure.inputs)
            in.witness = w;
        submit(seizure, "seizure");
        return;
    }

    // no winner: the voters who did reveal seize jointly, if enough of
    // them remain to sign for T
    std::vector<std::uint32_t> cooperating;
    for (std::uint32_t id : ids)
        if (voter(id).revealed)
            cooperating.push_back(id);
    if (cooperating.size() < cfg_.t) {
        log({{"event", "seizure-skipped"},
             {"reason", "insufficient cooperating shares"},
             {"cooperating", cooperating.size()}});
        return;
    }

    std::vector<std::pair<std::uint32_t, GroupElement>> recipients;
    std::vector<SignerInput> signers;
    for (std::uint32_t id : cooperating) {
        recipients.emplace_back(id, voter(id).address_key.pk);
        SeededRng nonce_rng = rng("voter-" + std::to_string(id) + "/seizure-nonce");
        signers.push_back(SignerInput{voter(id).share, random_scalar(group_, nonce_rng)});
    }
    Transaction seizure = build_seizure_tx(group_, unclaimed,
                                           seizure_split_outputs(seized_total, recipients));
    Signature sig =
        threshold_sign(group_, signers, seizure.signing_digest(group_), dkg_.address);
    WitnessPtr w = w_branch(true, w_sig(sig));
    for (TxInput& in : seizure.inputs)
        in.witness = w;
    submit(seizure, "seizure");
}

void Runner::refund_phase()
{
    if (winner_)
        return; // honest parties do not broadcast a doomed refund
    submit(pending_refund_, "refund");
}

ordered_json Runner::balances() const
{
    ordered_json doc = ordered_json::object();
    std::uint64_t attributed = 0;
    for (const VoterCtx& v : voters_) {
        std::uint64_t b = ledger_.balance_of(group_, v.address_key.pk);
        doc["voter-" + std::to_string(v.id)] = b;
        attributed += b;
    }
    for (const CandidateCtx& c : candidates_) {
        std::uint64_t b = ledger_.balance_of(group_, c.payout_key.pk);
        doc["candidate-" + std::to_string(c.id)] = b;
        attributed += b;
    }
    doc["other"] = ledger_.total_value() - attributed;
    return doc;
}

Transcript Runner::finish(ordered_json outcome)
{
    Transcript t;
    t.doc["format"] = "tnvote-transcript/1";
    t.doc["config"] = cfg_.to_json();

    ordered_json board = ordered_json::object();
    auto voters_doc = ordered_json::array();
    for (const VoterCtx& v : voters_)
        voters_doc.push_back(
            {{"id", v.id},
             {"address_pk", to_hex(group_.encode_element(v.address_key.pk))},
             {"shuffle_pk", to_hex(group_.encode_element(v.shuffle_key.pk))}});
    board["voters"] = std::move(voters_doc);
    auto cands_doc = ordered_json::array();
    for (const CandidateCtx& c : candidates_)
        cands_doc.push_back(
            {{"id", c.id},
             {"payout_pk", to_hex(group_.encode_element(c.payout_key.pk))},
             {"enc_pk", to_hex(group_.encode_element(c.enc_key.pk))}});
    board["candidates"] = std::move(cands_doc);
    t.doc["board"] = std::move(board);

    ordered_json initial = ordered_json::object();
    for (const VoterCtx& v : voters_)
        initial["voter-" + std::to_string(v.id)] = cfg_.x + cfg_.z;
    for (const CandidateCtx& c : candidates_)
        initial["candidate-" + std::to_string(c.id)] = 0;
    initial["other"] = 0;
    t.doc["initial_balances"] = std::move(initial);

    t.doc["events"] = events_;
    t.doc["accepted_count"] = ledger_.history().size();
    t.doc["final_clock"] = ledger_.clock();
    t.doc["final_balances"] = balances();
    t.doc["outcome"] = std::move(outcome);
    return t;
}

Transcript Runner::run()
{
    cfg_.validate();
    setup_and_register();
    try {
        dkg_and_shuffle();
        build_and_cosign_commitment();
        reveal_phase();
        collect_phase();
        advance_clock_to(cfg_.t1);
        win_and_seizure_phase();
        advance_clock_to(cfg_.t2);
        refund_phase();
    } catch (const ConsistencyFailure& e) {
        log({{"event", "abort"},
             {"reason", "consistency-failure"},
             {"detail", e.what()}});
        return finish({{"type", "aborted"}, {"reason", "consistency-failure"}});
    } catch (const ShuffleAbort& e) {
        log({{"event", "abort"}, {"reason", "shuffle-abort"}, {"detail", e.what()}});
        return finish({{"type", "aborted"}, {"reason", "shuffle-abort"}});
    } catch (const DkgAbort& e) {
        log({{"event", "abort"}, {"reason", "dkg-abort"}, {"detail", e.what()}});
        return finish({{"type", "aborted"}, {"reason", "dkg-abort"}});
    } catch (const ProtocolAbort& e) {
        log({{"event", "abort"}, {"reason", e.reason}, {"detail", e.what()}});
        return finish({{"type", "aborted"}, {"reason", e.reason}});
    }

    if (winner_)
        return finish({{"type", "winner"}, {"candidate", *winner_}});
    return finish({{"type", "refunded"}});
}

} // namespace

Transcript run_scenario(const ScenarioConfig& config)
{
    Runner runner(config);
    return runner.run();
}

} // namespace tnvote::sim

#include "tnvote/protocol.hpp"

#include <algorithm>
#include <map>

namespace tnvote {

BulletinBoard::BulletinBoard(std::uint64_t x, std::uint64_t z, std::uint64_t t1,
                             std::uint64_t t2, std::uint32_t threshold)
    : x_(x), z_(z), t1_(t1), t2_(t2), threshold_(threshold)
{
    if (t1 >= t2)
        throw std::invalid_argument("reveal deadline must precede refund deadline");
    if (threshold == 0)
        throw std::invalid_argument("threshold must be positive");
    if (x == 0 || z == 0)
        throw std::invalid_argument("amounts must be positive");
}

RegistrationError BulletinBoard::register_voter(const VoterEntry& entry,
                                                const Group& group,
                                                const LedgerState& ledger)
{
    if (closed_)
        return RegistrationError::phase_closed;
    if (voter(entry.id))
        return RegistrationError::duplicate_id;
    if (ledger.balance_of(group, entry.address_pk) < x_ + z_)
        return RegistrationError::insufficient_funds;
    voters_.push_back(entry);
    return RegistrationError::none;
}

RegistrationError BulletinBoard::register_candidate(const CandidateEntry& entry)
{
    if (closed_)
        return RegistrationError::phase_closed;
    if (candidate(entry.id))
        return RegistrationError::duplicate_id;
    candidates_.push_back(entry);
    return RegistrationError::none;
}

const VoterEntry* BulletinBoard::voter(std::uint32_t id) const
{
    for (const VoterEntry& v : voters_)
        if (v.id == id)
            return &v;
    return nullptr;
}

const CandidateEntry* BulletinBoard::candidate(std::uint32_t id) const
{
    for (const CandidateEntry& c : candidates_)
        if (c.id == id)
            return &c;
    return nullptr;
}

Bytes encode_vote_plaintext(const Group& group, const VotePlaintext& vp)
{
    ByteWriter w;
    w.u32(vp.share_index);
    w.raw(group.encode_scalar(vp.share_value));
    w.u32(vp.candidate_id);
    return w.take();
}

std::optional<VotePlaintext> parse_vote_plaintext(const Group& group, ByteView data)
{
    if (data.size() != 8 + group.scalar_size())
        return std::nullopt;
    try {
        ByteReader r(data);
        VotePlaintext vp;
        vp.share_index = r.u32();
        vp.share_value = group.decode_scalar(r.raw(group.scalar_size()));
        vp.candidate_id = r.u32();
        return vp;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

VoteCiphertext build_vote(const Group& group, const BulletinBoard& board,
                          const SecretShare& share, std::uint32_t candidate_id,
                          SeededRng& rng)
{
    const CandidateEntry* cand = board.candidate(candidate_id);
    if (!cand)
        throw std::invalid_argument("unknown candidate id "
                                    + std::to_string(candidate_id));
    VotePlaintext vp{share.index, share.value, candidate_id};
    return pke_encrypt(group, cand->enc_pk, encode_vote_plaintext(group, vp), rng);
}

std::vector<VoteCiphertext> shuffle_step(const Group& group, std::uint32_t position,
                                         std::span<const VoteCiphertext> incoming,
                                         const Scalar& own_sk,
                                         const VoteCiphertext& own_vote,
                                         std::span<const GroupElement> later_pks,
                                         SeededRng& rng)
{
    if (incoming.size() + 1 != position)
        throw ShuffleAbort("shuffle input has wrong cardinality for position "
                           + std::to_string(position));

    std::vector<VoteCiphertext> items;
    items.reserve(position);
    for (const VoteCiphertext& ct : incoming) {
        std::optional<VoteCiphertext> peeled = onion_peel(group, own_sk, ct);
        if (!peeled)
            throw ShuffleAbort("malformed shuffle input from predecessor");
        items.push_back(std::move(*peeled));
    }
    items.push_back(onion_encrypt(group, own_vote, later_pks, rng));

    Bytes perm_seed = rng.bytes(32);
    return apply_permutation(derive_permutation(perm_seed, items.size()), items);
}

Digest32 shuffle_consistency_hash(const Group& group,
                                  std::span<const VoteCiphertext> final_set)
{
    std::vector<Bytes> encoded;
    encoded.reserve(final_set.size());
    for (const VoteCiphertext& ct : final_set)
        encoded.push_back(serialize_ciphertext(group, ct));
    std::sort(encoded.begin(), encoded.end());

    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(encoded.size()));
    for (const Bytes& e : encoded)
        w.prefixed(e);
    return sha256(w.bytes());
}

std::vector<VoteCiphertext> finalize_shuffle(const Group& group,
                                             std::span<const VoteCiphertext> final_set,
                                             std::span<const Digest32> broadcast_hashes)
{
    if (broadcast_hashes.empty())
        throw ConsistencyFailure("no consistency hashes broadcast");
    for (const Digest32& h : broadcast_hashes)
        if (h != broadcast_hashes.front())
            throw ConsistencyFailure("consistency hashes disagree");

    std::vector<std::pair<Bytes, const VoteCiphertext*>> keyed;
    keyed.reserve(final_set.size());
    for (const VoteCiphertext& ct : final_set)
        keyed.emplace_back(serialize_ciphertext(group, ct), &ct);
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<VoteCiphertext> sorted;
    sorted.reserve(keyed.size());
    for (auto& [bytes, ct] : keyed)
        sorted.push_back(*ct);

    // the shared hash seeds the final permutation, so the last shuffler
    // cannot steer any vote into a chosen slot
    Digest32 h = broadcast_hashes.front();
    auto perm = derive_permutation(digest_view(h), sorted.size());
    return apply_permutation(perm, sorted);
}

Transaction build_commitment_tx(const Group& group,
                                std::span<const VoterEntry> participants,
                                std::uint64_t x, std::uint64_t z, std::uint64_t t1,
                                const ThresholdAddress& address,
                                std::span<const VoteCiphertext> canonical_votes,
                                std::span<const OutPoint> funding)
{
    if (participants.size() != canonical_votes.size()
        || participants.size() != funding.size())
        throw std::invalid_argument("participants, votes and funding must align");

    Transaction tx;
    for (const OutPoint& op : funding)
        tx.inputs.push_back(TxInput{op, nullptr});

    PredicatePtr joint_key = p_keylock(address.public_key);
    for (const VoteCiphertext& vote : canonical_votes) {
        Digest20 digest = hash160(serialize_ciphertext(group, vote));
        tx.outputs.push_back(
            TxOutput{z, p_or(p_hashlock(digest), p_after(t1, joint_key))});
    }
    tx.outputs.push_back(
        TxOutput{x * static_cast<std::uint64_t>(participants.size()), joint_key});
    return tx;
}

std::string_view cosign_refusal_name(CosignRefusal refusal)
{
    switch (refusal) {
    case CosignRefusal::accepted: return "accepted";
    case CosignRefusal::own_vote_missing: return "own-vote-missing";
    case CosignRefusal::own_vote_duplicated: return "own-vote-duplicated";
    case CosignRefusal::refund_unsigned: return "refund-unsigned";
    case CosignRefusal::amounts_wrong: return "amounts-wrong";
    }
    return "unknown";
}

CosignRefusal check_commitment(const Group& group,
                               std::span<const VoterEntry> participants,
                               std::uint64_t x, std::uint64_t z, std::uint64_t t1,
                               const ThresholdAddress& address, const Transaction& tx,
                               ByteView own_vote_bytes, bool refund_signed)
{
    (void)group;
    const std::size_t n = participants.size();
    if (tx.outputs.size() != n + 1 || tx.inputs.size() != n || tx.locktime != 0)
        return CosignRefusal::amounts_wrong;

    Digest20 own_digest = hash160(own_vote_bytes);
    std::size_t own_count = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const TxOutput& out = tx.outputs[k];
        if (out.value != z)
            return CosignRefusal::amounts_wrong;
        const auto* disj = std::get_if<OrBranch>(&out.predicate->node);
        if (!disj)
            return CosignRefusal::amounts_wrong;
        const auto* lock = std::get_if<HashLock>(&disj->left->node);
        const auto* guard = std::get_if<AfterGuard>(&disj->right->node);
        if (!lock || !guard || guard->time != t1)
            return CosignRefusal::amounts_wrong;
        const auto* key = std::get_if<KeyLock>(&guard->inner->node);
        if (!key || !(key->pk == address.public_key))
            return CosignRefusal::amounts_wrong;
        if (lock->digest == own_digest)
            ++own_count;
    }

    const TxOutput& pool = tx.outputs[n];
    const auto* pool_key = std::get_if<KeyLock>(&pool.predicate->node);
    if (pool.value != x * n || !pool_key || !(pool_key->pk == address.public_key))
        return CosignRefusal::amounts_wrong;

    if (own_count == 0)
        return CosignRefusal::own_vote_missing;
    if (own_count > 1)
        return CosignRefusal::own_vote_duplicated;
    if (!refund_signed)
        return CosignRefusal::refund_unsigned;
    return CosignRefusal::accepted;
}

Transaction build_refund_tx(const Group& group,
                            std::span<const VoterEntry> participants, std::uint64_t x,
                            std::uint64_t t2, const Digest32& commitment_txid)
{
    (void)group;
    Transaction tx;
    tx.locktime = t2;
    // the pool sits after the n deposit outputs
    tx.inputs.push_back(
        TxInput{OutPoint{commitment_txid, static_cast<std::uint32_t>(participants.size())},
                nullptr});
    for (const VoterEntry& v : participants)
        tx.outputs.push_back(TxOutput{x, p_keylock(v.address_pk)});
    return tx;
}

Transaction build_claim_tx(const Group& group, const OutPoint& deposit,
                           ByteView vote_bytes, std::uint64_t z,
                           const GroupElement& payout_pk)
{
    (void)group;
    Transaction tx;
    tx.inputs.push_back(TxInput{
        deposit,
        w_branch(false, w_preimage(Bytes(vote_bytes.begin(), vote_bytes.end())))});
    tx.outputs.push_back(TxOutput{z, p_keylock(payout_pk)});
    return tx;
}

std::vector<TxOutput> seizure_split_outputs(
    std::uint64_t total, std::vector<std::pair<std::uint32_t, GroupElement>> signers)
{
    if (signers.empty())
        throw std::invalid_argument("no signers to pay");
    std::sort(signers.begin(), signers.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::uint64_t per = total / signers.size();
    std::uint64_t remainder = total % signers.size();

    std::vector<TxOutput> outputs;
    for (std::size_t i = 0; i < signers.size(); ++i) {
        std::uint64_t value = per + (i == 0 ? remainder : 0);
        if (value > 0)
            outputs.push_back(TxOutput{value, p_keylock(signers[i].second)});
    }
    return outputs;
}

Transaction build_seizure_tx(const Group& group, std::span<const OutPoint> deposits,
                             std::vector<TxOutput> outputs)
{
    (void)group;
    if (deposits.empty())
        throw std::invalid_argument("empty input set");
    Transaction tx;
    for (const OutPoint& op : deposits)
        tx.inputs.push_back(TxInput{op, nullptr});
    tx.outputs = std::move(outputs);
    return tx;
}

std::vector<SecretShare> collect_votes(const Group& group, std::uint32_t candidate_id,
                                       const Scalar& enc_sk,
                                       std::span<const Bytes> revealed_preimages,
                                       const FeldmanCommitments& commitments)
{
    std::map<std::uint32_t, SecretShare> by_index;
    for (const Bytes& preimage : revealed_preimages) {
        std::optional<VoteCiphertext> ct = parse_ciphertext(group, preimage);
        if (!ct)
            continue;
        std::optional<Bytes> plaintext = pke_decrypt(group, enc_sk, *ct);
        if (!plaintext)
            continue; // not addressed to this key
        std::optional<VotePlaintext> vp = parse_vote_plaintext(group, *plaintext);
        if (!vp || vp->candidate_id != candidate_id)
            continue;
        SecretShare share{vp->share_index, vp->share_value};
        if (!verify_share(group, share, commitments))
            continue;
        by_index.emplace(share.index, std::move(share));
    }

    std::vector<SecretShare> shares;
    shares.reserve(by_index.size());
    for (auto& [idx, share] : by_index)
        shares.push_back(std::move(share));
    return shares;
}

Transaction build_win_tx(const Group& group, std::span<const SecretShare> shares,
                         const ThresholdAddress& address, const OutPoint& pool,
                         std::uint64_t pool_value, const GroupElement& payout_pk,
                         SeededRng& rng)
{
    Transaction tx;
    tx.inputs.push_back(TxInput{pool, nullptr});
    tx.outputs.push_back(TxOutput{pool_value, p_keylock(payout_pk)});

    std::vector<SignerInput> signers;
    signers.reserve(shares.size());
    for (const SecretShare& s : shares)
        signers.push_back(SignerInput{s, random_scalar(group, rng)});
    Signature sig = threshold_sign(group, signers, tx.signing_digest(group), address);
    tx.inputs[0].witness = w_sig(std::move(sig));
    return tx;
}

} // namespace tnvote

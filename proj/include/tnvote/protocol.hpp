#pragma once

#include "tnvote/ledger.hpp"
#include "tnvote/threshold.hpp"

namespace tnvote {

struct VoterEntry {
    std::uint32_t id = 0;        // 1..n
    GroupElement address_pk;     // U_i, holds the x+z stake
    GroupElement shuffle_pk;     // pk_i, onion layer key
};

struct CandidateEntry {
    std::uint32_t id = 0;        // 1..m
    GroupElement payout_pk;      // where a win pays out
    GroupElement enc_pk;         // PK_x, vote encryption key
};

enum class RegistrationError {
    none,
    insufficient_funds,
    duplicate_id,
    phase_closed,
};

// Append-only public registry of participants, keys, amounts and the
// two deadlines. Everything here is known to everyone before the DKG
// phase starts.
class BulletinBoard {
public:
    BulletinBoard(std::uint64_t x, std::uint64_t z, std::uint64_t t1, std::uint64_t t2,
                  std::uint32_t threshold);

    RegistrationError register_voter(const VoterEntry& entry, const Group& group,
                                     const LedgerState& ledger);
    RegistrationError register_candidate(const CandidateEntry& entry);
    void close() { closed_ = true; }
    bool closed() const { return closed_; }

    const std::vector<VoterEntry>& voters() const { return voters_; }
    const std::vector<CandidateEntry>& candidates() const { return candidates_; }
    const VoterEntry* voter(std::uint32_t id) const;
    const CandidateEntry* candidate(std::uint32_t id) const;

    std::uint32_t n() const { return static_cast<std::uint32_t>(voters_.size()); }
    std::uint32_t m() const { return static_cast<std::uint32_t>(candidates_.size()); }
    std::uint64_t x() const { return x_; }
    std::uint64_t z() const { return z_; }
    std::uint64_t t1() const { return t1_; }
    std::uint64_t t2() const { return t2_; }
    std::uint32_t threshold() const { return threshold_; }

private:
    std::uint64_t x_, z_, t1_, t2_;
    std::uint32_t threshold_;
    bool closed_ = false;
    std::vector<VoterEntry> voters_;
    std::vector<CandidateEntry> candidates_;
};

// The ballot: the voter's share of T plus the chosen candidate id,
// encoded with fixed widths (index | share value | candidate id).
struct VotePlaintext {
    std::uint32_t share_index = 0;
    Scalar share_value;
    std::uint32_t candidate_id = 0;
};

Bytes encode_vote_plaintext(const Group& group, const VotePlaintext& vp);
std::optional<VotePlaintext> parse_vote_plaintext(const Group& group, ByteView data);

/// E_{PK_x}(share || id_x). Throws on an unregistered candidate.
VoteCiphertext build_vote(const Group& group, const BulletinBoard& board,
                          const SecretShare& share, std::uint32_t candidate_id,
                          SeededRng& rng);

struct ShuffleAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConsistencyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One mixnet round at 1-based `position`: peel a layer off every
/// incoming item, append the own vote wrapped for the remaining voters,
/// permute freshly. Throws ShuffleAbort if any peel fails.
std::vector<VoteCiphertext> shuffle_step(const Group& group, std::uint32_t position,
                                         std::span<const VoteCiphertext> incoming,
                                         const Scalar& own_sk,
                                         const VoteCiphertext& own_vote,
                                         std::span<const GroupElement> later_pks,
                                         SeededRng& rng);

/// H(i): SHA-256 over the lexicographically sorted canonical
/// serializations of the final set.
Digest32 shuffle_consistency_hash(const Group& group,
                                  std::span<const VoteCiphertext> final_set);

/// All broadcast hashes must agree; then sort lexicographically and
/// apply the shared-hash-seeded permutation. The result is the canonical
/// slot order of the commitment transaction. Throws ConsistencyFailure.
std::vector<VoteCiphertext> finalize_shuffle(const Group& group,
                                             std::span<const VoteCiphertext> final_set,
                                             std::span<const Digest32> broadcast_hashes);

/// Per-voter record of one canonical slot, filled in as the run unfolds.
struct VoteRecord {
    std::uint32_t canonical_index = 0;
    VoteCiphertext vote;
    OutPoint deposit;
    bool revealed = false;
    std::optional<Digest32> claim_txid;
};

// Transaction builders. Amounts follow the board: each voter stakes
// x+z; deposits hold z each behind "reveal the vote or let T take it
// after t1"; the pool holds n*x under T.

/// Unsigned; funding[i] must be an outpoint of participants[i] worth x+z.
Transaction build_commitment_tx(const Group& group,
                                std::span<const VoterEntry> participants,
                                std::uint64_t x, std::uint64_t z, std::uint64_t t1,
                                const ThresholdAddress& address,
                                std::span<const VoteCiphertext> canonical_votes,
                                std::span<const OutPoint> funding);

enum class CosignRefusal {
    accepted,
    own_vote_missing,
    own_vote_duplicated,
    refund_unsigned,
    amounts_wrong,
};

std::string_view cosign_refusal_name(CosignRefusal refusal);

/// What a voter checks before contributing their signature to the
/// commitment: their vote sits in exactly one deposit slot, the structure
/// and amounts match the board, and the refund escape hatch is already
/// threshold-signed.
CosignRefusal check_commitment(const Group& group,
                               std::span<const VoterEntry> participants,
                               std::uint64_t x, std::uint64_t z, std::uint64_t t1,
                               const ThresholdAddress& address, const Transaction& tx,
                               ByteView own_vote_bytes, bool refund_signed);

/// Spends the pool output back to the voters, x each, locked until t2.
/// Valid before the commitment broadcasts because txids ignore witnesses.
Transaction build_refund_tx(const Group& group,
                            std::span<const VoterEntry> participants, std::uint64_t x,
                            std::uint64_t t2, const Digest32& commitment_txid);

/// Reveals the vote ciphertext as the hash-lock preimage; pays z to the
/// chosen address (conventionally the voter's own U_i).
Transaction build_claim_tx(const Group& group, const OutPoint& deposit,
                           ByteView vote_bytes, std::uint64_t z,
                           const GroupElement& payout_pk);

/// Default seizure proceeds: equal split over the cooperating signers,
/// remainder to the lowest index; zero-value leftovers are dropped.
std::vector<TxOutput> seizure_split_outputs(
    std::uint64_t total, std::vector<std::pair<std::uint32_t, GroupElement>> signers);

/// Unsigned spend of unclaimed deposits through the T-after-t1 branch.
/// Throws on an empty input set.
Transaction build_seizure_tx(const Group& group, std::span<const OutPoint> deposits,
                             std::vector<TxOutput> outputs);

/// Trial-decrypt every revealed preimage; keep well-formed plaintexts
/// addressed to this candidate whose share verifies, one per index.
std::vector<SecretShare> collect_votes(const Group& group, std::uint32_t candidate_id,
                                       const Scalar& enc_sk,
                                       std::span<const Bytes> revealed_preimages,
                                       const FeldmanCommitments& commitments);

/// Signed pool spend to the winner, nx in one output. Throws
/// "insufficient shares" below t.
Transaction build_win_tx(const Group& group, std::span<const SecretShare> shares,
                         const ThresholdAddress& address, const OutPoint& pool,
                         std::uint64_t pool_value, const GroupElement& payout_pk,
                         SeededRng& rng);

} // namespace tnvote

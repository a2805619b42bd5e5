#pragma once

#include "tnvote/crypto.hpp"

#include <stdexcept>
#include <vector>

namespace tnvote {

/// Voter i's fragment of the joint secret; casting it to a candidate is
/// the ballot.
struct SecretShare {
    std::uint32_t index = 0; // in [1, n]
    Scalar value;

    bool operator==(const SecretShare&) const = default;
};

/// Per-participant coefficient commitments A_{i,0..t-1}; the A_{i,0}
/// multiply to the joint public key.
struct FeldmanCommitments {
    std::vector<std::vector<GroupElement>> per_participant;

    std::size_t participants() const { return per_participant.size(); }
    std::size_t threshold() const
    {
        return per_participant.empty() ? 0 : per_participant.front().size();
    }
};

struct ThresholdAddress {
    GroupElement public_key; // T
    std::uint32_t t = 0;
    std::uint32_t n = 0;
};

/// Raised when a dealt share fails Feldman verification; no complaint or
/// recovery round, the run just stops and names the dealer.
struct DkgAbort : std::runtime_error {
    std::uint32_t culprit;
    explicit DkgAbort(std::uint32_t dealer)
        : std::runtime_error("dkg share from participant " + std::to_string(dealer)
                             + " failed verification"),
          culprit(dealer)
    {
    }
};

// One participant's dealing: a secret degree-(t-1) polynomial and the
// commitments to its coefficients. The rounds are free functions so a
// message-driven harness can interleave them; dkg_run composes them
// in-memory for direct library use.
struct DkgDealer {
    std::vector<Scalar> coefficients; // a_0 .. a_{t-1}, kept secret
    std::vector<GroupElement> commitments;
};

DkgDealer dkg_deal(const Group& group, std::uint32_t t, SeededRng& rng);

/// f_i(j) — the dealer's polynomial evaluated at the recipient index.
Scalar dkg_share_for(const Group& group, const DkgDealer& dealer, std::uint32_t j);

/// Check one dealer's contribution: g^share == prod_k A_k^(j^k).
bool dkg_verify_dealer_share(const Group& group, std::uint32_t recipient,
                             const Scalar& share,
                             std::span<const GroupElement> dealer_commitments);

struct DkgResult {
    ThresholdAddress address;
    FeldmanCommitments commitments;
    std::vector<SecretShare> shares; // index i+1 at position i
};

/// In-memory joint-Feldman exchange among n honest-but-curious
/// participants. Throws DkgAbort on a bad dealer.
DkgResult dkg_run(const Group& group, std::uint32_t n, std::uint32_t t,
                  std::span<SeededRng> participant_rngs);

/// True iff share.value*G equals the double sum of commitments evaluated
/// at the share index.
bool verify_share(const Group& group, const SecretShare& share,
                  const FeldmanCommitments& commitments);

/// Lagrange coefficient at zero for `index` within the signer index set.
Scalar lagrange_at_zero(const Group& group, std::span<const std::uint32_t> indices,
                        std::uint32_t index);

/// Lagrange interpolation at zero. Throws std::invalid_argument
/// ("insufficient shares" / "duplicate share").
Scalar reconstruct_secret(const Group& group, std::span<const SecretShare> shares,
                          std::uint32_t t);

struct SignerInput {
    SecretShare share;
    Scalar nonce; // k_i, fresh per session
};

/// Two-round threshold Schnorr: R = prod g^{k_i}, c = H(T, R, m),
/// s = sum (k_i + c * lambda_i * share_i). Verifies under T with the
/// plain verify().
Signature threshold_sign(const Group& group, std::span<const SignerInput> signers,
                         ByteView message, const ThresholdAddress& address);

} // namespace tnvote

#include "tnvote/threshold.hpp"

#include <set>

namespace tnvote {

namespace {

// Horner evaluation of the committed polynomial in the exponent:
// prod_k A_k^(x^k) for one dealer's commitment vector.
GroupElement commitment_eval(const Group& group,
                             std::span<const GroupElement> commitments,
                             std::uint32_t x)
{
    GroupElement acc = group.identity();
    Scalar xs = group.scalar_from_u64(x);
    for (auto it = commitments.rbegin(); it != commitments.rend(); ++it)
        acc = group.mul(group.exp(acc, xs), *it);
    return acc;
}

void check_signer_indices(std::span<const std::uint32_t> indices, std::uint32_t t)
{
    std::set<std::uint32_t> seen;
    for (std::uint32_t idx : indices)
        if (!seen.insert(idx).second)
            throw std::invalid_argument("duplicate share");
    if (seen.size() < t)
        throw std::invalid_argument("insufficient shares");
}

} // namespace

DkgDealer dkg_deal(const Group& group, std::uint32_t t, SeededRng& rng)
{
    if (t == 0)
        throw std::invalid_argument("threshold must be positive");
    DkgDealer dealer;
    dealer.coefficients.reserve(t);
    dealer.commitments.reserve(t);
    for (std::uint32_t k = 0; k < t; ++k) {
        Scalar a = random_scalar(group, rng);
        dealer.commitments.push_back(group.base_exp(a));
        dealer.coefficients.push_back(std::move(a));
    }
    return dealer;
}

Scalar dkg_share_for(const Group& group, const DkgDealer& dealer, std::uint32_t j)
{
    if (j == 0)
        throw std::invalid_argument("share index must be nonzero");
    // Horner: f(j) = a_0 + j(a_1 + j(a_2 + ...))
    Scalar x = group.scalar_from_u64(j);
    Scalar acc = group.scalar_zero();
    for (auto it = dealer.coefficients.rbegin(); it != dealer.coefficients.rend(); ++it)
        acc = group.scalar_add(group.scalar_mul(acc, x), *it);
    return acc;
}

bool dkg_verify_dealer_share(const Group& group, std::uint32_t recipient,
                             const Scalar& share,
                             std::span<const GroupElement> dealer_commitments)
{
    return group.base_exp(share) == commitment_eval(group, dealer_commitments, recipient);
}

DkgResult dkg_run(const Group& group, std::uint32_t n, std::uint32_t t,
                  std::span<SeededRng> participant_rngs)
{
    if (n < 2 || t < 1 || t > n)
        throw std::invalid_argument("need 1 <= t <= n and n >= 2");
    if (participant_rngs.size() != n)
        throw std::invalid_argument("one rng per participant required");

    std::vector<DkgDealer> dealers;
    dealers.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i)
        dealers.push_back(dkg_deal(group, t, participant_rngs[i]));

    DkgResult result;
    result.commitments.per_participant.reserve(n);
    for (const DkgDealer& d : dealers)
        result.commitments.per_participant.push_back(d.commitments);

    result.shares.reserve(n);
    for (std::uint32_t j = 1; j <= n; ++j) {
        Scalar sum = group.scalar_zero();
        for (std::uint32_t i = 0; i < n; ++i) {
            Scalar piece = dkg_share_for(group, dealers[i], j);
            if (!dkg_verify_dealer_share(group, j, piece, dealers[i].commitments))
                throw DkgAbort(i + 1);
            sum = group.scalar_add(sum, piece);
        }
        result.shares.push_back(SecretShare{j, std::move(sum)});
    }

    GroupElement joint = group.identity();
    for (const DkgDealer& d : dealers)
        joint = group.mul(joint, d.commitments.front());
    result.address = ThresholdAddress{std::move(joint), t, n};
    return result;
}

bool verify_share(const Group& group, const SecretShare& share,
                  const FeldmanCommitments& commitments)
{
    if (share.index == 0 || commitments.per_participant.empty())
        return false;
    GroupElement expected = group.identity();
    for (const auto& dealer : commitments.per_participant)
        expected = group.mul(expected, commitment_eval(group, dealer, share.index));
    return group.base_exp(share.value) == expected;
}

Scalar lagrange_at_zero(const Group& group, std::span<const std::uint32_t> indices,
                        std::uint32_t index)
{
    // lambda_i = prod_{j != i} x_j / (x_j - x_i)
    Scalar num{1};
    Scalar den{1};
    Scalar xi = group.scalar_from_u64(index);
    for (std::uint32_t other : indices) {
        if (other == index)
            continue;
        Scalar xj = group.scalar_from_u64(other);
        num = group.scalar_mul(num, xj);
        den = group.scalar_mul(den, group.scalar_sub(xj, xi));
    }
    return group.scalar_mul(num, group.scalar_inv(den));
}

Scalar reconstruct_secret(const Group& group, std::span<const SecretShare> shares,
                          std::uint32_t t)
{
    std::vector<std::uint32_t> indices;
    indices.reserve(shares.size());
    for (const SecretShare& s : shares)
        indices.push_back(s.index);
    check_signer_indices(indices, t);

    Scalar secret = group.scalar_zero();
    for (const SecretShare& s : shares) {
        Scalar lambda = lagrange_at_zero(group, indices, s.index);
        secret = group.scalar_add(secret, group.scalar_mul(lambda, s.value));
    }
    return secret;
}

Signature threshold_sign(const Group& group, std::span<const SignerInput> signers,
                         ByteView message, const ThresholdAddress& address)
{
    std::vector<std::uint32_t> indices;
    indices.reserve(signers.size());
    for (const SignerInput& s : signers)
        indices.push_back(s.share.index);
    check_signer_indices(indices, address.t);

    GroupElement commitment = group.identity();
    for (const SignerInput& s : signers)
        commitment = group.mul(commitment, group.base_exp(s.nonce));

    Scalar c = schnorr_challenge(group, address.public_key, commitment, message);

    Scalar response = group.scalar_zero();
    for (const SignerInput& s : signers) {
        Scalar lambda = lagrange_at_zero(group, indices, s.share.index);
        Scalar partial = group.scalar_add(
            s.nonce, group.scalar_mul(c, group.scalar_mul(lambda, s.share.value)));
        response = group.scalar_add(response, partial);
    }
    return Signature{std::move(commitment), std::move(response)};
}

} // namespace tnvote

#pragma once

#include "tnvote/group.hpp"
#include "tnvote/rng.hpp"

#include <optional>
#include <vector>

namespace tnvote {

struct KeyPair {
    Scalar sk;
    GroupElement pk;
};

/// Draw a nonzero scalar from the stream (retrying the zero residue).
Scalar random_scalar(const Group& group, SeededRng& rng);

/// Deterministic given identical seed bytes; pk = g^sk.
KeyPair keygen(const Group& group, ByteView randomness);
KeyPair keygen(const Group& group, SeededRng& rng);

// Hybrid key-private encryption. The ciphertext carries only a uniform
// ephemeral group element, a stream-ciphered body and a MAC tag, so
// nothing in it identifies the recipient key; recipients find their
// messages by trial decryption.
struct VoteCiphertext {
    GroupElement ephemeral;
    Bytes body;
    Digest32 tag;

    bool operator==(const VoteCiphertext&) const = default;
};

constexpr std::size_t kMaxPlaintext = 4096;

/// Canonical serialization: ephemeral (fixed width) | u32 body length |
/// body | tag. Lexicographic order and hashing are defined over it.
Bytes serialize_ciphertext(const Group& group, const VoteCiphertext& ct);
std::optional<VoteCiphertext> parse_ciphertext(const Group& group, ByteView data);

VoteCiphertext pke_encrypt(const Group& group, const GroupElement& pk,
                           ByteView plaintext, SeededRng& rng);

/// Returns the plaintext iff the tag verifies under this key; nullopt
/// signals "not addressed to this key" (a trial-decryption miss).
std::optional<Bytes> pke_decrypt(const Group& group, const Scalar& sk,
                                 const VoteCiphertext& ct);

/// Wrap `ct` so that peeling with the key matching pks[0] exposes the
/// next layer; pks are ordered outermost (first peeler) first.
VoteCiphertext onion_encrypt(const Group& group, const VoteCiphertext& ct,
                             std::span<const GroupElement> pks, SeededRng& rng);

/// Remove one onion layer; nullopt on tag failure or malformed inner bytes.
std::optional<VoteCiphertext> onion_peel(const Group& group, const Scalar& sk,
                                         const VoteCiphertext& ct);

struct Signature {
    GroupElement commitment; // R
    Scalar response;         // s

    bool operator==(const Signature&) const = default;
};

/// Challenge scalar c = H(pk, R, message) mod q, shared by single-key
/// and threshold signing.
Scalar schnorr_challenge(const Group& group, const GroupElement& pk,
                         const GroupElement& commitment, ByteView message);

Signature sign_with_nonce(const Group& group, const Scalar& sk, ByteView message,
                          const Scalar& nonce);
Signature sign(const Group& group, const Scalar& sk, ByteView message, SeededRng& rng);

/// True iff g^s == R * pk^c with c = H(pk, R, message).
bool verify(const Group& group, const GroupElement& pk, ByteView message,
            const Signature& sig);

/// Deterministic Fisher-Yates over the SeededRng stream; returns a
/// permutation of [1..n] (1-based values). Throws on n = 0.
std::vector<std::uint32_t> derive_permutation(ByteView seed, std::size_t n);

/// out[k] = items[perm[k] - 1]
template <typename T>
std::vector<T> apply_permutation(const std::vector<std::uint32_t>& perm,
                                 const std::vector<T>& items)
{
    std::vector<T> out;
    out.reserve(items.size());
    for (std::uint32_t p : perm)
        out.push_back(items.at(p - 1));
    return out;
}

} // namespace tnvote

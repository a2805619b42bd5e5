#include "tnvote/crypto.hpp"

#include <algorithm>
#include <stdexcept>

namespace tnvote {

namespace {

Digest32 derive_key(std::string_view label, ByteView shared)
{
    ByteWriter w;
    w.prefixed(to_bytes(label));
    w.raw(shared);
    return sha256(w.bytes());
}

// SHA-256 counter-mode keystream XORed into the buffer.
void stream_xor(const Digest32& key, Bytes& buf)
{
    std::uint64_t counter = 0;
    for (std::size_t off = 0; off < buf.size(); off += 32, ++counter) {
        ByteWriter w;
        w.raw(digest_view(key));
        w.u64(counter);
        Digest32 block = sha256(w.bytes());
        std::size_t n = std::min<std::size_t>(32, buf.size() - off);
        for (std::size_t i = 0; i < n; ++i)
            buf[off + i] ^= block[i];
    }
}

Digest32 compute_tag(const Group& group, const Digest32& mac_key,
                     const GroupElement& ephemeral, ByteView body)
{
    ByteWriter w;
    w.raw(group.encode_element(ephemeral));
    w.raw(body);
    return hmac_sha256(digest_view(mac_key), w.bytes());
}

} // namespace

Scalar random_scalar(const Group& group, SeededRng& rng)
{
    for (;;) {
        // double-width draw keeps the mod-q bias negligible
        Bytes wide = rng.bytes(group.scalar_size() * 2);
        Scalar s = group.scalar_from_bytes(wide);
        if (!s.is_zero())
            return s;
    }
}

KeyPair keygen(const Group& group, SeededRng& rng)
{
    Scalar sk = random_scalar(group, rng);
    return KeyPair{sk, group.base_exp(sk)};
}

KeyPair keygen(const Group& group, ByteView randomness)
{
    SeededRng rng(Bytes(randomness.begin(), randomness.end()));
    return keygen(group, rng);
}

Bytes serialize_ciphertext(const Group& group, const VoteCiphertext& ct)
{
    ByteWriter w;
    w.raw(group.encode_element(ct.ephemeral));
    w.prefixed(ct.body);
    w.raw(digest_view(ct.tag));
    return w.take();
}

std::optional<VoteCiphertext> parse_ciphertext(const Group& group, ByteView data)
{
    try {
        ByteReader r(data);
        GroupElement ephemeral = group.decode_element(r.raw(group.element_size()));
        Bytes body = r.prefixed(kMaxPlaintext);
        Bytes tag_bytes = r.raw(32);
        if (!r.done())
            return std::nullopt;
        VoteCiphertext ct;
        ct.ephemeral = std::move(ephemeral);
        ct.body = std::move(body);
        std::copy(tag_bytes.begin(), tag_bytes.end(), ct.tag.begin());
        return ct;
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

VoteCiphertext pke_encrypt(const Group& group, const GroupElement& pk,
                           ByteView plaintext, SeededRng& rng)
{
    if (plaintext.size() > kMaxPlaintext)
        throw std::invalid_argument("plaintext too large");
    Scalar e = random_scalar(group, rng);
    VoteCiphertext ct;
    ct.ephemeral = group.base_exp(e);
    Bytes shared = group.encode_element(group.exp(pk, e));
    ct.body.assign(plaintext.begin(), plaintext.end());
    stream_xor(derive_key("tnvote/pke/enc", shared), ct.body);
    ct.tag = compute_tag(group, derive_key("tnvote/pke/mac", shared), ct.ephemeral, ct.body);
    return ct;
}

std::optional<Bytes> pke_decrypt(const Group& group, const Scalar& sk,
                                 const VoteCiphertext& ct)
{
    Bytes shared = group.encode_element(group.exp(ct.ephemeral, sk));
    Digest32 expected = compute_tag(group, derive_key("tnvote/pke/mac", shared),
                                    ct.ephemeral, ct.body);
    if (expected != ct.tag)
        return std::nullopt;
    Bytes plaintext = ct.body;
    stream_xor(derive_key("tnvote/pke/enc", shared), plaintext);
    return plaintext;
}

VoteCiphertext onion_encrypt(const Group& group, const VoteCiphertext& ct,
                             std::span<const GroupElement> pks, SeededRng& rng)
{
    VoteCiphertext out = ct;
    for (auto it = pks.rbegin(); it != pks.rend(); ++it)
        out = pke_encrypt(group, *it, serialize_ciphertext(group, out), rng);
    return out;
}

std::optional<VoteCiphertext> onion_peel(const Group& group, const Scalar& sk,
                                         const VoteCiphertext& ct)
{
    std::optional<Bytes> inner = pke_decrypt(group, sk, ct);
    if (!inner)
        return std::nullopt;
    return parse_ciphertext(group, *inner);
}

Scalar schnorr_challenge(const Group& group, const GroupElement& pk,
                         const GroupElement& commitment, ByteView message)
{
    ByteWriter w;
    w.raw(group.encode_element(pk));
    w.raw(group.encode_element(commitment));
    w.prefixed(message);
    return group.hash_to_scalar("tnvote/schnorr", w.bytes());
}

Signature sign_with_nonce(const Group& group, const Scalar& sk, ByteView message,
                          const Scalar& nonce)
{
    if (nonce.is_zero())
        throw std::invalid_argument("zero signing nonce");
    GroupElement commitment = group.base_exp(nonce);
    GroupElement pk = group.base_exp(sk);
    Scalar c = schnorr_challenge(group, pk, commitment, message);
    Scalar s = group.scalar_add(nonce, group.scalar_mul(c, sk));
    return Signature{std::move(commitment), std::move(s)};
}

Signature sign(const Group& group, const Scalar& sk, ByteView message, SeededRng& rng)
{
    return sign_with_nonce(group, sk, message, random_scalar(group, rng));
}

bool verify(const Group& group, const GroupElement& pk, ByteView message,
            const Signature& sig)
{
    if (sig.commitment.value < 1 || sig.commitment.value >= group.p())
        return false;
    if (sig.response.value < 0 || sig.response.value >= group.q())
        return false;
    Scalar c = schnorr_challenge(group, pk, sig.commitment, message);
    GroupElement lhs = group.base_exp(sig.response);
    GroupElement rhs = group.mul(sig.commitment, group.exp(pk, c));
    return lhs == rhs;
}

std::vector<std::uint32_t> derive_permutation(ByteView seed, std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("empty permutation");
    SeededRng rng(Bytes(seed.begin(), seed.end()));
    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = static_cast<std::uint32_t>(i + 1);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::uint64_t j = rng.uniform(i + 1);
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

} // namespace tnvote

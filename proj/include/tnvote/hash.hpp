#pragma once

#include "tnvote/bytes.hpp"

#include <array>

namespace tnvote {

using Digest32 = std::array<std::uint8_t, 32>;
using Digest20 = std::array<std::uint8_t, 20>;

Digest32 sha256(ByteView data);
Digest20 ripemd160(ByteView data);

/// RIPEMD-160 of SHA-256, the digest behind OP_HASH160-style hash locks.
Digest20 hash160(ByteView data);

Digest32 hmac_sha256(ByteView key, ByteView msg);

inline ByteView digest_view(const Digest32& d) { return ByteView(d.data(), d.size()); }
inline ByteView digest_view(const Digest20& d) { return ByteView(d.data(), d.size()); }

} // namespace tnvote

#pragma once

#include "tnvote/bytes.hpp"

#include <cstdint>

namespace tnvote {

// Deterministic byte stream: block k = SHA-256(seed || k as 8-byte
// big-endian), blocks consumed in order. Every piece of randomness in
// simulation mode flows through one of these, keyed by role and purpose.
class SeededRng {
public:
    explicit SeededRng(Bytes seed);

    /// Child stream with the label appended to the seed (length-prefixed).
    SeededRng derive(std::string_view label) const;

    void fill(std::uint8_t* out, std::size_t n);
    Bytes bytes(std::size_t n);

    std::uint64_t next_u64(); // 8 stream bytes, big-endian

    /// Uniform draw in [0, bound) via rejection sampling: reject v when
    /// v >= 2^64 - (2^64 mod bound), else return v mod bound.
    std::uint64_t uniform(std::uint64_t bound);

private:
    Bytes seed_;
    std::uint64_t counter_ = 0;
    Bytes block_;
    std::size_t pos_ = 0;
};

} // namespace tnvote

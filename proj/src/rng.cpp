#include "tnvote/rng.hpp"

#include "tnvote/hash.hpp"

#include <stdexcept>

namespace tnvote {

SeededRng::SeededRng(Bytes seed) : seed_(std::move(seed)) {}

SeededRng SeededRng::derive(std::string_view label) const
{
    ByteWriter w;
    w.prefixed(seed_);
    w.prefixed(to_bytes(label));
    return SeededRng(w.take());
}

void SeededRng::fill(std::uint8_t* out, std::size_t n)
{
    while (n > 0) {
        if (pos_ == block_.size()) {
            ByteWriter w;
            w.raw(seed_);
            w.u64(counter_++);
            Digest32 d = sha256(w.bytes());
            block_.assign(d.begin(), d.end());
            pos_ = 0;
        }
        std::size_t take = std::min(n, block_.size() - pos_);
        std::copy(block_.begin() + pos_, block_.begin() + pos_ + take, out);
        pos_ += take;
        out += take;
        n -= take;
    }
}

Bytes SeededRng::bytes(std::size_t n)
{
    Bytes out(n);
    fill(out.data(), n);
    return out;
}

std::uint64_t SeededRng::next_u64()
{
    std::uint8_t buf[8];
    fill(buf, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = v << 8 | buf[i];
    return v;
}

std::uint64_t SeededRng::uniform(std::uint64_t bound)
{
    if (bound == 0)
        throw std::invalid_argument("uniform bound must be positive");
    // 2^64 mod bound, computed without 128-bit arithmetic
    std::uint64_t rem = (UINT64_MAX % bound + 1) % bound;
    for (;;) {
        std::uint64_t v = next_u64();
        if (rem == 0 || v < UINT64_MAX - rem + 1)
            return v % bound;
    }
}

} // namespace tnvote

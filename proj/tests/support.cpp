#include "support.hpp"

#include "tnvote/hash.hpp"

#include <stdexcept>

namespace tnvote::test {

const Group& tiny_group()
{
    // p = 503 = 2*251 + 1, g = 2^2 mod 503
    static const Group g("tiny-251", "1f7", "fb", "4");
    return g;
}

const Group& lagrange_group()
{
    // p = 23 = 2*11 + 1, g = 2^2 mod 23
    static const Group g("tiny-11", "17", "b", "4");
    return g;
}

GroupElement naive_exp(const Group& group, const GroupElement& base, std::uint64_t e)
{
    GroupElement acc = group.identity();
    for (std::uint64_t i = 0; i < e; ++i)
        acc = group.mul(acc, base);
    return acc;
}

std::uint64_t brute_force_dlog(const Group& group, const GroupElement& target)
{
    GroupElement acc = group.identity();
    std::uint64_t q = group.q().get_ui();
    for (std::uint64_t e = 0; e < q; ++e) {
        if (acc == target)
            return e;
        acc = group.mul(acc, group.generator());
    }
    throw std::runtime_error("dlog not found; element outside subgroup?");
}

std::vector<std::uint32_t> reference_permutation(const Bytes& seed, std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("empty permutation");

    Bytes pool;
    std::uint64_t block_counter = 0;
    std::size_t cursor = 0;

    auto read_u64 = [&]() {
        while (pool.size() - cursor < 8) {
            ByteWriter w;
            w.raw(seed);
            w.u64(block_counter++);
            Digest32 d = sha256(w.bytes());
            pool.insert(pool.end(), d.begin(), d.end());
        }
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v = v << 8 | pool[cursor++];
        return v;
    };

    auto draw = [&](std::uint64_t bound) {
        // 2^64 mod bound; reject the final partial block of values
        std::uint64_t rem = (UINT64_MAX % bound + 1) % bound;
        for (;;) {
            std::uint64_t v = read_u64();
            if (rem == 0 || v <= UINT64_MAX - rem)
                return v % bound;
        }
    };

    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i)
        perm[i] = static_cast<std::uint32_t>(i + 1);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::uint64_t j = draw(i + 1);
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

} // namespace tnvote::test

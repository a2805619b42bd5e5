#pragma once

#include "tnvote/crypto.hpp"

#include <cstdint>
#include <vector>

namespace tnvote::test {

/// q = 251 subgroup of Z_503^*; small enough for exhaustive sweeps.
const Group& tiny_group();
/// q = 11 subgroup of Z_23^*; matches the hand-computed Lagrange vectors.
const Group& lagrange_group();

/// Oracle: g^e by literal repeated multiplication, no square-and-multiply.
GroupElement naive_exp(const Group& group, const GroupElement& base, std::uint64_t e);

/// Oracle: exhaustive discrete log in a small group; throws if not found.
std::uint64_t brute_force_dlog(const Group& group, const GroupElement& target);

/// Independent straight-line implementation of the hash-counter
/// Fisher-Yates procedure, kept deliberately separate from SeededRng.
std::vector<std::uint32_t> reference_permutation(const Bytes& seed, std::size_t n);

} // namespace tnvote::test

#pragma once

#include "tnvote/bytes.hpp"
#include "tnvote/hash.hpp"

#include <gmpxx.h>

#include <compare>
#include <string>

namespace tnvote {

/// Element of the order-q subgroup, stored as a residue mod p.
struct GroupElement {
    mpz_class value;

    bool operator==(const GroupElement&) const = default;
};

/// Field element mod q (exponents, keys, shares, signature responses).
struct Scalar {
    mpz_class value;

    bool operator==(const Scalar&) const = default;
    bool is_zero() const { return value == 0; }
};

// Prime-order cyclic group realized as the order-q subgroup of Z_p^*.
// Two built-in parameter sets: a small test group with feasible discrete
// logs for oracle cross-checks, and a 2048-bit group with a 256-bit
// prime order for realistic runs. Written multiplicatively; the key
// equation pk = sk*G reads pk = g^sk here.
class Group {
public:
    Group(std::string id, const std::string& p_hex, const std::string& q_hex,
          const std::string& g_hex);

    static const Group& test_group();   // q = 65521
    static const Group& crypto_group(); // q ~ 2^256, p ~ 2^2048
    static const Group& by_id(const std::string& id); // throws on unknown id

    const std::string& id() const { return id_; }
    const mpz_class& p() const { return p_; }
    const mpz_class& q() const { return q_; }
    const GroupElement& generator() const { return g_; }
    std::size_t element_size() const { return element_size_; }
    std::size_t scalar_size() const { return scalar_size_; }

    GroupElement identity() const { return GroupElement{1}; }
    GroupElement mul(const GroupElement& a, const GroupElement& b) const;
    GroupElement exp(const GroupElement& base, const Scalar& e) const;
    GroupElement base_exp(const Scalar& e) const { return exp(g_, e); }
    bool is_valid_element(const GroupElement& e) const; // range + subgroup check

    Scalar scalar_zero() const { return Scalar{0}; }
    Scalar scalar_from_u64(std::uint64_t v) const;
    Scalar scalar_from_bytes(ByteView data) const; // big-endian, reduced mod q
    Scalar scalar_add(const Scalar& a, const Scalar& b) const;
    Scalar scalar_sub(const Scalar& a, const Scalar& b) const;
    Scalar scalar_mul(const Scalar& a, const Scalar& b) const;
    Scalar scalar_neg(const Scalar& a) const;
    Scalar scalar_inv(const Scalar& a) const; // throws on zero

    // Fixed-width big-endian encodings, the canonical wire form.
    Bytes encode_element(const GroupElement& e) const;
    GroupElement decode_element(ByteView data) const; // throws on range error
    Bytes encode_scalar(const Scalar& s) const;
    Scalar decode_scalar(ByteView data) const;

    /// Domain-separated hash of already-encoded parts, reduced mod q.
    Scalar hash_to_scalar(std::string_view domain, ByteView data) const;

private:
    std::string id_;
    mpz_class p_;
    mpz_class q_;
    GroupElement g_;
    std::size_t element_size_;
    std::size_t scalar_size_;
};

} // namespace tnvote

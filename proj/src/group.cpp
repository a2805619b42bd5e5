#include "tnvote/group.hpp"

#include <stdexcept>

namespace tnvote {

namespace {

// 2048-bit modulus with a 256-bit prime-order subgroup. Derived from
// SHA-256 counter streams over the labels "tnvote-group-q" and
// "tnvote-group-k" (q = next prime above the stream value with the top
// bit set; p = k*q + 1 for the first k making p a 2048-bit prime;
// g = 2^((p-1)/q) mod p).
const char* kCryptoP =
    "a4a29f362812f52df93ae66c15f7c13ca1deb8bdd9b6404e7fe680fdeff877ac"
    "9b2e1a77559c54b80349e9a689fbee5ad8f34d8859dd9081c45c721553f57a01"
    "906189973e3ae7052463a3c197cfd55d496dad9ea54aec8aa42eef3b6b4b9422"
    "77c2dadd14bdd77232ed222bd78f8f95c0ed7525183670252400d24865237365"
    "beecd1deb80afdfd64af685f482b6c379b718d3d6ba16347dc67aa3f44f0a3c8"
    "06b4eccb689e496fde7012b08e1e1bb116d8c759c4f2e2a4e98d21bb607e96e7"
    "c06acbff362c538844a1782e78ff2ccf34cab381f1091fe6269a31fc675f060c"
    "6e2049d33ab535d13a61bc43fa015cd0a9aa628d754a3388c3fa93666189e78b";
const char* kCryptoQ =
    "e6a923b189d34bf32f62e1eb3d7431cd272ca0fdd33745c2d48460a84a63dd93";
const char* kCryptoG =
    "8e04e01963f8f32bf83862a92c7cfd096cbf0eefba3982d00a805dec70982402"
    "7d4f56d59a0dec6d8fcc914886b467c1f575aa52db291b6dc3423392795f8b41"
    "7f6ed42263d9b3175a457c4e370a4b27e0bd8526e116a8345280e60d43200e43"
    "d1f11607819624c16a9d2e61ee81147e959685984631dbc7046ddbafc8147e34"
    "e2c540ec152535153f50120e816c98f36efb299bbab54db084b1a4c349f81475"
    "70f3c9b7942c2dd17267ce055d9def0d94c2f743158466babca783f87417e7e8"
    "fc3b0e408e89c916b6cc237cb746b9737719050a59b8f523b935cb6593a1bf23"
    "b16e3e7e9259f98ec3e90bb96aa58f1cf78c26ad2cbe9a614b16aa27fab0b0d2";

std::size_t byte_width(const mpz_class& v)
{
    return (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
}

mpz_class from_hex_mpz(const std::string& hex)
{
    mpz_class v;
    if (mpz_set_str(v.get_mpz_t(), hex.c_str(), 16) != 0)
        throw std::invalid_argument("bad hex integer");
    return v;
}

mpz_class from_be_bytes(ByteView data)
{
    mpz_class v;
    mpz_import(v.get_mpz_t(), data.size(), 1, 1, 1, 0, data.data());
    return v;
}

Bytes to_be_bytes(const mpz_class& v, std::size_t width)
{
    Bytes out(width, 0);
    std::size_t count = 0;
    mpz_export(out.data() + (width - byte_width(v)), &count, 1, 1, 1, 0, v.get_mpz_t());
    return out;
}

} // namespace

Group::Group(std::string id, const std::string& p_hex, const std::string& q_hex,
             const std::string& g_hex)
    : id_(std::move(id)),
      p_(from_hex_mpz(p_hex)),
      q_(from_hex_mpz(q_hex)),
      g_{from_hex_mpz(g_hex)}
{
    if (mpz_probab_prime_p(p_.get_mpz_t(), 40) == 0)
        throw std::invalid_argument("group modulus is not prime");
    if (mpz_probab_prime_p(q_.get_mpz_t(), 40) == 0)
        throw std::invalid_argument("group order is not prime");
    if ((p_ - 1) % q_ != 0)
        throw std::invalid_argument("q does not divide p-1");
    element_size_ = byte_width(p_);
    scalar_size_ = byte_width(q_);
    if (g_.value <= 1 || g_.value >= p_ || !is_valid_element(g_))
        throw std::invalid_argument("generator does not have order q");
}

const Group& Group::test_group()
{
    // q = 65521 (largest 16-bit prime), p = 10q + 1, g = 2^10 mod p.
    static const Group g("test", "9ff6b", "fff1", "400");
    return g;
}

const Group& Group::crypto_group()
{
    static const Group g("crypto", kCryptoP, kCryptoQ, kCryptoG);
    return g;
}

const Group& Group::by_id(const std::string& id)
{
    if (id == "test") return test_group();
    if (id == "crypto") return crypto_group();
    throw std::invalid_argument("unknown group id: " + id);
}

GroupElement Group::mul(const GroupElement& a, const GroupElement& b) const
{
    mpz_class r = a.value * b.value;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), p_.get_mpz_t());
    return GroupElement{std::move(r)};
}

GroupElement Group::exp(const GroupElement& base, const Scalar& e) const
{
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.value.get_mpz_t(), e.value.get_mpz_t(), p_.get_mpz_t());
    return GroupElement{std::move(r)};
}

bool Group::is_valid_element(const GroupElement& e) const
{
    if (e.value < 1 || e.value >= p_)
        return false;
    mpz_class r;
    mpz_powm(r.get_mpz_t(), e.value.get_mpz_t(), q_.get_mpz_t(), p_.get_mpz_t());
    return r == 1;
}

Scalar Group::scalar_from_u64(std::uint64_t v) const
{
    mpz_class r(static_cast<unsigned long>(v));
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
    return Scalar{std::move(r)};
}

Scalar Group::scalar_from_bytes(ByteView data) const
{
    mpz_class r = from_be_bytes(data);
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
    return Scalar{std::move(r)};
}

Scalar Group::scalar_add(const Scalar& a, const Scalar& b) const
{
    mpz_class r = a.value + b.value;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
    return Scalar{std::move(r)};
}

Scalar Group::scalar_sub(const Scalar& a, const Scalar& b) const
{
    mpz_class r = a.value - b.value;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
    return Scalar{std::move(r)};
}

Scalar Group::scalar_mul(const Scalar& a, const Scalar& b) const
{
    mpz_class r = a.value * b.value;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
    return Scalar{std::move(r)};
}

Scalar Group::scalar_neg(const Scalar& a) const
{
    mpz_class r = -a.value;
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), q_.get_mpz_t());
    return Scalar{std::move(r)};
}

Scalar Group::scalar_inv(const Scalar& a) const
{
    if (a.is_zero())
        throw std::invalid_argument("zero has no inverse");
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.value.get_mpz_t(), q_.get_mpz_t()) == 0)
        throw std::invalid_argument("non-invertible scalar");
    return Scalar{std::move(r)};
}

Bytes Group::encode_element(const GroupElement& e) const
{
    return to_be_bytes(e.value, element_size_);
}

GroupElement Group::decode_element(ByteView data) const
{
    if (data.size() != element_size_)
        throw std::invalid_argument("element encoding has wrong width");
    mpz_class v = from_be_bytes(data);
    if (v < 1 || v >= p_)
        throw std::invalid_argument("element out of range");
    return GroupElement{std::move(v)};
}

Bytes Group::encode_scalar(const Scalar& s) const
{
    return to_be_bytes(s.value, scalar_size_);
}

Scalar Group::decode_scalar(ByteView data) const
{
    if (data.size() != scalar_size_)
        throw std::invalid_argument("scalar encoding has wrong width");
    mpz_class v = from_be_bytes(data);
    if (v >= q_)
        throw std::invalid_argument("scalar out of range");
    return Scalar{std::move(v)};
}

Scalar Group::hash_to_scalar(std::string_view domain, ByteView data) const
{
    ByteWriter w;
    w.prefixed(to_bytes(domain));
    w.raw(data);
    Digest32 d = sha256(w.bytes());
    return scalar_from_bytes(digest_view(d));
}

} // namespace tnvote

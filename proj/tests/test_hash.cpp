#include "tnvote/hash.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace tnvote;

namespace {

std::string hex32(const Digest32& d) { return to_hex(digest_view(d)); }
std::string hex20(const Digest20& d) { return to_hex(digest_view(d)); }

} // namespace

TEST_CASE("sha256 standard vectors")
{
    CHECK(hex32(sha256(to_bytes("")))
          == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(hex32(sha256(to_bytes("abc")))
          == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("ripemd160 standard vectors")
{
    CHECK(hex20(ripemd160(to_bytes(""))) == "9c1185a5c5e9fc54612808977ee8f548b2258d31");
    CHECK(hex20(ripemd160(to_bytes("abc"))) == "8eb208f7e05d987a9b044a8e98c6b087f15a0bfc");
}

TEST_CASE("hash160 composition vectors")
{
    // RIPEMD-160(SHA-256(x)), cross-checked against an independent
    // composition of the two reference implementations
    CHECK(hex20(hash160(to_bytes(""))) == "b472a266d0bd89c13706a4132ccfb16f7c3b9fcb");
    CHECK(hex20(hash160(to_bytes("abc"))) == "bb1be98c142444d7a56aa3981c3942a978e4dc33");
    CHECK(hex20(hash160(to_bytes("hello world")))
          == "d7d5ee7824ff93f94c3055af9382c86c68b5ca92");
    CHECK(hex20(hash160(to_bytes("The quick brown fox jumps over the lazy dog")))
          == "0e3397b4abc7a382b3ea2365883c3c7ca5f07600");

    Bytes all_bytes(256);
    for (int i = 0; i < 256; ++i)
        all_bytes[i] = static_cast<std::uint8_t>(i);
    CHECK(hex20(hash160(all_bytes)) == "07a536d93e0b9a779874e1287a226b8230cda46e");
}

TEST_CASE("hash160 determinism and distinctness")
{
    CHECK(hash160(to_bytes("same input")) == hash160(to_bytes("same input")));
    CHECK(hash160(to_bytes("input a")) != hash160(to_bytes("input b")));
}

TEST_CASE("hmac-sha256 rfc 4231 case 1")
{
    Bytes key(20, 0x0b);
    CHECK(hex32(hmac_sha256(key, to_bytes("Hi There")))
          == "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
}

TEST_CASE("hex round trip")
{
    Bytes data = from_hex("00ff10ab");
    CHECK(data == Bytes{0x00, 0xff, 0x10, 0xab});
    CHECK(to_hex(data) == "00ff10ab");
    CHECK_THROWS_AS(from_hex("abc"), std::invalid_argument);
    CHECK_THROWS_AS(from_hex("zz"), std::invalid_argument);
}

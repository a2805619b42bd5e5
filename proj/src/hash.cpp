#include "tnvote/hash.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/provider.h>

#include <mutex>
#include <stdexcept>

namespace tnvote {

namespace {

// RIPEMD-160 lives in OpenSSL 3's legacy provider; loading any provider
// explicitly disables automatic loading of the default one, so both are
// pulled in here.
struct ProviderBootstrap {
    ProviderBootstrap()
    {
        OSSL_PROVIDER_load(nullptr, "default");
        OSSL_PROVIDER_load(nullptr, "legacy");
    }
};

const EVP_MD* fetch_md(const char* name)
{
    static ProviderBootstrap bootstrap;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    static const EVP_MD* sha = EVP_MD_fetch(nullptr, "SHA256", nullptr);
    static const EVP_MD* rip = EVP_MD_fetch(nullptr, "RIPEMD160", nullptr);
    if (name[0] == 'S') {
        if (!sha) throw std::runtime_error("SHA256 unavailable");
        return sha;
    }
    if (!rip) throw std::runtime_error("RIPEMD160 unavailable");
    return rip;
}

template <std::size_t N>
std::array<std::uint8_t, N> digest(const char* algo, ByteView data)
{
    std::array<std::uint8_t, N> out{};
    unsigned int out_len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &out_len, fetch_md(algo), nullptr) != 1
        || out_len != N)
        throw std::runtime_error("digest computation failed");
    return out;
}

} // namespace

Digest32 sha256(ByteView data)
{
    return digest<32>("SHA256", data);
}

Digest20 ripemd160(ByteView data)
{
    return digest<20>("RIPEMD160", data);
}

Digest20 hash160(ByteView data)
{
    Digest32 inner = sha256(data);
    return ripemd160(digest_view(inner));
}

Digest32 hmac_sha256(ByteView key, ByteView msg)
{
    Digest32 out{};
    unsigned int out_len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
              msg.data(), msg.size(), out.data(), &out_len)
        || out_len != out.size())
        throw std::runtime_error("hmac computation failed");
    return out;
}

} // namespace tnvote

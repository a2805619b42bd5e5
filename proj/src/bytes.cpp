#include "tnvote/bytes.hpp"

#include <stdexcept>

namespace tnvote {

Bytes to_bytes(std::string_view s)
{
    return Bytes(s.begin(), s.end());
}

std::string to_hex(ByteView data)
{
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

static int hex_nibble(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0)
        throw std::invalid_argument("hex string has odd length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("invalid hex digit");
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

void ByteWriter::u32(std::uint32_t v)
{
    buf_.push_back(static_cast<std::uint8_t>(v >> 24));
    buf_.push_back(static_cast<std::uint8_t>(v >> 16));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u64(std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8)
        buf_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::raw(ByteView data)
{
    buf_.insert(buf_.end(), data.begin(), data.end());
}

void ByteWriter::prefixed(ByteView data)
{
    u32(static_cast<std::uint32_t>(data.size()));
    raw(data);
}

std::uint8_t ByteReader::u8()
{
    if (remaining() < 1)
        throw std::invalid_argument("truncated input");
    return data_[pos_++];
}

std::uint32_t ByteReader::u32()
{
    if (remaining() < 4)
        throw std::invalid_argument("truncated input");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v = v << 8 | data_[pos_++];
    return v;
}

std::uint64_t ByteReader::u64()
{
    if (remaining() < 8)
        throw std::invalid_argument("truncated input");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v = v << 8 | data_[pos_++];
    return v;
}

Bytes ByteReader::raw(std::size_t n)
{
    if (remaining() < n)
        throw std::invalid_argument("truncated input");
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

Bytes ByteReader::prefixed(std::size_t max_len)
{
    std::uint32_t len = u32();
    if (len > max_len)
        throw std::invalid_argument("length prefix exceeds bound");
    return raw(len);
}

} // namespace tnvote

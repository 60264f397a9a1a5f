#include "esn/sha256.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace esn {

namespace {

// Round constants and initial state are defined by FIPS 180-4 as the leading
// 32 fractional bits of the cube/square roots of the first primes; computing
// them here avoids a hand-transcribed table (the standard test vectors in the
// test suite pin the result).
struct Tables {
    std::array<std::uint32_t, 64> k{};
    std::array<std::uint32_t, 8> h0{};

    Tables() {
        std::array<int, 64> primes{};
        int found = 0;
        for (int c = 2; found < 64; ++c) {
            bool prime = true;
            for (int d = 2; d * d <= c; ++d) {
                if (c % d == 0) {
                    prime = false;
                    break;
                }
            }
            if (prime) primes[found++] = c;
        }
        for (int i = 0; i < 64; ++i) {
            const long double r = std::cbrt(static_cast<long double>(primes[i]));
            k[i] = static_cast<std::uint32_t>(
                std::floor((r - std::floor(r)) * 4294967296.0L));
        }
        for (int i = 0; i < 8; ++i) {
            const long double r = std::sqrt(static_cast<long double>(primes[i]));
            h0[i] = static_cast<std::uint32_t>(
                std::floor((r - std::floor(r)) * 4294967296.0L));
        }
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

void compress(std::array<std::uint32_t, 8>& h, const unsigned char* block) {
    const auto& tab = tables();
    std::uint32_t w[64];
    for (int t = 0; t < 16; ++t) {
        w[t] = (std::uint32_t(block[4 * t]) << 24) | (std::uint32_t(block[4 * t + 1]) << 16) |
               (std::uint32_t(block[4 * t + 2]) << 8) | std::uint32_t(block[4 * t + 3]);
    }
    for (int t = 16; t < 64; ++t) {
        const std::uint32_t s0 =
            std::rotr(w[t - 15], 7) ^ std::rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
        const std::uint32_t s1 =
            std::rotr(w[t - 2], 17) ^ std::rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
        w[t] = w[t - 16] + s0 + w[t - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
    std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int t = 0; t < 64; ++t) {
        const std::uint32_t big_s1 = std::rotr(e, 6) ^ std::rotr(e, 11) ^ std::rotr(e, 25);
        const std::uint32_t ch = (e & f) ^ (~e & g);
        const std::uint32_t t1 = hh + big_s1 + ch + tab.k[t] + w[t];
        const std::uint32_t big_s0 = std::rotr(a, 2) ^ std::rotr(a, 13) ^ std::rotr(a, 22);
        const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
        const std::uint32_t t2 = big_s0 + maj;
        hh = g;
        g = f;
        f = e;
        e = d + t1;
        d = c;
        c = b;
        b = a;
        a = t1 + t2;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    h[5] += f;
    h[6] += g;
    h[7] += hh;
}

}  // namespace

std::string sha256_hex(std::span<const unsigned char> bytes) {
    std::array<std::uint32_t, 8> h = tables().h0;

    std::size_t full = bytes.size() / 64;
    for (std::size_t i = 0; i < full; ++i) compress(h, bytes.data() + 64 * i);

    // final padded block(s)
    unsigned char tail[128] = {0};
    const std::size_t rem = bytes.size() - 64 * full;
    if (rem > 0) std::memcpy(tail, bytes.data() + 64 * full, rem);
    tail[rem] = 0x80;
    const std::size_t tail_len = rem + 9 <= 64 ? 64 : 128;
    const std::uint64_t bit_len = static_cast<std::uint64_t>(bytes.size()) * 8;
    for (int i = 0; i < 8; ++i) {
        tail[tail_len - 1 - i] = static_cast<unsigned char>((bit_len >> (8 * i)) & 0xff);
    }
    compress(h, tail);
    if (tail_len == 128) compress(h, tail + 64);

    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (std::uint32_t word : h) {
        for (int shift = 28; shift >= 0; shift -= 4) {
            out.push_back(hex[(word >> shift) & 0xf]);
        }
    }
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    return sha256_hex(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()));
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return sha256_hex(std::span<const unsigned char>(bytes.data(), bytes.size()));
}

}  // namespace esn

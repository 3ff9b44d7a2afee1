#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace rnntc {

// FNV-1a, 64 bit. Content fingerprints only; not a cryptographic hash.
class Fingerprint {
public:
    void update(std::string_view bytes) {
        for (const char ch : bytes) {
            state_ ^= static_cast<unsigned char>(ch);
            state_ *= 0x100000001B3ULL;
        }
    }

    void update(std::uint64_t value) {
        for (int i = 0; i < 8; ++i) {
            state_ ^= (value >> (8 * i)) & 0xFFU;
            state_ *= 0x100000001B3ULL;
        }
    }

    std::uint64_t value() const { return state_; }

    std::string hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out(16, '0');
        for (int i = 0; i < 16; ++i) {
            out[15 - i] = digits[(state_ >> (4 * i)) & 0xFU];
        }
        return out;
    }

private:
    std::uint64_t state_ = 0xCBF29CE484222325ULL;
};

}  // namespace rnntc

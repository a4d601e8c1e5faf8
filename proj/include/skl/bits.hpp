#pragma once

#include <cstdint>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skl {

// Fixed-width bit string. Bit 0 is the leftmost character of the string
// form; within a 64-bit word, bit i lives at position 63 - (i % 64), so
// lexicographic order on the string form equals unsigned comparison of
// the word vector. Pad bits past size() are kept zero.
class Bits {
public:
    Bits() = default;
    explicit Bits(uint32_t nbits) : n_(nbits), w_(words_for(nbits), 0) {}

    static Bits zeros(uint32_t nbits) { return Bits(nbits); }
    static Bits from_string(std::string_view s);
    static Bits from_hex(std::string_view hex, uint32_t nbits);
    // value interpreted big-endian: from_u64(5, 4) == "0101"
    static Bits from_u64(uint64_t value, uint32_t nbits);

    uint32_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool get(uint32_t i) const;
    void set(uint32_t i, bool v);
    void flip(uint32_t i);

    Bits slice(uint32_t pos, uint32_t len) const;
    void splice(uint32_t pos, const Bits& sub);
    Bits concat(const Bits& other) const;
    // removes [pos, pos+len), shifting the tail left
    Bits erase(uint32_t pos, uint32_t len) const;

    Bits& operator^=(const Bits& o);
    friend Bits operator^(Bits a, const Bits& b) {
        a ^= b;
        return a;
    }

    // GF(2) inner product
    bool dot(const Bits& o) const;
    bool any() const;
    uint32_t popcount() const;
    int first_set() const;  // -1 if none

    bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }
    std::strong_ordering operator<=>(const Bits& o) const;

    std::string to_string() const;
    std::string to_hex() const;
    uint64_t to_u64() const;  // requires size() <= 64
    // big-endian byte packing (bit 0 = MSB of byte 0), for hashing
    std::vector<uint8_t> to_bytes() const;

    const std::vector<uint64_t>& words() const { return w_; }

private:
    static size_t words_for(uint32_t nbits) { return (size_t(nbits) + 63) / 64; }
    void mask_tail();

    uint32_t n_ = 0;
    std::vector<uint64_t> w_;
};

// Counter-based seeded RNG stream. Draw k from a stream derived by
// child() to get an independent stream; replaying a seed replays every
// draw exactly.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : RngStream(seed, 0x6b7950b79c1a96e5ULL) {}
    RngStream(uint64_t k0, uint64_t k1) : k0_(k0), k1_(k1) {}

    uint64_t next_u64();
    double next_double();  // [0, 1)
    bool next_bit() { return next_u64() >> 63; }
    uint64_t below(uint64_t bound);  // unbiased, bound >= 1
    Bits bits(uint32_t nbits);
    // nbits-wide string with exactly `weight` ones
    Bits fixed_weight(uint32_t nbits, uint32_t weight);

    RngStream child(uint64_t label) const;

private:
    uint64_t k0_ = 0, k1_ = 0;
    uint64_t ctr_ = 0;
};

// Reduced row-echelon GF(2) basis over width-w bit vectors. Supports
// membership coordinates and uniform sampling from the affine set
// { d : d . row_i == eps[i] for all i }.
class Gf2Basis {
public:
    explicit Gf2Basis(uint32_t width) : width_(width) {}

    // returns true if v was independent and inserted
    bool add(Bits v);
    uint32_t rank() const { return uint32_t(rows_.size()); }
    uint32_t width() const { return width_; }

    // coordinates of v in terms of rows(); nullopt if v is outside the span
    std::optional<Bits> coordinates(const Bits& v) const;
    Bits sample_solution(const Bits& eps, RngStream& rng) const;

    const std::vector<Bits>& rows() const { return rows_; }
    const std::vector<uint32_t>& pivots() const { return pivots_; }

private:
    uint32_t width_;
    std::vector<Bits> rows_;
    std::vector<uint32_t> pivots_;
};

}  // namespace skl

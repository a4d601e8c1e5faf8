#include "skl/bits.hpp"

#include <bit>
#include <stdexcept>

namespace skl {

namespace {

constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

inline uint64_t mix64(uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

}  // namespace

void Bits::mask_tail() {
    if (n_ % 64 != 0 && !w_.empty()) {
        w_.back() &= ~0ULL << (64 - n_ % 64);
    }
}

Bits Bits::from_string(std::string_view s) {
    Bits b(uint32_t(s.size()));
    for (uint32_t i = 0; i < s.size(); i++) {
        if (s[i] == '1') {
            b.set(i, true);
        } else if (s[i] != '0') {
            throw std::invalid_argument("Bits::from_string: not a 0/1 string");
        }
    }
    return b;
}

Bits Bits::from_u64(uint64_t value, uint32_t nbits) {
    if (nbits > 64) throw std::invalid_argument("Bits::from_u64: nbits > 64");
    Bits b(nbits);
    for (uint32_t i = 0; i < nbits; i++) {
        b.set(i, (value >> (nbits - 1 - i)) & 1);
    }
    return b;
}

Bits Bits::from_hex(std::string_view hex, uint32_t nbits) {
    Bits b(nbits);
    uint32_t i = 0;
    for (char c : hex) {
        uint32_t v;
        if (c >= '0' && c <= '9') {
            v = uint32_t(c - '0');
        } else if (c >= 'a' && c <= 'f') {
            v = uint32_t(c - 'a') + 10;
        } else if (c >= 'A' && c <= 'F') {
            v = uint32_t(c - 'A') + 10;
        } else {
            throw std::invalid_argument("Bits::from_hex: bad digit");
        }
        for (int k = 3; k >= 0 && i < nbits; k--, i++) {
            b.set(i, (v >> k) & 1);
        }
    }
    if (i < nbits) throw std::invalid_argument("Bits::from_hex: hex too short");
    return b;
}

bool Bits::get(uint32_t i) const {
    return (w_[i / 64] >> (63 - i % 64)) & 1;
}

void Bits::set(uint32_t i, bool v) {
    uint64_t m = 1ULL << (63 - i % 64);
    if (v) {
        w_[i / 64] |= m;
    } else {
        w_[i / 64] &= ~m;
    }
}

void Bits::flip(uint32_t i) {
    w_[i / 64] ^= 1ULL << (63 - i % 64);
}

Bits Bits::slice(uint32_t pos, uint32_t len) const {
    if (pos + len > n_) throw std::out_of_range("Bits::slice");
    Bits out(len);
    // word-aligned fast path with bit shifting
    uint32_t src_word = pos / 64, shift = pos % 64;
    for (uint32_t w = 0; w * 64 < len; w++) {
        uint64_t lo = w_[src_word + w] << shift;
        uint64_t hi = (shift && src_word + w + 1 < w_.size()) ? w_[src_word + w + 1] >> (64 - shift) : 0;
        out.w_[w] = lo | hi;
    }
    out.mask_tail();
    return out;
}

void Bits::splice(uint32_t pos, const Bits& sub) {
    if (pos + sub.n_ > n_) throw std::out_of_range("Bits::splice");
    for (uint32_t i = 0; i < sub.n_; i++) {
        set(pos + i, sub.get(i));
    }
}

Bits Bits::concat(const Bits& other) const {
    Bits out(n_ + other.n_);
    out.w_ = w_;
    out.w_.resize(words_for(out.n_), 0);
    out.n_ = n_ + other.n_;
    for (uint32_t i = 0; i < other.n_; i++) {
        out.set(n_ + i, other.get(i));
    }
    return out;
}

Bits Bits::erase(uint32_t pos, uint32_t len) const {
    if (pos + len > n_) throw std::out_of_range("Bits::erase");
    Bits out(n_ - len);
    for (uint32_t i = 0; i < pos; i++) out.set(i, get(i));
    for (uint32_t i = pos + len; i < n_; i++) out.set(i - len, get(i));
    return out;
}

Bits& Bits::operator^=(const Bits& o) {
    if (o.n_ != n_) throw std::invalid_argument("Bits::operator^=: width mismatch");
    for (size_t i = 0; i < w_.size(); i++) w_[i] ^= o.w_[i];
    return *this;
}

bool Bits::dot(const Bits& o) const {
    if (o.n_ != n_) throw std::invalid_argument("Bits::dot: width mismatch");
    uint64_t acc = 0;
    for (size_t i = 0; i < w_.size(); i++) acc ^= w_[i] & o.w_[i];
    return std::popcount(acc) & 1;
}

bool Bits::any() const {
    for (uint64_t w : w_)
        if (w) return true;
    return false;
}

uint32_t Bits::popcount() const {
    uint32_t c = 0;
    for (uint64_t w : w_) c += uint32_t(std::popcount(w));
    return c;
}

int Bits::first_set() const {
    for (size_t i = 0; i < w_.size(); i++) {
        if (w_[i]) return int(i * 64 + std::countl_zero(w_[i]));
    }
    return -1;
}

std::strong_ordering Bits::operator<=>(const Bits& o) const {
    size_t common = std::min(w_.size(), o.w_.size());
    for (size_t i = 0; i < common; i++) {
        if (w_[i] != o.w_[i]) return w_[i] < o.w_[i] ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    return n_ <=> o.n_;
}

std::string Bits::to_string() const {
    std::string s(n_, '0');
    for (uint32_t i = 0; i < n_; i++)
        if (get(i)) s[i] = '1';
    return s;
}

std::string Bits::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve((n_ + 3) / 4);
    for (uint32_t i = 0; i < n_; i += 4) {
        uint32_t v = 0;
        for (uint32_t k = 0; k < 4; k++) {
            v = (v << 1) | (i + k < n_ ? get(i + k) : 0);
        }
        s.push_back(digits[v]);
    }
    return s;
}

uint64_t Bits::to_u64() const {
    if (n_ > 64) throw std::invalid_argument("Bits::to_u64: too wide");
    if (n_ == 0) return 0;
    return n_ == 64 ? w_[0] : w_[0] >> (64 - n_);
}

std::vector<uint8_t> Bits::to_bytes() const {
    std::vector<uint8_t> out((n_ + 7) / 8, 0);
    for (uint32_t i = 0; i < n_; i++) {
        if (get(i)) out[i / 8] |= uint8_t(0x80u >> (i % 8));
    }
    return out;
}

uint64_t RngStream::next_u64() {
    ++ctr_;
    uint64_t z = k0_ + kGamma * ctr_;
    return mix64(z ^ mix64(k1_ + ctr_));
}

double RngStream::next_double() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

uint64_t RngStream::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("RngStream::below: bound 0");
    uint64_t limit = ~0ULL - ~0ULL % bound;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

Bits RngStream::bits(uint32_t nbits) {
    Bits b(nbits);
    for (uint32_t i = 0; i < nbits; i += 64) {
        uint32_t take = std::min(64u, nbits - i);
        uint64_t w = next_u64();
        for (uint32_t k = 0; k < take; k++) {
            b.set(i + k, (w >> (63 - k)) & 1);
        }
    }
    return b;
}

Bits RngStream::fixed_weight(uint32_t nbits, uint32_t weight) {
    if (weight > nbits) throw std::invalid_argument("RngStream::fixed_weight: weight > nbits");
    // Fisher-Yates prefix over positions
    std::vector<uint32_t> pos(nbits);
    for (uint32_t i = 0; i < nbits; i++) pos[i] = i;
    Bits b(nbits);
    for (uint32_t i = 0; i < weight; i++) {
        uint32_t j = i + uint32_t(below(nbits - i));
        std::swap(pos[i], pos[j]);
        b.set(pos[i], true);
    }
    return b;
}

RngStream RngStream::child(uint64_t label) const {
    return RngStream(mix64(k0_ ^ mix64(label + kGamma)), mix64(k1_ + mix64(label ^ 0xa5a5a5a5a5a5a5a5ULL)));
}

bool Gf2Basis::add(Bits v) {
    if (v.size() != width_) throw std::invalid_argument("Gf2Basis::add: width mismatch");
    for (size_t i = 0; i < rows_.size(); i++) {
        if (v.get(pivots_[i])) v ^= rows_[i];
    }
    int p = v.first_set();
    if (p < 0) return false;
    // back-reduce so the basis stays fully reduced
    for (size_t i = 0; i < rows_.size(); i++) {
        if (rows_[i].get(uint32_t(p))) rows_[i] ^= v;
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(uint32_t(p));
    return true;
}

std::optional<Bits> Gf2Basis::coordinates(const Bits& v) const {
    Bits c(rank());
    Bits recon(width_);
    for (uint32_t i = 0; i < rank(); i++) {
        if (v.get(pivots_[i])) {
            c.set(i, true);
            recon ^= rows_[i];
        }
    }
    if (recon != v) return std::nullopt;
    return c;
}

Bits Gf2Basis::sample_solution(const Bits& eps, RngStream& rng) const {
    if (eps.size() != rank()) throw std::invalid_argument("Gf2Basis::sample_solution: eps width");
    Bits d = rng.bits(width_);
    for (uint32_t p : pivots_) d.set(p, false);
    // pivot bits are forced: row_i has a 1 only at its own pivot among pivots
    for (uint32_t i = 0; i < rank(); i++) {
        d.set(pivots_[i], eps.get(i) ^ d.dot(rows_[i]));
    }
    return d;
}

}  // namespace skl

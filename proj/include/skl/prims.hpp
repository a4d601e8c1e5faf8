#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string_view>
#include <vector>

#include "skl/bits.hpp"

namespace skl::prims {

// SHA-256 via OpenSSL; the basis for the OWF, MAC and key streams below.
std::array<uint8_t, 32> sha256(const uint8_t* data, size_t len);

// Domain-separated hash of bit strings, expanded in counter mode to any
// output width.
Bits hash_bits(std::string_view domain, const std::vector<Bits>& inputs, uint32_t out_bits);

struct Owf {
    uint32_t in_bits;
    uint32_t out_bits;
    Bits eval(const Bits& s) const;
};

Bits mac(const Bits& key, std::string_view domain, const std::vector<Bits>& inputs, uint32_t out_bits);

// Authenticated symmetric encryption: nonce || (m ^ pad) || tag.
struct SkeKey {
    Bits key;  // lambda bits
};

SkeKey ske_keygen(uint32_t lambda, RngStream& rng);
uint32_t ske_ct_bits(uint32_t lambda, uint32_t msg_bits);
Bits ske_encrypt(const SkeKey& k, const Bits& m, RngStream& rng);
std::optional<Bits> ske_decrypt(const SkeKey& k, const Bits& ct, uint32_t msg_bits);

// Fixed-width encoding of an optional payload: success flag bit || payload.
// The encoding of nullopt is all-zero, so XOR-oracles can write it into
// zero-initialized registers as a no-op.
Bits encode_opt(const std::optional<Bits>& v, uint32_t payload_bits);
std::optional<Bits> decode_opt(const Bits& enc);
inline uint32_t opt_bits(uint32_t payload_bits) { return payload_bits + 1; }

// ---- ideal-functionality registry ----------------------------------------

struct CcParams {
    uint32_t input_bits = 0;
    uint32_t output_bits = 0;
    uint64_t size_bound = 0;
};

using CircuitFn = std::function<Bits(const Bits&)>;
// returns 0 when decryptable
using RelationFn = std::function<int(const Bits& x, const Bits& y)>;
using MultiRelationFn = std::function<int(const Bits& x, const std::vector<Bits>& ys)>;
using FunctionalityFn = std::function<std::optional<Bits>(const Bits& x, const Bits& y)>;

struct CcHandle {
    uint64_t id = 0;
};

struct AbeConfig {
    uint32_t lambda = 32;
    uint32_t x_bits = 0;
    uint32_t y_bits = 0;
    uint32_t r_bits = 0;
    uint32_t msg_bits = 0;
    RelationFn relation;
};

struct AbePk {
    uint64_t id = 0;
};
struct AbeMsk {
    uint64_t id = 0;
};

struct MiAbeConfig {
    uint32_t lambda = 32;
    uint32_t x_bits = 0;
    std::vector<uint32_t> slot_bits;  // per-slot key-attribute widths
    uint32_t msg_bits = 0;
    MultiRelationFn relation;
};

struct MiAbePk {
    uint64_t id = 0;
};
struct MiAbeMsk {
    uint64_t id = 0;
};

struct SkfeConfig {
    uint32_t lambda = 32;
    uint32_t x_bits = 0;
    uint32_t y_bits = 0;
    uint32_t z_bits = 0;
    FunctionalityFn functionality;
};

struct SkfeMsk {
    uint64_t id = 0;
};

// Sealed in-memory state backing the ideal ABE / MI-ABE / SKFE /
// compute-and-compare functionalities. Key-generation outputs are
// deterministic fixed-width tokens (MAC || attribute || randomness) so they
// can be XOR-ed into quantum registers; ciphertexts are fixed-width handles
// into the registry. Append-only; evaluation is read-only.
class Registry {
public:
    Registry() = default;
    Registry(const Registry&) = delete;
    Registry& operator=(const Registry&) = delete;

    // compute-and-compare obfuscation (ideal)
    CcHandle cc_obfuscate(const CcParams& pp, CircuitFn P, Bits lock, Bits msg);
    CcHandle cc_sim(const CcParams& pp, uint32_t msg_bits);
    std::optional<Bits> cc_eval(const CcHandle& h, const Bits& x) const;
    Bits cc_encode(const CcHandle& h) const;  // fixed-width attribute encoding
    std::optional<CcHandle> cc_decode(const Bits& enc) const;
    static uint32_t cc_encoding_bits() { return 64; }

    // attribute-based encryption (ideal)
    std::pair<AbePk, AbeMsk> abe_setup(AbeConfig cfg, RngStream& rng);
    Bits abe_kg(const AbeMsk& msk, const Bits& y, const Bits& r) const;
    uint32_t abe_token_bits(const AbeMsk& msk) const;
    Bits abe_enc(const AbePk& pk, const Bits& x, const Bits& m, RngStream& rng);
    std::optional<Bits> abe_dec(const Bits& token, const Bits& ct) const;
    static uint32_t abe_ct_bits() { return 64; }

    // multi-input ABE (ideal)
    std::pair<MiAbePk, MiAbeMsk> miabe_setup(MiAbeConfig cfg, RngStream& rng);
    Bits miabe_kg(const MiAbeMsk& msk, uint32_t slot, const Bits& y) const;
    uint32_t miabe_token_bits(const MiAbeMsk& msk, uint32_t slot) const;
    uint32_t miabe_slots(const MiAbeMsk& msk) const;
    Bits miabe_enc(const MiAbePk& pk, const Bits& x, const Bits& m, RngStream& rng);
    std::optional<Bits> miabe_dec(const Bits& ct, const std::vector<Bits>& tokens) const;

    // secret-key functional encryption (ideal)
    SkfeMsk skfe_setup(SkfeConfig cfg, RngStream& rng);
    Bits skfe_kg(const SkfeMsk& msk, const Bits& y) const;
    uint32_t skfe_token_bits(const SkfeMsk& msk) const;
    Bits skfe_enc(const SkfeMsk& msk, const Bits& x, RngStream& rng);
    std::optional<Bits> skfe_dec(const Bits& token, const Bits& ct) const;

private:
    struct CcEntry {
        CcParams pp;
        bool simulated = false;
        CircuitFn program;
        Bits lock, msg;
    };
    struct AbeEntry {
        AbeConfig cfg;
        Bits mac_key;
        std::vector<std::pair<Bits, Bits>> cts;  // (x, m) per ciphertext id
    };
    struct MiAbeEntry {
        MiAbeConfig cfg;
        Bits mac_key;
        std::vector<std::pair<Bits, Bits>> cts;
    };
    struct SkfeEntry {
        SkfeConfig cfg;
        Bits mac_key;
        std::vector<Bits> cts;  // sealed plaintexts
    };

    // deques keep entries at stable addresses, so relation and program
    // closures can run outside the lock (they may re-enter the registry)
    mutable std::mutex mu_;
    std::deque<CcEntry> cc_;
    std::deque<AbeEntry> abe_;
    std::deque<MiAbeEntry> miabe_;
    std::deque<SkfeEntry> skfe_;
};

}  // namespace skl::prims

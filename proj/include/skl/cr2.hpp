#pragma once

#include <nlohmann/json_fwd.hpp>

#include "skl/skecd.hpp"

namespace skl::cr2 {

// ABE with collusion-resistant secure key leasing and classical deletion
// certificates. Each leased key carries per-slot MI-ABE secret keys signed
// into the BB84 positions of an SKE-CD encryption of zeros; deletion is a
// Hadamard measurement of every slot and verification is a classical parity
// check, so certificates are plain bit strings.
struct Params {
    uint32_t lambda = 32;    // tag / token MAC width
    uint32_t y_bits = 8;     // ABE key-attribute width (truth-table policies)
    uint32_t msg_bits = 32;  // plaintext width
    skecd::Params inner{4, 8, 8, 4};  // small SKE-CD instance; slots = its ell_ct

    uint32_t slots() const { return inner.ell_ct(); }
    uint32_t policy_bits() const { return 1u << y_bits; }  // truth table over y
    void validate() const;
};

struct Ek {
    prims::MiAbePk pk;
    Params params;
};

struct Msk {
    Params params;
    prims::MiAbeMsk miabe_msk;
    skecd::SecretKey skecd_sk;
};

struct Key {
    qreg::SparseState state;  // SKECD.CT_i (1 bit) + ABE.SK_i per slot
    Bits tag;                 // the random value t shared by all slots
};

struct Vk {
    Bits x;
    Bits theta;
    std::map<uint32_t, Bits> sk_xor;  // slot -> abe.sk_{i,0} ^ abe.sk_{i,1}, theta=1 only
};

struct Cert {
    struct Slot {
        bool c = false;
        Bits d;
    };
    std::vector<Slot> slots;
};

struct Ct {
    Bits miabe_ct;
};

std::pair<Ek, Msk> setup(prims::Registry& reg, const Params& params, RngStream& rng);
std::pair<Key, Vk> kg(prims::Registry& reg, const Msk& msk, const Bits& y, RngStream& rng);

// policy_tt is the truth table of the ciphertext policy: bit at index y is 0
// when y may decrypt
Ct enc(prims::Registry& reg, const Ek& ek, const Bits& policy_tt, const Bits& m, RngStream& rng);

std::pair<std::optional<Bits>, Key> dec(prims::Registry& reg, const Params& params, Key key, const Ct& ct);
Cert del(Key key, RngStream& rng);
bool vrfy(const Vk& vk, const Cert& cert);

nlohmann::json cert_to_json(const Cert& cert);
Cert cert_from_json(const nlohmann::json& j, const Params& params);

}  // namespace skl::cr2

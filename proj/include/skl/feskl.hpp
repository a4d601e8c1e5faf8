#pragma once

#include "skl/bb84sig.hpp"

namespace skl::feskl {

// SKFE with collusion-resistant secure key leasing: the leased key is a
// signed BB84 encryption of the classical SKFE functional key, so the same
// block mechanics as the secret-key scheme carry over with r replaced by the
// key token.
struct SkfeSklParams {
    uint32_t lambda = 32;
    uint32_t n = 16;
    uint32_t h = 8;
    uint32_t x_bits = 8;
    uint32_t y_bits = 8;
    uint32_t z_bits = 0;    // 0 -> lambda
    uint32_t owf_bits = 0;  // 0 -> lambda

    uint32_t effective_z_bits() const { return z_bits ? z_bits : lambda; }
    uint32_t effective_owf_bits() const { return owf_bits ? owf_bits : lambda; }
    uint32_t token_bits() const { return lambda + y_bits; }
    skecd::Params skecd_params() const { return skecd::Params{lambda, n, h, token_bits()}; }
};

struct SkfeSklMsk {
    SkfeSklParams params;
    skecd::SecretKey skecd_sk;
    prims::SkfeMsk skfe_msk;
};

struct SkfeSklKey {
    qreg::SparseState state;
};

using Vk = bb84sig::Vk;
using Tk = bb84sig::Tk;

struct SkfeSklKeyTriple {
    SkfeSklKey key;
    Vk vk;
    Tk tk;
};

struct SkfeSklCt {
    skecd::SecretKey skecd_sk;
    Bits skfe_ct;
};

SkfeSklMsk skfe_skl_setup(prims::Registry& reg, const SkfeSklParams& params,
                          prims::FunctionalityFn F, RngStream& rng);
SkfeSklKeyTriple skfe_skl_kg(prims::Registry& reg, const SkfeSklMsk& msk, const Bits& y, RngStream& rng);
SkfeSklCt skfe_skl_enc(prims::Registry& reg, const SkfeSklMsk& msk, const Bits& x, RngStream& rng);
std::optional<Bits> skfe_skl_cdec(prims::Registry& reg, const SkfeSklParams& params, const Bits& key_bits,
                                  const SkfeSklCt& ct);
std::pair<std::optional<Bits>, SkfeSklKey> skfe_skl_dec(prims::Registry& reg, const SkfeSklParams& params,
                                                        SkfeSklKey key, const SkfeSklCt& ct);
bool skfe_skl_vrfy(const SkfeSklParams& params, const Vk& vk, SkfeSklKey key, RngStream& rng);
bool skfe_skl_keytest(const SkfeSklParams& params, const Tk& tk, const Bits& key_bits);
std::pair<bool, SkfeSklKey> skfe_skl_keytest_coherent(const SkfeSklParams& params, const Tk& tk,
                                                      SkfeSklKey key, RngStream& rng);

// ABE with collusion-resistant secure key leasing, built by layering ABE
// secret keys for attribute y||u over the leased SKFE key register.
struct AbeSklParams {
    SkfeSklParams skfe;
    uint32_t msg_bits = 32;
    prims::RelationFn relation;  // R(x, y), 0 = decryptable

    uint32_t x_bits() const { return skfe.x_bits - skfe.effective_z_bits(); }
    uint32_t y_bits() const { return skfe.y_bits; }
};

// fills in the SKFE functionality F((x,z), y) = z if R(x,y)=0 else bottom
AbeSklParams make_abe_skl_params(uint32_t lambda, uint32_t n, uint32_t h, uint32_t x_bits, uint32_t y_bits,
                                 uint32_t msg_bits, prims::RelationFn relation);

struct AbeSklMsk {
    AbeSklParams params;
    prims::AbeMsk abe_msk;
    SkfeSklMsk skfe_msk;
};

struct AbeSklPk {
    prims::AbePk abe_pk;
    AbeSklParams params;
};

struct AbeSklKey {
    qreg::SparseState state;  // SKFE.SK blocks + ABE.SK
};

struct AbeSklVk {
    Bits y;
    prims::AbeMsk abe_msk;
    Vk skfe_vk;
    Tk skfe_tk;
    Bits k;
};

struct AbeSklCt {
    Bits abe_ct;
};

std::pair<AbeSklPk, AbeSklMsk> abe_skl_setup(prims::Registry& reg, AbeSklParams params, RngStream& rng);
std::pair<AbeSklKey, AbeSklVk> abe_skl_kg(prims::Registry& reg, const AbeSklMsk& msk, const Bits& y,
                                          RngStream& rng);
AbeSklCt abe_skl_enc(prims::Registry& reg, const AbeSklPk& pk, const Bits& x, const Bits& m, RngStream& rng);
std::pair<std::optional<Bits>, AbeSklKey> abe_skl_dec(prims::Registry& reg, const AbeSklParams& params,
                                                      AbeSklKey key, const AbeSklCt& ct);
bool abe_skl_vrfy(prims::Registry& reg, const AbeSklParams& params, const AbeSklVk& vk, AbeSklKey key,
                  RngStream& rng);

}  // namespace skl::feskl

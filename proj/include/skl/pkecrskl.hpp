#pragma once

#include "skl/skecrskl.hpp"

namespace skl::pkecrskl {

// Public-key encryption with collusion-resistant secure key leasing: ABE
// secret keys laid over the SKE-CR-SKL key register in superposition, with
// ciphertexts encrypted under an always-rejecting simulated compute-and-
// compare policy, so every honest key branch decrypts.
struct Params {
    skecrskl::Params ske;

    uint32_t msg_bits() const { return ske.effective_msg_bits(); }
};

struct Ek {
    prims::AbePk abe_pk;
    Params params;
};

struct Msk {
    prims::AbeMsk abe_msk;
    skecrskl::Msk ske_msk;
};

struct Dk {
    qreg::SparseState state;  // SKE.DK segments + ABE.SK
};

struct Vk {
    prims::AbeMsk abe_msk;
    skecrskl::Vk ske_vk;
    skecrskl::Tk ske_tk;
    Bits k;  // explicit KG randomness
};

struct Ct {
    Bits abe_ct;
};

std::pair<Ek, Msk> setup(prims::Registry& reg, const Params& params, RngStream& rng);
std::pair<Dk, Vk> kg(prims::Registry& reg, const Msk& msk, RngStream& rng);
Ct enc(prims::Registry& reg, const Ek& ek, const Bits& m, RngStream& rng);

// nullopt when no branch of the key decrypts (e.g. key from another setup)
std::pair<std::optional<Bits>, Dk> dec(prims::Registry& reg, const Params& params, Dk dk, const Ct& ct);

bool vrfy(prims::Registry& reg, const Params& params, const Vk& vk, Dk dk, RngStream& rng);

// circuit parameters the encryptor hands to the CC simulator
prims::CcParams pp_d(const Params& params);

}  // namespace skl::pkecrskl

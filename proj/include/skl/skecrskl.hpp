#pragma once

#include "skl/bb84sig.hpp"

namespace skl::skecrskl {

// Secret-key encryption with collusion-resistant secure key leasing. Every
// leased key is a freshly signed BB84 encryption of the same one-time pad r;
// ciphertexts are (skecd secret key, r ^ m), so any computational-basis
// string of any honest key decrypts classically.
struct Params {
    uint32_t lambda = 32;
    uint32_t n = 16;
    uint32_t h = 8;
    uint32_t msg_bits = 0;  // 0 -> lambda
    uint32_t owf_bits = 0;  // p(lambda); 0 -> lambda

    uint32_t effective_msg_bits() const { return msg_bits ? msg_bits : lambda; }
    uint32_t effective_owf_bits() const { return owf_bits ? owf_bits : lambda; }
    skecd::Params skecd_params() const {
        return skecd::Params{lambda, n, h, effective_msg_bits()};
    }
};

struct Msk {
    Params params;
    skecd::SecretKey skecd_sk;
    Bits r;
};

struct Dk {
    qreg::SparseState state;
};

using Vk = bb84sig::Vk;
using Tk = bb84sig::Tk;

struct Ct {
    skecd::SecretKey skecd_sk;
    Bits z;  // r ^ m
};

struct KeyTriple {
    Dk dk;
    Vk vk;
    Tk tk;
};

Msk setup(const Params& params, RngStream& rng);
KeyTriple kg(const Msk& msk, RngStream& rng);
Ct enc(const Msk& msk, const Bits& m);

// classical decryption of any key string; nullopt on a corrupted classical part
std::optional<Bits> cdec(const Bits& dk_bits, const Ct& ct);

// coherent decryption; the returned post-state equals the input key
std::pair<Bits, Dk> dec(Dk dk, const Ct& ct);

bool vrfy(const Vk& vk, Dk dk, uint32_t lambda, RngStream& rng);
bool keytest(const Tk& tk, const Bits& dk_bits, const Params& params);
std::pair<bool, Dk> keytest_coherent(const Tk& tk, Dk dk, const Params& params, RngStream& rng);

}  // namespace skl::skecrskl

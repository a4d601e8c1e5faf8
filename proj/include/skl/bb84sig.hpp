#pragma once

#include <map>
#include <utility>
#include <vector>

#include "skl/skecd.hpp"

namespace skl::bb84sig {

// Shared mechanics for leased keys built from a BB84 SKE-CD ciphertext with
// OWF-signed preimages: per position i the key holds one qubit SKECD.CT_i
// entangled with a preimage register S_i, so that Hadamard measurement
// satisfies x[i] = c_i ^ d_i.(s_{i,0} ^ s_{i,1}) at theta=1 positions, and
// any computational-basis string both passes the OWF key test and decrypts
// classically.

struct Vk {
    Bits x;
    Bits theta;
    std::map<uint32_t, Bits> s_xor;  // position -> s_{i,0} ^ s_{i,1}, theta=1 only
};

struct Tk {
    std::vector<std::array<Bits, 2>> t;  // t_{i,0}, t_{i,1}
};

struct KeyMaterial {
    qreg::SparseState state;  // SKECD.CT_1, S_1, ..., SKECD.CT_L, S_L
    Vk vk;
    Tk tk;
};

qreg::RegisterLayout key_layout(uint32_t ell_ct, uint32_t sig_bits);

KeyMaterial kg(const skecd::SecretKey& sk, const Bits& payload, uint32_t sig_bits, uint32_t owf_bits,
               RngStream& rng);

// the SKECD.CT sub-string of a classical key string
Bits ct_substring(const Bits& dk_bits, uint32_t ell_ct);

// Hadamard-measures every block and checks the parity identity at theta=1
// positions. Destructive.
bool vrfy(const Vk& vk, qreg::SparseState dk, uint32_t sig_bits, RngStream& rng);

bool keytest(const Tk& tk, const Bits& dk_bits, uint32_t sig_bits, uint32_t owf_bits);

// XORs the key-test predicate into a KT ancilla, measures it, and returns
// (result, post-selected state without the ancilla).
std::pair<bool, qreg::SparseState> keytest_coherent(const Tk& tk, qreg::SparseState dk, uint32_t sig_bits,
                                                    uint32_t owf_bits, RngStream& rng);

}  // namespace skl::bb84sig

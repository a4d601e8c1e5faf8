#pragma once

#include <optional>
#include <utility>

#include "skl/prims.hpp"
#include "skl/qreg.hpp"

namespace skl::skecd {

// BB84-based secret-key encryption with certified deletion. Ciphertexts have
// n BB84 qubits (h of them in the Hadamard basis) followed by a classical
// part: an authenticated encryption of theta[1..n] and the masked message.
struct Params {
    uint32_t lambda = 32;    // SKE key / nonce / tag width
    uint32_t n = 16;         // quantum positions
    uint32_t h = 8;          // Hadamard weight of theta[1..n]
    uint32_t msg_bits = 32;  // plaintext width

    uint32_t classical_bits() const { return prims::ske_ct_bits(lambda, n + msg_bits); }
    uint32_t ell_ct() const { return n + classical_bits(); }
    void validate() const;
};

struct SecretKey {
    Params params;
    prims::SkeKey ske;
};

struct VerificationKey {
    Bits x;      // ell_ct bits
    Bits theta;  // ell_ct bits, zero on classical positions
};

struct Ciphertext {
    qreg::SparseState quantum;  // segments Q1..Qn, one qubit each
    Bits classical;             // classical_bits() wide
};

using DeletionCertificate = Bits;  // ell_ct bits

SecretKey kg(const Params& params, RngStream& rng);
std::pair<Ciphertext, VerificationKey> enc(const SecretKey& sk, const Bits& m, RngStream& rng);

// Deterministic classical decryption: works on any u agreeing with x on all
// theta=0 positions. Auth failure of the classical part yields nullopt.
std::optional<Bits> cdec(const SecretKey& sk, const Bits& u);

// Coherent decryption: CDec XOR-ed into MSG, then MSG measured. Honest
// ciphertexts are returned unchanged (the outcome is deterministic).
Bits dec(const SecretKey& sk, Ciphertext& ct);

// Hadamard-measures every qubit; classical positions are appended as uniform
// bits (Hadamard outcomes of basis states). Consumes the ciphertext.
DeletionCertificate del(Ciphertext ct, RngStream& rng);

bool vrfy(const VerificationKey& vk, const DeletionCertificate& cert);

// Alternative verification key (theta, cert): functionally equivalent to the
// original whenever cert itself verifies.
VerificationKey alt_vk(const Bits& theta, const DeletionCertificate& cert);

// Debug serialization. The quantum part is a simulation artifact: the dump
// describes the state exactly and is marked non-transmittable.
nlohmann::json ct_to_json(const Ciphertext& ct);
Ciphertext ct_from_json(const nlohmann::json& j);

}  // namespace skl::skecd

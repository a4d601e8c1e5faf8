#include "skl/skecd.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace skl::skecd {

namespace {

// mask over the theta=0 quantum positions, keyed so only the secret-key
// holder can recompute it
Bits mask_for(const prims::SkeKey& key, const Bits& theta_n, const Bits& u_quantum, uint32_t msg_bits) {
    Bits kept(theta_n.size());
    for (uint32_t i = 0; i < theta_n.size(); i++) {
        if (!theta_n.get(i)) kept.set(i, u_quantum.get(i));
    }
    return prims::hash_bits("skl.skecd.mask", {key.key, theta_n, kept}, msg_bits);
}

}  // namespace

void Params::validate() const {
    if (h > n) throw std::invalid_argument("skecd: h > n");
    if (lambda == 0 || msg_bits == 0 || n == 0) throw std::invalid_argument("skecd: zero parameter");
}

SecretKey kg(const Params& params, RngStream& rng) {
    params.validate();
    return SecretKey{params, prims::ske_keygen(params.lambda, rng)};
}

std::pair<Ciphertext, VerificationKey> enc(const SecretKey& sk, const Bits& m, RngStream& rng) {
    const Params& p = sk.params;
    if (m.size() != p.msg_bits) throw std::invalid_argument("skecd::enc: message width mismatch");

    Bits theta_n = rng.fixed_weight(p.n, p.h);
    Bits x_n = rng.bits(p.n);
    qreg::SparseState quantum = qreg::prepare_bb84(x_n, theta_n);

    Bits mask = mask_for(sk.ske, theta_n, x_n, p.msg_bits);
    Bits classical = prims::ske_encrypt(sk.ske, theta_n.concat(m ^ mask), rng);

    VerificationKey vk{x_n.concat(classical), theta_n.concat(Bits(p.classical_bits()))};
    return {Ciphertext{std::move(quantum), std::move(classical)}, std::move(vk)};
}

std::optional<Bits> cdec(const SecretKey& sk, const Bits& u) {
    const Params& p = sk.params;
    if (u.size() != p.ell_ct()) throw std::invalid_argument("skecd::cdec: input width mismatch");
    auto payload = prims::ske_decrypt(sk.ske, u.slice(p.n, p.classical_bits()), p.n + p.msg_bits);
    if (!payload) return std::nullopt;
    Bits theta_n = payload->slice(0, p.n);
    Bits masked = payload->slice(p.n, p.msg_bits);
    return masked ^ mask_for(sk.ske, theta_n, u.slice(0, p.n), p.msg_bits);
}

Bits dec(const SecretKey& sk, Ciphertext& ct) {
    const Params& p = sk.params;
    qreg::SparseState st = ct.quantum;
    qreg::append_segment(st, "MSG", p.msg_bits);
    std::vector<std::string> src;
    for (uint32_t i = 0; i < p.n; i++) src.push_back("Q" + std::to_string(i + 1));
    qreg::apply_xor_oracle(st, src, "MSG", [&](const Bits& uq) {
        auto m = cdec(sk, uq.concat(ct.classical));
        return m ? *m : Bits(p.msg_bits);
    });
    RngStream unused(0);  // outcome is deterministic on honest support
    Bits m = qreg::measure_computational(st, "MSG", unused).bits;
    qreg::trace_out(st, "MSG", unused);
    ct.quantum = std::move(st);
    return m;
}

DeletionCertificate del(Ciphertext ct, RngStream& rng) {
    Bits cert_q = qreg::measure_hadamard_all(std::move(ct.quantum), rng);
    return cert_q.concat(rng.bits(ct.classical.size()));
}

bool vrfy(const VerificationKey& vk, const DeletionCertificate& cert) {
    if (cert.size() != vk.x.size()) return false;
    for (uint32_t i = 0; i < vk.x.size(); i++) {
        if (vk.theta.get(i) && cert.get(i) != vk.x.get(i)) return false;
    }
    return true;
}

VerificationKey alt_vk(const Bits& theta, const DeletionCertificate& cert) {
    if (theta.size() != cert.size()) throw std::invalid_argument("skecd::alt_vk: width mismatch");
    return VerificationKey{cert, theta};
}

nlohmann::json ct_to_json(const Ciphertext& ct) {
    return {{"classical", ct.classical.to_hex()},
            {"classical_bits", ct.classical.size()},
            {"quantum", qreg::dump_state(ct.quantum)},
            {"quantum_encoding", "simulation-only, non-transmittable"}};
}

Ciphertext ct_from_json(const nlohmann::json& j) {
    return Ciphertext{
        qreg::load_state(j.at("quantum")),
        Bits::from_hex(j.at("classical").get<std::string>(), j.at("classical_bits").get<uint32_t>())};
}

}  // namespace skl::skecd

#include "skl/prims.hpp"

#include <cstring>
#include <stdexcept>

#include <openssl/evp.h>

namespace skl::prims {

std::array<uint8_t, 32> sha256(const uint8_t* data, size_t len) {
    std::array<uint8_t, 32> out{};
    unsigned int n = 0;
    if (EVP_Digest(data, len, out.data(), &n, EVP_sha256(), nullptr) != 1 || n != 32) {
        throw std::runtime_error("sha256: EVP_Digest failed");
    }
    return out;
}

namespace {

// domain || u32(count) || [u32(width) || bytes]* || u32(counter)
Bits expand(std::string_view domain, const std::vector<Bits>& inputs, uint32_t out_bits) {
    std::vector<uint8_t> buf(domain.begin(), domain.end());
    auto put_u32 = [&buf](uint32_t v) {
        for (int k = 3; k >= 0; k--) buf.push_back(uint8_t(v >> (8 * k)));
    };
    put_u32(uint32_t(inputs.size()));
    for (const Bits& b : inputs) {
        put_u32(b.size());
        auto bytes = b.to_bytes();
        buf.insert(buf.end(), bytes.begin(), bytes.end());
    }
    size_t ctr_pos = buf.size();
    put_u32(0);

    Bits out(out_bits);
    uint32_t filled = 0, ctr = 0;
    while (filled < out_bits) {
        for (int k = 3; k >= 0; k--) buf[ctr_pos + size_t(3 - k)] = uint8_t(ctr >> (8 * k));
        auto digest = sha256(buf.data(), buf.size());
        for (uint8_t byte : digest) {
            for (int k = 7; k >= 0 && filled < out_bits; k--, filled++) {
                out.set(filled, (byte >> k) & 1);
            }
            if (filled >= out_bits) break;
        }
        ctr++;
    }
    return out;
}

}  // namespace

Bits hash_bits(std::string_view domain, const std::vector<Bits>& inputs, uint32_t out_bits) {
    return expand(domain, inputs, out_bits);
}

Bits Owf::eval(const Bits& s) const {
    if (s.size() != in_bits) throw std::invalid_argument("Owf::eval: input width mismatch");
    return hash_bits("skl.owf", {s}, out_bits);
}

Bits mac(const Bits& key, std::string_view domain, const std::vector<Bits>& inputs, uint32_t out_bits) {
    std::vector<Bits> all;
    all.reserve(inputs.size() + 1);
    all.push_back(key);
    for (const Bits& b : inputs) all.push_back(b);
    return expand(std::string("skl.mac.") + std::string(domain), all, out_bits);
}

SkeKey ske_keygen(uint32_t lambda, RngStream& rng) {
    return SkeKey{rng.bits(lambda)};
}

uint32_t ske_ct_bits(uint32_t lambda, uint32_t msg_bits) {
    return lambda + msg_bits + lambda;
}

Bits ske_encrypt(const SkeKey& k, const Bits& m, RngStream& rng) {
    uint32_t lambda = k.key.size();
    Bits nonce = rng.bits(lambda);
    Bits masked = m ^ hash_bits("skl.ske.pad", {k.key, nonce}, m.size());
    Bits tag = mac(k.key, "ske", {nonce, masked}, lambda);
    return nonce.concat(masked).concat(tag);
}

std::optional<Bits> ske_decrypt(const SkeKey& k, const Bits& ct, uint32_t msg_bits) {
    uint32_t lambda = k.key.size();
    if (ct.size() != ske_ct_bits(lambda, msg_bits)) return std::nullopt;
    Bits nonce = ct.slice(0, lambda);
    Bits masked = ct.slice(lambda, msg_bits);
    Bits tag = ct.slice(lambda + msg_bits, lambda);
    if (mac(k.key, "ske", {nonce, masked}, lambda) != tag) return std::nullopt;
    return masked ^ hash_bits("skl.ske.pad", {k.key, nonce}, msg_bits);
}

Bits encode_opt(const std::optional<Bits>& v, uint32_t payload_bits) {
    Bits out(payload_bits + 1);
    if (v) {
        if (v->size() != payload_bits) throw std::invalid_argument("encode_opt: payload width mismatch");
        out.set(0, true);
        out.splice(1, *v);
    }
    return out;
}

std::optional<Bits> decode_opt(const Bits& enc) {
    if (enc.size() == 0) throw std::invalid_argument("decode_opt: empty");
    if (!enc.get(0)) return std::nullopt;
    return enc.slice(1, enc.size() - 1);
}

// ---- registry -------------------------------------------------------------

CcHandle Registry::cc_obfuscate(const CcParams& pp, CircuitFn P, Bits lock, Bits msg) {
    if (lock.size() != pp.output_bits) throw std::invalid_argument("cc_obfuscate: lock width mismatch");
    std::lock_guard lk(mu_);
    cc_.push_back(CcEntry{pp, false, std::move(P), std::move(lock), std::move(msg)});
    return CcHandle{cc_.size() - 1};
}

CcHandle Registry::cc_sim(const CcParams& pp, uint32_t msg_bits) {
    std::lock_guard lk(mu_);
    cc_.push_back(CcEntry{pp, true, nullptr, Bits(), Bits(msg_bits)});
    return CcHandle{cc_.size() - 1};
}

std::optional<Bits> Registry::cc_eval(const CcHandle& h, const Bits& x) const {
    const CcEntry* e;
    {
        std::lock_guard lk(mu_);
        if (h.id >= cc_.size()) throw std::invalid_argument("cc_eval: unknown handle");
        e = &cc_[h.id];
    }
    if (e->simulated) return std::nullopt;
    if (x.size() != e->pp.input_bits) throw std::invalid_argument("cc_eval: input width mismatch");
    if (e->program(x) == e->lock) return e->msg;
    return std::nullopt;
}

Bits Registry::cc_encode(const CcHandle& h) const {
    {
        std::lock_guard lk(mu_);
        if (h.id >= cc_.size()) throw std::invalid_argument("cc_encode: unknown handle");
    }
    return Bits::from_u64(h.id, cc_encoding_bits());
}

std::optional<CcHandle> Registry::cc_decode(const Bits& enc) const {
    if (enc.size() != cc_encoding_bits()) return std::nullopt;
    uint64_t id = enc.to_u64();
    std::lock_guard lk(mu_);
    if (id >= cc_.size()) return std::nullopt;
    return CcHandle{id};
}

std::pair<AbePk, AbeMsk> Registry::abe_setup(AbeConfig cfg, RngStream& rng) {
    if (!cfg.relation) throw std::invalid_argument("abe_setup: missing relation");
    std::lock_guard lk(mu_);
    AbeEntry e;
    e.cfg = std::move(cfg);
    e.mac_key = rng.bits(e.cfg.lambda);
    abe_.push_back(std::move(e));
    uint64_t id = abe_.size() - 1;
    return {AbePk{id}, AbeMsk{id}};
}

uint32_t Registry::abe_token_bits(const AbeMsk& msk) const {
    std::lock_guard lk(mu_);
    const AbeEntry& e = abe_.at(msk.id);
    return e.cfg.lambda + e.cfg.y_bits + e.cfg.r_bits;
}

Bits Registry::abe_kg(const AbeMsk& msk, const Bits& y, const Bits& r) const {
    std::lock_guard lk(mu_);
    const AbeEntry& e = abe_.at(msk.id);
    if (y.size() != e.cfg.y_bits || r.size() != e.cfg.r_bits) {
        throw std::invalid_argument("abe_kg: attribute width mismatch");
    }
    return mac(e.mac_key, "abe.kg", {y, r}, e.cfg.lambda).concat(y).concat(r);
}

Bits Registry::abe_enc(const AbePk& pk, const Bits& x, const Bits& m, RngStream&) {
    std::lock_guard lk(mu_);
    AbeEntry& e = abe_.at(pk.id);
    if (x.size() != e.cfg.x_bits) throw std::invalid_argument("abe_enc: ciphertext attribute width mismatch");
    if (m.size() != e.cfg.msg_bits) throw std::invalid_argument("abe_enc: message width mismatch");
    e.cts.emplace_back(x, m);
    // pk id (32) || ct index (32)
    return Bits::from_u64(pk.id << 32 | (e.cts.size() - 1), abe_ct_bits());
}

std::optional<Bits> Registry::abe_dec(const Bits& token, const Bits& ct) const {
    if (ct.size() != abe_ct_bits()) return std::nullopt;
    uint64_t id = ct.to_u64() >> 32, idx = ct.to_u64() & 0xffffffffULL;
    const AbeEntry* e;
    Bits x, m;
    {
        std::lock_guard lk(mu_);
        if (id >= abe_.size()) return std::nullopt;
        e = &abe_[id];
        if (idx >= e->cts.size()) return std::nullopt;
        x = e->cts[idx].first;
        m = e->cts[idx].second;
    }
    if (token.size() != e->cfg.lambda + e->cfg.y_bits + e->cfg.r_bits) return std::nullopt;
    Bits tag = token.slice(0, e->cfg.lambda);
    Bits y = token.slice(e->cfg.lambda, e->cfg.y_bits);
    Bits r = token.slice(e->cfg.lambda + e->cfg.y_bits, e->cfg.r_bits);
    if (mac(e->mac_key, "abe.kg", {y, r}, e->cfg.lambda) != tag) return std::nullopt;
    if (e->cfg.relation(x, y) != 0) return std::nullopt;
    return m;
}

std::pair<MiAbePk, MiAbeMsk> Registry::miabe_setup(MiAbeConfig cfg, RngStream& rng) {
    if (!cfg.relation) throw std::invalid_argument("miabe_setup: missing relation");
    if (cfg.slot_bits.empty()) throw std::invalid_argument("miabe_setup: no slots");
    std::lock_guard lk(mu_);
    MiAbeEntry e;
    e.cfg = std::move(cfg);
    e.mac_key = rng.bits(e.cfg.lambda);
    miabe_.push_back(std::move(e));
    uint64_t id = miabe_.size() - 1;
    return {MiAbePk{id}, MiAbeMsk{id}};
}

uint32_t Registry::miabe_slots(const MiAbeMsk& msk) const {
    std::lock_guard lk(mu_);
    return uint32_t(miabe_.at(msk.id).cfg.slot_bits.size());
}

uint32_t Registry::miabe_token_bits(const MiAbeMsk& msk, uint32_t slot) const {
    std::lock_guard lk(mu_);
    const MiAbeEntry& e = miabe_.at(msk.id);
    return e.cfg.lambda + e.cfg.slot_bits.at(slot);
}

Bits Registry::miabe_kg(const MiAbeMsk& msk, uint32_t slot, const Bits& y) const {
    std::lock_guard lk(mu_);
    const MiAbeEntry& e = miabe_.at(msk.id);
    if (slot >= e.cfg.slot_bits.size()) throw std::invalid_argument("miabe_kg: slot out of range");
    if (y.size() != e.cfg.slot_bits[slot]) throw std::invalid_argument("miabe_kg: attribute width mismatch");
    return mac(e.mac_key, "miabe.kg", {Bits::from_u64(slot, 32), y}, e.cfg.lambda).concat(y);
}

Bits Registry::miabe_enc(const MiAbePk& pk, const Bits& x, const Bits& m, RngStream&) {
    std::lock_guard lk(mu_);
    MiAbeEntry& e = miabe_.at(pk.id);
    if (x.size() != e.cfg.x_bits) throw std::invalid_argument("miabe_enc: ciphertext attribute width mismatch");
    if (m.size() != e.cfg.msg_bits) throw std::invalid_argument("miabe_enc: message width mismatch");
    e.cts.emplace_back(x, m);
    return Bits::from_u64(pk.id << 32 | (e.cts.size() - 1), abe_ct_bits());
}

std::optional<Bits> Registry::miabe_dec(const Bits& ct, const std::vector<Bits>& tokens) const {
    if (ct.size() != abe_ct_bits()) return std::nullopt;
    uint64_t id = ct.to_u64() >> 32, idx = ct.to_u64() & 0xffffffffULL;
    const MiAbeEntry* e;
    Bits x, m;
    {
        std::lock_guard lk(mu_);
        if (id >= miabe_.size()) return std::nullopt;
        e = &miabe_[id];
        if (idx >= e->cts.size()) return std::nullopt;
        x = e->cts[idx].first;
        m = e->cts[idx].second;
    }
    if (tokens.size() != e->cfg.slot_bits.size()) {
        throw std::invalid_argument("miabe_dec: expected " + std::to_string(e->cfg.slot_bits.size()) +
                                    " secret keys");
    }
    std::vector<Bits> ys;
    ys.reserve(tokens.size());
    for (uint32_t slot = 0; slot < tokens.size(); slot++) {
        const Bits& tok = tokens[slot];
        if (tok.size() != e->cfg.lambda + e->cfg.slot_bits[slot]) return std::nullopt;
        Bits tag = tok.slice(0, e->cfg.lambda);
        Bits y = tok.slice(e->cfg.lambda, e->cfg.slot_bits[slot]);
        if (mac(e->mac_key, "miabe.kg", {Bits::from_u64(slot, 32), y}, e->cfg.lambda) != tag) {
            return std::nullopt;
        }
        ys.push_back(std::move(y));
    }
    if (e->cfg.relation(x, ys) != 0) return std::nullopt;
    return m;
}

SkfeMsk Registry::skfe_setup(SkfeConfig cfg, RngStream& rng) {
    if (!cfg.functionality) throw std::invalid_argument("skfe_setup: missing functionality");
    std::lock_guard lk(mu_);
    SkfeEntry e;
    e.cfg = std::move(cfg);
    e.mac_key = rng.bits(e.cfg.lambda);
    skfe_.push_back(std::move(e));
    return SkfeMsk{skfe_.size() - 1};
}

uint32_t Registry::skfe_token_bits(const SkfeMsk& msk) const {
    std::lock_guard lk(mu_);
    const SkfeEntry& e = skfe_.at(msk.id);
    return e.cfg.lambda + e.cfg.y_bits;
}

Bits Registry::skfe_kg(const SkfeMsk& msk, const Bits& y) const {
    std::lock_guard lk(mu_);
    const SkfeEntry& e = skfe_.at(msk.id);
    if (y.size() != e.cfg.y_bits) throw std::invalid_argument("skfe_kg: attribute width mismatch");
    return mac(e.mac_key, "skfe.kg", {y}, e.cfg.lambda).concat(y);
}

Bits Registry::skfe_enc(const SkfeMsk& msk, const Bits& x, RngStream&) {
    std::lock_guard lk(mu_);
    SkfeEntry& e = skfe_.at(msk.id);
    if (x.size() != e.cfg.x_bits) throw std::invalid_argument("skfe_enc: plaintext width mismatch");
    e.cts.push_back(x);
    return Bits::from_u64(msk.id << 32 | (e.cts.size() - 1), abe_ct_bits());
}

std::optional<Bits> Registry::skfe_dec(const Bits& token, const Bits& ct) const {
    if (ct.size() != abe_ct_bits()) return std::nullopt;
    uint64_t id = ct.to_u64() >> 32, idx = ct.to_u64() & 0xffffffffULL;
    const SkfeEntry* e;
    Bits x;
    {
        std::lock_guard lk(mu_);
        if (id >= skfe_.size()) return std::nullopt;
        e = &skfe_[id];
        if (idx >= e->cts.size()) return std::nullopt;
        x = e->cts[idx];
    }
    if (token.size() != e->cfg.lambda + e->cfg.y_bits) return std::nullopt;
    Bits tag = token.slice(0, e->cfg.lambda);
    Bits y = token.slice(e->cfg.lambda, e->cfg.y_bits);
    if (mac(e->mac_key, "skfe.kg", {y}, e->cfg.lambda) != tag) return std::nullopt;
    auto z = e->cfg.functionality(x, y);
    if (z && z->size() != e->cfg.z_bits) throw std::logic_error("skfe_dec: functionality output width");
    return z;
}

}  // namespace skl::prims

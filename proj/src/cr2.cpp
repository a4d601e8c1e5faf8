#include "skl/cr2.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace skl::cr2 {

void Params::validate() const {
    inner.validate();
    if (y_bits == 0 || y_bits > 20) throw std::invalid_argument("cr2: y_bits out of range");
    if (msg_bits == 0) throw std::invalid_argument("cr2: zero message width");
}

namespace {

std::string ct_seg(uint32_t i) { return "SKECD.CT_" + std::to_string(i + 1); }
std::string sk_seg(uint32_t i) { return "ABE.SK_" + std::to_string(i + 1); }

}  // namespace

std::pair<Ek, Msk> setup(prims::Registry& reg, const Params& params, RngStream& rng) {
    params.validate();
    skecd::SecretKey skecd_sk = skecd::kg(params.inner, rng);
    const uint32_t k = params.slots();

    prims::MiAbeConfig cfg;
    cfg.lambda = params.lambda;
    cfg.x_bits = params.policy_bits() + prims::Registry::cc_encoding_bits();
    cfg.slot_bits.assign(k, params.lambda + 1);
    cfg.slot_bits[0] = params.lambda + 1 + params.y_bits;
    cfg.msg_bits = params.msg_bits;
    const uint32_t lambda = params.lambda;
    const uint32_t y_bits = params.y_bits;
    const uint32_t tt_bits = params.policy_bits();
    // R(x~ || C, y_1..y_k): reject unless all tags agree, C(u_1||..||u_k) is
    // bottom, and the policy truth table accepts y
    cfg.relation = [&reg, lambda, y_bits, tt_bits](const Bits& x, const std::vector<Bits>& ys) {
        Bits tag0 = ys[0].slice(0, lambda);
        Bits u(uint32_t(ys.size()));
        for (uint32_t i = 0; i < ys.size(); i++) {
            if (ys[i].slice(0, lambda) != tag0) return 1;
            u.set(i, ys[i].get(lambda));
        }
        auto handle = reg.cc_decode(x.slice(tt_bits, prims::Registry::cc_encoding_bits()));
        if (!handle) return 1;
        if (reg.cc_eval(*handle, u)) return 1;
        Bits y = ys[0].slice(lambda + 1, y_bits);
        return x.get(uint32_t(y.to_u64())) ? 1 : 0;
    };
    auto [pk, miabe_msk] = reg.miabe_setup(std::move(cfg), rng);
    return {Ek{pk, params}, Msk{params, miabe_msk, std::move(skecd_sk)}};
}

std::pair<Key, Vk> kg(prims::Registry& reg, const Msk& msk, const Bits& y, RngStream& rng) {
    const Params& p = msk.params;
    if (y.size() != p.y_bits) throw std::invalid_argument("cr2::kg: attribute width mismatch");
    const uint32_t k = p.slots();

    Bits tag = rng.bits(p.lambda);
    auto [skecd_ct, skecd_vk] = skecd::enc(msk.skecd_sk, Bits(p.inner.msg_bits), rng);

    // slot attributes: t||b||y for slot 1, t||b for the rest
    auto slot_attr = [&](uint32_t i, bool b) {
        Bits a = tag.concat(Bits::from_u64(b, 1));
        return i == 0 ? a.concat(y) : a;
    };

    qreg::RegisterLayout layout;
    for (uint32_t i = 0; i < k; i++) {
        layout.append(ct_seg(i), 1);
        layout.append(sk_seg(i), reg.miabe_token_bits(msk.miabe_msk, i));
    }
    qreg::SparseState state;
    state.layout = layout;
    const uint32_t n = p.inner.n;
    for (const auto& [qbits, amp] : skecd_ct.quantum.terms) {
        Bits full(layout.total_bits());
        for (uint32_t i = 0; i < k; i++) {
            bool bit = i < n ? qbits.get(i) : skecd_ct.classical.get(i - n);
            full.set(layout.segment(ct_seg(i)).offset, bit);
        }
        state.terms.emplace(std::move(full), amp);
    }
    state.normalize();

    Vk vk{skecd_vk.x, skecd_vk.theta, {}};
    for (uint32_t i = 0; i < k; i++) {
        qreg::apply_xor_oracle(state, {ct_seg(i)}, sk_seg(i), [&](const Bits& u) {
            return reg.miabe_kg(msk.miabe_msk, i, slot_attr(i, u.get(0)));
        });
        if (vk.theta.get(i)) {
            vk.sk_xor.emplace(i, reg.miabe_kg(msk.miabe_msk, i, slot_attr(i, false)) ^
                                     reg.miabe_kg(msk.miabe_msk, i, slot_attr(i, true)));
        }
    }
    return {Key{std::move(state), std::move(tag)}, std::move(vk)};
}

Ct enc(prims::Registry& reg, const Ek& ek, const Bits& policy_tt, const Bits& m, RngStream& rng) {
    const Params& p = ek.params;
    if (policy_tt.size() != p.policy_bits()) throw std::invalid_argument("cr2::enc: policy width mismatch");
    prims::CcParams pp{p.slots(), p.lambda, 0};
    prims::CcHandle sim = reg.cc_sim(pp, 1);
    return Ct{reg.miabe_enc(ek.pk, policy_tt.concat(reg.cc_encode(sim)), m, rng)};
}

std::pair<std::optional<Bits>, Key> dec(prims::Registry& reg, const Params& params, Key key, const Ct& ct) {
    const uint32_t k = params.slots();
    const uint32_t msg_bits = params.msg_bits;
    std::vector<std::string> src;
    std::vector<uint32_t> widths;
    for (uint32_t i = 0; i < k; i++) {
        src.push_back(sk_seg(i));
        widths.push_back(key.state.layout.segment(sk_seg(i)).width);
    }
    qreg::append_segment(key.state, "MSG", prims::opt_bits(msg_bits));
    qreg::apply_xor_oracle(key.state, src, "MSG", [&](const Bits& vs) {
        std::vector<Bits> tokens;
        tokens.reserve(k);
        uint32_t pos = 0;
        for (uint32_t i = 0; i < k; i++) {
            tokens.push_back(vs.slice(pos, widths[i]));
            pos += widths[i];
        }
        auto m = reg.miabe_dec(ct.miabe_ct, tokens);
        if (m && m->size() != msg_bits) m.reset();
        return prims::encode_opt(m, msg_bits);
    });
    RngStream det(0);
    Bits enc = qreg::measure_computational(key.state, "MSG", det).bits;
    qreg::trace_out(key.state, "MSG", det);
    return {prims::decode_opt(enc), std::move(key)};
}

Cert del(Key key, RngStream& rng) {
    const qreg::RegisterLayout layout = key.state.layout;
    Bits outcome = qreg::measure_hadamard_all(std::move(key.state), rng);
    Cert cert;
    for (uint32_t i = 0; layout.find(ct_seg(i)) >= 0; i++) {
        const auto& cs = layout.segment(ct_seg(i));
        const auto& ss = layout.segment(sk_seg(i));
        cert.slots.push_back({outcome.get(cs.offset), outcome.slice(ss.offset, ss.width)});
    }
    return cert;
}

bool vrfy(const Vk& vk, const Cert& cert) {
    if (cert.slots.size() != vk.x.size()) return false;
    for (const auto& [i, sx] : vk.sk_xor) {
        const Cert::Slot& s = cert.slots[i];
        if (s.d.size() != sx.size()) return false;
        if (vk.x.get(i) != (s.c ^ s.d.dot(sx))) return false;
    }
    return true;
}

nlohmann::json cert_to_json(const Cert& cert) {
    nlohmann::json slots = nlohmann::json::array();
    for (const auto& s : cert.slots) {
        slots.push_back({{"c", int(s.c)}, {"d", s.d.to_hex()}});
    }
    return {{"slots", slots}};
}

Cert cert_from_json(const nlohmann::json& j, const Params& params) {
    Cert cert;
    uint32_t i = 0;
    for (const auto& s : j.at("slots")) {
        // token = MAC(lambda) || t || b [|| y for slot 1]
        uint32_t nbits = 2 * params.lambda + 1 + (i == 0 ? params.y_bits : 0);
        cert.slots.push_back(
            {s.at("c").get<int>() != 0, Bits::from_hex(s.at("d").get<std::string>(), nbits)});
        i++;
    }
    return cert;
}

}  // namespace skl::cr2

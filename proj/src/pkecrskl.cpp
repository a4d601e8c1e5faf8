#include "skl/pkecrskl.hpp"

#include <stdexcept>

namespace skl::pkecrskl {

namespace {

uint32_t ske_dk_bits(const Params& p) {
    return p.ske.skecd_params().ell_ct() * (1 + p.ske.lambda);
}

}  // namespace

prims::CcParams pp_d(const Params& params) {
    return prims::CcParams{ske_dk_bits(params), params.ske.lambda, 0};
}

std::pair<Ek, Msk> setup(prims::Registry& reg, const Params& params, RngStream& rng) {
    skecrskl::Msk ske_msk = skecrskl::setup(params.ske, rng);
    prims::AbeConfig cfg;
    cfg.lambda = params.ske.lambda;
    cfg.x_bits = prims::Registry::cc_encoding_bits();
    cfg.y_bits = ske_dk_bits(params);
    cfg.r_bits = params.ske.lambda;
    cfg.msg_bits = params.msg_bits();
    // decryptable iff the policy circuit rejects the key string
    cfg.relation = [&reg](const Bits& x, const Bits& y) {
        auto handle = reg.cc_decode(x);
        if (!handle) return 1;
        return reg.cc_eval(*handle, y) ? 1 : 0;
    };
    auto [pk, abe_msk] = reg.abe_setup(std::move(cfg), rng);
    return {Ek{pk, params}, Msk{abe_msk, std::move(ske_msk)}};
}

std::pair<Dk, Vk> kg(prims::Registry& reg, const Msk& msk, RngStream& rng) {
    skecrskl::KeyTriple triple = skecrskl::kg(msk.ske_msk, rng);
    Bits k = rng.bits(msk.ske_msk.params.lambda);

    qreg::SparseState state = std::move(triple.dk.state);
    std::vector<std::string> src = state.layout.names();
    qreg::append_segment(state, "ABE.SK", reg.abe_token_bits(msk.abe_msk));
    qreg::apply_xor_oracle(state, src, "ABE.SK",
                           [&](const Bits& u) { return reg.abe_kg(msk.abe_msk, u, k); });

    return {Dk{std::move(state)}, Vk{msk.abe_msk, std::move(triple.vk), std::move(triple.tk), std::move(k)}};
}

Ct enc(prims::Registry& reg, const Ek& ek, const Bits& m, RngStream& rng) {
    prims::CcHandle sim = reg.cc_sim(pp_d(ek.params), 1);
    return Ct{reg.abe_enc(ek.abe_pk, reg.cc_encode(sim), m, rng)};
}

std::pair<std::optional<Bits>, Dk> dec(prims::Registry& reg, const Params& params, Dk dk, const Ct& ct) {
    // MSG carries a success flag so a failed ABE decryption stays a visible
    // bottom value after measurement
    const uint32_t msg_bits = params.msg_bits();
    qreg::append_segment(dk.state, "MSG", prims::opt_bits(msg_bits));
    qreg::apply_xor_oracle(dk.state, {"ABE.SK"}, "MSG", [&](const Bits& v) {
        auto m = reg.abe_dec(v, ct.abe_ct);
        if (m && m->size() != msg_bits) m.reset();
        return prims::encode_opt(m, msg_bits);
    });
    RngStream det(0);  // deterministic on honest keys
    Bits enc = qreg::measure_computational(dk.state, "MSG", det).bits;
    qreg::trace_out(dk.state, "MSG", det);
    return {prims::decode_opt(enc), std::move(dk)};
}

bool vrfy(prims::Registry& reg, const Params& params, const Vk& vk, Dk dk, RngStream& rng) {
    qreg::RegisterLayout expected = bb84sig::key_layout(params.ske.skecd_params().ell_ct(), params.ske.lambda);
    expected.append("ABE.SK", reg.abe_token_bits(vk.abe_msk));
    if (!(dk.state.layout == expected)) throw std::invalid_argument("pkecrskl::vrfy: layout mismatch");

    // key test on the SKE.DK registers
    std::vector<std::string> ske_segs = expected.without("ABE.SK").names();
    qreg::append_segment(dk.state, "SKE.KT", 1);
    qreg::apply_xor_oracle(dk.state, ske_segs, "SKE.KT", [&](const Bits& u) {
        return Bits::from_u64(skecrskl::keytest(vk.ske_tk, u, params.ske), 1);
    });
    bool kt = qreg::measure_computational(dk.state, "SKE.KT", rng).bits.get(0);
    qreg::trace_out(dk.state, "SKE.KT", rng);
    if (!kt) return false;

    // uncompute ABE.SK (KG is deterministic given k), then discard it
    qreg::apply_xor_oracle(dk.state, ske_segs, "ABE.SK",
                           [&](const Bits& u) { return reg.abe_kg(vk.abe_msk, u, vk.k); });
    qreg::trace_out(dk.state, "ABE.SK", rng);

    return skecrskl::vrfy(vk.ske_vk, skecrskl::Dk{std::move(dk.state)}, params.ske.lambda, rng);
}

}  // namespace skl::pkecrskl

#include "skl/feskl.hpp"

#include <stdexcept>

namespace skl::feskl {

SkfeSklMsk skfe_skl_setup(prims::Registry& reg, const SkfeSklParams& params, prims::FunctionalityFn F,
                          RngStream& rng) {
    skecd::SecretKey sk = skecd::kg(params.skecd_params(), rng);
    prims::SkfeConfig cfg;
    cfg.lambda = params.lambda;
    cfg.x_bits = params.x_bits;
    cfg.y_bits = params.y_bits;
    cfg.z_bits = params.effective_z_bits();
    cfg.functionality = std::move(F);
    prims::SkfeMsk skfe_msk = reg.skfe_setup(std::move(cfg), rng);
    return SkfeSklMsk{params, std::move(sk), skfe_msk};
}

SkfeSklKeyTriple skfe_skl_kg(prims::Registry& reg, const SkfeSklMsk& msk, const Bits& y, RngStream& rng) {
    Bits token = reg.skfe_kg(msk.skfe_msk, y);
    bb84sig::KeyMaterial km =
        bb84sig::kg(msk.skecd_sk, token, msk.params.lambda, msk.params.effective_owf_bits(), rng);
    return SkfeSklKeyTriple{SkfeSklKey{std::move(km.state)}, std::move(km.vk), std::move(km.tk)};
}

SkfeSklCt skfe_skl_enc(prims::Registry& reg, const SkfeSklMsk& msk, const Bits& x, RngStream& rng) {
    return SkfeSklCt{msk.skecd_sk, reg.skfe_enc(msk.skfe_msk, x, rng)};
}

std::optional<Bits> skfe_skl_cdec(prims::Registry& reg, const SkfeSklParams& params, const Bits& key_bits,
                                  const SkfeSklCt& ct) {
    Bits u = bb84sig::ct_substring(key_bits, ct.skecd_sk.params.ell_ct());
    auto token = skecd::cdec(ct.skecd_sk, u);
    if (!token) return std::nullopt;
    (void)params;
    return reg.skfe_dec(*token, ct.skfe_ct);
}

std::pair<std::optional<Bits>, SkfeSklKey> skfe_skl_dec(prims::Registry& reg, const SkfeSklParams& params,
                                                        SkfeSklKey key, const SkfeSklCt& ct) {
    const uint32_t z_bits = params.effective_z_bits();
    const uint32_t ell = ct.skecd_sk.params.ell_ct();
    const uint32_t block = key.state.layout.total_bits() / ell;
    std::vector<std::string> src;
    for (uint32_t i = 1; i <= ell; i++) src.push_back("SKECD.CT_" + std::to_string(i));
    qreg::append_segment(key.state, "MSG", prims::opt_bits(z_bits));
    qreg::apply_xor_oracle(key.state, src, "MSG", [&](const Bits& u_ct) {
        Bits padded(ell * block);
        for (uint32_t i = 0; i < u_ct.size(); i++) padded.set(i * block, u_ct.get(i));
        auto z = skfe_skl_cdec(reg, params, padded, ct);
        if (z && z->size() != z_bits) z.reset();
        return prims::encode_opt(z, z_bits);
    });
    RngStream det(0);
    Bits enc = qreg::measure_computational(key.state, "MSG", det).bits;
    qreg::trace_out(key.state, "MSG", det);
    return {prims::decode_opt(enc), std::move(key)};
}

bool skfe_skl_vrfy(const SkfeSklParams& params, const Vk& vk, SkfeSklKey key, RngStream& rng) {
    return bb84sig::vrfy(vk, std::move(key.state), params.lambda, rng);
}

bool skfe_skl_keytest(const SkfeSklParams& params, const Tk& tk, const Bits& key_bits) {
    return bb84sig::keytest(tk, key_bits, params.lambda, params.effective_owf_bits());
}

std::pair<bool, SkfeSklKey> skfe_skl_keytest_coherent(const SkfeSklParams& params, const Tk& tk,
                                                      SkfeSklKey key, RngStream& rng) {
    auto [bit, st] = bb84sig::keytest_coherent(tk, std::move(key.state), params.lambda,
                                               params.effective_owf_bits(), rng);
    return {bit, SkfeSklKey{std::move(st)}};
}

AbeSklParams make_abe_skl_params(uint32_t lambda, uint32_t n, uint32_t h, uint32_t x_bits, uint32_t y_bits,
                                 uint32_t msg_bits, prims::RelationFn relation) {
    AbeSklParams p;
    p.skfe.lambda = lambda;
    p.skfe.n = n;
    p.skfe.h = h;
    p.skfe.x_bits = x_bits + lambda;  // SKFE plaintext is x || z
    p.skfe.y_bits = y_bits;
    p.skfe.z_bits = lambda;
    p.msg_bits = msg_bits;
    p.relation = std::move(relation);
    return p;
}

namespace {

uint32_t skfe_key_bits(const AbeSklParams& p) {
    return p.skfe.skecd_params().ell_ct() * (1 + p.skfe.lambda);
}

}  // namespace

std::pair<AbeSklPk, AbeSklMsk> abe_skl_setup(prims::Registry& reg, AbeSklParams params, RngStream& rng) {
    if (!params.relation) throw std::invalid_argument("abe_skl_setup: missing relation");
    const uint32_t z_bits = params.skfe.effective_z_bits();
    prims::RelationFn R = params.relation;
    const uint32_t x_bits = params.x_bits();
    // F(x||z, y) = z when R(x,y)=0
    prims::FunctionalityFn F = [R, x_bits, z_bits](const Bits& xz, const Bits& y) -> std::optional<Bits> {
        if (R(xz.slice(0, x_bits), y) != 0) return std::nullopt;
        return xz.slice(x_bits, z_bits);
    };
    SkfeSklMsk skfe_msk = skfe_skl_setup(reg, params.skfe, std::move(F), rng);

    prims::AbeConfig cfg;
    cfg.lambda = params.skfe.lambda;
    cfg.x_bits = x_bits + prims::Registry::cc_encoding_bits();
    cfg.y_bits = params.y_bits() + skfe_key_bits(params);
    cfg.r_bits = params.skfe.lambda;
    cfg.msg_bits = params.msg_bits;
    const uint32_t y_bits = params.y_bits();
    // R'(x||C, y||u) = 0 iff R(x,y)=0 and C(u) = bottom
    cfg.relation = [&reg, R, x_bits, y_bits](const Bits& xp, const Bits& yp) {
        Bits x = xp.slice(0, x_bits);
        Bits c = xp.slice(x_bits, prims::Registry::cc_encoding_bits());
        Bits y = yp.slice(0, y_bits);
        Bits u = yp.slice(y_bits, yp.size() - y_bits);
        if (R(x, y) != 0) return 1;
        auto handle = reg.cc_decode(c);
        if (!handle) return 1;
        return reg.cc_eval(*handle, u) ? 1 : 0;
    };
    auto [pk, abe_msk] = reg.abe_setup(std::move(cfg), rng);
    AbeSklPk out_pk{pk, params};
    AbeSklMsk out_msk{std::move(params), abe_msk, std::move(skfe_msk)};
    return {std::move(out_pk), std::move(out_msk)};
}

std::pair<AbeSklKey, AbeSklVk> abe_skl_kg(prims::Registry& reg, const AbeSklMsk& msk, const Bits& y,
                                          RngStream& rng) {
    if (y.size() != msk.params.y_bits()) throw std::invalid_argument("abe_skl_kg: attribute width mismatch");
    SkfeSklKeyTriple triple = skfe_skl_kg(reg, msk.skfe_msk, y, rng);
    Bits k = rng.bits(msk.params.skfe.lambda);

    qreg::SparseState state = std::move(triple.key.state);
    std::vector<std::string> src = state.layout.names();
    qreg::append_segment(state, "ABE.SK", reg.abe_token_bits(msk.abe_msk));
    qreg::apply_xor_oracle(state, src, "ABE.SK",
                           [&](const Bits& u) { return reg.abe_kg(msk.abe_msk, y.concat(u), k); });

    return {AbeSklKey{std::move(state)},
            AbeSklVk{y, msk.abe_msk, std::move(triple.vk), std::move(triple.tk), std::move(k)}};
}

AbeSklCt abe_skl_enc(prims::Registry& reg, const AbeSklPk& pk, const Bits& x, const Bits& m, RngStream& rng) {
    if (x.size() != pk.params.x_bits()) throw std::invalid_argument("abe_skl_enc: attribute width mismatch");
    prims::CcParams pp{skfe_key_bits(pk.params), pk.params.skfe.lambda, 0};
    prims::CcHandle sim = reg.cc_sim(pp, 1);
    return AbeSklCt{reg.abe_enc(pk.abe_pk, x.concat(reg.cc_encode(sim)), m, rng)};
}

std::pair<std::optional<Bits>, AbeSklKey> abe_skl_dec(prims::Registry& reg, const AbeSklParams& params,
                                                      AbeSklKey key, const AbeSklCt& ct) {
    const uint32_t msg_bits = params.msg_bits;
    qreg::append_segment(key.state, "MSG", prims::opt_bits(msg_bits));
    qreg::apply_xor_oracle(key.state, {"ABE.SK"}, "MSG", [&](const Bits& v) {
        auto m = reg.abe_dec(v, ct.abe_ct);
        if (m && m->size() != msg_bits) m.reset();
        return prims::encode_opt(m, msg_bits);
    });
    RngStream det(0);
    Bits enc = qreg::measure_computational(key.state, "MSG", det).bits;
    qreg::trace_out(key.state, "MSG", det);
    return {prims::decode_opt(enc), std::move(key)};
}

bool abe_skl_vrfy(prims::Registry& reg, const AbeSklParams& params, const AbeSklVk& vk, AbeSklKey key,
                  RngStream& rng) {
    qreg::RegisterLayout expected =
        bb84sig::key_layout(params.skfe.skecd_params().ell_ct(), params.skfe.lambda);
    expected.append("ABE.SK", reg.abe_token_bits(vk.abe_msk));
    if (!(key.state.layout == expected)) throw std::invalid_argument("abe_skl_vrfy: layout mismatch");

    std::vector<std::string> skfe_segs = expected.without("ABE.SK").names();
    qreg::append_segment(key.state, "SKFE.KT", 1);
    qreg::apply_xor_oracle(key.state, skfe_segs, "SKFE.KT", [&](const Bits& u) {
        return Bits::from_u64(skfe_skl_keytest(params.skfe, vk.skfe_tk, u), 1);
    });
    bool kt = qreg::measure_computational(key.state, "SKFE.KT", rng).bits.get(0);
    qreg::trace_out(key.state, "SKFE.KT", rng);
    if (!kt) return false;

    qreg::apply_xor_oracle(key.state, skfe_segs, "ABE.SK",
                           [&](const Bits& u) { return reg.abe_kg(vk.abe_msk, vk.y.concat(u), vk.k); });
    qreg::trace_out(key.state, "ABE.SK", rng);

    return skfe_skl_vrfy(params.skfe, vk.skfe_vk, SkfeSklKey{std::move(key.state)}, rng);
}

}  // namespace skl::feskl

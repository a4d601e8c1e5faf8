#include "skl/skecrskl.hpp"

#include <stdexcept>

namespace skl::skecrskl {

Msk setup(const Params& params, RngStream& rng) {
    skecd::SecretKey sk = skecd::kg(params.skecd_params(), rng);
    Bits r = rng.bits(params.effective_msg_bits());
    return Msk{params, std::move(sk), std::move(r)};
}

KeyTriple kg(const Msk& msk, RngStream& rng) {
    bb84sig::KeyMaterial km =
        bb84sig::kg(msk.skecd_sk, msk.r, msk.params.lambda, msk.params.effective_owf_bits(), rng);
    return KeyTriple{Dk{std::move(km.state)}, std::move(km.vk), std::move(km.tk)};
}

Ct enc(const Msk& msk, const Bits& m) {
    if (m.size() != msk.r.size()) throw std::invalid_argument("skecrskl::enc: message width mismatch");
    return Ct{msk.skecd_sk, msk.r ^ m};
}

std::optional<Bits> cdec(const Bits& dk_bits, const Ct& ct) {
    Bits u = bb84sig::ct_substring(dk_bits, ct.skecd_sk.params.ell_ct());
    auto r = skecd::cdec(ct.skecd_sk, u);
    if (!r) return std::nullopt;
    return ct.z ^ *r;
}

std::pair<Bits, Dk> dec(Dk dk, const Ct& ct) {
    const uint32_t msg_bits = ct.z.size();
    std::vector<std::string> src;
    for (uint32_t i = 1; i <= ct.skecd_sk.params.ell_ct(); i++) {
        src.push_back("SKECD.CT_" + std::to_string(i));
    }
    const uint32_t block = dk.state.layout.total_bits() / ct.skecd_sk.params.ell_ct();
    qreg::append_segment(dk.state, "MSG", msg_bits);
    qreg::apply_xor_oracle(dk.state, src, "MSG", [&](const Bits& u_ct) {
        // re-assemble a full-width key string so cdec sees the CT sub-string
        Bits padded(ct.skecd_sk.params.ell_ct() * block);
        for (uint32_t i = 0; i < u_ct.size(); i++) padded.set(i * block, u_ct.get(i));
        auto m = cdec(padded, ct);
        return m ? *m : Bits(msg_bits);
    });
    RngStream det(0);  // deterministic on honest support
    Bits m = qreg::measure_computational(dk.state, "MSG", det).bits;
    qreg::trace_out(dk.state, "MSG", det);
    return {m, std::move(dk)};
}

bool vrfy(const Vk& vk, Dk dk, uint32_t lambda, RngStream& rng) {
    return bb84sig::vrfy(vk, std::move(dk.state), lambda, rng);
}

bool keytest(const Tk& tk, const Bits& dk_bits, const Params& params) {
    return bb84sig::keytest(tk, dk_bits, params.lambda, params.effective_owf_bits());
}

std::pair<bool, Dk> keytest_coherent(const Tk& tk, Dk dk, const Params& params, RngStream& rng) {
    auto [bit, st] =
        bb84sig::keytest_coherent(tk, std::move(dk.state), params.lambda, params.effective_owf_bits(), rng);
    return {bit, Dk{std::move(st)}};
}

}  // namespace skl::skecrskl

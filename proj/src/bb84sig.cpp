#include "skl/bb84sig.hpp"

#include <stdexcept>

namespace skl::bb84sig {

qreg::RegisterLayout key_layout(uint32_t ell_ct, uint32_t sig_bits) {
    qreg::RegisterLayout layout;
    for (uint32_t i = 1; i <= ell_ct; i++) {
        layout.append("SKECD.CT_" + std::to_string(i), 1);
        layout.append("S_" + std::to_string(i), sig_bits);
    }
    return layout;
}

KeyMaterial kg(const skecd::SecretKey& sk, const Bits& payload, uint32_t sig_bits, uint32_t owf_bits,
               RngStream& rng) {
    auto [skecd_ct, skecd_vk] = skecd::enc(sk, payload, rng);
    const uint32_t n = sk.params.n;
    const uint32_t ell = sk.params.ell_ct();

    // embed the BB84 qubits and the classical part into the block layout,
    // S registers all-zero
    qreg::RegisterLayout layout = key_layout(ell, sig_bits);
    qreg::SparseState state;
    state.layout = layout;
    const uint32_t block = 1 + sig_bits;
    for (const auto& [qbits, amp] : skecd_ct.quantum.terms) {
        Bits full(layout.total_bits());
        for (uint32_t i = 0; i < n; i++) full.set(i * block, qbits.get(i));
        for (uint32_t i = n; i < ell; i++) full.set(i * block, skecd_ct.classical.get(i - n));
        state.terms.emplace(std::move(full), amp);
    }
    state.normalize();

    prims::Owf f{sig_bits, owf_bits};
    Vk vk{skecd_vk.x, skecd_vk.theta, {}};
    Tk tk;
    tk.t.resize(ell);
    for (uint32_t i = 0; i < ell; i++) {
        std::array<Bits, 2> s{rng.bits(sig_bits), rng.bits(sig_bits)};
        tk.t[i] = {f.eval(s[0]), f.eval(s[1])};
        if (vk.theta.get(i)) vk.s_xor.emplace(i, s[0] ^ s[1]);
        qreg::apply_xor_oracle(state, {"SKECD.CT_" + std::to_string(i + 1)}, "S_" + std::to_string(i + 1),
                               [&s](const Bits& u) { return s[u.get(0)]; });
    }
    return KeyMaterial{std::move(state), std::move(vk), std::move(tk)};
}

Bits ct_substring(const Bits& dk_bits, uint32_t ell_ct) {
    if (dk_bits.size() % ell_ct != 0) throw std::invalid_argument("ct_substring: width mismatch");
    uint32_t block = dk_bits.size() / ell_ct;
    Bits out(ell_ct);
    for (uint32_t i = 0; i < ell_ct; i++) out.set(i, dk_bits.get(i * block));
    return out;
}

bool vrfy(const Vk& vk, qreg::SparseState dk, uint32_t sig_bits, RngStream& rng) {
    const uint32_t ell = vk.x.size();
    if (!(dk.layout == key_layout(ell, sig_bits))) {
        throw std::invalid_argument("bb84sig::vrfy: layout mismatch");
    }
    const uint32_t block = 1 + sig_bits;
    Bits outcome = qreg::measure_hadamard_all(std::move(dk), rng);
    for (const auto& [i, sx] : vk.s_xor) {
        bool c = outcome.get(i * block);
        Bits d = outcome.slice(i * block + 1, sig_bits);
        if (vk.x.get(i) != (c ^ d.dot(sx))) return false;
    }
    return true;
}

bool keytest(const Tk& tk, const Bits& dk_bits, uint32_t sig_bits, uint32_t owf_bits) {
    const uint32_t ell = uint32_t(tk.t.size());
    const uint32_t block = 1 + sig_bits;
    if (dk_bits.size() != ell * block) throw std::invalid_argument("keytest: width mismatch");
    prims::Owf f{sig_bits, owf_bits};
    for (uint32_t i = 0; i < ell; i++) {
        bool u = dk_bits.get(i * block);
        Bits v = dk_bits.slice(i * block + 1, sig_bits);
        if (f.eval(v) != tk.t[i][u]) return false;
    }
    return true;
}

std::pair<bool, qreg::SparseState> keytest_coherent(const Tk& tk, qreg::SparseState dk, uint32_t sig_bits,
                                                    uint32_t owf_bits, RngStream& rng) {
    const uint32_t ell = uint32_t(tk.t.size());
    const uint32_t block = 1 + sig_bits;
    prims::Owf f{sig_bits, owf_bits};
    // terms mostly share the same two preimages per position; cache the
    // per-position checks instead of rehashing every branch
    std::vector<std::map<Bits, std::array<std::optional<bool>, 2>>> cache(ell);
    auto term_passes = [&](const Bits& u) {
        for (uint32_t i = 0; i < ell; i++) {
            bool ui = u.get(i * block);
            Bits vi = u.slice(i * block + 1, sig_bits);
            auto& slot = cache[i][vi][ui];
            if (!slot) slot = (f.eval(vi) == tk.t[i][ui]);
            if (!*slot) return false;
        }
        return true;
    };
    std::vector<std::string> src = dk.layout.names();
    qreg::append_segment(dk, "KT", 1);
    qreg::apply_xor_oracle(dk, src, "KT",
                           [&](const Bits& u) { return Bits::from_u64(term_passes(u), 1); });
    bool result = qreg::measure_computational(dk, "KT", rng).bits.get(0);
    qreg::trace_out(dk, "KT", rng);
    return {result, std::move(dk)};
}

}  // namespace skl::bb84sig

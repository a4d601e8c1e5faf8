#include <doctest.h>

#include "skl/games.hpp"
#include "skl/runner.hpp"

using namespace skl;
using namespace skl::games;

static const skecrskl::Params kSke{16, 8, 4, 16, 16};

TEST_CASE("transcripts are replayable") {
    GameParams gp{2, 50, 99, 1};
    Transcript a = run_ot_ind_kla(kSke, honest_adversary(), gp);
    Transcript b = run_ot_ind_kla(kSke, honest_adversary(), gp);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.events_digest == b.events_digest);

    GameParams other{2, 50, 100, 1};
    Transcript c = run_ot_ind_kla(kSke, honest_adversary(), other);
    CHECK(a.events_digest != c.events_digest);
}

TEST_CASE("threaded runs aggregate deterministically") {
    GameParams seq{2, 60, 7, 1};
    GameParams par{2, 60, 7, 4};
    Transcript a = run_ot_ind_kla(kSke, honest_adversary(), seq);
    Transcript b = run_ot_ind_kla(kSke, honest_adversary(), par);
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(a.events_digest == b.events_digest);
}

TEST_CASE("honest adversary wins about half the time") {
    GameParams gp{2, 400, 11, 4};
    Transcript tr = run_ot_ind_kla(kSke, honest_adversary(), gp);
    CHECK(tr.pass_rates.at("verification_all") == 1.0);
    CHECK(tr.pass_rates.at("ind_win") > 0.40);
    CHECK(tr.pass_rates.at("ind_win") < 0.60);

    pkecrskl::Params pke{kSke};
    Transcript tr2 = run_ind_kla(pke, honest_adversary(), gp);
    CHECK(tr2.pass_rates.at("verification_all") == 1.0);
    CHECK(tr2.pass_rates.at("ind_win") > 0.40);
    CHECK(tr2.pass_rates.at("ind_win") < 0.60);
}

namespace {

// declines to return any key: the experiment must output 0 every time
class SilentAdversary final : public KlaAdversary {
public:
    void deletion_phase(std::vector<qreg::SparseState>, VerifyOracle&, LeaseEnv&, RngStream&) override {}
    std::pair<Bits, Bits> choose_challenge(uint32_t msg_bits, RngStream& rng) override {
        Bits m0 = rng.bits(msg_bits), m1 = rng.bits(msg_bits);
        if (m0 == m1) m1.flip(0);
        return {m0, m1};
    }
    int guess(const Bits&, LeaseEnv&, RngStream& rng) override { return rng.next_bit(); }
};

}  // namespace

TEST_CASE("never-verifying adversary never wins") {
    GameParams gp{2, 200, 13, 2};
    Transcript tr = run_kla_game("ot-ind-kla", "skecrskl", {}, skecrskl_env(kSke),
                                 [] { return std::make_unique<SilentAdversary>(); }, gp);
    CHECK(tr.wins == 0);
    CHECK(tr.pass_rates.at("verification_all") == 0.0);
}

TEST_CASE("collusion separation between strawman and skecrskl") {
    GameParams gp{4, 400, 17, 4};
    Transcript straw = run_strawman_collusion_demo(32, gp);
    CHECK(straw.pass_rates.at("verification_all") >= 0.99);
    CHECK(straw.pass_rates.at("ind_win") >= 0.98);

    GameParams gp2{2, 400, 19, 4};
    Transcript leased = run_kla_game("collusion-demo", "skecrskl", {}, skecrskl_env(kSke),
                                     measure_copy_colluder(), gp2);
    // h=4 here: the clone passes its own index, the measured key's check is a
    // coin per hadamard block
    CHECK(leased.pass_rates.at("verification_all") <= std::ldexp(1.0, -int(kSke.h)) + 0.05);
}

TEST_CASE("single key forces the colluder to choose") {
    GameParams gp{1, 300, 23, 2};
    Transcript tr = run_strawman_collusion_demo(32, gp);
    CHECK(tr.pass_rates.at("verification_all") <= 0.51);
}

TEST_CASE("measure-and-reprepare colluder fails all checks") {
    GameParams gp{2, 300, 29, 4};
    Transcript tr = run_kla_game("collusion-demo", "skecrskl", {}, skecrskl_env(kSke),
                                 measure_reprep_colluder(), gp);
    // 2^{-h q} with h=4, q=2
    CHECK(tr.pass_rates.at("verification_all") <= std::ldexp(1.0, -int(kSke.h * 2)) + 0.02);
}

TEST_CASE("key-test forgers never win") {
    GameParams gp{2, 1000, 31, 4};
    Transcript honest = run_key_test_skecrskl(kSke, honest_measurer_forger(), gp);
    CHECK(honest.pass_rates.at("forgery") == 0.0);
    CHECK(honest.pass_rates.at("keytest_accept") == 1.0);

    Transcript flip = run_key_test_skecrskl(kSke, bit_flip_forger(), gp);
    CHECK(flip.wins == 0);
    Transcript rand = run_key_test_skecrskl(kSke, random_string_forger(), gp);
    CHECK(rand.wins == 0);

    feskl::SkfeSklParams skfe;
    skfe.lambda = 16;
    skfe.n = 8;
    skfe.h = 4;
    skfe.x_bits = 8;
    skfe.y_bits = 8;
    Transcript skfe_flip = run_key_test_skfecrskl(skfe, bit_flip_forger(), gp);
    CHECK(skfe_flip.wins == 0);
}

TEST_CASE("ind-cva-cd adversaries") {
    skecd::Params params{16, 8, 4, 16};
    GameParams gp{1, 400, 37, 4};

    Transcript honest = run_ind_cva_cd(params, honest_deleter(), gp);
    CHECK(honest.pass_rates.at("verify_pass") == 1.0);
    CHECK(honest.pass_rates.at("ind_win") > 0.40);
    CHECK(honest.pass_rates.at("ind_win") < 0.60);

    Transcript silent = run_ind_cva_cd(params, no_delete_adversary(), gp);
    CHECK(silent.wins == 0);

    Transcript keeper = run_ind_cva_cd(params, keep_copy_attacker(), gp);
    CHECK(keeper.pass_rates.at("verify_pass") <= std::ldexp(1.0, -int(params.h)) + 0.05);
}

TEST_CASE("selective ind-kla null results for the attribute schemes") {
    GameParams gp{2, 200, 41, 4};
    feskl::AbeSklParams abe = feskl::make_abe_skl_params(
        16, 8, 4, 8, 8, 16, [](const Bits& x, const Bits& y) { return y.to_u64() <= x.to_u64() ? 0 : 1; });
    Transcript a = run_sel_ind_kla_abeskl(abe, gp);
    CHECK(a.pass_rates.at("verification_all") == 1.0);
    CHECK(a.pass_rates.at("ind_win") > 0.38);
    CHECK(a.pass_rates.at("ind_win") < 0.62);

    cr2::Params c2;
    c2.lambda = 16;
    c2.y_bits = 4;
    c2.msg_bits = 16;
    c2.inner = skecd::Params{3, 6, 4, 2};
    Transcript b = run_sel_ind_kla_cr2(c2, gp);
    CHECK(b.pass_rates.at("verification_all") == 1.0);
    CHECK(b.pass_rates.at("ind_win") > 0.38);
    CHECK(b.pass_rates.at("ind_win") < 0.62);
}

TEST_CASE("public-key environment grants encryption access") {
    RngStream rng(77);
    pkecrskl::Params pke{kSke};
    auto env = pkecrskl_env(pke)(rng);
    CHECK(env->public_encryption());
    qreg::SparseState key = env->issue_key(rng);
    Bits m = rng.bits(env->msg_bits());
    Bits ct = env->encrypt(m, rng);  // chosen-plaintext query
    Bits bits = measure_full_computational(key, rng);
    CHECK(env->classical_decrypt(bits, ct) == m);
}

TEST_CASE("wilson interval brackets the point estimate") {
    auto ci = wilson95(500, 1000);
    CHECK(ci[0] < 0.5);
    CHECK(ci[1] > 0.5);
    CHECK(ci[1] - ci[0] < 0.07);
    auto edge = wilson95(0, 100);
    CHECK(edge[0] == 0.0);
    CHECK(edge[1] < 0.05);
}

TEST_CASE("attribute-game oracle gates") {
    // threshold relation: y decryptable iff y <= x
    prims::RelationFn R = [](const Bits& x, const Bits& y) { return y.to_u64() <= x.to_u64() ? 0 : 1; };
    AbeKgGate gate(Bits::from_u64(5, 8), R);

    Bits y3 = Bits::from_u64(3, 8), y9 = Bits::from_u64(9, 8);
    CHECK(gate.allow_kg(y3));
    gate.record_kg(y3);
    CHECK(!gate.allow_kg(y3));  // one key per attribute
    CHECK(gate.allow_kg(y9));
    gate.record_kg(y9);

    // challenge is gated on the decryptable attribute being returned; the
    // non-decryptable one does not block it
    CHECK(!gate.challenge_ready());
    gate.record_vrfy(y9, true);
    CHECK(!gate.challenge_ready());
    gate.record_vrfy(y3, true);
    CHECK(gate.challenge_ready());

    // post-challenge: decryptable attributes are refused, others allowed
    gate.mark_challenged();
    CHECK(!gate.allow_kg(Bits::from_u64(4, 8)));
    CHECK(gate.allow_kg(Bits::from_u64(200, 8)));
}

TEST_CASE("ot-ind-kla environment exposes testing keys") {
    RngStream rng(55);
    auto env = skecrskl_env(kSke)(rng);
    qreg::SparseState key = env->issue_key(rng);
    const bb84sig::Tk* tk = env->testing_key(0);
    REQUIRE(tk != nullptr);
    // the adversary can key-test its own measured string
    Bits bits = measure_full_computational(key, rng);
    CHECK(skecrskl::keytest(*tk, bits, kSke));
}

TEST_CASE("hybrid policy demo: real obfuscation keeps honest decryption alive") {
    pkecrskl::Params pke{kSke};
    GameParams gp{1, 60, 43, 2};
    Transcript tr = run_pke_hybrid_demo(pke, gp);
    CHECK(tr.pass_rates.at("roundtrip") == 1.0);
}

TEST_CASE("runner roundtrip and validation") {
    runner::RunConfig cfg;
    cfg.scheme = "skecrskl";
    cfg.game = "roundtrip";
    cfg.lambda = 16;
    cfg.n = 8;
    cfg.hadamard = 4;
    cfg.trials = 25;
    auto res = runner::run(cfg);
    CHECK(res.thresholds_ok);
    CHECK(res.transcript.wins == 25);

    cfg.hadamard = 99;
    CHECK_THROWS_AS(runner::run(cfg), std::invalid_argument);
    cfg.hadamard = 4;
    cfg.game = "ind-cva-cd";
    CHECK_THROWS_AS(runner::run(cfg), std::invalid_argument);  // wrong scheme for game

    runner::RunConfig dump;
    dump.scheme = "skecrskl";
    dump.lambda = 16;
    dump.n = 8;
    dump.hadamard = 2;
    nlohmann::json key = runner::dump_key(dump);
    CHECK(key.at("terms").size() == 4);  // h=2 -> 4 terms
    for (const auto& t : key.at("terms")) {
        CHECK(std::abs(std::abs(t.at("re").get<double>()) - 0.5) < 1e-9);
    }
    // register names follow the construction
    CHECK(key.at("layout")[0].at("name") == "SKECD.CT_1");
    CHECK(key.at("layout")[1].at("name") == "S_1");
}
